#pragma once

// JSON form of domains:
//   {"type": "ball_p", "dim": 2, "p": 1.5}        p may be a number, a decimal string or "inf"
//   {"type": "cube", "dim": 3}
//   {"type": "interval", "lower": -1, "upper": 1}
//   {"type": "simplex", "vertices": [[0,0],[1,0],[0,1]]}
//   {"type": "simplex_union", "simplices": [[[..],..], ..], "convex": false}
//   {"type": "half_ball", "dim": 3}
//   {"type": "cone_disk"}
//   {"type": "product", "factors": [ ... ]}
//   {"type": "affine", "map": {"A": [[..],..], "b": [..]}, "base": { ... }}
// Matrices are row-major (one inner array per row).

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include <json.hpp>

#include "christoffel/common.hpp"
#include "christoffel/domain.hpp"

namespace christoffel::io {

using json = nlohmann::json;

namespace json_detail {

inline double parse_real(const json& j, const std::string& what) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    std::string s = j.get<std::string>();
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (s == "inf" || s == "+inf" || s == "infinity") return std::numeric_limits<double>::infinity();
    double v = 0.0;
    const char* first = s.data();
    if (!s.empty() && s[0] == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
    if (ec == std::errc() && ptr == s.data() + s.size()) return v;
  }
  throw ParseError("expected a real number for '" + what + "'");
}

inline const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ParseError(std::string("missing field '") + key + "'");
  return j.at(key);
}

inline int parse_int(const json& j, const std::string& what) {
  const double v = parse_real(j, what);
  if (v != std::floor(v) || v < 1 || v > 64) throw ParseError("expected a positive integer for '" + what + "'");
  return static_cast<int>(v);
}

inline Vector parse_vector(const json& j, const std::string& what) {
  if (!j.is_array() || j.empty()) throw ParseError("expected a non-empty array for '" + what + "'");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = parse_real(j[i], what);
  return v;
}

inline Matrix parse_matrix(const json& j, const std::string& what) {
  if (!j.is_array() || j.empty()) throw ParseError("expected a non-empty array of rows for '" + what + "'");
  const Vector first = parse_vector(j[0], what);
  Matrix m(static_cast<Eigen::Index>(j.size()), first.size());
  for (std::size_t r = 0; r < j.size(); ++r) {
    const Vector row = parse_vector(j[r], what);
    if (row.size() != first.size()) throw ParseError("ragged rows in '" + what + "'");
    m.row(static_cast<Eigen::Index>(r)) = row.transpose();
  }
  return m;
}

inline json real_json(double v) {
  if (std::isinf(v)) return v > 0 ? json("inf") : json("-inf");
  return json(v);
}

inline json vector_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(real_json(v[i]));
  return out;
}

inline json matrix_json(const Matrix& m) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) out.push_back(vector_json(m.row(r).transpose()));
  return out;
}

}  // namespace json_detail

inline Domain domain_from_json(const json& j) {
  using namespace json_detail;
  const json& type_field = field(j, "type");
  if (!type_field.is_string()) throw ParseError("'type' must be a string");
  const std::string type = type_field.get<std::string>();
  try {
    if (type == "interval") return Domain::interval(parse_real(field(j, "lower"), "lower"), parse_real(field(j, "upper"), "upper"));
    if (type == "cube") return Domain::cube(parse_int(field(j, "dim"), "dim"));
    if (type == "ball_p") return Domain::ball_p(parse_int(field(j, "dim"), "dim"), parse_real(field(j, "p"), "p"));
    if (type == "simplex") return Domain::simplex(parse_matrix(field(j, "vertices"), "vertices"));
    if (type == "simplex_union") {
      const json& list = field(j, "simplices");
      if (!list.is_array() || list.empty()) throw ParseError("'simplices' must be a non-empty array");
      std::vector<Matrix> simplices;
      for (const auto& s : list) simplices.push_back(parse_matrix(s, "simplices"));
      bool convex = false;
      if (j.contains("convex")) {
        if (!j.at("convex").is_boolean()) throw ParseError("'convex' must be a boolean");
        convex = j.at("convex").get<bool>();
      }
      return Domain::simplex_union(simplices, convex);
    }
    if (type == "half_ball") return Domain::half_ball(parse_int(field(j, "dim"), "dim"));
    if (type == "cone_disk") return Domain::cone_disk();
    if (type == "product") {
      const json& list = field(j, "factors");
      if (!list.is_array() || list.empty()) throw ParseError("'factors' must be a non-empty array");
      std::vector<Domain> factors;
      for (const auto& f : list) factors.push_back(domain_from_json(f));
      return Domain::product(std::move(factors));
    }
    if (type == "affine") {
      const json& map = field(j, "map");
      const Matrix a = parse_matrix(field(map, "A"), "A");
      const Vector b = parse_vector(field(map, "b"), "b");
      const Domain base = domain_from_json(field(j, "base"));
      if (a.rows() != a.cols() || a.rows() != b.size() || a.rows() != base.dim()) {
        throw DimensionMismatch("affine map size does not match its base domain");
      }
      return Domain::affine_image(AffineMap(a, b), base);
    }
  } catch (const ParseError&) {
    throw;
  } catch (const DimensionMismatch&) {
    throw;
  } catch (const Error& e) {
    // invalid parameters (singular map, bad p, ...) are input errors too
    throw ParseError(type + ": " + e.what());
  }
  throw ParseError("unknown domain type '" + type + "'");
}

inline Domain parse_domain(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
  return domain_from_json(j);
}

inline Domain load_domain(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open domain file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_domain(buf.str());
}

inline json to_json(const AffineMap& map) {
  return {{"A", json_detail::matrix_json(map.matrix())}, {"b", json_detail::vector_json(map.offset())}};
}

inline json domain_to_json(const Domain& domain) {
  using namespace json_detail;
  return domain.visit(detail::overloaded{
      [](const shape::Interval& s) -> json {
        return {{"type", "interval"}, {"lower", real_json(s.lower)}, {"upper", real_json(s.upper)}};
      },
      [](const shape::Cube& s) -> json { return {{"type", "cube"}, {"dim", s.dim}}; },
      [](const shape::BallP& s) -> json { return {{"type", "ball_p"}, {"dim", s.dim}, {"p", real_json(s.p)}}; },
      [](const shape::Simplex& s) -> json { return {{"type", "simplex"}, {"vertices", matrix_json(s.vertices)}}; },
      [](const shape::SimplexUnion& s) -> json {
        json list = json::array();
        for (const auto& m : s.simplices) list.push_back(matrix_json(m.vertices));
        return {{"type", "simplex_union"}, {"simplices", list}, {"convex", s.convex}};
      },
      [](const shape::HalfBall& s) -> json { return {{"type", "half_ball"}, {"dim", s.dim}}; },
      [](const shape::ConeDisk&) -> json { return {{"type", "cone_disk"}}; },
      [](const shape::Product& s) -> json {
        json list = json::array();
        for (const auto& f : s.factors) list.push_back(domain_to_json(f));
        return {{"type", "product"}, {"factors", list}};
      },
      [](const shape::Affine& s) -> json {
        return {{"type", "affine"}, {"map", to_json(s.map)}, {"base", domain_to_json(s.base)}};
      },
  });
}

inline std::string serialize_domain(const Domain& domain, int indent = 2) { return domain_to_json(domain).dump(indent); }

}  // namespace christoffel::io

#pragma once

// JSON and CSV renderings of results. CSV numbers use 17 significant digits and the C locale.

#include <charconv>
#include <cmath>
#include <string>
#include <vector>

#include "christoffel/asymptotics.hpp"
#include "christoffel/christoffel.hpp"
#include "christoffel/domain_json.hpp"

namespace christoffel::io {

inline std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

class CsvWriter {
 public:
  explicit CsvWriter(const std::vector<std::string>& header) { row_strings(header); }

  CsvWriter& cell(double v) { return raw(format_real(v)); }
  CsvWriter& cell(int v) { return raw(std::to_string(v)); }
  CsvWriter& cell(std::size_t v) { return raw(std::to_string(v)); }
  CsvWriter& cell(bool v) { return raw(v ? "1" : "0"); }
  CsvWriter& cell(const std::string& s) { return raw(s); }
  CsvWriter& cells(const Vector& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) cell(v[i]);
    return *this;
  }
  void end_row() {
    text_ += '\n';
    in_row_ = 0;
  }
  const std::string& str() const { return text_; }

 private:
  CsvWriter& raw(const std::string& s) {
    if (in_row_++ > 0) text_ += ',';
    text_ += s;
    return *this;
  }
  void row_strings(const std::vector<std::string>& items) {
    for (const auto& s : items) raw(s);
    end_row();
  }

  std::size_t in_row_ = 0;
  std::string text_;
};

inline json vector_to_json(const Vector& v) { return json_detail::vector_json(v); }

inline json to_json(const SigmaEstimate& est) {
  json samples = json::array();
  for (const auto& s : est.samples) {
    samples.push_back({{"n", s.degree},
                       {"C_max", json_detail::real_json(s.value)},
                       {"argmax", vector_to_json(s.argmax)},
                       {"degraded", s.degraded}});
  }
  return {{"degrees", est.degrees},
          {"values", est.values},
          {"slope", est.slope},
          {"intercept", est.intercept},
          {"half_width", est.half_width},
          {"r_squared", est.r_squared},
          {"tail_slope", est.tail_slope},
          {"excluded", est.excluded},
          {"samples", samples}};
}

inline json to_json(const Certificate& c) {
  json j = {{"kind", certificate_name(c.kind)},
            {"point", vector_to_json(c.point)},
            {"degree", c.degree},
            {"premise_passed", c.premise_passed},
            {"premise_violations", c.premise_violations}};
  const bool lower = c.kind == CertificateKind::lower_tensor || c.kind == CertificateKind::lower_parallel_section;
  if (lower) {
    j["bound"] = json_detail::real_json(c.bound);
    j["christoffel"] = json_detail::real_json(c.christoffel);
    j["bound_consistent"] = c.bound_consistent;
    j["witness_coefficients"] = vector_to_json(c.witness_coefficients);
  }
  if (c.rate_exponent > 0.0) j["rate_exponent"] = c.rate_exponent;
  if (!lower || c.rate_value > 0.0) {
    j["rate_value"] = json_detail::real_json(c.rate_value);
  }
  if (!lower) j["det_scale"] = json_detail::real_json(c.det_scale);
  if (c.witness_map) j["witness_map"] = to_json(*c.witness_map);
  json details = json::object();
  for (const auto& [k, v] : c.details) details[k] = json_detail::real_json(v);
  j["details"] = details;
  return j;
}

inline json to_json(const MaxReport& r) {
  json trace = json::array();
  for (const auto& t : r.trace) trace.push_back({{"point", vector_to_json(t.point)}, {"value", t.value}});
  return {{"value", r.value},
          {"argmax", vector_to_json(r.argmax)},
          {"candidates_examined", r.candidates_examined},
          {"degraded", r.degraded},
          {"argmax_is_sharp", r.argmax_is_sharp},
          {"boundary_value", r.boundary_value},
          {"interior_value", r.interior_value},
          {"trace", trace}};
}

inline json to_json(const ConsistencyReport& r) {
  json certs = json::array();
  for (const auto& c : r.certificates) certs.push_back(to_json(c));
  return {{"sigma_fit", to_json(r.fit)},
          {"sigma_reference", r.reference ? json(*r.reference) : json(nullptr)},
          {"tolerance", r.tolerance},
          {"convex", r.convex},
          {"within_general_bounds", r.within_general_bounds},
          {"matches_reference", r.matches_reference},
          {"certificates_ok", r.certificates_ok},
          {"passed", r.passed()},
          {"certificates", certs}};
}

/// CSV of a degree sweep: n, C_max, argmax_1..argmax_d, degraded.
inline std::string sweep_csv(const std::vector<DegreeSample>& samples, int dim) {
  std::vector<std::string> header{"n", "C_max"};
  for (int i = 1; i <= dim; ++i) header.push_back("argmax_" + std::to_string(i));
  header.push_back("degraded");
  CsvWriter csv(header);
  for (const auto& s : samples) {
    csv.cell(s.degree).cell(s.value).cells(s.argmax).cell(s.degraded);
    csv.end_row();
  }
  return csv.str();
}

}  // namespace christoffel::io

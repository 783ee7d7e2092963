#pragma once

// Command-line front end. run_cli() is the whole program; main() only forwards to it.
//
// Exit codes: 0 success, 1 usage or other error, 2 malformed domain JSON, 3 dimension
// mismatch, 4 degraded Gram system (results are still written), 5 certificate premise or
// consistency failure.

#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "christoffel/asymptotics.hpp"
#include "christoffel/christoffel.hpp"
#include "christoffel/domain_json.hpp"
#include "christoffel/report.hpp"

namespace christoffel::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kMalformed = 2,
  kDimension = 3,
  kDegraded = 4,
  kPremise = 5,
};

struct RunConfig {
  std::string command;
  std::string domain_path;
  int degree = -1;
  std::string degrees;  // a:b or a:b:s
  std::vector<double> point;
  std::string output;
  std::uint64_t seed = 1;
  int resolution = 0;
  std::string format = "json";
  // certify
  std::string kind;
  std::string map_text;  // inline JSON {"A": .., "b": ..} or a file path
  std::vector<double> y;
  std::vector<double> xi;
  int m = 3;
  double scale = 1.0;
  bool literal_cone = false;
  // norms
  std::size_t samples = 1 << 18;
  double q = 1.0;
  double r = std::numeric_limits<double>::infinity();
  int s = 1;
  std::string csv_path;
};

/// Parses "a:b" or "a:b:s" into an increasing list.
inline std::vector<int> parse_degrees(const std::string& text) {
  std::vector<int> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) {
    try {
      std::size_t used = 0;
      const int v = std::stoi(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      parts.push_back(v);
    } catch (const std::exception&) {
      throw DomainError("bad degree range '" + text + "'");
    }
  }
  if (parts.size() < 2 || parts.size() > 3) throw DomainError("degree range must be a:b or a:b:s");
  const int stride = parts.size() == 3 ? parts[2] : 1;
  if (stride < 1 || parts[0] < 0 || parts[1] < parts[0]) throw DomainError("degree range must be non-empty and increasing");
  std::vector<int> out;
  for (int n = parts[0]; n <= parts[1]; n += stride) out.push_back(n);
  return out;
}

namespace cli_detail {

inline Vector to_vector(const std::vector<double>& v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out[static_cast<Eigen::Index>(i)] = v[i];
  return out;
}

inline AffineMap parse_map(const std::string& text) {
  std::string body = text;
  if (!text.empty() && text.front() != '{') {
    std::ifstream in(text);
    if (!in) throw ParseError("cannot open map file '" + text + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    body = buf.str();
  }
  io::json j;
  try {
    j = io::json::parse(body);
  } catch (const io::json::exception& e) {
    throw ParseError(std::string("malformed map JSON: ") + e.what());
  }
  const Matrix a = io::json_detail::parse_matrix(io::json_detail::field(j, "A"), "A");
  const Vector b = io::json_detail::parse_vector(io::json_detail::field(j, "b"), "b");
  if (a.rows() != a.cols() || a.rows() != b.size()) throw DimensionMismatch("map matrix and offset sizes differ");
  return {a, b};
}

/// Map of [-1,1]^d onto the bounding box of the domain.
inline AffineMap box_map(const Domain& domain) {
  const Box box = domain.bounding_box();
  return {Matrix((0.5 * box.widths()).asDiagonal()), box.center()};
}

inline Vector default_point(const Domain& domain) {
  const auto sharp = domain.sharp_points(16);
  if (!sharp.empty()) return sharp.front();
  Vector dir = Vector::Zero(domain.dim());
  dir[0] = 1.0;
  return geometry::radial_boundary_point(domain, domain.star_center(), dir);
}

inline std::vector<int> degree_list(const RunConfig& cfg) {
  if (!cfg.degrees.empty()) return parse_degrees(cfg.degrees);
  if (cfg.degree < 0) throw DomainError("--degree or --degrees is required");
  return {cfg.degree};
}

inline SearchConfig search_config(const RunConfig& cfg) {
  SearchConfig search;
  search.resolution = cfg.resolution;
  return search;
}

inline io::json fit_json(const std::vector<DegreeSample>& samples) {
  try {
    return io::to_json(fit_power_law(samples));
  } catch (const InsufficientDataError& e) {
    return {{"error", e.what()}};
  }
}

}  // namespace cli_detail

class Runner {
 public:
  Runner(const RunConfig& cfg, std::ostream& err) : cfg_(cfg), err_(err) {}

  int run(std::string& out) {
    if (cfg_.format != "json" && cfg_.format != "csv") throw DomainError("--format must be json or csv");
    if (cfg_.command == "table") return table(out);
    domain_ = io::load_domain(cfg_.domain_path);
    if (cfg_.command == "eval") return eval(out);
    if (cfg_.command == "max") return max(out);
    if (cfg_.command == "sigma") return sigma(out);
    if (cfg_.command == "certify") return certify(out);
    if (cfg_.command == "norms") return norms(out);
    throw DomainError("unknown command '" + cfg_.command + "'");
  }

 private:
  int eval(std::string& out) {
    if (cfg_.degree < 0) throw DomainError("--degree is required");
    const Vector x = cli_detail::to_vector(cfg_.point);
    require_dim(domain_.dim(), x.size(), "--point");
    const ChristoffelEvaluator ev(assemble_gram(domain_, cfg_.degree));
    const double c = ev.christoffel_at(x);
    const bool degraded = ev.degraded();
    if (cfg_.format == "json") {
      out = io::json{{"x", io::vector_to_json(x)},
                     {"n", cfg_.degree},
                     {"C", c},
                     {"ratio", std::sqrt(c)},
                     {"inside", domain_.contains(x)},
                     {"degraded", degraded}}
                .dump(2) +
            "\n";
    } else {
      std::vector<std::string> header;
      for (int i = 1; i <= domain_.dim(); ++i) header.push_back("x_" + std::to_string(i));
      for (const char* h : {"n", "C", "ratio", "degraded"}) header.emplace_back(h);
      io::CsvWriter csv(header);
      csv.cells(x).cell(cfg_.degree).cell(c).cell(std::sqrt(c)).cell(degraded);
      csv.end_row();
      out = csv.str();
    }
    return degraded ? kDegraded : kOk;
  }

  int max(std::string& out) {
    const auto degrees = cli_detail::degree_list(cfg_);
    bool degraded = false;
    io::json records = io::json::array();
    std::vector<std::string> header{"n", "C_max", "ratio"};
    for (int i = 1; i <= domain_.dim(); ++i) header.push_back("argmax_" + std::to_string(i));
    header.emplace_back("degraded");
    header.emplace_back("argmax_is_sharp");
    io::CsvWriter csv(header);
    for (int n : degrees) {
      const ChristoffelEvaluator ev(assemble_gram(domain_, n));
      const auto report = ev.christoffel_max(cli_detail::search_config(cfg_));
      degraded = degraded || report.degraded;
      auto j = io::to_json(report);
      j["n"] = n;
      j["ratio"] = ev.nikolskii_ratio(report);
      records.push_back(j);
      csv.cell(n).cell(report.value).cell(std::sqrt(report.value)).cells(report.argmax).cell(report.degraded).cell(
          report.argmax_is_sharp);
      csv.end_row();
    }
    out = cfg_.format == "json" ? io::json{{"domain", io::domain_to_json(domain_)}, {"results", records}}.dump(2) + "\n"
                                : csv.str();
    return degraded ? kDegraded : kOk;
  }

  int sigma(std::string& out) {
    if (cfg_.degrees.empty()) throw DomainError("--degrees is required");
    const auto degrees = parse_degrees(cfg_.degrees);
    const auto samples = sweep_degrees(domain_, degrees, cli_detail::search_config(cfg_));
    const std::string csv = io::sweep_csv(samples, domain_.dim());
    if (!cfg_.csv_path.empty()) write_file(cfg_.csv_path, csv);
    if (cfg_.format == "csv") {
      out = csv;
    } else {
      const auto fit = fit_power_law(samples);
      const auto ref = sigma_reference(domain_);
      io::json j = {{"domain", io::domain_to_json(domain_)},
                    {"degrees", fit.degrees},
                    {"values", fit.values},
                    {"sigma_fit", io::to_json(fit)},
                    {"sigma_reference", ref ? io::json(*ref) : io::json(nullptr)},
                    {"certificates", io::json::array()}};
      out = j.dump(2) + "\n";
    }
    bool degraded = false;
    for (const auto& s : samples) degraded = degraded || s.degraded;
    return degraded ? kDegraded : kOk;
  }

  int certify(std::string& out) {
    const auto degrees = cli_detail::degree_list(cfg_);
    const int d = domain_.dim();
    std::vector<Certificate> certs;
    for (int n : degrees) certs.push_back(certify_one(n));
    bool ok = true;
    io::json list = io::json::array();
    std::vector<DegreeSample> bounds, rates;
    for (const auto& c : certs) {
      ok = ok && c.premise_passed && c.bound_consistent;
      list.push_back(io::to_json(c));
      const bool lower = c.kind == CertificateKind::lower_tensor || c.kind == CertificateKind::lower_parallel_section;
      bounds.push_back({c.degree, lower ? c.bound : 0.0, c.point, false});
      rates.push_back({c.degree, c.rate_value, c.point, false});
    }
    if (cfg_.format == "json") {
      io::json j = certs.size() == 1 ? list.front() : io::json{{"certificates", list}};
      if (certs.size() > 1) {
        const bool lower = certs.front().kind == CertificateKind::lower_tensor ||
                           certs.front().kind == CertificateKind::lower_parallel_section;
        if (lower) j["bound_fit"] = cli_detail::fit_json(bounds);
        if (certs.front().rate_value > 0.0) j["rate_fit"] = cli_detail::fit_json(rates);
      }
      j["domain"] = io::domain_to_json(domain_);
      out = j.dump(2) + "\n";
    } else {
      std::vector<std::string> header{"kind", "n"};
      for (int i = 1; i <= d; ++i) header.push_back("point_" + std::to_string(i));
      for (const char* h : {"bound", "christoffel", "rate_exponent", "det_scale", "rate_value", "premise_passed"}) {
        header.emplace_back(h);
      }
      io::CsvWriter csv(header);
      for (const auto& c : certs) {
        csv.cell(std::string(certificate_name(c.kind))).cell(c.degree).cells(c.point).cell(c.bound).cell(c.christoffel);
        csv.cell(c.rate_exponent).cell(c.det_scale).cell(c.rate_value).cell(c.premise_passed);
        csv.end_row();
      }
      out = csv.str();
    }
    if (!ok) err_ << "certificate premise or consistency check failed\n";
    return ok ? kOk : kPremise;
  }

  Certificate certify_one(int n) {
    const int d = domain_.dim();
    const std::string& kind = cfg_.kind;
    if (kind == "lower-tensor") {
      const AffineMap map = cfg_.map_text.empty() ? cli_detail::box_map(domain_) : cli_detail::parse_map(cfg_.map_text);
      require_dim(d, map.dim(), "--map");
      Vector y;
      if (!cfg_.y.empty()) {
        y = cli_detail::to_vector(cfg_.y);
      } else if (!cfg_.point.empty()) {
        y = map.apply_inverse(cli_detail::to_vector(cfg_.point));
      } else {
        y = map.apply_inverse(cli_detail::default_point(domain_));
      }
      require_dim(d, y.size(), "--y");
      // clamp rounding noise from the inverse map
      for (Eigen::Index i = 0; i < y.size(); ++i) {
        if (std::abs(y[i]) > 1.0 && std::abs(y[i]) < 1.0 + 1e-12) y[i] = y[i] > 0 ? 1.0 : -1.0;
      }
      return tensor_lower_certificate(domain_, map, y, n);
    }
    if (kind == "lower-parallel") {
      Vector xi;
      if (cfg_.xi.empty()) {
        xi = Vector::Zero(d);
        xi[0] = -1.0;
      } else {
        xi = cli_detail::to_vector(cfg_.xi);
      }
      require_dim(d, xi.size(), "--xi");
      return parallel_section_lower(domain_, xi, n, cfg_.m);
    }
    if (kind == "upper-ellipsoid") {
      AffineMap map = AffineMap::identity(d);
      if (!cfg_.map_text.empty()) {
        map = cli_detail::parse_map(cfg_.map_text);
      } else if (domain_.kind() == ShapeKind::half_ball && d == 3) {
        map = geometry::half_ball_map(n);
      } else if (domain_.kind() != ShapeKind::ball_p && domain_.kind() != ShapeKind::cube) {
        throw DomainError("upper-ellipsoid needs --map for this domain");
      }
      require_dim(d, map.dim(), "--map");
      if (cfg_.scale != 1.0) map = AffineMap(cfg_.scale * map.matrix(), map.offset());
      return inscribed_upper_certificate(domain_, map, n);
    }
    if (kind == "upper-cone") {
      Vector x;
      if (cfg_.point.empty()) {
        const Vector dir = Vector::Constant(d, 1.0 / std::sqrt(static_cast<double>(d)));
        x = geometry::radial_boundary_point(domain_, Vector::Zero(d), dir);
      } else {
        x = cli_detail::to_vector(cfg_.point);
      }
      require_dim(d, x.size(), "--point");
      return cone_upper_certificate(domain_, x, n, !cfg_.literal_cone);
    }
    throw DomainError("unknown certificate kind '" + kind + "'");
  }

  int norms(std::string& out) {
    if (cfg_.degree < 0) throw DomainError("--degree is required");
    const ChristoffelEvaluator ev(assemble_gram(domain_, cfg_.degree));
    const auto& system = ev.system();
    std::mt19937_64 rng(cfg_.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Vector phi(static_cast<Eigen::Index>(system.size()));
    for (Eigen::Index k = 0; k < phi.size(); ++k) phi[k] = normal(rng);
    NormConfig norm_cfg;
    norm_cfg.samples = cfg_.samples;
    norm_cfg.seed = cfg_.seed;
    norm_cfg.search = cli_detail::search_config(cfg_);
    const double ps[] = {1.0, 2.0, 4.0, std::numeric_limits<double>::infinity()};
    io::json norms = io::json::array();
    io::CsvWriter csv({"p", "norm", "std_error", "lower_estimate"});
    for (double p : ps) {
      const auto est = l_norm(system, phi, p, norm_cfg);
      norms.push_back({{"p", io::json_detail::real_json(p)},
                       {"norm", est.value},
                       {"std_error", est.std_error},
                       {"lower_estimate", est.lower_estimate}});
      csv.cell(p).cell(est.value).cell(est.std_error).cell(est.lower_estimate);
      csv.end_row();
    }
    const auto boot = bootstrap_check(ev, phi, cfg_.q, cfg_.r, cfg_.s, norm_cfg);
    if (cfg_.format == "json") {
      io::json j = {{"domain", io::domain_to_json(domain_)},
                    {"n", cfg_.degree},
                    {"seed", cfg_.seed},
                    {"norms", norms},
                    {"bootstrap",
                     {{"q", boot.q},
                      {"r", io::json_detail::real_json(boot.r)},
                      {"s", boot.s},
                      {"ratio", boot.ratio},
                      {"christoffel_max", boot.christoffel_max},
                      {"bound", boot.bound},
                      {"slack", boot.slack},
                      {"passed", boot.passed}}},
                    {"degraded", ev.degraded()}};
      out = j.dump(2) + "\n";
    } else {
      out = csv.str();
    }
    if (ev.degraded()) return kDegraded;
    return boot.passed ? kOk : kPremise;
  }

  int table(std::string& out) {
    const auto rows = reference_table();
    if (cfg_.format == "json") {
      io::json list = io::json::array();
      for (const auto& r : rows) {
        list.push_back({{"shape", r.shape}, {"dim", r.dim}, {"parameter", r.parameter}, {"sigma", r.sigma}});
      }
      out = list.dump(2) + "\n";
    } else {
      io::CsvWriter csv({"shape", "dim", "parameter", "sigma"});
      for (const auto& r : rows) {
        csv.cell(r.shape).cell(r.dim).cell(r.parameter).cell(r.sigma);
        csv.end_row();
      }
      out = csv.str();
    }
    return kOk;
  }

  static void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot write '" + path + "'");
    f << text;
  }

  const RunConfig& cfg_;
  std::ostream& err_;
  Domain domain_;
};

/// Runs the command line; all output goes to `out` (or the --output file) at the end.
inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Christoffel functions, Nikol'skii exponents and certificates"};
  app.require_subcommand(1, 1);
  RunConfig cfg;

  auto add_common = [&](CLI::App* sub, bool needs_domain) {
    auto* opt = sub->add_option("--domain", cfg.domain_path, "domain JSON file");
    if (needs_domain) opt->required();
    sub->add_option("--output", cfg.output, "output file (default: standard output)");
    sub->add_option("--format", cfg.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--seed", cfg.seed, "random seed");
    sub->add_option("--resolution", cfg.resolution, "boundary sample count for the max search");
  };
  auto* eval = app.add_subcommand("eval", "Christoffel function at a point");
  add_common(eval, true);
  eval->add_option("--degree", cfg.degree, "total degree n")->required();
  eval->add_option("--point", cfg.point, "coordinates of x")->required()->delimiter(',');

  auto* max = app.add_subcommand("max", "maximum of the Christoffel function over the domain");
  add_common(max, true);
  max->add_option("--degree", cfg.degree, "total degree n");
  max->add_option("--degrees", cfg.degrees, "degree range a:b[:s]");

  auto* sigma = app.add_subcommand("sigma", "fit the growth exponent over a degree range");
  add_common(sigma, true);
  sigma->add_option("--degrees", cfg.degrees, "degree range a:b[:s]")->required();
  sigma->add_option("--csv", cfg.csv_path, "also write the (n, C_max) table to this file");

  auto* certify = app.add_subcommand("certify", "lower and upper bound certificates");
  add_common(certify, true);
  certify->add_option("--kind", cfg.kind, "lower-tensor, lower-parallel, upper-ellipsoid or upper-cone")
      ->required()
      ->check(CLI::IsMember({"lower-tensor", "lower-parallel", "upper-ellipsoid", "upper-cone"}));
  certify->add_option("--degree", cfg.degree, "total degree n");
  certify->add_option("--degrees", cfg.degrees, "degree range a:b[:s]");
  certify->add_option("--map", cfg.map_text, "affine map as JSON {\"A\":..,\"b\":..} or a file holding it");
  certify->add_option("--y", cfg.y, "point of [-1,1]^d for lower-tensor")->delimiter(',');
  certify->add_option("--point", cfg.point, "point of the domain")->delimiter(',');
  certify->add_option("--xi", cfg.xi, "direction for lower-parallel")->delimiter(',');
  certify->add_option("--m", cfg.m, "kernel power for lower-parallel");
  certify->add_option("--scale", cfg.scale, "multiply the map matrix (upper-ellipsoid)");
  certify->add_flag("--literal-cone", cfg.literal_cone, "use the cone map without the containment factor");

  auto* norms = app.add_subcommand("norms", "Lp norms of a random polynomial and the bootstrap inequality");
  add_common(norms, true);
  norms->add_option("--degree", cfg.degree, "total degree n")->required();
  norms->add_option("--samples", cfg.samples, "quasi-Monte Carlo sample count");
  norms->add_option("--q", cfg.q, "lower exponent");
  norms->add_option("--r", cfg.r, "upper exponent (inf allowed)");
  norms->add_option("--s", cfg.s, "power used for the bootstrap bound");

  auto* table = app.add_subcommand("table", "closed-form exponent table");
  add_common(table, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return kUsage;
  }
  for (auto* sub : app.get_subcommands()) cfg.command = sub->get_name();

  std::string text;
  int code = kOk;
  try {
    Runner runner(cfg, err);
    code = runner.run(text);
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kMalformed;
  } catch (const DimensionMismatch& e) {
    err << "error: " << e.what() << "\n";
    return kDimension;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  if (code == kDegraded) err << "warning: Gram system degraded; values are flagged\n";
  if (cfg.output.empty()) {
    out << text;
  } else {
    std::ofstream f(cfg.output, std::ios::binary);
    if (!f) {
      err << "error: cannot write '" << cfg.output << "'\n";
      return kUsage;
    }
    f << text;
  }
  return code;
}

}  // namespace christoffel::cli

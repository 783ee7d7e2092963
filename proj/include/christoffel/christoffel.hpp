#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <vector>

#include "christoffel/common.hpp"
#include "christoffel/gram.hpp"
#include "christoffel/moments.hpp"
#include "christoffel/sampling.hpp"
#include "christoffel/search.hpp"

namespace christoffel {

/// Polynomial as coefficients in a basis.
struct Polynomial {
  BasisSpec basis;
  Vector coefficients;

  double operator()(const Vector& x) const { return basis.evaluate(x).dot(coefficients); }

  Quad value_quad(const Vector& x) const {
    std::vector<Quad> xr(x.data(), x.data() + x.size());
    std::vector<Quad> psi(basis.size());
    basis.evaluate<Quad>(std::span<const Quad>(xr), std::span<Quad>(psi));
    Quad acc = 0;
    for (std::size_t k = 0; k < psi.size(); ++k) acc += psi[k] * Quad(coefficients[static_cast<Eigen::Index>(k)]);
    return acc;
  }
};

struct MaxReport {
  double value = 0.0;
  Vector argmax;
  std::size_t candidates_examined = 0;
  std::vector<TracePoint> trace;
  bool degraded = false;
  bool argmax_is_sharp = false;
  double boundary_value = 0.0;
  double interior_value = 0.0;
};

/// Read-only view of a Gram system answering Christoffel-function queries.
class ChristoffelEvaluator {
 public:
  explicit ChristoffelEvaluator(std::shared_ptr<const GramSystem> system) : system_(std::move(system)) {}

  ChristoffelEvaluator(const Domain& domain, int degree, const GramOptions& options = {})
      : system_(assemble_gram(domain, degree, options)) {}

  const GramSystem& system() const { return *system_; }
  std::shared_ptr<const GramSystem> system_ptr() const { return system_; }
  const Domain& domain() const { return system_->domain(); }
  int degree() const { return system_->degree(); }
  bool degraded() const { return system_->degraded(); }

  double christoffel_at(const Vector& x) const { return to_double(system_->christoffel_quad(x)); }

  double christoffel_fast(const Vector& x) const { return system_->christoffel_fast(x); }

  double kernel_at(const Vector& x, const Vector& y) const {
    const auto wx = system_->whiten(system_->basis_values<Quad>(x));
    const auto wy = system_->whiten(system_->basis_values<Quad>(y));
    Quad acc = 0;
    for (std::size_t i = 0; i < wx.size(); ++i) acc += wx[i] * wy[i];
    return to_double(acc);
  }

  /// f = K(x, .) / K(x, x): the minimal L2 norm polynomial with f(x) = 1.
  Polynomial extremal_polynomial(const Vector& x) const {
    const auto psi = system_->basis_values<Quad>(x);
    const auto a = system_->solve(psi);
    Quad kxx = 0;
    for (std::size_t k = 0; k < psi.size(); ++k) kxx += a[k] * psi[k];
    Vector coeffs(static_cast<Eigen::Index>(a.size()));
    for (std::size_t k = 0; k < a.size(); ++k) coeffs[static_cast<Eigen::Index>(k)] = to_double(a[k] / kxx);
    return {system_->basis(), coeffs};
  }

  /// Kernel polynomial K(x, .) in the system's basis.
  Polynomial kernel_polynomial(const Vector& x) const {
    const auto a = system_->solve(system_->basis_values<Quad>(x));
    Vector coeffs(static_cast<Eigen::Index>(a.size()));
    for (std::size_t k = 0; k < a.size(); ++k) coeffs[static_cast<Eigen::Index>(k)] = to_double(a[k]);
    return {system_->basis(), coeffs};
  }

  /// Squared L2 norm over the domain of a polynomial in the system's basis.
  double l2_squared(const Vector& coefficients) const { return system_->quadratic_form(coefficients); }

  MaxReport christoffel_max(const SearchConfig& config = {}) const {
    const auto found = maximize_on_domain(
        domain(), [this](const Vector& x) { return christoffel_fast(x); },
        [this](const Vector& x) { return christoffel_at(x); }, config);
    MaxReport report;
    report.value = found.value;
    report.argmax = found.argmax;
    report.candidates_examined = found.candidates_examined;
    report.trace = found.trace;
    report.degraded = degraded();
    report.argmax_is_sharp = found.argmax_is_sharp;
    report.boundary_value = found.boundary_value;
    report.interior_value = found.interior_value;
    return report;
  }

  /// sup over P_n of |f|_inf / |f|_2, i.e. the square root of the maximal Christoffel value.
  double nikolskii_ratio(const MaxReport& report) const { return std::sqrt(report.value); }
  double nikolskii_ratio(const SearchConfig& config = {}) const { return nikolskii_ratio(christoffel_max(config)); }

 private:
  std::shared_ptr<const GramSystem> system_;
};

struct NormEstimate {
  double value = 0.0;
  double std_error = 0.0;
  bool lower_estimate = false;  // sup norms come from a finite search
};

struct NormConfig {
  std::size_t samples = 1 << 18;
  std::uint64_t seed = 7;
  SearchConfig search{};
};

/// L_p norm over the system's domain of a polynomial in its basis: p = 2 through the Gram
/// quadratic form, p = infinity by maximization, other p by quasi-Monte Carlo.
inline NormEstimate l_norm(const GramSystem& system, const Vector& coefficients, double p,
                           const NormConfig& config = {}) {
  require_dim(static_cast<int>(system.size()), coefficients.size(), "coefficient vector");
  if (!(p > 0.0)) throw DomainError("l_norm: p must be positive");
  const Polynomial poly{system.basis(), coefficients};
  if (p == 2.0) return {std::sqrt(std::max(0.0, system.quadratic_form(coefficients))), 0.0, false};
  if (std::isinf(p)) {
    const auto found = maximize_on_domain(
        system.domain(), [&](const Vector& x) { return std::abs(poly(x)); },
        [&](const Vector& x) { return std::abs(to_double(poly.value_quad(x))); }, config.search);
    return {found.value, 0.0, true};
  }
  const Domain& domain = system.domain();
  const Box box = domain.bounding_box();
  const double box_volume = box.volume();
  sampling::Halton halton(domain.dim(), config.seed);
  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t i = 1; i <= config.samples; ++i) {
    const Vector x = box.lower + (box.upper - box.lower).cwiseProduct(halton.point(i));
    if (!domain.contains(x)) continue;
    const double v = std::pow(std::abs(poly(x)), p);
    sum += v;
    sum_sq += v * v;
  }
  const double m = static_cast<double>(config.samples);
  const double mean = sum / m;
  const double integral = box_volume * mean;
  const double integral_se = box_volume * std::sqrt(std::max(0.0, sum_sq / m - mean * mean) / m);
  const double value = std::pow(integral, 1.0 / p);
  // delta method for integral^{1/p}
  const double se = integral > 0.0 ? value / (p * integral) * integral_se : 0.0;
  return {value, se, false};
}

struct BootstrapReport {
  double q = 2.0;
  double r = 0.0;
  int s = 1;
  NormEstimate norm_q;
  NormEstimate norm_r;
  double ratio = 0.0;
  double christoffel_max = 0.0;  // over P_{ns}
  double bound = 0.0;            // christoffel_max^{1/q - 1/r}
  double slack = 0.0;            // bound - ratio
  bool passed = false;
};

/// Checks |phi|_r <= C(P_{ns}, D)^{1/q - 1/r} |phi|_q for phi of degree n and q <= 2s.
inline BootstrapReport bootstrap_check(const ChristoffelEvaluator& evaluator, const Vector& phi, double q, double r,
                                       int s, const NormConfig& config = {}, const GramOptions& options = {}) {
  if (!(q > 0.0) || !(r >= q)) throw DomainError("bootstrap_check: need 0 < q <= r");
  if (s < 1) throw DomainError("bootstrap_check: s must be a positive integer");
  if (q > 2.0 * s) throw DomainError("bootstrap_check: need q <= 2 s");
  BootstrapReport report;
  report.q = q;
  report.r = r;
  report.s = s;
  const auto& system = evaluator.system();
  report.norm_q = l_norm(system, phi, q, config);
  report.norm_r = q == r ? report.norm_q : l_norm(system, phi, r, config);
  report.ratio = report.norm_r.value / report.norm_q.value;
  const int lifted = evaluator.degree() * s;
  const ChristoffelEvaluator big =
      s == 1 ? evaluator : ChristoffelEvaluator(assemble_gram(evaluator.domain(), lifted, options));
  report.christoffel_max = big.christoffel_max(config.search).value;
  const double exponent = 1.0 / q - (std::isinf(r) ? 0.0 : 1.0 / r);
  report.bound = std::pow(report.christoffel_max, exponent);
  report.slack = report.bound - report.ratio;
  // sampled norms carry error bars; allow three standard errors of the ratio
  const double rel_err = report.norm_q.std_error / report.norm_q.value + report.norm_r.std_error / report.norm_r.value;
  report.passed = report.ratio <= report.bound * (1.0 + 1e-9) + 3.0 * rel_err * report.ratio;
  return report;
}

}  // namespace christoffel

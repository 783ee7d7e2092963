#pragma once

// Univariate special functions: Legendre and Jacobi polynomials, Gauss-Legendre
// rules, the width function rho_n, Chebyshev kernel polynomials and the
// lacunary L4 fixture.

#include <cmath>
#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "christoffel/common.hpp"

namespace christoffel::orthopoly {

/// Classical Legendre polynomial P_k(x), P_k(1) = 1.
template <class Real>
Real legendre(int k, const Real& x) {
  if (k == 0) return Real(1);
  Real prev(1), cur = x;
  for (int j = 1; j < k; ++j) {
    Real next = (Real(2 * j + 1) * x * cur - Real(j) * prev) / Real(j + 1);
    prev = cur;
    cur = next;
  }
  return cur;
}

/// Fills out[0..n] with the L2[-1,1]-orthonormal Legendre values at x.
template <class Real>
void legendre_normalized_table(int n, const Real& x, std::span<Real> out) {
  using std::sqrt;
  Real prev(1), cur = x;
  out[0] = sqrt(Real(1) / Real(2));
  if (n >= 1) out[1] = sqrt(Real(3) / Real(2)) * x;
  for (int j = 1; j < n; ++j) {
    Real next = (Real(2 * j + 1) * x * cur - Real(j) * prev) / Real(j + 1);
    prev = cur;
    cur = next;
    out[j + 1] = sqrt(Real(2 * j + 3) / Real(2)) * cur;
  }
}

/// Orthonormal Legendre polynomial: sqrt((2k+1)/2) P_k(x).
inline double legendre_normalized(int k, double x) {
  if (k < 0) throw DomainError("legendre_normalized: negative degree");
  return std::sqrt((2.0 * k + 1.0) / 2.0) * legendre(k, x);
}

struct JacobiParams {
  double alpha;
  double beta;

  JacobiParams(double a, double b) : alpha(a), beta(b) {
    if (!(a > -1.0) || !(b > -1.0)) throw DomainError("JacobiParams: alpha and beta must exceed -1");
  }
};

/// Classical (non-normalized) Jacobi polynomial P_m^{(alpha,beta)}(x).
inline double jacobi_at(const JacobiParams& params, int m, double x) {
  if (m < 0) throw DomainError("jacobi_at: negative degree");
  const double a = params.alpha, b = params.beta;
  if (m == 0) return 1.0;
  double prev = 1.0;
  double cur = 0.5 * ((a + b + 2.0) * x + (a - b));
  for (int k = 2; k <= m; ++k) {
    const double s = 2.0 * k + a + b;
    const double c1 = 2.0 * k * (k + a + b) * (s - 2.0);
    const double c2 = (s - 1.0) * (s * (s - 2.0) * x + a * a - b * b);
    const double c3 = 2.0 * (k + a - 1.0) * (k + b - 1.0) * s;
    const double next = (c2 * cur - c3 * prev) / c1;
    prev = cur;
    cur = next;
  }
  return cur;
}

/// Weighted L2 norm of P_m^{(alpha,beta)} with weight (1-x)^alpha (1+x)^beta.
inline double jacobi_norm(const JacobiParams& params, int m) {
  if (m < 0) throw DomainError("jacobi_norm: negative degree");
  const double a = params.alpha, b = params.beta;
  double log_h;
  if (m == 0) {
    log_h = (a + b + 1.0) * std::log(2.0) + std::lgamma(a + 1.0) + std::lgamma(b + 1.0) -
            std::lgamma(a + b + 2.0);
  } else {
    log_h = (a + b + 1.0) * std::log(2.0) - std::log(2.0 * m + a + b + 1.0) +
            std::lgamma(m + a + 1.0) + std::lgamma(m + b + 1.0) - std::lgamma(m + a + b + 1.0) -
            std::lgamma(m + 1.0);
  }
  return std::exp(0.5 * log_h);
}

/// |P_m^{(alpha,beta)}(-1)| = Gamma(m+1+beta) / (Gamma(m+1) Gamma(1+beta)).
inline double jacobi_endpoint_magnitude(const JacobiParams& params, int m) {
  const double b = params.beta;
  return std::exp(std::lgamma(m + 1.0 + b) - std::lgamma(m + 1.0) - std::lgamma(1.0 + b));
}

struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

namespace detail {

inline GaussRule compute_gauss_legendre(int q) {
  GaussRule rule;
  rule.nodes.resize(q);
  rule.weights.resize(q);
  const int half = (q + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (q + 0.5));
    double dp = 0.0;
    bool converged = false;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 1; k < q; ++k) {
        const double p2 = ((2.0 * k + 1.0) * x * p1 - k * p0) / (k + 1.0);
        p0 = p1;
        p1 = p2;
      }
      if (q == 1) {
        p1 = x;
        p0 = 1.0;
      }
      dp = q * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) {
        converged = true;
        break;
      }
    }
    if (!converged) throw ConvergenceError("gauss_legendre: Newton iteration did not converge");
    // recompute derivative at the converged node
    double p0 = 1.0, p1 = x;
    for (int k = 1; k < q; ++k) {
      const double p2 = ((2.0 * k + 1.0) * x * p1 - k * p0) / (k + 1.0);
      p0 = p1;
      p1 = p2;
    }
    dp = q * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[q - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[q - 1 - i] = w;
  }
  if (q % 2 == 1) rule.nodes[q / 2] = 0.0;
  return rule;
}

}  // namespace detail

/// Gauss-Legendre rule on [-1,1] with q nodes, exact through degree 2q-1.
/// Rules are cached after first construction.
inline const GaussRule& gauss_legendre(int q) {
  if (q < 1) throw DomainError("gauss_legendre: rule size must be positive");
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<const GaussRule>> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(q);
  if (it == cache.end()) {
    it = cache.emplace(q, std::make_unique<const GaussRule>(detail::compute_gauss_legendre(q))).first;
  }
  return *it->second;
}

/// rho_n(x) = 1/n^2 + sqrt(1-x^2)/n.
inline double rho(int n, double x) {
  if (n < 1) throw DomainError("rho: n must be positive");
  if (std::abs(x) > 1.0) throw DomainError("rho: |x| must not exceed 1");
  const double nn = n;
  return 1.0 / (nn * nn) + std::sqrt(1.0 - x * x) / nn;
}

/// Cell [left, right] = [x_j, x_{j-1}] of the Chebyshev partition x_i = cos(i pi / k),
/// together with the Chebyshev zero cos((j - 1/2) pi / k) inside it.
struct ChebyshevCell {
  int k;
  int j;
  double left;
  double right;
  double zero;

  double width() const { return right - left; }
};

inline double chebyshev_node(int k, int i) {
  if (2 * i == k) return 0.0;
  if (i == 0) return 1.0;
  if (i == k) return -1.0;
  return std::cos(i * std::numbers::pi / k);
}

inline double chebyshev_zero(int k, int j) { return std::cos((j - 0.5) * std::numbers::pi / k); }

/// Cell containing y; a point shared by two cells goes to the smaller j.
inline ChebyshevCell chebyshev_cell(int k, double y) {
  if (k < 1) throw DomainError("chebyshev_cell: k must be positive");
  if (std::abs(y) > 1.0) throw DomainError("chebyshev_cell: |y| must not exceed 1");
  for (int j = 1; j <= k; ++j) {
    const double left = chebyshev_node(k, j);
    if (y >= left) return {k, j, left, chebyshev_node(k, j - 1), chebyshev_zero(k, j)};
  }
  return {k, k, -1.0, chebyshev_node(k, k - 1), chebyshev_zero(k, k)};
}

/// Localized polynomial P(x) = (t_j(x) / t_j(y))^m of degree <= n with P(y) = 1,
/// where t_j(x) = T_k(x) / (x - zero_j) * (x_{j-1} - x_j) and k = floor(n/m) + 1.
class KernelPolynomial {
 public:
  KernelPolynomial(int n, int m, double y) : n_(n), m_(m), y_(y) {
    if (n < 1 || m < 1) throw DomainError("kernel_polynomial: n and m must be positive");
    if (std::abs(y) > 1.0) throw DomainError("kernel_polynomial: |y| must not exceed 1");
    k_ = n / m + 1;
    cell_ = chebyshev_cell(k_, y);
    zeros_.resize(k_);
    for (int i = 1; i <= k_; ++i) zeros_[i - 1] = chebyshev_zero(k_, i);
    t_at_y_ = t(y);
  }

  int n() const { return n_; }
  int m() const { return m_; }
  double y() const { return y_; }
  int k() const { return k_; }
  const ChebyshevCell& cell() const { return cell_; }
  int degree() const { return (k_ - 1) * m_; }

  /// t_j evaluated through the factored form 2^{k-1} prod_{i != j} (x - zero_i).
  double t(double x) const {
    double value = std::ldexp(cell_.right - cell_.left, k_ - 1);
    for (int i = 1; i <= k_; ++i) {
      if (i != cell_.j) value *= (x - zeros_[i - 1]);
    }
    return value;
  }

  double operator()(double x) const {
    if (x == y_) return 1.0;
    return std::pow(t(x) / t_at_y_, m_);
  }

 private:
  int n_;
  int m_;
  double y_;
  int k_;
  ChebyshevCell cell_{};
  std::vector<double> zeros_;
  double t_at_y_ = 1.0;
};

inline KernelPolynomial kernel_polynomial(int n, int m, double y) { return KernelPolynomial(n, m, y); }

/// Empirical decay constant sup_x |P(x)| ((rho_n(y) + |x-y|) / rho_n(y))^m on a grid of
/// `samples` points of [-1,1] (plus the cell end points).
inline double kernel_decay_constant(const KernelPolynomial& p, int samples = 4001) {
  const double r = rho(p.n(), p.y());
  double best = 0.0;
  auto probe = [&](double x) {
    const double v = std::abs(p(x)) * std::pow((r + std::abs(x - p.y())) / r, p.m());
    if (v > best) best = v;
  };
  for (int i = 0; i < samples; ++i) probe(-1.0 + 2.0 * i / (samples - 1));
  probe(p.cell().left);
  probe(p.cell().right);
  probe(p.y());
  return best;
}

/// || sum_{k=1}^n e^{i 2^k x} ||_{L4(T, dx/2pi)}^4 by the trapezoid rule, which is exact
/// on the grid of 2^{n+3} points.
inline double lacunary_l4(int n) {
  if (n < 1) throw DomainError("lacunary_l4: n must be positive");
  if (n > 16) throw CapacityError("lacunary_l4: n > 16 exceeds the fixture grid budget");
  const long grid = std::max(64L, 1L << (n + 3));
  double acc = 0.0;
  for (long i = 0; i < grid; ++i) {
    std::complex<double> f(0.0, 0.0);
    for (int k = 1; k <= n; ++k) {
      // reduce the frequency modulo the grid so the phase stays exact
      const long freq = (1L << k) % grid;
      const double phase = 2.0 * std::numbers::pi * static_cast<double>((freq * i) % grid) /
                           static_cast<double>(grid);
      f += std::complex<double>(std::cos(phase), std::sin(phase));
    }
    const double mod2 = std::norm(f);
    acc += mod2 * mod2;
  }
  return acc / static_cast<double>(grid);
}

/// Linearization coefficients of products of orthonormal Legendre polynomials:
/// phi_k phi_l = sum_r coefficient(k, l, r) phi_{k+l-2r}, r = 0..min(k,l).
template <class Real>
class LegendreLinearization {
 public:
  explicit LegendreLinearization(int max_degree) : n_(max_degree) {
    using std::sqrt;
    lambda_.resize(2 * n_ + 2);
    lambda_[0] = Real(1);
    for (int r = 1; r < static_cast<int>(lambda_.size()); ++r) {
      lambda_[r] = lambda_[r - 1] * Real(2 * r - 1) / Real(2 * r);
    }
    table_.resize(static_cast<std::size_t>(n_ + 1) * (n_ + 1));
    for (int k = 0; k <= n_; ++k) {
      for (int l = 0; l <= n_; ++l) {
        auto& row = table_[static_cast<std::size_t>(k) * (n_ + 1) + l];
        const int rmax = std::min(k, l);
        row.resize(rmax + 1);
        for (int r = 0; r <= rmax; ++r) {
          const int j = k + l - 2 * r;
          const Real adams = lambda_[k - r] * lambda_[r] * lambda_[l - r] / lambda_[k + l - r] *
                             Real(2 * k + 2 * l - 4 * r + 1) / Real(2 * k + 2 * l - 2 * r + 1);
          row[r] = adams * sqrt(Real(2 * k + 1) * Real(2 * l + 1) / (Real(2) * Real(2 * j + 1)));
        }
      }
    }
  }

  int max_degree() const { return n_; }

  /// Coefficients for r = 0..min(k,l) (target degree k+l-2r).
  std::span<const Real> coefficients(int k, int l) const {
    return table_[static_cast<std::size_t>(k) * (n_ + 1) + l];
  }

 private:
  int n_;
  std::vector<Real> lambda_;
  std::vector<std::vector<Real>> table_;
};

}  // namespace christoffel::orthopoly

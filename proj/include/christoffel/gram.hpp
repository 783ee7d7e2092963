#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "christoffel/basis.hpp"
#include "christoffel/common.hpp"
#include "christoffel/domain.hpp"
#include "christoffel/moments.hpp"
#include "christoffel/multi_index.hpp"
#include "christoffel/orthopoly.hpp"
#include "christoffel/parallel.hpp"

namespace christoffel {

struct GramOptions {
  BasisKind basis = BasisKind::tensor_legendre;
  MomentMode mode = MomentMode::exact;
  SamplingConfig sampling{200'000, 1};
  std::size_t basis_cap = kDefaultBasisCap;
  /// Pivot-ratio condition estimate above which the system is flagged degraded. The
  /// factorization runs in 113-bit arithmetic, so the limit sits far above binary64 levels.
  double degraded_condition = 1e30;
};

/// Dense symmetric matrix in row-major storage.
class QuadMatrix {
 public:
  QuadMatrix() = default;
  explicit QuadMatrix(std::size_t n) : n_(n), data_(n * n, Quad(0)) {}

  std::size_t size() const { return n_; }
  Quad& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
  const Quad& operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }
  const Quad* row(std::size_t i) const { return data_.data() + i * n_; }
  Quad* row(std::size_t i) { return data_.data() + i * n_; }

  Matrix to_double() const {
    Matrix m(static_cast<Eigen::Index>(n_), static_cast<Eigen::Index>(n_));
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = 0; j < n_; ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = christoffel::to_double((*this)(i, j));
    }
    return m;
  }

 private:
  std::size_t n_ = 0;
  std::vector<Quad> data_;
};

namespace gram_detail {

/// G_kl for the box-scaled tensor Legendre basis from Legendre moments of degree 2n.
inline QuadMatrix legendre_gram(const BasisSpec& basis, const std::vector<Quad>& nu) {
  const auto& set = basis.indices();
  const int d = basis.dim();
  const int n = basis.degree();
  const std::size_t size = set.size();
  const orthopoly::LegendreLinearization<Quad> lin(n);
  const IndexLookup lookup(d, 2 * n);
  Quad scale = 1;
  for (int i = 0; i < d; ++i) scale *= Quad(2) / Quad(basis.box().upper[i] - basis.box().lower[i]);
  QuadMatrix g(size);
  parallel_for(size, [&](std::size_t k) {
    const auto a = set[k];
    std::vector<int> target(d), r(d, 0), rmax(d);
    std::vector<std::span<const Quad>> coeffs(d);
    for (std::size_t l = k; l < size; ++l) {
      const auto b = set[l];
      for (int i = 0; i < d; ++i) {
        rmax[i] = std::min(a[i], b[i]);
        coeffs[i] = lin.coefficients(a[i], b[i]);
        r[i] = 0;
      }
      Quad acc = 0;
      while (true) {
        Quad term = 1;
        for (int i = 0; i < d; ++i) {
          target[i] = a[i] + b[i] - 2 * r[i];
          term *= coeffs[i][r[i]];
        }
        acc += term * nu[lookup(target)];
        int i = 0;
        while (i < d && ++r[i] > rmax[i]) r[i++] = 0;
        if (i == d) break;
      }
      g(k, l) = scale * acc;
    }
  });
  for (std::size_t k = 0; k < size; ++k) {
    for (std::size_t l = 0; l < k; ++l) g(k, l) = g(l, k);
  }
  return g;
}

/// G from exact monomial moments (monomial basis).
inline QuadMatrix monomial_gram(const BasisSpec& basis, const MomentTable& table) {
  const auto& set = basis.indices();
  const int d = basis.dim();
  const std::size_t size = set.size();
  QuadMatrix g(size);
  std::vector<int> sum(d);
  for (std::size_t k = 0; k < size; ++k) {
    for (std::size_t l = k; l < size; ++l) {
      for (int i = 0; i < d; ++i) sum[i] = set[k][i] + set[l][i];
      g(k, l) = g(l, k) = table.at(sum).convert_to<Quad>();
    }
  }
  return g;
}

/// G by a cubature rule given as points and weights.
inline QuadMatrix cubature_gram(const BasisSpec& basis, const std::vector<Vector>& points,
                                const std::vector<double>& weights) {
  const std::size_t size = basis.size();
  QuadMatrix g(size);
  std::vector<Quad> psi(size);
  std::vector<Quad> x;
  for (std::size_t p = 0; p < points.size(); ++p) {
    x.assign(points[p].data(), points[p].data() + points[p].size());
    basis.evaluate<Quad>(std::span<const Quad>(x), std::span<Quad>(psi));
    const Quad w = weights[p];
    for (std::size_t k = 0; k < size; ++k) {
      const Quad wk = w * psi[k];
      for (std::size_t l = k; l < size; ++l) g(k, l) += wk * psi[l];
    }
  }
  for (std::size_t k = 0; k < size; ++k) {
    for (std::size_t l = 0; l < k; ++l) g(k, l) = g(l, k);
  }
  return g;
}

/// Tensor Gauss-Legendre rule of q points per axis on a box.
inline void tensor_gauss(const Box& box, int q, std::vector<Vector>& points, std::vector<double>& weights) {
  const auto& rule = orthopoly::gauss_legendre(q);
  const int d = box.dim();
  std::vector<int> counter(d, 0);
  points.clear();
  weights.clear();
  while (true) {
    Vector x(d);
    double w = 1.0;
    for (int i = 0; i < d; ++i) {
      const double half = 0.5 * (box.upper[i] - box.lower[i]);
      x[i] = 0.5 * (box.upper[i] + box.lower[i]) + half * rule.nodes[counter[i]];
      w *= half * rule.weights[counter[i]];
    }
    points.push_back(std::move(x));
    weights.push_back(w);
    int i = 0;
    while (i < d && ++counter[i] == q) counter[i++] = 0;
    if (i == d) break;
  }
}

}  // namespace gram_detail

/// Gram matrix of a polynomial basis over a domain together with a diagonally pivoted
/// Cholesky factorization P G P^T = L L^T and the whitening map W = L^{-1} P, so that
/// C(x) = |W b(x)|^2 and G^{-1} = W^T W.
class GramSystem {
 public:
  GramSystem(BasisSpec basis, Domain domain, QuadMatrix gram, double degraded_condition, double sampling_error = 0.0)
      : basis_(std::move(basis)), domain_(std::move(domain)), gram_(std::move(gram)), sampling_error_(sampling_error) {
    factorize(degraded_condition);
  }

  const BasisSpec& basis() const { return basis_; }
  const Domain& domain() const { return domain_; }
  int degree() const { return basis_.degree(); }
  int dim() const { return basis_.dim(); }
  std::size_t size() const { return basis_.size(); }
  const QuadMatrix& gram() const { return gram_; }
  Matrix gram_double() const { return gram_.to_double(); }
  const std::vector<std::size_t>& permutation() const { return perm_; }
  /// Lower-triangular factor in pivot order.
  const QuadMatrix& factor() const { return factor_; }
  double condition_estimate() const { return condition_; }
  double min_pivot() const { return min_pivot_; }
  double max_pivot() const { return max_pivot_; }
  bool degraded() const { return degraded_; }
  /// Largest standard error of Gram entries (sampled assembly), else 0.
  double sampling_error() const { return sampling_error_; }

  template <class Real>
  std::vector<Real> basis_values(const Vector& x) const {
    require_dim(dim(), x.size(), "Christoffel point");
    std::vector<Real> xr(x.data(), x.data() + x.size());
    std::vector<Real> psi(size());
    basis_.evaluate<Real>(std::span<const Real>(xr), std::span<Real>(psi));
    return psi;
  }

  /// W psi in pivot order (accurate path).
  std::vector<Quad> whiten(const std::vector<Quad>& psi) const {
    const std::size_t n = size();
    std::vector<Quad> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      const Quad* w = whitening_.row(i);
      Quad acc = 0;
      for (std::size_t j = 0; j <= i; ++j) acc += w[j] * psi[perm_[j]];
      y[i] = acc;
    }
    return y;
  }

  Quad christoffel_quad(const Vector& x) const {
    const auto y = whiten(basis_values<Quad>(x));
    Quad acc = 0;
    for (const auto& v : y) acc += v * v;
    return acc;
  }

  /// Binary64 evaluation used for screening candidates.
  double christoffel_fast(const Vector& x) const {
    const auto psi = basis_values<double>(x);
    const std::size_t n = size();
    Vector p(static_cast<Eigen::Index>(n));
    for (std::size_t j = 0; j < n; ++j) p[static_cast<Eigen::Index>(j)] = psi[perm_[j]];
    const Vector y = whitening_double_.triangularView<Eigen::Lower>() * p;
    return y.squaredNorm();
  }

  /// G^{-1} v in the original basis order.
  std::vector<Quad> solve(const std::vector<Quad>& v) const {
    const std::size_t n = size();
    const auto y = whiten(v);
    std::vector<Quad> out(n, Quad(0));
    // W^T y, then undo the permutation
    std::vector<Quad> z(n, Quad(0));
    for (std::size_t i = 0; i < n; ++i) {
      const Quad* w = whitening_.row(i);
      for (std::size_t j = 0; j <= i; ++j) z[j] += w[j] * y[i];
    }
    for (std::size_t j = 0; j < n; ++j) out[perm_[j]] = z[j];
    return out;
  }

  Quad quadratic_form(std::span<const Quad> a) const {
    const std::size_t n = size();
    Quad acc = 0;
    for (std::size_t i = 0; i < n; ++i) {
      Quad row = 0;
      for (std::size_t j = 0; j < n; ++j) row += gram_(i, j) * a[j];
      acc += a[i] * row;
    }
    return acc;
  }

  double quadratic_form(const Vector& a) const {
    require_dim(static_cast<int>(size()), a.size(), "coefficient vector");
    std::vector<Quad> q(a.data(), a.data() + a.size());
    return to_double(quadratic_form(std::span<const Quad>(q)));
  }

 private:
  void factorize(double degraded_condition) {
    // left-looking Cholesky with diagonal pivoting on the residual diagonal
    const std::size_t n = size();
    perm_.resize(n);
    for (std::size_t i = 0; i < n; ++i) perm_[i] = i;
    factor_ = QuadMatrix(n);
    std::vector<Quad> residual(n);
    Quad max_diag = 0;
    for (std::size_t i = 0; i < n; ++i) {
      residual[i] = gram_(i, i);
      max_diag = std::max(max_diag, residual[i]);
    }
    const Quad floor_pivot = Quad(static_cast<double>(n)) * std::numeric_limits<Quad>::epsilon() * max_diag;
    Quad lo = Quad(std::numeric_limits<double>::max()), hi = 0;
    for (std::size_t k = 0; k < n; ++k) {
      std::size_t p = k;
      for (std::size_t i = k + 1; i < n; ++i) {
        if (residual[i] > residual[p]) p = i;
      }
      if (p != k) {
        std::swap(perm_[k], perm_[p]);
        std::swap(residual[k], residual[p]);
        for (std::size_t j = 0; j < k; ++j) std::swap(factor_(k, j), factor_(p, j));
      }
      Quad pivot = residual[k];
      if (!(pivot > floor_pivot)) {
        degraded_ = true;
        pivot = floor_pivot;
      }
      lo = std::min(lo, pivot);
      hi = std::max(hi, pivot);
      const Quad root = sqrt(pivot);
      factor_(k, k) = root;
      const Quad* lk = factor_.row(k);
      const std::size_t pk = perm_[k];
      for (std::size_t i = k + 1; i < n; ++i) {
        const Quad* li = factor_.row(i);
        Quad acc = gram_(perm_[i], pk);
        for (std::size_t j = 0; j < k; ++j) acc -= li[j] * lk[j];
        const Quad lik = acc / root;
        factor_(i, k) = lik;
        residual[i] -= lik * lik;
      }
    }
    min_pivot_ = to_double(lo);
    max_pivot_ = to_double(hi);
    condition_ = to_double(hi / lo);
    if (!(condition_ <= degraded_condition)) degraded_ = true;

    // whitening W = L^{-1}, lower triangular
    whitening_ = QuadMatrix(n);
    for (std::size_t c = 0; c < n; ++c) {
      whitening_(c, c) = Quad(1) / factor_(c, c);
      for (std::size_t i = c + 1; i < n; ++i) {
        Quad acc = 0;
        const Quad* li = factor_.row(i);
        for (std::size_t j = c; j < i; ++j) acc += li[j] * whitening_(j, c);
        whitening_(i, c) = -acc / factor_(i, i);
      }
    }
    whitening_double_ = whitening_.to_double();
  }

  BasisSpec basis_;
  Domain domain_;
  QuadMatrix gram_;
  double sampling_error_ = 0.0;
  std::vector<std::size_t> perm_;
  QuadMatrix factor_;
  QuadMatrix whitening_;
  Matrix whitening_double_;
  double condition_ = 0.0;
  double min_pivot_ = 0.0;
  double max_pivot_ = 0.0;
  bool degraded_ = false;
};

inline BasisSpec make_basis(const Domain& domain, int degree, BasisKind kind, std::size_t cap = kDefaultBasisCap) {
  return BasisSpec(kind, domain.bounding_box(), MultiIndexSet(domain.dim(), degree, cap));
}

/// Gram system of P_n over the engine's domain.
inline std::shared_ptr<const GramSystem> assemble_gram(const MomentEngine& engine, int degree,
                                                       const GramOptions& options = {}) {
  const Domain& domain = engine.domain();
  BasisSpec basis = make_basis(domain, degree, options.basis, options.basis_cap);
  QuadMatrix g;
  double sampling_error = 0.0;
  switch (engine.mode()) {
    case MomentMode::exact:
    case MomentMode::mapped_exact:
      if (options.basis == BasisKind::tensor_legendre) {
        g = gram_detail::legendre_gram(basis, legendre_moments(engine, basis.box(), 2 * degree));
      } else {
        g = gram_detail::monomial_gram(basis, *engine.table(2 * degree));
      }
      break;
    case MomentMode::gauss_box: {
      std::vector<Vector> pts;
      std::vector<double> wts;
      gram_detail::tensor_gauss(domain.bounding_box(), degree + 1, pts, wts);
      g = gram_detail::cubature_gram(basis, pts, wts);
      break;
    }
    case MomentMode::sampled: {
      const auto& pts = engine.sample_points();
      const double w = domain.bounding_box().volume() / static_cast<double>(engine.sampling().count);
      g = gram_detail::cubature_gram(basis, pts, std::vector<double>(pts.size(), w));
      // standard error of the largest diagonal entry
      const std::size_t nb = basis.size();
      std::vector<double> s1(nb, 0.0), s2(nb, 0.0);
      for (const auto& x : pts) {
        const Vector psi = basis.evaluate(x);
        for (std::size_t k = 0; k < nb; ++k) {
          const double v = psi[static_cast<Eigen::Index>(k)] * psi[static_cast<Eigen::Index>(k)];
          s1[k] += v;
          s2[k] += v * v;
        }
      }
      const double m = static_cast<double>(engine.sampling().count);
      const double box_volume = domain.bounding_box().volume();
      double worst = 0.0;
      for (std::size_t k = 0; k < nb; ++k) {
        const double mean = s1[k] / m;
        worst = std::max(worst, box_volume * std::sqrt(std::max(0.0, s2[k] / m - mean * mean) / m));
      }
      sampling_error = worst;
      break;
    }
  }
  return std::make_shared<const GramSystem>(std::move(basis), domain, std::move(g), options.degraded_condition,
                                            sampling_error);
}

inline std::shared_ptr<const GramSystem> assemble_gram(const Domain& domain, int degree, const GramOptions& options = {}) {
  MomentEngine engine(domain, options.mode, options.sampling);
  return assemble_gram(engine, degree, options);
}

}  // namespace christoffel

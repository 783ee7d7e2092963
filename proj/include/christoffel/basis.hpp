#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "christoffel/common.hpp"
#include "christoffel/multi_index.hpp"
#include "christoffel/orthopoly.hpp"

namespace christoffel {

/// Axis-aligned box [lower_1, upper_1] x ... x [lower_d, upper_d].
struct Box {
  Vector lower;
  Vector upper;

  int dim() const { return static_cast<int>(lower.size()); }
  Vector center() const { return 0.5 * (lower + upper); }
  Vector widths() const { return upper - lower; }
  double volume() const { return widths().prod(); }

  bool contains(const Vector& x) const {
    for (int i = 0; i < dim(); ++i) {
      if (x[i] < lower[i] || x[i] > upper[i]) return false;
    }
    return true;
  }

  static Box symmetric(int dim, double half_width = 1.0) {
    return {Vector::Constant(dim, -half_width), Vector::Constant(dim, half_width)};
  }
};

enum class BasisKind { monomial, tensor_legendre };

class BasisSpec {
 public:
  BasisSpec(BasisKind kind, Box box, MultiIndexSet indices)
      : kind_(kind), box_(std::move(box)), indices_(std::move(indices)) {
    require_dim(indices_.dim(), box_.dim(), "BasisSpec box");
    for (int i = 0; i < box_.dim(); ++i) {
      if (!(box_.upper[i] > box_.lower[i])) throw DomainError("BasisSpec: box sides must be positive");
    }
  }

  BasisKind kind() const { return kind_; }
  const Box& box() const { return box_; }
  const MultiIndexSet& indices() const { return indices_; }
  int dim() const { return indices_.dim(); }
  int degree() const { return indices_.degree(); }
  std::size_t size() const { return indices_.size(); }

  /// Basis values at one point; Real is double or Quad.
  template <class Real>
  void evaluate(std::span<const Real> x, std::span<Real> out) const {
    using std::sqrt;
    const int d = dim();
    const int n = degree();
    std::vector<Real> table(static_cast<std::size_t>(d) * (n + 1));
    for (int i = 0; i < d; ++i) {
      std::span<Real> row(table.data() + static_cast<std::size_t>(i) * (n + 1), n + 1);
      if (kind_ == BasisKind::monomial) {
        row[0] = Real(1);
        for (int k = 1; k <= n; ++k) row[k] = row[k - 1] * x[i];
      } else {
        const Real lo(box_.lower[i]), hi(box_.upper[i]);
        const Real u = (Real(2) * x[i] - lo - hi) / (hi - lo);
        orthopoly::legendre_normalized_table<Real>(n, u, row);
        const Real scale = sqrt(Real(2) / (hi - lo));
        for (auto& v : row) v *= scale;
      }
    }
    for (std::size_t k = 0; k < indices_.size(); ++k) {
      const auto alpha = indices_[k];
      Real value = table[alpha[0]];
      for (int i = 1; i < d; ++i) value *= table[static_cast<std::size_t>(i) * (n + 1) + alpha[i]];
      out[k] = value;
    }
  }

  Vector evaluate(const Vector& x) const {
    require_dim(dim(), x.size(), "eval_basis point");
    Vector out(size());
    evaluate<double>(std::span<const double>(x.data(), x.size()), std::span<double>(out.data(), out.size()));
    return out;
  }

 private:
  BasisKind kind_;
  Box box_;
  MultiIndexSet indices_;
};

/// Rows are points (one per row of `points`), columns follow the graded index order.
inline Matrix eval_basis(const BasisSpec& spec, const Matrix& points) {
  require_dim(spec.dim(), points.cols(), "eval_basis points");
  Matrix out(points.rows(), static_cast<Eigen::Index>(spec.size()));
  Vector buffer(spec.size());
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    const Vector x = points.row(i).transpose();
    spec.evaluate<double>(std::span<const double>(x.data(), x.size()),
                          std::span<double>(buffer.data(), buffer.size()));
    out.row(i) = buffer.transpose();
  }
  return out;
}

}  // namespace christoffel

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "christoffel/common.hpp"

namespace christoffel {

/// binomial(n + d, d) with saturation at SIZE_MAX.
inline std::size_t basis_dimension(int dim, int degree) {
  std::size_t value = 1;
  for (int i = 1; i <= dim; ++i) {
    const std::size_t num = static_cast<std::size_t>(degree) + static_cast<std::size_t>(i);
    if (value > SIZE_MAX / num) return SIZE_MAX;
    value = value * num / static_cast<std::size_t>(i);
  }
  return value;
}

/// Exponent vectors of total degree <= n in graded-lexicographic order:
/// ascending total degree, ties ascending lexicographically.
class MultiIndexSet {
 public:
  MultiIndexSet() = default;

  MultiIndexSet(int dim, int degree, std::size_t cap = kDefaultBasisCap) : dim_(dim), degree_(degree) {
    if (dim < 1) throw DomainError("enumerate_indices: dimension must be positive");
    if (degree < 0) throw DomainError("enumerate_indices: degree must be non-negative");
    const std::size_t count = basis_dimension(dim, degree);
    if (count > cap) {
      throw CapacityError("enumerate_indices: basis dimension " + std::to_string(count) +
                          " exceeds the cap " + std::to_string(cap));
    }
    data_.reserve(count * static_cast<std::size_t>(dim));
    std::vector<int> current(dim, 0);
    for (int grade = 0; grade <= degree; ++grade) append_grade(current, 0, grade);
  }

  int dim() const { return dim_; }
  int degree() const { return degree_; }
  std::size_t size() const { return dim_ == 0 ? 0 : data_.size() / static_cast<std::size_t>(dim_); }

  std::span<const int> operator[](std::size_t k) const {
    return {data_.data() + k * static_cast<std::size_t>(dim_), static_cast<std::size_t>(dim_)};
  }

  /// Position of alpha in the graded order (alpha need not have |alpha| <= degree()).
  std::size_t rank(std::span<const int> alpha) const { return graded_rank(alpha); }

  static std::size_t graded_rank(std::span<const int> alpha) {
    const int d = static_cast<int>(alpha.size());
    int total = 0;
    for (int a : alpha) total += a;
    std::size_t r = total == 0 ? 0 : basis_dimension(d, total - 1);
    int remaining = total;
    for (int i = 0; i + 1 < d; ++i) {
      const int parts = d - i - 1;
      for (int v = 0; v < alpha[i]; ++v) r += basis_dimension(parts - 1, remaining - v);
      remaining -= alpha[i];
    }
    return r;
  }

  bool operator==(const MultiIndexSet& other) const {
    return dim_ == other.dim_ && degree_ == other.degree_;
  }

 private:
  void append_grade(std::vector<int>& current, int pos, int remaining) {
    if (pos == dim_ - 1) {
      current[pos] = remaining;
      data_.insert(data_.end(), current.begin(), current.end());
      return;
    }
    for (int v = 0; v <= remaining; ++v) {
      current[pos] = v;
      append_grade(current, pos + 1, remaining - v);
    }
  }

  int dim_ = 0;
  int degree_ = 0;
  std::vector<int> data_;
};

inline MultiIndexSet enumerate_indices(int dim, int degree, std::size_t cap = kDefaultBasisCap) {
  return MultiIndexSet(dim, degree, cap);
}

}  // namespace christoffel

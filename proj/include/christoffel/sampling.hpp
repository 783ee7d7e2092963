#pragma once

// Deterministic low-discrepancy point sets.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include <boost/math/special_functions/erf.hpp>

#include "christoffel/common.hpp"

namespace christoffel::sampling {

inline constexpr int kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};

inline double radical_inverse(std::uint64_t index, int base) {
  double result = 0.0;
  double f = 1.0 / base;
  while (index > 0) {
    result += f * static_cast<double>(index % base);
    index /= base;
    f /= base;
  }
  return result;
}

/// Halton sequence in [0,1)^dim with a Cranley-Patterson rotation drawn from `seed`
/// (seed 0 means no rotation).
class Halton {
 public:
  Halton(int dim, std::uint64_t seed = 0) : dim_(dim), shift_(dim, 0.0) {
    if (dim < 1 || dim > static_cast<int>(std::size(kPrimes))) {
      throw DomainError("Halton: unsupported dimension");
    }
    if (seed != 0) {
      std::mt19937_64 rng(seed);
      std::uniform_real_distribution<double> uniform(0.0, 1.0);
      for (auto& s : shift_) s = uniform(rng);
    }
  }

  int dim() const { return dim_; }

  /// Point with the given index (index 0 is skipped by callers that want to avoid the origin).
  void point(std::uint64_t index, double* out) const {
    for (int i = 0; i < dim_; ++i) {
      double v = radical_inverse(index, kPrimes[i]) + shift_[i];
      if (v >= 1.0) v -= 1.0;
      out[i] = v;
    }
  }

  Vector point(std::uint64_t index) const {
    Vector v(dim_);
    point(index, v.data());
    return v;
  }

 private:
  int dim_;
  std::vector<double> shift_;
};

/// `count` equally spaced unit vectors in the plane, starting at angle 0.
inline std::vector<Vector> circle_points(int count) {
  std::vector<Vector> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    const double theta = 2.0 * std::numbers::pi * i / count;
    Vector v(2);
    v << std::cos(theta), std::sin(theta);
    out.push_back(v);
  }
  return out;
}

/// Spherical Fibonacci lattice on S^2.
inline std::vector<Vector> fibonacci_sphere(int count) {
  std::vector<Vector> out;
  out.reserve(count);
  const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
  for (int i = 0; i < count; ++i) {
    const double z = 1.0 - (2.0 * i + 1.0) / count;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = 2.0 * std::numbers::pi * i / golden;
    Vector v(3);
    v << r * std::cos(phi), r * std::sin(phi), z;
    out.push_back(v);
  }
  return out;
}

/// Quasi-uniform unit vectors in R^dim: circle (dim 2), Fibonacci (dim 3), otherwise
/// Halton points pushed through the Gaussian quantile and normalized.
inline std::vector<Vector> sphere_points(int dim, int count) {
  if (dim == 1) {
    std::vector<Vector> out{Vector::Constant(1, -1.0), Vector::Constant(1, 1.0)};
    return out;
  }
  if (dim == 2) return circle_points(count);
  if (dim == 3) return fibonacci_sphere(count);
  Halton halton(dim);
  std::vector<Vector> out;
  out.reserve(count);
  for (int i = 1; static_cast<int>(out.size()) < count; ++i) {
    Vector u = halton.point(static_cast<std::uint64_t>(i));
    for (int k = 0; k < dim; ++k) {
      u[k] = std::sqrt(2.0) * boost::math::erf_inv(2.0 * u[k] - 1.0);
    }
    const double norm = u.norm();
    if (norm > 1e-12) out.push_back(u / norm);
  }
  return out;
}

/// Quasi-uniform points of the closed Euclidean unit ball: half on the sphere, half
/// in the interior (radius drawn with the r^{1/d} law).
inline std::vector<Vector> ball_points(int dim, int count) {
  const int on_sphere = count / 2;
  std::vector<Vector> out = sphere_points(dim, std::max(on_sphere, 2));
  Halton halton(dim);
  for (int i = 1; static_cast<int>(out.size()) < count; ++i) {
    Vector u = halton.point(static_cast<std::uint64_t>(i));
    Vector v = 2.0 * u.array() - 1.0;
    if (v.squaredNorm() <= 1.0) out.push_back(v);
  }
  return out;
}

}  // namespace christoffel::sampling

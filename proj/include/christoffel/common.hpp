#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <boost/multiprecision/float128.hpp>

namespace christoffel {

/// Working precision for Gram factorizations and accurate point evaluations.
using Quad = boost::multiprecision::float128;

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A size limit (basis dimension, degree, fixture size) was exceeded.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// An argument lies outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class SingularMapError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

inline constexpr std::size_t kDefaultBasisCap = 20000;

/// Default maximal polynomial degree per ambient dimension.
inline int default_degree_cap(int dim) {
  switch (dim) {
    case 1: return 32;
    case 2: return 24;
    case 3: return 14;
    case 4: return 8;
    default: return 4;
  }
}

inline double to_double(const Quad& q) { return q.convert_to<double>(); }

inline void require_dim(int expected, Eigen::Index got, const char* what) {
  if (got != expected) {
    throw DimensionMismatch(std::string(what) + ": expected dimension " + std::to_string(expected) +
                            ", got " + std::to_string(got));
  }
}

}  // namespace christoffel

#pragma once

#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "christoffel/basis.hpp"
#include "christoffel/common.hpp"

namespace christoffel {

/// Non-degenerate affine map x -> A x + b.
class AffineMap {
 public:
  AffineMap(Matrix matrix, Vector offset) : matrix_(std::move(matrix)), offset_(std::move(offset)) {
    if (matrix_.rows() != matrix_.cols()) throw DimensionMismatch("AffineMap: matrix must be square");
    require_dim(static_cast<int>(matrix_.rows()), offset_.size(), "AffineMap offset");
    if (!matrix_.allFinite() || !offset_.allFinite()) throw DomainError("AffineMap: non-finite entries");
    lu_ = matrix_.fullPivLu();
    determinant_ = lu_.determinant();
    if (determinant_ == 0.0 || !lu_.isInvertible() || !std::isfinite(determinant_)) {
      throw SingularMapError("AffineMap: matrix is singular");
    }
  }

  static AffineMap identity(int dim) { return {Matrix::Identity(dim, dim), Vector::Zero(dim)}; }

  static AffineMap scaling(int dim, double factor) {
    return {factor * Matrix::Identity(dim, dim), Vector::Zero(dim)};
  }

  int dim() const { return static_cast<int>(matrix_.rows()); }
  const Matrix& matrix() const { return matrix_; }
  const Vector& offset() const { return offset_; }
  double determinant() const { return determinant_; }
  double abs_determinant() const { return std::abs(determinant_); }

  Vector operator()(const Vector& x) const {
    require_dim(dim(), x.size(), "AffineMap point");
    return matrix_ * x + offset_;
  }

  Vector apply_inverse(const Vector& y) const {
    require_dim(dim(), y.size(), "AffineMap point");
    return lu_.solve(y - offset_);
  }

  AffineMap inverse() const {
    Matrix inv = lu_.inverse();
    Vector off = -(inv * offset_);
    return {std::move(inv), std::move(off)};
  }

  /// (*this) o inner.
  AffineMap compose(const AffineMap& inner) const {
    require_dim(dim(), inner.dim(), "AffineMap compose");
    return {matrix_ * inner.matrix_, matrix_ * inner.offset_ + offset_};
  }

  /// Axis-aligned hull of the image of a box, exact via corner transform.
  Box image(const Box& box) const {
    const Vector c = matrix_ * box.center() + offset_;
    const Vector half = 0.5 * (matrix_.cwiseAbs() * box.widths());
    return {c - half, c + half};
  }

 private:
  Matrix matrix_;
  Vector offset_;
  Eigen::FullPivLU<Matrix> lu_;
  double determinant_ = 0.0;
};

enum class ShapeKind { interval, cube, ball_p, simplex, simplex_union, half_ball, cone_disk, product, affine };

inline const char* shape_name(ShapeKind kind) {
  switch (kind) {
    case ShapeKind::interval: return "interval";
    case ShapeKind::cube: return "cube";
    case ShapeKind::ball_p: return "ball_p";
    case ShapeKind::simplex: return "simplex";
    case ShapeKind::simplex_union: return "simplex_union";
    case ShapeKind::half_ball: return "half_ball";
    case ShapeKind::cone_disk: return "cone_disk";
    case ShapeKind::product: return "product";
    case ShapeKind::affine: return "affine";
  }
  return "unknown";
}

class Domain;

namespace shape {

struct Interval {
  double lower;
  double upper;
};

/// [-1,1]^dim.
struct Cube {
  int dim;
};

/// {x : sum |x_i|^p <= 1}; p = infinity is the cube.
struct BallP {
  int dim;
  double p;

  bool is_cube() const { return std::isinf(p); }
};

/// Rows of `vertices` are the dim+1 vertices.
struct Simplex {
  Matrix vertices;
  Matrix edge_inverse;  // inverse of [v_1 - v_0, ..., v_d - v_0]
  double volume;
};

struct SimplexUnion {
  std::vector<Simplex> simplices;
  bool convex;
};

/// Upper half {x in B_2^dim : x_dim >= 0}.
struct HalfBall {
  int dim;
};

/// Convex hull of (0,0,1) and the unit disk in the plane z = 0.
struct ConeDisk {};

struct Product {
  std::vector<Domain> factors;
};

struct Affine;

}  // namespace shape

/// Immutable compact domain in R^d; cheap to copy.
class Domain {
 public:
  struct Node;

  Domain() = default;
  explicit Domain(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  static Domain interval(double lower, double upper);
  static Domain cube(int dim);
  static Domain ball_p(int dim, double p);
  static Domain simplex(const Matrix& vertices);
  static Domain simplex_union(const std::vector<Matrix>& simplices, bool convex);
  static Domain half_ball(int dim);
  static Domain cone_disk();
  static Domain product(std::vector<Domain> factors);
  static Domain affine_image(const AffineMap& map, const Domain& base);

  bool valid() const { return static_cast<bool>(node_); }
  int dim() const;
  ShapeKind kind() const;
  const Node& node() const { return *node_; }

  template <class F>
  decltype(auto) visit(F&& f) const;

  bool contains(const Vector& x) const;
  /// Membership with the inequalities relaxed by `tolerance`.
  bool contains(const Vector& x, double tolerance) const;
  double volume() const;
  /// max over the domain of x . xi.
  double support(const Vector& xi) const;
  Box bounding_box() const;
  Vector star_center() const;
  bool is_convex() const;
  /// Extreme or catalogue-specific sharp points.
  std::vector<Vector> sharp_points(int resolution = 16) const;
  std::string describe() const;

 private:
  std::shared_ptr<const Node> node_;
};

namespace shape {

struct Affine {
  AffineMap map;
  Domain base;
};

}  // namespace shape

struct Domain::Node {
  int dim;
  std::variant<shape::Interval, shape::Cube, shape::BallP, shape::Simplex, shape::SimplexUnion, shape::HalfBall,
               shape::ConeDisk, shape::Product, shape::Affine>
      shape;
};

template <class F>
decltype(auto) Domain::visit(F&& f) const {
  return std::visit(std::forward<F>(f), node_->shape);
}

namespace detail {

inline double factorial(int k) { return std::tgamma(k + 1.0); }

inline shape::Simplex make_simplex(const Matrix& vertices) {
  const int d = static_cast<int>(vertices.cols());
  if (d < 1 || vertices.rows() != d + 1) {
    throw DimensionMismatch("simplex: expected dim+1 vertices of dimension dim");
  }
  if (!vertices.allFinite()) throw DomainError("simplex: non-finite vertex");
  Matrix edges(d, d);
  for (int i = 0; i < d; ++i) edges.col(i) = (vertices.row(i + 1) - vertices.row(0)).transpose();
  const double det = edges.determinant();
  const double scale = std::pow(edges.cwiseAbs().maxCoeff(), d);
  if (!(std::abs(det) > 1e-14 * scale)) throw DomainError("simplex: vertices are affinely dependent");
  return {vertices, edges.inverse(), std::abs(det) / factorial(d)};
}

inline bool simplex_contains(const shape::Simplex& s, const Vector& x, double tol) {
  const Vector lambda = s.edge_inverse * (x - s.vertices.row(0).transpose());
  if (lambda.minCoeff() < -tol) return false;
  return lambda.sum() <= 1.0 + tol;
}

inline double dual_norm(const Vector& xi, double p) {
  if (std::isinf(p)) return xi.lpNorm<1>();
  if (p <= 1.0) return xi.lpNorm<Eigen::Infinity>();
  const double q = p / (p - 1.0);
  double acc = 0.0;
  const double scale = xi.lpNorm<Eigen::Infinity>();
  if (scale == 0.0) return 0.0;
  for (Eigen::Index i = 0; i < xi.size(); ++i) acc += std::pow(std::abs(xi[i]) / scale, q);
  return scale * std::pow(acc, 1.0 / q);
}

inline double ball_volume(int dim, double p) {
  if (std::isinf(p)) return std::pow(2.0, dim);
  return std::exp(dim * std::log(2.0 * std::tgamma(1.0 + 1.0 / p)) - std::lgamma(1.0 + dim / p));
}

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace detail

inline Domain Domain::interval(double lower, double upper) {
  if (!(upper > lower) || !std::isfinite(lower) || !std::isfinite(upper)) {
    throw DomainError("interval: need finite lower < upper");
  }
  return Domain(std::make_shared<const Node>(Node{1, shape::Interval{lower, upper}}));
}

inline Domain Domain::cube(int dim) {
  if (dim < 1) throw DomainError("cube: dimension must be positive");
  return Domain(std::make_shared<const Node>(Node{dim, shape::Cube{dim}}));
}

inline Domain Domain::ball_p(int dim, double p) {
  if (dim < 1) throw DomainError("ball_p: dimension must be positive");
  if (!(p > 0.0)) throw DomainError("ball_p: p must be positive");
  return Domain(std::make_shared<const Node>(Node{dim, shape::BallP{dim, p}}));
}

inline Domain Domain::simplex(const Matrix& vertices) {
  auto s = detail::make_simplex(vertices);
  const int d = static_cast<int>(vertices.cols());
  return Domain(std::make_shared<const Node>(Node{d, std::move(s)}));
}

inline Domain Domain::simplex_union(const std::vector<Matrix>& simplices, bool convex) {
  if (simplices.empty()) throw DomainError("simplex_union: no simplices");
  shape::SimplexUnion u{{}, convex};
  const int d = static_cast<int>(simplices.front().cols());
  for (const auto& v : simplices) {
    require_dim(d, v.cols(), "simplex_union member");
    u.simplices.push_back(detail::make_simplex(v));
  }
  return Domain(std::make_shared<const Node>(Node{d, std::move(u)}));
}

inline Domain Domain::half_ball(int dim) {
  if (dim < 1) throw DomainError("half_ball: dimension must be positive");
  return Domain(std::make_shared<const Node>(Node{dim, shape::HalfBall{dim}}));
}

inline Domain Domain::cone_disk() { return Domain(std::make_shared<const Node>(Node{3, shape::ConeDisk{}})); }

inline Domain Domain::product(std::vector<Domain> factors) {
  if (factors.empty()) throw DomainError("product: no factors");
  int d = 0;
  for (const auto& f : factors) {
    if (!f.valid()) throw DomainError("product: invalid factor");
    d += f.dim();
  }
  return Domain(std::make_shared<const Node>(Node{d, shape::Product{std::move(factors)}}));
}

inline Domain Domain::affine_image(const AffineMap& map, const Domain& base) {
  require_dim(base.dim(), map.dim(), "affine_image");
  return Domain(std::make_shared<const Node>(Node{base.dim(), shape::Affine{map, base}}));
}

inline int Domain::dim() const { return node_->dim; }

inline ShapeKind Domain::kind() const { return static_cast<ShapeKind>(node_->shape.index()); }

inline bool Domain::contains(const Vector& x) const { return contains(x, 0.0); }

inline bool Domain::contains(const Vector& x, double tol) const {
  require_dim(dim(), x.size(), "membership");
  using namespace shape;
  return visit(detail::overloaded{
      [&](const Interval& s) { return x[0] >= s.lower - tol && x[0] <= s.upper + tol; },
      [&](const Cube&) { return x.lpNorm<Eigen::Infinity>() <= 1.0 + tol; },
      [&](const BallP& s) {
        if (s.is_cube()) return x.lpNorm<Eigen::Infinity>() <= 1.0 + tol;
        double acc = 0.0;
        for (Eigen::Index i = 0; i < x.size(); ++i) acc += std::pow(std::abs(x[i]), s.p);
        return acc <= 1.0 + tol;
      },
      [&](const Simplex& s) { return detail::simplex_contains(s, x, std::max(tol, 1e-12)); },
      [&](const SimplexUnion& s) {
        for (const auto& simplex : s.simplices) {
          if (detail::simplex_contains(simplex, x, std::max(tol, 1e-12))) return true;
        }
        return false;
      },
      [&](const HalfBall& s) { return x[s.dim - 1] >= -tol && x.squaredNorm() <= 1.0 + tol; },
      [&](const ConeDisk&) {
        const double z = x[2];
        if (z < -tol || z > 1.0 + tol) return false;
        const double r = std::hypot(x[0], x[1]);
        return r <= 1.0 - z + tol;
      },
      [&](const Product& s) {
        int offset = 0;
        for (const auto& f : s.factors) {
          if (!f.contains(x.segment(offset, f.dim()), tol)) return false;
          offset += f.dim();
        }
        return true;
      },
      [&](const Affine& s) { return s.base.contains(s.map.apply_inverse(x), std::max(tol, 1e-12)); },
  });
}

inline double Domain::volume() const {
  using namespace shape;
  return visit(detail::overloaded{
      [](const Interval& s) { return s.upper - s.lower; },
      [](const Cube& s) { return std::pow(2.0, s.dim); },
      [](const BallP& s) { return detail::ball_volume(s.dim, s.p); },
      [](const Simplex& s) { return s.volume; },
      [](const SimplexUnion& s) {
        double v = 0.0;
        for (const auto& simplex : s.simplices) v += simplex.volume;
        return v;
      },
      [](const HalfBall& s) { return 0.5 * detail::ball_volume(s.dim, 2.0); },
      [](const ConeDisk&) { return std::numbers::pi / 3.0; },
      [](const Product& s) {
        double v = 1.0;
        for (const auto& f : s.factors) v *= f.volume();
        return v;
      },
      [](const Affine& s) { return s.map.abs_determinant() * s.base.volume(); },
  });
}

inline double Domain::support(const Vector& xi) const {
  require_dim(dim(), xi.size(), "support direction");
  using namespace shape;
  return visit(detail::overloaded{
      [&](const Interval& s) { return std::max(s.lower * xi[0], s.upper * xi[0]); },
      [&](const Cube&) { return xi.lpNorm<1>(); },
      [&](const BallP& s) { return detail::dual_norm(xi, s.p); },
      [&](const Simplex& s) { return (s.vertices * xi).maxCoeff(); },
      [&](const SimplexUnion& s) {
        double best = -std::numeric_limits<double>::infinity();
        for (const auto& simplex : s.simplices) best = std::max(best, (simplex.vertices * xi).maxCoeff());
        return best;
      },
      [&](const HalfBall& s) {
        if (xi[s.dim - 1] >= 0.0) return xi.norm();
        return xi.head(s.dim - 1).norm();
      },
      [&](const ConeDisk&) { return std::max(xi[2], std::hypot(xi[0], xi[1])); },
      [&](const Product& s) {
        double acc = 0.0;
        int offset = 0;
        for (const auto& f : s.factors) {
          acc += f.support(xi.segment(offset, f.dim()));
          offset += f.dim();
        }
        return acc;
      },
      [&](const Affine& s) {
        return xi.dot(s.map.offset()) + s.base.support(s.map.matrix().transpose() * xi);
      },
  });
}

inline Box Domain::bounding_box() const {
  const int d = dim();
  Box out{Vector(d), Vector(d)};
  for (int i = 0; i < d; ++i) {
    Vector e = Vector::Zero(d);
    e[i] = 1.0;
    out.upper[i] = support(e);
    out.lower[i] = -support(-e);
  }
  return out;
}

inline Vector Domain::star_center() const {
  using namespace shape;
  const int d = dim();
  return visit(detail::overloaded{
      [](const Interval& s) { return Vector(Vector::Constant(1, 0.5 * (s.lower + s.upper))); },
      [d](const Cube&) { return Vector(Vector::Zero(d)); },
      [d](const BallP&) { return Vector(Vector::Zero(d)); },
      [](const Simplex& s) { return Vector(s.vertices.colwise().mean().transpose()); },
      [d](const SimplexUnion& s) {
        Vector c = Vector::Zero(d);
        double total = 0.0;
        std::size_t largest = 0;
        for (std::size_t i = 0; i < s.simplices.size(); ++i) {
          c += s.simplices[i].volume * s.simplices[i].vertices.colwise().mean().transpose();
          total += s.simplices[i].volume;
          if (s.simplices[i].volume > s.simplices[largest].volume) largest = i;
        }
        c /= total;
        for (const auto& simplex : s.simplices) {
          if (detail::simplex_contains(simplex, c, 1e-12)) return c;
        }
        return Vector(s.simplices[largest].vertices.colwise().mean().transpose());
      },
      [d](const HalfBall&) {
        Vector c = Vector::Zero(d);
        c[d - 1] = 0.5;
        return c;
      },
      [](const ConeDisk&) {
        Vector c(3);
        c << 0.0, 0.0, 0.25;
        return c;
      },
      [d](const Product& s) {
        Vector c(d);
        int offset = 0;
        for (const auto& f : s.factors) {
          c.segment(offset, f.dim()) = f.star_center();
          offset += f.dim();
        }
        return c;
      },
      [](const Affine& s) { return s.map(s.base.star_center()); },
  });
}

inline bool Domain::is_convex() const {
  using namespace shape;
  return visit(detail::overloaded{
      [](const BallP& s) { return s.p >= 1.0; },
      [](const SimplexUnion& s) { return s.convex; },
      [](const Product& s) {
        for (const auto& f : s.factors) {
          if (!f.is_convex()) return false;
        }
        return true;
      },
      [](const Affine& s) { return s.base.is_convex(); },
      [](const auto&) { return true; },
  });
}

inline std::vector<Vector> Domain::sharp_points(int resolution) const {
  using namespace shape;
  const int d = dim();
  auto axis_points = [d](int count) {
    std::vector<Vector> out;
    for (int i = 0; i < count; ++i) {
      for (double sign : {1.0, -1.0}) {
        Vector v = Vector::Zero(d);
        v[i] = sign;
        out.push_back(v);
      }
    }
    return out;
  };
  auto cube_vertices = [d]() {
    std::vector<Vector> out;
    for (long mask = 0; mask < (1L << d); ++mask) {
      Vector v(d);
      for (int i = 0; i < d; ++i) v[i] = (mask >> i) & 1 ? 1.0 : -1.0;
      out.push_back(v);
    }
    return out;
  };
  return visit(detail::overloaded{
      [](const Interval& s) {
        return std::vector<Vector>{Vector::Constant(1, s.lower), Vector::Constant(1, s.upper)};
      },
      [&](const Cube&) { return cube_vertices(); },
      [&](const BallP& s) { return s.is_cube() ? cube_vertices() : axis_points(d); },
      [](const Simplex& s) {
        std::vector<Vector> out;
        for (Eigen::Index i = 0; i < s.vertices.rows(); ++i) out.push_back(s.vertices.row(i).transpose());
        return out;
      },
      [](const SimplexUnion& s) {
        std::vector<Vector> out;
        for (const auto& simplex : s.simplices) {
          for (Eigen::Index i = 0; i < simplex.vertices.rows(); ++i) {
            Vector v = simplex.vertices.row(i).transpose();
            bool seen = false;
            for (const auto& w : out) seen = seen || (w - v).norm() < 1e-12;
            if (!seen) out.push_back(v);
          }
        }
        return out;
      },
      [&](const HalfBall& s) {
        std::vector<Vector> out = axis_points(s.dim - 1);
        Vector pole = Vector::Zero(d);
        pole[d - 1] = 1.0;
        out.push_back(pole);
        return out;
      },
      [&](const ConeDisk&) {
        std::vector<Vector> out;
        Vector apex(3);
        apex << 0.0, 0.0, 1.0;
        out.push_back(apex);
        for (int i = 0; i < resolution; ++i) {
          const double t = 2.0 * std::numbers::pi * i / resolution;
          Vector v(3);
          v << std::cos(t), std::sin(t), 0.0;
          out.push_back(v);
        }
        return out;
      },
      [&](const Product& s) {
        std::vector<Vector> out{Vector(0)};
        for (const auto& f : s.factors) {
          std::vector<Vector> next;
          const auto pts = f.sharp_points(resolution);
          for (const auto& head : out) {
            for (const auto& tail : pts) {
              Vector v(head.size() + tail.size());
              v << head, tail;
              next.push_back(std::move(v));
            }
          }
          out = std::move(next);
        }
        return out;
      },
      [&](const Affine& s) {
        std::vector<Vector> out = s.base.sharp_points(resolution);
        for (auto& v : out) v = s.map(v);
        return out;
      },
  });
}

inline std::string Domain::describe() const {
  using namespace shape;
  return visit(detail::overloaded{
      [](const Interval& s) {
        return "interval[" + std::to_string(s.lower) + "," + std::to_string(s.upper) + "]";
      },
      [](const Cube& s) { return "cube(d=" + std::to_string(s.dim) + ")"; },
      [](const BallP& s) { return "ball_p(d=" + std::to_string(s.dim) + ",p=" + std::to_string(s.p) + ")"; },
      [](const Simplex& s) { return "simplex(d=" + std::to_string(s.vertices.cols()) + ")"; },
      [](const SimplexUnion& s) { return "simplex_union(" + std::to_string(s.simplices.size()) + ")"; },
      [](const HalfBall& s) { return "half_ball(d=" + std::to_string(s.dim) + ")"; },
      [](const ConeDisk&) { return std::string("cone_disk"); },
      [](const Product& s) {
        std::string out = "product(";
        for (std::size_t i = 0; i < s.factors.size(); ++i) out += (i ? "," : "") + s.factors[i].describe();
        return out + ")";
      },
      [](const Affine& s) { return "affine(" + s.base.describe() + ")"; },
  });
}

}  // namespace christoffel

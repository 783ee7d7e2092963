#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <vector>

#include "christoffel/common.hpp"
#include "christoffel/domain.hpp"
#include "christoffel/sampling.hpp"

namespace christoffel::geometry {

inline Domain apply_affine(const AffineMap& map, const Domain& domain) { return Domain::affine_image(map, domain); }

/// Largest r with center + r * direction in the domain, by bisection on membership.
inline double radial_extent(const Domain& domain, const Vector& center, const Vector& direction, int steps = 80) {
  const Box box = domain.bounding_box();
  double hi = 1.01 * (box.upper - box.lower).norm() / direction.norm() + 1e-12;
  double lo = 0.0;
  for (int i = 0; i < steps; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (domain.contains(center + mid * direction)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

inline Vector radial_boundary_point(const Domain& domain, const Vector& center, const Vector& direction) {
  return center + radial_extent(domain, center, direction) * direction;
}

struct BoundaryCandidates {
  std::vector<Vector> sharp;
  std::vector<Vector> sample;

  std::vector<Vector> all() const {
    std::vector<Vector> out = sharp;
    out.insert(out.end(), sample.begin(), sample.end());
    return out;
  }
};

/// Sharp points of the catalogue plus `resolution` quasi-uniform boundary points pushed
/// radially from the star center.
inline BoundaryCandidates boundary_candidates(const Domain& domain, int resolution) {
  if (resolution < 8) throw DomainError("boundary_candidates: resolution must be at least 8");
  BoundaryCandidates out;
  out.sharp = domain.sharp_points(resolution);
  const Vector center = domain.star_center();
  for (const auto& dir : sampling::sphere_points(domain.dim(), resolution)) {
    out.sample.push_back(radial_boundary_point(domain, center, dir));
  }
  return out;
}

/// Regular grid of the bounding box restricted to the domain (`per_axis` points per axis).
inline std::vector<Vector> interior_grid(const Domain& domain, int per_axis) {
  const Box box = domain.bounding_box();
  const int d = domain.dim();
  std::vector<Vector> out;
  std::vector<int> counter(d, 0);
  while (true) {
    Vector x(d);
    for (int i = 0; i < d; ++i) {
      x[i] = box.lower[i] + (box.upper[i] - box.lower[i]) * (counter[i] + 0.5) / per_axis;
    }
    if (domain.contains(x)) out.push_back(x);
    int i = 0;
    while (i < d && ++counter[i] == per_axis) counter[i++] = 0;
    if (i == d) break;
  }
  return out;
}

/// (1 + n^{-2}/3, 0, ..., 0).
inline Vector extension_point(int n, int dim) {
  if (n < 1) throw DomainError("extension_point: n must be positive");
  Vector v = Vector::Zero(dim);
  v[0] = 1.0 + 1.0 / (3.0 * n * n);
  return v;
}

/// Orthogonal matrix taking (-1, 0, ..., 0) to the unit vector u, built from Householder
/// reflections (a product of two, so the result is a rotation).
inline Matrix rotation_to(const Vector& u) {
  const int d = static_cast<int>(u.size());
  const double norm = u.norm();
  if (!(norm > 0.0)) throw DomainError("rotation_to: zero direction");
  const Vector target = u / norm;
  Vector source = Vector::Zero(d);
  source[0] = -1.0;
  auto householder = [d](const Vector& w) {
    const double n2 = w.squaredNorm();
    if (n2 < 1e-30) return Matrix(Matrix::Identity(d, d));
    return Matrix(Matrix::Identity(d, d) - 2.0 * w * w.transpose() / n2);
  };
  // reflect source to target, then reflect across a hyperplane containing target
  if ((source - target).norm() < 1e-15) return Matrix::Identity(d, d);
  const Matrix h1 = householder(source - target);
  Vector fixer = Vector::Zero(d);
  if (d == 1) return h1;
  // any unit vector orthogonal to target
  int axis = 0;
  for (int i = 1; i < d; ++i) {
    if (std::abs(target[i]) < std::abs(target[axis])) axis = i;
  }
  fixer[axis] = 1.0;
  fixer -= fixer.dot(target) * target;
  const Matrix h2 = householder(fixer);
  return h2 * h1;
}

/// `u` is the unit direction pointing into the domain at the boundary point x.
/// T(y) = x + R A_1 (y - v_n), A_1 = diag(alpha/3, mu, ..., mu), mu = beta / sqrt(6) n^{1-2s},
/// with R a rotation taking (-1,0,...,0) to u.
inline AffineMap cone_inscription_map(const Vector& x, const Vector& u, double alpha, double beta, double s, int n) {
  if (!(s >= 0.5 && s <= 1.0)) throw DomainError("cone_inscription_map: s must lie in [1/2, 1]");
  if (!(alpha > 0.0) || !(beta > 0.0)) throw DomainError("cone_inscription_map: alpha and beta must be positive");
  if (n < 1) throw DomainError("cone_inscription_map: n must be positive");
  const int d = static_cast<int>(x.size());
  require_dim(d, u.size(), "cone_inscription_map direction");
  const double mu = beta / std::sqrt(6.0) * std::pow(static_cast<double>(n), 1.0 - 2.0 * s);
  Vector diag = Vector::Constant(d, mu);
  diag[0] = alpha / 3.0;
  const Matrix a = rotation_to(u) * diag.asDiagonal();
  const Vector v = extension_point(n, d);
  return {a, x - a * v};
}

/// Variant of the cone map whose lateral scale is reduced by (alpha/3)^s, so that the image
/// of the unit ball stays inside the cone {x + delta u + lambda delta^s v}.
inline AffineMap contained_cone_map(const Vector& x, const Vector& u, double alpha, double beta, double s, int n) {
  const double factor = std::pow(alpha / 3.0, s);
  return cone_inscription_map(x, u, alpha, beta * factor, s, n);
}

struct ConeConstants {
  double alpha;
  double beta;
};

/// Constants for the lp-ball cone condition with 1 < p <= 2.
inline ConeConstants lp_cone_constants(int d, double p) {
  if (!(p > 1.0 && p <= 2.0)) throw DomainError("lp_cone_constants: p must lie in (1, 2]");
  if (d < 2) throw DomainError("lp_cone_constants: dimension must be at least 2");
  const double gamma1 = std::pow(static_cast<double>(d), p - 1.0);
  const double beta = 2.0 / std::sqrt(13.0 * d * gamma1);
  const double alpha = std::pow(beta / (2.0 * gamma1), p / (p - 1.0));
  return {alpha, beta};
}

/// Outward unit normal of the lp sphere at a boundary point x (1 < p < infinity).
inline Vector lp_outward_normal(const Vector& x, double p) {
  Vector g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    g[i] = (x[i] < 0 ? -1.0 : 1.0) * std::pow(std::abs(x[i]), p - 1.0);
  }
  return g / g.norm();
}

/// Points x + delta u + lambda delta^s v (u inward) sampled over a grid of delta in [0, alpha],
/// lambda in [0, beta] and unit v orthogonal to u; returns the number outside the domain.
inline int cone_premise_violations(const Domain& domain, const Vector& x, const Vector& inward, double alpha,
                                   double beta, double s, int grid = 50, int directions = 16) {
  const int d = static_cast<int>(x.size());
  const Matrix rot = rotation_to(inward);
  // columns 1..d-1 of rot span the orthogonal complement of u
  std::vector<Vector> lateral;
  if (d == 2) {
    lateral.push_back(rot.col(1));
    lateral.push_back(-rot.col(1));
  } else {
    for (const auto& w : sampling::sphere_points(d - 1, directions)) lateral.push_back(rot.rightCols(d - 1) * w);
  }
  int bad = 0;
  for (int i = 0; i < grid; ++i) {
    const double delta = alpha * (i + 1.0) / grid;
    for (int j = 0; j < grid; ++j) {
      const double lambda = beta * j / (grid - 1.0);
      for (const auto& v : lateral) {
        if (!domain.contains(x + delta * inward + lambda * std::pow(delta, s) * v, 1e-13)) ++bad;
      }
    }
  }
  return bad;
}

/// The half-ball map with T(v_n) = (1,0,0) and det = 1/(160 n).
inline AffineMap half_ball_map(int n) {
  if (n < 1) throw DomainError("half_ball_map: n must be positive");
  const double e = 1.0 / (3.0 * n * n);
  Matrix a(3, 3);
  a << 0.5, 0.0, 0.0, 0.0, 0.125, 0.0, -0.125, 0.0, 1.0 / (10.0 * n);
  Vector b(3);
  b << 1.0 - (1.0 + e) / 2.0, 0.0, (1.0 + e) / 8.0;
  return {a, b};
}

/// Counts images T(p) of quasi-uniform unit-ball points that fall outside the domain.
inline int ellipsoid_premise_violations(const Domain& domain, const AffineMap& map, int samples = 10000) {
  require_dim(domain.dim(), map.dim(), "ellipsoid premise");
  int bad = 0;
  for (const auto& p : sampling::ball_points(domain.dim(), samples)) {
    if (!domain.contains(map(p))) ++bad;
  }
  return bad;
}

struct SectionValue {
  double value;
  double std_error;
  bool exact;
};

namespace detail {

/// (d-1)-volume of conv(points) lying in the hyperplane with unit normal xi.
inline double hyperplane_hull_volume(const std::vector<Vector>& points, const Vector& xi) {
  const int d = static_cast<int>(xi.size());
  if (points.empty()) return 0.0;
  if (d == 1) return 1.0;
  const Matrix rot = rotation_to(-xi);  // first column is xi, the rest span the hyperplane
  std::vector<Eigen::Vector2d> planar;
  if (d == 2) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& p : points) {
      const double c = rot.col(1).dot(p);
      lo = std::min(lo, c);
      hi = std::max(hi, c);
    }
    return hi - lo;
  }
  if (d != 3) throw DomainError("hyperplane_hull_volume: exact slicing needs d <= 3");
  for (const auto& p : points) planar.emplace_back(rot.col(1).dot(p), rot.col(2).dot(p));
  std::sort(planar.begin(), planar.end(), [](const auto& a, const auto& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  auto cross = [](const Eigen::Vector2d& o, const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
    return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
  };
  std::vector<Eigen::Vector2d> hull(2 * planar.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < planar.size(); ++i) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], planar[i]) <= 0) --k;
    hull[k++] = planar[i];
  }
  for (std::size_t i = planar.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(hull[k - 2], hull[k - 1], planar[i]) <= 0) --k;
    hull[k++] = planar[i];
  }
  if (k < 4) return 0.0;
  double area = 0.0;
  for (std::size_t i = 0; i + 1 < k; ++i) area += hull[i].x() * hull[i + 1].y() - hull[i + 1].x() * hull[i].y();
  return 0.5 * std::abs(area);
}

/// Slice of conv(vertices) by {x . xi = level}.
inline double polytope_slice(const Matrix& vertices, const Vector& xi, double level) {
  std::vector<Vector> pts;
  const Vector h = vertices * xi;
  const Eigen::Index m = vertices.rows();
  for (Eigen::Index i = 0; i < m; ++i) {
    if (h[i] == level) pts.push_back(vertices.row(i).transpose());
    for (Eigen::Index j = i + 1; j < m; ++j) {
      if ((h[i] - level) * (h[j] - level) < 0.0) {
        const double w = (level - h[i]) / (h[j] - h[i]);
        pts.push_back(((1.0 - w) * vertices.row(i) + w * vertices.row(j)).transpose());
      }
    }
  }
  return hyperplane_hull_volume(pts, xi);
}

inline Matrix cube_vertex_matrix(int d) {
  Matrix v(1L << d, d);
  for (long mask = 0; mask < (1L << d); ++mask) {
    for (int i = 0; i < d; ++i) v(mask, i) = (mask >> i) & 1 ? 1.0 : -1.0;
  }
  return v;
}

/// Vertex matrix when the domain is a single convex polytope with known vertices.
inline std::optional<Matrix> polytope_vertices(const Domain& domain) {
  using namespace shape;
  return domain.visit(christoffel::detail::overloaded{
      [](const Interval& s) -> std::optional<Matrix> {
        Matrix v(2, 1);
        v << s.lower, s.upper;
        return v;
      },
      [](const Cube& s) -> std::optional<Matrix> { return cube_vertex_matrix(s.dim); },
      [](const BallP& s) -> std::optional<Matrix> {
        if (s.is_cube()) return cube_vertex_matrix(s.dim);
        if (s.p == 1.0) {
          Matrix v = Matrix::Zero(2 * s.dim, s.dim);
          for (int i = 0; i < s.dim; ++i) {
            v(2 * i, i) = 1.0;
            v(2 * i + 1, i) = -1.0;
          }
          return v;
        }
        return std::nullopt;
      },
      [](const Simplex& s) -> std::optional<Matrix> { return s.vertices; },
      [&](const Affine& s) -> std::optional<Matrix> {
        auto base = polytope_vertices(s.base);
        if (!base) return std::nullopt;
        Matrix v = (*base * s.map.matrix().transpose()).rowwise() + s.map.offset().transpose();
        return v;
      },
      [](const auto&) -> std::optional<Matrix> { return std::nullopt; },
  });
}

}  // namespace detail

/// A_{D,xi}(t): (d-1)-volume of D intersected with {x . xi = t + h}, h = min over D of x . xi.
/// Closed form for lp balls along coordinate axes, exact slicing for polytopes in d <= 3,
/// hit-or-miss sampling in the slice plane otherwise.
inline SectionValue parallel_section(const Domain& domain, const Vector& xi_in, double t, int samples = 20000,
                                     std::uint64_t seed = 1) {
  const int d = domain.dim();
  require_dim(d, xi_in.size(), "parallel_section direction");
  const Vector xi = xi_in / xi_in.norm();
  const double h = -domain.support(-xi);
  const double width = domain.support(xi) - h;
  if (t < 0.0 || t > width) return {0.0, 0.0, true};

  if (domain.kind() == ShapeKind::ball_p) {
    const auto& s = std::get<shape::BallP>(domain.node().shape);
    int axis = -1;
    for (int i = 0; i < d; ++i) {
      if (std::abs(std::abs(xi[i]) - 1.0) < 1e-15) axis = i;
    }
    if (axis >= 0 && !s.is_cube()) {
      if (d == 1) return {1.0, 0.0, true};
      const double r = 1.0 - std::pow(std::abs(1.0 - t), s.p);
      const double value = std::pow(std::max(r, 0.0), (d - 1) / s.p) * christoffel::detail::ball_volume(d - 1, s.p);
      return {value, 0.0, true};
    }
  }
  if (d <= 3) {
    if (auto vertices = detail::polytope_vertices(domain)) {
      return {detail::polytope_slice(*vertices, xi, t + h), 0.0, true};
    }
    if (domain.kind() == ShapeKind::simplex_union) {
      // members do not overlap, so slices add up
      double acc = 0.0;
      for (const auto& s : std::get<shape::SimplexUnion>(domain.node().shape).simplices) {
        acc += detail::polytope_slice(s.vertices, xi, t + h);
      }
      return {acc, 0.0, true};
    }
  }
  if (d == 1) return {1.0, 0.0, true};

  // hit-or-miss on a square patch of the slice hyperplane covering the bounding box
  const Box box = domain.bounding_box();
  const double radius = 0.5 * (box.upper - box.lower).norm();
  const Vector c = box.center();
  const Vector origin = c + ((t + h) - c.dot(xi)) * xi;
  const Matrix rot = rotation_to(-xi);
  const Matrix tangent = rot.rightCols(d - 1);
  sampling::Halton halton(d - 1, seed);
  long hits = 0;
  for (int i = 1; i <= samples; ++i) {
    const Vector u = halton.point(static_cast<std::uint64_t>(i));
    const Vector y = origin + tangent * (radius * (2.0 * u.array() - 1.0)).matrix();
    if (domain.contains(y)) ++hits;
  }
  const double area = std::pow(2.0 * radius, d - 1);
  const double frac = static_cast<double>(hits) / samples;
  return {area * frac, area * std::sqrt(frac * (1.0 - frac) / samples), false};
}

}  // namespace christoffel::geometry

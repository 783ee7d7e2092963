#pragma once

// Derivative-free maximization of a function over a domain: boundary candidates, an
// optional interior grid, and local refinement along the radial boundary parametrization.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <vector>

#include "christoffel/common.hpp"
#include "christoffel/domain.hpp"
#include "christoffel/geometry.hpp"

namespace christoffel {

struct SearchConfig {
  int resolution = 0;        // boundary sample size; 0 picks a default per dimension
  int interior_per_axis = 0;  // 0 picks a default per dimension
  bool force_interior = false;
  int refine_top = 3;
  int refine_budget = 200;
  int accurate_top = 8;
  double tie_tolerance = 1e-12;

  int boundary_resolution(int dim) const {
    if (resolution > 0) return resolution;
    switch (dim) {
      case 1: return 8;
      case 2: return 256;
      case 3: return 600;
      default: return 800;
    }
  }

  int grid_per_axis(int dim) const {
    if (interior_per_axis > 0) return interior_per_axis;
    switch (dim) {
      case 1: return 64;
      case 2: return 40;
      case 3: return 16;
      default: return 8;
    }
  }
};

struct TracePoint {
  Vector point;
  double value;
};

struct SearchResult {
  double value = 0.0;
  Vector argmax;
  std::size_t candidates_examined = 0;
  std::vector<TracePoint> trace;
  double boundary_value = 0.0;  // best value over boundary candidates and refinements
  double interior_value = 0.0;  // best value over the interior grid (0 when not sampled)
  bool argmax_is_sharp = false;
};

namespace search_detail {

inline bool lex_less(const Vector& a, const Vector& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a[i] < b[i]) return true;
    if (a[i] > b[i]) return false;
  }
  return false;
}

/// Golden-section maximization of f on [lo, hi]; returns (argmax, value) and spends `budget`
/// evaluations at most.
template <class F>
std::pair<double, double> golden_max(F&& f, double lo, double hi, int budget) {
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - ratio * (b - a), d = a + ratio * (b - a);
  double fc = f(c), fd = f(d);
  budget -= 2;
  while (budget-- > 0 && (b - a) > 1e-13) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - ratio * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + ratio * (b - a);
      fd = f(d);
    }
  }
  return fc > fd ? std::pair{c, fc} : std::pair{d, fd};
}

/// Orthonormal basis of the complement of unit vector u (columns).
inline Matrix tangent_basis(const Vector& u) { return geometry::rotation_to(-u).rightCols(u.size() - 1); }

}  // namespace search_detail

/// Maximizes `fast` over the domain and confirms the best candidates with `accurate`.
/// Convex domains are searched on the boundary; other domains also get an interior grid.
inline SearchResult maximize_on_domain(const Domain& domain, const std::function<double(const Vector&)>& fast,
                                       const std::function<double(const Vector&)>& accurate,
                                       const SearchConfig& config = {}) {
  using search_detail::lex_less;
  const int d = domain.dim();
  SearchResult result;
  const int resolution = config.boundary_resolution(d);
  const auto candidates = geometry::boundary_candidates(domain, std::max(resolution, 8));
  struct Scored {
    Vector point;
    double value;
    bool boundary;
  };
  std::vector<Scored> scored;
  for (const auto& p : candidates.all()) scored.push_back({p, fast(p), true});
  if (!domain.is_convex() || config.force_interior) {
    for (const auto& p : geometry::interior_grid(domain, config.grid_per_axis(d))) scored.push_back({p, fast(p), false});
  }
  result.candidates_examined = scored.size();

  std::vector<std::size_t> order(scored.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scored[a].value > scored[b].value;
  });

  const Vector center = domain.star_center();
  std::vector<Scored> refined;
  // typical angular spacing of the boundary sample
  const double step = d == 2 ? 2.0 * std::numbers::pi / resolution
                             : std::pow(4.0 * std::numbers::pi / resolution, 1.0 / std::max(1, d - 1));
  for (std::size_t r = 0; r < order.size() && static_cast<int>(refined.size()) < config.refine_top; ++r) {
    const Scored& start = scored[order[r]];
    if (d == 1) break;
    if (!start.boundary) {
      // coordinate-alternating search inside the domain
      Vector x = start.point;
      double best = start.value;
      const Box box = domain.bounding_box();
      double h = 0.5 * (box.upper - box.lower).maxCoeff() / config.grid_per_axis(d);
      int budget = config.refine_budget;
      while (budget > 0 && h > 1e-10) {
        for (int i = 0; i < d && budget > 0; ++i) {
          for (double sgn : {1.0, -1.0}) {
            Vector y = x;
            y[i] += sgn * h;
            --budget;
            if (!domain.contains(y)) continue;
            const double v = fast(y);
            if (v > best) {
              best = v;
              x = y;
            }
          }
        }
        h *= 0.5;
      }
      refined.push_back({x, best, false});
      result.trace.push_back({x, best});
      continue;
    }
    Vector dir0 = start.point - center;
    if (dir0.norm() < 1e-14) continue;
    dir0.normalize();
    const Matrix tangent = search_detail::tangent_basis(dir0);
    auto boundary_at = [&](const Vector& coords) {
      Vector dir = dir0 + tangent * coords;
      dir.normalize();
      return geometry::radial_boundary_point(domain, center, dir);
    };
    Vector coords = Vector::Zero(d - 1);
    double best = start.value;
    Vector best_point = start.point;
    int budget = config.refine_budget;
    double h = 1.5 * step;
    const int per_line = d == 2 ? budget : std::max(8, budget / (4 * (d - 1)));
    while (budget > 0) {
      for (int k = 0; k < d - 1 && budget > 0; ++k) {
        const int spend = std::min(per_line, budget);
        auto line = [&](double t) {
          Vector c = coords;
          c[k] = t;
          return fast(boundary_at(c));
        };
        const auto [t, v] = search_detail::golden_max(line, coords[k] - h, coords[k] + h, spend);
        budget -= spend;
        if (v > best) {
          best = v;
          coords[k] = t;
          best_point = boundary_at(coords);
        }
      }
      h *= 0.5;
      if (d == 2) break;
    }
    refined.push_back({best_point, best, true});
    result.trace.push_back({best_point, best});
  }

  // accurate re-evaluation of the leading candidates
  std::vector<Scored> finalists = refined;
  for (std::size_t r = 0; r < order.size() && static_cast<int>(r) < config.accurate_top; ++r) {
    finalists.push_back(scored[order[r]]);
  }
  double top = -std::numeric_limits<double>::infinity();
  for (auto& f : finalists) {
    f.value = accurate(f.point);
    top = std::max(top, f.value);
  }
  result.value = top;
  bool chosen = false;
  for (const auto& f : finalists) {
    if (f.value < top - config.tie_tolerance * std::abs(top)) continue;
    if (!chosen || lex_less(f.point, result.argmax)) {
      result.argmax = f.point;
      chosen = true;
    }
  }
  for (const auto& s : scored) {
    if (s.boundary) {
      result.boundary_value = std::max(result.boundary_value, s.value);
    } else {
      result.interior_value = std::max(result.interior_value, s.value);
    }
  }
  for (const auto& f : finalists) {
    if (f.boundary) result.boundary_value = std::max(result.boundary_value, f.value);
  }
  const Box box = domain.bounding_box();
  const double scale = (box.upper - box.lower).norm();
  for (const auto& p : candidates.sharp) {
    if ((p - result.argmax).norm() <= 1e-6 * scale) result.argmax_is_sharp = true;
  }
  return result;
}

}  // namespace christoffel

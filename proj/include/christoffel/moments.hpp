#pragma once

// Monomial moments of catalogue domains in 100-digit binary floating point, their
// conversion to Legendre moments of a bounding box, and a sampled fallback.

#include <cmath>
#include <cstdint>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "christoffel/basis.hpp"
#include "christoffel/common.hpp"
#include "christoffel/domain.hpp"
#include "christoffel/multi_index.hpp"
#include "christoffel/orthopoly.hpp"
#include "christoffel/sampling.hpp"

namespace christoffel {

using Wide = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<100>, boost::multiprecision::et_off>;

inline constexpr int kMaxPushforwardDegree = 64;

enum class MomentMode { exact, gauss_box, mapped_exact, sampled };

inline const char* mode_name(MomentMode mode) {
  switch (mode) {
    case MomentMode::exact: return "exact";
    case MomentMode::gauss_box: return "gauss_box";
    case MomentMode::mapped_exact: return "mapped_exact";
    case MomentMode::sampled: return "sampled";
  }
  return "unknown";
}

struct SamplingConfig {
  std::size_t count = 1'000'000;
  std::uint64_t seed = 1;
};

struct MomentValue {
  double value;
  double error;
};

/// Rank lookup for the graded set of degree K: a dense mixed-radix table when small.
class IndexLookup {
 public:
  IndexLookup(int dim, int degree) : dim_(dim), degree_(degree) {
    double cells = std::pow(degree + 1.0, dim);
    if (cells <= static_cast<double>(1 << 22)) {
      dense_.assign(static_cast<std::size_t>(cells), -1);
      MultiIndexSet set(dim, degree, SIZE_MAX);
      for (std::size_t k = 0; k < set.size(); ++k) dense_[flat(set[k])] = static_cast<long>(k);
    }
  }

  std::size_t operator()(std::span<const int> alpha) const {
    if (!dense_.empty()) return static_cast<std::size_t>(dense_[flat(alpha)]);
    return MultiIndexSet::graded_rank(alpha);
  }

 private:
  std::size_t flat(std::span<const int> alpha) const {
    std::size_t f = 0;
    for (int i = 0; i < dim_; ++i) f = f * static_cast<std::size_t>(degree_ + 1) + static_cast<std::size_t>(alpha[i]);
    return f;
  }

  int dim_;
  int degree_;
  std::vector<long> dense_;
};

/// All moments with |alpha| <= degree, in graded order.
struct MomentTable {
  int dim = 0;
  int degree = 0;
  std::vector<Wide> values;

  const Wide& at(std::span<const int> alpha) const { return values[MultiIndexSet::graded_rank(alpha)]; }
};

namespace moments_detail {

inline Wide wide_factorial(int k) {
  Wide f = 1;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

inline MultiIndexSet full_set(int dim, int degree) { return MultiIndexSet(dim, degree, SIZE_MAX); }

template <class F>
MomentTable fill_table(int dim, int degree, F&& f) {
  MomentTable t{dim, degree, {}};
  const auto set = full_set(dim, degree);
  t.values.resize(set.size());
  for (std::size_t k = 0; k < set.size(); ++k) t.values[k] = f(set[k]);
  return t;
}

inline std::vector<Wide> interval_moments(const Wide& a, const Wide& b, int degree) {
  std::vector<Wide> m(degree + 1);
  Wide pa = a, pb = b;
  for (int k = 0; k <= degree; ++k) {
    m[k] = (pb - pa) / (k + 1);
    pa *= a;
    pb *= b;
  }
  return m;
}

/// Integral over B_p^d of prod x_i^{alpha_i}; `power` marks coordinates integrated over a
/// half-range only (halving and odd exponents allowed there).
inline MomentTable dirichlet_table(int dim, const Wide& p, int degree, int half_axis) {
  std::vector<Wide> gamma_axis(degree + 1);
  for (int k = 0; k <= degree; ++k) gamma_axis[k] = boost::math::tgamma(Wide(k + 1) / p);
  return fill_table(dim, degree, [&](std::span<const int> alpha) {
    int total = 0;
    Wide prod = 1;
    for (int i = 0; i < dim; ++i) {
      if (alpha[i] % 2 != 0 && i != half_axis) return Wide(0);
      total += alpha[i];
      prod *= gamma_axis[alpha[i]];
    }
    Wide value = pow(Wide(2), dim) * prod / (pow(p, dim) * boost::math::tgamma(Wide(total + dim) / p + 1));
    if (half_axis >= 0) value /= 2;
    return value;
  });
}

/// nu(j) = sum_{a <= j} prod_i E_i[j_i][a_i] m(a) over the graded set; E_i lower triangular.
inline std::vector<Wide> axis_transform(int dim, int degree, std::vector<Wide> values,
                                        const std::vector<std::vector<std::vector<Wide>>>& factors) {
  const auto set = full_set(dim, degree);
  const IndexLookup lookup(dim, degree);
  std::vector<int> probe(dim);
  for (int axis = 0; axis < dim; ++axis) {
    const auto& e = factors[axis];
    std::vector<Wide> next(values.size());
    for (std::size_t k = 0; k < set.size(); ++k) {
      const auto gamma = set[k];
      std::copy(gamma.begin(), gamma.end(), probe.begin());
      const int j = gamma[axis];
      Wide acc = 0;
      for (int a = 0; a <= j; ++a) {
        if (e[j][a] == 0) continue;
        probe[axis] = a;
        acc += e[j][a] * values[lookup(probe)];
      }
      next[k] = acc;
    }
    values = std::move(next);
  }
  return values;
}

/// Determinant by Gaussian elimination with partial pivoting.
inline Wide wide_determinant(std::vector<std::vector<Wide>> a) {
  const std::size_t n = a.size();
  Wide det = 1;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (abs(a[r][c]) > abs(a[piv][c])) piv = r;
    }
    if (a[piv][c] == 0) return 0;
    if (piv != c) {
      std::swap(a[piv], a[c]);
      det = -det;
    }
    det *= a[c][c];
    for (std::size_t r = c + 1; r < n; ++r) {
      const Wide f = a[r][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
    }
  }
  return det;
}

/// Moments of {A y + b : y in base} from base moments of the same degree.
inline MomentTable pushforward(const MomentTable& base, const Matrix& a_mat, const Vector& b_vec) {
  const int d = base.dim;
  const int degree = base.degree;
  if (degree > kMaxPushforwardDegree) {
    throw CapacityError("affine moment expansion: degree " + std::to_string(degree) + " exceeds " +
                        std::to_string(kMaxPushforwardDegree));
  }
  std::vector<std::vector<Wide>> a(d, std::vector<Wide>(d));
  std::vector<Wide> b(d);
  bool diagonal = true;
  for (int i = 0; i < d; ++i) {
    b[i] = Wide(b_vec[i]);
    for (int j = 0; j < d; ++j) {
      a[i][j] = Wide(a_mat(i, j));
      if (i != j && a_mat(i, j) != 0.0) diagonal = false;
    }
  }
  const Wide det = abs(wide_determinant(a));
  MomentTable out{d, degree, {}};

  if (diagonal) {
    // (b_i + a_ii y_i)^k = sum_l C(k,l) b_i^{k-l} a_ii^l y_i^l
    std::vector<std::vector<std::vector<Wide>>> factors(d);
    for (int i = 0; i < d; ++i) {
      auto& e = factors[i];
      e.assign(degree + 1, std::vector<Wide>(degree + 1, Wide(0)));
      e[0][0] = 1;
      for (int k = 1; k <= degree; ++k) {
        for (int l = 0; l <= k; ++l) {
          Wide v = 0;
          if (l <= k - 1) v += b[i] * e[k - 1][l];
          if (l >= 1) v += a[i][i] * e[k - 1][l - 1];
          e[k][l] = v;
        }
      }
    }
    out.values = axis_transform(d, degree, base.values, factors);
    for (auto& v : out.values) v *= det;
    return out;
  }

  // grade-by-grade expansion of prod_i (b_i + A_i . y)^{alpha_i} in monomials of y
  const auto set = full_set(d, degree);
  const IndexLookup lookup(d, degree);
  out.values.assign(set.size(), Wide(0));
  out.values[0] = det * base.values[0];
  std::vector<std::vector<std::size_t>> shift(set.size(), std::vector<std::size_t>(d, 0));
  std::vector<int> probe(d);
  for (std::size_t k = 0; k < set.size(); ++k) {
    const auto beta = set[k];
    int total = 0;
    for (int v : beta) total += v;
    if (total >= degree) continue;
    for (int j = 0; j < d; ++j) {
      std::copy(beta.begin(), beta.end(), probe.begin());
      ++probe[j];
      shift[k][j] = lookup(probe);
    }
  }
  // layer[g] holds polynomials for all alpha of grade g, each with C(g+d,d) coefficients
  std::vector<std::vector<Wide>> previous{std::vector<Wide>{Wide(1)}};
  std::size_t prev_start = 0;  // rank of the first alpha of the previous grade
  for (int g = 1; g <= degree; ++g) {
    const std::size_t start = basis_dimension(d, g - 1);
    const std::size_t stop = basis_dimension(d, g);
    const std::size_t width = stop;
    std::vector<std::vector<Wide>> current(stop - start);
    for (std::size_t r = start; r < stop; ++r) {
      const auto alpha = set[r];
      int axis = 0;
      while (alpha[axis] == 0) ++axis;
      std::copy(alpha.begin(), alpha.end(), probe.begin());
      --probe[axis];
      const std::size_t parent = lookup(probe) - prev_start;
      const auto& src = previous[parent];
      auto& dst = current[r - start];
      dst.assign(width, Wide(0));
      for (std::size_t c = 0; c < src.size(); ++c) {
        if (src[c] == 0) continue;
        dst[c] += src[c] * b[axis];
        for (int j = 0; j < d; ++j) {
          if (a[axis][j] != 0) dst[shift[c][j]] += src[c] * a[axis][j];
        }
      }
      Wide acc = 0;
      for (std::size_t c = 0; c < width; ++c) {
        if (dst[c] != 0) acc += dst[c] * base.values[c];
      }
      out.values[r] = det * acc;
    }
    previous = std::move(current);
    prev_start = start;
  }
  return out;
}

inline MomentTable standard_simplex_table(int dim, int degree) {
  std::vector<Wide> fact(degree + dim + 1);
  fact[0] = 1;
  for (std::size_t k = 1; k < fact.size(); ++k) fact[k] = fact[k - 1] * Wide(static_cast<int>(k));
  return fill_table(dim, degree, [&](std::span<const int> alpha) {
    Wide num = 1;
    int total = 0;
    for (int a : alpha) {
      num *= fact[a];
      total += a;
    }
    return num / fact[total + dim];
  });
}

inline MomentTable simplex_table(const shape::Simplex& s, int degree) {
  const int d = static_cast<int>(s.vertices.cols());
  Matrix edges(d, d);
  for (int i = 0; i < d; ++i) edges.col(i) = (s.vertices.row(i + 1) - s.vertices.row(0)).transpose();
  return pushforward(standard_simplex_table(d, degree), edges, s.vertices.row(0).transpose());
}

inline MomentTable cube_table(int dim, int degree, const std::vector<Wide>& lower, const std::vector<Wide>& upper) {
  std::vector<std::vector<Wide>> axis(dim);
  for (int i = 0; i < dim; ++i) axis[i] = interval_moments(lower[i], upper[i], degree);
  return fill_table(dim, degree, [&](std::span<const int> alpha) {
    Wide v = 1;
    for (int i = 0; i < dim; ++i) v *= axis[i][alpha[i]];
    return v;
  });
}

inline MomentTable exact_table(const Domain& domain, int degree, bool force_expansion);

inline MomentTable exact_table(const Domain& domain, int degree, bool force_expansion) {
  using namespace shape;
  const int d = domain.dim();
  return domain.visit(christoffel::detail::overloaded{
      [&](const Interval& s) {
        return cube_table(1, degree, {Wide(s.lower)}, {Wide(s.upper)});
      },
      [&](const Cube& s) {
        return cube_table(s.dim, degree, std::vector<Wide>(s.dim, Wide(-1)), std::vector<Wide>(s.dim, Wide(1)));
      },
      [&](const BallP& s) {
        if (s.is_cube()) {
          return cube_table(s.dim, degree, std::vector<Wide>(s.dim, Wide(-1)), std::vector<Wide>(s.dim, Wide(1)));
        }
        return dirichlet_table(s.dim, Wide(s.p), degree, -1);
      },
      [&](const Simplex& s) { return simplex_table(s, degree); },
      [&](const SimplexUnion& s) {
        MomentTable sum = simplex_table(s.simplices.front(), degree);
        for (std::size_t i = 1; i < s.simplices.size(); ++i) {
          const auto t = simplex_table(s.simplices[i], degree);
          for (std::size_t k = 0; k < sum.values.size(); ++k) sum.values[k] += t.values[k];
        }
        return sum;
      },
      [&](const HalfBall& s) { return dirichlet_table(s.dim, Wide(2), degree, s.dim - 1); },
      [&](const ConeDisk&) {
        const auto disk = dirichlet_table(2, Wide(2), degree, -1);
        std::vector<Wide> fact(degree + 4);
        fact[0] = 1;
        for (std::size_t k = 1; k < fact.size(); ++k) fact[k] = fact[k - 1] * Wide(static_cast<int>(k));
        return fill_table(3, degree, [&](std::span<const int> alpha) {
          const int ab = alpha[0] + alpha[1];
          const int planar[2] = {alpha[0], alpha[1]};
          // integral of z^c (1-z)^{a+b+2} over [0,1]
          const Wide beta = fact[alpha[2]] * fact[ab + 2] / fact[ab + alpha[2] + 3];
          return disk.at(planar) * beta;
        });
      },
      [&](const Product& s) {
        std::vector<MomentTable> tables;
        for (const auto& f : s.factors) tables.push_back(exact_table(f, degree, force_expansion));
        return fill_table(d, degree, [&](std::span<const int> alpha) {
          Wide v = 1;
          int offset = 0;
          for (std::size_t f = 0; f < tables.size(); ++f) {
            const int fd = tables[f].dim;
            v *= tables[f].at(alpha.subspan(offset, fd));
            offset += fd;
          }
          return v;
        });
      },
      [&](const Affine& s) {
        if (!force_expansion) {
          if (s.base.kind() == ShapeKind::affine) {
            const auto& inner = std::get<Affine>(s.base.node().shape);
            return exact_table(Domain::affine_image(s.map.compose(inner.map), inner.base), degree, false);
          }
          if (s.base.kind() == ShapeKind::simplex || s.base.kind() == ShapeKind::simplex_union) {
            std::vector<Matrix> mapped;
            if (s.base.kind() == ShapeKind::simplex) {
              mapped.push_back(std::get<Simplex>(s.base.node().shape).vertices);
            } else {
              for (const auto& m : std::get<SimplexUnion>(s.base.node().shape).simplices) mapped.push_back(m.vertices);
            }
            for (auto& v : mapped) v = (v * s.map.matrix().transpose()).rowwise() + s.map.offset().transpose();
            return exact_table(Domain::simplex_union(mapped, true), degree, false);
          }
        }
        return pushforward(exact_table(s.base, degree, force_expansion), s.map.matrix(), s.map.offset());
      },
  });
}

/// Coefficients E[j][a] of the orthonormal Legendre polynomial phi_j(s x + t) in powers of x.
inline std::vector<std::vector<Wide>> legendre_in_powers(int degree, const Wide& s, const Wide& t) {
  std::vector<std::vector<Wide>> p(degree + 1, std::vector<Wide>(degree + 1, Wide(0)));
  p[0][0] = 1;
  if (degree >= 1) {
    p[1][0] = t;
    p[1][1] = s;
  }
  for (int j = 1; j < degree; ++j) {
    // (j+1) P_{j+1} = (2j+1) u P_j - j P_{j-1}, u = s x + t
    for (int a = 0; a <= j + 1; ++a) {
      Wide v = 0;
      if (a <= j) v += t * p[j][a];
      if (a >= 1) v += s * p[j][a - 1];
      v *= (2 * j + 1);
      if (a <= j - 1) v -= j * p[j - 1][a];
      p[j + 1][a] = v / (j + 1);
    }
  }
  for (int j = 0; j <= degree; ++j) {
    const Wide scale = sqrt(Wide(2 * j + 1) / 2);
    for (auto& c : p[j]) c *= scale;
  }
  return p;
}

}  // namespace moments_detail

/// Moment oracle for one domain. Exact modes evaluate closed forms; `sampled` uses a
/// seeded Halton set in the bounding box with membership filtering.
class MomentEngine {
 public:
  explicit MomentEngine(Domain domain, MomentMode mode = MomentMode::exact, SamplingConfig sampling = {})
      : domain_(std::move(domain)), mode_(mode), sampling_(sampling) {
    if (mode_ == MomentMode::gauss_box && !box_exact(domain_)) {
      throw DomainError("gauss_box moments need a box-shaped domain");
    }
  }

  const Domain& domain() const { return domain_; }
  MomentMode mode() const { return mode_; }
  const SamplingConfig& sampling() const { return sampling_; }

  /// Interval, cube, cube-like lp ball, products of these.
  static bool box_exact(const Domain& d) {
    switch (d.kind()) {
      case ShapeKind::interval:
      case ShapeKind::cube: return true;
      case ShapeKind::ball_p: return std::get<shape::BallP>(d.node().shape).is_cube();
      case ShapeKind::product:
        for (const auto& f : std::get<shape::Product>(d.node().shape).factors) {
          if (!box_exact(f)) return false;
        }
        return true;
      default: return false;
    }
  }

  bool is_exact() const { return mode_ != MomentMode::sampled; }

  /// All moments up to `degree`; cached up to the largest degree requested so far.
  std::shared_ptr<const MomentTable> table(int degree) const {
    if (!is_exact()) throw DomainError("moment table requires an exact mode");
    std::lock_guard lock(mutex_);
    if (!cache_ || cache_->degree < degree) {
      cache_ = std::make_shared<const MomentTable>(
          moments_detail::exact_table(domain_, degree, mode_ == MomentMode::mapped_exact));
    }
    return cache_;
  }

  Wide exact_moment(std::span<const int> alpha) const {
    require_dim(domain_.dim(), static_cast<Eigen::Index>(alpha.size()), "moment multi-index");
    int total = 0;
    for (int a : alpha) {
      if (a < 0) throw DomainError("moment: negative exponent");
      total += a;
    }
    return table(total)->at(alpha);
  }

  MomentValue moment(std::span<const int> alpha) const {
    if (is_exact()) {
      const Wide v = exact_moment(alpha);
      const double value = v.convert_to<double>();
      return {value, std::abs(value) * 1e-30};
    }
    require_dim(domain_.dim(), static_cast<Eigen::Index>(alpha.size()), "moment multi-index");
    const auto& pts = sample_points();
    const Box box = domain_.bounding_box();
    const double box_volume = box.volume();
    const double total = static_cast<double>(sampling_.count);
    double sum = 0.0, sum_sq = 0.0;
    for (const auto& x : pts) {
      double v = 1.0;
      for (std::size_t i = 0; i < alpha.size(); ++i) v *= std::pow(x[static_cast<Eigen::Index>(i)], alpha[i]);
      sum += v;
      sum_sq += v * v;
    }
    const double mean = sum / total;
    const double var = std::max(0.0, sum_sq / total - mean * mean);
    return {box_volume * mean, box_volume * std::sqrt(var / total)};
  }

  MomentValue moment(std::initializer_list<int> alpha) const {
    std::vector<int> a(alpha);
    return moment(std::span<const int>(a));
  }

  /// Accepted sample points (sampled mode).
  const std::vector<Vector>& sample_points() const {
    std::lock_guard lock(mutex_);
    if (!samples_) {
      auto pts = std::make_shared<std::vector<Vector>>();
      const Box box = domain_.bounding_box();
      sampling::Halton halton(domain_.dim(), sampling_.seed);
      for (std::size_t i = 1; i <= sampling_.count; ++i) {
        Vector u = halton.point(i);
        Vector x = box.lower + (box.upper - box.lower).cwiseProduct(u);
        if (domain_.contains(x)) pts->push_back(std::move(x));
      }
      samples_ = std::move(pts);
    }
    return *samples_;
  }

 private:
  Domain domain_;
  MomentMode mode_;
  SamplingConfig sampling_;
  mutable std::mutex mutex_;
  mutable std::shared_ptr<const MomentTable> cache_;
  mutable std::shared_ptr<const std::vector<Vector>> samples_;
};

/// nu(j) = integral over the domain of prod_i phi_{j_i}(u_i(x_i)), |j| <= degree, where u maps
/// the box onto [-1,1]^d and phi_k is the orthonormal Legendre polynomial.
inline std::vector<Quad> legendre_moments(const MomentEngine& engine, const Box& box, int degree) {
  const int d = engine.domain().dim();
  const auto table = engine.table(degree);
  std::vector<std::vector<std::vector<Wide>>> factors(d);
  for (int i = 0; i < d; ++i) {
    const Wide lo(box.lower[i]), hi(box.upper[i]);
    const Wide s = Wide(2) / (hi - lo);
    const Wide t = -(hi + lo) / (hi - lo);
    factors[i] = moments_detail::legendre_in_powers(degree, s, t);
  }
  std::vector<Wide> values(table->values.begin(),
                           table->values.begin() + static_cast<std::ptrdiff_t>(basis_dimension(d, degree)));
  const auto nu = moments_detail::axis_transform(d, degree, std::move(values), factors);
  std::vector<Quad> out(nu.size());
  for (std::size_t k = 0; k < nu.size(); ++k) out[k] = nu[k].convert_to<Quad>();
  return out;
}

}  // namespace christoffel

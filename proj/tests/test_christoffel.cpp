#include <gtest/gtest.h>

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <numbers>
#include <random>

#include "christoffel/christoffel.hpp"

using namespace christoffel;
using Rational = boost::multiprecision::cpp_rational;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

/// C(P_n, [-1,1], x) from the monomial Gram matrix inverted in exact rational arithmetic.
Rational interval_oracle(int n, const Rational& x) {
  const int m = n + 1;
  std::vector<std::vector<Rational>> a(m, std::vector<Rational>(m + 1));
  Rational power = 1;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) a[i][j] = (i + j) % 2 ? Rational(0) : Rational(2, i + j + 1);
    a[i][m] = power;
    power *= x;
  }
  // solve G c = b(x) by Gauss-Jordan; the result is b(x)^T c
  for (int c = 0; c < m; ++c) {
    int p = c;
    while (a[p][c] == 0) ++p;
    std::swap(a[p], a[c]);
    for (int r = 0; r < m; ++r) {
      if (r == c || a[r][c] == 0) continue;
      const Rational f = a[r][c] / a[c][c];
      for (int k = c; k <= m; ++k) a[r][k] -= f * a[c][k];
    }
  }
  Rational out = 0;
  power = 1;
  for (int i = 0; i < m; ++i) {
    out += power * a[i][m] / a[i][i];
    power *= x;
  }
  return out;
}

ChristoffelEvaluator make(const Domain& d, int n, BasisKind kind = BasisKind::tensor_legendre) {
  GramOptions o;
  o.basis = kind;
  return ChristoffelEvaluator(d, n, o);
}

}  // namespace

TEST(Christoffel, IntervalMatchesRationalOracle) {
  const Domain interval = Domain::interval(-1, 1);
  for (int n = 0; n <= 10; ++n) {
    const auto ev = make(interval, n);
    for (const Rational& x : {Rational(1), Rational(-1), Rational(1, 3), Rational(-7, 10), Rational(0)}) {
      const double ref = interval_oracle(n, x).convert_to<double>();
      EXPECT_NEAR(ev.christoffel_at(Vector::Constant(1, x.convert_to<double>())) / ref, 1.0, 1e-13) << n;
    }
  }
}

TEST(Christoffel, IntervalEndpointLaw) {
  const Domain interval = Domain::interval(-1, 1);
  for (int n = 1; n <= 28; ++n) {
    const auto ev = make(interval, n);
    const double expected = (n + 1.0) * (n + 1.0) / 2.0;
    EXPECT_NEAR(ev.christoffel_at(Vector::Constant(1, 1.0)) / expected, 1.0, 1e-10);
    EXPECT_NEAR(ev.christoffel_at(Vector::Constant(1, -1.0)) / expected, 1.0, 1e-10);
  }
  EXPECT_NEAR(make(interval, 5).nikolskii_ratio(), 6.0 / std::sqrt(2.0), 1e-10);
}

TEST(Christoffel, DiskDegreeOne) {
  const auto ev = make(Domain::ball_p(2, 2.0), 1);
  EXPECT_NEAR(ev.christoffel_at(vec({1, 0})), 5.0 / std::numbers::pi, 1e-13);
  EXPECT_NEAR(ev.christoffel_at(vec({0, 0})), 1.0 / std::numbers::pi, 1e-13);
}

TEST(Christoffel, DegreeZeroIsReciprocalVolume) {
  for (const auto& d : {Domain::cube(3), Domain::ball_p(2, 1.5), Domain::cone_disk(), Domain::half_ball(2)}) {
    const auto ev = make(d, 0);
    const Vector x = Vector::Constant(d.dim(), 0.3);
    EXPECT_NEAR(ev.christoffel_at(x) * d.volume(), 1.0, 1e-13);
    EXPECT_NEAR(ev.kernel_at(x, Vector::Constant(d.dim(), -2.0)) * d.volume(), 1.0, 1e-13);
    EXPECT_NEAR(ev.nikolskii_ratio(), 1.0 / std::sqrt(d.volume()), 1e-12);
  }
}

TEST(Christoffel, KnownMaxima) {
  // disk: (n+1)(n+2)(2n+3) / (6 pi) on the circle; square: value at a vertex
  EXPECT_NEAR(make(Domain::ball_p(2, 2.0), 4).christoffel_max().value, 17.507043740108486, 1e-10);
  EXPECT_NEAR(make(Domain::ball_p(2, 2.0), 6).christoffel_max().value, 44.563384065730695, 1e-10);
  const auto sq = make(Domain::cube(2), 4).christoffel_max();
  EXPECT_NEAR(sq.value, 38.75, 1e-10);
  EXPECT_NEAR(std::abs(sq.argmax[0]), 1.0, 1e-12);
  EXPECT_NEAR(std::abs(sq.argmax[1]), 1.0, 1e-12);
  EXPECT_NEAR(make(Domain::cube(2), 6).christoffel_max().value, 133.0, 1e-9);
}

TEST(Christoffel, MaxReportDominatesTrace) {
  const auto r = make(Domain::half_ball(3), 4).christoffel_max();
  EXPECT_GT(r.candidates_examined, 0u);
  for (const auto& t : r.trace) EXPECT_LE(t.value, r.value * (1 + 1e-12));
  // the argmax sits on the equator circle
  EXPECT_NEAR(r.argmax.head(2).norm(), 1.0, 1e-6);
  EXPECT_NEAR(r.argmax[2], 0.0, 1e-6);
}

TEST(Christoffel, KernelSymmetryAndDiagonal) {
  const auto ev = make(Domain::simplex((Matrix(3, 2) << 0, 0, 1, 0, 0, 1).finished()), 5);
  const Vector x = vec({0.2, 0.3}), y = vec({0.7, 0.1});
  EXPECT_NEAR(ev.kernel_at(x, y), ev.kernel_at(y, x), 1e-12);
  EXPECT_NEAR(ev.kernel_at(x, x) / ev.christoffel_at(x), 1.0, 1e-13);
  EXPECT_NEAR(ev.kernel_polynomial(x)(y), ev.kernel_at(x, y), 1e-9);
  EXPECT_NEAR(ev.christoffel_fast(x) / ev.christoffel_at(x), 1.0, 1e-9);
}

TEST(Christoffel, ExtremalPolynomial) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g;
  for (const auto& d : {Domain::ball_p(2, 2.0), Domain::cube(3), Domain::cone_disk()}) {
    const auto ev = make(d, 4);
    const Vector x = d.star_center() + 0.3 * Vector::Ones(d.dim());
    const auto f = ev.extremal_polynomial(x);
    EXPECT_NEAR(f(x), 1.0, 1e-12);
    const double c = ev.christoffel_at(x);
    EXPECT_NEAR(ev.l2_squared(f.coefficients) * c, 1.0, 1e-10);
    // any other g with g(x) = 1 has a larger norm
    const Vector psi = f.basis.evaluate(x);
    for (int k = 0; k < 20; ++k) {
      Vector h(psi.size());
      for (Eigen::Index i = 0; i < h.size(); ++i) h[i] = g(rng);
      h -= (h.dot(psi) / psi.squaredNorm()) * psi;  // h(x) = 0
      EXPECT_GE(ev.l2_squared(f.coefficients + 0.1 * h), ev.l2_squared(f.coefficients) - 1e-10);
    }
  }
}

TEST(Christoffel, ReproducingPropertyThroughMoments) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g;
  const Domain d = Domain::ball_p(2, 1.5);
  const int n = 4;
  const auto ev = make(d, n, BasisKind::monomial);
  const MomentEngine engine(d);
  const auto& idx = ev.system().basis().indices();
  for (const Vector& x : {vec({0.1, 0.2}), vec({0.9, 0.0}), vec({-0.4, 0.6})}) {
    const Vector a = ev.kernel_polynomial(x).coefficients;
    Vector q(a.size());
    for (Eigen::Index i = 0; i < q.size(); ++i) q[i] = g(rng);
    double integral = 0.0;
    for (std::size_t i = 0; i < idx.size(); ++i) {
      for (std::size_t j = 0; j < idx.size(); ++j) {
        const std::vector<int> alpha{idx[i][0] + idx[j][0], idx[i][1] + idx[j][1]};
        integral += a[static_cast<Eigen::Index>(i)] * q[static_cast<Eigen::Index>(j)] *
                    engine.moment(std::span<const int>(alpha)).value;
      }
    }
    const double expected = ev.system().basis().evaluate(x).dot(q);
    EXPECT_NEAR(integral, expected, 1e-9 * std::max(1.0, std::abs(expected)));
  }
}

TEST(Christoffel, AffineCovariance) {
  const AffineMap t((Matrix(2, 2) << 1.5, 0.3, -0.2, 0.8).finished(), vec({2, -1}));
  const Domain base = Domain::simplex((Matrix(3, 2) << 0, 0, 1, 0, 0, 1).finished());
  const auto e1 = make(base, 6);
  const auto e2 = make(geometry::apply_affine(t, base), 6);
  for (const Vector& x : {vec({0.1, 0.1}), vec({1, 0}), vec({0.3, 0.6})}) {
    EXPECT_NEAR(e2.christoffel_at(t(x)) * t.abs_determinant() / e1.christoffel_at(x), 1.0, 1e-10);
  }
}

TEST(Christoffel, DomainMonotonicity) {
  const auto disk = make(Domain::ball_p(2, 2.0), 8);
  const auto square = make(Domain::cube(2), 8);
  for (const auto& x : sampling::ball_points(2, 200)) {
    EXPECT_GE(disk.christoffel_at(x), square.christoffel_at(x) - 1e-10);
  }
}

TEST(Christoffel, ProductSandwich) {
  const Domain a = Domain::ball_p(2, 2.0), b = Domain::interval(0, 1);
  const Domain ab = Domain::product({a, b});
  const int n = 6;
  const auto full = make(ab, n);
  const auto an = make(a, n), bn = make(b, n), ah = make(a, n / 2), bh = make(b, n / 2);
  for (const auto& x : {vec({0.2, 0.1, 0.5}), vec({1, 0, 1}), vec({0, -0.7, 0})}) {
    const Vector xa = x.head(2), xb = x.tail(1);
    const double c = full.christoffel_at(x);
    EXPECT_LE(ah.christoffel_at(xa) * bh.christoffel_at(xb), c * (1 + 1e-9));
    EXPECT_LE(c, an.christoffel_at(xa) * bn.christoffel_at(xb) * (1 + 1e-9));
  }
}

TEST(Christoffel, BoundaryFactor) {
  for (const auto& d : {Domain::ball_p(2, 2.0), Domain::cube(2), Domain::ball_p(3, 2.0)}) {
    const auto ev = make(d, 6);
    SearchConfig cfg;
    cfg.force_interior = true;
    const auto r = ev.christoffel_max(cfg);
    EXPECT_GT(r.interior_value, 0.0);
    EXPECT_LE(r.interior_value, std::pow(2.0, d.dim()) * r.boundary_value);
  }
}

TEST(Christoffel, RadialMonotonicityOnBall) {
  const auto ev = make(Domain::ball_p(2, 2.0), 10);
  const Vector dir = vec({0.6, 0.8});
  double prev = 0.0;
  for (double r = std::sqrt(0.5); r <= 1.0 + 1e-12; r += 0.01) {
    const double c = ev.christoffel_at(r * dir);
    EXPECT_GE(c, prev - 1e-10);
    prev = c;
  }
}

TEST(Christoffel, OutsidePointsAreLegal) {
  const auto ev = make(Domain::ball_p(2, 2.0), 3);
  const double inside = ev.christoffel_at(vec({1, 0}));
  EXPECT_GT(ev.christoffel_at(geometry::extension_point(3, 2)), inside);
}

TEST(Norms, L2AndInfinity) {
  const auto ev = make(Domain::cube(2), 3);
  const Vector x = vec({1, 1});
  const auto f = ev.extremal_polynomial(x);
  const double l2 = l_norm(ev.system(), f.coefficients, 2.0).value;
  const auto sup = l_norm(ev.system(), f.coefficients, std::numeric_limits<double>::infinity());
  EXPECT_TRUE(sup.lower_estimate);
  EXPECT_NEAR(sup.value / l2, std::sqrt(ev.christoffel_at(x)), 1e-8);
  // the L2 norm through sampling agrees with the quadratic form
  const auto sampled = l_norm(ev.system(), f.coefficients, 2.0 - 1e-12);
  EXPECT_NEAR(sampled.value, l2, 4 * sampled.std_error + 1e-6);
  EXPECT_THROW(l_norm(ev.system(), f.coefficients, 0.0), DomainError);
}

TEST(Norms, BootstrapChecks) {
  const auto ev = make(Domain::cube(2), 3);
  const Vector x = vec({1, -1});
  const auto f = ev.extremal_polynomial(x);
  const auto sharp = bootstrap_check(ev, f.coefficients, 2.0, std::numeric_limits<double>::infinity(), 1);
  EXPECT_TRUE(sharp.passed);
  EXPECT_NEAR(sharp.ratio / sharp.bound, 1.0, 1e-8);
  const auto same = bootstrap_check(ev, f.coefficients, 1.5, 1.5, 1);
  EXPECT_NEAR(same.ratio, 1.0, 1e-15);
  EXPECT_GE(same.bound, 1.0);
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g;
  Vector phi(f.coefficients.size());
  for (Eigen::Index i = 0; i < phi.size(); ++i) phi[i] = g(rng);
  const auto lifted = bootstrap_check(ev, phi, 1.0, std::numeric_limits<double>::infinity(), 2);
  EXPECT_TRUE(lifted.passed);
  EXPECT_GT(lifted.slack, 0.0);
  EXPECT_THROW(bootstrap_check(ev, phi, 3.0, 4.0, 1), DomainError);
  EXPECT_THROW(bootstrap_check(ev, phi, 2.0, 1.0, 1), DomainError);
}

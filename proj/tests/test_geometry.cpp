#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "christoffel/geometry.hpp"
#include "christoffel/sampling.hpp"

using namespace christoffel;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

Matrix triangle() { return (Matrix(3, 2) << 0, 0, 1, 0, 0, 1).finished(); }

std::vector<Domain> catalogue() {
  return {Domain::interval(-1, 2),
          Domain::cube(2),
          Domain::ball_p(2, 2.0),
          Domain::ball_p(2, 1.0),
          Domain::ball_p(2, 1.5),
          Domain::ball_p(3, 2.0),
          Domain::ball_p(3, 4.0),
          Domain::simplex(triangle()),
          Domain::half_ball(2),
          Domain::half_ball(3),
          Domain::cone_disk(),
          Domain::product({Domain::ball_p(2, 2.0), Domain::interval(0, 1)}),
          Domain::affine_image(AffineMap((Matrix(2, 2) << 2, 1, 0, 1).finished(), vec({1, -1})), Domain::cube(2))};
}

/// Hit-or-miss volume with a fixed Halton set, used as an independent oracle.
double sampled_volume(const Domain& d, int count) {
  const Box box = d.bounding_box();
  sampling::Halton h(d.dim(), 11);
  int hits = 0;
  for (int i = 1; i <= count; ++i) {
    const Vector x = box.lower + box.widths().cwiseProduct(h.point(static_cast<std::uint64_t>(i)));
    hits += d.contains(x);
  }
  return box.volume() * hits / count;
}

}  // namespace

TEST(Membership, CatalogueShapes) {
  EXPECT_TRUE(Domain::ball_p(2, 2.0).contains(vec({0.6, 0.8})));
  EXPECT_FALSE(Domain::ball_p(2, 2.0).contains(vec({0.6, 0.81})));
  EXPECT_TRUE(Domain::ball_p(2, 1.0).contains(vec({0.5, -0.5})));
  EXPECT_FALSE(Domain::ball_p(2, 1.0).contains(vec({0.5, 0.51})));
  EXPECT_TRUE(Domain::ball_p(2, std::numeric_limits<double>::infinity()).contains(vec({1, -1})));
  EXPECT_TRUE(Domain::half_ball(3).contains(vec({0, 0, 1})));
  EXPECT_FALSE(Domain::half_ball(3).contains(vec({0, 0, -0.01})));
  EXPECT_TRUE(Domain::cone_disk().contains(vec({0.5, 0, 0.5})));
  EXPECT_FALSE(Domain::cone_disk().contains(vec({0.5, 0, 0.51})));
  EXPECT_TRUE(Domain::simplex(triangle()).contains(vec({0.5, 0.5})));
  EXPECT_FALSE(Domain::simplex(triangle()).contains(vec({0.5, 0.51})));
  EXPECT_THROW(Domain::cube(2).contains(vec({0, 0, 0})), DimensionMismatch);
}

TEST(Volume, ClosedForms) {
  EXPECT_NEAR(Domain::interval(-1, 2).volume(), 3.0, 1e-15);
  EXPECT_NEAR(Domain::cube(3).volume(), 8.0, 1e-14);
  EXPECT_NEAR(Domain::ball_p(2, 2.0).volume(), std::numbers::pi, 1e-14);
  EXPECT_NEAR(Domain::ball_p(3, 2.0).volume(), 4.0 * std::numbers::pi / 3, 1e-13);
  EXPECT_NEAR(Domain::ball_p(2, 1.0).volume(), 2.0, 1e-14);
  EXPECT_NEAR(Domain::ball_p(2, 1.5).volume(), 2.7378536239189035, 1e-13);
  EXPECT_NEAR(Domain::simplex(triangle()).volume(), 0.5, 1e-15);
  EXPECT_NEAR(Domain::half_ball(3).volume(), 2.0 * std::numbers::pi / 3, 1e-13);
  EXPECT_NEAR(Domain::half_ball(2).volume(), std::numbers::pi / 2, 1e-14);
  EXPECT_NEAR(Domain::cone_disk().volume(), std::numbers::pi / 3, 1e-14);
}

TEST(Volume, AgreesWithSampling) {
  for (const auto& d : catalogue()) {
    EXPECT_NEAR(sampled_volume(d, 200000) / d.volume(), 1.0, 0.01) << d.describe();
  }
}

TEST(Volume, AffineScalesByDeterminant) {
  const AffineMap t((Matrix(3, 3) << 1, 2, 0, 0, 1, 0.5, -1, 0, 2).finished(), vec({0.3, 0, -1}));
  for (const auto& d : {Domain::ball_p(3, 2.0), Domain::half_ball(3), Domain::cone_disk(), Domain::cube(3)}) {
    EXPECT_NEAR(geometry::apply_affine(t, d).volume(), t.abs_determinant() * d.volume(), 1e-12 * d.volume());
  }
}

TEST(Affine, MembershipIsCovariant) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  const AffineMap t((Matrix(2, 2) << 0.7, -1.2, 0.4, 0.9).finished(), vec({2, -3}));
  const Domain base = Domain::ball_p(2, 1.5);
  const Domain image = geometry::apply_affine(t, base);
  int disagreements = 0;
  for (int i = 0; i < 10000; ++i) {
    const Vector x = vec({u(rng), u(rng)});
    // skip points numerically on the boundary
    if (base.contains(x, 1e-9) != base.contains(x, -1e-9)) continue;
    disagreements += base.contains(x) != image.contains(t(x));
  }
  EXPECT_EQ(disagreements, 0);
}

TEST(Affine, IdentityScalingInverseCompose) {
  const Domain d = Domain::cube(2);
  const Box b = geometry::apply_affine(AffineMap::identity(2), d).bounding_box();
  EXPECT_LT((b.lower - d.bounding_box().lower).norm(), 1e-15);
  const Box s = geometry::apply_affine(AffineMap::scaling(2, 2.0), d).bounding_box();
  EXPECT_NEAR(s.widths()[0], 4.0, 1e-15);
  EXPECT_NEAR(s.widths()[1], 4.0, 1e-15);
  const AffineMap t((Matrix(2, 2) << 1, 2, 3, 4).finished(), vec({1, 1}));
  const Vector x = vec({0.3, -0.7});
  EXPECT_LT((t.inverse()(t(x)) - x).norm(), 1e-14);
  EXPECT_LT((t.compose(t.inverse())(x) - x).norm(), 1e-14);
  EXPECT_NEAR(t.determinant(), -2.0, 1e-14);
  EXPECT_THROW(AffineMap((Matrix(2, 2) << 1, 2, 2, 4).finished(), vec({0, 0})), SingularMapError);
}

TEST(BoundingBox, ContainsDomain) {
  for (const auto& d : catalogue()) {
    const Box box = d.bounding_box();
    sampling::Halton h(d.dim(), 2);
    const Box wide{box.lower - 0.2 * box.widths(), box.upper + 0.2 * box.widths()};
    for (int i = 1; i <= 5000; ++i) {
      const Vector x = wide.lower + wide.widths().cwiseProduct(h.point(static_cast<std::uint64_t>(i)));
      if (d.contains(x)) {
        EXPECT_TRUE(((x - box.lower).array() >= -1e-12).all() && ((box.upper - x).array() >= -1e-12).all());
      }
    }
  }
}

TEST(BoundaryCandidates, LieOnTheBoundary) {
  for (const auto& d : catalogue()) {
    if (d.dim() == 1) continue;
    const Vector c = d.star_center();
    const auto cands = geometry::boundary_candidates(d, 64);
    EXPECT_FALSE(cands.sample.empty());
    for (const auto& p : cands.all()) {
      EXPECT_TRUE(d.contains(p, 1e-12)) << d.describe();
      const Vector dir = (p - c).normalized();
      EXPECT_TRUE(d.contains(p - 1e-9 * dir)) << d.describe();
      EXPECT_FALSE(d.contains(p + 1e-9 * dir)) << d.describe();
    }
  }
  EXPECT_THROW(geometry::boundary_candidates(Domain::cube(2), 4), DomainError);
}

TEST(ParallelSection, IntegratesToVolume) {
  for (double p : {1.0, 1.5, 2.0, 3.0}) {
    const Domain d = Domain::ball_p(2, p);
    const Vector xi = vec({-1, 0});
    const auto& rule = orthopoly::gauss_legendre(200);
    double acc = 0.0;
    // split at the midpoint where the closed form has an interior kink
    for (double a : {0.0, 1.0}) {
      for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double t = a + 0.5 * (rule.nodes[i] + 1.0);
        acc += 0.5 * rule.weights[i] * geometry::parallel_section(d, xi, t).value;
      }
    }
    EXPECT_NEAR(acc, d.volume(), 1e-6) << p;
  }
}

TEST(ParallelSection, PolytopeSlicesAndSampledPath) {
  const Domain tri = Domain::simplex(triangle());
  // the slice at height t along (1,1)/sqrt(2) has length 2t
  const Vector xi = vec({1, 1});
  EXPECT_NEAR(geometry::parallel_section(tri, xi, 0.5).value, 1.0, 1e-12);
  EXPECT_EQ(geometry::parallel_section(tri, xi, 2.0).value, 0.0);
  // half-ball sliced along x3: disk of radius sqrt(1 - t^2)
  const auto v = geometry::parallel_section(Domain::half_ball(3), vec({0, 0, 1}), 0.6, 40000);
  const double exact = std::numbers::pi * (1 - 0.36);
  EXPECT_LE(std::abs(v.value - exact), 3 * v.std_error + 1e-3);
}

TEST(SpecialMaps, ExtensionPoint) {
  const Vector v = geometry::extension_point(3, 2);
  EXPECT_NEAR(v[0], 1.0 + 1.0 / 27.0, 1e-15);
  EXPECT_EQ(v[1], 0.0);
  EXPECT_FALSE(Domain::ball_p(2, 2.0).contains(v));
}

TEST(SpecialMaps, HalfBallMapContainment) {
  for (int n : {1, 2, 5, 10, 50}) {
    const AffineMap t = geometry::half_ball_map(n);
    EXPECT_NEAR(t.abs_determinant(), 1.0 / (160.0 * n), 1e-15);
    EXPECT_LT((t(geometry::extension_point(n, 3)) - vec({1, 0, 0})).norm(), 1e-14);
    EXPECT_EQ(geometry::ellipsoid_premise_violations(Domain::half_ball(3), t), 0) << n;
  }
}

TEST(SpecialMaps, OversizedEllipsoidFails) {
  const AffineMap t = AffineMap::scaling(3, 1.01);
  EXPECT_GT(geometry::ellipsoid_premise_violations(Domain::ball_p(3, 2.0), t), 0);
}

TEST(SpecialMaps, LpConeConstants) {
  const auto c = geometry::lp_cone_constants(2, 1.5);
  EXPECT_NEAR(c.alpha, 0.001585705336645307, 1e-15);
  EXPECT_NEAR(c.beta, 0.32982671002222397, 1e-15);
  const auto c3 = geometry::lp_cone_constants(3, 1.25);
  EXPECT_NEAR(c3.alpha / 1.3419493670857367e-05, 1.0, 1e-12);
  EXPECT_THROW(geometry::lp_cone_constants(2, 2.5), DomainError);
}

TEST(SpecialMaps, LpConePremiseHolds) {
  for (auto [d, p] : {std::pair{2, 1.5}, std::pair{2, 1.2}, std::pair{3, 1.5}}) {
    const Domain ball = Domain::ball_p(d, p);
    const auto c = geometry::lp_cone_constants(d, p);
    for (const auto& dir : sampling::sphere_points(d, 12)) {
      const Vector x = geometry::radial_boundary_point(ball, Vector::Zero(d), dir);
      const Vector inward = -geometry::lp_outward_normal(x, p);
      EXPECT_EQ(geometry::cone_premise_violations(ball, x, inward, c.alpha, c.beta, 1.0 / p, 30, 8), 0);
    }
  }
}

TEST(SpecialMaps, RotationTakesMinusE1ToTarget) {
  for (const auto& u : sampling::sphere_points(3, 20)) {
    const Matrix r = geometry::rotation_to(u);
    EXPECT_LT((r.transpose() * r - Matrix::Identity(3, 3)).norm(), 1e-13);
    EXPECT_NEAR(r.determinant(), 1.0, 1e-13);
    EXPECT_LT((r * vec({-1, 0, 0}) - u).norm(), 1e-13);
  }
}

TEST(SpecialMaps, ContainedConeMapStaysInside) {
  const Domain ball = Domain::ball_p(2, 1.5);
  const auto c = geometry::lp_cone_constants(2, 1.5);
  const Vector x = geometry::radial_boundary_point(ball, Vector::Zero(2), vec({1, 1}).normalized());
  const Vector inward = -geometry::lp_outward_normal(x, 1.5);
  for (int n : {1, 4, 16}) {
    const auto t = geometry::contained_cone_map(x, inward, c.alpha, c.beta, 1.0 / 1.5, n);
    EXPECT_EQ(geometry::ellipsoid_premise_violations(ball, t, 4000), 0);
    EXPECT_LT((t(geometry::extension_point(n, 2)) - x).norm(), 1e-14);
  }
}

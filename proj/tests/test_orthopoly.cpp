#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "christoffel/orthopoly.hpp"

using namespace christoffel;
using namespace christoffel::orthopoly;

TEST(Legendre, MatchesExplicitPolynomials) {
  for (double x : {-1.0, -0.7, -0.1, 0.0, 0.35, 0.9, 1.0, 1.3}) {
    EXPECT_NEAR(legendre(2, x), 0.5 * (3 * x * x - 1), 1e-15);
    EXPECT_NEAR(legendre(3, x), 0.5 * (5 * x * x * x - 3 * x), 1e-15);
    EXPECT_NEAR(legendre(5, x), (63 * std::pow(x, 5) - 70 * std::pow(x, 3) + 15 * x) / 8, 1e-14);
  }
}

TEST(Legendre, NormalizedEndpointValue) {
  for (int k = 0; k <= 40; ++k) {
    EXPECT_NEAR(legendre_normalized(k, 1.0), std::sqrt((2 * k + 1) / 2.0), 1e-13);
    EXPECT_NEAR(std::abs(legendre_normalized(k, -1.0)), std::sqrt((2 * k + 1) / 2.0), 1e-13);
  }
}

TEST(Legendre, TableMatchesSingleEvaluations) {
  std::vector<double> table(21);
  legendre_normalized_table<double>(20, 0.37, std::span<double>(table));
  for (int k = 0; k <= 20; ++k) EXPECT_NEAR(table[k], legendre_normalized(k, 0.37), 1e-14);
}

TEST(Gauss, TwoPointRule) {
  const auto& rule = gauss_legendre(2);
  ASSERT_EQ(rule.nodes.size(), 2u);
  const double a = 1.0 / std::sqrt(3.0);
  EXPECT_NEAR(std::min(rule.nodes[0], rule.nodes[1]), -a, 1e-15);
  EXPECT_NEAR(std::max(rule.nodes[0], rule.nodes[1]), a, 1e-15);
  EXPECT_NEAR(rule.weights[0], 1.0, 1e-15);
}

TEST(Gauss, ExactForDegreeUpTo2qMinus1) {
  for (int q : {1, 3, 7, 20, 41}) {
    const auto& rule = gauss_legendre(q);
    for (int k = 0; k <= 2 * q - 1; ++k) {
      double acc = 0.0;
      for (std::size_t i = 0; i < rule.nodes.size(); ++i) acc += rule.weights[i] * std::pow(rule.nodes[i], k);
      const double exact = k % 2 ? 0.0 : 2.0 / (k + 1);
      EXPECT_NEAR(acc, exact, 1e-13) << "q=" << q << " k=" << k;
    }
  }
  EXPECT_THROW(gauss_legendre(0), DomainError);
}

TEST(Jacobi, EndpointIdentityGammaForm) {
  for (double beta : {0.0, 0.5, 1.0, 1.5, 2.0}) {
    for (int m = 0; m <= 30; ++m) {
      const double oracle = std::tgamma(m + beta + 1) / (std::tgamma(m + 1) * std::tgamma(beta + 1));
      const double value = std::abs(jacobi_at(JacobiParams(0.0, beta), m, -1.0));
      EXPECT_NEAR(value / oracle, 1.0, 1e-10) << "beta=" << beta << " m=" << m;
      EXPECT_NEAR(jacobi_endpoint_magnitude(JacobiParams(0.0, beta), m) / oracle, 1.0, 1e-12);
    }
  }
}

TEST(Jacobi, LegendreSpecialCase) {
  for (int m = 0; m <= 12; ++m) {
    EXPECT_NEAR(jacobi_at(JacobiParams(0, 0), m, 0.3), legendre(m, 0.3), 1e-14);
    EXPECT_NEAR(jacobi_norm(JacobiParams(0, 0), m), std::sqrt(2.0 / (2 * m + 1)), 1e-14);
  }
}

TEST(Jacobi, OrthogonalityWithLinearWeight) {
  // weight (1 + x): Gauss-Legendre integrates the degree <= 2m+1 products exactly
  const JacobiParams params(0.0, 1.0);
  const auto& rule = gauss_legendre(20);
  for (int a = 0; a <= 8; ++a) {
    for (int b = 0; b <= 8; ++b) {
      double acc = 0.0;
      for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double x = rule.nodes[i];
        acc += rule.weights[i] * (1 + x) * jacobi_at(params, a, x) * jacobi_at(params, b, x);
      }
      const double expected = a == b ? std::pow(jacobi_norm(params, a), 2) : 0.0;
      EXPECT_NEAR(acc, expected, 1e-13);
    }
  }
  EXPECT_THROW(JacobiParams(-1.0, 0.0), DomainError);
}

TEST(Rho, ValuesAndDomain) {
  EXPECT_DOUBLE_EQ(rho(4, 1.0), 1.0 / 16);
  EXPECT_DOUBLE_EQ(rho(2, 0.0), 0.25 + 0.5);
  EXPECT_THROW(rho(3, 1.5), DomainError);
  EXPECT_THROW(rho(0, 0.0), DomainError);
}

TEST(Chebyshev, CellContainsPointAndZero) {
  for (int k : {1, 2, 5, 16, 64}) {
    for (int i = 0; i <= 200; ++i) {
      const double y = -1.0 + 2.0 * i / 200.0;
      const auto cell = chebyshev_cell(k, y);
      EXPECT_LE(cell.left, y);
      EXPECT_GE(cell.right, y);
      EXPECT_LT(cell.left, cell.zero);
      EXPECT_GT(cell.right, cell.zero);
    }
  }
  // shared node goes to the smaller index
  const auto cell = chebyshev_cell(4, 0.0);
  EXPECT_EQ(cell.j, 2);
}

TEST(KernelPolynomial, UnitValueAndDegree) {
  for (int n : {1, 5, 20, 63}) {
    for (int m : {1, 2, 4}) {
      if (m > n) continue;
      for (double y : {-1.0, -0.3, 0.0, 0.77, 1.0}) {
        const KernelPolynomial p(n, m, y);
        EXPECT_NEAR(p(y), 1.0, 1e-13);
        EXPECT_NEAR(std::pow(p.t(y) / p.t(y), m), 1.0, 1e-13);
        EXPECT_LE(p.degree(), n);
      }
    }
  }
}

TEST(KernelPolynomial, CellBoundsOnT) {
  for (int n = 1; n <= 63; n += 7) {
    for (int i = 0; i <= 40; ++i) {
      const double y = -1.0 + 2.0 * i / 40.0;
      const KernelPolynomial p(n, 1, y);
      const auto& cell = p.cell();
      for (int s = 0; s <= 100; ++s) {
        const double x = cell.left + cell.width() * s / 100.0;
        const double t = std::abs(p.t(x));
        EXPECT_GT(t, 4.0 / 3.0) << "n=" << n << " y=" << y << " x=" << x;
        EXPECT_LT(t, 4.0);
      }
    }
  }
}

TEST(KernelPolynomial, DecayConstantIsFinite) {
  for (int m : {1, 2, 4}) {
    const double c = kernel_decay_constant(KernelPolynomial(40, m, 0.3));
    EXPECT_GT(c, 0.0);
    EXPECT_TRUE(std::isfinite(c));
  }
}

TEST(Lacunary, MatchesQuadrupleCount) {
  for (int n = 1; n <= 10; ++n) {
    // E|f|^4 counts (a,b,c,d) with 2^a + 2^b = 2^c + 2^d
    long count = 0;
    for (int a = 1; a <= n; ++a)
      for (int b = 1; b <= n; ++b)
        for (int c = 1; c <= n; ++c)
          for (int d = 1; d <= n; ++d) count += ((1L << a) + (1L << b)) == ((1L << c) + (1L << d));
    EXPECT_NEAR(lacunary_l4(n), static_cast<double>(count), 1e-8);
    EXPECT_EQ(count, 2L * n * n - n);
  }
  EXPECT_THROW(lacunary_l4(40), CapacityError);
}

TEST(Linearization, MatchesQuadrature) {
  const int n = 9;
  const LegendreLinearization<double> lin(n);
  const auto& rule = gauss_legendre(2 * n + 2);
  for (int k = 0; k <= n; ++k) {
    for (int l = 0; l <= n; ++l) {
      const auto coeffs = lin.coefficients(k, l);
      for (int r = 0; r <= std::min(k, l); ++r) {
        const int j = k + l - 2 * r;
        double acc = 0.0;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
          const double x = rule.nodes[i];
          acc += rule.weights[i] * legendre_normalized(k, x) * legendre_normalized(l, x) * legendre_normalized(j, x);
        }
        EXPECT_NEAR(coeffs[r], acc, 1e-13) << k << " " << l << " " << r;
      }
    }
  }
}

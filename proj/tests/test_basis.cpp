#include <gtest/gtest.h>

#include <set>

#include "christoffel/basis.hpp"
#include "christoffel/orthopoly.hpp"

using namespace christoffel;

namespace {

std::vector<std::vector<int>> as_lists(const MultiIndexSet& set) {
  std::vector<std::vector<int>> out;
  for (std::size_t k = 0; k < set.size(); ++k) out.emplace_back(set[k].begin(), set[k].end());
  return out;
}

long binomial(int n, int k) {
  long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

TEST(MultiIndex, GradedLexOrderInTwoDimensions) {
  const auto set = enumerate_indices(2, 2);
  const std::vector<std::vector<int>> expected{{0, 0}, {0, 1}, {1, 0}, {0, 2}, {1, 1}, {2, 0}};
  EXPECT_EQ(as_lists(set), expected);
}

TEST(MultiIndex, CountMatchesBinomial) {
  for (int d = 1; d <= 4; ++d) {
    for (int n = 0; n <= 8; ++n) {
      EXPECT_EQ(enumerate_indices(d, n).size(), static_cast<std::size_t>(binomial(n + d, d))) << d << " " << n;
      EXPECT_EQ(basis_dimension(d, n), static_cast<std::size_t>(binomial(n + d, d)));
    }
  }
}

TEST(MultiIndex, OrderIsStrictAndRankInvertsEnumeration) {
  const auto set = enumerate_indices(3, 6);
  const auto lists = as_lists(set);
  for (std::size_t k = 1; k < lists.size(); ++k) {
    int a = 0, b = 0;
    for (int v : lists[k - 1]) a += v;
    for (int v : lists[k]) b += v;
    EXPECT_TRUE(a < b || (a == b && lists[k - 1] < lists[k]));
  }
  for (std::size_t k = 0; k < set.size(); ++k) EXPECT_EQ(set.rank(set[k]), k);
  std::set<std::vector<int>> unique(lists.begin(), lists.end());
  EXPECT_EQ(unique.size(), lists.size());
}

TEST(MultiIndex, DegreeZeroIsConstantOnly) {
  const auto set = enumerate_indices(3, 0);
  ASSERT_EQ(set.size(), 1u);
  EXPECT_EQ(as_lists(set)[0], (std::vector<int>{0, 0, 0}));
}

TEST(MultiIndex, CapIsEnforced) {
  EXPECT_THROW(enumerate_indices(3, 60), CapacityError);
  EXPECT_THROW(enumerate_indices(2, 5, 20), CapacityError);
  EXPECT_NO_THROW(enumerate_indices(2, 5, 21));
}

TEST(Basis, MonomialValues) {
  Box box{Vector::Constant(2, -1.0), Vector::Constant(2, 1.0)};
  const BasisSpec spec(BasisKind::monomial, box, enumerate_indices(2, 2));
  Vector x(2);
  x << 0.5, -2.0;
  const Vector v = spec.evaluate(x);
  const Vector expected = (Vector(6) << 1.0, -2.0, 0.5, 4.0, -1.0, 0.25).finished();
  EXPECT_LT((v - expected).norm(), 1e-15);
}

TEST(Basis, LegendreBasisIsOrthonormalOnItsBox) {
  Box box{(Vector(2) << -1.0, 0.0).finished(), (Vector(2) << 3.0, 0.5).finished()};
  const int n = 5;
  const BasisSpec spec(BasisKind::tensor_legendre, box, enumerate_indices(2, n));
  const auto& rule = orthopoly::gauss_legendre(n + 1);
  Matrix gram = Matrix::Zero(static_cast<Eigen::Index>(spec.size()), static_cast<Eigen::Index>(spec.size()));
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
      Vector x(2);
      x << 1.0 + 2.0 * rule.nodes[i], 0.25 + 0.25 * rule.nodes[j];
      const double w = 2.0 * rule.weights[i] * 0.25 * rule.weights[j];
      const Vector v = spec.evaluate(x);
      gram += w * v * v.transpose();
    }
  }
  EXPECT_LT((gram - Matrix::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(Basis, EvalBasisRowsMatchPointwiseEvaluation) {
  Box box{Vector::Constant(3, -1.0), Vector::Constant(3, 1.0)};
  const BasisSpec spec(BasisKind::tensor_legendre, box, enumerate_indices(3, 4));
  Matrix pts(4, 3);
  pts << 0.1, 0.2, 0.3, -1, 1, 0, 0.5, -0.5, 0.25, 2, 0, -3;
  const Matrix values = eval_basis(spec, pts);
  ASSERT_EQ(values.rows(), 4);
  ASSERT_EQ(values.cols(), static_cast<Eigen::Index>(spec.size()));
  for (Eigen::Index r = 0; r < 4; ++r) {
    EXPECT_LT((values.row(r).transpose() - spec.evaluate(Vector(pts.row(r).transpose()))).norm(), 1e-14);
  }
}

TEST(Basis, DimensionMismatchIsReported) {
  Box box{Vector::Constant(2, -1.0), Vector::Constant(2, 1.0)};
  const BasisSpec spec(BasisKind::monomial, box, enumerate_indices(2, 3));
  EXPECT_THROW(spec.evaluate(Vector::Zero(3)), DimensionMismatch);
}

TEST(Basis, QuadAndDoubleEvaluationsAgree) {
  Box box{Vector::Constant(2, -1.0), Vector::Constant(2, 2.0)};
  const BasisSpec spec(BasisKind::tensor_legendre, box, enumerate_indices(2, 12));
  const std::vector<Quad> xq{Quad(0.3), Quad(1.7)};
  std::vector<Quad> out(spec.size());
  spec.evaluate<Quad>(std::span<const Quad>(xq), std::span<Quad>(out));
  const Vector v = spec.evaluate((Vector(2) << 0.3, 1.7).finished());
  for (std::size_t k = 0; k < out.size(); ++k) {
    EXPECT_NEAR(to_double(out[k]), v[static_cast<Eigen::Index>(k)], 1e-12 * (1 + std::abs(v[static_cast<Eigen::Index>(k)])));
  }
}

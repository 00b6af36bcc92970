#include "lhr/colsel.hpp"
#include "lhr/graph.hpp"

#include "test_util.hpp"

#include <gtest/gtest.h>

#include <numeric>

using namespace lhr;
using lhr::testing::random_matrix;

namespace {

/// Descending eigenvalues of (X W^{1/2})^T (X W^{1/2}).
Eigen::VectorXd sigma_desc(const Eigen::MatrixXd& X, const Eigen::VectorXd& w) {
  Eigen::MatrixXd Y = X * w.cwiseSqrt().asDiagonal();
  Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(Y.transpose() * Y).eigenvalues();
  return ev.reverse();
}

double tail(const Eigen::VectorXd& s, int from) {
  double t = 0.0;
  for (int i = from; i < s.size(); ++i) t += std::max(0.0, s(i));
  return t;
}

/// Residual by normal equations on the selected columns, independent of the library's QR path.
double naive_distance(const Eigen::MatrixXd& X, const std::vector<int>& S, const Eigen::VectorXd& w) {
  Eigen::MatrixXd R = X;
  if (!S.empty()) {
    Eigen::MatrixXd B(X.rows(), S.size());
    for (std::size_t i = 0; i < S.size(); ++i) B.col(i) = X.col(S[i]);
    Eigen::MatrixXd P = B * (B.transpose() * B).completeOrthogonalDecomposition().pseudoInverse() * B.transpose();
    R = X - P * X;
  }
  double d = 0.0;
  for (int u = 0; u < X.cols(); ++u) d += w(u) * R.col(u).squaredNorm();
  return d;
}

}  // namespace

TEST(ProjectOut, Examples) {
  Eigen::MatrixXd I = Eigen::MatrixXd::Identity(3, 3);
  Eigen::MatrixXd R = project_out(I, {0});
  Eigen::MatrixXd want = I;
  want(0, 0) = 0.0;
  EXPECT_TRUE(R.isApprox(want, 1e-12));

  Eigen::MatrixXd same = Eigen::Vector3d(1, 2, 3) * Eigen::RowVector4d::Ones();
  EXPECT_LE(project_out(same, {2}).norm(), 1e-12);

  Eigen::MatrixXd X = random_matrix(5, 5, 3);
  EXPECT_LE(project_out(X, {0, 1, 2, 3, 4}).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(ProjectionDistance, Examples) {
  Eigen::MatrixXd I = Eigen::MatrixXd::Identity(3, 3);
  EXPECT_NEAR(projection_distance(I, {0}), 2.0, 1e-12);
  Eigen::MatrixXd X = random_matrix(3, 6, 9);
  EXPECT_NEAR(projection_distance(X, {0, 1, 2}), 0.0, 1e-10);
  Eigen::MatrixXd Y = random_matrix(6, 6, 10);
  EXPECT_NEAR(projection_distance(Y, {1, 4}), project_out(Y, {1, 4}).squaredNorm(), 1e-10);
}

TEST(ProjectionDistance, AgreesWithNormalEquations) {
  for (std::uint64_t s = 0; s < 30; ++s) {
    const int rows = 2 + s % 5, cols = 3 + s % 6;
    Eigen::MatrixXd X = random_matrix(rows, cols, 50 + s);
    Eigen::VectorXd w = (random_matrix(cols, 1, 80 + s).array().abs() + 0.1).matrix();
    std::vector<int> S;
    for (int c = 0; c < cols; c += 2) S.push_back(c);
    S.resize(std::min<std::size_t>(S.size(), rows - 1 > 0 ? rows - 1 : 1));
    EXPECT_NEAR(projection_distance(X, S, w), naive_distance(X, S, w), 1e-9);
  }
}

TEST(ProjectionDistance, MonotoneUnderUnion) {
  for (std::uint64_t s = 0; s < 30; ++s) {
    Eigen::MatrixXd X = random_matrix(5, 7, 200 + s);
    Eigen::VectorXd w = (random_matrix(7, 1, 300 + s).array().abs()).matrix();
    Rng rng(s);
    std::vector<int> S, T;
    for (int c = 0; c < 7; ++c) {
      if (rng.bernoulli(0.3)) S.push_back(c);
      if (rng.bernoulli(0.3)) T.push_back(c);
    }
    std::vector<int> U = S;
    U.insert(U.end(), T.begin(), T.end());
    std::sort(U.begin(), U.end());
    U.erase(std::unique(U.begin(), U.end()), U.end());
    EXPECT_LE(projection_distance(X, U, w), projection_distance(X, S, w) + 1e-10);
  }
}

TEST(SelectColumns, OrthogonalEqualNorms) {
  const int n = 5;
  Eigen::MatrixXd X = 2.0 * Eigen::MatrixXd::Identity(n, n);
  ColumnSelection c = select_columns(X, 1, 1);
  ASSERT_EQ(c.S.size(), 1u);
  EXPECT_NEAR(c.projection_distance, (n - 1) * 4.0, 1e-12);
  EXPECT_NEAR(c.bound, 2.0 * (n - 1) * 4.0, 1e-12);
  EXPECT_EQ(c.S[0], 0);
}

TEST(SelectColumns, ExactRankSpansColumnSpace) {
  for (int r = 1; r <= 3; ++r) {
    Eigen::MatrixXd X = random_matrix(6, r, 7 + r) * random_matrix(r, 8, 17 + r);
    ColumnSelection c = select_columns(X, r, r);
    EXPECT_LE(c.projection_distance, 1e-8);
  }
}

TEST(SelectColumns, RandomBoundAndExhaustiveFloor) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    Eigen::MatrixXd X = random_matrix(8, 8, 500 + s);
    ColumnSelection c = select_columns(X, 2, 4);
    ColumnSelection e = exhaustive_select(X, 4);
    Eigen::VectorXd sig = sigma_desc(X, Eigen::VectorXd::Ones(8));
    EXPECT_NEAR(c.bound, 5.0 / 3.0 * tail(sig, 2), 1e-9);
    EXPECT_LE(c.projection_distance, c.bound + 1e-8);
    EXPECT_GE(c.projection_distance, e.projection_distance - 1e-8);
    EXPECT_GE(e.projection_distance, tail(sig, 4) - 1e-8);
  }
}

TEST(SelectColumns, ZeroWeightColumnsNeverChosen) {
  Eigen::MatrixXd X = random_matrix(4, 6, 77);
  Eigen::VectorXd w = Eigen::VectorXd::Ones(6);
  w(0) = w(3) = 0.0;
  ColumnSelection c = select_columns(X, 1, 3, w);
  for (int u : c.S) {
    EXPECT_NE(u, 0);
    EXPECT_NE(u, 3);
  }
}

TEST(SelectColumns, RejectsBadArguments) {
  Eigen::MatrixXd X = random_matrix(3, 3, 1);
  EXPECT_THROW(select_columns(X, 1, 4), std::invalid_argument);
  EXPECT_THROW(select_columns(X, 3, 2), std::invalid_argument);
  EXPECT_THROW(select_columns(X, 0, 2), std::invalid_argument);
}

TEST(ExhaustiveSelect, Examples) {
  EXPECT_NEAR(exhaustive_select(Eigen::MatrixXd::Identity(3, 3), 2).projection_distance, 1.0, 1e-12);
  Eigen::MatrixXd rank1 = Eigen::Vector3d(1, -1, 2) * Eigen::RowVector3d(1, 2, 3);
  EXPECT_NEAR(exhaustive_select(rank1, 1).projection_distance, 0.0, 1e-12);
  Eigen::MatrixXd X = random_matrix(7, 7, 42);
  EXPECT_LE(exhaustive_select(X, 3).projection_distance, select_columns(X, 1, 3).projection_distance + 1e-10);
}

TEST(ExhaustiveSelect, MatchesBruteForceOverSubsets) {
  Eigen::MatrixXd X = random_matrix(4, 6, 4242);
  Eigen::VectorXd w = (random_matrix(6, 1, 4243).array().abs() + 0.05).matrix();
  double best = 1e300;
  for (unsigned mask = 0; mask < 64; ++mask) {
    if (__builtin_popcount(mask) != 2) continue;
    best = std::min(best, naive_distance(X, lhr::testing::set_from_mask(mask, 6), w));
  }
  EXPECT_NEAR(exhaustive_select(X, 2, w).projection_distance, best, 1e-9);
}

TEST(ExhaustiveSelect, BudgetExceeded) {
  EXPECT_THROW(exhaustive_select(random_matrix(3, 30, 1), 10, {}, 1000), SelectionBudgetExceeded);
}

TEST(GeneralizedBound, Examples) {
  Eigen::MatrixXd D = Eigen::Vector3d(2, 5, 0.5).asDiagonal();
  EXPECT_NEAR(generalized_bound(D, 1), 1.0, 1e-12);
  EXPECT_NEAR(generalized_bound(cycle_graph(4).laplacian(), 1), 1.0, 1e-9);
  Eigen::MatrixXd NL = normalized_laplacian(complete_graph(4));
  EXPECT_NEAR(generalized_bound(NL, 1), 4.0 / 3.0, 1e-9);
}

// Lemma-30 chain: selecting ceil(r/eps) columns of X diag(L)^{1/2} leaves weighted residual at most
// Tr(X^T X L) / ((1 - eps) lambda_{r+1}).
TEST(SelectColumns, WeightedResidualAgainstQuadraticForm) {
  int checked = 0;
  for (std::uint64_t s = 0; s < 40; ++s) {
    const int n = 4 + s % 5;
    WeightedGraph g = lhr::testing::random_connected_graph(n, 0.4, 900 + s, true);
    Eigen::MatrixXd L = g.laplacian();
    Eigen::MatrixXd X = random_matrix(3 + s % 3, n, 1000 + s);
    for (double eps : {0.25, 0.5}) {
      for (int r = 1; r <= 2; ++r) {
        const int rp = static_cast<int>(std::ceil(r / eps));
        if (rp > n) continue;
        const double lam = generalized_bound(L, r);
        ColumnSelection c = select_columns(X, r, rp, L.diagonal());
        const double rhs = (X.transpose() * X * L).trace() / ((1.0 - eps) * lam);
        EXPECT_LE(c.projection_distance, rhs + 1e-8) << "seed " << s;
        ++checked;
      }
    }
  }
  EXPECT_GT(checked, 50);
}

TEST(SpanProjector, ScalingColumnsKeepsSpan) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    Eigen::MatrixXd X = random_matrix(5, 6, 60 + s);
    Eigen::VectorXd c = (random_matrix(6, 1, 70 + s).array().abs() + 0.2).matrix();
    Eigen::MatrixXd Y = X * c.asDiagonal();
    std::vector<int> S{1, 3, 4};
    EXPECT_LE((span_projector(X, S) - span_projector(Y, S)).cwiseAbs().maxCoeff(), 1e-9);
    Eigen::MatrixXd P = span_projector(X, S);
    EXPECT_LE((P * P - P).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_EQ(span_basis(X, S).cols(), 3);
  }
}

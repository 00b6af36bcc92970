#include "lhr/sdp_solver.hpp"

#include "test_util.hpp"

#include <gtest/gtest.h>

using namespace lhr;

namespace {

Eigen::SparseMatrix<double> sparse(const Eigen::MatrixXd& M) { return M.sparseView(); }

SdpResult solve(const SdpProblem& p) { return InteriorPointSolver().solve(p, SdpOptions{}); }

}  // namespace

// min t  s.t.  [[t, 1], [1, t]] >= 0  ->  t = 1.
TEST(InteriorPoint, TwoByTwo) {
  SdpProblem p;
  p.num_vars = 1;
  p.c = Eigen::VectorXd::Ones(1);
  SdpBlock b;
  b.size = 2;
  b.f0 = (Eigen::Matrix2d() << 0, 1, 1, 0).finished();
  b.fi = {sparse(Eigen::MatrixXd::Identity(2, 2))};
  p.blocks = {b};
  SdpResult r = solve(p);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.objective, 1.0, 1e-7);
  EXPECT_NEAR(r.t(0), 1.0, 1e-7);
}

// min t1 + t2  s.t.  t1 >= 1, t2 >= 2 (nonnegative block).
TEST(InteriorPoint, LinearProgram) {
  SdpProblem p;
  p.num_vars = 2;
  p.c = Eigen::VectorXd::Ones(2);
  SdpBlock b;
  b.kind = SdpBlock::Kind::nonneg;
  b.size = 2;
  b.f0 = Eigen::Vector2d(-1, -2);
  Eigen::MatrixXd e1 = Eigen::MatrixXd::Zero(2, 1), e2 = Eigen::MatrixXd::Zero(2, 1);
  e1(0, 0) = 1;
  e2(1, 0) = 1;
  b.fi = {sparse(e1), sparse(e2)};
  p.blocks = {b};
  SdpResult r = solve(p);
  EXPECT_NEAR(r.objective, 3.0, 1e-7);
  EXPECT_LE(r.lower_bound, r.objective + 1e-9);
}

// min t  s.t.  t I - M >= 0  ->  lambda_max(M), checked against a dense eigensolver.
TEST(InteriorPoint, LargestEigenvalue) {
  for (std::uint64_t s = 1; s <= 15; ++s) {
    const int d = 2 + static_cast<int>(s % 6);
    Eigen::MatrixXd R = lhr::testing::random_matrix(d, d, s);
    Eigen::MatrixXd M = 0.5 * (R + R.transpose());
    SdpProblem p;
    p.num_vars = 1;
    p.c = Eigen::VectorXd::Ones(1);
    SdpBlock b;
    b.size = d;
    b.f0 = -M;
    b.fi = {sparse(Eigen::MatrixXd::Identity(d, d))};
    p.blocks = {b};
    SdpResult r = solve(p);
    const double want = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(M).eigenvalues().maxCoeff();
    EXPECT_NEAR(r.objective, want, 1e-7) << "seed " << s;
  }
}

// Mixed blocks: min t1 s.t. [[t1, t2], [t2, 1]] >= 0 and t2 >= 2  ->  t1 = t2^2 = 4.
TEST(InteriorPoint, MixedBlocks) {
  SdpProblem p;
  p.num_vars = 2;
  p.c = Eigen::Vector2d(1, 0);
  SdpBlock psd;
  psd.size = 2;
  psd.f0 = (Eigen::Matrix2d() << 0, 0, 0, 1).finished();
  psd.fi = {sparse((Eigen::Matrix2d() << 1, 0, 0, 0).finished()), sparse((Eigen::Matrix2d() << 0, 1, 1, 0).finished())};
  SdpBlock lin;
  lin.kind = SdpBlock::Kind::nonneg;
  lin.size = 1;
  lin.f0 = Eigen::MatrixXd::Constant(1, 1, -2.0);
  lin.fi = {sparse(Eigen::MatrixXd::Zero(1, 1)), sparse(Eigen::MatrixXd::Ones(1, 1))};
  p.blocks = {psd, lin};
  SdpResult r = solve(p);
  EXPECT_NEAR(r.objective, 4.0, 1e-6);
  EXPECT_NEAR(r.t(1), 2.0, 1e-6);
}

TEST(InteriorPoint, InfeasibleThrows) {
  // t >= 1 and -t >= 0.
  SdpProblem p;
  p.num_vars = 1;
  p.c = Eigen::VectorXd::Ones(1);
  SdpBlock b;
  b.kind = SdpBlock::Kind::nonneg;
  b.size = 2;
  b.f0 = Eigen::Vector2d(-1, 0);
  Eigen::MatrixXd f = Eigen::MatrixXd::Zero(2, 1);
  f(0, 0) = 1;
  f(1, 0) = -1;
  b.fi = {sparse(f)};
  p.blocks = {b};
  EXPECT_THROW(solve(p), SolverError);
}

TEST(InteriorPoint, DefaultSolverIsAvailable) {
  ASSERT_NE(default_sdp_solver(), nullptr);
}

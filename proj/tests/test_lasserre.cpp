#include "lhr/lasserre.hpp"
#include "lhr/oracle.hpp"
#include "lhr/problems.hpp"

#include "test_util.hpp"

#include <gtest/gtest.h>

#include <algorithm>

using namespace lhr;

namespace {

PartitionProblem bisection(const WeightedGraph& g, double mu, std::vector<int> F = {}) {
  PartitionProblem p;
  p.kind = ProblemKind::bisection;
  p.graph = g;
  p.mu = mu;
  p.F = std::move(F);
  return p;
}

/// Solution whose moments are those of the single labeling sigma.
LasserreSolution integral_solution(const QipInstance& inst, int r_prime, const std::vector<int>& sigma) {
  auto idx = std::make_shared<MomentIndex>(inst.n, inst.k, r_prime, inst.all_monomials());
  std::vector<double> vals;
  for (const Assignment& a : idx->basis()) {
    double v = 1.0;
    for (int u : assignment_vertices(a))
      if (sigma[u] != label_of(a, u)) v = 0.0;
    vals.push_back(v);
  }
  return LasserreSolution(idx, inst, vals);
}

}  // namespace

TEST(SolveSdp, K2BisectionIsTight) {
  QipInstance q = build_bisection(bisection(complete_graph(2), 1));
  LasserreSolution x = solve_sdp(q, 1);
  EXPECT_NEAR(x.objective_value(), 1.0, 1e-6);
  EXPECT_TRUE(check_consistency(x).pass());
}

TEST(SolveSdp, EdgelessGraphHasZeroValue) {
  WeightedGraph g(4);
  for (double mu : {1.0, 2.0, 3.0}) {
    LasserreSolution x = solve_sdp(build_bisection(bisection(g, mu)), 1);
    EXPECT_NEAR(x.objective_value(), 0.0, 1e-6);
  }
}

TEST(SolveSdp, C4MonotoneAndBelowOpt) {
  QipInstance q = build_bisection(bisection(cycle_graph(4), 2));
  const double v1 = solve_sdp(q, 1).objective_value();
  const double v2 = solve_sdp(q, 2).objective_value();
  const double v4 = solve_sdp(q, 4).objective_value();
  EXPECT_LE(v2, 2.0 + 1e-6);
  EXPECT_GE(v2, v1 - 2e-6);
  EXPECT_GE(v4, v2 - 2e-6);
  EXPECT_NEAR(v4, 2.0, 1e-6);
}

TEST(SolveSdp, InfeasibleTarget) {
  // mu larger than the number of free vertices.
  QipInstance q = build_bisection(bisection(path_graph(4), 2, {0, 1}));
  q.linear[0].rhs = 3.0;
  EXPECT_THROW(solve_sdp(q, 2), Infeasible);
  EXPECT_THROW(solve_sdp(q, 4), Infeasible);
}

TEST(SolveSdp, BudgetExceeded) {
  QipInstance q = build_bisection(bisection(petersen_graph(), 5));
  SolveOptions o;
  o.budget = 50;
  EXPECT_THROW(solve_sdp(q, 2, o), BudgetExceeded);
}

TEST(SolveSdp, RejectsBadInstances) {
  QipInstance q = build_bisection(bisection(cycle_graph(4), 2));
  QipInstance bad = q;
  bad.objective(0, 1) += 1.0;
  EXPECT_THROW(solve_sdp(bad, 1), std::invalid_argument);
  bad = q;
  bad.linear[0].terms.emplace_back(0, 1, 1.0);
  EXPECT_THROW(solve_sdp(bad, 1), std::invalid_argument);
  EXPECT_THROW(solve_sdp(q, 0), std::invalid_argument);
}

TEST(SolveSdp, RelaxationAndTopLevelIntegrality) {
  for (std::uint64_t s = 0; s < 12; ++s) {
    const int n = 3 + static_cast<int>(s % 4);
    WeightedGraph g = lhr::testing::random_connected_graph(n, 0.4, 40 + s, true);
    QipInstance q = build_bisection(bisection(g, n / 2));
    const double opt = brute_force_qip(q).value;
    double prev = 1e300;
    for (int r = 1; r <= n; ++r) {
      LasserreSolution x = solve_sdp(q, r);
      const double v = x.objective_value();
      EXPECT_LE(v, opt + 1e-5) << "seed " << s << " r' " << r;
      if (r > 1) EXPECT_GE(v, prev - 2e-6);
      prev = v;
      ConsistencyReport c = check_consistency(x);
      EXPECT_TRUE(c.pass()) << "max residual " << c.max_residual();
    }
    EXPECT_NEAR(prev, opt, 1e-5);
  }
}

TEST(SolveSdp, ThreeLabelsAndMaximization) {
  // Max independent set on C5 as a quadratic program: alpha = 2.
  WeightedGraph g = cycle_graph(5);
  QipInstance q;
  q.n = 5;
  q.k = 2;
  q.objective = Eigen::MatrixXd::Zero(10, 10);
  for (int u = 0; u < 5; ++u) q.objective(u, u) = 1.0;
  q.maximize = true;
  for (const Edge& e : g.edges()) q.monomials.push_back({make_assignment({e.u, e.v}, {0, 0}), 0});
  EXPECT_NEAR(solve_sdp(q, 5).objective_value(), 2.0, 1e-6);
  const double v2 = solve_sdp(q, 2).objective_value();
  EXPECT_GE(v2, 2.0 - 1e-6);
  EXPECT_LE(v2, 2.5 + 1e-6);

  // Three labels: min sum over edges of label disagreement on a triangle with all labels used once.
  QipInstance t;
  t.n = 3;
  t.k = 3;
  t.objective = Eigen::MatrixXd::Zero(9, 9);
  WeightedGraph k3 = complete_graph(3);
  for (int j = 0; j < 3; ++j) t.objective.block(j * 3, j * 3, 3, 3) = 0.5 * k3.laplacian();
  for (int j = 0; j < 3; ++j) {
    LinearConstraint c;
    for (int u = 0; u < 3; ++u) c.terms.emplace_back(u, j, 1.0);
    c.rhs = 1.0;
    t.linear.push_back(c);
  }
  EXPECT_NEAR(brute_force_qip(t).value, 3.0, 1e-12);
  EXPECT_NEAR(solve_sdp(t, 3).objective_value(), 3.0, 1e-6);
}

TEST(ExtractVectors, IdentityAndRankOne) {
  Eigen::MatrixXd V = extract_vectors(Eigen::MatrixXd::Identity(4, 4));
  EXPECT_TRUE((V.transpose() * V).isApprox(Eigen::MatrixXd::Identity(4, 4), 1e-12));
  Eigen::MatrixXd W = extract_vectors(Eigen::MatrixXd::Ones(3, 3));
  for (int c = 1; c < 3; ++c) EXPECT_LE((W.col(c) - W.col(0)).norm(), 1e-7);
}

TEST(ExtractVectors, RejectsIndefinite) {
  Eigen::Matrix2d G;
  G << 1, 2, 2, 1;
  EXPECT_THROW(extract_vectors(G), PsdViolation);
}

TEST(ExtractVectors, ReconstructsRandomGram) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    Eigen::MatrixXd X = lhr::testing::random_matrix(3, 6, s);
    Eigen::MatrixXd G = X.transpose() * X;
    Eigen::MatrixXd V = extract_vectors(G);
    EXPECT_LE((V.transpose() * V - G).cwiseAbs().maxCoeff(), 1e-7);
  }
}

TEST(Consistency, IntegralSolutionHasZeroResiduals) {
  QipInstance q = build_bisection(bisection(cycle_graph(4), 2));
  LasserreSolution x = integral_solution(q, 2, {0, 0, 1, 1});
  ConsistencyReport c = check_consistency(x);
  EXPECT_LE(std::max({c.unit_norm, c.conflict, c.union_invariance, c.label_sum, c.linear, c.psd}), 1e-12);
  // Vector residuals are norms, so Gram rounding of 1e-16 shows up as about 1e-8.
  EXPECT_LE(c.max_residual(), 1e-7) << c.unit_norm << " " << c.conflict << " " << c.union_invariance << " "
                                      << c.label_sum << " " << c.marginal << " " << c.linear << " " << c.monomial
                                      << " " << c.psd << " " << c.reconstruction;
  EXPECT_NEAR(x.objective_value(), 2.0, 1e-12);
}

TEST(Consistency, PerturbationIsReported) {
  QipInstance q = build_bisection(bisection(cycle_graph(4), 2));
  LasserreSolution x = integral_solution(q, 2, {0, 0, 1, 1});
  std::vector<double> vals = x.basis_values();
  // Perturb a pair coordinate.
  const auto& basis = x.index().basis();
  for (std::size_t i = 0; i < basis.size(); ++i)
    if (assignment_size(basis[i]) == 2) {
      vals[i] += 1e-3;
      break;
    }
  LasserreSolution y(x.index_ptr(), q, vals);
  ConsistencyReport c = check_consistency(y);
  EXPECT_GE(c.max_residual(), 1e-4);
  EXPECT_FALSE(c.pass());
}

TEST(Consistency, SolvedRowsSatisfyDefinition) {
  QipInstance q = build_bisection(bisection(petersen_graph(), 5));
  LasserreSolution x = solve_sdp(q, 1);
  ConsistencyReport c = check_consistency(x);
  EXPECT_TRUE(c.pass()) << c.max_residual();
  EXPECT_LE(c.conflict, 1e-12);
  // sum_j ||x_u(j)||^2 = 1 read directly from the Gram matrix.
  const Eigen::MatrixXd& G = x.gram();
  for (int u = 0; u < 10; ++u) {
    double s = 0.0;
    for (int j = 0; j < 2; ++j) {
      int row = x.index().lookup(single(u, j));
      s += G(row, row);
    }
    EXPECT_NEAR(s, G(0, 0), 1e-9);
  }
  EXPECT_NEAR(G(0, 0), 1.0, 1e-12);
}

TEST(Serialization, RoundTripIsBitExact) {
  QipInstance q = build_bisection(bisection(cycle_graph(5), 2, {}));
  LasserreSolution x = solve_sdp(q, 2);
  Json j = solution_to_json(x);
  LasserreSolution y = solution_from_json(Json::parse(dump_json(j)));
  ASSERT_EQ(x.basis_values().size(), y.basis_values().size());
  for (std::size_t i = 0; i < x.basis_values().size(); ++i) EXPECT_EQ(x.basis_values()[i], y.basis_values()[i]);
  EXPECT_EQ(dump_json(j), dump_json(solution_to_json(y)));
  QipInstance r = instance_from_json(Json::parse(dump_json(instance_to_json(q))));
  EXPECT_EQ(r.objective, q.objective);
  EXPECT_EQ(r.linear.size(), q.linear.size());
}

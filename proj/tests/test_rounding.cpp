#include "lhr/colsel.hpp"
#include "lhr/problems.hpp"
#include "lhr/rounding.hpp"

#include "test_util.hpp"

#include <gtest/gtest.h>

#include <cmath>

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

/// A handful of fractional solutions with room to condition on two vertices.
std::vector<LasserreSolution> fractional_solutions() {
  std::vector<LasserreSolution> out;
  out.push_back(solve_sdp(build_bisection(bisection(cycle_graph(5), 2)), 3));
  out.push_back(solve_sdp(build_bisection(bisection(complete_graph(4), 2)), 3));
  out.push_back(solve_sdp(build_bisection(bisection(lhr::testing::random_connected_graph(6, 0.4, 3, true), 3)), 3));
  out.push_back(solve_sdp(build_bisection(bisection(petersen_graph(), 5)), 2));
  return out;
}

std::vector<std::vector<int>> small_sets(int n) {
  std::vector<std::vector<int>> out{{}};
  for (int u = 0; u < n; ++u) out.push_back({u});
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v) out.push_back({u, v});
  return out;
}

}  // namespace

TEST(ProjectorPi, EmptySetIsRankOne) {
  LasserreSolution x = solve_sdp(build_bisection(bisection(cycle_graph(4), 2)), 2);
  Eigen::MatrixXd P = projector_Pi(x, {});
  EXPECT_NEAR(P.trace(), 1.0, 1e-9);
  EXPECT_LE((P * P - P).cwiseAbs().maxCoeff(), 1e-8);
  Eigen::VectorXd e = x.vector_of(Assignment{});
  EXPECT_LE((P * e - e).norm(), 1e-8);
}

TEST(ProjectorPi, IntegralSolutionIsRankOne) {
  QipInstance q = build_bisection(bisection(cycle_graph(4), 2));
  LasserreSolution x = integral_solution(q, 2, {0, 1, 1, 0});
  for (auto S : small_sets(4)) {
    Eigen::MatrixXd P = projector_Pi(x, S);
    EXPECT_NEAR(P.trace(), 1.0, 1e-8);
  }
}

TEST(ProjectorPi, IdempotentAndDominatesSpanProjector) {
  for (const LasserreSolution& x : fractional_solutions()) {
    Eigen::MatrixXd X = singleton_vectors(x);
    for (auto S : small_sets(x.n())) {
      if (static_cast<int>(S.size()) > seed_capacity(x)) continue;
      Eigen::MatrixXd P = projector_Pi(x, S);
      EXPECT_LE((P * P - P).cwiseAbs().maxCoeff(), 1e-8);
      EXPECT_LE((P - P.transpose()).cwiseAbs().maxCoeff(), 1e-12);
      std::vector<int> cols;
      for (int u : S)
        for (int j = 0; j < x.k(); ++j) cols.push_back(column_index(x.n(), u, j));
      if (cols.empty()) continue;
      Eigen::MatrixXd Ps = span_projector(X, cols);
      // Compared on the vectors themselves: a column of mass 1e-11 is solver noise whose direction
      // span_projector would weigh fully.
      Eigen::MatrixXd D = X.transpose() * (P - Ps) * X;
      EXPECT_GE(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(0.5 * (D + D.transpose())).eigenvalues()(0), -1e-8);
    }
  }
}

// Marginals recovered by summing conditionals equal ||x_u(g)||^2; pair probabilities equal the projector form.
TEST(RoundingDistribution, MarginalAndPairIdentities) {
  for (const LasserreSolution& x : fractional_solutions()) {
    const int n = x.n(), k = x.k();
    Eigen::MatrixXd X = singleton_vectors(x);
    for (auto S : small_sets(n)) {
      if (static_cast<int>(S.size()) > seed_capacity(x)) continue;
      RoundingDistribution d(x, S);
      EXPECT_NEAR(d.total_weight(), 1.0, 1e-6);
      Eigen::MatrixXd marg = Eigen::MatrixXd::Zero(n, k);
      for (int f = 0; f < d.support_size(); ++f) {
        marg += d.weight(f) * d.conditionals(f);
        for (int u = 0; u < n; ++u) EXPECT_NEAR(d.conditionals(f).row(u).sum(), 1.0, 1e-6);
        for (int u : S) EXPECT_NEAR(d.conditional(f, u, label_of(d.labeling(f), u)), 1.0, 1e-9);
      }
      for (int u = 0; u < n; ++u)
        for (int g = 0; g < k; ++g) EXPECT_NEAR(marg(u, g), x.z(single(u, g)), 1e-8);
      Eigen::MatrixXd PX = projector_Pi(x, S) * X;
      Eigen::MatrixXd pair_form = PX.transpose() * PX;
      for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v)
          for (int g = 0; g < k; ++g)
            for (int h = 0; h < k; ++h) {
              double sum = 0.0;
              for (int f = 0; f < d.support_size(); ++f) sum += d.weight(f) * d.conditional(f, u, g) * d.conditional(f, v, h);
              const double p = pairwise_probability(x, S, u, g, v, h);
              EXPECT_NEAR(sum, p, 1e-8);
              EXPECT_NEAR(p, pair_form(column_index(n, u, g), column_index(n, v, h)), 1e-8);
            }
    }
  }
}

TEST(PairwiseProbability, SeedContainingBothVertices) {
  LasserreSolution x = solve_sdp(build_bisection(bisection(cycle_graph(5), 2)), 3);
  for (int g = 0; g < 2; ++g)
    for (int h = 0; h < 2; ++h)
      EXPECT_NEAR(pairwise_probability(x, {0, 2}, 0, g, 2, h), x.z(make_assignment({0, 2}, {g, h})), 1e-8);
  EXPECT_THROW(pairwise_probability(x, {}, 1, 0, 1, 0), std::invalid_argument);
}

TEST(PairwiseProbability, IndependentSetEdgeIsZero) {
  QipInstance q;
  q.n = 3;
  q.k = 2;
  q.objective = Eigen::MatrixXd::Zero(6, 6);
  for (int u = 0; u < 3; ++u) q.objective(u, u) = 1.0;
  q.maximize = true;
  q.monomials.push_back({make_assignment({0, 1}, {0, 0}), 0});
  q.monomials.push_back({make_assignment({1, 2}, {0, 0}), 0});
  LasserreSolution x = solve_sdp(q, 2);
  EXPECT_NEAR(pairwise_probability(x, {}, 0, 0, 1, 0), 0.0, 1e-9);
  EXPECT_NEAR(pairwise_probability(x, {2}, 0, 0, 1, 0), 0.0, 1e-9);
}

TEST(ExpectedQuadratic, DiagonalAndIntegral) {
  LasserreSolution x = solve_sdp(build_bisection(bisection(cycle_graph(5), 2)), 2);
  Eigen::VectorXd dvec(10);
  for (int i = 0; i < 10; ++i) dvec(i) = 0.5 + i;
  Eigen::MatrixXd D = dvec.asDiagonal();
  double want = 0.0;
  for (int u = 0; u < 5; ++u)
    for (int j = 0; j < 2; ++j) want += dvec(column_index(5, u, j)) * x.z(single(u, j));
  EXPECT_NEAR(expected_quadratic(x, {}, D), want, 1e-9);

  QipInstance q = build_bisection(bisection(cycle_graph(4), 2));
  LasserreSolution y = integral_solution(q, 2, {0, 0, 1, 1});
  Eigen::VectorXd ind = labeling_indicator({0, 0, 1, 1}, 2);
  for (auto S : small_sets(4)) {
    if (static_cast<int>(S.size()) > seed_capacity(y)) continue;
    EXPECT_NEAR(expected_quadratic(y, S, q.objective), ind.dot(q.objective * ind), 1e-9);
  }
}

TEST(ExpectedQuadratic, MatchesDistributionAndSampling) {
  for (const LasserreSolution& x : fractional_solutions()) {
    const Eigen::MatrixXd& L = x.instance().objective;
    for (auto S : std::vector<std::vector<int>>{{}, {0}, {1, 2}}) {
      if (static_cast<int>(S.size()) > seed_capacity(x)) continue;
      RoundingDistribution d(x, S);
      const double e = expected_quadratic(x, S, L);
      EXPECT_NEAR(e, d.expectation(L), 1e-8);
      Rng rng(17);
      const int N = 20000;
      double sum = 0.0, sq = 0.0;
      for (int t = 0; t < N; ++t) {
        Eigen::VectorXd v = labeling_indicator(d.sample(rng), x.k());
        const double q = v.dot(L * v);
        sum += q;
        sq += q * q;
      }
      const double mean = sum / N, sd = std::sqrt(std::max(0.0, sq / N - mean * mean));
      EXPECT_LE(std::abs(mean - e), 4.0 * sd / std::sqrt(N) + 1e-9);
    }
  }
}

TEST(Sampling, IntegralSolutionIsDeterministic) {
  QipInstance q = build_bisection(bisection(cycle_graph(4), 2));
  LasserreSolution y = integral_solution(q, 2, {1, 0, 0, 1});
  RoundingDistribution d(y, {});
  for (std::uint64_t s = 0; s < 50; ++s) EXPECT_EQ(sample_labeling(d, s), (std::vector<int>{1, 0, 0, 1}));
}

TEST(Sampling, PinnedVerticesAndSeedReproducibility) {
  PartitionProblem p = bisection(cycle_graph(5), 1, {0});
  p.B = {3};
  LasserreSolution x = solve_sdp(build_bisection(p), 2);
  RoundingDistribution d(x, {1});
  Rng rng(3);
  for (int t = 0; t < 500; ++t) {
    std::vector<int> f = d.sample(rng);
    ASSERT_EQ(f.size(), 5u);
    EXPECT_EQ(f[0], 0);
    EXPECT_EQ(f[3], 1);
  }
  EXPECT_EQ(sample_labeling(d, 99), sample_labeling(d, 99));
}

TEST(Sampling, EmpiricalMarginals) {
  LasserreSolution x = solve_sdp(build_bisection(bisection(cycle_graph(5), 2)), 2);
  RoundingDistribution d(x, {0});
  Rng rng(12345);
  const int N = 100000;
  std::vector<int> hits(5, 0);
  for (int t = 0; t < N; ++t) {
    std::vector<int> f = d.sample(rng);
    for (int u = 0; u < 5; ++u) hits[u] += f[u] == 0;
  }
  for (int u = 0; u < 5; ++u) {
    const double p = x.z(single(u, 0));
    EXPECT_LE(std::abs(hits[u] / double(N) - p), 4.0 * std::sqrt(p * (1 - p) / N) + 1e-12);
  }
}

TEST(SelectSeed, ZeroObjectiveNeedsNoSeed) {
  LasserreSolution x = solve_sdp(build_bisection(bisection(cycle_graph(4), 2)), 2);
  SeedSet s = select_seed(x, Eigen::MatrixXd::Zero(8, 8), 1, 0.5);
  EXPECT_TRUE(s.S_star.empty());
  EXPECT_NEAR(s.certified_bound, 0.0, 1e-12);
  EXPECT_TRUE(s.met_bound);
}

TEST(SelectSeed, IntegralSolutionMeetsBoundImmediately) {
  QipInstance q = build_bisection(bisection(cycle_graph(6), 3));
  LasserreSolution y = integral_solution(q, 3, {0, 0, 0, 1, 1, 1});
  SeedSet s = select_seed(y, q.objective, 1, 0.5);
  EXPECT_LE(s.iterations, 1);
  EXPECT_NEAR(s.certified_bound, y.objective_value(), 1e-9);
  EXPECT_TRUE(s.met_bound);
}

TEST(SelectSeed, K4Bisection) {
  QipInstance q = build_bisection(bisection(complete_graph(4), 2));
  LasserreSolution x = solve_sdp(q, 4);
  SeedSet s = select_seed(x, q.objective, 1, 0.5);
  const double eta = x.objective_value();
  EXPECT_LE(s.certified_bound, 3.0 * eta + 1e-6);
  EXPECT_LE(s.iterations, 2);
  EXPECT_NEAR(s.lambda, 4.0 / 3.0, 1e-9);
  EXPECT_NEAR(expected_quadratic(x, s.S_star, q.objective), s.certified_bound, 1e-8);
}

TEST(SelectSeed, LogSatisfiesPerIterationClaim) {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    WeightedGraph g = lhr::testing::random_connected_graph(6, 0.5, 70 + seed, true);
    QipInstance q = build_bisection(bisection(g, 3));
    LasserreSolution x = solve_sdp(q, 6);
    for (double eps : {0.25, 0.5}) {
      SeedSet s = select_seed(x, q.objective, 1, eps);
      EXPECT_LE(s.iterations, static_cast<int>(std::ceil(1.0 / eps)));
      EXPECT_LE(s.certified_bound, s.threshold + 1e-6);
      for (const SeedIteration& it : s.log) EXPECT_TRUE(it.claim_holds) << it.delta << " vs " << it.claim_rhs;
      EXPECT_EQ(s.log.size(), static_cast<std::size_t>(s.iterations) + 1);
    }
  }
}

TEST(SelectSeed, CapacityIsEnforced) {
  QipInstance q = build_bisection(bisection(petersen_graph(), 5));
  LasserreSolution x = solve_sdp(q, 1);
  EXPECT_EQ(seed_capacity(x), 0);
  SeedOptions o;
  o.stop_at_capacity = true;
  SeedSet s = select_seed(x, q.objective, 1, 0.1, o);
  EXPECT_TRUE(s.S_star.empty());
  EXPECT_THROW(RoundingDistribution(x, {0}), InsufficientRounds);
}

TEST(SelectSeed, MinIterationsKeepsGrowing) {
  QipInstance q = build_bisection(bisection(cycle_graph(6), 3));
  LasserreSolution x = solve_sdp(q, 6);
  SeedOptions o;
  o.min_iterations = 2;
  SeedSet s = select_seed(x, q.objective, 1, 0.5, o);
  SeedSet t = select_seed(x, q.objective, 1, 0.5);
  EXPECT_GE(s.S_star.size(), t.S_star.size());
  EXPECT_GE(s.iterations, std::min(2, t.iterations + 1));
}

#include "lhr/corpus.hpp"
#include "lhr/oracle.hpp"

#include "test_util.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <sstream>

using namespace lhr;
using lhr::testing::set_from_mask;

namespace {

PartitionProblem make(ProblemKind kind, const WeightedGraph& g, double mu = 0.0) {
  PartitionProblem p;
  p.kind = kind;
  p.graph = g;
  p.mu = mu;
  return p;
}

std::vector<std::string> split(const std::string& s, char c) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, c)) out.push_back(item);
  return out;
}

}  // namespace

TEST(BruteForce, CutProblems) {
  EXPECT_NEAR(brute_force(make(ProblemKind::bisection, complete_graph(4), 2)).value, 4.0, 1e-12);
  EXPECT_NEAR(brute_force(make(ProblemKind::bisection, path_graph(4), 2)).value, 1.0, 1e-12);
  EXPECT_NEAR(brute_force(make(ProblemKind::sse, star_graph(4), 1)).value, 1.0, 1e-12);
  EXPECT_NEAR(brute_force(make(ProblemKind::maxcut, cycle_graph(5))).value, 1.0, 1e-12);
  EXPECT_NEAR(brute_force(make(ProblemKind::maxcut, complete_graph(3))).value, 1.0, 1e-12);
  EXPECT_NEAR(brute_force(make(ProblemKind::expansion, complete_graph(4))).value, 2.0, 1e-12);
  EXPECT_NEAR(brute_force(make(ProblemKind::sparsest, cycle_graph(6))).value, 2.0 / 9.0, 1e-12);
  EXPECT_NEAR(brute_force_independent_set(cycle_graph(5)).value, 2.0, 1e-12);
  EXPECT_NEAR(brute_force_independent_set(petersen_graph()).value, 4.0, 1e-12);
  EXPECT_NEAR(brute_force_independent_set(WeightedGraph(3)).value, 3.0, 1e-12);
}

TEST(BruteForce, WitnessAttainsValue) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    WeightedGraph g = lhr::testing::random_connected_graph(6, 0.5, 20 + s, true);
    for (ProblemKind kind : {ProblemKind::ncut, ProblemKind::conductance, ProblemKind::expansion}) {
      BruteForceResult b = brute_force(make(kind, g));
      EXPECT_NEAR(evaluate_cut(g, b.witness, ratio_objective(kind)), b.value, 1e-12);
      // No nonempty proper subset does better.
      for (unsigned m = 1; m + 1 < (1u << 6); ++m)
        EXPECT_GE(evaluate_cut(g, set_from_mask(m, 6), ratio_objective(kind)), b.value - 1e-12);
    }
    BruteForceResult bi = brute_force(make(ProblemKind::bisection, g, 3));
    EXPECT_EQ(bi.witness.size(), 3u);
    EXPECT_NEAR(cut_value(g, bi.witness).cut_weight, bi.value, 1e-12);
  }
}

TEST(BruteForce, KwayCountsEachEdgeOnce) {
  PartitionProblem p = make(ProblemKind::kway, complete_graph(3));
  p.mu_list = {1, 1, 1};
  EXPECT_NEAR(brute_force(p).value, 3.0, 1e-12);
  PartitionProblem q = make(ProblemKind::kway, cycle_graph(6));
  q.mu_list = {2, 2, 2};
  EXPECT_NEAR(brute_force(q).value, 3.0, 1e-12);
}

TEST(BruteForce, InfeasibleAndBudget) {
  PartitionProblem p = make(ProblemKind::sse, cycle_graph(4), 3);
  EXPECT_THROW(brute_force(p), Infeasible);
  EXPECT_THROW(brute_force(make(ProblemKind::bisection, petersen_graph(), 5), 100), EnumerationBudgetExceeded);
}

TEST(BruteForce, QipMatchesSetEnumeration) {
  for (std::uint64_t s = 0; s < 8; ++s) {
    WeightedGraph g = lhr::testing::random_graph(5, 0.6, 60 + s, true);
    QipInstance q = build_bisection(make(ProblemKind::bisection, g, 2));
    EXPECT_NEAR(brute_force_qip(q).value, brute_force(make(ProblemKind::bisection, g, 2)).value, 1e-12);
  }
}

TEST(DeltaEps, ClosedForms) {
  std::vector<double> a{1.0, 1.0, 1.0, 1.0};
  EXPECT_NEAR(delta_eps(a, 2.0, 0.1, DeltaMode::hoeffding), std::sqrt(4.0 * std::log(20.0) / 2.0), 1e-12);
  EXPECT_NEAR(delta_eps({0.5, 0.25}, 4.0, 0.1, DeltaMode::chernoff), 2.0 * std::sqrt(0.5 * 4.0 * std::log(20.0)),
              1e-12);
  EXPECT_THROW(delta_eps(a, 2.0, 0.0, DeltaMode::hoeffding), std::invalid_argument);
  EXPECT_THROW(delta_eps({-1.0}, 2.0, 0.1, DeltaMode::chernoff), std::invalid_argument);
  EXPECT_THROW(delta_eps({5.0}, 2.0, 0.1, DeltaMode::chernoff), std::invalid_argument);
  EXPECT_EQ(parse_delta_mode("chernoff"), DeltaMode::chernoff);
  EXPECT_THROW(parse_delta_mode("bernstein"), std::invalid_argument);
}

TEST(DeltaEps, HoeffdingCoversTail) {
  Rng rng(8);
  for (int t = 0; t < 3; ++t) {
    std::vector<double> a(12), p(12);
    double mean = 0.0;
    for (int i = 0; i < 12; ++i) {
      a[i] = rng.uniform();
      p[i] = rng.uniform();
      mean += a[i] * p[i];
    }
    const double eps = 0.1, d = delta_eps(a, mean, eps, DeltaMode::hoeffding);
    const int N = 20000;
    int out = 0;
    for (int s = 0; s < N; ++s) {
      double x = 0.0;
      for (int i = 0; i < 12; ++i) x += a[i] * rng.bernoulli(p[i]);
      out += std::abs(x - mean) > d;
    }
    EXPECT_LE(out / double(N), eps + 3.0 * std::sqrt(eps * (1 - eps) / N));
  }
}

TEST(Audit, Verdicts) {
  GuaranteeReport r;
  r.eta = 1.0;
  r.predicted_bound = 2.0;
  r.achieved_value = 2.5;
  AuditResult ok = audit(r, 1.5);
  EXPECT_TRUE(ok.pass);
  EXPECT_NEAR(ok.ratio_margin, 0.5, 1e-12);
  EXPECT_NEAR(ok.relaxation_margin, 0.5, 1e-12);

  r.achieved_value = 3.5;
  AuditResult bad = audit(r, 1.5);
  EXPECT_FALSE(bad.pass);
  EXPECT_EQ(bad.violations, std::vector<std::string>{"ratio"});

  r.achieved_value = 1.0;
  r.eta = 2.0;
  EXPECT_EQ(audit(r, 1.5).violations, std::vector<std::string>{"relaxation"});

  r.eta = 1.0;
  r.balance_ok = false;
  EXPECT_EQ(audit(r, 1.5).violations, std::vector<std::string>{"balance"});
  AuditTolerances t;
  t.check_balance = false;
  EXPECT_TRUE(audit(r, 1.5, t).pass);

  GuaranteeReport m;
  m.maximize = true;
  m.eta = 3.0;
  m.predicted_bound = 0.5;
  m.achieved_value = 1.0;
  EXPECT_TRUE(audit(m, 2.0).pass);
  m.achieved_value = 0.9;
  EXPECT_FALSE(audit(m, 2.0).pass);

  GuaranteeReport vacuous;
  vacuous.predicted_bound = std::numeric_limits<double>::infinity();
  vacuous.achieved_value = 10.0;
  EXPECT_TRUE(audit(vacuous, 0.0).pass);
}

TEST(Audit, CsvRow) {
  EXPECT_EQ(audit_csv_header(), "instance-id,kind,n,k,r,eps,eta,lambda,bound,achieved,opt,balance_dev,pass");
  GuaranteeReport r;
  r.kind = "bisection";
  r.n = 4;
  r.k = 2;
  r.r = 1;
  r.eps = 0.5;
  r.eta = 2.0;
  r.lambda_r1 = 1.0;
  r.predicted_bound = 1.5;
  r.achieved_value = 2.0;
  r.achieved_balance = 0.0;
  const std::string row = audit_csv_row("c4,mu=2", r, 2.0, audit(r, 2.0));
  EXPECT_EQ(row, "c4;mu=2,bisection,4,2,1,0.5,2,1,1.5,2,2,0,true");
  EXPECT_EQ(split(row, ',').size(), split(audit_csv_header(), ',').size());
}

TEST(Corpus, ConnectedGraphCounts) {
  std::map<int, int> count;
  for (const NamedGraph& g : connected_graphs(6)) {
    EXPECT_TRUE(g.graph.connected()) << g.id;
    ++count[g.graph.n()];
  }
  EXPECT_EQ(count[2], 1);
  EXPECT_EQ(count[3], 2);
  EXPECT_EQ(count[4], 6);
  EXPECT_EQ(count[5], 21);
  EXPECT_EQ(count[6], 112);
}

TEST(Corpus, CanonicalFormIsInvariant) {
  WeightedGraph a = path_graph(4);
  WeightedGraph b(4);
  b.add_edge(2, 0);
  b.add_edge(0, 3);
  b.add_edge(3, 1);
  EXPECT_EQ(canonical_form(a), canonical_form(b));
  EXPECT_NE(canonical_form(a), canonical_form(star_graph(3)));
}

TEST(Corpus, NamedGraphs) {
  EXPECT_FALSE(named_graphs().empty());
  for (const NamedGraph& g : named_graphs()) EXPECT_LE(g.graph.n(), 10) << g.id;
  EXPECT_EQ(named_graph(named_graphs().front().id).n(), named_graphs().front().graph.n());
  EXPECT_THROW(named_graph("no-such-graph"), std::invalid_argument);
}

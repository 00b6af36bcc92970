#pragma once

#include "lhr/graph.hpp"
#include "lhr/json_writer.hpp"
#include "lhr/lasserre.hpp"
#include "lhr/rounding.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lhr {

enum class ProblemKind { bisection, sse, sparsest, expansion, ncut, conductance, kway, maxcut };

ProblemKind parse_problem_kind(std::string_view name);
std::string to_string(ProblemKind kind);
bool is_ratio_kind(ProblemKind kind);
CutObjective ratio_objective(ProblemKind kind);

struct PartitionProblem {
  ProblemKind kind = ProblemKind::bisection;
  WeightedGraph graph;
  /// Target size (bisection) or volume (sse); for maxcut a positive mu attaches the bisection equality.
  double mu = 0.0;
  /// Part sizes for kway.
  std::vector<int> mu_list;
  std::vector<int> F;
  std::vector<int> B;
  double eps = 0.5;
  int r = 1;
  std::uint64_t rng_seed = 0;

  /// Throws std::invalid_argument.
  void validate() const;
};

/// Key-value document: kind, mu (number or list), F, B, eps, r, rng-seed. JSON syntax.
PartitionProblem parse_problem_config(const Json& config, WeightedGraph graph);

struct PipelineOptions {
  /// 0 picks the rounds automatically from r and eps.
  int r_prime = 0;
  long long budget = kDefaultMatrixBudget;
  /// 0 means ceil((1/eps)(ln n + 3)).
  int samples = 0;
  /// Worker threads for the ratio sweep and the SSE branches; results do not depend on it.
  int jobs = 1;
  SdpOptions sdp;
};

/// Budget from LASSERRE_BUDGET when set, otherwise the default.
long long budget_from_environment();

struct GuaranteeReport {
  std::string kind;
  int n = 0;
  int k = 2;
  int r = 1;
  int r_prime = 0;
  double eps = 0.0;
  /// SDP objective value.
  double eta = 0.0;
  /// The raw lambda_{r+1} of the relevant normalized matrix.
  double lambda = 0.0;
  /// min(1, lambda).
  double lambda_r1 = 0.0;
  /// Multiplicative guarantee against OPT (a fraction of OPT for maximization).
  double predicted_bound = 0.0;
  bool maximize = false;
  double achieved_value = 0.0;
  double achieved_balance = 0.0;
  double balance_limit = 0.0;
  bool balance_ok = true;
  /// achieved_value against predicted_bound * eta (eta * predicted_bound <= achieved when maximizing).
  bool bound_ok = true;
  std::optional<double> opt;
  std::vector<int> seed;
  int seed_iterations = 0;
  double seed_certified = 0.0;
  double expected_value = 0.0;
  int samples = 0;
  SolverInfo solver;
  std::vector<std::string> notes;

  Json to_json() const;
};

struct CutResult {
  std::vector<int> U;
  GuaranteeReport report;
};

struct PartitionResult {
  std::vector<std::vector<int>> parts;
  GuaranteeReport report;
};

/// Picks r' from the seed budget ceil(1/eps) * ceil(r/eps) (plus one round for conditioning), capped at n
/// and lowered until the moment matrix fits the budget.
int choose_rounds(int n, int k, int r, double eps_seed, const PipelineOptions& options);

/// eps for the seed loop so that (1 + e) / (1 - e) = 1 + eps.
double seed_eps_for_ratio(double eps);

QipInstance build_bisection(const PartitionProblem& p);
/// Volume equality sum_u (d_u / d_max) x_u(0) = mu / d_max over u outside F.
QipInstance build_sse(const PartitionProblem& p);
QipInstance build_kway(const PartitionProblem& p);
QipInstance build_maxcut(const PartitionProblem& p);

/// Solved relaxation with its seed and rounding distribution, shared by repeated rounding runs.
struct PreparedRounding {
  QipInstance instance;
  std::shared_ptr<const LasserreSolution> solution;
  SeedSet seed;
  std::shared_ptr<const RoundingDistribution> distribution;
  /// Seed labeling used for propagation: smallest conditional expectation.
  int labeling = 0;
  double eta = 0.0;
  double lambda = 0.0;
  double predicted_bound = 0.0;
  std::vector<std::string> notes;
};

PreparedRounding prepare_bisection(const PartitionProblem& p, const PipelineOptions& options = {});
CutResult round_bisection(const PartitionProblem& p, const PreparedRounding& prep, std::uint64_t rng_seed,
                          const PipelineOptions& options = {});
CutResult solve_bisection(const PartitionProblem& p, const PipelineOptions& options = {});

PreparedRounding prepare_sse(const PartitionProblem& p, const PipelineOptions& options = {});
CutResult round_sse(const PartitionProblem& p, const PreparedRounding& prep, std::uint64_t rng_seed,
                    const PipelineOptions& options = {});
/// True when the single-run regime applies: d'_max ln(1/eps) <= mu.
bool sse_single_run(const PartitionProblem& p);
/// {u outside F and B : d_u >= eps^2 mu / ln(1/eps)}.
std::vector<int> sse_heavy_vertices(const PartitionProblem& p);
CutResult solve_sse(const PartitionProblem& p, const PipelineOptions& options = {});

CutResult solve_ratio(const PartitionProblem& p, const PipelineOptions& options = {});

PreparedRounding prepare_kway(const PartitionProblem& p, const PipelineOptions& options = {});
PartitionResult round_kway(const PartitionProblem& p, const PreparedRounding& prep, std::uint64_t rng_seed,
                           const PipelineOptions& options = {});
PartitionResult solve_kway(const PartitionProblem& p, const PipelineOptions& options = {});

/// Guarantee factors for the uncut weight: 1 + (2+eps)/lambda_{r+1}(normalized Laplacian) and
/// (1+eps)/min(lambda_{r+1}(I + normalized adjacency), 1).
std::pair<double, double> maxcut_bounds(const WeightedGraph& g, int r, double eps);
/// Returns U with uncut weight as achieved_value.
CutResult solve_maxcut(const PartitionProblem& p, const PipelineOptions& options = {});

struct IndependentSetPlan {
  std::shared_ptr<const LasserreSolution> solution;
  SeedSet seed;
  std::shared_ptr<const RoundingDistribution> distribution;
  /// Inclusion probabilities p_u.
  std::vector<double> inclusion;
  double xi = 0.0;
  double eta = 0.0;
  double lambda = 0.0;
  /// Fraction of alpha(G) guaranteed in expectation.
  double predicted_fraction = 0.0;
  /// sum_u p_u Pr[u gets label 0] - sum_{uv in E} p_u p_v Pr[both get label 0], exact.
  double expected_lower = 0.0;
};

/// Fraction min{ (1/(2 d_max)) / (1/((1-eps) m) - 1), 1 } with m = min(lambda_{r+1}(I + normalized adjacency), 1).
double independent_set_fraction(const WeightedGraph& g, int r, double eps);
IndependentSetPlan prepare_independent_set(const WeightedGraph& g, double eps, int r,
                                           const PipelineOptions& options = {});
/// One draw of the two-phase rounding.
std::vector<int> sample_independent_set(const WeightedGraph& g, const IndependentSetPlan& plan, Rng& rng);
CutResult solve_independent_set(const WeightedGraph& g, double eps, int r, std::uint64_t rng_seed,
                                const PipelineOptions& options = {});

}  // namespace lhr

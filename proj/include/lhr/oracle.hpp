#pragma once

#include "lhr/graph.hpp"
#include "lhr/lasserre.hpp"
#include "lhr/problems.hpp"
#include "lhr/unique_games.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace lhr {

inline constexpr long long kBruteForceBudget = 10000000;

class EnumerationBudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct BruteForceResult {
  double value = 0.0;
  /// A vertex set for cut and independent set problems, a labeling otherwise.
  std::vector<int> witness;
  long long enumerated = 0;
};

/// Exact optimum of the problem's own objective: cut for bisection and sse (exact target), the ratio for
/// ratio kinds, the weight of edges between parts for kway and the uncut weight for maxcut. Throws Infeasible when
/// nothing is feasible and EnumerationBudgetExceeded above `budget` candidates.
BruteForceResult brute_force(const PartitionProblem& p, long long budget = kBruteForceBudget);
/// Largest independent set (alpha).
BruteForceResult brute_force_independent_set(const WeightedGraph& g, long long budget = kBruteForceBudget);
/// Least unsatisfied weight.
BruteForceResult brute_force_unique_games(const UniqueGamesInstance& inst, long long budget = kBruteForceBudget);
/// Best labeling of x^T A x subject to the instance's linear, forbidden and monomial constraints.
BruteForceResult brute_force_qip(const QipInstance& inst, long long budget = kBruteForceBudget, double tol = 1e-9);

enum class DeltaMode { hoeffding, chernoff };

DeltaMode parse_delta_mode(const std::string& name);

/// Deviation radius for a weighted sum of independent Bernoullis:
///   hoeffding  sqrt(||a||_2^2 ln(2/eps) / 2)
///   chernoff   2 sqrt(||a||_inf mu ln(2/eps)), needs a >= 0 and ||a||_inf <= mu / ln(1/eps).
double delta_eps(const std::vector<double>& a, double mu, double eps, DeltaMode mode);

struct AuditResult {
  bool pass = true;
  /// Names of the failed clauses: "relaxation", "ratio", "balance".
  std::vector<std::string> violations;
  /// bound * opt - achieved (achieved - bound * opt when maximizing).
  double ratio_margin = 0.0;
  double relaxation_margin = 0.0;
};

struct AuditTolerances {
  double relaxation = 1e-5;
  double ratio = 1e-6;
  bool check_balance = true;
};

AuditResult audit(const GuaranteeReport& report, double opt, const AuditTolerances& tol = {});

std::string audit_csv_header();
std::string audit_csv_row(const std::string& instance_id, const GuaranteeReport& report, double opt,
                          const AuditResult& result);

}  // namespace lhr

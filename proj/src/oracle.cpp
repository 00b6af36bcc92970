#include "lhr/oracle.hpp"

#include "lhr/json_writer.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

namespace lhr {

namespace {

constexpr double kTieTol = 1e-12;

long long checked_count(int n, int k, long long budget) {
  double c = std::pow(static_cast<double>(k), static_cast<double>(n));
  if (c > static_cast<double>(budget)) {
    throw EnumerationBudgetExceeded("brute force: " + format_double(c) + " candidates exceed the budget of " +
                                    std::to_string(budget));
  }
  return static_cast<long long>(std::llround(c));
}

std::uint32_t mask_of(const std::vector<int>& S) {
  std::uint32_t m = 0;
  for (int u : S) m |= 1u << u;
  return m;
}

std::vector<int> set_of(std::uint32_t mask, int n) {
  std::vector<int> U;
  for (int u = 0; u < n; ++u)
    if ((mask >> u) & 1u) U.push_back(u);
  return U;
}

double cut_of(const WeightedGraph& g, std::uint32_t mask) {
  double c = 0.0;
  for (const Edge& e : g.edges())
    if (((mask >> e.u) & 1u) != ((mask >> e.v) & 1u)) c += e.w;
  return c;
}

double volume_of(const Eigen::VectorXd& d, std::uint32_t mask) {
  double v = 0.0;
  for (int u = 0; u < d.size(); ++u)
    if ((mask >> u) & 1u) v += d(u);
  return v;
}

/// Advances a base-k counter; false after the last labeling.
bool next_labeling(std::vector<int>& f, int k) {
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (++f[i] < k) return true;
    f[i] = 0;
  }
  return false;
}

BruteForceResult cut_search(const PartitionProblem& p, long long budget) {
  const WeightedGraph& g = p.graph;
  const int n = g.n();
  if (n > 30) throw EnumerationBudgetExceeded("brute force: too many vertices");
  const long long total = checked_count(n, 2, budget);
  const std::uint32_t fmask = mask_of(p.F), bmask = mask_of(p.B);
  const Eigen::VectorXd d = g.degrees();
  const double W = g.total_weight();
  const bool ratio = is_ratio_kind(p.kind);
  const CutObjective obj = ratio ? ratio_objective(p.kind) : CutObjective::cut;
  BruteForceResult best;
  best.value = std::numeric_limits<double>::infinity();
  bool found = false;
  for (long long m = 0; m < total; ++m) {
    const auto mask = static_cast<std::uint32_t>(m);
    if ((mask & fmask) != fmask || (mask & bmask) != 0) continue;
    const std::uint32_t free_part = mask & ~fmask;
    double value;
    switch (p.kind) {
      case ProblemKind::bisection:
        if (std::abs(std::popcount(free_part) - p.mu) > 1e-9) continue;
        value = cut_of(g, mask);
        break;
      case ProblemKind::sse:
        if (std::abs(volume_of(d, free_part) - p.mu) > 1e-9) continue;
        value = cut_of(g, mask);
        break;
      case ProblemKind::maxcut:
        if (p.mu > 0.0 && std::abs(std::popcount(mask) - p.mu) > 1e-9) continue;
        value = W - cut_of(g, mask);
        break;
      default:
        if (!ratio) throw std::invalid_argument("brute force: unsupported kind");
        if (mask == 0 || std::popcount(mask) == n) continue;
        value = evaluate_cut(g, set_of(mask, n), obj);
        break;
    }
    ++best.enumerated;
    if (!found || value < best.value - kTieTol) {
      best.value = value;
      best.witness = set_of(mask, n);
      found = true;
    }
  }
  if (!found) throw Infeasible("brute force: no feasible set");
  return best;
}

BruteForceResult kway_search(const PartitionProblem& p, long long budget) {
  const WeightedGraph& g = p.graph;
  const int n = g.n();
  const int k = static_cast<int>(p.mu_list.size());
  checked_count(n, k, budget);
  std::vector<int> f(n, 0);
  BruteForceResult best;
  bool found = false;
  do {
    std::vector<int> sizes(k, 0);
    for (int l : f) ++sizes[l];
    if (sizes != p.mu_list) continue;
    double value = 0.0;
    for (const Edge& e : g.edges())
      if (f[e.u] != f[e.v]) value += e.w;
    ++best.enumerated;
    if (!found || value < best.value - kTieTol) {
      best.value = value;
      best.witness = f;
      found = true;
    }
  } while (next_labeling(f, k));
  if (!found) throw Infeasible("brute force: no feasible partition");
  return best;
}

}  // namespace

BruteForceResult brute_force(const PartitionProblem& p, long long budget) {
  p.validate();
  if (p.kind == ProblemKind::kway) return kway_search(p, budget);
  return cut_search(p, budget);
}

BruteForceResult brute_force_independent_set(const WeightedGraph& g, long long budget) {
  const int n = g.n();
  if (n > 30) throw EnumerationBudgetExceeded("brute force: too many vertices");
  const long long total = checked_count(n, 2, budget);
  BruteForceResult best;
  best.value = -1.0;
  for (long long m = 0; m < total; ++m) {
    const auto mask = static_cast<std::uint32_t>(m);
    bool independent = true;
    for (const Edge& e : g.edges())
      if (((mask >> e.u) & 1u) && ((mask >> e.v) & 1u)) {
        independent = false;
        break;
      }
    if (!independent) continue;
    ++best.enumerated;
    const int size = std::popcount(mask);
    if (size > best.value) {
      best.value = size;
      best.witness = set_of(mask, n);
    }
  }
  return best;
}

BruteForceResult brute_force_unique_games(const UniqueGamesInstance& inst, long long budget) {
  inst.validate();
  const int n = inst.graph.n();
  checked_count(n, inst.k, budget);
  std::vector<int> f(n, 0);
  BruteForceResult best;
  bool found = false;
  do {
    double v = inst.unsatisfied(f);
    ++best.enumerated;
    if (!found || v < best.value - kTieTol) {
      best.value = v;
      best.witness = f;
      found = true;
    }
  } while (next_labeling(f, inst.k));
  return best;
}

BruteForceResult brute_force_qip(const QipInstance& inst, long long budget, double tol) {
  inst.validate();
  const int n = inst.n, k = inst.k;
  checked_count(n, k, budget);
  const auto monomials = inst.all_monomials();
  std::vector<int> f(n, 0);
  std::vector<int> cols(n);
  BruteForceResult best;
  bool found = false;
  do {
    bool ok = true;
    for (const auto& mc : monomials) {
      bool all = true;
      for (int u : assignment_vertices(mc.monomial))
        if (f[u] != label_of(mc.monomial, u)) all = false;
      if ((all ? 1 : 0) != mc.value) {
        ok = false;
        break;
      }
    }
    for (std::size_t c = 0; ok && c < inst.linear.size(); ++c) {
      const auto& lc = inst.linear[c];
      double lhs = 0.0;
      for (const auto& [u, j, coef] : lc.terms)
        if (f[u] == j) lhs += coef;
      ok = lc.sense == LinearConstraint::Sense::eq ? std::abs(lhs - lc.rhs) <= tol : lhs >= lc.rhs - tol;
    }
    if (!ok) continue;
    for (int u = 0; u < n; ++u) cols[u] = column_index(n, u, f[u]);
    double v = 0.0;
    for (int a : cols)
      for (int b : cols) v += inst.objective(a, b);
    ++best.enumerated;
    const bool improves = inst.maximize ? v > best.value + kTieTol : v < best.value - kTieTol;
    if (!found || improves) {
      best.value = v;
      best.witness = f;
      found = true;
    }
  } while (next_labeling(f, k));
  if (!found) throw Infeasible("brute force: no feasible labeling");
  return best;
}

DeltaMode parse_delta_mode(const std::string& name) {
  if (name == "hoeffding") return DeltaMode::hoeffding;
  if (name == "chernoff") return DeltaMode::chernoff;
  throw std::invalid_argument("unknown concentration mode '" + name + "'");
}

double delta_eps(const std::vector<double>& a, double mu, double eps, DeltaMode mode) {
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("delta_eps: eps must lie in (0, 1)");
  if (mode == DeltaMode::hoeffding) {
    double s = 0.0;
    for (double v : a) s += v * v;
    return std::sqrt(s * std::log(2.0 / eps) / 2.0);
  }
  double amax = 0.0;
  for (double v : a) {
    if (v < 0.0) throw std::invalid_argument("delta_eps: chernoff mode needs nonnegative weights");
    amax = std::max(amax, v);
  }
  if (amax > mu / std::log(1.0 / eps) * (1.0 + 1e-12)) {
    throw std::invalid_argument("delta_eps: chernoff mode needs max weight <= mu / ln(1/eps)");
  }
  return 2.0 * std::sqrt(amax * mu * std::log(2.0 / eps));
}

AuditResult audit(const GuaranteeReport& report, double opt, const AuditTolerances& tol) {
  AuditResult res;
  if (report.maximize) {
    res.relaxation_margin = report.eta - opt;
    if (res.relaxation_margin < -tol.relaxation) res.violations.push_back("relaxation");
    res.ratio_margin = report.achieved_value - report.predicted_bound * opt;
    if (res.ratio_margin < -tol.ratio) res.violations.push_back("ratio");
  } else {
    res.relaxation_margin = opt - report.eta;
    if (res.relaxation_margin < -tol.relaxation) res.violations.push_back("relaxation");
    if (std::isfinite(report.predicted_bound)) {
      res.ratio_margin = report.predicted_bound * opt - report.achieved_value;
      if (res.ratio_margin < -tol.ratio) res.violations.push_back("ratio");
    } else {
      res.ratio_margin = std::numeric_limits<double>::infinity();
    }
  }
  if (tol.check_balance && !report.balance_ok) res.violations.push_back("balance");
  res.pass = res.violations.empty();
  return res;
}

std::string audit_csv_header() { return "instance-id,kind,n,k,r,eps,eta,lambda,bound,achieved,opt,balance_dev,pass"; }

std::string audit_csv_row(const std::string& instance_id, const GuaranteeReport& report, double opt,
                          const AuditResult& result) {
  std::string id = instance_id;
  std::replace(id.begin(), id.end(), ',', ';');
  std::string row = id + "," + report.kind + "," + std::to_string(report.n) + "," + std::to_string(report.k) + "," +
                    std::to_string(report.r) + "," + format_double(report.eps) + "," + format_double(report.eta) + "," +
                    format_double(report.lambda_r1) + "," + format_double(report.predicted_bound) + "," +
                    format_double(report.achieved_value) + "," + format_double(opt) + "," +
                    format_double(report.achieved_balance) + "," + (result.pass ? "true" : "false");
  return row;
}

}  // namespace lhr

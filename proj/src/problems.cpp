#include "lhr/problems.hpp"

#include "lhr/colsel.hpp"
#include "lhr/unique_games.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <set>
#include <thread>

namespace lhr {

namespace {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kBoundTol = 1e-6;

double ln_inv(double eps) { return std::log(1.0 / eps); }

int sample_count(int n, double eps, const PipelineOptions& o) {
  if (o.samples > 0) return o.samples;
  return static_cast<int>(std::ceil((std::log(std::max(n, 1)) + 3.0) / eps - 1e-12));
}

double lambda_of(const WeightedGraph& g, int r) { return spectrum(normalized_laplacian(g)).lambda(r + 1); }

/// (1 + eps) / min(lambda, 1), infinite when lambda vanishes.
double ratio_factor(double eps, double lambda) {
  double m = std::min(lambda, 1.0);
  return m > 1e-12 ? (1.0 + eps) / m : kInf;
}

double bound_target(double factor, double eta) { return std::isfinite(factor) ? factor * std::max(eta, 0.0) : kInf; }

void check_vertices(int n, const std::vector<int>& S, const char* name) {
  std::set<int> seen;
  for (int u : S) {
    if (u < 0 || u >= n) throw std::invalid_argument(std::string(name) + " contains a vertex out of range");
    if (!seen.insert(u).second) throw std::invalid_argument(std::string(name) + " repeats a vertex");
  }
}

std::vector<char> membership(int n, const std::vector<int>& S) {
  std::vector<char> in(n, 0);
  for (int u : S) in[u] = 1;
  return in;
}

std::vector<int> side_of(const std::vector<int>& labels, int label) {
  std::vector<int> U;
  for (int u = 0; u < static_cast<int>(labels.size()); ++u)
    if (labels[u] == label) U.push_back(u);
  return U;
}

double free_volume(const WeightedGraph& g, const std::vector<int>& F, const std::vector<int>& B) {
  auto inF = membership(g.n(), F), inB = membership(g.n(), B);
  double v = 0.0;
  for (int u = 0; u < g.n(); ++u)
    if (!inF[u] && !inB[u]) v += g.degree(u);
  return v;
}

double free_max_degree(const WeightedGraph& g, const std::vector<int>& F, const std::vector<int>& B) {
  auto inF = membership(g.n(), F), inB = membership(g.n(), B);
  double d = 0.0;
  for (int u = 0; u < g.n(); ++u)
    if (!inF[u] && !inB[u]) d = std::max(d, g.degree(u));
  return d;
}

Mat first_block(const Mat& L, int k) {
  const int n = static_cast<int>(L.rows());
  Mat A = Mat::Zero(n * k, n * k);
  A.topLeftCorner(n, n) = L;
  return A;
}

void add_pins(QipInstance& q, const std::vector<int>& F, const std::vector<int>& B) {
  for (int u : F) q.forbidden.emplace_back(u, 1);
  for (int u : B) q.forbidden.emplace_back(u, 0);
}

SolveOptions solve_options(const PipelineOptions& o) {
  SolveOptions so;
  so.budget = o.budget;
  so.sdp = o.sdp;
  return so;
}

PreparedRounding prepare_generic(QipInstance inst, const Mat& seed_L, int r_seed, double eps, double lambda,
                                 const PipelineOptions& o) {
  PreparedRounding prep;
  const double eps_seed = seed_eps_for_ratio(eps);
  const int R = choose_rounds(inst.n, inst.k, r_seed, eps_seed, o);
  auto x = std::make_shared<LasserreSolution>(solve_sdp(inst, R, solve_options(o)));
  SeedOptions so;
  so.stop_at_capacity = true;
  prep.seed = select_seed(*x, seed_L, r_seed, eps_seed, so);
  if (prep.seed.capacity_reached) {
    prep.notes.push_back("seed selection stopped at the capacity of r' = " + std::to_string(R));
  }
  auto dist = std::make_shared<RoundingDistribution>(*x, prep.seed.S_star);
  prep.labeling = dist->best_labeling(inst.objective, inst.maximize);
  // A seed grown for the full ceil(1/eps) augmentations often conditions better than the early stop.
  so.min_iterations = static_cast<int>(std::ceil(1.0 / eps_seed - 1e-12));
  if (prep.seed.iterations < so.min_iterations && !prep.seed.capacity_reached) {
    SeedSet longer = select_seed(*x, seed_L, r_seed, eps_seed, so);
    if (longer.S_star.size() > prep.seed.S_star.size()) {
      auto d2 = std::make_shared<RoundingDistribution>(*x, longer.S_star);
      const int f2 = d2->best_labeling(inst.objective, inst.maximize);
      const double ce = dist->conditional_expectation(prep.labeling, inst.objective);
      const double ce2 = d2->conditional_expectation(f2, inst.objective);
      if (inst.maximize ? ce2 > ce + 1e-9 : ce2 < ce - 1e-9) {
        prep.seed = std::move(longer);
        dist = d2;
        prep.labeling = f2;
        prep.notes.push_back("seed grown past the stopping rule; its conditional expectation is lower");
      }
    }
  }
  prep.eta = x->objective_value();
  prep.lambda = lambda;
  prep.predicted_bound = ratio_factor(eps, lambda);
  prep.solution = x;
  prep.distribution = dist;
  prep.instance = std::move(inst);
  return prep;
}

struct Attempt {
  std::vector<int> labels;
  double value = kInf;
  double selection = kInf;  // what the samples are ranked by; defaults to value
  // Distance from the exact size or volume target; ranked before selection inside a tier.
  double miss = 0.0;
  double balance_dev = 0.0;
  double balance_limit = 0.0;
  bool balance_ok = true;
  bool bound_ok = true;
};

int tier(const Attempt& a) { return a.balance_ok && a.bound_ok ? 0 : (a.balance_ok ? 1 : 2); }

bool better(const Attempt& a, const Attempt& b) {
  int ta = tier(a), tb = tier(b);
  if (ta != tb) return ta < tb;
  if (std::abs(a.miss - b.miss) > 1e-9) return a.miss < b.miss;
  return a.selection < b.selection - 1e-12;
}

/// Resamples from the chosen seed labeling and keeps the best attempt.
template <class Eval>
Attempt retry_loop(const PreparedRounding& prep, int T, std::uint64_t rng_seed, Eval eval) {
  Rng rng(rng_seed);
  Attempt best;
  bool have = false;
  for (int t = 0; t < T; ++t) {
    Attempt a = eval(prep.distribution->sample_given(prep.labeling, rng));
    if (!have || better(a, best)) {
      best = std::move(a);
      have = true;
    }
  }
  return best;
}

GuaranteeReport base_report(const std::string& kind, const PreparedRounding& prep, int r, double eps) {
  GuaranteeReport rep;
  rep.kind = kind;
  rep.n = prep.instance.n;
  rep.k = prep.instance.k;
  rep.r = r;
  rep.r_prime = prep.solution->r_prime();
  rep.eps = eps;
  rep.eta = prep.eta;
  rep.lambda = prep.lambda;
  rep.lambda_r1 = std::min(prep.lambda, 1.0);
  rep.predicted_bound = prep.predicted_bound;
  rep.seed = prep.seed.S_star;
  rep.seed_iterations = prep.seed.iterations;
  rep.seed_certified = prep.seed.certified_bound;
  rep.expected_value = prep.distribution->conditional_expectation(prep.labeling, prep.instance.objective);
  rep.solver = prep.solution->info();
  rep.notes = prep.notes;
  return rep;
}

void apply_attempt(GuaranteeReport& rep, const Attempt& a, int T) {
  rep.achieved_value = a.value;
  rep.achieved_balance = a.balance_dev;
  rep.balance_limit = a.balance_limit;
  rep.balance_ok = a.balance_ok;
  rep.bound_ok = a.bound_ok;
  rep.samples = T;
}

/// Cut rounding shared by bisection and SSE: U = label 0, balance measured by `weight` outside F.
Attempt cut_attempt(const PartitionProblem& p, const PreparedRounding& prep, const std::vector<int>& labels,
                    const Vec& weight, double target, double limit) {
  Attempt a;
  a.labels = labels;
  std::vector<int> U = side_of(labels, 0);
  a.value = cut_value(p.graph, U).cut_weight;
  a.selection = a.value;
  auto inF = membership(p.graph.n(), p.F);
  double size = 0.0;
  for (int u : U)
    if (!inF[u]) size += weight(u);
  a.balance_dev = std::abs(size - target);
  a.miss = a.balance_dev;
  a.balance_limit = limit;
  a.balance_ok = a.balance_dev <= limit + 1e-9;
  a.bound_ok = a.value <= bound_target(prep.predicted_bound, prep.eta) + kBoundTol;
  return a;
}

CutResult round_cut(const PartitionProblem& p, const PreparedRounding& prep, std::uint64_t rng_seed,
                    const PipelineOptions& o, const Vec& weight, double limit, const std::string& kind) {
  const int T = sample_count(p.graph.n(), p.eps, o);
  Attempt best = retry_loop(prep, T, rng_seed, [&](const std::vector<int>& labels) {
    return cut_attempt(p, prep, labels, weight, p.mu, limit);
  });
  GuaranteeReport rep = base_report(kind, prep, p.r, p.eps);
  apply_attempt(rep, best, T);
  rep.notes.push_back("lambda computed on the full graph");
  return {side_of(best.labels, 0), rep};
}

/// Runs fn(0..count-1) on up to `jobs` threads; results keep their index order.
template <class Fn>
auto parallel_map(std::size_t count, int jobs, Fn fn) -> std::vector<decltype(fn(std::size_t{}))> {
  std::vector<decltype(fn(std::size_t{}))> out(count);
  const std::size_t workers = std::min<std::size_t>(std::max(jobs, 1), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) out[i] = fn(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(count);
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          out[i] = fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

std::vector<std::uint32_t> bounded_masks(int bits, long long cap, bool& partial) {
  std::vector<std::uint32_t> out;
  const long long total = bits >= 62 ? std::numeric_limits<long long>::max() : (1LL << bits);
  partial = total > cap;
  const long long lim = std::min(total, cap);
  for (long long m = 0; m < lim; ++m) out.push_back(static_cast<std::uint32_t>(m));
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

ProblemKind parse_problem_kind(std::string_view name) {
  if (name == "bisection" || name == "bisect") return ProblemKind::bisection;
  if (name == "sse") return ProblemKind::sse;
  if (name == "sparsest") return ProblemKind::sparsest;
  if (name == "expansion") return ProblemKind::expansion;
  if (name == "ncut") return ProblemKind::ncut;
  if (name == "conductance") return ProblemKind::conductance;
  if (name == "kway") return ProblemKind::kway;
  if (name == "maxcut") return ProblemKind::maxcut;
  throw std::invalid_argument("unknown problem kind '" + std::string(name) + "'");
}

std::string to_string(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::bisection: return "bisection";
    case ProblemKind::sse: return "sse";
    case ProblemKind::sparsest: return "sparsest";
    case ProblemKind::expansion: return "expansion";
    case ProblemKind::ncut: return "ncut";
    case ProblemKind::conductance: return "conductance";
    case ProblemKind::kway: return "kway";
    case ProblemKind::maxcut: return "maxcut";
  }
  return "?";
}

bool is_ratio_kind(ProblemKind kind) {
  return kind == ProblemKind::sparsest || kind == ProblemKind::expansion || kind == ProblemKind::ncut ||
         kind == ProblemKind::conductance;
}

CutObjective ratio_objective(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::sparsest: return CutObjective::sparsest;
    case ProblemKind::expansion: return CutObjective::expansion;
    case ProblemKind::ncut: return CutObjective::ncut;
    case ProblemKind::conductance: return CutObjective::conductance;
    default: throw std::invalid_argument("not a ratio objective: " + to_string(kind));
  }
}

void PartitionProblem::validate() const {
  const int n = graph.n();
  if (n < 1) throw std::invalid_argument("problem: graph has no vertices");
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("problem: eps must lie in (0, 1)");
  if (r < 1) throw std::invalid_argument("problem: r must be positive");
  check_vertices(n, F, "F");
  check_vertices(n, B, "B");
  auto inF = membership(n, F);
  for (int u : B)
    if (inF[u]) throw std::invalid_argument("problem: F and B intersect");
  const double free_count = n - static_cast<double>(F.size() + B.size());
  switch (kind) {
    case ProblemKind::bisection:
      if (!(mu >= 0.0) || mu > free_count + 1e-9 || std::abs(mu - std::round(mu)) > 1e-9)
        throw std::invalid_argument("bisection: mu must be an integer in [0, |V \\ (F u B)|]");
      break;
    case ProblemKind::sse:
      if (graph.max_degree() <= 0.0) throw std::invalid_argument("sse: graph has no edges");
      if (!(mu > 0.0) || mu > free_volume(graph, F, B) + 1e-9)
        throw std::invalid_argument("sse: mu must lie in (0, Vol(V \\ (F u B))]");
      break;
    case ProblemKind::kway: {
      if (!F.empty() || !B.empty()) throw std::invalid_argument("kway: F and B are not supported");
      if (mu_list.size() < 2 || mu_list.size() > static_cast<std::size_t>(kMaxLabels))
        throw std::invalid_argument("kway: need between 2 and 16 part sizes");
      long long s = 0;
      for (int m : mu_list) {
        if (m < 0) throw std::invalid_argument("kway: part sizes must be nonnegative");
        s += m;
      }
      if (s != n) throw std::invalid_argument("kway: part sizes must sum to n");
      break;
    }
    case ProblemKind::maxcut:
      if (!F.empty() || !B.empty()) throw std::invalid_argument("maxcut: F and B are not supported");
      if (mu < 0.0 || mu > n || std::abs(mu - std::round(mu)) > 1e-9)
        throw std::invalid_argument("maxcut: mu must be an integer in [0, n]");
      break;
    default:
      if (n < 2) throw std::invalid_argument("ratio objectives need at least two vertices");
      break;
  }
}

PartitionProblem parse_problem_config(const Json& config, WeightedGraph graph) {
  if (!config.is_object()) throw std::invalid_argument("problem config must be an object");
  PartitionProblem p;
  p.graph = std::move(graph);
  for (auto it = config.begin(); it != config.end(); ++it) {
    const std::string& key = it.key();
    const Json& v = it.value();
    try {
      if (key == "kind") {
        p.kind = parse_problem_kind(v.get<std::string>());
      } else if (key == "mu") {
        if (v.is_array()) {
          p.mu_list = v.get<std::vector<int>>();
        } else {
          p.mu = v.get<double>();
        }
      } else if (key == "F") {
        p.F = v.get<std::vector<int>>();
      } else if (key == "B") {
        p.B = v.get<std::vector<int>>();
      } else if (key == "eps") {
        p.eps = v.get<double>();
      } else if (key == "r") {
        p.r = v.get<int>();
      } else if (key == "rng-seed" || key == "rng_seed") {
        p.rng_seed = v.get<std::uint64_t>();
      } else {
        throw std::invalid_argument("unknown config key '" + key + "'");
      }
    } catch (const nlohmann::json::exception& e) {
      throw std::invalid_argument("config key '" + key + "': " + e.what());
    }
  }
  p.validate();
  return p;
}

long long budget_from_environment() {
  const char* s = std::getenv("LASSERRE_BUDGET");
  if (s == nullptr || *s == '\0') return kDefaultMatrixBudget;
  char* end = nullptr;
  long long v = std::strtoll(s, &end, 10);
  if (*end != '\0' || v <= 0) throw std::invalid_argument("LASSERRE_BUDGET must be a positive integer");
  return v;
}

Json GuaranteeReport::to_json() const {
  Json j;
  j["kind"] = kind;
  j["n"] = n;
  j["k"] = k;
  j["r"] = r;
  j["r_prime"] = r_prime;
  j["eps"] = eps;
  j["eta"] = eta;
  j["lambda"] = lambda;
  j["lambda_r1"] = lambda_r1;
  j["predicted_bound"] = predicted_bound;
  j["maximize"] = maximize;
  j["achieved_value"] = achieved_value;
  j["achieved_balance"] = achieved_balance;
  j["balance_limit"] = balance_limit;
  j["balance_ok"] = balance_ok;
  j["bound_ok"] = bound_ok;
  j["opt"] = opt ? Json(*opt) : Json(nullptr);
  j["seed"] = seed;
  j["seed_iterations"] = seed_iterations;
  j["seed_certified"] = seed_certified;
  j["expected_value"] = expected_value;
  j["samples"] = samples;
  Json s;
  s["status"] = solver.status;
  s["iterations"] = solver.iterations;
  s["relative_gap"] = solver.relative_gap;
  s["primal_infeasibility"] = solver.primal_infeasibility;
  s["dual_infeasibility"] = solver.dual_infeasibility;
  s["reduced_side"] = solver.reduced_side;
  s["free_variables"] = solver.free_variables;
  j["solver"] = s;
  j["notes"] = notes;
  return j;
}

int choose_rounds(int n, int k, int r, double eps_seed, const PipelineOptions& options) {
  if (options.r_prime > 0) return std::min(options.r_prime, n);
  const long long per_round = static_cast<long long>(std::ceil(r / eps_seed - 1e-12));
  const long long rounds = static_cast<long long>(std::ceil(1.0 / eps_seed - 1e-12));
  long long R = std::min<long long>(n, per_round * rounds + 1);
  while (R > 1 && solver_side(n, k, static_cast<int>(R)) > options.budget) --R;
  return static_cast<int>(R);
}

double seed_eps_for_ratio(double eps) { return eps / (2.0 + eps); }

// ---------------------------------------------------------------------------
// Bisection

QipInstance build_bisection(const PartitionProblem& p) {
  p.validate();
  const int n = p.graph.n();
  QipInstance q;
  q.n = n;
  q.k = 2;
  q.objective = first_block(p.graph.laplacian(), 2);
  LinearConstraint c;
  auto inF = membership(n, p.F);
  for (int u = 0; u < n; ++u)
    if (!inF[u]) c.terms.emplace_back(u, 0, 1.0);
  c.rhs = p.mu;
  q.linear.push_back(c);
  add_pins(q, p.F, p.B);
  return q;
}

PreparedRounding prepare_bisection(const PartitionProblem& p, const PipelineOptions& options) {
  QipInstance q = build_bisection(p);
  Mat seed_L = q.objective;
  return prepare_generic(std::move(q), seed_L, p.r, p.eps, lambda_of(p.graph, p.r), options);
}

CutResult round_bisection(const PartitionProblem& p, const PreparedRounding& prep, std::uint64_t rng_seed,
                          const PipelineOptions& options) {
  const double limit = 2.0 * std::sqrt(p.mu * ln_inv(p.eps));
  return round_cut(p, prep, rng_seed, options, Vec::Ones(p.graph.n()), limit, "bisection");
}

CutResult solve_bisection(const PartitionProblem& p, const PipelineOptions& options) {
  PreparedRounding prep = prepare_bisection(p, options);
  return round_bisection(p, prep, p.rng_seed, options);
}

// ---------------------------------------------------------------------------
// Small set expansion

QipInstance build_sse(const PartitionProblem& p) {
  p.validate();
  const int n = p.graph.n();
  const double dmax = p.graph.max_degree();
  QipInstance q;
  q.n = n;
  q.k = 2;
  q.objective = first_block(p.graph.laplacian(), 2);
  LinearConstraint c;
  auto inF = membership(n, p.F);
  for (int u = 0; u < n; ++u) {
    double d = p.graph.degree(u);
    if (!inF[u] && d > 0.0) c.terms.emplace_back(u, 0, d / dmax);
  }
  c.rhs = p.mu / dmax;
  q.linear.push_back(c);
  add_pins(q, p.F, p.B);
  return q;
}

PreparedRounding prepare_sse(const PartitionProblem& p, const PipelineOptions& options) {
  QipInstance q = build_sse(p);
  Mat seed_L = q.objective;
  return prepare_generic(std::move(q), seed_L, p.r, p.eps, lambda_of(p.graph, p.r), options);
}

CutResult round_sse(const PartitionProblem& p, const PreparedRounding& prep, std::uint64_t rng_seed,
                    const PipelineOptions& options) {
  const double limit = 2.0 * std::sqrt(free_max_degree(p.graph, p.F, p.B) * p.mu * ln_inv(p.eps));
  return round_cut(p, prep, rng_seed, options, p.graph.degrees(), limit, "sse");
}

bool sse_single_run(const PartitionProblem& p) { return free_max_degree(p.graph, p.F, p.B) * ln_inv(p.eps) <= p.mu; }

std::vector<int> sse_heavy_vertices(const PartitionProblem& p) {
  const double threshold = p.eps * p.eps * p.mu / ln_inv(p.eps);
  auto inF = membership(p.graph.n(), p.F), inB = membership(p.graph.n(), p.B);
  std::vector<int> H;
  for (int u = 0; u < p.graph.n(); ++u)
    if (!inF[u] && !inB[u] && p.graph.degree(u) >= threshold) H.push_back(u);
  return H;
}

CutResult solve_sse(const PartitionProblem& p, const PipelineOptions& options) {
  p.validate();
  if (sse_single_run(p)) {
    CutResult res = round_sse(p, prepare_sse(p, options), p.rng_seed, options);
    res.report.notes.push_back("single run: d'_max ln(1/eps) <= mu");
    return res;
  }
  const int n = p.graph.n();
  const std::vector<int> H = sse_heavy_vertices(p);
  const double limit = 2.0 * p.eps * p.mu;
  const double lambda = lambda_of(p.graph, p.r);
  const double factor = ratio_factor(p.eps, lambda);
  const Vec deg = p.graph.degrees();
  constexpr long long kBranchCap = 1LL << 16;
  bool partial = false;
  const auto masks = bounded_masks(static_cast<int>(H.size()), kBranchCap, partial);

  auto branch = [&](std::size_t i) -> std::optional<CutResult> {
    std::vector<int> U0, rest;
    for (std::size_t b = 0; b < H.size(); ++b) ((masks[i] >> b) & 1u ? U0 : rest).push_back(H[b]);
    const double vol0 = p.graph.volume(U0);
    if (vol0 > p.mu + 1e-9) return std::nullopt;
    PartitionProblem sub = p;
    sub.F.insert(sub.F.end(), U0.begin(), U0.end());
    sub.B.insert(sub.B.end(), rest.begin(), rest.end());
    sub.mu = p.mu - vol0;
    if (sub.mu <= 1e-9) {
      // Nothing left to choose: U = F'.
      CutResult cand;
      cand.U = sub.F;
      std::sort(cand.U.begin(), cand.U.end());
      GuaranteeReport& rep = cand.report;
      rep.kind = "sse";
      rep.n = n;
      rep.r = p.r;
      rep.eps = p.eps;
      rep.achieved_value = cut_value(p.graph, cand.U).cut_weight;
      rep.eta = rep.achieved_value;
      rep.achieved_balance = std::abs(vol0 - p.mu);
      rep.balance_limit = limit;
      rep.balance_ok = true;
      return cand;
    }
    if (sub.mu > free_volume(p.graph, sub.F, sub.B) + 1e-9) return std::nullopt;
    try {
      PreparedRounding prep = prepare_sse(sub, options);
      return round_cut(sub, prep, p.rng_seed, options, deg, limit, "sse");
    } catch (const Infeasible&) {
    } catch (const SolverError&) {
    }
    return std::nullopt;
  };
  auto results = parallel_map(masks.size(), options.jobs, branch);

  std::optional<CutResult> best;
  double eta_min = kInf;
  int branches = 0;
  for (auto& cand : results) {
    if (!cand) continue;
    ++branches;
    eta_min = std::min(eta_min, cand->report.eta);
    const bool ok = cand->report.balance_ok;
    if (!best || (ok && !best->report.balance_ok) ||
        (ok == best->report.balance_ok && cand->report.achieved_value < best->report.achieved_value - 1e-12)) {
      best = std::move(cand);
    }
  }
  if (!best) throw Infeasible("sse: no feasible branch over the high-degree vertices");
  CutResult res = std::move(*best);
  GuaranteeReport& rep = res.report;
  rep.eta = eta_min;
  rep.lambda = lambda;
  rep.lambda_r1 = std::min(lambda, 1.0);
  rep.predicted_bound = factor;
  rep.balance_limit = limit;
  rep.bound_ok = rep.achieved_value <= bound_target(factor, eta_min) + kBoundTol;
  rep.notes.push_back("enumerated " + std::to_string(branches) + " branches over " + std::to_string(H.size()) +
                      " high-degree vertices");
  if (partial) rep.notes.push_back("branch enumeration capped at 65536 subsets; result is partial");
  return res;
}

// ---------------------------------------------------------------------------
// Ratio objectives

namespace {

/// One denominator guess: a cut instance whose value bounds the ratio numerator.
struct RatioGuess {
  QipInstance instance;
  double denominator_cap = 0.0;
  Vec weight;
  double target = 0.0;
  double limit = 0.0;
  bool count_F = false;
};

struct GuessOutcome {
  CutResult result;
  double eta_over_denominator = kInf;
  bool failed = false;
};

}  // namespace

CutResult solve_ratio(const PartitionProblem& p, const PipelineOptions& options) {
  if (!is_ratio_kind(p.kind)) throw std::invalid_argument("solve_ratio: kind must be a ratio objective");
  p.validate();
  const WeightedGraph& g = p.graph;
  const int n = g.n();
  const CutObjective obj = ratio_objective(p.kind);
  const double lambda = lambda_of(g, p.r);
  const double factor = ratio_factor(p.eps, lambda);
  const bool pinned = !p.F.empty() || !p.B.empty();
  const int T = sample_count(n, p.eps, options);
  const auto inF = membership(n, p.F);

  std::vector<RatioGuess> guesses;
  if (p.kind == ProblemKind::sparsest || p.kind == ProblemKind::expansion) {
    const int free_count = n - static_cast<int>(p.F.size() + p.B.size());
    const int fsize = static_cast<int>(p.F.size());
    const int hi = pinned ? free_count : n / 2;
    for (int m = 0; m <= hi; ++m) {
      const int s = fsize + m;
      if (s < 1 || s > n - 1) continue;
      PartitionProblem sub = p;
      sub.kind = ProblemKind::bisection;
      sub.mu = m;
      RatioGuess gs;
      gs.instance = build_bisection(sub);
      gs.denominator_cap = p.kind == ProblemKind::sparsest ? static_cast<double>(s) * (n - s) : std::min(s, n - s);
      gs.weight = Vec::Ones(n);
      gs.target = m;
      gs.limit = 2.0 * std::sqrt(m * ln_inv(p.eps));
      guesses.push_back(std::move(gs));
    }
  } else {
    const double m = g.total_volume();
    const double dmax = g.max_degree();
    if (dmax <= 0.0) throw std::invalid_argument("solve_ratio: graph has no edges");
    const double step = p.eps * m / n;
    const int J = static_cast<int>(std::floor((pinned ? n : n / 2.0) / p.eps + 1e-12));
    const double top = pinned ? m : m / 2.0;
    for (int j = 1; j <= J; ++j) {
      const double lo = (j - 1) * step;
      const double up = j == J ? std::max(j * step, top) : j * step;
      QipInstance q;
      q.n = n;
      q.k = 2;
      q.objective = first_block(g.laplacian(), 2);
      LinearConstraint lower, upper, inside, outside;
      lower.sense = upper.sense = inside.sense = outside.sense = LinearConstraint::Sense::geq;
      for (int u = 0; u < n; ++u) {
        double d = g.degree(u);
        if (d > 0.0) {
          lower.terms.emplace_back(u, 0, d / dmax);
          upper.terms.emplace_back(u, 0, -d / dmax);
        }
        inside.terms.emplace_back(u, 0, 1.0);
        outside.terms.emplace_back(u, 1, 1.0);
      }
      lower.rhs = lo / dmax;
      upper.rhs = -up / dmax;
      inside.rhs = 1.0;
      outside.rhs = 1.0;
      q.linear = {lower, upper, inside, outside};
      add_pins(q, p.F, p.B);
      RatioGuess gs;
      gs.instance = std::move(q);
      // Largest denominator any U with volume in the band can have.
      const double x = std::min(up, m / 2.0);
      gs.denominator_cap = p.kind == ProblemKind::conductance ? x : x * (m - x);
      if (pinned) gs.denominator_cap = p.kind == ProblemKind::conductance ? m / 2.0 : m * m / 4.0;
      gs.weight = g.degrees();
      gs.target = 0.5 * (lo + up);
      gs.limit = 0.5 * (up - lo);
      gs.count_F = true;
      guesses.push_back(std::move(gs));
    }
  }

  auto run = [&](std::size_t i) -> std::optional<GuessOutcome> {
    const RatioGuess& gs = guesses[i];
    GuessOutcome out;
    try {
      QipInstance q = gs.instance;
      Mat seed_L = q.objective;
      PreparedRounding prep = prepare_generic(std::move(q), seed_L, p.r, p.eps, lambda, options);
      Attempt a = retry_loop(prep, T, p.rng_seed, [&](const std::vector<int>& labels) {
        Attempt t;
        t.labels = labels;
        std::vector<int> U = side_of(labels, 0);
        const double cut = cut_value(g, U).cut_weight;
        t.value = U.empty() || static_cast<int>(U.size()) == n ? kInf : evaluate_cut(g, U, obj);
        t.selection = t.value;
        double size = 0.0;
        for (int u : U)
          if (gs.count_F || !inF[u]) size += gs.weight(u);
        t.balance_dev = std::abs(size - gs.target);
        t.balance_limit = gs.limit;
        t.balance_ok = t.balance_dev <= gs.limit + 1e-9;
        t.bound_ok = cut <= bound_target(prep.predicted_bound, prep.eta) + kBoundTol;
        return t;
      });
      out.result.U = side_of(a.labels, 0);
      out.result.report = base_report(to_string(p.kind), prep, p.r, p.eps);
      apply_attempt(out.result.report, a, T);
      out.eta_over_denominator = prep.eta / gs.denominator_cap;
    } catch (const Infeasible&) {
      return std::nullopt;
    } catch (const SolverError&) {
      out.failed = true;
    }
    return out;
  };
  auto outcomes = parallel_map(guesses.size(), options.jobs, run);

  std::optional<CutResult> best;
  double eta_ratio = kInf;
  int solved = 0, failed = 0;
  for (auto& o : outcomes) {
    if (!o) continue;
    if (o->failed) {
      ++failed;
      continue;
    }
    ++solved;
    eta_ratio = std::min(eta_ratio, o->eta_over_denominator);
    if (!best || o->result.report.achieved_value < best->report.achieved_value - 1e-12) best = std::move(o->result);
  }
  if (!best) throw Infeasible("solve_ratio: no denominator guess could be solved");
  CutResult res = std::move(*best);
  GuaranteeReport& rep = res.report;
  rep.eta = eta_ratio;
  rep.lambda = lambda;
  rep.lambda_r1 = std::min(lambda, 1.0);
  rep.predicted_bound = factor;
  rep.bound_ok = rep.achieved_value <= bound_target(factor, eta_ratio) + kBoundTol;
  rep.notes.push_back("solved " + std::to_string(solved) + " of " + std::to_string(guesses.size()) +
                      " denominator guesses");
  rep.notes.push_back("eta is the smallest relaxation value divided by its largest denominator");
  if (failed > 0) {
    rep.notes.push_back(std::to_string(failed) + " guesses failed in the solver; eta covers only the solved ones");
  }
  return res;
}

// ---------------------------------------------------------------------------
// k-way partition

QipInstance build_kway(const PartitionProblem& p) {
  p.validate();
  const int n = p.graph.n();
  const int k = static_cast<int>(p.mu_list.size());
  QipInstance q;
  q.n = n;
  q.k = k;
  q.objective = Mat::Zero(n * k, n * k);
  const Mat L = p.graph.laplacian();
  for (int j = 0; j < k; ++j) q.objective.block(j * n, j * n, n, n) = 0.5 * L;
  for (int j = 0; j < k; ++j) {
    LinearConstraint c;
    for (int u = 0; u < n; ++u) c.terms.emplace_back(u, j, 1.0);
    c.rhs = p.mu_list[j];
    q.linear.push_back(c);
  }
  return q;
}

PreparedRounding prepare_kway(const PartitionProblem& p, const PipelineOptions& options) {
  QipInstance q = build_kway(p);
  const int k = q.k;
  Mat seed_L = q.objective;
  return prepare_generic(std::move(q), seed_L, k * p.r, p.eps, lambda_of(p.graph, p.r), options);
}

PartitionResult round_kway(const PartitionProblem& p, const PreparedRounding& prep, std::uint64_t rng_seed,
                           const PipelineOptions& options) {
  const int n = p.graph.n();
  const int k = static_cast<int>(p.mu_list.size());
  const int T = sample_count(n, p.eps, options);
  const double target = bound_target(prep.predicted_bound, prep.eta);
  Attempt best = retry_loop(prep, T, rng_seed, [&](const std::vector<int>& labels) {
    Attempt a;
    a.labels = labels;
    a.value = 0.0;
    std::vector<int> sizes(k, 0);
    for (int l : labels) ++sizes[l];
    double worst = -1.0;
    for (int j = 0; j < k; ++j) {
      a.value += 0.5 * cut_value(p.graph, side_of(labels, j)).cut_weight;
      const double lim = 2.0 * std::sqrt(p.mu_list[j] * std::log(k / p.eps));
      const double dev = std::abs(sizes[j] - p.mu_list[j]);
      a.miss += dev;
      if (dev > lim + 1e-9) a.balance_ok = false;
      const double rel = lim > 0 ? dev / lim : (dev > 0 ? kInf : 0.0);
      if (rel > worst) {
        worst = rel;
        a.balance_dev = dev;
        a.balance_limit = lim;
      }
    }
    a.selection = a.value;
    a.bound_ok = a.value <= target + kBoundTol;
    return a;
  });
  PartitionResult res;
  res.parts.resize(k);
  for (int j = 0; j < k; ++j) res.parts[j] = side_of(best.labels, j);
  res.report = base_report("kway", prep, p.r, p.eps);
  apply_attempt(res.report, best, T);
  res.report.notes.push_back("achieved_value is the weight of edges between different parts");
  return res;
}

PartitionResult solve_kway(const PartitionProblem& p, const PipelineOptions& options) {
  PreparedRounding prep = prepare_kway(p, options);
  return round_kway(p, prep, p.rng_seed, options);
}

// ---------------------------------------------------------------------------
// Max cut (minimum uncut weight)

QipInstance build_maxcut(const PartitionProblem& p) {
  p.validate();
  const int n = p.graph.n();
  QipInstance q;
  q.n = n;
  q.k = 2;
  const Mat D = p.graph.degrees().asDiagonal();
  const Mat A = p.graph.adjacency();
  q.objective = Mat::Zero(2 * n, 2 * n);
  q.objective.topLeftCorner(n, n) = 0.5 * D;
  q.objective.bottomRightCorner(n, n) = 0.5 * D;
  q.objective.topRightCorner(n, n) = -0.5 * A;
  q.objective.bottomLeftCorner(n, n) = -0.5 * A;
  if (p.mu > 0.0) {
    LinearConstraint c;
    for (int u = 0; u < n; ++u) c.terms.emplace_back(u, 0, 1.0);
    c.rhs = p.mu;
    q.linear.push_back(c);
  }
  return q;
}

std::pair<double, double> maxcut_bounds(const WeightedGraph& g, int r, double eps) {
  const double l1 = lambda_of(g, r);
  const double b1 = l1 > 1e-12 ? 1.0 + (2.0 + eps) / l1 : kInf;
  const int n = g.n();
  const Mat IA = Mat::Identity(n, n) + normalized_adjacency(g);
  const double l2 = spectrum(IA).lambda(r + 1);
  return {b1, ratio_factor(eps, l2)};
}

CutResult solve_maxcut(const PartitionProblem& p, const PipelineOptions& options) {
  QipInstance q = build_maxcut(p);
  const WeightedGraph& g = p.graph;
  const int n = g.n();
  const double eps_seed = seed_eps_for_ratio(p.eps);
  const int R = choose_rounds(n, 2, p.r, eps_seed, options);
  auto x = std::make_shared<LasserreSolution>(solve_sdp(q, R, solve_options(options)));
  const auto [b1, b2] = maxcut_bounds(g, p.r, p.eps);
  const bool bisect = p.mu > 0.0;

  PreparedRounding prep;
  prep.solution = x;
  prep.eta = x->objective_value();
  prep.lambda = lambda_of(g, p.r);
  prep.predicted_bound = bisect ? b2 : std::min(b1, b2);

  // Candidate 1: centered vectors weighted by D + A.
  SeedOptions so;
  so.stop_at_capacity = true;
  const Mat DA = Mat(g.degrees().asDiagonal()) + g.adjacency();
  prep.seed = select_seed_centered(*x, DA, p.r, eps_seed, so);
  auto dist = std::make_shared<RoundingDistribution>(*x, prep.seed.S_star);
  prep.labeling = dist->best_labeling(q.objective);
  prep.distribution = dist;
  double best_ce = dist->conditional_expectation(prep.labeling, q.objective);
  std::string chosen = "centered seed";

  // Candidate 2: one column selection on the tensor embedding.
  if (!bisect && g.max_degree() > 0.0) {
    std::vector<int> S = embedding_seed(*x, g, p.r, p.eps);
    auto d2 = std::make_shared<RoundingDistribution>(*x, S);
    int f2 = d2->best_labeling(q.objective);
    double ce2 = d2->conditional_expectation(f2, q.objective);
    if (ce2 < best_ce - 1e-12) {
      best_ce = ce2;
      prep.distribution = d2;
      prep.labeling = f2;
      prep.seed = SeedSet{};
      prep.seed.S_star = d2->seed();
      prep.seed.iterations = 1;
      prep.seed.certified_bound = ce2;
      chosen = "embedding seed";
    }
  }
  if (prep.seed.capacity_reached) prep.notes.push_back("seed selection stopped at the capacity of r' = " + std::to_string(R));
  prep.notes.push_back("rounding used the " + chosen);
  prep.instance = q;

  const int T = sample_count(n, p.eps, options);
  const double target = bound_target(prep.predicted_bound, prep.eta);
  const double total = g.total_weight();
  const double limit = bisect ? 2.0 * std::sqrt(p.mu * ln_inv(p.eps)) : 0.0;
  Attempt best = retry_loop(prep, T, p.rng_seed, [&](const std::vector<int>& labels) {
    Attempt a;
    a.labels = labels;
    std::vector<int> U = side_of(labels, 0);
    a.value = total - cut_value(g, U).cut_weight;
    a.selection = a.value;
    if (bisect) {
      a.balance_dev = std::abs(static_cast<double>(U.size()) - p.mu);
      a.miss = a.balance_dev;
      a.balance_limit = limit;
      a.balance_ok = a.balance_dev <= limit + 1e-9;
    }
    a.bound_ok = a.value <= target + kBoundTol;
    return a;
  });
  GuaranteeReport rep = base_report(bisect ? "maxbisection" : "maxcut", prep, p.r, p.eps);
  apply_attempt(rep, best, T);
  rep.notes.push_back("achieved_value is the uncut weight");
  return {side_of(best.labels, 0), rep};
}

// ---------------------------------------------------------------------------
// Independent set

double independent_set_fraction(const WeightedGraph& g, int r, double eps) {
  const int n = g.n();
  const double dmax = g.max_degree();
  if (dmax <= 0.0) return 1.0;
  const Mat IA = Mat::Identity(n, n) + normalized_adjacency(g);
  const double m = std::min(spectrum(IA).lambda(r + 1), 1.0);
  if (m <= 1e-12) return 0.0;
  const double denom = 1.0 / ((1.0 - eps) * m) - 1.0;
  if (denom <= 0.0) return 1.0;
  return std::min(1.0, (1.0 / (2.0 * dmax)) / denom);
}

IndependentSetPlan prepare_independent_set(const WeightedGraph& g, double eps, int r, const PipelineOptions& options) {
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("independent set: eps must lie in (0, 1)");
  if (r < 1) throw std::invalid_argument("independent set: r must be positive");
  const int n = g.n();
  if (n < 1) throw std::invalid_argument("independent set: graph has no vertices");
  QipInstance q;
  q.n = n;
  q.k = 2;
  q.maximize = true;
  q.objective = first_block(Mat::Identity(n, n), 2);
  std::set<std::pair<int, int>> seen;
  for (const Edge& e : g.edges()) {
    auto key = std::minmax(e.u, e.v);
    if (!seen.insert(key).second) continue;
    q.monomials.push_back({make_assignment({key.first, key.second}, {0, 0}), 0});
  }
  const double eps_seed = eps / (2.0 - eps);
  const int R = choose_rounds(n, 2, r, eps_seed, options);
  IndependentSetPlan plan;
  auto x = std::make_shared<LasserreSolution>(solve_sdp(q, R, solve_options(options)));
  const Mat Anorm = normalized_adjacency(g);
  SeedOptions so;
  so.stop_at_capacity = true;
  plan.seed = select_seed(*x, first_block(Mat::Identity(n, n) + Anorm, 2), r, eps_seed, so);
  auto dist = std::make_shared<RoundingDistribution>(*x, plan.seed.S_star);
  plan.solution = x;
  plan.distribution = dist;
  plan.eta = x->objective_value();
  plan.lambda = spectrum(Mat::Identity(n, n) + Anorm).lambda(r + 1);
  plan.predicted_fraction = independent_set_fraction(g, r, eps);

  const Mat P = projected_gram(*x, plan.seed.S_star).topLeftCorner(n, n);
  plan.xi = plan.eta > 0.0 ? (P.cwiseProduct(Anorm)).sum() / plan.eta : 0.0;
  const double dmax = g.max_degree();
  plan.inclusion.assign(n, 1.0);
  if (plan.xi > 1e-12 && dmax > 0.0) {
    const double alpha = 1.0 / (plan.xi * std::sqrt(dmax));
    for (int u = 0; u < n; ++u) {
      const double d = g.degree(u);
      plan.inclusion[u] = d > 0.0 ? std::min(1.0, alpha / std::sqrt(d)) : 1.0;
    }
  }
  double e = 0.0;
  for (int u = 0; u < n; ++u) e += plan.inclusion[u] * x->z(single(u, 0));
  for (const auto& [u, v] : seen) e -= plan.inclusion[u] * plan.inclusion[v] * P(u, v);
  plan.expected_lower = e;
  return plan;
}

std::vector<int> sample_independent_set(const WeightedGraph& g, const IndependentSetPlan& plan, Rng& rng) {
  const int n = g.n();
  std::vector<int> labels = plan.distribution->sample(rng);
  std::vector<char> in(n, 0);
  for (int u = 0; u < n; ++u) {
    bool coin = rng.bernoulli(plan.inclusion[u]);
    in[u] = labels[u] == 0 && coin;
  }
  for (const Edge& e : g.edges()) {
    if (in[e.u] && in[e.v]) {
      if (rng.below(2) == 0) {
        in[e.u] = 0;
      } else {
        in[e.v] = 0;
      }
    }
  }
  std::vector<int> I;
  for (int u = 0; u < n; ++u)
    if (in[u]) I.push_back(u);
  return I;
}

CutResult solve_independent_set(const WeightedGraph& g, double eps, int r, std::uint64_t rng_seed,
                                const PipelineOptions& options) {
  IndependentSetPlan plan = prepare_independent_set(g, eps, r, options);
  const int n = g.n();
  const int T = sample_count(n, eps, options);
  Rng rng(rng_seed);
  std::vector<int> best;
  for (int t = 0; t < T; ++t) {
    std::vector<int> I = sample_independent_set(g, plan, rng);
    if (t == 0 || I.size() > best.size()) best = std::move(I);
  }
  GuaranteeReport rep;
  rep.kind = "indset";
  rep.n = n;
  rep.k = 2;
  rep.r = r;
  rep.r_prime = plan.solution->r_prime();
  rep.eps = eps;
  rep.eta = plan.eta;
  rep.lambda = plan.lambda;
  rep.lambda_r1 = std::min(plan.lambda, 1.0);
  rep.predicted_bound = plan.predicted_fraction;
  rep.maximize = true;
  rep.achieved_value = static_cast<double>(best.size());
  rep.bound_ok = rep.achieved_value >= plan.predicted_fraction * plan.eta - kBoundTol;
  rep.seed = plan.seed.S_star;
  rep.seed_iterations = plan.seed.iterations;
  rep.seed_certified = plan.seed.certified_bound;
  rep.expected_value = plan.expected_lower;
  rep.samples = T;
  rep.solver = plan.solution->info();
  if (std::any_of(plan.inclusion.begin(), plan.inclusion.end(), [](double v) { return v >= 1.0; }) && plan.xi > 1e-12)
    rep.notes.push_back("some inclusion probabilities were clamped to 1");
  rep.notes.push_back("xi = " + format_double(plan.xi));
  if (g.max_degree() < 3.0) rep.notes.push_back("max degree below 3: the fraction is reported, not guaranteed");
  return {best, rep};
}

}  // namespace lhr

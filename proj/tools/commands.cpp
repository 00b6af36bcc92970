#include "commands.hpp"

#include "lhr/corpus.hpp"
#include "lhr/graph.hpp"
#include "lhr/json_writer.hpp"
#include "lhr/oracle.hpp"
#include "lhr/problems.hpp"
#include "lhr/rng.hpp"
#include "lhr/unique_games.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace lhr::cli {

namespace {

/// Bad flags or inconsistent parameters; reported with the subcommand's usage text.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write '" + path + "'");
  f << text;
}

PipelineOptions pipeline_options(const RunConfig& c) {
  PipelineOptions o;
  o.r_prime = c.r_prime;
  o.samples = c.samples;
  o.jobs = c.jobs;
  o.budget = c.budget ? *c.budget : budget_from_environment();
  if (o.budget <= 0) throw UsageError("--budget must be positive");
  if (c.jobs < 1) throw UsageError("--jobs must be at least 1");
  if (c.samples < 0) throw UsageError("--samples must be nonnegative");
  if (c.r_prime < 0) throw UsageError("--r-prime must be nonnegative");
  return o;
}

WeightedGraph load_graph(const RunConfig& c) {
  if (c.graph_path.empty()) throw UsageError("--graph is required");
  return read_graph_file(c.graph_path);
}

ProblemKind command_kind(const RunConfig& c, const std::optional<ProblemKind>& from_config) {
  if (c.command == "bisect") return ProblemKind::bisection;
  if (c.command == "sse") return ProblemKind::sse;
  if (c.command == "kway") return ProblemKind::kway;
  if (c.command == "maxcut") return ProblemKind::maxcut;
  // ratio
  if (!c.objective.empty()) {
    ProblemKind k = parse_problem_kind(c.objective);
    if (!is_ratio_kind(k)) throw UsageError("--objective must be sparsest, expansion, ncut or conductance");
    return k;
  }
  if (from_config && is_ratio_kind(*from_config)) return *from_config;
  throw UsageError("ratio needs --objective");
}

PartitionProblem build_problem(const RunConfig& c) {
  WeightedGraph g = load_graph(c);
  PartitionProblem p;
  std::optional<ProblemKind> config_kind;
  bool have_mu = false;
  if (!c.config_path.empty()) {
    Json doc;
    try {
      doc = Json::parse(read_text(c.config_path));
    } catch (const nlohmann::json::parse_error& e) {
      throw UsageError("config: " + std::string(e.what()));
    }
    if (doc.is_object() && doc.contains("kind")) config_kind = parse_problem_kind(doc["kind"].get<std::string>());
    have_mu = doc.is_object() && doc.contains("mu");
    // The command decides the kind; a conflicting kind in the file is not an error.
    if (doc.is_object()) doc.erase("kind");
    p = parse_problem_config(doc, std::move(g));
  } else {
    p.graph = std::move(g);
  }
  p.kind = command_kind(c, config_kind);
  if (c.mu) {
    have_mu = true;
    if (p.kind == ProblemKind::kway) {
      p.mu_list = parse_int_list(*c.mu);
    } else {
      try {
        std::size_t used = 0;
        p.mu = std::stod(*c.mu, &used);
        if (used != c.mu->size()) throw std::invalid_argument("trailing characters");
      } catch (const std::exception&) {
        throw UsageError("--mu must be a number");
      }
    }
  }
  const bool needs_mu = p.kind == ProblemKind::bisection || p.kind == ProblemKind::sse || p.kind == ProblemKind::kway;
  if (needs_mu && !have_mu) throw UsageError(c.command + " needs --mu");
  if (c.F) p.F = parse_int_list(*c.F);
  if (c.B) p.B = parse_int_list(*c.B);
  if (c.eps) p.eps = *c.eps;
  if (c.r) p.r = *c.r;
  if (c.rng_seed) p.rng_seed = *c.rng_seed;
  p.validate();
  return p;
}

Json problem_input(const RunConfig& c, const PartitionProblem& p) {
  Json in;
  in["graph"] = c.graph_path;
  in["n"] = p.graph.n();
  in["edges"] = p.graph.edges().size();
  in["kind"] = to_string(p.kind);
  if (p.kind == ProblemKind::kway) {
    in["mu"] = p.mu_list;
  } else {
    in["mu"] = p.mu;
  }
  in["F"] = p.F;
  in["B"] = p.B;
  in["eps"] = p.eps;
  in["r"] = p.r;
  in["r_prime"] = c.r_prime;
  in["rng_seed"] = p.rng_seed;
  return in;
}

struct Verdict {
  Json json = nullptr;
  bool pass = true;
  double opt = kNaN;
};

/// Audits relaxation and ratio clauses against `opt`. Balance is reported in the report, not audited here.
Verdict judge(GuaranteeReport& report, std::optional<double> opt, const std::string& skipped) {
  Verdict v;
  if (!opt) {
    v.json = Json::object();
    v.json["opt"] = nullptr;
    v.json["pass"] = nullptr;
    v.json["skipped"] = skipped;
    return v;
  }
  report.opt = *opt;
  AuditTolerances tol;
  tol.check_balance = false;
  AuditResult a = audit(report, *opt, tol);
  v.pass = a.pass;
  v.opt = *opt;
  v.json = Json::object();
  v.json["opt"] = *opt;
  v.json["pass"] = a.pass;
  v.json["violations"] = a.violations;
  v.json["ratio_margin"] = a.ratio_margin;
  v.json["relaxation_margin"] = a.relaxation_margin;
  return v;
}

template <class Fn>
std::pair<std::optional<double>, std::string> try_oracle(bool enabled, Fn fn) {
  if (!enabled) return {std::nullopt, "disabled"};
  try {
    return {fn(), ""};
  } catch (const EnumerationBudgetExceeded& e) {
    return {std::nullopt, e.what()};
  }
}

int finish(const RunConfig& c, const std::string& id, GuaranteeReport& report, Json input, Json solution,
           std::optional<double> opt, const std::string& skipped, std::ostream& out) {
  Verdict v = judge(report, opt, skipped);
  Json doc;
  doc["schema"] = 1;
  doc["command"] = c.command;
  doc["input"] = std::move(input);
  doc["report"] = report.to_json();
  doc["solution"] = std::move(solution);
  doc["audit"] = v.json;
  emit(c.output_path, dump_json(doc) + "\n", out);
  if (!c.csv_path.empty()) {
    AuditResult a;
    a.pass = opt ? v.pass : report.bound_ok;
    emit(c.csv_path, audit_csv_header() + "\n" + audit_csv_row(id, report, v.opt, a) + "\n", out);
  }
  return v.pass ? 0 : 1;
}

int run_partition(const RunConfig& c, std::ostream& out) {
  PartitionProblem p = build_problem(c);
  const PipelineOptions o = pipeline_options(c);
  Json solution;
  GuaranteeReport report;
  switch (p.kind) {
    case ProblemKind::bisection: {
      CutResult res = solve_bisection(p, o);
      solution["U"] = res.U;
      report = std::move(res.report);
      break;
    }
    case ProblemKind::sse: {
      CutResult res = solve_sse(p, o);
      solution["U"] = res.U;
      report = std::move(res.report);
      break;
    }
    case ProblemKind::kway: {
      PartitionResult res = solve_kway(p, o);
      solution["parts"] = res.parts;
      report = std::move(res.report);
      break;
    }
    case ProblemKind::maxcut: {
      CutResult res = solve_maxcut(p, o);
      solution["U"] = res.U;
      report = std::move(res.report);
      break;
    }
    default: {
      CutResult res = solve_ratio(p, o);
      solution["U"] = res.U;
      report = std::move(res.report);
      break;
    }
  }
  auto [opt, skipped] = try_oracle(c.oracle, [&] { return brute_force(p).value; });
  return finish(c, c.graph_path, report, problem_input(c, p), std::move(solution), opt, skipped, out);
}

int run_indset(const RunConfig& c, std::ostream& out) {
  WeightedGraph g = load_graph(c);
  const double eps = c.eps.value_or(0.5);
  const int r = c.r.value_or(1);
  const std::uint64_t seed = c.rng_seed.value_or(0);
  if (!(eps > 0.0 && eps < 1.0)) throw UsageError("--eps must lie in (0, 1)");
  if (r < 1) throw UsageError("--r must be at least 1");
  CutResult res = solve_independent_set(g, eps, r, seed, pipeline_options(c));
  Json in;
  in["graph"] = c.graph_path;
  in["n"] = g.n();
  in["edges"] = g.edges().size();
  in["eps"] = eps;
  in["r"] = r;
  in["r_prime"] = c.r_prime;
  in["rng_seed"] = seed;
  Json solution;
  solution["independent_set"] = res.U;
  auto [opt, skipped] = try_oracle(c.oracle, [&] { return brute_force_independent_set(g).value; });
  return finish(c, c.graph_path, res.report, std::move(in), std::move(solution), opt, skipped, out);
}

int run_ug(const RunConfig& c, std::ostream& out) {
  if (c.instance_path.empty()) throw UsageError("--instance is required");
  UniqueGamesInstance inst = read_unique_games_file(c.instance_path);
  const double eps = c.eps.value_or(0.5);
  const int r = c.r.value_or(1);
  const std::uint64_t seed = c.rng_seed.value_or(0);
  if (!(eps > 0.0 && eps < 1.0)) throw UsageError("--eps must lie in (0, 1)");
  if (r < 1) throw UsageError("--r must be at least 1");
  LabelingResult res = solve_unique_games(inst, eps, r, seed, pipeline_options(c));
  Json in;
  in["instance"] = c.instance_path;
  in["n"] = inst.graph.n();
  in["k"] = inst.k;
  in["edges"] = inst.graph.edges().size();
  in["eps"] = eps;
  in["r"] = r;
  in["r_prime"] = c.r_prime;
  in["rng_seed"] = seed;
  Json solution;
  solution["labels"] = res.labels;
  auto [opt, skipped] = try_oracle(c.oracle, [&] { return brute_force_unique_games(inst).value; });
  return finish(c, c.instance_path, res.report, std::move(in), std::move(solution), opt, skipped, out);
}

int run_spectrum(const RunConfig& c, std::ostream& out) {
  WeightedGraph g = load_graph(c);
  Eigen::MatrixXd M;
  if (c.matrix == "normalized") {
    M = normalized_laplacian(g);
  } else if (c.matrix == "laplacian") {
    M = g.laplacian();
  } else if (c.matrix == "adjacency") {
    M = normalized_adjacency(g);
  } else if (c.matrix == "shifted-adjacency") {
    M = Eigen::MatrixXd::Identity(g.n(), g.n()) + normalized_adjacency(g);
  } else {
    throw UsageError("--matrix must be normalized, laplacian, adjacency or shifted-adjacency");
  }
  std::vector<double> ev = spectrum(M).eigenvalues;
  for (double& x : ev)
    if (std::abs(x) < 1e-12) x = 0.0;
  Json doc;
  doc["schema"] = 1;
  doc["command"] = "spectrum";
  doc["input"] = {{"graph", c.graph_path}, {"n", g.n()}, {"matrix", c.matrix}};
  doc["eigenvalues"] = ev;
  emit(c.output_path, dump_json(doc) + "\n", out);
  if (!c.csv_path.empty()) {
    std::string csv = "index,eigenvalue\n";
    for (std::size_t i = 0; i < ev.size(); ++i) csv += std::to_string(i + 1) + "," + format_double(ev[i]) + "\n";
    emit(c.csv_path, csv, out);
  }
  return 0;
}

// ---------------------------------------------------------------------------
// Corpus audit

struct AuditCase {
  std::string id;
  std::string kind;
  WeightedGraph graph;
  PartitionProblem problem;
  UniqueGamesInstance ug;
};

std::vector<int> first_vertices(int count) {
  std::vector<int> v(count);
  std::iota(v.begin(), v.end(), 0);
  return v;
}

/// Random permutation instance on g, seeded by the graph id so the corpus is fixed.
UniqueGamesInstance random_ug(const WeightedGraph& g, int k, std::uint64_t seed) {
  UniqueGamesInstance inst;
  inst.graph = g;
  inst.k = k;
  Rng rng(seed);
  for (std::size_t e = 0; e < g.edges().size(); ++e) {
    std::vector<int> perm(k);
    std::iota(perm.begin(), perm.end(), 0);
    for (int i = k - 1; i > 0; --i) std::swap(perm[i], perm[rng.below(i + 1)]);
    inst.perms.push_back(perm);
  }
  return inst;
}

std::vector<AuditCase> audit_cases(const RunConfig& c, const std::vector<std::string>& kinds) {
  auto wanted = [&](const std::string& k) {
    return kinds.empty() || std::find(kinds.begin(), kinds.end(), k) != kinds.end();
  };
  const double eps = c.eps.value_or(0.5);
  const int r = c.r.value_or(1);
  const std::uint64_t seed = c.rng_seed.value_or(0);
  auto base = [&](const WeightedGraph& g, ProblemKind kind) {
    PartitionProblem p;
    p.kind = kind;
    p.graph = g;
    p.eps = eps;
    p.r = r;
    p.rng_seed = seed;
    return p;
  };
  std::vector<AuditCase> out;
  for (const NamedGraph& ng : connected_graphs(std::min(c.max_n, 6))) {
    const int n = ng.graph.n();
    if (wanted("bisection")) {
      PartitionProblem p = base(ng.graph, ProblemKind::bisection);
      p.mu = n / 2;
      out.push_back({ng.id + "/bisection", "bisection", ng.graph, p, {}});
    }
    if (wanted("maxcut")) out.push_back({ng.id + "/maxcut", "maxcut", ng.graph, base(ng.graph, ProblemKind::maxcut), {}});
  }
  for (const NamedGraph& ng : named_graphs()) {
    const WeightedGraph& g = ng.graph;
    const int n = g.n();
    if (n > std::max(c.max_n, 0) + 4) continue;
    if (wanted("bisection")) {
      PartitionProblem p = base(g, ProblemKind::bisection);
      p.mu = n / 2;
      out.push_back({ng.id + "/bisection", "bisection", g, p, {}});
    }
    if (wanted("sse")) {
      PartitionProblem p = base(g, ProblemKind::sse);
      p.mu = g.volume(first_vertices(n / 2));
      out.push_back({ng.id + "/sse", "sse", g, p, {}});
    }
    if (n <= 8) {
      for (ProblemKind k : {ProblemKind::sparsest, ProblemKind::expansion, ProblemKind::ncut, ProblemKind::conductance}) {
        if (!wanted(to_string(k))) continue;
        out.push_back({ng.id + "/" + to_string(k), to_string(k), g, base(g, k), {}});
      }
    }
    if (n <= 6 && wanted("kway")) {
      for (int parts : {2, 3}) {
        if (n % parts != 0) continue;
        PartitionProblem p = base(g, ProblemKind::kway);
        p.mu_list.assign(parts, n / parts);
        out.push_back({ng.id + "/kway" + std::to_string(parts), "kway", g, p, {}});
      }
    }
    if (wanted("maxcut")) out.push_back({ng.id + "/maxcut", "maxcut", g, base(g, ProblemKind::maxcut), {}});
    if (wanted("indset")) out.push_back({ng.id + "/indset", "indset", g, {}, {}});
    if (n <= 5 && wanted("ug")) {
      for (int k : {2, 3}) {
        AuditCase a{ng.id + "/ug" + std::to_string(k), "ug", g, {}, random_ug(g, k, 1000 + n * 10 + k)};
        out.push_back(std::move(a));
      }
    }
  }
  return out;
}

int run_audit(const RunConfig& c, std::ostream& out, std::ostream& err) {
  if (c.max_n < 2) throw UsageError("--max-n must be at least 2");
  std::vector<std::string> kinds;
  if (!c.kinds.empty()) {
    std::stringstream ss(c.kinds);
    for (std::string k; std::getline(ss, k, ',');) {
      static const std::vector<std::string> known = {"bisection", "sse", "sparsest", "expansion", "ncut",
                                                     "conductance", "kway", "maxcut", "indset", "ug"};
      if (std::find(known.begin(), known.end(), k) == known.end()) throw UsageError("unknown kind '" + k + "'");
      kinds.push_back(k);
    }
  }
  const PipelineOptions o = pipeline_options(c);
  const double eps = c.eps.value_or(0.5);
  const int r = c.r.value_or(1);
  const std::uint64_t seed = c.rng_seed.value_or(0);
  AuditTolerances tol;
  tol.check_balance = false;

  std::string csv = audit_csv_header() + "\n";
  Json failures = Json::array();
  int total = 0, passed = 0;
  for (AuditCase& a : audit_cases(c, kinds)) {
    ++total;
    GuaranteeReport report;
    double opt = kNaN;
    try {
      if (a.kind == "indset") {
        report = solve_independent_set(a.graph, eps, r, seed, o).report;
        opt = brute_force_independent_set(a.graph).value;
      } else if (a.kind == "ug") {
        report = solve_unique_games(a.ug, eps, r, seed, o).report;
        opt = brute_force_unique_games(a.ug).value;
      } else {
        const PartitionProblem& p = a.problem;
        if (p.kind == ProblemKind::bisection) report = solve_bisection(p, o).report;
        else if (p.kind == ProblemKind::sse) report = solve_sse(p, o).report;
        else if (p.kind == ProblemKind::kway) report = solve_kway(p, o).report;
        else if (p.kind == ProblemKind::maxcut) report = solve_maxcut(p, o).report;
        else report = solve_ratio(p, o).report;
        opt = brute_force(p).value;
      }
    } catch (const std::exception& e) {
      failures.push_back({{"id", a.id}, {"error", e.what()}});
      err << a.id << ": " << e.what() << "\n";
      continue;
    }
    AuditResult res = audit(report, opt, tol);
    csv += audit_csv_row(a.id, report, opt, res) + "\n";
    if (res.pass) {
      ++passed;
    } else {
      failures.push_back({{"id", a.id}, {"violations", res.violations}});
    }
  }
  Json doc;
  doc["schema"] = 1;
  doc["command"] = "audit";
  doc["input"] = {{"max_n", c.max_n}, {"kinds", kinds}, {"eps", eps}, {"r", r}, {"rng_seed", seed}};
  doc["instances"] = total;
  doc["passed"] = passed;
  doc["failures"] = failures;
  emit(c.output_path, dump_json(doc) + "\n", out);
  if (!c.csv_path.empty()) emit(c.csv_path, csv, out);
  return passed == total ? 0 : 1;
}

}  // namespace

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  if (text.empty()) return out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    try {
      std::size_t used = 0;
      int v = std::stoi(item, &used);
      if (used != item.size()) throw std::invalid_argument("trailing characters");
      out.push_back(v);
    } catch (const std::exception&) {
      throw UsageError("expected a comma-separated integer list, got '" + text + "'");
    }
  }
  return out;
}

int execute(const RunConfig& c, std::ostream& out, std::ostream& err) {
  if (c.command == "spectrum") return run_spectrum(c, out);
  if (c.command == "indset") return run_indset(c, out);
  if (c.command == "ug") return run_ug(c, out);
  if (c.command == "audit") return run_audit(c, out, err);
  return run_partition(c, out);
}

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Lasserre-hierarchy partitioning with spectral guarantees"};
  app.require_subcommand(1);
  RunConfig c;
  // std::optional fields are filled from plain values after parsing.
  std::string mu, F, B;
  double eps = 0.5;
  int r = 1;
  std::uint64_t rng_seed = 0;
  long long budget = 0;

  struct Flags {
    CLI::Option *mu = nullptr, *F = nullptr, *B = nullptr, *eps = nullptr, *r = nullptr, *seed = nullptr,
                *budget = nullptr;
  };
  std::map<CLI::App*, Flags> flags;

  auto solver_flags = [&](CLI::App* s, Flags& f) {
    f.eps = s->add_option("--eps", eps, "Accuracy parameter in (0, 1)")->capture_default_str();
    f.r = s->add_option("--r", r, "Spectral index r >= 1")->capture_default_str();
    s->add_option("--r-prime", c.r_prime, "Override the number of hierarchy rounds");
    f.seed = s->add_option("--rng-seed", rng_seed, "Seed for the rounding");
    s->add_option("--samples", c.samples, "Rounding samples (0 = automatic)");
    s->add_option("--jobs", c.jobs, "Worker threads")->capture_default_str();
    f.budget = s->add_option("--budget", budget, "Moment matrix side cap (default LASSERRE_BUDGET or 10000)");
    s->add_option("--output", c.output_path, "Write the JSON report here instead of stdout");
    s->add_option("--csv", c.csv_path, "Write an audit CSV row here");
    s->add_flag("!--no-oracle", c.oracle, "Skip the brute-force optimum");
  };
  auto partition_flags = [&](CLI::App* s, Flags& f) {
    s->add_option("--graph", c.graph_path, "Edge-list file");
    s->add_option("--config", c.config_path, "JSON problem document (kind, mu, F, B, eps, r, rng-seed)");
    f.mu = s->add_option("--mu", mu, "Target size, volume, or comma-separated part sizes for kway");
    f.F = s->add_option("--F", F, "Comma-separated vertices forced inside");
    f.B = s->add_option("--B", B, "Comma-separated vertices forced outside");
    solver_flags(s, f);
  };

  CLI::App* bisect = app.add_subcommand("bisect", "Minimum bisection with |U \\ F| = mu");
  partition_flags(bisect, flags[bisect]);
  CLI::App* sse = app.add_subcommand("sse", "Small-set expansion with vol(U \\ F) = mu");
  partition_flags(sse, flags[sse]);
  CLI::App* ratio = app.add_subcommand("ratio", "Sparsest cut, edge expansion, normalized cut or conductance");
  partition_flags(ratio, flags[ratio]);
  ratio->add_option("--objective", c.objective, "sparsest|expansion|ncut|conductance")
      ->check(CLI::IsMember({"sparsest", "expansion", "ncut", "conductance"}));
  CLI::App* kway = app.add_subcommand("kway", "k-way partition with prescribed part sizes");
  partition_flags(kway, flags[kway]);
  CLI::App* maxcut = app.add_subcommand("maxcut", "Max cut (min uncut); --mu adds a size constraint");
  partition_flags(maxcut, flags[maxcut]);
  CLI::App* ug = app.add_subcommand("ug", "Unique games");
  ug->add_option("--instance", c.instance_path, "Instance file with lines 'u v w perm'");
  solver_flags(ug, flags[ug]);
  CLI::App* indset = app.add_subcommand("indset", "Maximum independent set");
  indset->add_option("--graph", c.graph_path, "Edge-list file");
  solver_flags(indset, flags[indset]);
  CLI::App* spec = app.add_subcommand("spectrum", "Eigenvalues of a graph matrix");
  spec->add_option("--graph", c.graph_path, "Edge-list file");
  spec->add_option("--matrix", c.matrix, "normalized|laplacian|adjacency|shifted-adjacency")->capture_default_str();
  spec->add_option("--output", c.output_path, "Write the JSON report here instead of stdout");
  spec->add_option("--csv", c.csv_path, "Write the eigenvalues as CSV here");
  CLI::App* aud = app.add_subcommand("audit", "Run every pipeline on the built-in corpus against brute force");
  {
    Flags& f = flags[aud];
    aud->add_option("--max-n", c.max_n, "Largest connected-graph order (named graphs go up to max-n + 4)")
        ->capture_default_str();
    aud->add_option("--kinds", c.kinds, "Comma-separated kinds to audit (default all)");
    f.eps = aud->add_option("--eps", eps, "Accuracy parameter")->capture_default_str();
    f.r = aud->add_option("--r", r, "Spectral index")->capture_default_str();
    f.seed = aud->add_option("--rng-seed", rng_seed, "Seed for the rounding");
    aud->add_option("--r-prime", c.r_prime, "Override the number of hierarchy rounds");
    aud->add_option("--samples", c.samples, "Rounding samples (0 = automatic)");
    aud->add_option("--jobs", c.jobs, "Worker threads")->capture_default_str();
    f.budget = aud->add_option("--budget", budget, "Moment matrix side cap");
    aud->add_option("--output", c.output_path, "Write the JSON summary here instead of stdout");
    aud->add_option("--csv", c.csv_path, "Write one CSV row per instance here");
  }

  CLI::App* chosen = nullptr;
  try {
    app.parse(argc, argv);
    chosen = app.get_subcommands().front();
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help());
      return 0;
    }
    err << "error: " << e.what() << "\n";
    err << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help());
    return 2;
  }

  c.command = chosen->get_name();
  const Flags& f = flags[chosen];
  auto given = [](CLI::Option* o) { return o != nullptr && o->count() > 0; };
  if (given(f.mu)) c.mu = mu;
  if (given(f.F)) c.F = F;
  if (given(f.B)) c.B = B;
  if (given(f.eps)) c.eps = eps;
  if (given(f.r)) c.r = r;
  if (given(f.seed)) c.rng_seed = rng_seed;
  if (given(f.budget)) c.budget = budget;

  try {
    return execute(c, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n" << chosen->help();
    return 2;
  } catch (const GraphError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const Infeasible& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace lhr::cli

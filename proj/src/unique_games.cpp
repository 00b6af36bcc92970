#include "lhr/unique_games.hpp"

#include "lhr/colsel.hpp"
#include "lhr/rounding.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace lhr {

namespace {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

std::vector<int> parse_perm(const std::string& tok, int line_no) {
  std::vector<int> perm;
  std::stringstream ss(tok);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t pos = 0;
      int v = std::stoi(item, &pos);
      if (pos != item.size()) throw std::invalid_argument("bad");
      perm.push_back(v - 1);
    } catch (const std::exception&) {
      throw std::invalid_argument("line " + std::to_string(line_no) + ": malformed permutation '" + tok + "'");
    }
  }
  return perm;
}

}  // namespace

void UniqueGamesInstance::validate() const {
  if (k < 1) throw std::invalid_argument("unique games: k must be positive");
  if (perms.size() != graph.edges().size()) throw std::invalid_argument("unique games: one permutation per edge");
  for (std::size_t e = 0; e < perms.size(); ++e) {
    const auto& p = perms[e];
    if (static_cast<int>(p.size()) != k) throw std::invalid_argument("unique games: permutation of wrong length");
    std::vector<char> seen(k, 0);
    for (int v : p) {
      if (v < 0 || v >= k || seen[v]) throw std::invalid_argument("unique games: edge permutation is not a bijection");
      seen[v] = 1;
    }
    if (graph.edges()[e].u >= graph.edges()[e].v) throw std::invalid_argument("unique games: edges must have u < v");
  }
}

double UniqueGamesInstance::unsatisfied(const std::vector<int>& labels) const {
  double s = 0.0;
  for (std::size_t e = 0; e < perms.size(); ++e) {
    const Edge& ed = graph.edges()[e];
    if (labels[ed.v] != perms[e][labels[ed.u]]) s += ed.w;
  }
  return s;
}

Eigen::MatrixXd UniqueGamesInstance::lifted_laplacian() const {
  const int n = graph.n();
  Mat L = Mat::Zero(n * k, n * k);
  for (std::size_t e = 0; e < perms.size(); ++e) {
    const Edge& ed = graph.edges()[e];
    for (int i = 0; i < k; ++i) {
      int a = column_index(n, ed.u, i), b = column_index(n, ed.v, perms[e][i]);
      L(a, a) += ed.w;
      L(b, b) += ed.w;
      L(a, b) -= ed.w;
      L(b, a) -= ed.w;
    }
  }
  return L;
}

UniqueGamesInstance parse_unique_games(std::string_view text) {
  UniqueGamesInstance inst;
  inst.k = 0;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    long long u = -1, v = -1;
    double w = 0.0;
    std::string perm_tok, extra;
    if (!(ls >> u >> v >> w >> perm_tok) || (ls >> extra)) {
      throw std::invalid_argument("line " + std::to_string(line_no) + ": expected 'u v w perm'");
    }
    if (u < 0 || v < 0 || u == v) throw std::invalid_argument("line " + std::to_string(line_no) + ": bad endpoints");
    if (!(w >= 0.0)) throw std::invalid_argument("line " + std::to_string(line_no) + ": negative weight");
    std::vector<int> perm = parse_perm(perm_tok, line_no);
    if (inst.k == 0) inst.k = static_cast<int>(perm.size());
    if (static_cast<int>(perm.size()) != inst.k) {
      throw std::invalid_argument("line " + std::to_string(line_no) + ": permutation length differs from k");
    }
    if (u > v) {
      // f(u) = perm^{-1}(f(v)) read from the other side.
      std::vector<int> inv(perm.size(), -1);
      for (std::size_t i = 0; i < perm.size(); ++i) {
        if (perm[i] < 0 || perm[i] >= inst.k || inv[perm[i]] >= 0) {
          throw std::invalid_argument("line " + std::to_string(line_no) + ": permutation is not a bijection");
        }
        inv[perm[i]] = static_cast<int>(i);
      }
      perm = inv;
      std::swap(u, v);
    }
    inst.graph.add_edge(static_cast<int>(u), static_cast<int>(v), w);
    inst.perms.push_back(perm);
  }
  if (inst.k == 0) inst.k = 1;
  inst.validate();
  return inst;
}

UniqueGamesInstance read_unique_games_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::invalid_argument("cannot open unique games file " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_unique_games(ss.str());
}

std::string format_unique_games(const UniqueGamesInstance& inst) {
  std::string out;
  for (std::size_t e = 0; e < inst.perms.size(); ++e) {
    const Edge& ed = inst.graph.edges()[e];
    out += std::to_string(ed.u) + " " + std::to_string(ed.v) + " " + format_double(ed.w) + " ";
    for (int i = 0; i < inst.k; ++i) out += (i ? "," : "") + std::to_string(inst.perms[e][i] + 1);
    out += "\n";
  }
  return out;
}

QipInstance build_unique_games(const UniqueGamesInstance& inst) {
  inst.validate();
  QipInstance q;
  q.n = inst.graph.n();
  q.k = inst.k;
  q.objective = 0.5 * inst.lifted_laplacian();
  return q;
}

Eigen::MatrixXd label_vectors(const LasserreSolution& x) { return extract_vectors(x.singleton_gram()); }

Eigen::MatrixXd embed_ug(const Eigen::MatrixXd& V, int n, int k) {
  const int m = static_cast<int>(V.rows());
  if (V.cols() != n * k) throw std::invalid_argument("embed_ug: expected kn label vectors");
  for (int u = 0; u < n; ++u)
    for (int f = 0; f < k; ++f)
      for (int g = f + 1; g < k; ++g) {
        double ip = V.col(column_index(n, u, f)).dot(V.col(column_index(n, u, g)));
        if (std::abs(ip) > 1e-6) throw std::invalid_argument("embed_ug: label vectors of one vertex are not orthogonal");
      }
  Mat X = Mat::Zero(static_cast<Eigen::Index>(m) * m, n);
  for (int u = 0; u < n; ++u)
    for (int f = 0; f < k; ++f) {
      Vec v = V.col(column_index(n, u, f));
      double nv = v.norm();
      if (nv <= 1e-12) continue;
      Vec vbar = v / nv;
      // Column-major Kronecker product v (x) vbar.
      for (int a = 0; a < m; ++a) X.col(u).segment(static_cast<Eigen::Index>(a) * m, m) += v(a) * vbar;
    }
  return X;
}

Eigen::MatrixXd embed_ug(const LasserreSolution& x) { return embed_ug(label_vectors(x), x.n(), x.k()); }

Eigen::MatrixXd embedding_gram(const LasserreSolution& x) {
  const int n = x.n(), k = x.k();
  Mat norms(n, k);
  for (int u = 0; u < n; ++u)
    for (int f = 0; f < k; ++f) norms(u, f) = std::sqrt(std::max(0.0, x.z(single(u, f))));
  Mat G = Mat::Zero(n, n);
  for (int u = 0; u < n; ++u) {
    G(u, u) = norms.row(u).squaredNorm();
    for (int v = u + 1; v < n; ++v) {
      double s = 0.0;
      for (int f = 0; f < k; ++f)
        for (int g = 0; g < k; ++g) {
          double d = norms(u, f) * norms(v, g);
          if (d <= 1e-12) continue;
          double z = x.z_pair(single(u, f), single(v, g));
          s += z * z / d;
        }
      G(u, v) = G(v, u) = s;
    }
  }
  return G;
}

std::vector<int> embedding_seed(const LasserreSolution& x, const WeightedGraph& g, int r, double eps) {
  const int n = x.n();
  Mat G = embedding_gram(x);
  Vec d = g.degrees();
  Mat Gs = d.cwiseSqrt().asDiagonal() * G * d.cwiseSqrt().asDiagonal();
  Eigen::SelfAdjointEigenSolver<Mat> es(Gs);
  Mat X = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    double l = es.eigenvalues()(i);
    if (l > 0) X.row(i) = std::sqrt(l) * es.eigenvectors().col(i).transpose();
  }
  Vec w = normalized_laplacian(g).diagonal();
  int take = std::min({static_cast<int>(std::ceil(r / eps - 1e-12)), n, std::max(seed_capacity(x), 0)});
  if (take < 1) return {};
  ColumnSelection sel = select_columns(X, std::min(r, take), take, w);
  return sel.S;
}

LabelingResult solve_unique_games(const UniqueGamesInstance& inst, double eps, int r, std::uint64_t rng_seed,
                                  const PipelineOptions& options) {
  inst.validate();
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("unique games: eps must lie in (0, 1)");
  const WeightedGraph& g = inst.graph;
  const int n = g.n(), k = inst.k;
  QipInstance q = build_unique_games(inst);
  const int seed_columns = static_cast<int>(std::ceil(r / eps - 1e-12));
  PipelineOptions o = options;
  int R = o.r_prime > 0 ? std::min(o.r_prime, n) : std::min(n, seed_columns + 1);
  while (R > 1 && solver_side(n, k, R) > o.budget) --R;
  SolveOptions so;
  so.budget = o.budget;
  so.sdp = o.sdp;
  auto x = std::make_shared<LasserreSolution>(solve_sdp(q, R, so));

  GuaranteeReport rep;
  rep.kind = "ug";
  rep.n = n;
  rep.k = k;
  rep.r = r;
  rep.r_prime = R;
  rep.eps = eps;
  rep.eta = x->objective_value();
  rep.solver = x->info();
  rep.lambda = spectrum(normalized_laplacian(g)).lambda(r + 1);
  rep.lambda_r1 = std::min(1.0, rep.lambda);
  rep.predicted_bound = rep.lambda > 0 ? 1.0 + (2.0 + eps) / rep.lambda : std::numeric_limits<double>::infinity();

  std::vector<int> seed = embedding_seed(*x, g, r, eps);
  RoundingDistribution dist(*x, seed);
  int f = dist.best_labeling(q.objective);
  rep.seed = dist.seed();
  rep.seed_iterations = 1;
  rep.expected_value = dist.expectation(q.objective);
  rep.seed_certified = dist.conditional_expectation(f, q.objective);

  const int T = o.samples > 0 ? o.samples : static_cast<int>(std::ceil((std::log(std::max(n, 2)) + 3.0) / eps));
  Rng rng(rng_seed);
  std::vector<int> best;
  double best_val = std::numeric_limits<double>::infinity();
  for (int t = 0; t < T; ++t) {
    std::vector<int> labels = dist.sample_given(f, rng);
    double v = inst.unsatisfied(labels);
    if (v < best_val) {
      best_val = v;
      best = labels;
    }
  }
  rep.samples = T;
  rep.achieved_value = best_val;
  rep.bound_ok = best_val <= rep.predicted_bound * rep.eta + 1e-6;
  return {best, rep};
}

}  // namespace lhr

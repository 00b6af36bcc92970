#include "lhr/graph.hpp"

#include "lhr/json_writer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace lhr {

WeightedGraph::WeightedGraph(int n) : n_(n) {
  if (n < 0) throw GraphError("negative vertex count");
}

WeightedGraph::WeightedGraph(int n, std::vector<Edge> edges) : WeightedGraph(n) {
  for (const Edge& e : edges) add_edge(e.u, e.v, e.w);
}

void WeightedGraph::add_edge(int u, int v, double w) {
  if (u == v) throw GraphError("self-loop at vertex " + std::to_string(u));
  if (u < 0 || v < 0) throw GraphError("negative vertex id");
  if (!(w >= 0.0) || !std::isfinite(w)) throw GraphError("edge weight must be finite and nonnegative");
  n_ = std::max(n_, std::max(u, v) + 1);
  edges_.push_back({std::min(u, v), std::max(u, v), w});
}

Eigen::VectorXd WeightedGraph::degrees() const {
  Eigen::VectorXd d = Eigen::VectorXd::Zero(n_);
  for (const Edge& e : edges_) {
    d(e.u) += e.w;
    d(e.v) += e.w;
  }
  return d;
}

double WeightedGraph::degree(int u) const { return degrees()(u); }

double WeightedGraph::max_degree() const { return n_ == 0 ? 0.0 : degrees().maxCoeff(); }

double WeightedGraph::total_volume() const { return 2.0 * total_weight(); }

double WeightedGraph::total_weight() const {
  double s = 0.0;
  for (const Edge& e : edges_) s += e.w;
  return s;
}

double WeightedGraph::volume(const std::vector<int>& U) const {
  Eigen::VectorXd d = degrees();
  double s = 0.0;
  for (int u : U) s += d(u);
  return s;
}

Eigen::MatrixXd WeightedGraph::adjacency() const {
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n_, n_);
  for (const Edge& e : edges_) {
    A(e.u, e.v) += e.w;
    A(e.v, e.u) += e.w;
  }
  return A;
}

Eigen::MatrixXd WeightedGraph::laplacian() const {
  Eigen::MatrixXd A = adjacency();
  Eigen::MatrixXd L = -A;
  L.diagonal() += A.rowwise().sum();
  return L;
}

bool WeightedGraph::connected() const {
  if (n_ <= 1) return true;
  std::vector<int> parent(n_);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  int components = n_;
  for (const Edge& e : edges_) {
    int a = find(e.u), b = find(e.v);
    if (a != b) {
      parent[a] = b;
      --components;
    }
  }
  return components == 1;
}

WeightedGraph parse_graph(std::string_view text) {
  WeightedGraph g;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    long long u = -1, v = -1;
    double w = 1.0;
    std::string extra;
    auto fail = [&](const std::string& why) {
      return GraphError("line " + std::to_string(line_no) + ": " + why + " ('" + line + "')");
    };
    if (!(ls >> u >> v)) throw fail("expected 'u v [w]'");
    if (ls >> extra) {
      try {
        std::size_t pos = 0;
        w = std::stod(extra, &pos);
        if (pos != extra.size()) throw fail("malformed weight");
      } catch (const std::invalid_argument&) {
        throw fail("malformed weight");
      } catch (const std::out_of_range&) {
        throw fail("weight out of range");
      }
      if (ls >> extra) throw fail("trailing tokens");
    }
    if (u < 0 || v < 0) throw fail("negative vertex id");
    if (u == v) throw fail("self-loop");
    if (!(w >= 0.0)) throw fail("negative weight");
    g.add_edge(static_cast<int>(u), static_cast<int>(v), w);
  }
  return g;
}

WeightedGraph read_graph_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw GraphError("cannot open graph file " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_graph(ss.str());
}

std::string format_graph(const WeightedGraph& g) {
  std::string out;
  for (const Edge& e : g.edges()) {
    out += std::to_string(e.u) + " " + std::to_string(e.v) + " " + format_double(e.w) + "\n";
  }
  return out;
}

Eigen::MatrixXd normalized_adjacency(const WeightedGraph& g) {
  Eigen::VectorXd d = g.degrees();
  Eigen::VectorXd s(g.n());
  for (int u = 0; u < g.n(); ++u) s(u) = d(u) > 0 ? 1.0 / std::sqrt(d(u)) : 0.0;
  return s.asDiagonal() * g.adjacency() * s.asDiagonal();
}

Eigen::MatrixXd normalized_laplacian(const WeightedGraph& g) {
  Eigen::VectorXd d = g.degrees();
  Eigen::MatrixXd N = -normalized_adjacency(g);
  for (int u = 0; u < g.n(); ++u) N(u, u) += d(u) > 0 ? 1.0 : 0.0;
  return N;
}

double SpectralProfile::lambda(int i) const {
  if (i < 1) throw std::out_of_range("eigenvalue index is 1-based");
  if (i > static_cast<int>(eigenvalues.size())) return kInfiniteEigenvalue;
  return eigenvalues[i - 1];
}

int SpectralProfile::finite_count() const {
  return static_cast<int>(std::count_if(eigenvalues.begin(), eigenvalues.end(),
                                        [](double x) { return std::isfinite(x); }));
}

SpectralProfile spectrum(const Eigen::MatrixXd& M, double symmetry_tol) {
  if (M.rows() != M.cols()) throw std::invalid_argument("spectrum: matrix not square");
  SpectralProfile p;
  if (M.rows() == 0) return p;
  double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
  if ((M - M.transpose()).cwiseAbs().maxCoeff() > symmetry_tol * scale) {
    throw std::invalid_argument("spectrum: matrix not symmetric within tolerance");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (M + M.transpose()), Eigen::EigenvaluesOnly);
  p.eigenvalues.assign(es.eigenvalues().data(), es.eigenvalues().data() + M.rows());
  return p;
}

SpectralProfile generalized_spectrum(const Eigen::MatrixXd& A, double psd_tol) {
  SpectralProfile full = spectrum(A);
  double scale = std::max(1.0, A.cwiseAbs().maxCoeff());
  if (!full.eigenvalues.empty() && full.eigenvalues.front() < -psd_tol * scale) {
    throw std::invalid_argument("generalized_spectrum: matrix not PSD within tolerance");
  }
  const int n = static_cast<int>(A.rows());
  double dmax = n ? A.diagonal().cwiseAbs().maxCoeff() : 0.0;
  std::vector<int> keep;
  for (int i = 0; i < n; ++i)
    if (A(i, i) > 1e-12 * std::max(dmax, 1e-300)) keep.push_back(i);
  const int m = static_cast<int>(keep.size());
  SpectralProfile p;
  if (m > 0) {
    Eigen::MatrixXd B(m, m);
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b)
        B(a, b) = A(keep[a], keep[b]) / std::sqrt(A(keep[a], keep[a]) * A(keep[b], keep[b]));
    p = spectrum(B, 1e-8);
  }
  for (int i = m; i < n; ++i) p.eigenvalues.push_back(kInfiniteEigenvalue);
  return p;
}

CutObjective parse_cut_objective(std::string_view name) {
  if (name == "cut") return CutObjective::cut;
  if (name == "sparsest") return CutObjective::sparsest;
  if (name == "expansion") return CutObjective::expansion;
  if (name == "ncut") return CutObjective::ncut;
  if (name == "conductance") return CutObjective::conductance;
  throw std::invalid_argument("unknown objective '" + std::string(name) + "'");
}

std::string to_string(CutObjective o) {
  switch (o) {
    case CutObjective::cut: return "cut";
    case CutObjective::sparsest: return "sparsest";
    case CutObjective::expansion: return "expansion";
    case CutObjective::ncut: return "ncut";
    case CutObjective::conductance: return "conductance";
  }
  return "?";
}

CutValue cut_value(const WeightedGraph& g, const std::vector<int>& U) {
  std::vector<char> in(g.n(), 0);
  for (int u : U) {
    if (u < 0 || u >= g.n()) throw std::out_of_range("cut_value: vertex out of range");
    in[u] = 1;
  }
  CutValue cv;
  Eigen::VectorXd d = g.degrees();
  for (int u = 0; u < g.n(); ++u)
    if (in[u]) {
      ++cv.side_size;
      cv.side_volume += d(u);
    }
  for (const Edge& e : g.edges())
    if (in[e.u] != in[e.v]) cv.cut_weight += e.w;
  return cv;
}

double evaluate_cut(const WeightedGraph& g, const std::vector<int>& U, CutObjective objective) {
  CutValue cv = cut_value(g, U);
  if (objective == CutObjective::cut) return cv.cut_weight;
  const int n = g.n();
  if (cv.side_size == 0 || cv.side_size == n) {
    throw std::invalid_argument("ratio objective needs a proper nonempty subset");
  }
  const double other_size = n - cv.side_size;
  const double other_vol = g.total_volume() - cv.side_volume;
  switch (objective) {
    case CutObjective::sparsest: return cv.cut_weight / (cv.side_size * other_size);
    case CutObjective::expansion: return cv.cut_weight / std::min<double>(cv.side_size, other_size);
    case CutObjective::ncut: return cv.cut_weight / (cv.side_volume * other_vol);
    case CutObjective::conductance: return cv.cut_weight / std::min(cv.side_volume, other_vol);
    default: break;
  }
  return cv.cut_weight;
}

WeightedGraph complete_graph(int n) {
  WeightedGraph g(n);
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v) g.add_edge(u, v);
  return g;
}

WeightedGraph cycle_graph(int n) {
  WeightedGraph g(n);
  for (int u = 0; u < n; ++u) g.add_edge(u, (u + 1) % n);
  return g;
}

WeightedGraph path_graph(int n) {
  WeightedGraph g(n);
  for (int u = 0; u + 1 < n; ++u) g.add_edge(u, u + 1);
  return g;
}

WeightedGraph star_graph(int leaves) {
  WeightedGraph g(leaves + 1);
  for (int v = 1; v <= leaves; ++v) g.add_edge(0, v);
  return g;
}

WeightedGraph hypercube_graph(int dim) {
  const int n = 1 << dim;
  WeightedGraph g(n);
  for (int u = 0; u < n; ++u)
    for (int b = 0; b < dim; ++b) {
      int v = u ^ (1 << b);
      if (u < v) g.add_edge(u, v);
    }
  return g;
}

WeightedGraph petersen_graph() {
  WeightedGraph g(10);
  for (int i = 0; i < 5; ++i) {
    g.add_edge(i, (i + 1) % 5);
    g.add_edge(i, i + 5);
    g.add_edge(5 + i, 5 + (i + 2) % 5);
  }
  return g;
}

WeightedGraph disjoint_union(const WeightedGraph& a, const WeightedGraph& b) {
  WeightedGraph g(a.n() + b.n());
  for (const Edge& e : a.edges()) g.add_edge(e.u, e.v, e.w);
  for (const Edge& e : b.edges()) g.add_edge(e.u + a.n(), e.v + a.n(), e.w);
  return g;
}

WeightedGraph induced_subgraph(const WeightedGraph& g, const std::vector<int>& vertices) {
  std::vector<int> pos(g.n(), -1);
  for (std::size_t i = 0; i < vertices.size(); ++i) pos[vertices[i]] = static_cast<int>(i);
  WeightedGraph h(static_cast<int>(vertices.size()));
  for (const Edge& e : g.edges())
    if (pos[e.u] >= 0 && pos[e.v] >= 0) h.add_edge(pos[e.u], pos[e.v], e.w);
  return h;
}

}  // namespace lhr

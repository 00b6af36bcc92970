#pragma once

#include <Eigen/Dense>

#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace lhr {

struct Edge {
  int u = 0;
  int v = 0;
  double w = 1.0;
};

class GraphError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Undirected weighted graph. Each edge is stored once.
class WeightedGraph {
 public:
  WeightedGraph() = default;
  explicit WeightedGraph(int n);
  WeightedGraph(int n, std::vector<Edge> edges);

  void add_edge(int u, int v, double w = 1.0);

  int n() const { return n_; }
  const std::vector<Edge>& edges() const { return edges_; }

  Eigen::VectorXd degrees() const;
  double degree(int u) const;
  double max_degree() const;
  /// m = sum of all degrees.
  double total_volume() const;
  double volume(const std::vector<int>& U) const;
  double total_weight() const;

  Eigen::MatrixXd adjacency() const;
  Eigen::MatrixXd laplacian() const;
  bool connected() const;

 private:
  int n_ = 0;
  std::vector<Edge> edges_;
};

WeightedGraph parse_graph(std::string_view text);
WeightedGraph read_graph_file(const std::string& path);
std::string format_graph(const WeightedGraph& g);

/// D^{-1/2} L D^{-1/2}; rows and columns of isolated vertices are zero.
Eigen::MatrixXd normalized_laplacian(const WeightedGraph& g);
/// D^{-1/2} A D^{-1/2}; rows and columns of isolated vertices are zero.
Eigen::MatrixXd normalized_adjacency(const WeightedGraph& g);

inline constexpr double kInfiniteEigenvalue = std::numeric_limits<double>::infinity();

struct SpectralProfile {
  /// Ascending. Infinite sentinels (if any) come last.
  std::vector<double> eigenvalues;

  /// 1-based lookup; indices past the end yield the infinite sentinel.
  double lambda(int i) const;
  int finite_count() const;
};

SpectralProfile spectrum(const Eigen::MatrixXd& M, double symmetry_tol = 1e-9);

/// Eigenvalues of diag(A)^{-1/2} A diag(A)^{-1/2}; zero diagonal entries give infinite sentinels.
SpectralProfile generalized_spectrum(const Eigen::MatrixXd& A, double psd_tol = 1e-9);

enum class CutObjective { cut, sparsest, expansion, ncut, conductance };

CutObjective parse_cut_objective(std::string_view name);
std::string to_string(CutObjective o);

struct CutValue {
  double cut_weight = 0.0;
  int side_size = 0;
  double side_volume = 0.0;
};

CutValue cut_value(const WeightedGraph& g, const std::vector<int>& U);
double evaluate_cut(const WeightedGraph& g, const std::vector<int>& U, CutObjective objective);

// Small built-in family.
WeightedGraph complete_graph(int n);
WeightedGraph cycle_graph(int n);
WeightedGraph path_graph(int n);
WeightedGraph star_graph(int leaves);
WeightedGraph hypercube_graph(int dim);
WeightedGraph petersen_graph();
WeightedGraph disjoint_union(const WeightedGraph& a, const WeightedGraph& b);
WeightedGraph induced_subgraph(const WeightedGraph& g, const std::vector<int>& vertices);

}  // namespace lhr

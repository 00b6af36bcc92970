#pragma once

#include "lhr/graph.hpp"
#include "lhr/rng.hpp"

#include <Eigen/Dense>

#include <vector>

namespace lhr::testing {

/// G(n, p) with optional integer weights in 1..3, seeded.
inline WeightedGraph random_graph(int n, double p, std::uint64_t seed, bool weighted = false) {
  Rng rng(seed);
  WeightedGraph g(n);
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v)
      if (rng.bernoulli(p)) g.add_edge(u, v, weighted ? 1.0 + rng.below(3) : 1.0);
  return g;
}

/// Random connected graph: a random spanning tree plus G(n, p) edges.
inline WeightedGraph random_connected_graph(int n, double p, std::uint64_t seed, bool weighted = false) {
  Rng rng(seed);
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  for (int v = 1; v < n; ++v) {
    int u = rng.below(v);
    w(u, v) = weighted ? 1.0 + rng.below(3) : 1.0;
  }
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v)
      if (w(u, v) == 0.0 && rng.bernoulli(p)) w(u, v) = weighted ? 1.0 + rng.below(3) : 1.0;
  WeightedGraph g(n);
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v)
      if (w(u, v) > 0.0) g.add_edge(u, v, w(u, v));
  return g;
}

/// Vertex set from a bitmask.
inline std::vector<int> set_from_mask(unsigned mask, int n) {
  std::vector<int> U;
  for (int u = 0; u < n; ++u)
    if ((mask >> u) & 1u) U.push_back(u);
  return U;
}

inline Eigen::MatrixXd random_matrix(int rows, int cols, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd M(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) M(i, j) = 2.0 * rng.uniform() - 1.0;
  return M;
}

}  // namespace lhr::testing

#pragma once

#include "lhr/graph.hpp"
#include "lhr/lasserre.hpp"
#include "lhr/problems.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace lhr {

/// Edge e = (u, v) with u < v is satisfied by f when f(v) = perms[e][f(u)].
struct UniqueGamesInstance {
  WeightedGraph graph;
  int k = 2;
  std::vector<std::vector<int>> perms;

  /// Throws std::invalid_argument (non-bijective permutation, wrong length, ...).
  void validate() const;
  double unsatisfied(const std::vector<int>& labels) const;
  /// Laplacian of the label-extended graph: (u, i) -- (v, perm(i)) with weight w_e.
  Eigen::MatrixXd lifted_laplacian() const;
};

/// Lines "u v w perm" with perm = pi(1),...,pi(k) (1-based labels, comma separated).
/// k is taken from the first permutation. Edges are reoriented so that u < v.
UniqueGamesInstance parse_unique_games(std::string_view text);
UniqueGamesInstance read_unique_games_file(const std::string& path);
std::string format_unique_games(const UniqueGamesInstance& inst);

/// Minimize (1/2) xtilde^T L_lifted xtilde over proper labelings.
QipInstance build_unique_games(const UniqueGamesInstance& inst);

/// Label vectors x_u(f), f in [k], as columns; a factor of the singleton Gram.
Eigen::MatrixXd label_vectors(const LasserreSolution& x);

/// Columns X_u = sum_f x_u(f) (x) xbar_u(f) built from label_vectors (m x kn), returning m^2 x n.
/// Throws std::invalid_argument when two labels of one vertex are not orthogonal within 1e-6.
Eigen::MatrixXd embed_ug(const Eigen::MatrixXd& label_vecs, int n, int k);
Eigen::MatrixXd embed_ug(const LasserreSolution& x);

/// <X_u, X_v> computed from moments: sum_{f,g} z_uv(f,g)^2 / (||x_u(f)|| ||x_v(g)||).
Eigen::MatrixXd embedding_gram(const LasserreSolution& x);

/// Seed by one column selection on D^{1/2} X weighted by the normalized Laplacian.
std::vector<int> embedding_seed(const LasserreSolution& x, const WeightedGraph& g, int r, double eps);

struct LabelingResult {
  std::vector<int> labels;
  GuaranteeReport report;
};

LabelingResult solve_unique_games(const UniqueGamesInstance& inst, double eps, int r, std::uint64_t rng_seed,
                                  const PipelineOptions& options = {});

}  // namespace lhr

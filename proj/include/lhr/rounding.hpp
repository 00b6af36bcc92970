#pragma once

#include "lhr/lasserre.hpp"
#include "lhr/rng.hpp"

#include <Eigen/Dense>

#include <functional>
#include <stdexcept>
#include <vector>

namespace lhr {

inline constexpr long long kDefaultEnumerationCap = 1000000;

class InsufficientRounds : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Largest seed set the solution can condition on: rows for S u {u} must exist.
int seed_capacity(const LasserreSolution& x);

/// Singleton vectors x_u(j) as columns (column_index order) in the coordinates of x.basis_factor().
Eigen::MatrixXd singleton_vectors(const LasserreSolution& x);
/// sum_f xbar_S(f) xbar_S(f)^T over nonzero x_S(f), in basis_factor() coordinates. |S| <= r'.
Eigen::MatrixXd projector_Pi(const LasserreSolution& x, const std::vector<int>& S);

/// <Pi_S x_a, Pi_S x_b> for all singleton columns a, b, computed from moments:
/// sum_f z(S u u_a, f o i_a) z(S u u_b, f o i_b) / z(S, f).
Eigen::MatrixXd projected_gram(const LasserreSolution& x, const std::vector<int>& S,
                               long long enumeration_cap = kDefaultEnumerationCap);

/// Pr[xtilde_u(g) = 1 and xtilde_v(h) = 1] under seed S. Throws std::invalid_argument for u == v.
double pairwise_probability(const LasserreSolution& x, const std::vector<int>& S, int u, int g, int v, int h);

/// Tr(X^T Pi_S^perp X diag(L)) + Tr(X^T Pi_S X L): the exact expectation of xtilde^T L xtilde.
/// L must have no entries between two labels of the same vertex.
double expected_quadratic(const LasserreSolution& x, const std::vector<int>& S, const Eigen::MatrixXd& L);

struct SeedIteration {
  std::vector<int> seed;     // seed after this augmentation
  std::vector<int> added;    // vertices of the selected columns
  double delta = 0.0;        // Tr(X^T Pi^perp X diag(L))
  double eta_i = 0.0;        // Tr(X^T Pi X L)
  double xi = 0.0;           // delta + eta_i
  double claim_rhs = 0.0;    // (eta - eta_{i-1}) / lambda'
  bool claim_holds = true;   // delta <= claim_rhs + tol
};

struct SeedSet {
  std::vector<int> S_star;
  int iterations = 0;
  /// xi at the stopping point.
  double certified_bound = 0.0;
  double eta = 0.0;
  /// lambda_{r+1}[L; diag(L)] (may be +inf).
  double lambda = 0.0;
  double eps = 0.0;
  /// (1 + eps) / (1 - eps) * eta / min(lambda, 1).
  double threshold = 0.0;
  bool met_bound = false;
  bool capacity_reached = false;
  /// State 0 (empty seed) first, then one entry per augmentation.
  std::vector<SeedIteration> log;
};

struct SeedOptions {
  /// Columns picked per augmentation; 0 means ceil(r / eps).
  int columns_per_round = 0;
  /// Stop after this many augmentations even if the bound is not met; 0 means ceil(1/eps) + 4.
  int max_iterations = 0;
  long long enumeration_cap = kDefaultEnumerationCap;
  /// Stop (met_bound = false) instead of throwing InsufficientRounds when the seed outgrows the solution.
  bool stop_at_capacity = false;
  /// Keep augmenting after the bound is met until this many augmentations have been made.
  int min_iterations = 0;
};

/// Iterated column selection on diag(L)^{1/2} Pi_{S*}^perp X until the expected objective of the
/// rounding is within (1+eps)/(1-eps) * eta / min(lambda_{r+1}, 1).
SeedSet select_seed(const LasserreSolution& x, const Eigen::MatrixXd& L, int r, double eps,
                    const SeedOptions& options = {});

/// Same loop over the centered vectors y_u = x_u(0) - z_u x_empty, with an n x n weight matrix L.
SeedSet select_seed_centered(const LasserreSolution& x, const Eigen::MatrixXd& L, int r, double eps,
                             const SeedOptions& options = {});

/// Seed labelings f with weight ||x_S(f)||^2 and per-vertex conditionals.
class RoundingDistribution {
 public:
  RoundingDistribution(const LasserreSolution& x, std::vector<int> seed,
                       long long enumeration_cap = kDefaultEnumerationCap);

  int n() const { return n_; }
  int k() const { return k_; }
  const std::vector<int>& seed() const { return seed_; }
  int support_size() const { return static_cast<int>(labelings_.size()); }
  const Assignment& labeling(int f) const { return labelings_[f]; }
  double weight(int f) const { return weights_[f]; }
  double total_weight() const;
  /// Pr[label j at u | f]; n x k.
  const Eigen::MatrixXd& conditionals(int f) const { return conditionals_[f]; }
  double conditional(int f, int u, int j) const { return conditionals_[f](u, j); }

  /// Draws f, then one label per vertex.
  std::vector<int> sample(Rng& rng) const;
  std::vector<int> sample_given(int f, Rng& rng) const;
  /// E[xtilde^T L xtilde | f] for any kn x kn L.
  double conditional_expectation(int f, const Eigen::MatrixXd& L) const;
  double expectation(const Eigen::MatrixXd& L) const;
  /// Labeling with the smallest (largest when maximize) conditional expectation; lowest index on ties.
  int best_labeling(const Eigen::MatrixXd& L, bool maximize = false) const;

 private:
  int n_, k_;
  std::vector<int> seed_;
  std::vector<Assignment> labelings_;
  std::vector<double> weights_;
  std::vector<Eigen::MatrixXd> conditionals_;
};

/// One-shot draw with a fresh generator.
std::vector<int> sample_labeling(const RoundingDistribution& dist, std::uint64_t seed);

/// {0,1} indicator in column_index order.
Eigen::VectorXd labeling_indicator(const std::vector<int>& labels, int k);

}  // namespace lhr

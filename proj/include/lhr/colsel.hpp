#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <vector>

namespace lhr {

inline constexpr long long kDefaultExhaustiveBudget = 1000000;

struct ColumnSelection {
  std::vector<int> S;
  /// sum_u w_u ||X_S^perp X_u||^2.
  double projection_distance = 0.0;
  /// (r'+1)/(r'-r+1) * sum_{i>=r+1} sigma_i of the weighted Gram; zero for exhaustive_select.
  double bound = 0.0;
  bool used_fallback = false;
};

class SelectionBudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Orthonormal basis of span{X_u : u in S}; singular values below 1e-10 * largest are dropped.
Eigen::MatrixXd span_basis(const Eigen::MatrixXd& X, const std::vector<int>& S);
/// Orthogonal projector onto span{X_u : u in S}.
Eigen::MatrixXd span_projector(const Eigen::MatrixXd& X, const std::vector<int>& S);
/// X_S^perp X.
Eigen::MatrixXd project_out(const Eigen::MatrixXd& X, const std::vector<int>& S);

/// sum_u weights_u ||X_S^perp X_u||^2. Empty weights mean all ones.
double projection_distance(const Eigen::MatrixXd& X, const std::vector<int>& S, const Eigen::VectorXd& weights = {});

/// (r'+1)/(r'-r+1) * sum_{i>=r+1} sigma_i, sigma descending eigenvalues of (X W^{1/2})^T (X W^{1/2}).
double selection_bound(const Eigen::MatrixXd& X, int r, int r_prime, const Eigen::VectorXd& weights = {});

/// Greedy selection of at most r' columns, checked against selection_bound; exhaustive search on a miss.
ColumnSelection select_columns(const Eigen::MatrixXd& X, int r, int r_prime, const Eigen::VectorXd& weights = {},
                               long long exhaustive_budget = kDefaultExhaustiveBudget);

/// Minimum over all size-r' column subsets; ties go to the lexicographically smallest subset.
ColumnSelection exhaustive_select(const Eigen::MatrixXd& X, int r_prime, const Eigen::VectorXd& weights = {},
                                  long long budget = kDefaultExhaustiveBudget);

/// lambda_{r+1} of diag(L)^{-1/2} L diag(L)^{-1/2} (restricted to the positive diagonal); +inf past the end.
double generalized_bound(const Eigen::MatrixXd& L, int r);

}  // namespace lhr

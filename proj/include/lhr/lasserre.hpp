#pragma once

#include "lhr/json_writer.hpp"
#include "lhr/moment_space.hpp"
#include "lhr/sdp_solver.hpp"

#include <Eigen/Dense>

#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

namespace lhr {

/// Column of the singleton vector x_u(j) in every V x [k] matrix: label-major, j * n + u.
inline int column_index(int n, int u, int j) { return j * n + u; }

/// sum_{(u, j)} coef * x_u(j)  (sense)  rhs
struct LinearConstraint {
  enum class Sense { eq, geq };
  std::vector<std::tuple<int, int, double>> terms;
  Sense sense = Sense::eq;
  double rhs = 0.0;
};

struct QipInstance {
  int n = 0;
  int k = 2;
  /// kn x kn, indexed by column_index.
  Eigen::MatrixXd objective;
  bool maximize = false;
  std::vector<LinearConstraint> linear;
  /// (u, j) with x_u(j) = 0.
  std::vector<std::pair<int, int>> forbidden;
  std::vector<MonomialConstraint> monomials;
  double magnitude_bound = 1.0;
  double eps0 = 1e-6;

  /// Throws std::invalid_argument when an invariant fails.
  void validate() const;
  std::vector<MonomialConstraint> all_monomials() const;
};

struct SolveOptions {
  long long budget = kDefaultMatrixBudget;
  std::shared_ptr<const SdpSolver> solver;  // null -> default
  SdpOptions sdp;
};

struct SolverInfo {
  std::string status;
  int iterations = 0;
  double relative_gap = 0.0;
  double primal_infeasibility = 0.0;
  double dual_infeasibility = 0.0;
  double lower_bound = 0.0;
  int reduced_side = 0;
  int free_variables = 0;
};

class LasserreSolution {
 public:
  LasserreSolution(std::shared_ptr<const MomentIndex> index, QipInstance instance, std::vector<double> basis_values,
                   SolverInfo info = {});

  int n() const { return index_->n(); }
  int k() const { return index_->k(); }
  int r_prime() const { return index_->r_prime(); }
  const MomentIndex& index() const { return *index_; }
  std::shared_ptr<const MomentIndex> index_ptr() const { return index_; }
  const QipInstance& instance() const { return instance_; }
  const SolverInfo& info() const { return info_; }
  const std::vector<double>& basis_values() const { return values_; }

  /// z(A, h) = <x_S(f), x_T(g)> for any split of (A, h); |A| <= 2r'.
  double z(const Assignment& a) const;
  /// z of (a u b), zero when the labelings disagree.
  double z_pair(const Assignment& a, const Assignment& b) const;

  /// Gram matrix over all rows (S, f), |S| <= r'. Computed on first use.
  const Eigen::MatrixXd& gram() const;
  /// V with V^T V = reduced_moment_matrix(), negative eigenvalues clipped. Computed on first use.
  const Eigen::MatrixXd& basis_factor() const;
  /// x_S(f) for |S| <= r' in the coordinates of basis_factor().
  Eigen::VectorXd vector_of(const Assignment& a) const;
  /// Copy with a replaced Gram matrix (the z vector is kept).
  LasserreSolution with_gram(Eigen::MatrixXd gram) const;
  /// Reduced moment matrix over basis rows.
  Eigen::MatrixXd reduced_moment_matrix() const;
  /// X^T X for the singleton columns x_u(j), kn x kn.
  Eigen::MatrixXd singleton_gram() const;

  /// Objective Tr(A X^T X) in the instance's own sense (not negated for maximization).
  double objective_value() const;

 private:
  std::shared_ptr<const MomentIndex> index_;
  QipInstance instance_;
  std::vector<double> values_;
  SolverInfo info_;
  struct Cache {
    std::mutex mutex;
    std::optional<Eigen::MatrixXd> gram;
    std::optional<Eigen::MatrixXd> factor;
  };
  std::shared_ptr<Cache> cache_ = std::make_shared<Cache>();
};

/// Solves the r'-round relaxation. Throws Infeasible, BudgetExceeded or SolverError.
LasserreSolution solve_sdp(const QipInstance& inst, int r_prime, const SolveOptions& options = {});

class PsdViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Columns of V with V^T V = gram after clipping negative eigenvalues. Throws PsdViolation below -1e-6.
Eigen::MatrixXd extract_vectors(const Eigen::MatrixXd& gram, double psd_error_tol = 1e-6);

struct ConsistencyReport {
  double unit_norm = 0.0;         // | ||x_empty||^2 - 1 |
  double conflict = 0.0;          // max |<x_S(f), x_T(g)>| over disagreeing labelings
  double union_invariance = 0.0;  // max |<x_S(f), x_T(g)> - z(S u T, f o g)|
  double label_sum = 0.0;         // max | sum_j ||x_u(j)||^2 - ||x_empty||^2 |
  double marginal = 0.0;          // max || sum_g x_S(f o g) - x_{S\u}(f) ||
  double linear = 0.0;            // lifted linear constraints, worst violation
  double monomial = 0.0;          // monomial constraints, worst violation
  double psd = 0.0;               // max(0, -lambda_min(gram))
  double reconstruction = 0.0;    // extracted vectors vs gram
  double tolerance = 1e-6;

  double max_residual() const;
  bool pass() const { return max_residual() <= tolerance; }
};

ConsistencyReport check_consistency(const LasserreSolution& sol, double tolerance = 1e-6);

Json solution_to_json(const LasserreSolution& sol);
LasserreSolution solution_from_json(const Json& j);

Json instance_to_json(const QipInstance& inst);
QipInstance instance_from_json(const Json& j);

}  // namespace lhr

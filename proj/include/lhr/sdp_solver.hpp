#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace lhr {

/// One block of a linear matrix inequality F0 + sum_i t_i F_i >= 0.
/// A psd block is a symmetric size x size matrix; a nonneg block is a size x 1 vector constrained entrywise.
struct SdpBlock {
  enum class Kind { psd, nonneg };
  Kind kind = Kind::psd;
  int size = 0;
  Eigen::MatrixXd f0;
  std::vector<Eigen::SparseMatrix<double>> fi;
};

/// minimize c^T t subject to every block being feasible.
struct SdpProblem {
  int num_vars = 0;
  Eigen::VectorXd c;
  std::vector<SdpBlock> blocks;
};

struct SdpOptions {
  double gap_tol = 1e-10;
  double feas_tol = 1e-11;
  int max_iterations = 200;
};

struct SdpResult {
  Eigen::VectorXd t;
  double objective = 0.0;       // c^T t
  double lower_bound = 0.0;     // primal (certificate) objective
  double primal_infeasibility = 0.0;
  double dual_infeasibility = 0.0;
  double relative_gap = 0.0;
  int iterations = 0;
  bool converged = false;
  std::string status;
};

class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, SdpResult partial) : std::runtime_error(what), result(std::move(partial)) {}
  SdpResult result;
};

class SdpSolver {
 public:
  virtual ~SdpSolver() = default;
  virtual SdpResult solve(const SdpProblem& problem, const SdpOptions& options) const = 0;
};

/// Infeasible-start primal-dual path following (HKM direction, Mehrotra predictor-corrector).
class InteriorPointSolver : public SdpSolver {
 public:
  SdpResult solve(const SdpProblem& problem, const SdpOptions& options) const override;
};

std::shared_ptr<const SdpSolver> default_sdp_solver();

}  // namespace lhr

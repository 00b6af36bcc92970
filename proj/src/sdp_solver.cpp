#include "lhr/sdp_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lhr {

namespace {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using Sp = Eigen::SparseMatrix<double>;

/// Tr(F M) for symmetric sparse F.
double trace_prod(const Sp& F, const Mat& M) {
  double s = 0.0;
  for (int col = 0; col < F.outerSize(); ++col)
    for (Sp::InnerIterator it(F, col); it; ++it) s += it.value() * M(it.col(), it.row());
  return s;
}

/// Largest alpha in (0, inf] keeping X + alpha dX PSD, for PSD X.
double psd_step(const Mat& X, const Mat& dX) {
  Eigen::LLT<Mat> llt(X);
  if (llt.info() != Eigen::Success) return 0.0;
  Mat Linv = llt.matrixL().solve(Mat::Identity(X.rows(), X.cols()));
  Mat M = Linv * dX * Linv.transpose();
  M = 0.5 * (M + M.transpose());
  double lmin = Eigen::SelfAdjointEigenSolver<Mat>(M, Eigen::EigenvaluesOnly).eigenvalues()(0);
  return lmin >= 0 ? std::numeric_limits<double>::infinity() : -1.0 / lmin;
}

double nonneg_step(const Vec& x, const Vec& dx) {
  double a = std::numeric_limits<double>::infinity();
  for (int i = 0; i < x.size(); ++i)
    if (dx(i) < 0) a = std::min(a, -x(i) / dx(i));
  return a;
}

struct BlockState {
  Mat X, Z;   // psd
  Vec x, z;   // nonneg
};

}  // namespace

SdpResult InteriorPointSolver::solve(const SdpProblem& P, const SdpOptions& opt) const {
  const int p = P.num_vars;
  const int nb = static_cast<int>(P.blocks.size());
  SdpResult res;
  res.t = Vec::Zero(p);

  int total_size = 0;
  for (const auto& b : P.blocks) total_size += b.size;

  auto eval_block = [&](int bi, const Vec& t) {
    const SdpBlock& B = P.blocks[bi];
    Mat F = B.f0;
    for (int i = 0; i < p; ++i)
      if (t(i) != 0.0) F += t(i) * Mat(B.fi[i]);
    return F;
  };

  if (total_size == 0 || p == 0) {
    for (int bi = 0; bi < nb; ++bi) {
      Mat F = eval_block(bi, res.t);
      double lmin = P.blocks[bi].kind == SdpBlock::Kind::psd
                        ? (F.rows() ? Eigen::SelfAdjointEigenSolver<Mat>(F, Eigen::EigenvaluesOnly).eigenvalues()(0) : 0.0)
                        : (F.size() ? F.minCoeff() : 0.0);
      if (lmin < -1e-9) throw SolverError("infeasible: fixed point violates the constraints", res);
    }
    if (p > 0 && P.c.norm() > 0) throw SolverError("unbounded: objective on unconstrained variables", res);
    res.converged = true;
    res.status = "trivial";
    return res;
  }

  // Sparse column matrix per nonneg block for fast products.
  std::vector<Sp> nn_cols(nb);
  double cnorm = P.c.norm();
  double f0norm = 0.0;
  std::vector<BlockState> S(nb);
  for (int bi = 0; bi < nb; ++bi) {
    const SdpBlock& B = P.blocks[bi];
    const int N = B.size;
    double maxfi = 0.0, ratio = 0.0;
    for (int i = 0; i < p; ++i) {
      double nf = B.fi[i].norm();
      maxfi = std::max(maxfi, nf);
      ratio = std::max(ratio, (1.0 + std::abs(P.c(i))) / (1.0 + nf));
    }
    f0norm = std::max(f0norm, B.f0.norm());
    double xi = std::max({10.0, std::sqrt(double(N)), N * ratio});
    double eta = std::max({10.0, std::sqrt(double(N)), B.f0.norm(), maxfi});
    if (B.kind == SdpBlock::Kind::psd) {
      S[bi].X = xi * Mat::Identity(N, N);
      S[bi].Z = eta * Mat::Identity(N, N);
    } else {
      S[bi].x = Vec::Constant(N, xi);
      S[bi].z = Vec::Constant(N, eta);
      std::vector<Eigen::Triplet<double>> trip;
      for (int i = 0; i < p; ++i)
        for (Sp::InnerIterator it(B.fi[i], 0); it; ++it) trip.emplace_back(it.row(), i, it.value());
      nn_cols[bi].resize(N, p);
      nn_cols[bi].setFromTriplets(trip.begin(), trip.end());
    }
  }

  Vec t = Vec::Zero(p);
  int stalls = 0;
  SdpResult best = res;
  double best_merit = std::numeric_limits<double>::infinity();
  int since_best = 0;
  for (int iter = 0; iter < opt.max_iterations; ++iter) {
    res.iterations = iter;
    // Residuals.
    std::vector<Mat> Rd(nb);
    Vec rp = P.c;
    double rd_norm = 0.0, xz = 0.0, f0x = 0.0, xnorm = 0.0;
    for (int bi = 0; bi < nb; ++bi) {
      const SdpBlock& B = P.blocks[bi];
      Mat F = eval_block(bi, t);
      if (B.kind == SdpBlock::Kind::psd) {
        Rd[bi] = F - S[bi].Z;
        xz += (S[bi].X.cwiseProduct(S[bi].Z)).sum();
        f0x += (B.f0.cwiseProduct(S[bi].X)).sum();
        for (int i = 0; i < p; ++i) rp(i) -= trace_prod(B.fi[i], S[bi].X);
        xnorm = std::max(xnorm, S[bi].X.cwiseAbs().maxCoeff());
      } else {
        Rd[bi] = F - S[bi].z;
        xz += S[bi].x.dot(S[bi].z);
        f0x += B.f0.col(0).dot(S[bi].x);
        rp -= nn_cols[bi].transpose() * S[bi].x;
        xnorm = std::max(xnorm, S[bi].x.cwiseAbs().maxCoeff());
      }
      rd_norm = std::max(rd_norm, Rd[bi].norm());
    }
    const double mu = xz / total_size;
    const double cost = P.c.dot(t);
    res.t = t;
    res.objective = cost;
    res.lower_bound = -f0x;
    res.primal_infeasibility = rp.norm() / (1.0 + cnorm);
    res.dual_infeasibility = rd_norm / (1.0 + f0norm);
    res.relative_gap = std::abs(cost + f0x) / (1.0 + std::abs(cost) + std::abs(f0x));
    // Late iterations can lose accuracy to a badly conditioned Schur complement; keep the best point seen.
    const double merit = std::max({res.relative_gap, res.primal_infeasibility, res.dual_infeasibility});
    if (merit < best_merit) {
      best_merit = merit;
      best = res;
      since_best = 0;
    } else if (++since_best >= 15) {
      break;
    }
    if (res.relative_gap < opt.gap_tol && res.primal_infeasibility < opt.feas_tol &&
        res.dual_infeasibility < opt.feas_tol) {
      res.converged = true;
      res.status = "optimal";
      return res;
    }
    if (xnorm > 1e13) {
      res.status = "infeasible";
      throw SolverError("infeasible: primal iterates diverge (no point satisfies the constraints)", res);
    }

    // Schur complement.
    std::vector<Mat> Zinv(nb);
    Mat O = Mat::Zero(p, p);
    for (int bi = 0; bi < nb; ++bi) {
      const SdpBlock& B = P.blocks[bi];
      if (B.kind == SdpBlock::Kind::psd) {
        const Mat& X = S[bi].X;
        Eigen::LLT<Mat> llt(S[bi].Z);
        Zinv[bi] = llt.solve(Mat::Identity(B.size, B.size));
        const Mat& G = Zinv[bi];
        Mat W(B.size, B.size);
        for (int j = 0; j < p; ++j) {
          const Sp& Fj = B.fi[j];
          if (Fj.nonZeros() == 0) continue;
          if (Fj.nonZeros() <= B.size) {
            W.setZero();
            for (int col = 0; col < Fj.outerSize(); ++col)
              for (Sp::InnerIterator it(Fj, col); it; ++it)
                W.noalias() += it.value() * X.col(it.row()) * G.row(it.col());
          } else {
            W.noalias() = (X * Fj) * G;
          }
          for (int i = 0; i <= j; ++i) {
            if (B.fi[i].nonZeros() == 0) continue;
            double v = trace_prod(B.fi[i], W);
            O(i, j) += v;
            if (i != j) O(j, i) += v;
          }
        }
      } else {
        Vec d = S[bi].x.cwiseQuotient(S[bi].z);
        Zinv[bi] = S[bi].z.cwiseInverse();
        O += Mat(nn_cols[bi].transpose() * d.asDiagonal() * nn_cols[bi]);
      }
    }
    O = 0.5 * (O + O.transpose());
    double diag_scale = std::max(1e-300, O.diagonal().cwiseAbs().maxCoeff());
    for (int i = 0; i < p; ++i)
      if (O(i, i) <= 1e-14 * diag_scale) O(i, i) += diag_scale;
    Eigen::LDLT<Mat> Ofac(O);

    // Solves for a direction given the complementarity target R (per block).
    auto direction = [&](const std::vector<Mat>& R, Vec& dt, std::vector<Mat>& dX, std::vector<Mat>& dZ) {
      Vec rhs = -rp;
      for (int bi = 0; bi < nb; ++bi) {
        const SdpBlock& B = P.blocks[bi];
        if (B.kind == SdpBlock::Kind::psd) {
          Mat Gm = R[bi] - S[bi].X * Rd[bi] * Zinv[bi];
          for (int i = 0; i < p; ++i) rhs(i) += trace_prod(B.fi[i], Gm);
        } else {
          Vec g = R[bi].col(0) - S[bi].x.cwiseProduct(Rd[bi].col(0)).cwiseProduct(Zinv[bi].col(0));
          rhs += nn_cols[bi].transpose() * g;
        }
      }
      dt = Ofac.solve(rhs);
      dX.assign(nb, Mat());
      dZ.assign(nb, Mat());
      for (int bi = 0; bi < nb; ++bi) {
        const SdpBlock& B = P.blocks[bi];
        if (B.kind == SdpBlock::Kind::psd) {
          Mat dz = Rd[bi];
          for (int i = 0; i < p; ++i)
            if (dt(i) != 0.0 && B.fi[i].nonZeros()) dz += dt(i) * Mat(B.fi[i]);
          Mat T = S[bi].X * dz * Zinv[bi];
          dX[bi] = R[bi] - 0.5 * (T + T.transpose());
          dX[bi] = 0.5 * (dX[bi] + dX[bi].transpose());
          dZ[bi] = 0.5 * (dz + dz.transpose());
        } else {
          Vec dz = Rd[bi].col(0) + nn_cols[bi] * dt;
          dX[bi] = R[bi].col(0) - S[bi].x.cwiseProduct(dz).cwiseProduct(Zinv[bi].col(0));
          dZ[bi] = dz;
        }
      }
    };
    auto steps = [&](const std::vector<Mat>& dX, const std::vector<Mat>& dZ, double& ap, double& ad) {
      ap = ad = std::numeric_limits<double>::infinity();
      for (int bi = 0; bi < nb; ++bi) {
        if (P.blocks[bi].kind == SdpBlock::Kind::psd) {
          ap = std::min(ap, psd_step(S[bi].X, dX[bi]));
          ad = std::min(ad, psd_step(S[bi].Z, dZ[bi]));
        } else {
          ap = std::min(ap, nonneg_step(S[bi].x, dX[bi].col(0)));
          ad = std::min(ad, nonneg_step(S[bi].z, dZ[bi].col(0)));
        }
      }
    };

    // Predictor.
    std::vector<Mat> R(nb);
    for (int bi = 0; bi < nb; ++bi)
      R[bi] = P.blocks[bi].kind == SdpBlock::Kind::psd ? Mat(-S[bi].X) : Mat(-S[bi].x);
    Vec dt_a;
    std::vector<Mat> dX_a, dZ_a;
    direction(R, dt_a, dX_a, dZ_a);
    double ap, ad;
    steps(dX_a, dZ_a, ap, ad);
    ap = std::min(1.0, ap);
    ad = std::min(1.0, ad);
    double xz_a = 0.0;
    for (int bi = 0; bi < nb; ++bi) {
      if (P.blocks[bi].kind == SdpBlock::Kind::psd) {
        xz_a += ((S[bi].X + ap * dX_a[bi]).cwiseProduct(S[bi].Z + ad * dZ_a[bi])).sum();
      } else {
        xz_a += (S[bi].x + ap * dX_a[bi].col(0)).dot(S[bi].z + ad * dZ_a[bi].col(0));
      }
    }
    double sigma = std::clamp(std::pow(std::max(xz_a, 0.0) / total_size / mu, 3.0), 0.0, 1.0);

    // Corrector.
    for (int bi = 0; bi < nb; ++bi) {
      if (P.blocks[bi].kind == SdpBlock::Kind::psd) {
        Mat T = dX_a[bi] * dZ_a[bi] * Zinv[bi];
        R[bi] = sigma * mu * Zinv[bi] - S[bi].X - 0.5 * (T + T.transpose());
      } else {
        R[bi] = Mat(sigma * mu * Zinv[bi].col(0) - S[bi].x -
                    dX_a[bi].col(0).cwiseProduct(dZ_a[bi].col(0)).cwiseProduct(Zinv[bi].col(0)));
      }
    }
    Vec dt;
    std::vector<Mat> dX, dZ;
    direction(R, dt, dX, dZ);
    steps(dX, dZ, ap, ad);
    const double gamma = 0.98;
    ap = std::min(1.0, gamma * ap);
    ad = std::min(1.0, gamma * ad);
    if (ap < 1e-10 && ad < 1e-10) {
      if (++stalls >= 3) break;
    } else {
      stalls = 0;
    }
    t += ad * dt;
    for (int bi = 0; bi < nb; ++bi) {
      if (P.blocks[bi].kind == SdpBlock::Kind::psd) {
        S[bi].X += ap * dX[bi];
        S[bi].Z += ad * dZ[bi];
        S[bi].X = 0.5 * (S[bi].X + S[bi].X.transpose());
        S[bi].Z = 0.5 * (S[bi].Z + S[bi].Z.transpose());
      } else {
        S[bi].x += ap * dX[bi].col(0);
        S[bi].z += ad * dZ[bi].col(0);
      }
    }
  }
  // Out of iterations or stalled: accept a slightly less accurate point, otherwise report failure.
  best.iterations = res.iterations;
  res = best;
  if (res.relative_gap < 1e-7 && res.dual_infeasibility < 1e-9 && res.primal_infeasibility < 1e-6) {
    res.converged = true;
    res.status = "optimal (reduced accuracy)";
    return res;
  }
  res.status = "not converged";
  throw SolverError("SDP solver did not converge: gap " + std::to_string(res.relative_gap) + ", primal infeasibility " +
                        std::to_string(res.primal_infeasibility) + ", dual infeasibility " +
                        std::to_string(res.dual_infeasibility),
                    res);
}

std::shared_ptr<const SdpSolver> default_sdp_solver() {
  static auto solver = std::make_shared<InteriorPointSolver>();
  return solver;
}

}  // namespace lhr

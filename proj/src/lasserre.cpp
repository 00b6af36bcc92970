#include "lhr/lasserre.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_set>

namespace lhr {

namespace {

using Mat = Eigen::MatrixXd;
using Sp = Eigen::SparseMatrix<double>;

AffineExpr lifted_row(const MomentIndex& idx, const LinearConstraint& c, const Assignment& Sf) {
  AffineExpr e;
  e.add(idx.expression(Sf), -c.rhs);
  for (const auto& [u, j, coef] : c.terms) {
    int fu = label_of(Sf, u);
    if (fu >= 0) {
      if (fu == j) e.add(idx.expression(Sf), coef);
    } else {
      e.add(idx.expression(*combine(Sf, single(u, j))), coef);
    }
  }
  return e;
}

AffineExpr objective_expression(const MomentIndex& idx, const QipInstance& inst) {
  AffineExpr e;
  const int n = inst.n, k = inst.k;
  for (int u = 0; u < n; ++u)
    for (int i = 0; i < k; ++i)
      for (int v = 0; v < n; ++v)
        for (int j = 0; j < k; ++j) {
          double a = inst.objective(column_index(n, u, i), column_index(n, v, j));
          if (a == 0.0) continue;
          if (u == v) {
            if (i == j) e.add(idx.expression(single(u, i)), a);
          } else {
            e.add(idx.expression(*combine(single(u, i), single(v, j))), a);
          }
        }
  return e;
}

double min_eigenvalue(const Mat& M) {
  if (M.rows() == 0) return 0.0;
  return Eigen::SelfAdjointEigenSolver<Mat>(M, Eigen::EigenvaluesOnly).eigenvalues()(0);
}

}  // namespace

void QipInstance::validate() const {
  if (n < 1) throw std::invalid_argument("instance: n must be positive");
  if (k < 1) throw std::invalid_argument("instance: k must be positive");
  const int d = n * k;
  if (objective.rows() != d || objective.cols() != d) {
    throw std::invalid_argument("instance: objective must be kn x kn");
  }
  double scale = std::max(1.0, objective.cwiseAbs().maxCoeff());
  if ((objective - objective.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale) {
    throw std::invalid_argument("instance: objective not symmetric");
  }
  if (min_eigenvalue(objective) < -1e-9 * scale) throw std::invalid_argument("instance: objective not PSD");
  for (const auto& c : linear) {
    std::map<int, int> label_used;
    for (const auto& [u, j, coef] : c.terms) {
      if (u < 0 || u >= n || j < 0 || j >= k) throw std::invalid_argument("instance: constraint term out of range");
      if (std::abs(coef) > 1.0 + 1e-12) throw std::invalid_argument("instance: constraint coefficient exceeds 1");
      auto [it, fresh] = label_used.emplace(u, j);
      if (!fresh && it->second != j) {
        throw std::invalid_argument("instance: constraint touches two labels of one vertex");
      }
    }
  }
  for (const auto& [u, j] : forbidden) {
    if (u < 0 || u >= n || j < 0 || j >= k) throw std::invalid_argument("instance: forbidden pair out of range");
  }
}

std::vector<MonomialConstraint> QipInstance::all_monomials() const {
  std::vector<MonomialConstraint> out = monomials;
  for (const auto& [u, j] : forbidden) out.push_back({single(u, j), 0});
  return out;
}

// ---------------------------------------------------------------------------

LasserreSolution::LasserreSolution(std::shared_ptr<const MomentIndex> index, QipInstance instance,
                                   std::vector<double> basis_values, SolverInfo info)
    : index_(std::move(index)), instance_(std::move(instance)), values_(std::move(basis_values)), info_(std::move(info)) {
  if (static_cast<int>(values_.size()) != static_cast<int>(index_->basis().size())) {
    throw std::invalid_argument("solution: basis value count mismatch");
  }
}

const Eigen::MatrixXd& LasserreSolution::gram() const {
  std::lock_guard<std::mutex> lock(cache_->mutex);
  if (!cache_->gram) {
    Mat M = reduced_moment_matrix();
    const int N = index_->side();
    const int Nb = static_cast<int>(index_->basis_rows().size());
    std::vector<Eigen::Triplet<double>> trip;
    for (int r = 0; r < N; ++r)
      for (const auto& [b, c] : index_->row_expansion(r)) trip.emplace_back(b, r, c);
    Sp C(Nb, N);
    C.setFromTriplets(trip.begin(), trip.end());
    Mat MC = M * C;
    Mat G = C.transpose() * MC;
    cache_->gram = 0.5 * (G + G.transpose());
  }
  return *cache_->gram;
}

const Eigen::MatrixXd& LasserreSolution::basis_factor() const {
  std::lock_guard<std::mutex> lock(cache_->mutex);
  if (!cache_->factor) {
    Mat M = reduced_moment_matrix();
    Eigen::SelfAdjointEigenSolver<Mat> es(M);
    const int Nb = static_cast<int>(M.rows());
    int keep = 0;
    for (int i = 0; i < Nb; ++i)
      if (es.eigenvalues()(i) > 0) ++keep;
    Mat V(keep, Nb);
    int row = 0;
    for (int i = 0; i < Nb; ++i) {
      double l = es.eigenvalues()(i);
      if (l > 0) V.row(row++) = std::sqrt(l) * es.eigenvectors().col(i).transpose();
    }
    cache_->factor = std::move(V);
  }
  return *cache_->factor;
}

Eigen::VectorXd LasserreSolution::vector_of(const Assignment& a) const {
  int r = index_->lookup(a);
  if (r < 0) throw std::out_of_range("vector_of: labeling has more than r' vertices");
  const Mat& V = basis_factor();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(V.rows());
  for (const auto& [b, c] : index_->row_expansion(r)) x += c * V.col(b);
  return x;
}

double LasserreSolution::z(const Assignment& a) const { return index_->expression(a).evaluate(values_); }

double LasserreSolution::z_pair(const Assignment& a, const Assignment& b) const {
  auto c = combine(a, b);
  return c ? z(*c) : 0.0;
}

LasserreSolution LasserreSolution::with_gram(Eigen::MatrixXd gram) const {
  LasserreSolution copy = *this;
  copy.cache_ = std::make_shared<Cache>();
  copy.cache_->gram = std::move(gram);
  return copy;
}

Eigen::MatrixXd LasserreSolution::reduced_moment_matrix() const {
  const auto& rows = index_->basis_rows();
  const int Nb = static_cast<int>(rows.size());
  Mat M(Nb, Nb);
  for (int a = 0; a < Nb; ++a)
    for (int b = a; b < Nb; ++b) {
      double v = z_pair(rows[a], rows[b]);
      M(a, b) = M(b, a) = v;
    }
  return M;
}

Eigen::MatrixXd LasserreSolution::singleton_gram() const {
  const int n = this->n(), k = this->k();
  Mat G = Mat::Zero(n * k, n * k);
  for (int u = 0; u < n; ++u)
    for (int i = 0; i < k; ++i)
      for (int v = 0; v < n; ++v)
        for (int j = 0; j < k; ++j) G(column_index(n, u, i), column_index(n, v, j)) = z_pair(single(u, i), single(v, j));
  return G;
}

double LasserreSolution::objective_value() const {
  return (instance_.objective.cwiseProduct(singleton_gram())).sum();
}

// ---------------------------------------------------------------------------

LasserreSolution solve_sdp(const QipInstance& inst, int r_prime, const SolveOptions& options) {
  inst.validate();
  if (r_prime < 1) throw std::invalid_argument("solve_sdp: r' must be >= 1");
  const int R = std::min(r_prime, inst.n);
  auto index = std::make_shared<MomentIndex>(inst.n, inst.k, R, inst.all_monomials(), options.budget);
  Eliminator elim = index->eliminator();

  // Lifted equalities over every row |S| <= R. Basis labelings suffice: the remaining rows are linear
  // combinations of them.
  const auto& rows = index->basis_rows();
  for (const auto& c : inst.linear) {
    if (c.sense != LinearConstraint::Sense::eq) continue;
    for (const Assignment& Sf : rows) {
      if (!elim.add_equation(lifted_row(*index, c, Sf))) throw Infeasible("linear equality constraints are inconsistent");
    }
  }

  const bool full = R == inst.n;
  const std::uint32_t all_vertices = inst.n == 32 ? 0xFFFFFFFFu : (1u << inst.n) - 1u;
  if (full) {
    // At full level an inequality lifted to a complete labeling sigma reads (a.sigma - b) p(sigma) >= 0,
    // so sigma carries no mass when it violates the inequality and the row is void otherwise.
    for (const Assignment& sigma : all_labelings(all_vertices, inst.k)) {
      for (const auto& c : inst.linear) {
        if (c.sense != LinearConstraint::Sense::geq) continue;
        double lhs = 0.0;
        for (const auto& [u, j, coef] : c.terms)
          if (label_of(sigma, u) == j) lhs += coef;
        if (lhs - c.rhs < -1e-9) {
          if (!elim.add_equation(index->expression(sigma))) throw Infeasible("inequality constraints exclude every labeling");
          break;
        }
      }
    }
  }

  // A zero diagonal entry forces its whole row to zero.
  const int Nb = static_cast<int>(rows.size());
  std::vector<char> active(Nb, 1);
  auto entry_expr = [&](int a, int b) -> AffineExpr {
    auto c = combine(rows[a], rows[b]);
    if (!c) return AffineExpr{};
    return elim.resolve(index->expression(*c));
  };
  // Not needed once every row is present: the labeling masses carry the whole constraint.
  for (bool changed = R < inst.n; changed;) {
    changed = false;
    for (int a = 0; a < Nb; ++a) {
      if (!active[a]) continue;
      AffineExpr d = entry_expr(a, a);
      if (!d.is_constant(1e-12)) continue;
      if (d.constant < -1e-9) throw Infeasible("moment matrix has a negative fixed diagonal entry");
      if (d.constant > 1e-12) continue;
      active[a] = 0;
      changed = true;
      for (int b = 0; b < Nb; ++b) {
        auto c = combine(rows[a], rows[b]);
        if (!c) continue;
        if (!elim.add_equation(index->expression(*c))) throw Infeasible("constraints force a nonzero entry in a zero row");
      }
    }
  }
  if (!active[0]) throw Infeasible("constraints force x_empty = 0");

  std::vector<int> free_vars = elim.free_variables();
  const int p = static_cast<int>(free_vars.size());
  std::vector<int> var_pos(index->basis().size(), -1);
  for (int i = 0; i < p; ++i) var_pos[free_vars[i]] = i;

  std::vector<int> act;
  for (int a = 0; a < Nb; ++a)
    if (active[a]) act.push_back(a);
  const int N = static_cast<int>(act.size());

  SdpProblem prob;
  prob.num_vars = p;
  std::vector<AffineExpr> ineq;
  if (full) {
    // With every row present the reduced moment matrix is Z^T diag(p) Z for the invertible zeta matrix Z,
    // p(sigma) = z(V, sigma) the mass of each full labeling. PSD is then exactly p >= 0.
    for (const Assignment& sigma : all_labelings(all_vertices, inst.k)) {
      AffineExpr e = elim.resolve(index->expression(sigma));
      if (e.is_constant(1e-12)) {
        if (e.constant < -1e-9) throw Infeasible("a labeling is forced to negative mass");
        continue;
      }
      ineq.push_back(std::move(e));
    }
  } else {
    // Moment block F0 + sum t_i F_i.
    Mat F0 = Mat::Zero(N, N);
    std::vector<std::vector<Eigen::Triplet<double>>> trips(p);
    std::unordered_map<Assignment, AffineExpr, AssignmentHash> cache;
    for (int a = 0; a < N; ++a)
      for (int b = a; b < N; ++b) {
        auto c = combine(rows[act[a]], rows[act[b]]);
        if (!c) continue;
        auto it = cache.find(*c);
        if (it == cache.end()) it = cache.emplace(*c, elim.resolve(index->expression(*c))).first;
        const AffineExpr& e = it->second;
        F0(a, b) = F0(b, a) = e.constant;
        for (const auto& [v, coef] : e.terms) {
          int i = var_pos[v];
          trips[i].emplace_back(a, b, coef);
          if (a != b) trips[i].emplace_back(b, a, coef);
        }
      }
    std::vector<Sp> Fi(p, Sp(N, N));
    for (int i = 0; i < p; ++i) {
      Fi[i].setFromTriplets(trips[i].begin(), trips[i].end());
      Fi[i].makeCompressed();
    }

    // Common kernel of the affine family: every feasible moment matrix vanishes on it, so each kernel vector
    // makes one row a fixed combination of the others. Dropping one pivot row per kernel direction leaves a
    // principal submatrix that is PSD exactly when the full matrix is.
    std::vector<int> keep_rows(N);
    for (int a = 0; a < N; ++a) keep_rows[a] = a;
    {
      Mat G = F0 * F0;
      for (int i = 0; i < p; ++i) {
        Mat D(Fi[i]);
        G.noalias() += D * D;
      }
      Eigen::SelfAdjointEigenSolver<Mat> es(G);
      double top = std::max(es.eigenvalues().maxCoeff(), 1e-300);
      int ker = 0;
      while (ker < N && es.eigenvalues()(ker) <= 1e-16 * top) ++ker;
      if (ker > 0) {
        Mat K = es.eigenvectors().leftCols(ker);
        // Pivots never land on the x_empty row.
        Eigen::ColPivHouseholderQR<Mat> qr(K.bottomRows(N - 1).transpose());
        if (qr.rank() < ker) throw Infeasible("constraints force x_empty into the kernel");
        std::vector<char> drop(N, 0);
        for (int d = 0; d < ker; ++d) drop[qr.colsPermutation().indices()(d) + 1] = 1;
        keep_rows.clear();
        for (int a = 0; a < N; ++a)
          if (!drop[a]) keep_rows.push_back(a);
        const int M = static_cast<int>(keep_rows.size());
        Mat F0r(M, M);
        for (int a = 0; a < M; ++a)
          for (int b = 0; b < M; ++b) F0r(a, b) = F0(keep_rows[a], keep_rows[b]);
        F0 = F0r;
        std::vector<int> pos(N, -1);
        for (int a = 0; a < M; ++a) pos[keep_rows[a]] = a;
        for (int i = 0; i < p; ++i) {
          std::vector<Eigen::Triplet<double>> tr;
          for (int col = 0; col < Fi[i].outerSize(); ++col)
            for (Sp::InnerIterator it(Fi[i], col); it; ++it)
              if (pos[it.row()] >= 0 && pos[it.col()] >= 0) tr.emplace_back(pos[it.row()], pos[it.col()], it.value());
          Fi[i] = Sp(M, M);
          Fi[i].setFromTriplets(tr.begin(), tr.end());
          Fi[i].makeCompressed();
        }
      }
    }

    SdpBlock moment;
    moment.kind = SdpBlock::Kind::psd;
    moment.size = static_cast<int>(F0.rows());
    moment.f0 = F0;
    moment.fi = std::move(Fi);
    prob.blocks.push_back(std::move(moment));
  }

  // Lifted inequalities over every (S, f), |S| <= R; at full level they were applied to the masses above.
  for (const auto& c : inst.linear) {
    if (full || c.sense != LinearConstraint::Sense::geq) continue;
    for (std::uint32_t S : subsets_up_to(inst.n, R)) {
      for (const Assignment& Sf : all_labelings(S, inst.k)) {
        AffineExpr e = elim.resolve(lifted_row(*index, c, Sf));
        if (e.is_constant(1e-12)) {
          if (e.constant < -1e-9) throw Infeasible("a lifted inequality is violated by every solution");
          continue;
        }
        ineq.push_back(std::move(e));
      }
    }
  }
  if (!ineq.empty()) {
    SdpBlock lp;
    lp.kind = SdpBlock::Kind::nonneg;
    lp.size = static_cast<int>(ineq.size());
    lp.f0 = Mat::Zero(lp.size, 1);
    std::vector<std::vector<Eigen::Triplet<double>>> lt(p);
    for (int r = 0; r < lp.size; ++r) {
      lp.f0(r, 0) = ineq[r].constant;
      for (const auto& [v, coef] : ineq[r].terms) lt[var_pos[v]].emplace_back(r, 0, coef);
    }
    lp.fi.assign(p, Sp(lp.size, 1));
    for (int i = 0; i < p; ++i) {
      lp.fi[i].setFromTriplets(lt[i].begin(), lt[i].end());
      lp.fi[i].makeCompressed();
    }
    prob.blocks.push_back(std::move(lp));
  }

  AffineExpr obj = elim.resolve(objective_expression(*index, inst));
  const double sign = inst.maximize ? -1.0 : 1.0;
  prob.c = Eigen::VectorXd::Zero(p);
  for (const auto& [v, coef] : obj.terms) prob.c(var_pos[v]) = sign * coef;

  auto solver = options.solver ? options.solver : default_sdp_solver();
  SdpResult res;
  try {
    res = solver->solve(prob, options.sdp);
  } catch (const SolverError& e) {
    if (e.result.status == "infeasible") throw Infeasible(e.what());
    throw;
  }

  std::vector<double> values(index->basis().size(), 0.0);
  for (int i = 0; i < p; ++i) values[free_vars[i]] = res.t(i);
  for (std::size_t v = 0; v < values.size(); ++v) {
    if (var_pos[v] >= 0) continue;
    values[v] = elim.resolve(AffineExpr::variable(static_cast<int>(v))).evaluate(values);
  }

  SolverInfo info;
  info.status = res.status;
  info.iterations = res.iterations;
  info.relative_gap = res.relative_gap;
  info.primal_infeasibility = res.primal_infeasibility;
  info.dual_infeasibility = res.dual_infeasibility;
  info.lower_bound = sign * res.lower_bound + obj.constant;
  info.reduced_side = full ? 0 : static_cast<int>(prob.blocks[0].size);
  info.free_variables = p;
  return LasserreSolution(index, inst, std::move(values), info);
}

// ---------------------------------------------------------------------------

namespace {

struct Factor {
  Mat V;
  double min_eigenvalue = 0.0;
};

Factor factor_gram(const Mat& gram) {
  Factor f;
  const int N = static_cast<int>(gram.rows());
  if (N == 0) return f;
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (gram + gram.transpose()));
  f.min_eigenvalue = es.eigenvalues()(0);
  int keep = 0;
  for (int i = 0; i < N; ++i)
    if (es.eigenvalues()(i) > 0) ++keep;
  f.V.resize(keep, N);
  int row = 0;
  for (int i = 0; i < N; ++i) {
    double l = es.eigenvalues()(i);
    if (l > 0) f.V.row(row++) = std::sqrt(l) * es.eigenvectors().col(i).transpose();
  }
  return f;
}

}  // namespace

Eigen::MatrixXd extract_vectors(const Eigen::MatrixXd& gram, double psd_error_tol) {
  Factor f = factor_gram(gram);
  if (f.min_eigenvalue < -psd_error_tol) {
    throw PsdViolation("Gram matrix has eigenvalue " + format_double(f.min_eigenvalue) + " below -" +
                       format_double(psd_error_tol));
  }
  return f.V;
}

double ConsistencyReport::max_residual() const {
  return std::max({unit_norm, conflict, union_invariance, label_sum, marginal, linear, monomial, psd, reconstruction});
}

ConsistencyReport check_consistency(const LasserreSolution& sol, double tolerance) {
  ConsistencyReport rep;
  rep.tolerance = tolerance;
  const MomentIndex& idx = sol.index();
  const Mat& gram = sol.gram();
  Factor f = factor_gram(gram);
  rep.psd = std::max(0.0, -f.min_eigenvalue);
  const Mat& V = f.V;
  Mat G = V.transpose() * V;
  const int N = idx.side();
  const auto& E = idx.entries();

  rep.unit_norm = std::abs(G(0, 0) - 1.0);
  for (int a = 0; a < N; ++a)
    for (int b = a; b < N; ++b) {
      rep.reconstruction = std::max(rep.reconstruction, std::abs(G(a, b) - gram(a, b)));
      auto c = idx.pair(a, b);
      if (!c) {
        rep.conflict = std::max(rep.conflict, std::abs(G(a, b)));
      } else {
        rep.union_invariance = std::max(rep.union_invariance, std::abs(G(a, b) - sol.z(*c)));
      }
    }
  for (int u = 0; u < sol.n(); ++u) {
    double s = 0.0;
    for (int j = 0; j < sol.k(); ++j) s += G(idx.lookup(single(u, j)), idx.lookup(single(u, j)));
    rep.label_sum = std::max(rep.label_sum, std::abs(s - G(0, 0)));
  }
  for (int a = 0; a < N; ++a) {
    for (int u : assignment_vertices(E[a])) {
      if (label_of(E[a], u) != 0) continue;
      Eigen::VectorXd s = -V.col(idx.lookup(without(E[a], u)));
      for (int g = 0; g < sol.k(); ++g) s += V.col(idx.lookup(with_label(E[a], u, g)));
      rep.marginal = std::max(rep.marginal, s.norm());
    }
  }
  const QipInstance& inst = sol.instance();
  // Squared norms from the extracted vectors where the row exists, otherwise from z (|S u {u}| = r' + 1).
  auto sq = [&](const Assignment& a) {
    int r = idx.lookup(a);
    return r >= 0 ? G(r, r) : sol.z(a);
  };
  const int R = sol.r_prime();
  for (const auto& c : inst.linear) {
    for (int a = 0; a < N; ++a) {
      double val = 0.0;
      for (const auto& [u, j, coef] : c.terms) {
        int fu = label_of(E[a], u);
        if (fu >= 0) {
          if (fu == j) val += coef * sq(E[a]);
        } else {
          val += coef * sq(*combine(E[a], single(u, j)));
        }
      }
      double target = c.rhs * sq(E[a]);
      double viol = c.sense == LinearConstraint::Sense::eq ? std::abs(val - target) : std::max(0.0, target - val);
      rep.linear = std::max(rep.linear, viol);
    }
  }
  for (const auto& mc : inst.all_monomials()) {
    const Assignment& T = mc.monomial;
    for (int a = 0; a < N; ++a) {
      if (E[a].mask & T.mask) continue;
      if (assignment_size(E[a]) + assignment_size(T) > R) continue;
      double lhs = sq(*combine(E[a], T));
      rep.monomial = std::max(rep.monomial, std::abs(lhs - mc.value * sq(E[a])));
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------

Json instance_to_json(const QipInstance& inst) {
  Json j;
  j["n"] = inst.n;
  j["k"] = inst.k;
  j["maximize"] = inst.maximize;
  Json obj = Json::array();
  for (int r = 0; r < inst.objective.rows(); ++r)
    for (int c = 0; c < inst.objective.cols(); ++c)
      if (inst.objective(r, c) != 0.0) obj.push_back(Json::array({r, c, inst.objective(r, c)}));
  j["objective"] = obj;
  Json lin = Json::array();
  for (const auto& c : inst.linear) {
    Json row;
    Json terms = Json::array();
    for (const auto& [u, l, coef] : c.terms) terms.push_back(Json::array({u, l, coef}));
    row["terms"] = terms;
    row["sense"] = c.sense == LinearConstraint::Sense::eq ? "eq" : "geq";
    row["rhs"] = c.rhs;
    lin.push_back(row);
  }
  j["linear"] = lin;
  Json forb = Json::array();
  for (const auto& [u, l] : inst.forbidden) forb.push_back(Json::array({u, l}));
  j["forbidden"] = forb;
  Json mono = Json::array();
  for (const auto& m : inst.monomials) mono.push_back(Json::array({assignment_key(m.monomial), m.value}));
  j["monomials"] = mono;
  j["magnitude_bound"] = inst.magnitude_bound;
  j["eps0"] = inst.eps0;
  return j;
}

QipInstance instance_from_json(const Json& j) {
  QipInstance inst;
  inst.n = j.at("n").get<int>();
  inst.k = j.at("k").get<int>();
  inst.maximize = j.at("maximize").get<bool>();
  inst.objective = Mat::Zero(inst.n * inst.k, inst.n * inst.k);
  for (const auto& e : j.at("objective")) inst.objective(e[0].get<int>(), e[1].get<int>()) = e[2].get<double>();
  for (const auto& row : j.at("linear")) {
    LinearConstraint c;
    for (const auto& t : row.at("terms")) c.terms.emplace_back(t[0].get<int>(), t[1].get<int>(), t[2].get<double>());
    c.sense = row.at("sense").get<std::string>() == "eq" ? LinearConstraint::Sense::eq : LinearConstraint::Sense::geq;
    c.rhs = row.at("rhs").get<double>();
    inst.linear.push_back(std::move(c));
  }
  for (const auto& f : j.at("forbidden")) inst.forbidden.emplace_back(f[0].get<int>(), f[1].get<int>());
  for (const auto& m : j.at("monomials")) {
    inst.monomials.push_back({parse_assignment_key(m[0].get<std::string>()), m[1].get<int>()});
  }
  inst.magnitude_bound = j.at("magnitude_bound").get<double>();
  inst.eps0 = j.at("eps0").get<double>();
  return inst;
}

Json solution_to_json(const LasserreSolution& sol) {
  Json j;
  j["r_prime"] = sol.r_prime();
  j["k"] = sol.k();
  j["n"] = sol.n();
  j["objective_value"] = sol.objective_value();
  Json z = Json::object();
  const auto& basis = sol.index().basis();
  for (std::size_t i = 0; i < basis.size(); ++i) z[assignment_key(basis[i])] = sol.basis_values()[i];
  j["z"] = z;
  const SolverInfo& info = sol.info();
  j["residuals"] = {{"status", info.status},
                    {"iterations", info.iterations},
                    {"relative_gap", info.relative_gap},
                    {"primal_infeasibility", info.primal_infeasibility},
                    {"dual_infeasibility", info.dual_infeasibility},
                    {"lower_bound", info.lower_bound}};
  j["instance"] = instance_to_json(sol.instance());
  return j;
}

LasserreSolution solution_from_json(const Json& j) {
  QipInstance inst = instance_from_json(j.at("instance"));
  const int R = j.at("r_prime").get<int>();
  auto index = std::make_shared<MomentIndex>(inst.n, inst.k, R, inst.all_monomials(),
                                             std::numeric_limits<long long>::max());
  std::vector<double> values(index->basis().size(), 0.0);
  std::vector<char> seen(values.size(), 0);
  for (auto it = j.at("z").begin(); it != j.at("z").end(); ++it) {
    int i = index->basis_index(parse_assignment_key(it.key()));
    if (i < 0) throw std::invalid_argument("solution: unknown coordinate " + it.key());
    values[i] = it.value().get<double>();
    seen[i] = 1;
  }
  if (std::find(seen.begin(), seen.end(), 0) != seen.end()) throw std::invalid_argument("solution: missing coordinates");
  SolverInfo info;
  const Json& r = j.at("residuals");
  info.status = r.at("status").get<std::string>();
  info.iterations = r.at("iterations").get<int>();
  info.relative_gap = r.at("relative_gap").get<double>();
  info.primal_infeasibility = r.at("primal_infeasibility").get<double>();
  info.dual_infeasibility = r.at("dual_infeasibility").get<double>();
  info.lower_bound = r.at("lower_bound").get<double>();
  return LasserreSolution(index, std::move(inst), std::move(values), info);
}

}  // namespace lhr

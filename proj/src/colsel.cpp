#include "lhr/colsel.hpp"

#include "lhr/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace lhr {

namespace {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

Vec effective_weights(const Mat& X, const Vec& weights) {
  if (weights.size() == 0) return Vec::Ones(X.cols());
  if (weights.size() != X.cols()) throw std::invalid_argument("column selection: weight count mismatch");
  if (weights.size() > 0 && weights.minCoeff() < 0) throw std::invalid_argument("column selection: negative weight");
  return weights;
}

void check_columns(const Mat& X, const std::vector<int>& S) {
  for (int c : S)
    if (c < 0 || c >= X.cols()) throw std::out_of_range("column selection: column index out of range");
}

double binomial(int n, int k) {
  double c = 1.0;
  for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return c;
}

}  // namespace

Eigen::MatrixXd span_basis(const Eigen::MatrixXd& X, const std::vector<int>& S) {
  check_columns(X, S);
  if (S.empty() || X.rows() == 0) return Mat(X.rows(), 0);
  Mat XS(X.rows(), static_cast<int>(S.size()));
  for (std::size_t i = 0; i < S.size(); ++i) XS.col(static_cast<int>(i)) = X.col(S[i]);
  Eigen::JacobiSVD<Mat> svd(XS, Eigen::ComputeThinU);
  const Vec& s = svd.singularValues();
  if (s.size() == 0 || s(0) <= 0.0) return Mat(X.rows(), 0);
  int rank = 0;
  while (rank < s.size() && s(rank) > 1e-10 * s(0)) ++rank;
  return svd.matrixU().leftCols(rank);
}

Eigen::MatrixXd span_projector(const Eigen::MatrixXd& X, const std::vector<int>& S) {
  Mat U = span_basis(X, S);
  return U * U.transpose();
}

Eigen::MatrixXd project_out(const Eigen::MatrixXd& X, const std::vector<int>& S) {
  Mat U = span_basis(X, S);
  return X - U * (U.transpose() * X);
}

double projection_distance(const Eigen::MatrixXd& X, const std::vector<int>& S, const Eigen::VectorXd& weights) {
  Vec w = effective_weights(X, weights);
  Mat R = project_out(X, S);
  return R.colwise().squaredNorm().transpose().dot(w);
}

double selection_bound(const Eigen::MatrixXd& X, int r, int r_prime, const Eigen::VectorXd& weights) {
  if (r < 1 || r > r_prime) throw std::invalid_argument("selection_bound: need 1 <= r <= r'");
  Vec w = effective_weights(X, weights);
  Mat Xw = X * w.cwiseSqrt().asDiagonal();
  Mat G = Xw.transpose() * Xw;
  Vec ev = Eigen::SelfAdjointEigenSolver<Mat>(G, Eigen::EigenvaluesOnly).eigenvalues();
  std::sort(ev.data(), ev.data() + ev.size(), std::greater<double>());
  double tail = 0.0;
  for (int i = r; i < ev.size(); ++i) tail += std::max(0.0, ev(i));
  return static_cast<double>(r_prime + 1) / (r_prime - r + 1) * tail;
}

ColumnSelection exhaustive_select(const Eigen::MatrixXd& X, int r_prime, const Eigen::VectorXd& weights,
                                  long long budget) {
  const int m = static_cast<int>(X.cols());
  if (r_prime < 0 || r_prime > m) throw std::invalid_argument("exhaustive_select: r' exceeds the column count");
  Vec w = effective_weights(X, weights);
  if (binomial(m, r_prime) > static_cast<double>(budget)) {
    throw SelectionBudgetExceeded("exhaustive_select: C(" + std::to_string(m) + ", " + std::to_string(r_prime) +
                                  ") exceeds the budget " + std::to_string(budget));
  }
  const Vec norms = X.colwise().squaredNorm().transpose();
  const double total = norms.dot(w);
  ColumnSelection best;
  best.projection_distance = std::numeric_limits<double>::infinity();
  std::vector<int> S(r_prime);
  for (int i = 0; i < r_prime; ++i) S[i] = i;
  bool found = false;
  while (true) {
    Mat U = span_basis(X, S);
    Vec captured = (U.transpose() * X).colwise().squaredNorm().transpose();
    double d = std::max(0.0, total - captured.dot(w));
    if (!found || d < best.projection_distance - 1e-13 * (1.0 + best.projection_distance)) {
      best.projection_distance = d;
      best.S = S;
      found = true;
    }
    int i = r_prime - 1;
    while (i >= 0 && S[i] == m - r_prime + i) --i;
    if (i < 0) break;
    ++S[i];
    for (int j = i + 1; j < r_prime; ++j) S[j] = S[j - 1] + 1;
  }
  best.projection_distance = projection_distance(X, best.S, w);
  return best;
}

ColumnSelection select_columns(const Eigen::MatrixXd& X, int r, int r_prime, const Eigen::VectorXd& weights,
                               long long exhaustive_budget) {
  const int m = static_cast<int>(X.cols());
  if (r < 1 || r > r_prime) throw std::invalid_argument("select_columns: need 1 <= r <= r'");
  if (r_prime > m) throw std::invalid_argument("select_columns: r' exceeds the column count");
  Vec w = effective_weights(X, weights);
  Mat R = X * w.cwiseSqrt().asDiagonal();
  const double scale = R.squaredNorm();

  ColumnSelection sel;
  std::vector<char> taken(m, 0);
  for (int step = 0; step < r_prime; ++step) {
    int pick = -1;
    double best_gain = -1.0;
    for (int c = 0; c < m; ++c) {
      if (taken[c] || w(c) <= 0.0) continue;
      double nc = R.col(c).squaredNorm();
      if (nc <= 1e-24 * std::max(scale, 1e-300)) continue;
      double gain = (R.transpose() * R.col(c)).squaredNorm() / nc;
      if (gain > best_gain) {
        best_gain = gain;
        pick = c;
      }
    }
    if (pick < 0) break;
    taken[pick] = 1;
    sel.S.push_back(pick);
    Vec q = R.col(pick).normalized();
    R -= q * (q.transpose() * R);
  }
  std::sort(sel.S.begin(), sel.S.end());
  sel.projection_distance = projection_distance(X, sel.S, w);
  sel.bound = selection_bound(X, r, r_prime, w);

  if (sel.projection_distance > sel.bound + 1e-12 * (1.0 + scale)) {
    std::vector<int> pool;
    for (int c = 0; c < m; ++c)
      if (w(c) > 0.0) pool.push_back(c);
    const int size = std::min<int>(r_prime, static_cast<int>(pool.size()));
    if (binomial(static_cast<int>(pool.size()), size) <= static_cast<double>(exhaustive_budget)) {
      Mat Xp(X.rows(), static_cast<int>(pool.size()));
      Vec wp(static_cast<int>(pool.size()));
      for (std::size_t i = 0; i < pool.size(); ++i) {
        Xp.col(static_cast<int>(i)) = X.col(pool[i]);
        wp(static_cast<int>(i)) = w(pool[i]);
      }
      // Columns outside the pool carry zero weight, so distances on Xp and X agree.
      ColumnSelection ex = exhaustive_select(Xp, size, wp, exhaustive_budget);
      std::vector<int> S;
      for (int i : ex.S) S.push_back(pool[i]);
      sel.S = S;
      sel.projection_distance = projection_distance(X, sel.S, w);
      sel.used_fallback = true;
    }
  }
  return sel;
}

double generalized_bound(const Eigen::MatrixXd& L, int r) {
  if (r < 0) throw std::invalid_argument("generalized_bound: r must be nonnegative");
  return generalized_spectrum(L).lambda(r + 1);
}

}  // namespace lhr

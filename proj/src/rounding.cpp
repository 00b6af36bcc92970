#include "lhr/rounding.hpp"

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

// Seed labelings with ||x_S(f)||^2 at or below this are outside the support. The solver leaves
// around 1e-11 of noise on labelings that should have zero mass.
constexpr double kSupportTol = 1e-9;
// Conditionals this close to 0 or 1 are snapped, so pinned coordinates are honored exactly.
constexpr double kSnapTol = 1e-10;

std::uint32_t vertex_mask(int n, const std::vector<int>& S) {
  std::uint32_t m = 0;
  for (int u : S) {
    if (u < 0 || u >= n) throw std::out_of_range("seed vertex out of range");
    m |= 1u << u;
  }
  return m;
}

std::vector<int> normalized_seed(std::vector<int> S) {
  std::sort(S.begin(), S.end());
  S.erase(std::unique(S.begin(), S.end()), S.end());
  return S;
}

void check_seed(const LasserreSolution& x, const std::vector<int>& S) {
  if (static_cast<int>(S.size()) > seed_capacity(x)) {
    throw InsufficientRounds("seed of " + std::to_string(S.size()) + " vertices needs more rounds than r' = " +
                             std::to_string(x.r_prime()));
  }
}

std::vector<Assignment> seed_labelings(const LasserreSolution& x, const std::vector<int>& S, long long cap) {
  double count = std::pow(static_cast<double>(x.k()), static_cast<double>(S.size()));
  if (count > static_cast<double>(cap)) {
    throw std::length_error("seed labeling enumeration exceeds the cap of " + std::to_string(cap));
  }
  return all_labelings(vertex_mask(x.n(), S), x.k());
}

/// Row a_f of moments z(S u u, f o i) per seed labeling in the support, with its weight z(S, f).
struct SeedMoments {
  std::vector<Assignment> labelings;
  std::vector<double> weights;
  std::vector<Vec> rows;
};

SeedMoments seed_moments(const LasserreSolution& x, const std::vector<int>& S, long long cap) {
  const int n = x.n(), k = x.k();
  SeedMoments sm;
  for (const Assignment& f : seed_labelings(x, S, cap)) {
    double w = x.z(f);
    if (w <= kSupportTol) continue;
    Vec a(n * k);
    for (int u = 0; u < n; ++u)
      for (int i = 0; i < k; ++i) a(column_index(n, u, i)) = x.z_pair(f, single(u, i));
    sm.labelings.push_back(f);
    sm.weights.push_back(w);
    sm.rows.push_back(std::move(a));
  }
  return sm;
}

Mat gram_from_moments(const SeedMoments& sm, int dim) {
  Mat P = Mat::Zero(dim, dim);
  for (std::size_t f = 0; f < sm.rows.size(); ++f) P.noalias() += sm.rows[f] * sm.rows[f].transpose() / sm.weights[f];
  return P;
}

double weighted_trace(const Mat& G, const Vec& w) { return G.diagonal().dot(w); }

/// Factor X with X^T X = G (negative eigenvalues clipped); rows are coordinates.
Mat factor(const Mat& G) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (G + G.transpose()));
  const int d = static_cast<int>(G.rows());
  Mat X = Mat::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    double l = es.eigenvalues()(i);
    if (l > 0) X.row(i) = std::sqrt(l) * es.eigenvectors().col(i).transpose();
  }
  return X;
}

/// Shared loop: G0 is the Gram of the columns, projected(S) their Gram after Pi_S, owner(c) the vertex of column c.
SeedSet seed_loop(const LasserreSolution& x, const Mat& G0, const std::function<Mat(const std::vector<int>&)>& projected,
                  const Mat& L, const std::function<int(int)>& owner, int r, double eps, const SeedOptions& opt) {
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("select_seed: eps must lie in (0, 1)");
  if (r < 1) throw std::invalid_argument("select_seed: r must be positive");
  if (L.rows() != G0.rows() || L.cols() != G0.cols()) throw std::invalid_argument("select_seed: L has the wrong shape");

  SeedSet out;
  out.eps = eps;
  const Vec diagL = L.diagonal();
  const int cols = static_cast<int>(G0.cols());
  out.eta = (G0.cwiseProduct(L)).sum();
  out.lambda = generalized_bound(L, r);
  const double lam = std::min(out.lambda, 1.0);
  const double lam_prime = (1.0 - eps) * lam;
  const double tol = 1e-9 * (1.0 + std::abs(out.eta));
  // lambda = 0 makes the bound vacuous unless eta vanishes as well.
  if (lam > 0.0) {
    out.threshold = (1.0 + eps) / (1.0 - eps) * out.eta / lam;
  } else {
    out.threshold = out.eta <= tol ? 0.0 : std::numeric_limits<double>::infinity();
  }
  const int per_round = opt.columns_per_round > 0 ? opt.columns_per_round : static_cast<int>(std::ceil(r / eps - 1e-12));
  const int max_iter = opt.max_iterations > 0 ? opt.max_iterations : static_cast<int>(std::ceil(1.0 / eps - 1e-12)) + 4;

  std::vector<int> S;
  Mat P = projected(S);
  auto record = [&](const std::vector<int>& added, double prev_eta_i) {
    SeedIteration it;
    it.seed = S;
    it.added = added;
    Mat R = G0 - P;
    it.delta = weighted_trace(R, diagL);
    it.eta_i = (P.cwiseProduct(L)).sum();
    it.xi = it.delta + it.eta_i;
    if (!out.log.empty()) {
      it.claim_rhs = lam_prime > 0.0 ? (out.eta - prev_eta_i) / lam_prime : std::numeric_limits<double>::infinity();
      it.claim_holds = it.delta <= it.claim_rhs + tol;
    }
    out.log.push_back(it);
    return it;
  };
  SeedIteration cur = record({}, 0.0);
  while ((cur.xi > out.threshold + tol || out.iterations < opt.min_iterations) && out.iterations < max_iter) {
    Mat X = factor(G0 - P);
    const int take = std::min(per_round, cols);
    const int rr = std::min(r, take);
    ColumnSelection sel = select_columns(X, rr, take, diagL);
    std::vector<int> added;
    for (int c : sel.S) {
      int u = owner(c);
      if (!std::binary_search(S.begin(), S.end(), u) && std::find(added.begin(), added.end(), u) == added.end())
        added.push_back(u);
    }
    std::sort(added.begin(), added.end());
    if (added.empty()) break;
    std::vector<int> next = S;
    next.insert(next.end(), added.begin(), added.end());
    next = normalized_seed(next);
    if (opt.stop_at_capacity && static_cast<int>(next.size()) > seed_capacity(x)) {
      out.capacity_reached = true;
      break;
    }
    check_seed(x, next);
    double prev_eta_i = cur.eta_i;
    S = next;
    P = projected(S);
    ++out.iterations;
    cur = record(added, prev_eta_i);
  }
  out.S_star = S;
  out.certified_bound = cur.xi;
  out.met_bound = cur.xi <= out.threshold + tol;
  return out;
}

}  // namespace

int seed_capacity(const LasserreSolution& x) { return x.r_prime() >= x.n() ? x.n() : x.r_prime() - 1; }

Eigen::MatrixXd singleton_vectors(const LasserreSolution& x) {
  const int n = x.n(), k = x.k();
  const Mat& V = x.basis_factor();
  Mat X(V.rows(), n * k);
  for (int u = 0; u < n; ++u)
    for (int j = 0; j < k; ++j) X.col(column_index(n, u, j)) = x.vector_of(single(u, j));
  return X;
}

Eigen::MatrixXd projector_Pi(const LasserreSolution& x, const std::vector<int>& seed) {
  std::vector<int> S = normalized_seed(seed);
  if (static_cast<int>(S.size()) > x.r_prime()) throw InsufficientRounds("projector_Pi: |S| exceeds r'");
  const int d = static_cast<int>(x.basis_factor().rows());
  Mat Pi = Mat::Zero(d, d);
  for (const Assignment& f : seed_labelings(x, S, kDefaultEnumerationCap)) {
    Vec v = x.vector_of(f);
    double nn = v.squaredNorm();
    if (nn <= kSupportTol) continue;
    Pi.noalias() += v * v.transpose() / nn;
  }
  return Pi;
}

Eigen::MatrixXd projected_gram(const LasserreSolution& x, const std::vector<int>& seed, long long cap) {
  std::vector<int> S = normalized_seed(seed);
  check_seed(x, S);
  return gram_from_moments(seed_moments(x, S, cap), x.n() * x.k());
}

double pairwise_probability(const LasserreSolution& x, const std::vector<int>& seed, int u, int g, int v, int h) {
  if (u == v) throw std::invalid_argument("pairwise_probability: u and v must differ");
  std::vector<int> S = normalized_seed(seed);
  check_seed(x, S);
  double p = 0.0;
  for (const Assignment& f : seed_labelings(x, S, kDefaultEnumerationCap)) {
    double w = x.z(f);
    if (w <= kSupportTol) continue;
    p += x.z_pair(f, single(u, g)) * x.z_pair(f, single(v, h)) / w;
  }
  return p;
}

double expected_quadratic(const LasserreSolution& x, const std::vector<int>& seed, const Eigen::MatrixXd& L) {
  const int n = x.n(), k = x.k();
  if (L.rows() != n * k || L.cols() != n * k) throw std::invalid_argument("expected_quadratic: L must be kn x kn");
  for (int u = 0; u < n; ++u)
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j)
        if (i != j && L(column_index(n, u, i), column_index(n, u, j)) != 0.0)
          throw std::invalid_argument("expected_quadratic: L couples two labels of one vertex");
  Mat G0 = x.singleton_gram();
  Mat P = projected_gram(x, seed);
  return weighted_trace(G0 - P, L.diagonal()) + (P.cwiseProduct(L)).sum();
}

SeedSet select_seed(const LasserreSolution& x, const Eigen::MatrixXd& L, int r, double eps, const SeedOptions& options) {
  const int n = x.n();
  Mat G0 = x.singleton_gram();
  auto projected = [&](const std::vector<int>& S) { return projected_gram(x, S, options.enumeration_cap); };
  auto owner = [n](int c) { return c % n; };
  return seed_loop(x, G0, projected, L, owner, r, eps, options);
}

SeedSet select_seed_centered(const LasserreSolution& x, const Eigen::MatrixXd& L, int r, double eps,
                             const SeedOptions& options) {
  const int n = x.n();
  if (L.rows() != n || L.cols() != n) throw std::invalid_argument("select_seed_centered: L must be n x n");
  Vec zu(n);
  for (int u = 0; u < n; ++u) zu(u) = x.z(single(u, 0));
  const Mat shift = zu * zu.transpose();
  Mat G0 = x.singleton_gram().topLeftCorner(n, n) - shift;
  auto projected = [&](const std::vector<int>& S) {
    return Mat(projected_gram(x, S, options.enumeration_cap).topLeftCorner(n, n) - shift);
  };
  auto owner = [](int c) { return c; };
  return seed_loop(x, G0, projected, L, owner, r, eps, options);
}

// ---------------------------------------------------------------------------

RoundingDistribution::RoundingDistribution(const LasserreSolution& x, std::vector<int> seed, long long cap)
    : n_(x.n()), k_(x.k()), seed_(normalized_seed(std::move(seed))) {
  check_seed(x, seed_);
  SeedMoments sm = seed_moments(x, seed_, cap);
  labelings_ = sm.labelings;
  weights_ = sm.weights;
  for (std::size_t f = 0; f < labelings_.size(); ++f) {
    Mat C(n_, k_);
    for (int u = 0; u < n_; ++u) {
      double s = 0.0;
      for (int j = 0; j < k_; ++j) {
        double p = sm.rows[f](column_index(n_, u, j)) / sm.weights[f];
        p = std::clamp(p, 0.0, 1.0);
        if (p < kSnapTol) p = 0.0;
        if (p > 1.0 - kSnapTol) p = 1.0;
        C(u, j) = p;
        s += p;
      }
      if (s <= 0.0) throw std::runtime_error("rounding: vertex has no label with positive probability");
      C.row(u) /= s;
    }
    conditionals_.push_back(std::move(C));
  }
  if (labelings_.empty()) throw std::runtime_error("rounding: seed labelings have no support");
}

double RoundingDistribution::total_weight() const {
  double s = 0.0;
  for (double w : weights_) s += w;
  return s;
}

std::vector<int> RoundingDistribution::sample_given(int f, Rng& rng) const {
  const Mat& C = conditionals_.at(f);
  std::vector<int> labels(n_);
  for (int u = 0; u < n_; ++u) {
    double t = rng.uniform();
    double acc = 0.0;
    int pick = -1;
    for (int j = 0; j < k_; ++j) {
      if (C(u, j) == 0.0) continue;
      pick = j;
      acc += C(u, j);
      if (t < acc) break;
    }
    labels[u] = pick;
  }
  return labels;
}

std::vector<int> RoundingDistribution::sample(Rng& rng) const {
  double t = rng.uniform() * total_weight();
  int f = 0;
  double acc = weights_[0];
  while (f + 1 < support_size() && t >= acc) acc += weights_[++f];
  return sample_given(f, rng);
}

double RoundingDistribution::conditional_expectation(int f, const Eigen::MatrixXd& L) const {
  const Mat& C = conditionals_.at(f);
  Vec p(n_ * k_);
  for (int u = 0; u < n_; ++u)
    for (int j = 0; j < k_; ++j) p(column_index(n_, u, j)) = C(u, j);
  double e = p.dot(L * p);
  // Same-vertex pairs: E[x_u(i) x_u(j)] = [i == j] p_u(i) instead of p_u(i) p_u(j).
  for (int u = 0; u < n_; ++u)
    for (int i = 0; i < k_; ++i) {
      const int a = column_index(n_, u, i);
      e += L(a, a) * p(a);
      for (int j = 0; j < k_; ++j) {
        const int b = column_index(n_, u, j);
        e -= L(a, b) * p(a) * p(b);
      }
    }
  return e;
}

double RoundingDistribution::expectation(const Eigen::MatrixXd& L) const {
  double e = 0.0;
  for (int f = 0; f < support_size(); ++f) e += weights_[f] * conditional_expectation(f, L);
  return e / total_weight();
}

int RoundingDistribution::best_labeling(const Eigen::MatrixXd& L, bool maximize) const {
  int best = 0;
  double bv = conditional_expectation(0, L);
  for (int f = 1; f < support_size(); ++f) {
    double v = conditional_expectation(f, L);
    if (maximize ? v > bv + 1e-12 : v < bv - 1e-12) {
      bv = v;
      best = f;
    }
  }
  return best;
}

std::vector<int> sample_labeling(const RoundingDistribution& dist, std::uint64_t seed) {
  Rng rng(seed);
  return dist.sample(rng);
}

Eigen::VectorXd labeling_indicator(const std::vector<int>& labels, int k) {
  const int n = static_cast<int>(labels.size());
  Vec x = Vec::Zero(n * k);
  for (int u = 0; u < n; ++u) x(column_index(n, u, labels[u])) = 1.0;
  return x;
}

}  // namespace lhr

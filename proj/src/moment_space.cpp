#include "lhr/moment_space.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <sstream>

namespace lhr {

namespace {

using Code = unsigned __int128;

Code nibble_mask(std::uint32_t mask) {
  Code m = 0;
  for (std::uint32_t rest = mask; rest; rest &= rest - 1) {
    int u = std::countr_zero(rest);
    m |= Code{0xF} << (4 * u);
  }
  return m;
}

long long binomial(int n, int r) {
  if (r < 0 || r > n) return 0;
  long long b = 1;
  for (int i = 1; i <= r; ++i) b = b * (n - r + i) / i;
  return b;
}

/// Inclusion-exclusion expansion of a labeling into labelings that avoid the last label.
std::vector<std::pair<Assignment, double>> expand_last_label(const Assignment& a, int k) {
  std::uint32_t last_mask = 0;
  for (std::uint32_t rest = a.mask; rest; rest &= rest - 1) {
    int u = std::countr_zero(rest);
    if (label_of(a, u) == k - 1) last_mask |= 1u << u;
  }
  Assignment base{a.mask & ~last_mask, a.code & ~nibble_mask(last_mask)};
  std::vector<std::pair<Assignment, double>> out;
  // Iterate subsets B of last_mask.
  for (std::uint32_t B = last_mask;; B = (B - 1) & last_mask) {
    double sign = (std::popcount(B) % 2) ? -1.0 : 1.0;
    for (const Assignment& j : all_labelings(B, k - 1)) {
      out.push_back({Assignment{base.mask | j.mask, base.code | j.code}, sign});
    }
    if (B == 0) break;
  }
  return out;
}

}  // namespace

int assignment_size(const Assignment& a) { return std::popcount(a.mask); }

std::vector<int> assignment_vertices(const Assignment& a) {
  std::vector<int> v;
  for (std::uint32_t rest = a.mask; rest; rest &= rest - 1) v.push_back(std::countr_zero(rest));
  return v;
}

int label_of(const Assignment& a, int u) {
  if (!((a.mask >> u) & 1u)) return -1;
  return static_cast<int>((a.code >> (4 * u)) & 0xF);
}

Assignment make_assignment(const std::vector<int>& vertices, const std::vector<int>& labels) {
  if (vertices.size() != labels.size()) throw std::invalid_argument("make_assignment: size mismatch");
  Assignment a;
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    int u = vertices[i], l = labels[i];
    if (u < 0 || u >= kMaxMomentVertices) throw std::out_of_range("vertex id beyond moment-index limit");
    if (l < 0 || l >= kMaxLabels) throw std::out_of_range("label beyond moment-index limit");
    if ((a.mask >> u) & 1u) throw std::invalid_argument("make_assignment: repeated vertex");
    a.mask |= 1u << u;
    a.code |= Code(static_cast<unsigned>(l)) << (4 * u);
  }
  return a;
}

Assignment single(int u, int label) { return make_assignment({u}, {label}); }

Assignment with_label(const Assignment& a, int u, int label) {
  Assignment b = without(a, u);
  b.mask |= 1u << u;
  b.code |= Code(static_cast<unsigned>(label)) << (4 * u);
  return b;
}

Assignment without(const Assignment& a, int u) {
  Assignment b = a;
  b.mask &= ~(1u << u);
  b.code &= ~(Code{0xF} << (4 * u));
  return b;
}

std::optional<Assignment> combine(const Assignment& a, const Assignment& b) {
  Code shared = nibble_mask(a.mask & b.mask);
  if (((a.code ^ b.code) & shared) != 0) return std::nullopt;
  return Assignment{a.mask | b.mask, a.code | b.code};
}

std::string assignment_key(const Assignment& a) {
  std::string s = "S=";
  std::string f = ";f=";
  bool first = true;
  for (int u : assignment_vertices(a)) {
    if (!first) {
      s += ',';
      f += ',';
    }
    first = false;
    s += std::to_string(u);
    f += std::to_string(label_of(a, u));
  }
  return s + f;
}

Assignment parse_assignment_key(const std::string& key) {
  auto semi = key.find(";f=");
  if (key.rfind("S=", 0) != 0 || semi == std::string::npos) {
    throw std::invalid_argument("malformed assignment key '" + key + "'");
  }
  auto split = [](const std::string& s) {
    std::vector<int> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      if (!tok.empty()) out.push_back(std::stoi(tok));
    }
    return out;
  };
  return make_assignment(split(key.substr(2, semi - 2)), split(key.substr(semi + 3)));
}

std::vector<Assignment> all_labelings(std::uint32_t mask, int k) {
  std::vector<int> verts;
  for (std::uint32_t rest = mask; rest; rest &= rest - 1) verts.push_back(std::countr_zero(rest));
  std::vector<Assignment> out;
  if (k <= 0) {
    if (verts.empty()) out.push_back({});
    return out;
  }
  std::vector<int> digits(verts.size(), 0);
  while (true) {
    out.push_back(make_assignment(verts, digits));
    std::size_t i = 0;
    while (i < digits.size() && ++digits[i] == k) digits[i++] = 0;
    if (i == digits.size()) break;
  }
  return out;
}

std::vector<std::uint32_t> subsets_up_to(int n, int max_size) {
  std::vector<std::uint32_t> out;
  for (int s = 0; s <= std::min(n, max_size); ++s) {
    // Lexicographic combinations of size s.
    std::vector<int> c(s);
    for (int i = 0; i < s; ++i) c[i] = i;
    while (true) {
      std::uint32_t m = 0;
      for (int x : c) m |= 1u << x;
      out.push_back(m);
      int i = s - 1;
      while (i >= 0 && c[i] == n - s + i) --i;
      if (i < 0) break;
      ++c[i];
      for (int j = i + 1; j < s; ++j) c[j] = c[j - 1] + 1;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

AffineExpr AffineExpr::constant_of(double c) {
  AffineExpr e;
  e.constant = c;
  return e;
}

AffineExpr AffineExpr::variable(int index, double coef) {
  AffineExpr e;
  if (coef != 0.0) e.terms.push_back({index, coef});
  return e;
}

AffineExpr& AffineExpr::add(const AffineExpr& o, double scale) {
  constant += scale * o.constant;
  std::vector<std::pair<int, double>> merged;
  merged.reserve(terms.size() + o.terms.size());
  std::size_t i = 0, j = 0;
  while (i < terms.size() || j < o.terms.size()) {
    if (j == o.terms.size() || (i < terms.size() && terms[i].first < o.terms[j].first)) {
      merged.push_back(terms[i++]);
    } else if (i == terms.size() || o.terms[j].first < terms[i].first) {
      merged.push_back({o.terms[j].first, scale * o.terms[j].second});
      ++j;
    } else {
      double c = terms[i].second + scale * o.terms[j].second;
      if (std::abs(c) > 1e-14) merged.push_back({terms[i].first, c});
      ++i;
      ++j;
    }
  }
  terms.swap(merged);
  return *this;
}

bool AffineExpr::is_constant(double tol) const {
  for (const auto& t : terms)
    if (std::abs(t.second) > tol) return false;
  return true;
}

double AffineExpr::evaluate(const std::vector<double>& values) const {
  double s = constant;
  for (const auto& [v, c] : terms) s += c * values[v];
  return s;
}

Eliminator::Eliminator(int num_vars) : subst_(num_vars), users_(num_vars) {}

AffineExpr Eliminator::resolve(const AffineExpr& expr) const {
  AffineExpr out = AffineExpr::constant_of(expr.constant);
  AffineExpr kept;
  for (const auto& [v, c] : expr.terms) {
    if (subst_[v]) {
      out.add(*subst_[v], c);
    } else {
      kept.terms.push_back({v, c});
    }
  }
  out.add(kept);
  return out;
}

bool Eliminator::add_equation(const AffineExpr& expr, double tol) {
  AffineExpr r = resolve(expr);
  double scale = 0.0;
  for (const auto& t : r.terms) scale = std::max(scale, std::abs(t.second));
  if (scale <= tol) {
    double cscale = 1.0;
    for (const auto& t : expr.terms) cscale = std::max(cscale, std::abs(t.second));
    return std::abs(r.constant) <= 1e-9 * cscale;
  }
  int pivot = -1;
  double best = 0.0;
  for (const auto& [v, c] : r.terms) {
    if (std::abs(c) >= best * (1.0 + 1e-12)) {
      best = std::abs(c);
      pivot = v;
    }
  }
  double pc = 0.0;
  AffineExpr sub = AffineExpr::constant_of(-r.constant);
  for (const auto& [v, c] : r.terms) {
    if (v == pivot) {
      pc = c;
    } else if (std::abs(c) > tol * 1e-3) {
      sub.terms.push_back({v, -c});
    }
  }
  for (auto& t : sub.terms) t.second /= pc;
  sub.constant /= pc;

  std::vector<int> users = std::move(users_[pivot]);
  users_[pivot].clear();
  for (int q : users) {
    if (!subst_[q]) continue;
    auto& terms = subst_[q]->terms;
    auto it = std::lower_bound(terms.begin(), terms.end(), pivot,
                               [](const std::pair<int, double>& t, int v) { return t.first < v; });
    if (it == terms.end() || it->first != pivot) continue;
    double c = it->second;
    terms.erase(it);
    subst_[q]->add(sub, c);
    for (const auto& t : sub.terms) users_[t.first].push_back(q);
  }
  for (const auto& t : sub.terms) users_[t.first].push_back(pivot);
  subst_[pivot] = std::move(sub);
  return true;
}

std::vector<int> Eliminator::free_variables() const {
  std::vector<int> out;
  for (int v = 0; v < num_vars(); ++v)
    if (!subst_[v]) out.push_back(v);
  return out;
}

// ---------------------------------------------------------------------------

BudgetExceeded::BudgetExceeded(long long r, long long c, long long b)
    : std::runtime_error("moment matrix too large: " + std::to_string(r) + " rows, " + std::to_string(c) +
                         " basis coordinates, budget " + std::to_string(b) + " rows"),
      rows(r),
      coordinates(c),
      budget(b) {}

long long moment_matrix_side(int n, int k, int r_prime) {
  long long side = 0;
  long long kp = 1;
  for (int j = 0; j <= std::min(n, r_prime); ++j) {
    side += binomial(n, j) * kp;
    kp *= k;
  }
  return side;
}

long long solver_side(int n, int k, int r_prime) {
  if (r_prime < n) return moment_matrix_side(n, k, r_prime);
  long long s = 1;
  for (int i = 0; i < n; ++i) {
    if (s > std::numeric_limits<long long>::max() / k) return std::numeric_limits<long long>::max();
    s *= k;
  }
  return s;
}

MomentIndex::MomentIndex(int n, int k, int r_prime, std::vector<MonomialConstraint> monomials, long long budget)
    : n_(n), k_(k), r_prime_(r_prime), monomials_(std::move(monomials)), elim_(0) {
  if (n < 1 || n > kMaxMomentVertices) throw std::invalid_argument("moment index: n out of range");
  if (k < 1 || k > kMaxLabels) throw std::invalid_argument("moment index: k out of range");
  if (r_prime < 1) throw std::invalid_argument("moment index: r' must be >= 1");
  long long rows = moment_matrix_side(n, k, r_prime);
  long long coords = 0;
  {
    long long kp = 1;
    for (int j = 0; j <= std::min(n, 2 * r_prime); ++j, kp *= (k - 1)) coords += binomial(n, j) * kp;
  }
  const long long solved = solver_side(n, k, r_prime);
  if (solved > budget || rows / kStoredRowFactor > budget) throw BudgetExceeded(solved, coords, budget);

  for (std::uint32_t S : subsets_up_to(n, r_prime)) {
    for (const Assignment& a : all_labelings(S, k)) {
      lookup_[a] = static_cast<int>(entries_.size());
      entries_.push_back(a);
    }
    for (const Assignment& a : all_labelings(S, k - 1)) {
      basis_row_lookup_[a] = static_cast<int>(basis_rows_.size());
      basis_rows_.push_back(a);
    }
  }
  for (std::uint32_t A : subsets_up_to(n, 2 * r_prime)) {
    if (A == 0) continue;
    for (const Assignment& a : all_labelings(A, k - 1)) {
      basis_lookup_[a] = static_cast<int>(basis_.size());
      basis_.push_back(a);
    }
  }
  elim_ = Eliminator(static_cast<int>(basis_.size()));

  // Each monomial T, g, value h gives z(S u T, f o g) = h * z(S, f) for every S disjoint from T with
  // |S u T| <= 2r'. Basis labelings of S suffice: the others are linear combinations of those.
  for (const MonomialConstraint& mc : monomials_) {
    const Assignment& T = mc.monomial;
    if (assignment_size(T) > 2 * r_prime) continue;
    for (int u : assignment_vertices(T)) {
      if (u >= n || label_of(T, u) >= k) throw std::invalid_argument("monomial outside vertex/label range");
    }
    int room = 2 * r_prime - assignment_size(T);
    std::uint32_t others = ((n == 32) ? ~0u : ((1u << n) - 1)) & ~T.mask;
    for (std::uint32_t S : subsets_up_to(n, room)) {
      if (S & ~others) continue;
      for (const Assignment& f : all_labelings(S, k - 1)) {
        AffineExpr e = expression(*combine(f, T));
        e.add(expression(f), -static_cast<double>(mc.value));
        if (!elim_.add_equation(e)) throw Infeasible("monomial constraints are inconsistent");
      }
    }
  }
}

int MomentIndex::lookup(const Assignment& a) const {
  auto it = lookup_.find(a);
  return it == lookup_.end() ? -1 : it->second;
}

int MomentIndex::basis_index(const Assignment& a) const {
  auto it = basis_lookup_.find(a);
  return it == basis_lookup_.end() ? -1 : it->second;
}

std::optional<Assignment> MomentIndex::pair(int row, int col) const {
  return combine(entries_.at(row), entries_.at(col));
}

AffineExpr MomentIndex::expression(const Assignment& a) const {
  if (a.mask == 0) return AffineExpr::constant_of(1.0);
  auto it = expr_cache_.find(a);
  if (it != expr_cache_.end()) return it->second;
  if (assignment_size(a) > 2 * r_prime_) throw std::out_of_range("coordinate beyond 2r' vertices");
  AffineExpr e;
  for (const auto& [b, sign] : expand_last_label(a, k_)) {
    if (b.mask == 0) {
      e.constant += sign;
    } else {
      int idx = basis_index(b);
      if (idx < 0) throw std::logic_error("missing basis coordinate");
      e.add(AffineExpr::variable(idx, sign));
    }
  }
  expr_cache_.emplace(a, e);
  return e;
}

std::vector<std::pair<int, double>> MomentIndex::row_expansion(int row) const {
  std::vector<std::pair<int, double>> out;
  for (const auto& [b, sign] : expand_last_label(entries_.at(row), k_)) {
    out.push_back({basis_row_lookup_.at(b), sign});
  }
  return out;
}

}  // namespace lhr

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace lhr {

inline constexpr int kMaxMomentVertices = 32;
inline constexpr int kMaxLabels = 16;

/// A partial labeling (S, f): S as a bitmask, f packed as one 4-bit label per vertex slot.
struct Assignment {
  std::uint32_t mask = 0;
  unsigned __int128 code = 0;

  bool operator==(const Assignment& o) const { return mask == o.mask && code == o.code; }
  bool operator!=(const Assignment& o) const { return !(*this == o); }
  bool operator<(const Assignment& o) const { return mask != o.mask ? mask < o.mask : code < o.code; }
};

struct AssignmentHash {
  std::size_t operator()(const Assignment& a) const noexcept {
    auto lo = static_cast<std::uint64_t>(a.code);
    auto hi = static_cast<std::uint64_t>(a.code >> 64);
    std::uint64_t h = a.mask * 0x9E3779B97F4A7C15ULL;
    h ^= lo + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2);
    h ^= hi + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2);
    return static_cast<std::size_t>(h);
  }
};

int assignment_size(const Assignment& a);
std::vector<int> assignment_vertices(const Assignment& a);
/// Label of u in a, or -1 when u is not in the set.
int label_of(const Assignment& a, int u);
Assignment make_assignment(const std::vector<int>& vertices, const std::vector<int>& labels);
Assignment single(int u, int label);
Assignment with_label(const Assignment& a, int u, int label);
Assignment without(const Assignment& a, int u);
/// Union of two labelings, or nullopt when they disagree on a shared vertex.
std::optional<Assignment> combine(const Assignment& a, const Assignment& b);
/// Canonical text form "S=0,2;f=1,0" (vertices ascending).
std::string assignment_key(const Assignment& a);
Assignment parse_assignment_key(const std::string& key);

/// All labelings of the vertex set `mask` with labels in [0, k).
std::vector<Assignment> all_labelings(std::uint32_t mask, int k);
/// All vertex subsets of {0..n-1} with at most `max_size` elements, ordered by size then lexicographically.
std::vector<std::uint32_t> subsets_up_to(int n, int max_size);

/// c0 + sum_i coef_i * var_i, terms sorted by variable index with no zero coefficients.
struct AffineExpr {
  double constant = 0.0;
  std::vector<std::pair<int, double>> terms;

  static AffineExpr constant_of(double c);
  static AffineExpr variable(int index, double coef = 1.0);
  AffineExpr& add(const AffineExpr& o, double scale = 1.0);
  bool is_constant(double tol = 0.0) const;
  double evaluate(const std::vector<double>& values) const;
};

/// Incremental elimination of linear equalities over variables 0..p-1.
class Eliminator {
 public:
  explicit Eliminator(int num_vars);

  /// Adds expr == 0. Returns false when the system becomes inconsistent.
  bool add_equation(const AffineExpr& expr, double tol = 1e-11);
  AffineExpr resolve(const AffineExpr& expr) const;
  bool eliminated(int var) const { return subst_[var].has_value(); }
  std::vector<int> free_variables() const;
  int num_vars() const { return static_cast<int>(subst_.size()); }

 private:
  std::vector<std::optional<AffineExpr>> subst_;
  std::vector<std::vector<int>> users_;  // users_[v]: eliminated vars whose substitution mentions v
};

/// A monomial equality prod_{u in T} x_u(g(u)) = value, value in {0, 1}.
struct MonomialConstraint {
  Assignment monomial;
  int value = 0;
};

class BudgetExceeded : public std::runtime_error {
 public:
  BudgetExceeded(long long rows, long long coordinates, long long budget);
  long long rows;
  long long coordinates;
  long long budget;
};

class Infeasible : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr long long kDefaultMatrixBudget = 10000;

/// Number of (S, f) with |S| <= r_prime, f in [k]^S.
long long moment_matrix_side(int n, int k, int r_prime);

/// Size the solver works with: k^n labelings at r' = n (the relaxation becomes a linear program over
/// full labelings), the moment matrix side otherwise. This is what the budget caps.
long long solver_side(int n, int k, int r_prime);

/// Rows kept in memory may exceed the budget by at most this factor.
inline constexpr long long kStoredRowFactor = 100;

/// Rows (S, f) with |S| <= r' of the moment matrix, together with the coordinate space z(A, h), |A| <= 2r'.
///
/// Coordinates whose labels all lie in [0, k-1) form the basis; a labeling that uses the last label is
/// expressed through the basis by eliminating z(A, h) = z(A \ u, h) - sum_{j<k-1} z(A, h[u -> j]),
/// so the marginalization identities hold exactly. Monomial constraints are applied as substitutions.
class MomentIndex {
 public:
  MomentIndex(int n, int k, int r_prime, std::vector<MonomialConstraint> monomials = {},
              long long budget = kDefaultMatrixBudget);

  int n() const { return n_; }
  int k() const { return k_; }
  int r_prime() const { return r_prime_; }

  const std::vector<Assignment>& entries() const { return entries_; }
  int side() const { return static_cast<int>(entries_.size()); }
  /// Row of (S, f), or -1.
  int lookup(const Assignment& a) const;
  /// Coordinate (S u T, f o g) addressed by a Gram entry, or nullopt for conflicting labelings.
  std::optional<Assignment> pair(int row, int col) const;

  /// Basis coordinates: nonempty A with |A| <= 2r' and all labels < k-1.
  const std::vector<Assignment>& basis() const { return basis_; }
  int basis_index(const Assignment& a) const;
  /// Rows of the reduced moment matrix: (T, g) with |T| <= r' and labels < k-1; entry 0 is the empty set.
  const std::vector<Assignment>& basis_rows() const { return basis_rows_; }

  /// z(A, h) as an affine expression over basis coordinates (before monomial substitution). |A| <= 2r'.
  AffineExpr expression(const Assignment& a) const;
  /// Same as expression() but with monomial substitutions applied.
  AffineExpr reduced_expression(const Assignment& a) const { return elim_.resolve(expression(a)); }

  const std::vector<MonomialConstraint>& monomials() const { return monomials_; }
  const Eliminator& eliminator() const { return elim_; }
  /// Basis coordinates left free after the monomial substitutions.
  int free_count() const { return static_cast<int>(elim_.free_variables().size()); }

  /// Coefficients expressing the full row x_S(f) through basis rows: list of (basis row, coefficient).
  std::vector<std::pair<int, double>> row_expansion(int row) const;

 private:
  int n_, k_, r_prime_;
  std::vector<Assignment> entries_;
  std::unordered_map<Assignment, int, AssignmentHash> lookup_;
  std::vector<Assignment> basis_;
  std::unordered_map<Assignment, int, AssignmentHash> basis_lookup_;
  std::vector<Assignment> basis_rows_;
  std::unordered_map<Assignment, int, AssignmentHash> basis_row_lookup_;
  std::vector<MonomialConstraint> monomials_;
  Eliminator elim_;
  mutable std::unordered_map<Assignment, AffineExpr, AssignmentHash> expr_cache_;
};

}  // namespace lhr

#include "lhr/corpus.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <stdexcept>

namespace lhr {

namespace {

int pair_index(int n, int i, int j) {
  // Pairs (0,1), (0,2), ..., (0,n-1), (1,2), ...
  return i * n - i * (i + 1) / 2 + (j - i - 1);
}

WeightedGraph from_code(int n, std::uint64_t code) {
  WeightedGraph g(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if ((code >> pair_index(n, i, j)) & 1u) g.add_edge(i, j);
  return g;
}

bool connected_code(int n, std::uint64_t code) {
  std::vector<int> stack{0};
  std::vector<char> seen(n, 0);
  seen[0] = 1;
  int count = 1;
  while (!stack.empty()) {
    int u = stack.back();
    stack.pop_back();
    for (int v = 0; v < n; ++v) {
      if (v == u || seen[v]) continue;
      int a = std::min(u, v), b = std::max(u, v);
      if ((code >> pair_index(n, a, b)) & 1u) {
        seen[v] = 1;
        ++count;
        stack.push_back(v);
      }
    }
  }
  return count == n;
}

std::uint64_t canonical_code(int n, std::uint64_t code) {
  std::vector<std::vector<char>> adj(n, std::vector<char>(n, 0));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if ((code >> pair_index(n, i, j)) & 1u) adj[i][j] = adj[j][i] = 1;
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::uint64_t best = ~0ULL;
  do {
    std::uint64_t c = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (adj[perm[i]][perm[j]]) c |= 1ULL << pair_index(n, i, j);
    best = std::min(best, c);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

WeightedGraph dumbbell(int clique) {
  WeightedGraph g = disjoint_union(complete_graph(clique), complete_graph(clique));
  g.add_edge(0, clique);
  return g;
}

WeightedGraph wheel(int rim) {
  WeightedGraph g(rim + 1);
  for (int i = 0; i < rim; ++i) {
    g.add_edge(0, i + 1);
    g.add_edge(i + 1, (i + 1) % rim + 1);
  }
  return g;
}

WeightedGraph complete_bipartite(int a, int b) {
  WeightedGraph g(a + b);
  for (int i = 0; i < a; ++i)
    for (int j = 0; j < b; ++j) g.add_edge(i, a + j);
  return g;
}

}  // namespace

std::uint64_t canonical_form(const WeightedGraph& g) {
  const int n = g.n();
  if (n > 8) throw std::invalid_argument("canonical_form: at most 8 vertices");
  std::uint64_t code = 0;
  for (const Edge& e : g.edges()) code |= 1ULL << pair_index(n, e.u, e.v);
  return canonical_code(n, code);
}

std::vector<NamedGraph> connected_graphs(int max_n) {
  if (max_n > 6) throw std::invalid_argument("connected_graphs: at most 6 vertices");
  std::vector<NamedGraph> out;
  for (int n = 2; n <= max_n; ++n) {
    const int pairs = n * (n - 1) / 2;
    std::set<std::uint64_t> forms;
    for (std::uint64_t code = 0; code < (1ULL << pairs); ++code) {
      if (!connected_code(n, code)) continue;
      forms.insert(canonical_code(n, code));
    }
    int i = 0;
    for (std::uint64_t c : forms) out.push_back({"conn" + std::to_string(n) + "-" + std::to_string(i++), from_code(n, c)});
  }
  return out;
}

std::vector<NamedGraph> named_graphs() {
  std::vector<NamedGraph> out;
  for (int n = 2; n <= 5; ++n) out.push_back({"k" + std::to_string(n), complete_graph(n)});
  for (int n = 3; n <= 6; ++n) out.push_back({"p" + std::to_string(n), path_graph(n)});
  for (int n : {4, 5, 6, 8, 10}) out.push_back({"c" + std::to_string(n), cycle_graph(n)});
  for (int l = 3; l <= 5; ++l) out.push_back({"star" + std::to_string(l), star_graph(l)});
  out.push_back({"two-k2", disjoint_union(complete_graph(2), complete_graph(2))});
  out.push_back({"two-k3", disjoint_union(complete_graph(3), complete_graph(3))});
  out.push_back({"dumbbell3", dumbbell(3)});
  out.push_back({"dumbbell4", dumbbell(4)});
  out.push_back({"wheel5", wheel(5)});
  out.push_back({"k33", complete_bipartite(3, 3)});
  out.push_back({"cube3", hypercube_graph(3)});
  out.push_back({"petersen", petersen_graph()});
  out.push_back({"petersen-8", induced_subgraph(petersen_graph(), {0, 1, 2, 3, 4, 5, 6, 7})});
  out.push_back({"petersen-7", induced_subgraph(petersen_graph(), {0, 1, 2, 3, 5, 6, 7})});
  return out;
}

WeightedGraph named_graph(const std::string& id) {
  for (auto& ng : named_graphs())
    if (ng.id == id) return ng.graph;
  throw std::invalid_argument("unknown named graph '" + id + "'");
}

}  // namespace lhr

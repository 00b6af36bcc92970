#pragma once

#include "lhr/graph.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace lhr {

struct NamedGraph {
  std::string id;
  WeightedGraph graph;
};

/// Smallest adjacency bit string over all vertex orders (n <= 8).
std::uint64_t canonical_form(const WeightedGraph& g);

/// All connected unweighted graphs on 2..max_n vertices up to isomorphism (max_n <= 6).
/// Ids are "conn<n>-<i>", in order of increasing canonical form.
std::vector<NamedGraph> connected_graphs(int max_n);

/// Hand-picked graphs up to 10 vertices (paths, cycles, cliques, stars, Petersen, dumbbells, ...).
std::vector<NamedGraph> named_graphs();

/// Looks up a named graph by id. Throws std::invalid_argument.
WeightedGraph named_graph(const std::string& id);

}  // namespace lhr

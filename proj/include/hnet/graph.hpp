// SPDX-License-Identifier: Apache-2.0
//
// Undirected simple graphs with optional positive edge weights.
#pragma once

#include <string>
#include <vector>

#include "hnet/hypernetwork.hpp"

namespace hnet {

struct GraphEdge {
  std::size_t a = 0;
  std::size_t b = 0;
  double weight = 1.0;
};

class SimpleGraph {
 public:
  SimpleGraph() = default;
  // Rejects self-loops, repeated edges, unknown endpoints and nonpositive weights.
  SimpleGraph(Labels nodes, std::vector<GraphEdge> edges);
  // Convenience: edges by label, unit weights.
  SimpleGraph(Labels nodes, const std::vector<std::pair<std::string, std::string>>& edges);

  std::size_t num_nodes() const noexcept { return nodes_.size(); }
  std::size_t num_edges() const noexcept { return edges_.size(); }
  const Labels& nodes() const noexcept { return nodes_; }
  const std::vector<GraphEdge>& edges() const noexcept { return edges_; }
  // Neighbor indices of node i, ascending.
  const std::vector<std::size_t>& neighbors(std::size_t i) const { return adjacency_.at(i); }
  std::size_t index_of(const std::string& label) const;

  // Connected components as ascending index lists, ordered by smallest member.
  std::vector<std::vector<std::size_t>> components() const;
  bool connected() const { return components().size() <= 1; }

  // Same graph with node i moved to position order[i].
  SimpleGraph permuted(const std::vector<std::size_t>& order) const;

  bool operator==(const SimpleGraph& other) const;

 private:
  Labels nodes_;
  std::vector<GraphEdge> edges_;
  std::vector<std::vector<std::size_t>> adjacency_;
};

// Whitespace edge list: "u v [w]" per line, a lone "u" declares an isolated
// node, '#' starts a comment. Nodes are numbered by first appearance.
SimpleGraph parse_edge_list(const std::string& text);
// {"nodes": [...], "edges": [[u, v], [u, v, w], ...]}; "nodes" optional.
SimpleGraph parse_graph_json(const std::string& text);
// JSON when the first non-space character is '{', else an edge list.
SimpleGraph parse_graph(const std::string& text);
std::string graph_to_json(const SimpleGraph& g);

// Unweighted hop counts from `source`; -1 where unreachable.
std::vector<int> bfs_distances(const SimpleGraph& g, std::size_t source);

// Throws `disconnected` naming the components when g is not connected.
void require_connected(const SimpleGraph& g, const std::string& what);

// Orders labels so that integer labels compare numerically and sort before
// other labels; everything else compares as strings.
bool label_less(const std::string& a, const std::string& b);

}  // namespace hnet

// SPDX-License-Identifier: Apache-2.0
//
// Combinatorial hypergraphs and the ways of turning them into measure
// hypernetworks.
#pragma once

#include <string>
#include <utility>
#include <vector>

#include "hnet/hypernetwork.hpp"

namespace hnet {

// Nodes and hyperedges (nonempty node sets) in declaration order. Each node
// and hyperedge carries a positive multiplicity, 1 unless the hypergraph came
// out of a merge; multiplicities count how many original items an entry stands
// for and scale the measures below.
class CombinatorialHypergraph {
 public:
  using Members = std::vector<std::size_t>;

  // `hyperedges` pairs a label with member node labels; repeated members are
  // ignored. Empty weight vectors mean all ones.
  CombinatorialHypergraph(Labels nodes, const std::vector<std::pair<std::string, Labels>>& hyperedges,
                          std::vector<double> node_weights = {},
                          std::vector<double> hyperedge_weights = {});

  std::size_t num_nodes() const noexcept { return nodes_.size(); }
  std::size_t num_hyperedges() const noexcept { return edge_ids_.size(); }
  const Labels& nodes() const noexcept { return nodes_; }
  const Labels& hyperedge_ids() const noexcept { return edge_ids_; }
  // Sorted node indices of hyperedge e.
  const Members& members(std::size_t e) const { return members_[e]; }
  const std::vector<double>& node_weights() const noexcept { return node_weights_; }
  const std::vector<double>& hyperedge_weights() const noexcept { return edge_weights_; }

  // Hyperedges containing node x, in index order.
  std::vector<std::size_t> incident(std::size_t x) const;
  // Sum of the multiplicities of the hyperedges containing x.
  double degree(std::size_t x) const;
  // Nodes and hyperedges swapped; multiplicities travel along.
  CombinatorialHypergraph dual() const;

  std::vector<std::pair<std::string, Labels>> hyperedge_list() const;

  friend bool operator==(const CombinatorialHypergraph& a, const CombinatorialHypergraph& b);

 private:
  Labels nodes_;
  Labels edge_ids_;
  std::vector<Members> members_;
  std::vector<double> node_weights_;
  std::vector<double> edge_weights_;
};

// JSON: {"nodes": [...] (optional), "hyperedges": {"a": ["1", "2"], ...}}.
// Without "nodes" the node order is the order of first appearance.
CombinatorialHypergraph parse_hypergraph_json(const std::string& text);

// One hyperedge per line, "label: member member ...". Blank lines and text
// after '#' are ignored. An optional "@nodes n1 n2 ..." line fixes the node
// order and may declare nodes outside every hyperedge.
CombinatorialHypergraph parse_hypergraph_text(const std::string& text);

// Picks the format from the first non-blank character ('{' means JSON).
CombinatorialHypergraph parse_hypergraph(const std::string& text);

// Writers for the two formats. Parsing the output gives back an equal
// hypergraph (multiplicities are not serialized).
std::string hypergraph_to_json(const CombinatorialHypergraph& g);
std::string hypergraph_to_text(const CombinatorialHypergraph& g);

enum class MuScheme { uniform, degree };
enum class NuScheme { uniform, degree_sum };
enum class OmegaScheme { incidence, jaccard_sp, intersection_sp, overlap_sp };
// Edge lengths of the line graph between overlapping hyperedges y, y':
// 1/|y n y'|, |y u y'|/|y n y'|, or |y n y'|.
enum class LineWeight { intersection, jaccard, overlap };

struct ModelParams {
  MuScheme mu = MuScheme::degree;
  NuScheme nu = NuScheme::degree_sum;
  OmegaScheme omega = OmegaScheme::jaccard_sp;
  // Replace unreachable shortest-path entries by (largest finite entry + 1)
  // instead of failing.
  bool fill_disconnected = false;
};

MuScheme parse_mu_scheme(const std::string& s);
NuScheme parse_nu_scheme(const std::string& s);
OmegaScheme parse_omega_scheme(const std::string& s);
LineWeight parse_line_weight(const std::string& s);
std::string to_string(MuScheme s);
std::string to_string(NuScheme s);
std::string to_string(OmegaScheme s);
std::string to_string(LineWeight s);

// Node measure: multiplicity (uniform) or multiplicity * degree (degree).
Vector node_measure(const CombinatorialHypergraph& g, MuScheme scheme);
// Hyperedge measure: multiplicity (uniform) or multiplicity * sum over members
// of multiplicity * degree (degree_sum).
Vector hyperedge_measure(const CombinatorialHypergraph& g, NuScheme scheme);

// Line graph as a dense network on the hyperedges: uniform measure, the chosen
// weight between overlapping hyperedges and 0 elsewhere (0 means no edge).
MeasureNetwork weighted_line_graph(const CombinatorialHypergraph& g, LineWeight weight);

// Connected components of the line graph, as lists of hyperedge indices
// ordered by their smallest member.
std::vector<std::vector<std::size_t>> line_graph_components(const CombinatorialHypergraph& g);

// All-pairs shortest path lengths on the weighted line graph (Dijkstra from
// each hyperedge). Unreachable pairs are +inf.
Matrix line_graph_distances(const CombinatorialHypergraph& g, LineWeight weight);

// w(x, y) = min over hyperedges y' containing x of the line-graph distance
// from y' to y; 0 when x is in y. Throws `disconnected`, naming the
// components, unless `fill_disconnected`.
Matrix shortest_path_relation(const CombinatorialHypergraph& g, LineWeight weight,
                              bool fill_disconnected = false);

// shortest_path_relation with overlap lengths.
Matrix hyperedge_overlap_sp(const CombinatorialHypergraph& g, bool fill_disconnected = false);

Matrix incidence_relation(const CombinatorialHypergraph& g);

MeasureHypernetwork build_hypernetwork(const CombinatorialHypergraph& g,
                                       const ModelParams& params = {});

}  // namespace hnet

// SPDX-License-Identifier: Apache-2.0
//
// Multiscale graph matching: heat-kernel covers and iterated nerve graphs,
// then cyclic block descent over all levels with shared interface couplings.
#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "hnet/coot.hpp"
#include "hnet/graph.hpp"
#include "hnet/hypergraph.hpp"

namespace hnet {

// Symmetric normalized Laplacian I - D^{-1/2} W D^{-1/2}.
Matrix normalized_laplacian(const SimpleGraph& g);

// exp(-t L) applied to unit vectors, from a full eigendecomposition when the
// graph has at most `full_limit` nodes and otherwise from the `budget`
// eigenpairs with the largest kernel eigenvalues (smallest Laplacian ones).
class HeatKernel {
 public:
  explicit HeatKernel(const SimpleGraph& g, std::size_t budget = 300, std::size_t full_limit = 2000);

  Vector diffuse(std::size_t source, double t) const;
  bool truncated() const noexcept { return truncated_; }
  const Vector& eigenvalues() const noexcept { return lambda_; }

 private:
  Matrix phi_;
  Vector lambda_;
  bool truncated_ = false;
};

struct CoverOptions {
  std::size_t eig_budget = 300;
  std::size_t full_limit = 2000;
  // Seed nodes are the lowest unvisited label unless a seed is given, in
  // which case they are drawn uniformly from the unvisited nodes.
  std::optional<std::uint64_t> random_seed;
  // Cover element k is labeled prefix + k.
  std::string label_prefix = "c";
};

struct HeatCover {
  // Node indices of each element, ascending.
  std::vector<std::vector<std::size_t>> elements;
  std::vector<std::size_t> seeds;
  // Nodes are the cover elements; edges join elements that intersect.
  SimpleGraph nerve;
  // Hypergraph on the graph's nodes with one hyperedge per element.
  CombinatorialHypergraph hypergraph;
};

HeatCover heat_kernel_cover(const SimpleGraph& g, double t, const CoverOptions& options = {});

struct CoverSequence {
  // graphs[0] is the input; graphs[i + 1] is the nerve of covers[i].
  std::vector<SimpleGraph> graphs;
  std::vector<CombinatorialHypergraph> covers;
  std::vector<double> t;
  // Trailing one-element covers appended by pad_sequence.
  std::size_t padded = 0;

  std::size_t depth() const noexcept { return covers.size(); }
};

// Reduces until the node count drops below n_alpha, using t = log10|V| per
// level unless t_override is set. Stops early, discarding that cover, when
// the nerve fails to shrink the graph or is disconnected.
CoverSequence iterated_nerve(const SimpleGraph& g, std::size_t n_alpha,
                             std::optional<double> t_override = std::nullopt,
                             const CoverOptions& options = {});

// Appends one-element covers until the sequence has `depth` covers.
void pad_sequence(CoverSequence& seq, std::size_t depth);

// Per-level hypernetworks of a sequence. Level 0 takes its node measure from
// `model`; level i > 0 reuses the hyperedge measure of level i - 1, which the
// shared interface coupling requires.
std::vector<MeasureHypernetwork> level_hypernetworks(const CoverSequence& seq, const ModelParams& model);

struct MultiscaleOptions {
  // Restart 0 starts from diagonal couplings (equal marginals required).
  bool diagonal_start = false;
};

struct MultiscaleMatch {
  // interfaces[i] is pi_i and interfaces[i + 1] is xi_i: one matrix per
  // interface, so pi_{i+1} == xi_i holds by construction.
  std::vector<Coupling> interfaces;
  std::vector<double> level_costs;
  double total_objective = 0.0;
  // Total objective of the best restart after each full sweep, starting with
  // the initial couplings.
  std::vector<double> objectives;
  std::vector<RestartRecord> per_restart;
  int best_restart = 0;
  std::size_t padded_a = 0;
  std::size_t padded_b = 0;
  DistanceParams params;

  std::size_t depth() const noexcept { return level_costs.size(); }
  const Coupling& pi(std::size_t level) const { return interfaces.at(level); }
  const Coupling& xi(std::size_t level) const { return interfaces.at(level + 1); }
};

// Sum over levels of sum |w_i - w'_i|^p pi_i xi_i.
std::vector<double> multiscale_level_costs(const std::vector<MeasureHypernetwork>& a,
                                           const std::vector<MeasureHypernetwork>& b,
                                           const std::vector<Coupling>& interfaces, Order p);

// Cyclic block descent on chains of hypernetworks where level i's hyperedges
// are level i + 1's nodes. Each interface block is solved exactly against
// the sum of the two level costs it enters, so every sweep is nonincreasing.
MultiscaleMatch multiscale_match_levels(const std::vector<MeasureHypernetwork>& a,
                                        const std::vector<MeasureHypernetwork>& b,
                                        const DistanceParams& params,
                                        const MultiscaleOptions& options = {});

// Pads the shallower sequence (and both to depth >= 1), builds the levels and
// runs multiscale_match_levels.
MultiscaleMatch multiscale_match(const CoverSequence& a, const CoverSequence& b, const ModelParams& model,
                                 const DistanceParams& params, const MultiscaleOptions& options = {});

struct HardMatch {
  std::vector<std::size_t> target;
  std::vector<double> mass;
  // Row maximum attained by more than one column.
  std::vector<bool> ambiguous;
};

// Row-wise argmax, ties to the lowest column.
HardMatch hard_match(const Matrix& pi);
inline HardMatch hard_match(const Coupling& pi) { return hard_match(pi.matrix()); }

struct MatchAccuracy {
  double exact_rate = 0.0;
  double mean_graph_distance = 0.0;
  // Pairs with no path; each counted as the diameter plus one.
  std::size_t unreachable = 0;
};

// Compares match[x] against truth[x], both node indices of g.
MatchAccuracy match_accuracy(const std::vector<std::size_t>& match, const std::vector<std::size_t>& truth,
                             const SimpleGraph& g);

}  // namespace hnet

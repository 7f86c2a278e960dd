// SPDX-License-Identifier: Apache-2.0
//
// Multiscale simplification of a hypergraph by merging along a minimum
// spanning tree of its weighted line graph, the distance curve of the levels
// to the original, and elbow selection on that curve.
#pragma once

#include <string>
#include <vector>

#include "hnet/hypergraph.hpp"
#include "hnet/hypernetwork.hpp"

namespace hnet {

enum class SimplifyMode { hyperedge, node };
SimplifyMode parse_simplify_mode(const std::string& s);
std::string to_string(SimplifyMode m);

struct SimplificationStep {
  // MST weight merged at this step; 0 for step 0 (the input).
  double merge_weight = 0.0;
  // Groups of original labels that became one item at this step.
  std::vector<Labels> merged;
  CombinatorialHypergraph hypergraph;
  // Filled by distance_curve: one distance per restart and their minimum.
  std::vector<double> restart_distances;
  double min_distance = 0.0;
};

struct ElbowCandidate {
  std::size_t step = 0;
  double score = 0.0;
};

struct ElbowResult {
  // At most three steps, best first.
  std::vector<ElbowCandidate> ranked;
  // True when no step has a positive score (e.g. a linear curve).
  bool no_elbow = false;
};

struct SimplificationTrace {
  SimplifyMode mode = SimplifyMode::hyperedge;
  LineWeight weight = LineWeight::jaccard;
  bool multiplicities = true;
  std::vector<SimplificationStep> steps;
  bool has_distances = false;
  ElbowResult elbow;

  std::vector<double> curve() const;
};

// Step 0 is the input. Each later step merges every MST edge of the next
// weight class at once (hyperedge mode merges hyperedges, node mode merges
// nodes through the dual). With `multiplicities` a merged item counts as the
// number of originals it stands for in the measures; without, it counts once.
SimplificationTrace simplification_sequence(const CombinatorialHypergraph& g, SimplifyMode mode,
                                            LineWeight weight, bool multiplicities = true);

// Fills per-step distances d(H_0, H_i) with H_i built from step i under
// `model`. Steps run in parallel; each solve runs its restarts sequentially.
void distance_curve(SimplificationTrace& trace, const ModelParams& model,
                    const DistanceParams& params);

// Scores step i >= 2 by the backward second difference c[i] - 2 c[i-1] + c[i-2]
// and returns the top three, ties to the lower step. Needs at least 3 values.
ElbowResult detect_elbow(const std::vector<double>& curve);

}  // namespace hnet

// SPDX-License-Identifier: Apache-2.0
//
// Gromov-Wasserstein distance between measure networks, its labeled variant on
// bipartite networks, and a vertex-enumeration oracle for small instances.
#pragma once

#include <string>
#include <vector>

#include "hnet/coot.hpp"
#include "hnet/hypernetwork.hpp"

namespace hnet {

// A measure network with a fixed split of its nodes into a left and a right
// block. Each block carries mass 1/2, the relation vanishes inside each block
// and is symmetric across them.
class LabeledBipartiteNetwork {
 public:
  // `left[i]` says whether node i belongs to the left block.
  LabeledBipartiteNetwork(MeasureNetwork network, std::vector<bool> left);

  const MeasureNetwork& network() const noexcept { return network_; }
  const std::vector<bool>& left() const noexcept { return left_; }
  const std::vector<Eigen::Index>& left_indices() const noexcept { return left_idx_; }
  const std::vector<Eigen::Index>& right_indices() const noexcept { return right_idx_; }

 private:
  MeasureNetwork network_;
  std::vector<bool> left_;
  std::vector<Eigen::Index> left_idx_;
  std::vector<Eigen::Index> right_idx_;
};

struct GwResult {
  // p-th root of the best objective (the distortion at `pi`).
  double distance = 0.0;
  Coupling pi;
  std::vector<RestartRecord> per_restart;
  DistanceParams params;
  int best_restart = 0;
  bool certified_local = true;
  // "bcd", "exact" (labeled oracle) or "vertices" (unlabeled oracle).
  std::string method = "bcd";
  // What the value is guaranteed to be, in words.
  std::string certification;
};

// Conditional gradient descent on the quadratic objective: each step solves
// the transport problem on the gradient and moves along the segment to that
// plan by exact line search, so the objective never increases. Records one
// trace entry per step.
struct GwDescent {
  Coupling pi;
  RestartRecord record;
};
GwDescent gw_descend(const MeasureNetwork& n1, const MeasureNetwork& n2, const Coupling& pi0,
                     const DistanceParams& params);

// Best of params.restarts descents (product start, then seeded random starts).
GwResult gw_distance(const MeasureNetwork& n1, const MeasureNetwork& n2,
                     const DistanceParams& params = {});

// Same descent with every plan confined to left-left' and right-right' cells.
GwResult labeled_gw_distance(const LabeledBipartiteNetwork& b1, const LabeledBipartiteNetwork& b2,
                             const DistanceParams& params = {});

// Minimum over all vertices of the coupling polytope of the distortion and of
// a descent started there. Exact over vertices; the global minimum of the
// indefinite quadratic may in principle lie elsewhere, which `certification`
// states. Finite p only.
GwResult gw_distance_bruteforce(const MeasureNetwork& n1, const MeasureNetwork& n2,
                                Order p = Order(2.0));

// Exact labeled distance. The relation vanishes inside blocks, so the
// objective is bilinear in the two block plans: enumerate the vertices of one
// block and solve the other exactly. Finite p only.
GwResult labeled_gw_distance_bruteforce(const LabeledBipartiteNetwork& b1,
                                        const LabeledBipartiteNetwork& b2, Order p = Order(2.0));

}  // namespace hnet

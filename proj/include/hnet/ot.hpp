// SPDX-License-Identifier: Apache-2.0
//
// Discrete optimal transport between two probability vectors.
#pragma once

#include "hnet/hypernetwork.hpp"

namespace hnet {

struct OtProblem {
  Vector a;
  Vector b;
  Matrix cost;

  // Checks shapes, probability vectors (strictly positive, sum 1) and finite cost.
  void validate() const;
};

struct OtSolution {
  Coupling plan;
  double objective = 0.0;
  int iterations = 0;
  // Exact solver only: dual potentials and |primal - dual|.
  Vector u;
  Vector v;
  double duality_gap = 0.0;
  // Entropic solver only: true when the log-domain iteration was used.
  bool log_domain = false;
};

// Transportation simplex. Returns a basic (vertex) optimal plan.
OtSolution solve_exact(const OtProblem& prob);

// Sinkhorn scaling on exp(-cost/epsilon), falling back to log-domain updates
// when the kernel underflows. Converged when the marginal violation (max abs
// deviation) is <= tol; the final plan is then rounded onto the exact
// transport polytope. Throws not_converged after max_iter sweeps.
OtSolution solve_entropic(const OtProblem& prob, double epsilon, int max_iter = 100000,
                          double tol = 1e-9);

// Projects a nonnegative matrix onto couplings of (a, b) by the row/column
// shrink-and-correct rounding. Marginals of the result match up to round-off.
Matrix round_to_marginals(Matrix plan, const Vector& a, const Vector& b);

// Basic solution on a spanning tree of the bipartite (row, column) graph,
// given as n + m - 1 cells. Entries may come out negative for infeasible trees.
Matrix tree_flows(const std::vector<std::pair<int, int>>& cells, const Vector& a, const Vector& b);

}  // namespace hnet

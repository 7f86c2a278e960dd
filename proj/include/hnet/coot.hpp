// SPDX-License-Identifier: Apache-2.0
//
// Hypernetwork distance by alternating optimal transport over node and
// hyperedge couplings, plus an exact oracle for small instances.
#pragma once

#include <random>
#include <string>
#include <vector>

#include "hnet/hypernetwork.hpp"
#include "hnet/ot.hpp"

namespace hnet {

struct RestartRecord {
  // Sum of |w - w'|^p against the final couplings (the max for p = inf).
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
  // Objective after every half-step, starting with the initial couplings.
  std::vector<double> trace;
};

struct CootResult {
  double distance = 0.0;
  Coupling pi;
  Coupling xi;
  std::vector<RestartRecord> per_restart;
  DistanceParams params;
  int best_restart = 0;
  // False for p = inf (heuristic upper bound) and for entropic inner solves.
  bool certified_local = true;
  // "bcd" for the heuristic, "exact" for the oracle.
  std::string method = "bcd";
};

// M[y,y'] = sum_{x,x'} |w(x,y) - w'(x',y')|^p pi(x,x'). p = 2 uses the
// three-term matrix expansion; other finite p use direct summation.
Matrix coot_cost_matrix_for_xi(const MeasureHypernetwork& h1, const MeasureHypernetwork& h2,
                               const Coupling& pi, Order p = Order(2.0));

// M[x,x'] = sum_{y,y'} |w(x,y) - w'(x',y')|^p xi(y,y').
Matrix coot_cost_matrix_for_pi(const MeasureHypernetwork& h1, const MeasureHypernetwork& h2,
                               const Coupling& xi, Order p = Order(2.0));

// Entrywise Exp(1) matrix, 100 Sinkhorn projections, then rounded onto the
// exact coupling polytope of (a, b).
Coupling random_coupling(const Vector& a, const Vector& b, std::mt19937_64& rng);

// Dispatches to the exact or entropic solver per `params`.
OtSolution solve_ot(const OtProblem& prob, const DistanceParams& params);

struct BcdOutcome {
  Coupling pi;
  Coupling xi;
  RestartRecord record;
};

// One restart of alternating descent. With nodes_first == false the first
// half-step solves for xi given pi0 (xi0 only enters the initial objective);
// otherwise pi is solved first from xi0.
BcdOutcome coot_bcd(const MeasureHypernetwork& h1, const MeasureHypernetwork& h2,
                    const Coupling& pi0, const Coupling& xi0, const DistanceParams& params,
                    bool nodes_first = false);

// Best of params.restarts restarts. Restart 0 starts from the product
// couplings, restart r >= 1 from random couplings drawn from streams keyed by
// seed ^ r and fingerprints of the two sides. Each restart descends twice,
// once solving for xi first and once for pi first, and keeps the better run.
CootResult coot_distance(const MeasureHypernetwork& h1, const MeasureHypernetwork& h2,
                         const DistanceParams& params = {});

// Exact minimum for instances whose node or hyperedge polytope is small enough
// to enumerate: every vertex on the enumerable side is paired with an exact
// LP solve on the other side. Finite p only.
CootResult coot_distance_bruteforce(const MeasureHypernetwork& h1, const MeasureHypernetwork& h2,
                                    Order p = Order(2.0));

namespace detail {

// Matrix-level kernels without coupling validation. Marginal terms of the
// p = 2 expansion are taken from `plan` itself, so both are linear in `plan`.
Matrix cost_for_second(const Matrix& w1, const Matrix& w2, const Matrix& plan, double p);
Matrix cost_for_first(const Matrix& w1, const Matrix& w2, const Matrix& plan, double p);
// Sum_{ij} a_ij b_ij, correctly rounded.
double frobenius_dot(const Matrix& a, const Matrix& b);

}  // namespace detail

}  // namespace hnet

// SPDX-License-Identifier: Apache-2.0
//
// Maps from hypernetworks to networks: bipartite incidence, q-clique
// expansion, q-line graph and the matrix-product line graph.
#pragma once

#include "hnet/gw.hpp"
#include "hnet/hypernetwork.hpp"

namespace hnet {

// Node set X followed by Y, measure (mu/2, nu/2), relation w on X x Y and its
// transpose on Y x X. Labels are kept unless a node and a hyperedge share one,
// in which case every label is prefixed with "n:" or "e:".
LabeledBipartiteNetwork bipartite_incidence(const MeasureHypernetwork& h);

// Inverse of bipartite_incidence: (left, 2 mu|left, right, 2 mu|right, w|left x right).
MeasureHypernetwork bipartite_restriction(const LabeledBipartiteNetwork& b);

// w(x1, x2) = || min(w(x1, .), w(x2, .)) ||_{L^q(nu)}. For q = inf the max over
// hyperedges.
MeasureNetwork clique_expansion(const MeasureHypernetwork& h, Order q);

// clique_expansion of the dual.
MeasureNetwork line_graph(const MeasureHypernetwork& h, Order q);

// Network on hyperedges with relation w^T diag(mu) w.
MeasureNetwork matrix_product_line_graph(const MeasureHypernetwork& h);

}  // namespace hnet

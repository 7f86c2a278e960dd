// SPDX-License-Identifier: Apache-2.0
//
// Vertex enumeration of transportation polytopes, used by the exact oracles.
#pragma once

#include <vector>

#include "hnet/hypernetwork.hpp"

namespace hnet {

// True when transport_vertices(a, b) would succeed: a single row or column,
// uniform equal-size marginals with n <= 6 (permutation vertices), or at most
// 4 entries per side (spanning-tree enumeration).
bool vertices_enumerable(const Vector& a, const Vector& b);

// Distinct vertices of {P >= 0 : P 1 = a, P^T 1 = b}; a and b need only have
// equal totals. Throws too_large outside the enumerable range.
std::vector<Matrix> transport_vertices(const Vector& a, const Vector& b);

}  // namespace hnet

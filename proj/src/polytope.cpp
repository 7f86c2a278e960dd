// SPDX-License-Identifier: Apache-2.0
#include "hnet/polytope.hpp"

#include <algorithm>
#include <numeric>

#include "hnet/error.hpp"
#include "hnet/ot.hpp"

namespace hnet {

namespace {

constexpr Eigen::Index kMaxPermutationSize = 6;
constexpr Eigen::Index kMaxTreeSide = 4;

bool uniform(const Vector& v) {
  const double expected = v.sum() / static_cast<double>(v.size());
  return ((v.array() - expected).abs() <= 1e-15).all();
}

bool permutation_case(const Vector& a, const Vector& b) {
  return a.size() == b.size() && a.size() <= kMaxPermutationSize && uniform(a) && uniform(b) &&
         std::abs(a.sum() - b.sum()) <= 1e-15;
}

int find(std::vector<int>& parent, int x) {
  while (parent[static_cast<std::size_t>(x)] != x) {
    parent[static_cast<std::size_t>(x)] =
        parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
    x = parent[static_cast<std::size_t>(x)];
  }
  return x;
}

std::vector<Matrix> permutation_vertices(const Vector& a) {
  const Eigen::Index n = a.size();
  const double w = a[0];
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<Matrix> out;
  do {
    Matrix p = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) p(i, perm[static_cast<std::size_t>(i)]) = w;
    out.push_back(std::move(p));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

// Every basic feasible solution comes from a spanning tree of the complete
// bipartite graph; enumerate (n+m-1)-subsets of cells and keep the trees.
std::vector<Matrix> tree_vertices(const Vector& a, const Vector& b) {
  const int n = static_cast<int>(a.size());
  const int m = static_cast<int>(b.size());
  const int cells = n * m;
  const int k = n + m - 1;
  std::vector<bool> pick(static_cast<std::size_t>(cells), false);
  std::fill(pick.begin(), pick.begin() + k, true);
  std::vector<Matrix> out;
  const double tol = 1e-12 * std::max(1.0, a.sum());
  do {
    std::vector<int> parent(static_cast<std::size_t>(n + m));
    std::iota(parent.begin(), parent.end(), 0);
    std::vector<std::pair<int, int>> chosen;
    bool acyclic = true;
    for (int c = 0; c < cells && acyclic; ++c) {
      if (!pick[static_cast<std::size_t>(c)]) continue;
      const int i = c / m;
      const int j = c % m;
      const int ri = find(parent, i);
      const int rj = find(parent, n + j);
      if (ri == rj) acyclic = false;
      parent[static_cast<std::size_t>(ri)] = rj;
      chosen.emplace_back(i, j);
    }
    if (!acyclic) continue;
    Matrix flow = tree_flows(chosen, a, b);
    if ((flow.array() < -tol).any()) continue;
    flow = flow.cwiseMax(0.0);
    const bool seen = std::any_of(out.begin(), out.end(), [&](const Matrix& v) {
      return (v - flow).cwiseAbs().maxCoeff() <= tol;
    });
    if (!seen) out.push_back(std::move(flow));
  } while (std::prev_permutation(pick.begin(), pick.end()));
  return out;
}

}  // namespace

bool vertices_enumerable(const Vector& a, const Vector& b) {
  if (a.size() == 0 || b.size() == 0) return false;
  if (a.size() == 1 || b.size() == 1) return true;
  if (permutation_case(a, b)) return true;
  return a.size() <= kMaxTreeSide && b.size() <= kMaxTreeSide;
}

std::vector<Matrix> transport_vertices(const Vector& a, const Vector& b) {
  if (!vertices_enumerable(a, b))
    throw Error(ErrorCode::too_large,
                "transport polytope " + std::to_string(a.size()) + "x" + std::to_string(b.size()) +
                    " is too large for vertex enumeration");
  if (a.size() == 1 || b.size() == 1) return {Matrix(a * b.transpose() / a.sum())};
  if (permutation_case(a, b)) return permutation_vertices(a);
  return tree_vertices(a, b);
}

}  // namespace hnet

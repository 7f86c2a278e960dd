// SPDX-License-Identifier: Apache-2.0
#include "hnet/graphify.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace hnet {

namespace {

constexpr const char* kNodePrefix = "n:";
constexpr const char* kEdgePrefix = "e:";

bool all_prefixed(const Labels& ids, const std::string& prefix) {
  return std::all_of(ids.begin(), ids.end(),
                     [&](const std::string& s) { return s.rfind(prefix, 0) == 0; });
}

}  // namespace

LabeledBipartiteNetwork bipartite_incidence(const MeasureHypernetwork& h) {
  const Eigen::Index n = static_cast<Eigen::Index>(h.num_nodes());
  const Eigen::Index m = static_cast<Eigen::Index>(h.num_hyperedges());
  const std::set<std::string> node_set(h.node_ids().begin(), h.node_ids().end());
  const bool clash = std::any_of(h.hyperedge_ids().begin(), h.hyperedge_ids().end(),
                                 [&](const std::string& s) { return node_set.count(s) > 0; });
  Labels ids;
  for (const auto& s : h.node_ids()) ids.push_back(clash ? kNodePrefix + s : s);
  for (const auto& s : h.hyperedge_ids()) ids.push_back(clash ? kEdgePrefix + s : s);

  Vector mu(n + m);
  mu << 0.5 * h.mu(), 0.5 * h.nu();
  Matrix w = Matrix::Zero(n + m, n + m);
  w.topRightCorner(n, m) = h.omega();
  w.bottomLeftCorner(m, n) = h.omega().transpose();
  std::vector<bool> left(static_cast<std::size_t>(n + m), false);
  std::fill(left.begin(), left.begin() + n, true);
  return LabeledBipartiteNetwork(MeasureNetwork(std::move(ids), std::move(mu), std::move(w)),
                                 std::move(left));
}

MeasureHypernetwork bipartite_restriction(const LabeledBipartiteNetwork& b) {
  const auto& net = b.network();
  const auto& li = b.left_indices();
  const auto& ri = b.right_indices();
  Labels left_ids, right_ids;
  for (auto i : li) left_ids.push_back(net.ids()[static_cast<std::size_t>(i)]);
  for (auto j : ri) right_ids.push_back(net.ids()[static_cast<std::size_t>(j)]);
  if (all_prefixed(left_ids, kNodePrefix) && all_prefixed(right_ids, kEdgePrefix)) {
    for (auto& s : left_ids) s.erase(0, 2);
    for (auto& s : right_ids) s.erase(0, 2);
  }
  Vector mu(static_cast<Eigen::Index>(li.size())), nu(static_cast<Eigen::Index>(ri.size()));
  Matrix w(mu.size(), nu.size());
  for (std::size_t a = 0; a < li.size(); ++a) {
    mu[static_cast<Eigen::Index>(a)] = 2.0 * net.mu()[li[a]];
    for (std::size_t c = 0; c < ri.size(); ++c)
      w(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(c)) = net.omega()(li[a], ri[c]);
  }
  for (std::size_t c = 0; c < ri.size(); ++c) nu[static_cast<Eigen::Index>(c)] = 2.0 * net.mu()[ri[c]];
  return MeasureHypernetwork(std::move(left_ids), std::move(mu), std::move(right_ids),
                             std::move(nu), std::move(w));
}

MeasureNetwork clique_expansion(const MeasureHypernetwork& h, Order q) {
  const Matrix& w = h.omega();
  const Vector& nu = h.nu();
  const Eigen::Index n = w.rows();
  Matrix out(n, n);
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = a; b < n; ++b) {
      double value = 0.0;
      if (q.is_infinite()) {
        for (Eigen::Index y = 0; y < w.cols(); ++y) value = std::max(value, std::min(w(a, y), w(b, y)));
      } else {
        ExactSum s;
        for (Eigen::Index y = 0; y < w.cols(); ++y)
          s.add(std::pow(std::min(w(a, y), w(b, y)), q.value()) * nu[y]);
        value = q.value() == 1.0 ? s.value() : std::pow(s.value(), 1.0 / q.value());
      }
      out(a, b) = value;
      out(b, a) = value;
    }
  return MeasureNetwork(h.node_ids(), h.mu(), std::move(out));
}

MeasureNetwork line_graph(const MeasureHypernetwork& h, Order q) {
  return clique_expansion(dualize(h), q);
}

MeasureNetwork matrix_product_line_graph(const MeasureHypernetwork& h) {
  const Matrix& w = h.omega();
  const Eigen::Index m = w.cols();
  Matrix out(m, m);
  for (Eigen::Index a = 0; a < m; ++a)
    for (Eigen::Index b = a; b < m; ++b) {
      ExactSum s;
      for (Eigen::Index x = 0; x < w.rows(); ++x) s.add(w(x, a) * h.mu()[x] * w(x, b));
      out(a, b) = s.value();
      out(b, a) = s.value();
    }
  return MeasureNetwork(h.hyperedge_ids(), h.nu(), std::move(out));
}

}  // namespace hnet

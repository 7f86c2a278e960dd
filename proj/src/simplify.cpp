// SPDX-License-Identifier: Apache-2.0
#include "hnet/simplify.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <tuple>

#include "hnet/coot.hpp"
#include "hnet/error.hpp"
#include "parallel.hpp"

namespace hnet {

SimplifyMode parse_simplify_mode(const std::string& s) {
  if (s == "hyperedge" || s == "edge") return SimplifyMode::hyperedge;
  if (s == "node") return SimplifyMode::node;
  throw Error(ErrorCode::invalid_argument, "unknown simplification mode '" + s + "' (hyperedge, node)");
}

std::string to_string(SimplifyMode m) { return m == SimplifyMode::hyperedge ? "hyperedge" : "node"; }

std::vector<double> SimplificationTrace::curve() const {
  std::vector<double> out;
  for (const auto& s : steps) out.push_back(s.min_distance);
  return out;
}

namespace {

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  // The smaller index stays the root.
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (b < a) std::swap(a, b);
    parent_[b] = a;
    return true;
  }

 private:
  std::vector<std::size_t> parent_;
};

struct TreeEdge {
  double weight;
  std::size_t a;
  std::size_t b;
};

// Hypergraph whose hyperedges are the classes of `uf`, ordered by their
// smallest original index.
CombinatorialHypergraph merged_hypergraph(const CombinatorialHypergraph& g, UnionFind& uf,
                                          bool multiplicities) {
  std::map<std::size_t, std::vector<std::size_t>> classes;
  for (std::size_t e = 0; e < g.num_hyperedges(); ++e) classes[uf.find(e)].push_back(e);
  std::vector<std::pair<std::string, Labels>> edges;
  std::vector<double> weights;
  for (const auto& [root, originals] : classes) {
    std::string label;
    std::vector<std::size_t> members;
    double w = 0.0;
    for (std::size_t e : originals) {
      if (!label.empty()) label += "+";
      label += g.hyperedge_ids()[e];
      members.insert(members.end(), g.members(e).begin(), g.members(e).end());
      w += g.hyperedge_weights()[e];
    }
    std::sort(members.begin(), members.end());
    members.erase(std::unique(members.begin(), members.end()), members.end());
    Labels names;
    for (std::size_t x : members) names.push_back(g.nodes()[x]);
    edges.emplace_back(label, std::move(names));
    weights.push_back(multiplicities ? w : 1.0);
  }
  std::vector<double> node_weights = g.node_weights();
  if (!multiplicities) std::fill(node_weights.begin(), node_weights.end(), 1.0);
  return CombinatorialHypergraph(g.nodes(), edges, std::move(node_weights), std::move(weights));
}

std::vector<TreeEdge> minimum_spanning_tree(const CombinatorialHypergraph& g, LineWeight weight) {
  const Matrix w = weighted_line_graph(g, weight).omega();
  const Labels& ids = g.hyperedge_ids();
  std::vector<TreeEdge> edges;
  for (Eigen::Index a = 0; a < w.rows(); ++a)
    for (Eigen::Index b = a + 1; b < w.cols(); ++b)
      if (w(a, b) > 0.0) edges.push_back({w(a, b), static_cast<std::size_t>(a), static_cast<std::size_t>(b)});
  auto key = [&](const TreeEdge& e) {
    const std::string& la = ids[e.a];
    const std::string& lb = ids[e.b];
    return std::make_tuple(e.weight, std::min(la, lb), std::max(la, lb));
  };
  std::stable_sort(edges.begin(), edges.end(),
                   [&](const TreeEdge& x, const TreeEdge& y) { return key(x) < key(y); });
  UnionFind uf(g.num_hyperedges());
  std::vector<TreeEdge> tree;
  for (const TreeEdge& e : edges)
    if (uf.unite(e.a, e.b)) tree.push_back(e);
  return tree;
}

SimplificationTrace merge_hyperedges(const CombinatorialHypergraph& input, LineWeight weight,
                                     bool multiplicities) {
  const auto comps = line_graph_components(input);
  if (comps.size() > 1) {
    std::string names;
    for (std::size_t c = 0; c < comps.size(); ++c) {
      names += c == 0 ? "{" : ", {";
      for (std::size_t k = 0; k < comps[c].size(); ++k)
        names += (k ? " " : "") + input.hyperedge_ids()[comps[c][k]];
      names += "}";
    }
    throw Error(ErrorCode::disconnected, "cannot simplify a disconnected hypergraph; components: " + names);
  }
  SimplificationTrace trace;
  trace.weight = weight;
  trace.multiplicities = multiplicities;
  UnionFind uf(input.num_hyperedges());
  trace.steps.push_back(SimplificationStep{0.0, {}, merged_hypergraph(input, uf, multiplicities), {}, 0.0});

  const auto tree = minimum_spanning_tree(input, weight);
  for (std::size_t k = 0; k < tree.size();) {
    std::size_t end = k;
    while (end < tree.size() && tree[end].weight == tree[k].weight) ++end;
    for (std::size_t i = k; i < end; ++i) uf.unite(tree[i].a, tree[i].b);
    std::map<std::size_t, Labels> touched;
    for (std::size_t i = k; i < end; ++i) touched[uf.find(tree[i].a)];
    for (std::size_t e = 0; e < input.num_hyperedges(); ++e)
      if (auto it = touched.find(uf.find(e)); it != touched.end()) it->second.push_back(input.hyperedge_ids()[e]);
    SimplificationStep step{tree[k].weight, {}, merged_hypergraph(input, uf, multiplicities), {}, 0.0};
    for (auto& [root, labels] : touched) step.merged.push_back(std::move(labels));
    trace.steps.push_back(std::move(step));
    k = end;
  }
  return trace;
}

}  // namespace

SimplificationTrace simplification_sequence(const CombinatorialHypergraph& g, SimplifyMode mode,
                                            LineWeight weight, bool multiplicities) {
  if (mode == SimplifyMode::hyperedge) return merge_hyperedges(g, weight, multiplicities);
  SimplificationTrace trace = merge_hyperedges(g.dual(), weight, multiplicities);
  trace.mode = SimplifyMode::node;
  for (auto& step : trace.steps) step.hypergraph = step.hypergraph.dual();
  return trace;
}

void distance_curve(SimplificationTrace& trace, const ModelParams& model, const DistanceParams& params) {
  params.validate();
  if (trace.steps.empty()) throw Error(ErrorCode::invalid_argument, "empty simplification trace");
  const MeasureHypernetwork h0 = build_hypernetwork(trace.steps[0].hypergraph, model);
  DistanceParams inner = params;
  inner.threads = 1;
  detail::parallel_for(trace.steps.size(), params.threads, [&](std::size_t i) {
    try {
      SimplificationStep& step = trace.steps[i];
      const MeasureHypernetwork hi = build_hypernetwork(step.hypergraph, model);
      const CootResult r = coot_distance(h0, hi, inner);
      step.restart_distances.clear();
      for (const auto& rec : r.per_restart)
        step.restart_distances.push_back(params.p.is_infinite()
                                             ? rec.objective
                                             : std::pow(std::max(rec.objective, 0.0), 1.0 / params.p.value()));
      step.min_distance = r.distance;
    } catch (const Error& e) {
      rethrow_with_context(e, "step " + std::to_string(i));
    }
  });
  trace.has_distances = true;
  if (trace.steps.size() >= 3) trace.elbow = detect_elbow(trace.curve());
}

ElbowResult detect_elbow(const std::vector<double>& curve) {
  if (curve.size() < 3)
    throw Error(ErrorCode::invalid_argument, "elbow detection needs at least 3 curve values");
  std::vector<ElbowCandidate> all;
  for (std::size_t i = 2; i < curve.size(); ++i)
    all.push_back({i, curve[i] - 2.0 * curve[i - 1] + curve[i - 2]});
  std::stable_sort(all.begin(), all.end(),
                   [](const ElbowCandidate& a, const ElbowCandidate& b) { return a.score > b.score; });
  ElbowResult out;
  out.no_elbow = !(all.front().score > 0.0);
  if (out.no_elbow)
    std::stable_sort(all.begin(), all.end(),
                     [](const ElbowCandidate& a, const ElbowCandidate& b) { return a.step < b.step; });
  all.resize(std::min<std::size_t>(3, all.size()));
  out.ranked = std::move(all);
  return out;
}

}  // namespace hnet

// SPDX-License-Identifier: Apache-2.0
#include "hnet/graph.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <deque>
#include <optional>
#include <set>
#include <sstream>
#include <unordered_map>

#include "hnet/error.hpp"
#include "hnet/io.hpp"

namespace hnet {

namespace {

std::optional<long long> as_integer(const std::string& s) {
  long long v = 0;
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || s.empty()) return std::nullopt;
  return v;
}

}  // namespace

bool label_less(const std::string& a, const std::string& b) {
  const auto ia = as_integer(a);
  const auto ib = as_integer(b);
  if (ia && ib) return *ia != *ib ? *ia < *ib : a < b;
  if (ia || ib) return ia.has_value();
  return a < b;
}

SimpleGraph::SimpleGraph(Labels nodes, std::vector<GraphEdge> edges)
    : nodes_(std::move(nodes)), edges_(std::move(edges)), adjacency_(nodes_.size()) {
  std::set<std::string> seen(nodes_.begin(), nodes_.end());
  if (seen.size() != nodes_.size()) throw Error(ErrorCode::invalid_argument, "duplicate node label in graph");
  std::set<std::pair<std::size_t, std::size_t>> pairs;
  for (const auto& e : edges_) {
    if (e.a >= nodes_.size() || e.b >= nodes_.size())
      throw Error(ErrorCode::invalid_argument, "edge endpoint out of range");
    if (e.a == e.b) throw Error(ErrorCode::invalid_argument, "self-loop at '" + nodes_[e.a] + "'");
    if (!(e.weight > 0.0) || !std::isfinite(e.weight))
      throw Error(ErrorCode::invalid_argument,
                  "edge '" + nodes_[e.a] + "'-'" + nodes_[e.b] + "' needs a positive finite weight");
    if (!pairs.insert({std::min(e.a, e.b), std::max(e.a, e.b)}).second)
      throw Error(ErrorCode::invalid_argument, "repeated edge '" + nodes_[e.a] + "'-'" + nodes_[e.b] + "'");
    adjacency_[e.a].push_back(e.b);
    adjacency_[e.b].push_back(e.a);
  }
  for (auto& adj : adjacency_) std::sort(adj.begin(), adj.end());
}

SimpleGraph::SimpleGraph(Labels nodes, const std::vector<std::pair<std::string, std::string>>& edges)
    : SimpleGraph([&] {
        std::vector<GraphEdge> out;
        auto find = [&](const std::string& s) {
          auto it = std::find(nodes.begin(), nodes.end(), s);
          if (it == nodes.end()) throw Error(ErrorCode::invalid_argument, "unknown edge endpoint '" + s + "'");
          return static_cast<std::size_t>(it - nodes.begin());
        };
        for (const auto& [u, v] : edges) out.push_back({find(u), find(v), 1.0});
        return SimpleGraph(nodes, std::move(out));
      }()) {}

std::size_t SimpleGraph::index_of(const std::string& label) const {
  auto it = std::find(nodes_.begin(), nodes_.end(), label);
  if (it == nodes_.end()) throw Error(ErrorCode::invalid_argument, "unknown node '" + label + "'");
  return static_cast<std::size_t>(it - nodes_.begin());
}

std::vector<std::vector<std::size_t>> SimpleGraph::components() const {
  std::vector<int> comp(nodes_.size(), -1);
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t s = 0; s < nodes_.size(); ++s) {
    if (comp[s] >= 0) continue;
    const int id = static_cast<int>(out.size());
    out.emplace_back();
    std::deque<std::size_t> queue{s};
    comp[s] = id;
    while (!queue.empty()) {
      const std::size_t x = queue.front();
      queue.pop_front();
      out.back().push_back(x);
      for (std::size_t y : adjacency_[x])
        if (comp[y] < 0) {
          comp[y] = id;
          queue.push_back(y);
        }
    }
    std::sort(out.back().begin(), out.back().end());
  }
  return out;
}

SimpleGraph SimpleGraph::permuted(const std::vector<std::size_t>& order) const {
  if (order.size() != nodes_.size()) throw Error(ErrorCode::dimension_mismatch, "permutation has wrong length");
  Labels nodes(nodes_.size());
  std::vector<bool> hit(nodes_.size(), false);
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (order[i] >= nodes_.size() || hit[order[i]])
      throw Error(ErrorCode::invalid_argument, "not a permutation");
    hit[order[i]] = true;
    nodes[order[i]] = nodes_[i];
  }
  std::vector<GraphEdge> edges;
  for (const auto& e : edges_) edges.push_back({order[e.a], order[e.b], e.weight});
  return SimpleGraph(std::move(nodes), std::move(edges));
}

bool SimpleGraph::operator==(const SimpleGraph& other) const {
  if (nodes_ != other.nodes_ || edges_.size() != other.edges_.size()) return false;
  for (std::size_t k = 0; k < edges_.size(); ++k) {
    const auto& x = edges_[k];
    const auto& y = other.edges_[k];
    if (x.a != y.a || x.b != y.b || x.weight != y.weight) return false;
  }
  return true;
}

SimpleGraph parse_edge_list(const std::string& text) {
  Labels nodes;
  std::unordered_map<std::string, std::size_t> index;
  std::vector<GraphEdge> edges;
  auto node = [&](const std::string& s) {
    auto [it, fresh] = index.emplace(s, nodes.size());
    if (fresh) nodes.push_back(s);
    return it->second;
  };
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::vector<std::string> tok;
    for (std::string t; fields >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    const std::string where = "line " + std::to_string(lineno) + ": ";
    if (tok.size() > 3) throw Error(ErrorCode::parse_error, where + "expected 'u v [weight]'");
    if (tok.size() == 1) {
      node(tok[0]);
      continue;
    }
    double w = 1.0;
    if (tok.size() == 3) {
      std::size_t used = 0;
      try {
        w = std::stod(tok[2], &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != tok[2].size()) throw Error(ErrorCode::parse_error, where + "bad weight '" + tok[2] + "'");
    }
    const std::size_t a = node(tok[0]);
    const std::size_t b = node(tok[1]);
    edges.push_back({a, b, w});
  }
  try {
    return SimpleGraph(std::move(nodes), std::move(edges));
  } catch (const Error& e) {
    throw Error(ErrorCode::parse_error, e.what());
  }
}

SimpleGraph parse_graph_json(const std::string& text) {
  io::Json j;
  try {
    j = io::Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::parse_error, std::string("graph JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("edges") || !j.at("edges").is_array())
    throw Error(ErrorCode::parse_error, "graph JSON needs an \"edges\" array");
  auto label = [](const io::Json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return v.dump();
    throw Error(ErrorCode::parse_error, "graph labels must be strings or integers");
  };
  Labels nodes;
  std::unordered_map<std::string, std::size_t> index;
  const bool declared = j.contains("nodes");
  if (declared) {
    for (const auto& v : j.at("nodes")) {
      const std::string s = label(v);
      if (!index.emplace(s, nodes.size()).second)
        throw Error(ErrorCode::parse_error, "duplicate node '" + s + "'");
      nodes.push_back(s);
    }
  }
  auto node = [&](const std::string& s) {
    auto it = index.find(s);
    if (it != index.end()) return it->second;
    if (declared) throw Error(ErrorCode::parse_error, "edge endpoint '" + s + "' is not a declared node");
    index.emplace(s, nodes.size());
    nodes.push_back(s);
    return nodes.size() - 1;
  };
  std::vector<GraphEdge> edges;
  for (const auto& e : j.at("edges")) {
    if (!e.is_array() || e.size() < 2 || e.size() > 3)
      throw Error(ErrorCode::parse_error, "each edge must be [u, v] or [u, v, weight]");
    double w = 1.0;
    if (e.size() == 3) {
      if (!e[2].is_number()) throw Error(ErrorCode::parse_error, "edge weight must be a number");
      w = e[2].get<double>();
    }
    const std::size_t a = node(label(e[0]));
    const std::size_t b = node(label(e[1]));
    edges.push_back({a, b, w});
  }
  try {
    return SimpleGraph(std::move(nodes), std::move(edges));
  } catch (const Error& e) {
    throw Error(ErrorCode::parse_error, e.what());
  }
}

SimpleGraph parse_graph(const std::string& text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') return parse_graph_json(text);
  return parse_edge_list(text);
}

std::string graph_to_json(const SimpleGraph& g) {
  io::Json j;
  j["nodes"] = g.nodes();
  io::Json edges = io::Json::array();
  for (const auto& e : g.edges()) {
    io::Json item = io::Json::array({g.nodes()[e.a], g.nodes()[e.b]});
    if (e.weight != 1.0) item.push_back(e.weight);
    edges.push_back(std::move(item));
  }
  j["edges"] = std::move(edges);
  return io::dump(j);
}

std::vector<int> bfs_distances(const SimpleGraph& g, std::size_t source) {
  std::vector<int> dist(g.num_nodes(), -1);
  dist.at(source) = 0;
  std::deque<std::size_t> queue{source};
  while (!queue.empty()) {
    const std::size_t x = queue.front();
    queue.pop_front();
    for (std::size_t y : g.neighbors(x))
      if (dist[y] < 0) {
        dist[y] = dist[x] + 1;
        queue.push_back(y);
      }
  }
  return dist;
}

void require_connected(const SimpleGraph& g, const std::string& what) {
  if (g.num_nodes() == 0) throw Error(ErrorCode::invalid_argument, what + ": graph has no nodes");
  const auto comps = g.components();
  if (comps.size() <= 1) return;
  std::string names;
  for (std::size_t c = 0; c < comps.size(); ++c) {
    names += c == 0 ? "{" : ", {";
    for (std::size_t k = 0; k < comps[c].size(); ++k) names += (k ? " " : "") + g.nodes()[comps[c][k]];
    names += "}";
  }
  throw Error(ErrorCode::disconnected, what + ": graph is disconnected; components: " + names);
}

}  // namespace hnet

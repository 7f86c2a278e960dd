// SPDX-License-Identifier: Apache-2.0
#include "hnet/hypergraph.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <queue>
#include <set>
#include <sstream>

#include <json.hpp>

#include "hnet/error.hpp"

namespace hnet {

namespace {

std::vector<double> default_weights(std::vector<double> w, std::size_t n, const char* what) {
  if (w.empty()) return std::vector<double>(n, 1.0);
  if (w.size() != n)
    throw Error(ErrorCode::dimension_mismatch, std::string(what) + " multiplicities do not match");
  for (double v : w)
    if (!(v > 0.0) || !std::isfinite(v))
      throw Error(ErrorCode::invalid_argument, std::string(what) + " multiplicities must be positive");
  return w;
}

void require_unique(const Labels& ids, const char* what) {
  std::set<std::string> seen;
  for (const auto& s : ids)
    if (!seen.insert(s).second)
      throw Error(ErrorCode::invalid_argument, std::string("duplicate ") + what + " label '" + s + "'");
}

std::size_t intersection_size(const CombinatorialHypergraph::Members& a,
                              const CombinatorialHypergraph::Members& b) {
  std::size_t i = 0, j = 0, n = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] < b[j]) {
      ++i;
    } else if (b[j] < a[i]) {
      ++j;
    } else {
      ++n;
      ++i;
      ++j;
    }
  }
  return n;
}

Vector normalized(const std::vector<double>& raw) {
  ExactSum total;
  for (double v : raw) total.add(v);
  Vector out(static_cast<Eigen::Index>(raw.size()));
  for (std::size_t i = 0; i < raw.size(); ++i) out[static_cast<Eigen::Index>(i)] = raw[i] / total.value();
  return out;
}

struct Arc {
  std::size_t to;
  double length;
};

std::vector<std::vector<Arc>> line_graph_arcs(const CombinatorialHypergraph& g, LineWeight weight) {
  const std::size_t m = g.num_hyperedges();
  std::vector<std::vector<Arc>> adj(m);
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = a + 1; b < m; ++b) {
      const std::size_t common = intersection_size(g.members(a), g.members(b));
      if (common == 0) continue;
      const double inter = static_cast<double>(common);
      const double uni = static_cast<double>(g.members(a).size() + g.members(b).size() - common);
      double len = 0.0;
      switch (weight) {
        case LineWeight::intersection: len = 1.0 / inter; break;
        case LineWeight::jaccard: len = uni / inter; break;
        case LineWeight::overlap: len = inter; break;
      }
      adj[a].push_back({b, len});
      adj[b].push_back({a, len});
    }
  return adj;
}

std::string describe_components(const CombinatorialHypergraph& g,
                                const std::vector<std::vector<std::size_t>>& comps) {
  std::string out;
  for (std::size_t c = 0; c < comps.size(); ++c) {
    out += c == 0 ? "{" : ", {";
    for (std::size_t k = 0; k < comps[c].size(); ++k) {
      if (k > 0) out += " ";
      out += g.hyperedge_ids()[comps[c][k]];
    }
    out += "}";
  }
  return out;
}

std::string label_of(const nlohmann::ordered_json& v, const std::string& where) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return v.dump();
  throw Error(ErrorCode::parse_error, where + ": node labels must be strings or integers");
}

}  // namespace

CombinatorialHypergraph::CombinatorialHypergraph(
    Labels nodes, const std::vector<std::pair<std::string, Labels>>& hyperedges,
    std::vector<double> node_weights, std::vector<double> hyperedge_weights)
    : nodes_(std::move(nodes)) {
  require_unique(nodes_, "node");
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < nodes_.size(); ++i) index[nodes_[i]] = i;
  for (const auto& [label, member_labels] : hyperedges) {
    if (member_labels.empty())
      throw Error(ErrorCode::invalid_argument, "hyperedge '" + label + "' is empty");
    Members m;
    for (const auto& s : member_labels) {
      auto it = index.find(s);
      if (it == index.end())
        throw Error(ErrorCode::invalid_argument,
                    "hyperedge '" + label + "' contains undeclared node '" + s + "'");
      m.push_back(it->second);
    }
    std::sort(m.begin(), m.end());
    m.erase(std::unique(m.begin(), m.end()), m.end());
    edge_ids_.push_back(label);
    members_.push_back(std::move(m));
  }
  require_unique(edge_ids_, "hyperedge");
  node_weights_ = default_weights(std::move(node_weights), nodes_.size(), "node");
  edge_weights_ = default_weights(std::move(hyperedge_weights), edge_ids_.size(), "hyperedge");
}

std::vector<std::size_t> CombinatorialHypergraph::incident(std::size_t x) const {
  std::vector<std::size_t> out;
  for (std::size_t e = 0; e < members_.size(); ++e)
    if (std::binary_search(members_[e].begin(), members_[e].end(), x)) out.push_back(e);
  return out;
}

double CombinatorialHypergraph::degree(std::size_t x) const {
  double d = 0.0;
  for (std::size_t e : incident(x)) d += edge_weights_[e];
  return d;
}

CombinatorialHypergraph CombinatorialHypergraph::dual() const {
  std::vector<std::pair<std::string, Labels>> edges;
  for (std::size_t x = 0; x < nodes_.size(); ++x) {
    Labels m;
    for (std::size_t e : incident(x)) m.push_back(edge_ids_[e]);
    if (m.empty())
      throw Error(ErrorCode::invalid_argument,
                  "node '" + nodes_[x] + "' belongs to no hyperedge, so the dual is undefined");
    edges.emplace_back(nodes_[x], std::move(m));
  }
  return CombinatorialHypergraph(edge_ids_, edges, edge_weights_, node_weights_);
}

std::vector<std::pair<std::string, Labels>> CombinatorialHypergraph::hyperedge_list() const {
  std::vector<std::pair<std::string, Labels>> out;
  for (std::size_t e = 0; e < members_.size(); ++e) {
    Labels m;
    for (std::size_t x : members_[e]) m.push_back(nodes_[x]);
    out.emplace_back(edge_ids_[e], std::move(m));
  }
  return out;
}

bool operator==(const CombinatorialHypergraph& a, const CombinatorialHypergraph& b) {
  return a.nodes_ == b.nodes_ && a.edge_ids_ == b.edge_ids_ && a.members_ == b.members_ &&
         a.node_weights_ == b.node_weights_ && a.edge_weights_ == b.edge_weights_;
}

CombinatorialHypergraph parse_hypergraph_json(const std::string& text) {
  nlohmann::ordered_json doc;
  try {
    doc = nlohmann::ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::parse_error, std::string("hypergraph JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("hyperedges") || !doc["hyperedges"].is_object())
    throw Error(ErrorCode::parse_error, "hypergraph JSON needs a \"hyperedges\" object");
  Labels nodes;
  std::set<std::string> seen;
  const bool declared = doc.contains("nodes");
  if (declared) {
    if (!doc["nodes"].is_array()) throw Error(ErrorCode::parse_error, "\"nodes\" must be an array");
    for (const auto& v : doc["nodes"]) nodes.push_back(label_of(v, "nodes"));
  }
  std::vector<std::pair<std::string, Labels>> edges;
  for (const auto& [label, members] : doc["hyperedges"].items()) {
    if (!members.is_array())
      throw Error(ErrorCode::parse_error, "hyperedge '" + label + "' must be an array of nodes");
    if (members.empty()) throw Error(ErrorCode::parse_error, "hyperedge '" + label + "' is empty");
    Labels m;
    for (const auto& v : members) {
      m.push_back(label_of(v, "hyperedge '" + label + "'"));
      if (!declared && seen.insert(m.back()).second) nodes.push_back(m.back());
    }
    edges.emplace_back(label, std::move(m));
  }
  try {
    return CombinatorialHypergraph(std::move(nodes), edges);
  } catch (const Error& e) {
    throw Error(ErrorCode::parse_error, e.what());
  }
}

CombinatorialHypergraph parse_hypergraph_text(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  Labels nodes;
  std::set<std::string> seen;
  bool declared = false;
  std::vector<std::pair<std::string, Labels>> edges;
  std::set<std::string> edge_labels;
  auto fail = [&](const std::string& msg) {
    throw Error(ErrorCode::parse_error, "line " + std::to_string(lineno) + ": " + msg);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream words(line);
    std::string first;
    if (!(words >> first)) continue;
    if (first == "@nodes") {
      if (declared || !edges.empty()) fail("@nodes must come first and only once");
      declared = true;
      for (std::string s; words >> s;) nodes.push_back(s);
      continue;
    }
    const auto colon = line.find(':');
    if (colon == std::string::npos) fail("expected 'label: members'");
    std::istringstream head(line.substr(0, colon));
    std::string label, extra;
    if (!(head >> label) || (head >> extra)) fail("hyperedge label must be a single word");
    if (!edge_labels.insert(label).second) fail("duplicate hyperedge '" + label + "'");
    std::istringstream rest(line.substr(colon + 1));
    Labels members;
    for (std::string s; rest >> s;) {
      if (declared && std::find(nodes.begin(), nodes.end(), s) == nodes.end())
        fail("hyperedge '" + label + "' contains undeclared node '" + s + "'");
      if (!declared && seen.insert(s).second) nodes.push_back(s);
      members.push_back(s);
    }
    if (members.empty()) fail("hyperedge '" + label + "' is empty");
    edges.emplace_back(label, std::move(members));
  }
  try {
    return CombinatorialHypergraph(std::move(nodes), edges);
  } catch (const Error& e) {
    throw Error(ErrorCode::parse_error, e.what());
  }
}

CombinatorialHypergraph parse_hypergraph(const std::string& text) {
  const auto pos = text.find_first_not_of(" \t\r\n");
  if (pos != std::string::npos && text[pos] == '{') return parse_hypergraph_json(text);
  return parse_hypergraph_text(text);
}

std::string hypergraph_to_json(const CombinatorialHypergraph& g) {
  nlohmann::ordered_json doc;
  doc["nodes"] = g.nodes();
  doc["hyperedges"] = nlohmann::ordered_json::object();
  for (const auto& [label, members] : g.hyperedge_list()) doc["hyperedges"][label] = members;
  return doc.dump(2) + "\n";
}

std::string hypergraph_to_text(const CombinatorialHypergraph& g) {
  std::string out = "@nodes";
  for (const auto& s : g.nodes()) out += " " + s;
  out += "\n";
  for (const auto& [label, members] : g.hyperedge_list()) {
    out += label + ":";
    for (const auto& s : members) out += " " + s;
    out += "\n";
  }
  return out;
}

MuScheme parse_mu_scheme(const std::string& s) {
  if (s == "uniform") return MuScheme::uniform;
  if (s == "degree") return MuScheme::degree;
  throw Error(ErrorCode::invalid_argument, "unknown node measure '" + s + "' (uniform, degree)");
}

NuScheme parse_nu_scheme(const std::string& s) {
  if (s == "uniform") return NuScheme::uniform;
  if (s == "degsum" || s == "degree_sum") return NuScheme::degree_sum;
  throw Error(ErrorCode::invalid_argument, "unknown hyperedge measure '" + s + "' (uniform, degsum)");
}

OmegaScheme parse_omega_scheme(const std::string& s) {
  if (s == "incidence") return OmegaScheme::incidence;
  if (s == "jaccard" || s == "jaccard_sp") return OmegaScheme::jaccard_sp;
  if (s == "intersection" || s == "intersection_sp") return OmegaScheme::intersection_sp;
  if (s == "overlap" || s == "overlap_sp") return OmegaScheme::overlap_sp;
  throw Error(ErrorCode::invalid_argument,
              "unknown relation '" + s + "' (incidence, jaccard, intersection, overlap)");
}

LineWeight parse_line_weight(const std::string& s) {
  if (s == "jaccard") return LineWeight::jaccard;
  if (s == "intersection") return LineWeight::intersection;
  if (s == "overlap") return LineWeight::overlap;
  throw Error(ErrorCode::invalid_argument,
              "unknown line-graph weight '" + s + "' (jaccard, intersection, overlap)");
}

std::string to_string(MuScheme s) { return s == MuScheme::uniform ? "uniform" : "degree"; }
std::string to_string(NuScheme s) { return s == NuScheme::uniform ? "uniform" : "degsum"; }
std::string to_string(OmegaScheme s) {
  switch (s) {
    case OmegaScheme::incidence: return "incidence";
    case OmegaScheme::jaccard_sp: return "jaccard";
    case OmegaScheme::intersection_sp: return "intersection";
    case OmegaScheme::overlap_sp: return "overlap";
  }
  return "?";
}
std::string to_string(LineWeight s) {
  switch (s) {
    case LineWeight::intersection: return "intersection";
    case LineWeight::jaccard: return "jaccard";
    case LineWeight::overlap: return "overlap";
  }
  return "?";
}

Vector node_measure(const CombinatorialHypergraph& g, MuScheme scheme) {
  std::vector<double> raw(g.num_nodes());
  for (std::size_t x = 0; x < raw.size(); ++x) {
    raw[x] = g.node_weights()[x];
    if (scheme == MuScheme::degree) {
      const double d = g.degree(x);
      if (d == 0.0)
        throw Error(ErrorCode::invalid_measure,
                    "node '" + g.nodes()[x] + "' has degree 0, so the degree measure gives it no mass");
      raw[x] *= d;
    }
  }
  return normalized(raw);
}

Vector hyperedge_measure(const CombinatorialHypergraph& g, NuScheme scheme) {
  std::vector<double> raw(g.num_hyperedges());
  std::vector<double> deg(g.num_nodes());
  if (scheme == NuScheme::degree_sum)
    for (std::size_t x = 0; x < deg.size(); ++x) deg[x] = g.node_weights()[x] * g.degree(x);
  for (std::size_t e = 0; e < raw.size(); ++e) {
    raw[e] = g.hyperedge_weights()[e];
    if (scheme == NuScheme::degree_sum) {
      double s = 0.0;
      for (std::size_t x : g.members(e)) s += deg[x];
      raw[e] *= s;
    }
  }
  return normalized(raw);
}

MeasureNetwork weighted_line_graph(const CombinatorialHypergraph& g, LineWeight weight) {
  const auto m = static_cast<Eigen::Index>(g.num_hyperedges());
  Matrix w = Matrix::Zero(m, m);
  const auto adj = line_graph_arcs(g, weight);
  for (std::size_t a = 0; a < adj.size(); ++a)
    for (const Arc& arc : adj[a]) w(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(arc.to)) = arc.length;
  return MeasureNetwork(g.hyperedge_ids(), Vector::Constant(m, 1.0 / static_cast<double>(m)), std::move(w));
}

std::vector<std::vector<std::size_t>> line_graph_components(const CombinatorialHypergraph& g) {
  const auto adj = line_graph_arcs(g, LineWeight::overlap);
  std::vector<int> comp(adj.size(), -1);
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t s = 0; s < adj.size(); ++s) {
    if (comp[s] >= 0) continue;
    out.emplace_back();
    std::vector<std::size_t> stack{s};
    comp[s] = static_cast<int>(out.size() - 1);
    while (!stack.empty()) {
      const std::size_t u = stack.back();
      stack.pop_back();
      out.back().push_back(u);
      for (const Arc& a : adj[u])
        if (comp[a.to] < 0) {
          comp[a.to] = comp[s];
          stack.push_back(a.to);
        }
    }
    std::sort(out.back().begin(), out.back().end());
  }
  return out;
}

Matrix line_graph_distances(const CombinatorialHypergraph& g, LineWeight weight) {
  const auto adj = line_graph_arcs(g, weight);
  const std::size_t m = adj.size();
  const double inf = std::numeric_limits<double>::infinity();
  Matrix dist = Matrix::Constant(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m), inf);
  using Item = std::pair<double, std::size_t>;
  for (std::size_t s = 0; s < m; ++s) {
    std::vector<double> d(m, inf);
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    d[s] = 0.0;
    heap.push({0.0, s});
    while (!heap.empty()) {
      const auto [du, u] = heap.top();
      heap.pop();
      if (du > d[u]) continue;
      for (const Arc& a : adj[u])
        if (du + a.length < d[a.to]) {
          d[a.to] = du + a.length;
          heap.push({d[a.to], a.to});
        }
    }
    for (std::size_t t = 0; t < m; ++t) dist(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(t)) = d[t];
  }
  return dist;
}

Matrix shortest_path_relation(const CombinatorialHypergraph& g, LineWeight weight,
                              bool fill_disconnected) {
  const auto comps = line_graph_components(g);
  if (comps.size() > 1 && !fill_disconnected)
    throw Error(ErrorCode::disconnected,
                "line graph is disconnected; components: " + describe_components(g, comps));
  const Matrix dist = line_graph_distances(g, weight);
  const auto n = static_cast<Eigen::Index>(g.num_nodes());
  const auto m = static_cast<Eigen::Index>(g.num_hyperedges());
  const double inf = std::numeric_limits<double>::infinity();
  Matrix w = Matrix::Constant(n, m, inf);
  for (Eigen::Index x = 0; x < n; ++x) {
    const auto inc = g.incident(static_cast<std::size_t>(x));
    if (inc.empty() && !fill_disconnected)
      throw Error(ErrorCode::disconnected,
                  "node '" + g.nodes()[static_cast<std::size_t>(x)] + "' belongs to no hyperedge");
    for (std::size_t e : inc)
      for (Eigen::Index y = 0; y < m; ++y)
        w(x, y) = std::min(w(x, y), dist(static_cast<Eigen::Index>(e), y));
  }
  if (fill_disconnected) {
    double largest = 0.0;
    for (Eigen::Index i = 0; i < w.size(); ++i)
      if (std::isfinite(w.data()[i])) largest = std::max(largest, w.data()[i]);
    for (Eigen::Index i = 0; i < w.size(); ++i)
      if (!std::isfinite(w.data()[i])) w.data()[i] = largest + 1.0;
  }
  return w;
}

Matrix hyperedge_overlap_sp(const CombinatorialHypergraph& g, bool fill_disconnected) {
  return shortest_path_relation(g, LineWeight::overlap, fill_disconnected);
}

Matrix incidence_relation(const CombinatorialHypergraph& g) {
  Matrix w = Matrix::Zero(static_cast<Eigen::Index>(g.num_nodes()),
                          static_cast<Eigen::Index>(g.num_hyperedges()));
  for (std::size_t e = 0; e < g.num_hyperedges(); ++e)
    for (std::size_t x : g.members(e)) w(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(e)) = 1.0;
  return w;
}

MeasureHypernetwork build_hypernetwork(const CombinatorialHypergraph& g, const ModelParams& params) {
  if (g.num_hyperedges() == 0)
    throw Error(ErrorCode::invalid_argument, "hypergraph has no hyperedges");
  Matrix w;
  switch (params.omega) {
    case OmegaScheme::incidence: w = incidence_relation(g); break;
    case OmegaScheme::jaccard_sp:
      w = shortest_path_relation(g, LineWeight::jaccard, params.fill_disconnected);
      break;
    case OmegaScheme::intersection_sp:
      w = shortest_path_relation(g, LineWeight::intersection, params.fill_disconnected);
      break;
    case OmegaScheme::overlap_sp:
      w = shortest_path_relation(g, LineWeight::overlap, params.fill_disconnected);
      break;
  }
  return MeasureHypernetwork(g.nodes(), node_measure(g, params.mu), g.hyperedge_ids(),
                             hyperedge_measure(g, params.nu), std::move(w));
}

}  // namespace hnet

// SPDX-License-Identifier: Apache-2.0
#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <sstream>

#include "hnet/coot.hpp"
#include "hnet/error.hpp"
#include "hnet/graphify.hpp"
#include "hnet/gw.hpp"
#include "hnet/hypergraph.hpp"
#include "hnet/io.hpp"
#include "hnet/multiscale.hpp"
#include "hnet/simplify.hpp"

namespace hnet::cli {

namespace {

using io::Json;

struct ModelFlags {
  std::string mu = "degree";
  std::string nu = "degsum";
  std::string omega = "jaccard";
  bool fill_disconnected = false;

  ModelParams parse() const {
    ModelParams m;
    m.mu = parse_mu_scheme(mu);
    m.nu = parse_nu_scheme(nu);
    m.omega = parse_omega_scheme(omega);
    m.fill_disconnected = fill_disconnected;
    return m;
  }
};

struct DistanceFlags {
  std::string p = "2";
  std::string solver = "exact";
  std::optional<double> eps;
  int restarts = 10;
  int max_iter = 200;
  double tol = 1e-8;
  std::uint64_t seed = 0;
  unsigned threads = 0;

  DistanceParams parse() const {
    DistanceParams d;
    d.p = Order::parse(p);
    if (solver == "exact") {
      d.solver = Solver::exact;
      if (eps) throw Error(ErrorCode::invalid_argument, "--eps only applies to --solver entropic");
    } else if (solver == "entropic") {
      d.solver = Solver::entropic;
      if (eps) d.epsilon = *eps;
    } else {
      throw Error(ErrorCode::invalid_argument, "unknown solver '" + solver + "' (exact, entropic)");
    }
    d.restarts = restarts;
    d.max_iter = max_iter;
    d.tol = tol;
    d.seed = seed;
    d.threads = threads;
    d.validate();
    return d;
  }
};

void add_model_flags(CLI::App* app, ModelFlags& f) {
  app->add_option("--mu", f.mu, "Node measure: uniform | degree")->capture_default_str();
  app->add_option("--nu", f.nu, "Hyperedge measure: uniform | degsum")->capture_default_str();
  app->add_option("--omega", f.omega, "Relation: incidence | jaccard | intersection | overlap")
      ->capture_default_str();
  app->add_flag("--fill-disconnected", f.fill_disconnected,
                "Replace unreachable shortest-path entries by the largest finite entry + 1");
}

void add_distance_flags(CLI::App* app, DistanceFlags& f) {
  app->add_option("--p", f.p, "Order p >= 1, or inf")->capture_default_str();
  app->add_option("--solver", f.solver, "Inner transport solver: exact | entropic")->capture_default_str();
  app->add_option("--eps", f.eps, "Entropic regularization (entropic solver only, default 1e-3)");
  app->add_option("--restarts", f.restarts, "Number of restarts (restart 0 is the product start)")
      ->capture_default_str();
  app->add_option("--max-iter", f.max_iter, "Maximum alternation rounds per restart")->capture_default_str();
  app->add_option("--tol", f.tol, "Stop when the relative improvement is at most this")->capture_default_str();
  app->add_option("--seed", f.seed, "Seed for the random restarts")->capture_default_str();
  app->add_option("--threads", f.threads, "Worker threads (0 = hardware concurrency)")->capture_default_str();
}

void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty())
    out << text;
  else
    io::write_file(path, text);
}

Json labels_json(const Labels& l) { return Json(l); }

// For each target item, the share of its mass coming from each source item.
Json transfer_json(const Coupling& c, const Labels& source, const Labels& target) {
  Json out = Json::array();
  for (Eigen::Index j = 0; j < c.cols(); ++j) {
    const double total = c.matrix().col(j).sum();
    Json parts = Json::array();
    for (Eigen::Index i = 0; i < c.rows(); ++i) {
      const double m = c(i, j);
      if (m <= 0.0) continue;
      Json part;
      part["source"] = source[static_cast<std::size_t>(i)];
      part["mass"] = m;
      part["share"] = total > 0.0 ? m / total : 0.0;
      parts.push_back(std::move(part));
    }
    Json item;
    item["target"] = target[static_cast<std::size_t>(j)];
    item["sources"] = std::move(parts);
    out.push_back(std::move(item));
  }
  return out;
}

Json hypergraph_summary(const CombinatorialHypergraph& g) {
  Json out;
  out["nodes"] = g.nodes();
  Json edges = Json::object();
  for (std::size_t e = 0; e < g.num_hyperedges(); ++e) {
    Labels members;
    for (std::size_t x : g.members(e)) members.push_back(g.nodes()[x]);
    edges[g.hyperedge_ids()[e]] = members;
  }
  out["hyperedges"] = std::move(edges);
  out["hyperedge_weights"] = g.hyperedge_weights();
  out["node_weights"] = g.node_weights();
  return out;
}

Json sequence_json(const CoverSequence& s) {
  Json levels = Json::array();
  for (std::size_t i = 0; i < s.graphs.size(); ++i) {
    Json level;
    level["nodes"] = s.graphs[i].num_nodes();
    level["edges"] = s.graphs[i].num_edges();
    if (i < s.covers.size()) {
      level["t"] = s.t[i];
      Json cover = Json::object();
      const auto& c = s.covers[i];
      for (std::size_t e = 0; e < c.num_hyperedges(); ++e) {
        Labels members;
        for (std::size_t x : c.members(e)) members.push_back(c.nodes()[x]);
        cover[c.hyperedge_ids()[e]] = members;
      }
      level["cover"] = std::move(cover);
    }
    levels.push_back(std::move(level));
  }
  Json out;
  out["depth"] = s.depth();
  out["levels"] = std::move(levels);
  return out;
}

std::string csv_number(double x) { return io::format_number(x); }

int cmd_build(const std::string& input, const ModelFlags& mf, const std::string& out_path, std::ostream& out) {
  const ModelParams model = mf.parse();
  const auto g = parse_hypergraph(io::read_file(input));
  emit(io::dump(io::hypernetwork_json(build_hypernetwork(g, model))), out_path, out);
  return 0;
}

int cmd_dist(const std::string& a, const std::string& b, const DistanceFlags& df, bool networks, bool oracle,
             const std::string& out_path, std::ostream& out) {
  const DistanceParams params = df.parse();
  if (networks) {
    const auto na = io::parse_network(io::read_file(a));
    const auto nb = io::parse_network(io::read_file(b));
    if (na.left.has_value() != nb.left.has_value())
      throw Error(ErrorCode::invalid_argument, "either both networks carry bipartite labels or neither does");
    GwResult r;
    if (na.left) {
      const LabeledBipartiteNetwork la(na.network, *na.left), lb(nb.network, *nb.left);
      r = oracle ? labeled_gw_distance_bruteforce(la, lb, params.p) : labeled_gw_distance(la, lb, params);
    } else {
      r = oracle ? gw_distance_bruteforce(na.network, nb.network, params.p)
                 : gw_distance(na.network, nb.network, params);
    }
    emit(io::dump(io::gw_result_json(r)), out_path, out);
    return 0;
  }
  const auto ha = io::parse_hypernetwork(io::read_file(a));
  const auto hb = io::parse_hypernetwork(io::read_file(b));
  const CootResult r = oracle ? coot_distance_bruteforce(ha, hb, params.p) : coot_distance(ha, hb, params);
  emit(io::dump(io::coot_result_json(r)), out_path, out);
  return 0;
}

int cmd_match(const std::string& a, const std::string& b, const ModelFlags& mf, const DistanceFlags& df,
              const std::string& out_path, std::ostream& out) {
  const ModelParams model = mf.parse();
  const DistanceParams params = df.parse();
  const auto ga = parse_hypergraph(io::read_file(a));
  const auto gb = parse_hypergraph(io::read_file(b));
  const auto ha = build_hypernetwork(ga, model);
  const auto hb = build_hypernetwork(gb, model);
  const CootResult r = coot_distance(ha, hb, params);
  Json j = io::coot_result_json(r);
  j["node_transfer"] = transfer_json(r.pi, ha.node_ids(), hb.node_ids());
  j["hyperedge_transfer"] = transfer_json(r.xi, ha.hyperedge_ids(), hb.hyperedge_ids());
  emit(io::dump(j), out_path, out);
  return 0;
}

int cmd_graphify(const std::string& input, const std::string& map, const std::optional<std::string>& q_text,
                 const std::string& out_path, std::ostream& out) {
  const auto h = io::parse_hypernetwork(io::read_file(input));
  const bool needs_q = map == "Q" || map == "L";
  if (!needs_q && q_text) throw Error(ErrorCode::invalid_argument, "--q only applies to --map Q or L");
  const Order q = q_text ? Order::parse(*q_text) : Order(1.0);
  std::string text;
  if (map == "B")
    text = io::dump(io::network_json(bipartite_incidence(h)));
  else if (map == "Q")
    text = io::dump(io::network_json(clique_expansion(h, q)));
  else if (map == "L")
    text = io::dump(io::network_json(line_graph(h, q)));
  else if (map == "Lmp")
    text = io::dump(io::network_json(matrix_product_line_graph(h)));
  else
    throw Error(ErrorCode::invalid_argument, "unknown map '" + map + "' (B, Q, L, Lmp)");
  emit(text, out_path, out);
  return 0;
}

int cmd_simplify(const std::string& input, const std::string& mode_text, const std::string& weight_text,
                 bool no_multiplicities, bool no_distances, const ModelFlags& mf, const DistanceFlags& df,
                 const std::string& out_path, const std::string& csv_path, std::ostream& out) {
  const SimplifyMode mode = parse_simplify_mode(mode_text);
  const LineWeight weight = parse_line_weight(weight_text);
  const ModelParams model = mf.parse();
  const DistanceParams params = df.parse();
  const auto g = parse_hypergraph(io::read_file(input));
  SimplificationTrace trace = simplification_sequence(g, mode, weight, !no_multiplicities);
  if (!no_distances) distance_curve(trace, model, params);

  Json steps = Json::array();
  for (std::size_t i = 0; i < trace.steps.size(); ++i) {
    const auto& s = trace.steps[i];
    Json item;
    item["step"] = i;
    item["merge_weight"] = s.merge_weight;
    Json merged = Json::array();
    for (const auto& group : s.merged) merged.push_back(labels_json(group));
    item["merged"] = std::move(merged);
    item["hypergraph"] = hypergraph_summary(s.hypergraph);
    if (trace.has_distances) {
      item["min_distance"] = s.min_distance;
      item["restart_distances"] = s.restart_distances;
    }
    steps.push_back(std::move(item));
  }
  Json j;
  j["mode"] = to_string(trace.mode);
  j["weight"] = to_string(trace.weight);
  j["multiplicities"] = trace.multiplicities;
  j["steps"] = std::move(steps);
  if (trace.has_distances && trace.steps.size() >= 3) {
    Json ranked = Json::array();
    for (const auto& c : trace.elbow.ranked) {
      Json item;
      item["step"] = c.step;
      item["score"] = c.score;
      ranked.push_back(std::move(item));
    }
    j["elbow"]["ranked"] = std::move(ranked);
    j["elbow"]["no_elbow"] = trace.elbow.no_elbow;
  }
  emit(io::dump(j), out_path, out);

  if (!csv_path.empty()) {
    std::ostringstream csv;
    csv << "step,merge_weight";
    if (trace.has_distances) {
      csv << ",min_distance,n_restarts";
      for (int r = 0; r < params.restarts; ++r) csv << ",restart_" << r;
    }
    csv << "\n";
    for (std::size_t i = 0; i < trace.steps.size(); ++i) {
      const auto& s = trace.steps[i];
      csv << i << "," << csv_number(s.merge_weight);
      if (trace.has_distances) {
        csv << "," << csv_number(s.min_distance) << "," << s.restart_distances.size();
        for (double d : s.restart_distances) csv << "," << csv_number(d);
      }
      csv << "\n";
    }
    io::write_file(csv_path, csv.str());
  }
  return 0;
}

std::vector<std::size_t> parse_truth(const std::string& text, const SimpleGraph& source, const SimpleGraph& target) {
  std::vector<std::optional<std::size_t>> map(source.num_nodes());
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string a, b, extra;
    if (!(fields >> a)) continue;
    if (!(fields >> b) || (fields >> extra))
      throw Error(ErrorCode::parse_error, "truth line " + std::to_string(lineno) + ": expected 'source target'");
    try {
      map[source.index_of(a)] = target.index_of(b);
    } catch (const Error& e) {
      throw Error(ErrorCode::parse_error, "truth line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < map.size(); ++i) {
    if (!map[i]) throw Error(ErrorCode::parse_error, "truth map is missing node '" + source.nodes()[i] + "'");
    out.push_back(*map[i]);
  }
  return out;
}

int cmd_multiscale(const std::string& a, const std::string& b, std::size_t n_alpha,
                   const std::optional<double>& t_override, const std::optional<std::string>& truth_path,
                   const ModelFlags& mf, const DistanceFlags& df, bool diagonal, const std::string& out_path,
                   const std::string& tsv_path, std::ostream& out) {
  const ModelParams model = mf.parse();
  const DistanceParams params = df.parse();
  if (params.p.is_infinite()) throw Error(ErrorCode::invalid_argument, "multiscale matching needs a finite --p");
  if (n_alpha < 1) throw Error(ErrorCode::invalid_argument, "--n-alpha must be at least 1");
  if (t_override && !(*t_override > 0.0)) throw Error(ErrorCode::invalid_argument, "--t-override must be positive");
  const auto ga = parse_graph(io::read_file(a));
  const auto gb = parse_graph(io::read_file(b));
  const auto sa = iterated_nerve(ga, n_alpha, t_override);
  const auto sb = iterated_nerve(gb, n_alpha, t_override);
  MultiscaleOptions opt;
  opt.diagonal_start = diagonal;
  const auto m = multiscale_match(sa, sb, model, params, opt);
  const HardMatch hm = hard_match(m.pi(0));

  Json j;
  j["sequences"] = Json::array({sequence_json(sa), sequence_json(sb)});
  Json match;
  match["total_objective"] = m.total_objective;
  match["level_costs"] = m.level_costs;
  match["objectives"] = m.objectives;
  match["best_restart"] = m.best_restart;
  match["padded"] = Json::array({m.padded_a, m.padded_b});
  Json interfaces = Json::array();
  for (const auto& c : m.interfaces) interfaces.push_back(io::coupling_json(c));
  match["interfaces"] = std::move(interfaces);
  match["restarts"] = io::restarts_json(m.per_restart);
  j["match"] = std::move(match);
  Json pairs = Json::array();
  for (std::size_t x = 0; x < hm.target.size(); ++x) {
    Json item;
    item["source"] = ga.nodes()[x];
    item["target"] = gb.nodes()[hm.target[x]];
    item["mass"] = hm.mass[x];
    item["ambiguous"] = static_cast<bool>(hm.ambiguous[x]);
    pairs.push_back(std::move(item));
  }
  j["hard_match"] = std::move(pairs);
  if (truth_path) {
    const auto truth = parse_truth(io::read_file(*truth_path), ga, gb);
    const MatchAccuracy acc = match_accuracy(hm.target, truth, gb);
    j["accuracy"]["exact_rate"] = acc.exact_rate;
    j["accuracy"]["mean_graph_distance"] = acc.mean_graph_distance;
    j["accuracy"]["unreachable"] = acc.unreachable;
  }
  emit(io::dump(j), out_path, out);
  if (!tsv_path.empty()) {
    std::ostringstream tsv;
    tsv << "source\ttarget\tmass\n";
    for (std::size_t x = 0; x < hm.target.size(); ++x)
      tsv << ga.nodes()[x] << "\t" << gb.nodes()[hm.target[x]] << "\t" << io::format_number(hm.mass[x]) << "\n";
    io::write_file(tsv_path, tsv.str());
  }
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Measure hypernetwork distances, graphification maps and matching pipelines", "hnet"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "hnet 1.0");

  ModelFlags mf;
  DistanceFlags df;
  std::string out_path;
  std::string in_a, in_b;

  auto* build = app.add_subcommand("build", "Hypergraph file -> hypernetwork JSON");
  build->add_option("hypergraph", in_a, "Hypergraph (text or JSON)")->required()->check(CLI::ExistingFile);
  add_model_flags(build, mf);
  build->add_option("--out", out_path, "Write here instead of stdout");

  bool networks = false, oracle = false;
  auto* dist = app.add_subcommand("dist", "Distance between two hypernetwork (or network) JSON files");
  dist->add_option("first", in_a, "First input")->required()->check(CLI::ExistingFile);
  dist->add_option("second", in_b, "Second input")->required()->check(CLI::ExistingFile);
  dist->add_flag("--network", networks, "Inputs are networks; compute the (labeled) network distance");
  dist->add_flag("--oracle", oracle, "Use the enumeration oracle (small inputs, finite p)");
  add_distance_flags(dist, df);
  dist->add_option("--out", out_path, "Write here instead of stdout");

  auto* match = app.add_subcommand("match", "Match two hypergraph files");
  match->add_option("first", in_a, "First hypergraph")->required()->check(CLI::ExistingFile);
  match->add_option("second", in_b, "Second hypergraph")->required()->check(CLI::ExistingFile);
  add_model_flags(match, mf);
  add_distance_flags(match, df);
  match->add_option("--out", out_path, "Write here instead of stdout");

  std::string map = "B";
  std::optional<std::string> q_text;
  auto* graphify = app.add_subcommand("graphify", "Hypernetwork JSON -> network JSON");
  graphify->add_option("hypernetwork", in_a, "Hypernetwork JSON")->required()->check(CLI::ExistingFile);
  graphify->add_option("--map", map, "B (bipartite) | Q (clique expansion) | L (line graph) | Lmp (matrix product)")
      ->capture_default_str();
  graphify->add_option("--q", q_text, "Order q of the Q and L maps (default 1; inf allowed)");
  graphify->add_option("--out", out_path, "Write here instead of stdout");

  std::string mode = "hyperedge", weight = "jaccard", csv_path;
  bool no_mult = false, no_dist = false;
  auto* simplify = app.add_subcommand("simplify", "Simplification levels, distance curve and elbow");
  simplify->add_option("hypergraph", in_a, "Hypergraph (text or JSON)")->required()->check(CLI::ExistingFile);
  simplify->add_option("--mode", mode, "hyperedge | node")->capture_default_str();
  simplify->add_option("--weight", weight, "Line graph weight: jaccard | intersection | overlap")
      ->capture_default_str();
  simplify->add_flag("--no-multiplicities", no_mult, "Count merged items once in the measures");
  simplify->add_flag("--no-distances", no_dist, "Only compute the levels");
  add_model_flags(simplify, mf);
  add_distance_flags(simplify, df);
  simplify->add_option("--out", out_path, "Trace JSON path instead of stdout");
  simplify->add_option("--csv", csv_path, "Also write the distance curve as CSV");

  std::size_t n_alpha = 10;
  std::optional<double> t_override;
  std::optional<std::string> truth;
  std::string tsv_path;
  bool diagonal = false;
  auto* multi = app.add_subcommand("multiscale", "Iterated nerve covers and multiscale matching of two graphs");
  multi->add_option("first", in_a, "First graph (edge list or JSON)")->required()->check(CLI::ExistingFile);
  multi->add_option("second", in_b, "Second graph (edge list or JSON)")->required()->check(CLI::ExistingFile);
  multi->add_option("--n-alpha", n_alpha, "Stop reducing below this many nodes")->capture_default_str();
  multi->add_option("--t-override", t_override, "Diffusion time for every level (default log10 |V|)");
  multi->add_option("--truth", truth, "Ground truth 'source target' lines; adds an accuracy report")
      ->check(CLI::ExistingFile);
  multi->add_flag("--diagonal-start", diagonal, "Start restart 0 from diagonal couplings");
  add_model_flags(multi, mf);
  add_distance_flags(multi, df);
  multi->add_option("--out", out_path, "Result JSON path instead of stdout");
  multi->add_option("--tsv", tsv_path, "Also write the hard matching as TSV");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << app.version() << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error[usage]: " << e.what() << "\n";
    return 2;
  }

  try {
    if (*build) return cmd_build(in_a, mf, out_path, out);
    if (*dist) return cmd_dist(in_a, in_b, df, networks, oracle, out_path, out);
    if (*match) return cmd_match(in_a, in_b, mf, df, out_path, out);
    if (*graphify) return cmd_graphify(in_a, map, q_text, out_path, out);
    if (*simplify)
      return cmd_simplify(in_a, mode, weight, no_mult, no_dist, mf, df, out_path, csv_path, out);
    if (*multi)
      return cmd_multiscale(in_a, in_b, n_alpha, t_override, truth, mf, df, diagonal, out_path, tsv_path, out);
  } catch (const Error& e) {
    err << "error[" << error_code_name(e.code()) << "]: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error[internal]: " << e.what() << "\n";
    return 1;
  }
  err << "error[usage]: no subcommand\n";
  return 2;
}

}  // namespace hnet::cli

// SPDX-License-Identifier: Apache-2.0
#include "hnet/multiscale.hpp"

#include <algorithm>
#include <armadillo>
#include <cmath>
#include <limits>
#include <optional>
#include <random>

#include "hnet/error.hpp"
#include "hnet/ot.hpp"
#include "parallel.hpp"
#include "seeding.hpp"

namespace hnet {

namespace {

Vector weighted_degrees(const SimpleGraph& g) {
  Vector d = Vector::Zero(static_cast<Eigen::Index>(g.num_nodes()));
  for (const auto& e : g.edges()) {
    d[static_cast<Eigen::Index>(e.a)] += e.weight;
    d[static_cast<Eigen::Index>(e.b)] += e.weight;
  }
  return d;
}

}  // namespace

Matrix normalized_laplacian(const SimpleGraph& g) {
  const auto n = static_cast<Eigen::Index>(g.num_nodes());
  const Vector d = weighted_degrees(g);
  Matrix l = Matrix::Identity(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    if (d[i] == 0.0) l(i, i) = 0.0;
  for (const auto& e : g.edges()) {
    const auto a = static_cast<Eigen::Index>(e.a);
    const auto b = static_cast<Eigen::Index>(e.b);
    const double v = -e.weight / std::sqrt(d[a] * d[b]);
    l(a, b) = v;
    l(b, a) = v;
  }
  return l;
}

HeatKernel::HeatKernel(const SimpleGraph& g, std::size_t budget, std::size_t full_limit) {
  const std::size_t n = g.num_nodes();
  if (n == 0) throw Error(ErrorCode::invalid_argument, "heat kernel of an empty graph");
  if (n <= full_limit || budget + 1 >= n) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(normalized_laplacian(g));
    if (eig.info() != Eigen::Success) throw Error(ErrorCode::not_converged, "Laplacian eigensolve failed");
    phi_ = eig.eigenvectors();
    lambda_ = eig.eigenvalues();
    return;
  }
  // Largest eigenvalues of D^{-1/2} W D^{-1/2} are 1 - (smallest of L).
  const Vector d = weighted_degrees(g);
  arma::umat locations(2, 2 * g.num_edges());
  arma::vec values(2 * g.num_edges());
  arma::uword k = 0;
  for (const auto& e : g.edges()) {
    const double v = e.weight / std::sqrt(d[static_cast<Eigen::Index>(e.a)] * d[static_cast<Eigen::Index>(e.b)]);
    locations(0, k) = e.a;
    locations(1, k) = e.b;
    values(k++) = v;
    locations(0, k) = e.b;
    locations(1, k) = e.a;
    values(k++) = v;
  }
  const arma::sp_mat adj(locations, values, n, n);
  arma::vec theta;
  arma::mat vecs;
  if (!arma::eigs_sym(theta, vecs, adj, budget, "la"))
    throw Error(ErrorCode::not_converged, "truncated Laplacian eigensolve failed");
  phi_.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(theta.n_elem));
  lambda_.resize(static_cast<Eigen::Index>(theta.n_elem));
  for (arma::uword j = 0; j < theta.n_elem; ++j) {
    lambda_[static_cast<Eigen::Index>(j)] = 1.0 - theta(j);
    for (arma::uword i = 0; i < n; ++i) phi_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = vecs(i, j);
  }
  truncated_ = true;
}

Vector HeatKernel::diffuse(std::size_t source, double t) const {
  if (source >= static_cast<std::size_t>(phi_.rows()))
    throw Error(ErrorCode::invalid_argument, "diffusion source out of range");
  const Vector coeff =
      (-t * lambda_.array()).exp().matrix().cwiseProduct(phi_.row(static_cast<Eigen::Index>(source)).transpose());
  return phi_ * coeff;
}

HeatCover heat_kernel_cover(const SimpleGraph& g, double t, const CoverOptions& options) {
  if (!(t > 0.0) || !std::isfinite(t))
    throw Error(ErrorCode::invalid_argument, "diffusion time must be positive, got " + std::to_string(t));
  require_connected(g, "heat_kernel_cover");
  const std::size_t n = g.num_nodes();
  const HeatKernel kernel(g, options.eig_budget, options.full_limit);

  std::vector<std::size_t> by_label(n);
  for (std::size_t i = 0; i < n; ++i) by_label[i] = i;
  std::sort(by_label.begin(), by_label.end(),
            [&](std::size_t a, std::size_t b) { return label_less(g.nodes()[a], g.nodes()[b]); });
  std::optional<std::mt19937_64> rng;
  if (options.random_seed) rng.emplace(*options.random_seed);

  std::vector<bool> visited(n, false);
  std::size_t remaining = n;
  std::vector<std::vector<std::size_t>> elements;
  std::vector<std::size_t> seeds;
  while (remaining > 0) {
    std::size_t x = n;
    if (rng) {
      std::uniform_int_distribution<std::size_t> pick(0, remaining - 1);
      std::size_t k = pick(*rng);
      for (std::size_t i : by_label)
        if (!visited[i] && k-- == 0) {
          x = i;
          break;
        }
    } else {
      for (std::size_t i : by_label)
        if (!visited[i]) {
          x = i;
          break;
        }
    }
    const Vector v = kernel.diffuse(x, t);
    const double peak = v.maxCoeff();
    // Relative slack so that ties broken only by round-off count as equal.
    const double slack = 1e-12 * std::abs(peak);
    std::vector<std::size_t> element;
    for (std::size_t i = 0; i < n; ++i) {
      const double vi = v[static_cast<Eigen::Index>(i)];
      if (vi >= peak / 2 - slack && !visited[i]) {
        visited[i] = true;
        --remaining;
      }
      if (vi >= peak / 4 - slack) element.push_back(i);
    }
    // The seed always counts as visited and covered, so the loop terminates.
    if (!visited[x]) {
      visited[x] = true;
      --remaining;
    }
    if (!std::binary_search(element.begin(), element.end(), x))
      element.insert(std::lower_bound(element.begin(), element.end(), x), x);
    elements.push_back(std::move(element));
    seeds.push_back(x);
  }

  Labels names;
  std::vector<std::pair<std::string, Labels>> hyperedges;
  for (std::size_t k = 0; k < elements.size(); ++k) {
    names.push_back(options.label_prefix + std::to_string(k));
    Labels members;
    for (std::size_t i : elements[k]) members.push_back(g.nodes()[i]);
    hyperedges.emplace_back(names.back(), std::move(members));
  }
  std::vector<GraphEdge> nerve_edges;
  for (std::size_t a = 0; a < elements.size(); ++a)
    for (std::size_t b = a + 1; b < elements.size(); ++b) {
      std::vector<std::size_t> common;
      std::set_intersection(elements[a].begin(), elements[a].end(), elements[b].begin(), elements[b].end(),
                            std::back_inserter(common));
      if (!common.empty()) nerve_edges.push_back({a, b, 1.0});
    }
  return HeatCover{std::move(elements), std::move(seeds), SimpleGraph(names, std::move(nerve_edges)),
                   CombinatorialHypergraph(g.nodes(), hyperedges)};
}

CoverSequence iterated_nerve(const SimpleGraph& g, std::size_t n_alpha, std::optional<double> t_override,
                             const CoverOptions& options) {
  if (n_alpha < 1) throw Error(ErrorCode::invalid_argument, "n_alpha must be at least 1");
  require_connected(g, "iterated_nerve");
  CoverSequence seq;
  seq.graphs.push_back(g);
  while (seq.graphs.back().num_nodes() >= n_alpha && seq.graphs.back().num_nodes() > 1) {
    const SimpleGraph& cur = seq.graphs.back();
    const double t = t_override ? *t_override : std::log10(static_cast<double>(cur.num_nodes()));
    CoverOptions level = options;
    level.label_prefix = std::to_string(seq.covers.size() + 1) + ".";
    HeatCover cover = [&] {
      try {
        return heat_kernel_cover(cur, t, level);
      } catch (const Error& e) {
        rethrow_with_context(e, "level " + std::to_string(seq.covers.size()));
      }
    }();
    // A nerve that does not shrink ends the reduction, and so does a
    // disconnected one: its cover has no shortest-path relation.
    if (cover.nerve.num_nodes() >= cur.num_nodes() || !cover.nerve.connected()) break;
    seq.covers.push_back(std::move(cover.hypergraph));
    seq.t.push_back(t);
    seq.graphs.push_back(std::move(cover.nerve));
  }
  return seq;
}

void pad_sequence(CoverSequence& seq, std::size_t depth) {
  while (seq.depth() < depth) {
    const SimpleGraph& last = seq.graphs.back();
    const std::string label = "pad" + std::to_string(seq.depth() + 1);
    seq.covers.push_back(CombinatorialHypergraph(last.nodes(), {{label, last.nodes()}}));
    seq.t.push_back(0.0);
    seq.graphs.push_back(SimpleGraph(Labels{label}, std::vector<GraphEdge>{}));
    ++seq.padded;
  }
}

std::vector<MeasureHypernetwork> level_hypernetworks(const CoverSequence& seq, const ModelParams& model) {
  std::vector<MeasureHypernetwork> out;
  for (std::size_t i = 0; i < seq.covers.size(); ++i) {
    try {
      const MeasureHypernetwork h = build_hypernetwork(seq.covers[i], model);
      if (i == 0) {
        out.push_back(h);
      } else {
        out.emplace_back(h.node_ids(), out.back().nu(), h.hyperedge_ids(), h.nu(), h.omega());
      }
    } catch (const Error& e) {
      rethrow_with_context(e, "level " + std::to_string(i));
    }
  }
  return out;
}

namespace {

double finite_p(Order p) {
  if (p.is_infinite()) throw Error(ErrorCode::invalid_argument, "multiscale matching requires a finite order");
  return p.value();
}

void check_chain(const std::vector<MeasureHypernetwork>& levels, const char* side) {
  if (levels.empty()) throw Error(ErrorCode::invalid_argument, std::string(side) + " has no levels");
  for (std::size_t i = 0; i + 1 < levels.size(); ++i) {
    if (levels[i].nu().size() != levels[i + 1].mu().size())
      throw Error(ErrorCode::dimension_mismatch, std::string(side) + " level " + std::to_string(i) +
                                                     " has " + std::to_string(levels[i].nu().size()) +
                                                     " hyperedges but level " + std::to_string(i + 1) + " has " +
                                                     std::to_string(levels[i + 1].mu().size()) + " nodes");
    if ((levels[i].nu() - levels[i + 1].mu()).cwiseAbs().maxCoeff() > 1e-12)
      throw Error(ErrorCode::invalid_measure, std::string(side) + " level " + std::to_string(i + 1) +
                                                  " node measure differs from level " + std::to_string(i) +
                                                  " hyperedge measure");
  }
}

const Vector& interface_marginal(const std::vector<MeasureHypernetwork>& levels, std::size_t j) {
  return j == 0 ? levels[0].mu() : levels[j - 1].nu();
}

Matrix interface_relation(const std::vector<MeasureHypernetwork>& levels, std::size_t j) {
  return j == 0 ? levels[0].omega() : Matrix(levels[j - 1].omega().transpose());
}

struct ChainRun {
  std::vector<Coupling> interfaces;
  RestartRecord record;
};

}  // namespace

std::vector<double> multiscale_level_costs(const std::vector<MeasureHypernetwork>& a,
                                           const std::vector<MeasureHypernetwork>& b,
                                           const std::vector<Coupling>& interfaces, Order p) {
  const double pv = finite_p(p);
  if (a.size() != b.size() || interfaces.size() != a.size() + 1)
    throw Error(ErrorCode::dimension_mismatch, "level and interface counts do not line up");
  std::vector<double> out;
  for (std::size_t i = 0; i < a.size(); ++i)
    out.push_back(detail::frobenius_dot(
        detail::cost_for_second(a[i].omega(), b[i].omega(), interfaces[i].matrix(), pv),
        interfaces[i + 1].matrix()));
  return out;
}

MultiscaleMatch multiscale_match_levels(const std::vector<MeasureHypernetwork>& a,
                                        const std::vector<MeasureHypernetwork>& b,
                                        const DistanceParams& params, const MultiscaleOptions& options) {
  params.validate();
  const double p = finite_p(params.p);
  check_chain(a, "first sequence");
  check_chain(b, "second sequence");
  if (a.size() != b.size())
    throw Error(ErrorCode::dimension_mismatch, "sequences have different depths (" + std::to_string(a.size()) +
                                                   " and " + std::to_string(b.size()) + ")");
  const std::size_t levels = a.size();
  const std::size_t blocks = levels + 1;

  auto total = [&](const std::vector<Coupling>& s) {
    ExactSum sum;
    for (double c : multiscale_level_costs(a, b, s, params.p)) sum.add(c);
    return sum.value();
  };
  auto solve = [&](const OtProblem& prob) {
    return params.solver == Solver::entropic ? solve_entropic(prob, params.epsilon) : solve_exact(prob);
  };
  // Block j enters level j - 1 as its hyperedge coupling and level j as its
  // node coupling; its cost is the sum of both linear terms.
  auto update = [&](std::vector<Coupling>& s, std::size_t j) {
    const Vector& ra = interface_marginal(a, j);
    const Vector& rb = interface_marginal(b, j);
    Matrix cost = Matrix::Zero(ra.size(), rb.size());
    if (j >= 1) cost += detail::cost_for_second(a[j - 1].omega(), b[j - 1].omega(), s[j - 1].matrix(), p);
    if (j < levels) cost += detail::cost_for_first(a[j].omega(), b[j].omega(), s[j + 1].matrix(), p);
    s[j] = solve({ra, rb, std::move(cost)}).plan;
  };

  const auto restarts = static_cast<std::size_t>(params.restarts);
  std::vector<std::optional<ChainRun>> runs(restarts);
  detail::parallel_for(restarts, params.threads, [&](std::size_t r) {
    try {
      std::vector<Coupling> s;
      for (std::size_t j = 0; j < blocks; ++j) {
        const Vector& ra = interface_marginal(a, j);
        const Vector& rb = interface_marginal(b, j);
        if (r == 0 && options.diagonal_start) {
          if (ra.size() != rb.size() || ra != rb)
            throw Error(ErrorCode::invalid_argument,
                        "diagonal start needs equal marginals at interface " + std::to_string(j));
          s.push_back(Coupling::diagonal(ra));
        } else if (r == 0) {
          s.push_back(Coupling::product(ra, rb));
        } else {
          s.push_back(detail::seeded_start(ra, rb, detail::side_key(ra, interface_relation(a, j)),
                                           detail::side_key(rb, interface_relation(b, j)), params.seed ^ j, r));
        }
      }
      RestartRecord rec;
      rec.trace.push_back(total(s));
      double prev = rec.trace.back();
      for (int it = 1; it <= params.max_iter; ++it) {
        for (std::size_t j = 1; j < blocks; ++j) update(s, j);
        for (std::size_t j = blocks - 1; j-- > 0;) update(s, j);
        const double cur = total(s);
        rec.trace.push_back(cur);
        rec.iterations = it;
        if (prev - cur <= params.tol * std::abs(prev)) {
          rec.converged = true;
          break;
        }
        prev = cur;
      }
      rec.objective = rec.trace.back();
      runs[r] = ChainRun{std::move(s), std::move(rec)};
    } catch (const Error& e) {
      rethrow_with_context(e, "restart " + std::to_string(r));
    }
  });

  std::size_t best = 0;
  for (std::size_t r = 1; r < restarts; ++r)
    if (runs[r]->record.objective < runs[best]->record.objective) best = r;

  MultiscaleMatch out;
  out.interfaces = runs[best]->interfaces;
  out.level_costs = multiscale_level_costs(a, b, out.interfaces, params.p);
  out.total_objective = runs[best]->record.objective;
  out.objectives = runs[best]->record.trace;
  out.best_restart = static_cast<int>(best);
  out.params = params;
  for (auto& run : runs) out.per_restart.push_back(std::move(run->record));
  return out;
}

MultiscaleMatch multiscale_match(const CoverSequence& a, const CoverSequence& b, const ModelParams& model,
                                 const DistanceParams& params, const MultiscaleOptions& options) {
  CoverSequence pa = a;
  CoverSequence pb = b;
  const std::size_t depth = std::max<std::size_t>({a.depth(), b.depth(), 1});
  pad_sequence(pa, depth);
  pad_sequence(pb, depth);
  MultiscaleMatch out = multiscale_match_levels(level_hypernetworks(pa, model), level_hypernetworks(pb, model),
                                                params, options);
  out.padded_a = pa.padded;
  out.padded_b = pb.padded;
  return out;
}

HardMatch hard_match(const Matrix& pi) {
  HardMatch out;
  for (Eigen::Index i = 0; i < pi.rows(); ++i) {
    Eigen::Index best = 0;
    for (Eigen::Index j = 1; j < pi.cols(); ++j)
      if (pi(i, j) > pi(i, best)) best = j;
    bool tie = false;
    for (Eigen::Index j = 0; j < pi.cols(); ++j)
      if (j != best && pi(i, j) == pi(i, best)) tie = true;
    out.target.push_back(static_cast<std::size_t>(best));
    out.mass.push_back(pi.cols() > 0 ? pi(i, best) : 0.0);
    out.ambiguous.push_back(tie);
  }
  return out;
}

MatchAccuracy match_accuracy(const std::vector<std::size_t>& match, const std::vector<std::size_t>& truth,
                             const SimpleGraph& g) {
  if (match.size() != truth.size())
    throw Error(ErrorCode::dimension_mismatch, "match and truth have different lengths");
  const std::size_t n = g.num_nodes();
  for (std::size_t k = 0; k < match.size(); ++k)
    if (match[k] >= n || truth[k] >= n) throw Error(ErrorCode::invalid_argument, "match target out of range");
  MatchAccuracy out;
  if (match.empty()) return out;
  std::optional<int> diameter;
  auto diam = [&] {
    if (!diameter) {
      int d = 0;
      for (std::size_t s = 0; s < n; ++s)
        for (int x : bfs_distances(g, s)) d = std::max(d, x);
      diameter = d;
    }
    return *diameter;
  };
  std::size_t exact = 0;
  double total = 0.0;
  for (std::size_t k = 0; k < match.size(); ++k) {
    if (match[k] == truth[k]) {
      ++exact;
      continue;
    }
    const int d = bfs_distances(g, truth[k])[match[k]];
    if (d < 0) {
      ++out.unreachable;
      total += diam() + 1;
    } else {
      total += d;
    }
  }
  out.exact_rate = static_cast<double>(exact) / static_cast<double>(match.size());
  out.mean_graph_distance = total / static_cast<double>(match.size());
  return out;
}

}  // namespace hnet

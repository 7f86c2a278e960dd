// SPDX-License-Identifier: Apache-2.0
#include "hnet/coot.hpp"

#include <cmath>
#include <limits>
#include <optional>

#include "hnet/error.hpp"
#include "hnet/polytope.hpp"
#include "parallel.hpp"
#include "seeding.hpp"

namespace hnet {

namespace detail {

Matrix cost_for_second(const Matrix& w1, const Matrix& w2, const Matrix& plan, double p) {
  if (plan.rows() != w1.rows() || plan.cols() != w2.rows())
    throw Error(ErrorCode::dimension_mismatch, "coupling shape does not match the relations");
  if (p == 2.0) {
    const Vector r = plan.rowwise().sum();
    const Vector c = plan.colwise().sum().transpose();
    const Vector left = w1.array().square().matrix().transpose() * r;
    const Vector right = w2.array().square().matrix().transpose() * c;
    Matrix m = -2.0 * (w1.transpose() * plan * w2);
    m.colwise() += left;
    m.rowwise() += right.transpose();
    return m;
  }
  Matrix m = Matrix::Zero(w1.cols(), w2.cols());
  for (Eigen::Index x = 0; x < w1.rows(); ++x)
    for (Eigen::Index xp = 0; xp < w2.rows(); ++xp) {
      const double mass = plan(x, xp);
      if (mass == 0.0) continue;
      for (Eigen::Index y = 0; y < w1.cols(); ++y)
        for (Eigen::Index yp = 0; yp < w2.cols(); ++yp)
          m(y, yp) += std::pow(std::abs(w1(x, y) - w2(xp, yp)), p) * mass;
    }
  return m;
}

Matrix cost_for_first(const Matrix& w1, const Matrix& w2, const Matrix& plan, double p) {
  return cost_for_second(w1.transpose(), w2.transpose(), plan, p);
}

double frobenius_dot(const Matrix& a, const Matrix& b) {
  ExactSum s;
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      if (b(i, j) != 0.0) s.add(a(i, j) * b(i, j));
  return s.value();
}

}  // namespace detail

namespace {

double finite_order(Order p, const char* what) {
  if (p.is_infinite())
    throw Error(ErrorCode::invalid_argument, std::string(what) + " requires a finite order");
  return p.value();
}

}  // namespace

Matrix coot_cost_matrix_for_xi(const MeasureHypernetwork& h1, const MeasureHypernetwork& h2,
                               const Coupling& pi, Order p) {
  require_couples(pi, h1.mu(), h2.mu(), "coot_cost_matrix_for_xi");
  return detail::cost_for_second(h1.omega(), h2.omega(), pi.matrix(),
                                 finite_order(p, "coot_cost_matrix_for_xi"));
}

Matrix coot_cost_matrix_for_pi(const MeasureHypernetwork& h1, const MeasureHypernetwork& h2,
                               const Coupling& xi, Order p) {
  require_couples(xi, h1.nu(), h2.nu(), "coot_cost_matrix_for_pi");
  return detail::cost_for_first(h1.omega(), h2.omega(), xi.matrix(),
                                finite_order(p, "coot_cost_matrix_for_pi"));
}

Coupling random_coupling(const Vector& a, const Vector& b, std::mt19937_64& rng) {
  std::exponential_distribution<double> exp1(1.0);
  Matrix k(a.size(), b.size());
  for (Eigen::Index i = 0; i < k.rows(); ++i)
    for (Eigen::Index j = 0; j < k.cols(); ++j) k(i, j) = exp1(rng);
  for (int it = 0; it < 100; ++it) {
    k = (a.cwiseQuotient(k.rowwise().sum())).asDiagonal() * k;
    k = k * (b.cwiseQuotient(k.colwise().sum().transpose())).asDiagonal();
  }
  return Coupling(round_to_marginals(std::move(k), a, b), a, b);
}

OtSolution solve_ot(const OtProblem& prob, const DistanceParams& params) {
  if (params.solver == Solver::entropic) return solve_entropic(prob, params.epsilon);
  return solve_exact(prob);
}

BcdOutcome coot_bcd(const MeasureHypernetwork& h1, const MeasureHypernetwork& h2,
                    const Coupling& pi0, const Coupling& xi0, const DistanceParams& params,
                    bool nodes_first) {
  require_couples(pi0, h1.mu(), h2.mu(), "initial node coupling");
  require_couples(xi0, h1.nu(), h2.nu(), "initial hyperedge coupling");
  const double p = params.p.is_infinite() ? 2.0 : params.p.value();
  const Matrix& w1 = h1.omega();
  const Matrix& w2 = h2.omega();

  Coupling pi = pi0;
  Coupling xi = xi0;
  auto update_xi = [&] {
    OtSolution s = solve_ot({h1.nu(), h2.nu(), detail::cost_for_second(w1, w2, pi.matrix(), p)},
                            params);
    xi = std::move(s.plan);
    return s.objective;
  };
  auto update_pi = [&] {
    OtSolution s = solve_ot({h1.mu(), h2.mu(), detail::cost_for_first(w1, w2, xi.matrix(), p)},
                            params);
    pi = std::move(s.plan);
    return s.objective;
  };

  RestartRecord rec;
  rec.trace.push_back(detail::frobenius_dot(detail::cost_for_second(w1, w2, pi.matrix(), p),
                                            xi.matrix()));
  double prev = rec.trace.back();
  for (int it = 1; it <= params.max_iter; ++it) {
    rec.trace.push_back(nodes_first ? update_pi() : update_xi());
    rec.trace.push_back(nodes_first ? update_xi() : update_pi());
    rec.iterations = it;
    const double cur = rec.trace.back();
    if (prev - cur <= params.tol * std::abs(prev)) {
      rec.converged = true;
      break;
    }
    prev = cur;
  }
  rec.objective = params.p.is_infinite() ? coot_distortion(h1, h2, pi, xi, params.p)
                                         : rec.trace.back();
  return BcdOutcome{std::move(pi), std::move(xi), std::move(rec)};
}


CootResult coot_distance(const MeasureHypernetwork& h1, const MeasureHypernetwork& h2,
                         const DistanceParams& params) {
  params.validate();
  const Matrix w1t = h1.omega().transpose();
  const Matrix w2t = h2.omega().transpose();
  const auto restarts = static_cast<std::size_t>(params.restarts);
  std::vector<std::optional<BcdOutcome>> runs(restarts);
  detail::parallel_for(restarts, params.threads, [&](std::size_t r) {
    try {
      Coupling pi0 = Coupling::product(h1.mu(), h2.mu());
      Coupling xi0 = Coupling::product(h1.nu(), h2.nu());
      if (r > 0) {
        const std::uint64_t seed = params.seed;
        pi0 = detail::seeded_start(h1.mu(), h2.mu(), detail::side_key(h1.mu(), h1.omega()),
                                   detail::side_key(h2.mu(), h2.omega()), seed, r);
        xi0 = detail::seeded_start(h1.nu(), h2.nu(), detail::side_key(h1.nu(), w1t),
                                   detail::side_key(h2.nu(), w2t), seed, r);
      }
      // Both alternation orders: the pair is mapped onto itself by dualization.
      BcdOutcome from_nodes = coot_bcd(h1, h2, pi0, xi0, params, false);
      BcdOutcome from_edges = coot_bcd(h1, h2, pi0, xi0, params, true);
      if (from_edges.record.objective < from_nodes.record.objective)
        runs[r] = std::move(from_edges);
      else
        runs[r] = std::move(from_nodes);
    } catch (const Error& e) {
      rethrow_with_context(e, "restart " + std::to_string(r));
    }
  });

  std::size_t best = 0;
  for (std::size_t r = 1; r < restarts; ++r)
    if (runs[r]->record.objective < runs[best]->record.objective) best = r;

  CootResult out;
  out.pi = runs[best]->pi;
  out.xi = runs[best]->xi;
  out.distance = coot_distortion(h1, h2, out.pi, out.xi, params.p);
  out.params = params;
  out.best_restart = static_cast<int>(best);
  out.certified_local = !params.p.is_infinite() && params.solver == Solver::exact;
  for (auto& run : runs) out.per_restart.push_back(std::move(run->record));
  return out;
}

CootResult coot_distance_bruteforce(const MeasureHypernetwork& h1, const MeasureHypernetwork& h2,
                                    Order p) {
  const double pv = finite_order(p, "coot_distance_bruteforce");
  const bool nodes_ok = vertices_enumerable(h1.mu(), h2.mu());
  const bool edges_ok = vertices_enumerable(h1.nu(), h2.nu());
  if (!nodes_ok && !edges_ok)
    throw Error(ErrorCode::too_large,
                "coot_distance_bruteforce: neither coupling polytope is small enough to enumerate");
  const Matrix& w1 = h1.omega();
  const Matrix& w2 = h2.omega();

  double best = std::numeric_limits<double>::infinity();
  std::optional<Coupling> best_pi, best_xi;
  if (edges_ok) {
    for (const Matrix& v : transport_vertices(h1.nu(), h2.nu())) {
      OtSolution s = solve_exact({h1.mu(), h2.mu(), detail::cost_for_first(w1, w2, v, pv)});
      if (s.objective < best) {
        best = s.objective;
        best_pi = std::move(s.plan);
        best_xi = Coupling(v, h1.nu(), h2.nu());
      }
    }
  }
  if (nodes_ok) {
    for (const Matrix& v : transport_vertices(h1.mu(), h2.mu())) {
      OtSolution s = solve_exact({h1.nu(), h2.nu(), detail::cost_for_second(w1, w2, v, pv)});
      if (s.objective < best) {
        best = s.objective;
        best_pi = Coupling(v, h1.mu(), h2.mu());
        best_xi = std::move(s.plan);
      }
    }
  }

  CootResult out;
  out.pi = *best_pi;
  out.xi = *best_xi;
  out.distance = coot_distortion(h1, h2, out.pi, out.xi, p);
  out.params.p = p;
  out.params.restarts = 1;
  out.method = "exact";
  RestartRecord rec;
  rec.objective = best;
  rec.converged = true;
  out.per_restart.push_back(std::move(rec));
  return out;
}

}  // namespace hnet

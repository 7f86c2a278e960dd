// SPDX-License-Identifier: Apache-2.0
#include "hnet/gw.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <optional>

#include "hnet/error.hpp"
#include "hnet/polytope.hpp"
#include "parallel.hpp"
#include "seeding.hpp"

namespace hnet {

LabeledBipartiteNetwork::LabeledBipartiteNetwork(MeasureNetwork network, std::vector<bool> left)
    : network_(std::move(network)), left_(std::move(left)) {
  const auto n = static_cast<Eigen::Index>(network_.size());
  if (static_cast<Eigen::Index>(left_.size()) != n)
    throw Error(ErrorCode::dimension_mismatch, "block labels must cover every node");
  ExactSum left_mass;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (left_[static_cast<std::size_t>(i)]) {
      left_idx_.push_back(i);
      left_mass.add(network_.mu()[i]);
    } else {
      right_idx_.push_back(i);
    }
  }
  if (left_idx_.empty() || right_idx_.empty())
    throw Error(ErrorCode::invalid_argument, "both blocks of a bipartite network must be nonempty");
  if (std::abs(left_mass.value() - 0.5) > kMeasureTol)
    throw Error(ErrorCode::invalid_measure,
                "each block of a bipartite network must carry mass 1/2, left has " +
                    std::to_string(left_mass.value()));
  const Matrix& w = network_.omega();
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      const bool same = left_[static_cast<std::size_t>(i)] == left_[static_cast<std::size_t>(j)];
      if (same && w(i, j) != 0.0)
        throw Error(ErrorCode::invalid_argument,
                    "bipartite relation must vanish inside a block (nodes " +
                        network_.ids()[static_cast<std::size_t>(i)] + ", " +
                        network_.ids()[static_cast<std::size_t>(j)] + ")");
      if (!same && w(i, j) != w(j, i))
        throw Error(ErrorCode::invalid_argument, "bipartite relation must be symmetric");
    }
}

namespace {

using Oracle = std::function<Matrix(const Matrix& gradient)>;

double objective(const Matrix& w1, const Matrix& w2, const Matrix& plan, double p) {
  return detail::frobenius_dot(detail::cost_for_first(w1, w2, plan, p), plan);
}

Matrix gradient(const Matrix& w1, const Matrix& w2, const Matrix& plan, double p) {
  return detail::cost_for_first(w1, w2, plan, p) + detail::cost_for_second(w1, w2, plan, p);
}

GwDescent descend(const Matrix& w1, const Matrix& w2, const Coupling& pi0,
                  const DistanceParams& params, const Oracle& lmo) {
  const double p = params.p.is_infinite() ? 2.0 : params.p.value();
  Matrix pi = pi0.matrix();
  RestartRecord rec;
  rec.trace.push_back(objective(w1, w2, pi, p));
  double prev = rec.trace.back();
  for (int it = 1; it <= params.max_iter; ++it) {
    rec.iterations = it;
    const Matrix g = gradient(w1, w2, pi, p);
    const Matrix target = lmo(g);
    const Matrix dir = target - pi;
    const double slope = detail::frobenius_dot(g, dir);
    if (slope >= 0.0) {
      rec.converged = true;
      break;
    }
    // f(pi + s dir) = f(pi) + s slope + s^2 curv on [0, 1].
    const double curv = objective(w1, w2, dir, p);
    double step = 1.0;
    if (curv > 0.0) step = std::min(1.0, -slope / (2.0 * curv));
    Matrix next = (1.0 - step) * pi + step * target;
    const double cur = objective(w1, w2, next, p);
    if (cur > prev) {
      rec.converged = true;
      break;
    }
    pi = std::move(next);
    rec.trace.push_back(cur);
    if (prev - cur <= params.tol * std::abs(prev)) {
      rec.converged = true;
      break;
    }
    prev = cur;
  }
  rec.objective = rec.trace.back();
  return GwDescent{Coupling(std::move(pi), pi0.row_marginal(), pi0.col_marginal()), std::move(rec)};
}

Matrix plain_oracle(const Vector& a, const Vector& b, const Matrix& g,
                    const DistanceParams& params) {
  return solve_ot({a, b, g}, params).plan.matrix();
}

Matrix take(const Matrix& m, const std::vector<Eigen::Index>& rows,
            const std::vector<Eigen::Index>& cols) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j)
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m(rows[i], cols[j]);
  return out;
}

Vector take(const Vector& v, const std::vector<Eigen::Index>& idx) {
  Vector out(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) out[static_cast<Eigen::Index>(i)] = v[idx[i]];
  return out;
}

void put(Matrix& full, const Matrix& block, const std::vector<Eigen::Index>& rows,
         const std::vector<Eigen::Index>& cols) {
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j)
      full(rows[i], cols[j]) = block(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
}

// One block of a labeled problem: index sets on both sides and the block
// marginals rescaled to probability vectors.
struct Block {
  std::vector<Eigen::Index> rows;
  std::vector<Eigen::Index> cols;
  Vector a;
  Vector b;
  double mass = 0.5;
};

Block make_block(const LabeledBipartiteNetwork& b1, const LabeledBipartiteNetwork& b2, bool left) {
  Block blk;
  blk.rows = left ? b1.left_indices() : b1.right_indices();
  blk.cols = left ? b2.left_indices() : b2.right_indices();
  const Vector ra = take(b1.network().mu(), blk.rows);
  const Vector rb = take(b2.network().mu(), blk.cols);
  blk.mass = ra.sum();
  blk.a = ra / ra.sum();
  blk.b = rb / rb.sum();
  return blk;
}

GwResult assemble(std::vector<std::optional<GwDescent>>& runs, const MeasureNetwork& n1,
                  const MeasureNetwork& n2, const DistanceParams& params) {
  std::size_t best = 0;
  for (std::size_t r = 1; r < runs.size(); ++r)
    if (runs[r]->record.objective < runs[best]->record.objective) best = r;
  GwResult out;
  out.pi = runs[best]->pi;
  out.distance = gw_distortion(n1, n2, out.pi, params.p);
  out.params = params;
  out.best_restart = static_cast<int>(best);
  out.certified_local = !params.p.is_infinite() && params.solver == Solver::exact;
  out.certification = "best of " + std::to_string(runs.size()) + " local descents";
  for (auto& run : runs) out.per_restart.push_back(std::move(run->record));
  return out;
}

double finite_order(Order p, const char* what) {
  if (p.is_infinite())
    throw Error(ErrorCode::invalid_argument, std::string(what) + " requires a finite order");
  return p.value();
}

}  // namespace

GwDescent gw_descend(const MeasureNetwork& n1, const MeasureNetwork& n2, const Coupling& pi0,
                     const DistanceParams& params) {
  require_couples(pi0, n1.mu(), n2.mu(), "initial coupling");
  return descend(n1.omega(), n2.omega(), pi0, params, [&](const Matrix& g) {
    return plain_oracle(n1.mu(), n2.mu(), g, params);
  });
}

GwResult gw_distance(const MeasureNetwork& n1, const MeasureNetwork& n2,
                     const DistanceParams& params) {
  params.validate();
  const auto restarts = static_cast<std::size_t>(params.restarts);
  const std::uint64_t k1 = detail::side_key(n1.mu(), n1.omega());
  const std::uint64_t k2 = detail::side_key(n2.mu(), n2.omega());
  std::vector<std::optional<GwDescent>> runs(restarts);
  detail::parallel_for(restarts, params.threads, [&](std::size_t r) {
    try {
      const Coupling pi0 = r == 0 ? Coupling::product(n1.mu(), n2.mu())
                                  : detail::seeded_start(n1.mu(), n2.mu(), k1, k2, params.seed, r);
      runs[r] = gw_descend(n1, n2, pi0, params);
    } catch (const Error& e) {
      rethrow_with_context(e, "restart " + std::to_string(r));
    }
  });
  return assemble(runs, n1, n2, params);
}

GwResult labeled_gw_distance(const LabeledBipartiteNetwork& b1, const LabeledBipartiteNetwork& b2,
                             const DistanceParams& params) {
  params.validate();
  const MeasureNetwork& n1 = b1.network();
  const MeasureNetwork& n2 = b2.network();
  const Block blocks[2] = {make_block(b1, b2, true), make_block(b1, b2, false)};
  // Cells across blocks are absent from every transport problem.
  const Oracle lmo = [&](const Matrix& g) {
    Matrix plan = Matrix::Zero(g.rows(), g.cols());
    for (const Block& blk : blocks)
      put(plan, blk.mass * plain_oracle(blk.a, blk.b, take(g, blk.rows, blk.cols), params),
          blk.rows, blk.cols);
    return plan;
  };
  std::uint64_t keys[2][2];
  for (int side = 0; side < 2; ++side) {
    const Block& blk = blocks[side];
    keys[side][0] = detail::side_key(blk.a, take(n1.omega(), blk.rows, side == 0 ? b1.right_indices()
                                                                                 : b1.left_indices()));
    keys[side][1] = detail::side_key(blk.b, take(n2.omega(), blk.cols, side == 0 ? b2.right_indices()
                                                                                 : b2.left_indices()));
  }

  const auto restarts = static_cast<std::size_t>(params.restarts);
  std::vector<std::optional<GwDescent>> runs(restarts);
  detail::parallel_for(restarts, params.threads, [&](std::size_t r) {
    try {
      Matrix start = Matrix::Zero(static_cast<Eigen::Index>(n1.size()),
                                  static_cast<Eigen::Index>(n2.size()));
      for (int side = 0; side < 2; ++side) {
        const Block& blk = blocks[side];
        const Coupling c = r == 0 ? Coupling::product(blk.a, blk.b)
                                  : detail::seeded_start(blk.a, blk.b, keys[side][0],
                                                         keys[side][1], params.seed, r);
        put(start, blk.mass * c.matrix(), blk.rows, blk.cols);
      }
      runs[r] = descend(n1.omega(), n2.omega(), Coupling(start, n1.mu(), n2.mu()), params, lmo);
    } catch (const Error& e) {
      rethrow_with_context(e, "restart " + std::to_string(r));
    }
  });
  return assemble(runs, n1, n2, params);
}

GwResult gw_distance_bruteforce(const MeasureNetwork& n1, const MeasureNetwork& n2, Order p) {
  const double pv = finite_order(p, "gw_distance_bruteforce");
  if (!vertices_enumerable(n1.mu(), n2.mu()))
    throw Error(ErrorCode::too_large, "gw_distance_bruteforce: coupling polytope too large to enumerate");
  DistanceParams local;
  local.p = p;
  double best = std::numeric_limits<double>::infinity();
  std::optional<Coupling> best_pi;
  for (const Matrix& v : transport_vertices(n1.mu(), n2.mu())) {
    Coupling vertex(v, n1.mu(), n2.mu());
    const double at_vertex = objective(n1.omega(), n2.omega(), vertex.matrix(), pv);
    if (at_vertex < best) {
      best = at_vertex;
      best_pi = vertex;
    }
    GwDescent run = gw_descend(n1, n2, vertex, local);
    if (run.record.objective < best) {
      best = run.record.objective;
      best_pi = std::move(run.pi);
    }
  }
  GwResult out;
  out.pi = *best_pi;
  out.distance = gw_distortion(n1, n2, out.pi, p);
  out.params.p = p;
  out.params.restarts = 1;
  out.method = "vertices";
  out.certification =
      "exact minimum over polytope vertices, improved by descents from each vertex; "
      "not a certified global minimum";
  RestartRecord rec;
  rec.objective = best;
  rec.converged = true;
  out.per_restart.push_back(std::move(rec));
  return out;
}

GwResult labeled_gw_distance_bruteforce(const LabeledBipartiteNetwork& b1,
                                        const LabeledBipartiteNetwork& b2, Order p) {
  const double pv = finite_order(p, "labeled_gw_distance_bruteforce");
  const MeasureNetwork& n1 = b1.network();
  const MeasureNetwork& n2 = b2.network();
  const Matrix& w1 = n1.omega();
  const Matrix& w2 = n2.omega();
  const Block blocks[2] = {make_block(b1, b2, true), make_block(b1, b2, false)};
  const Eigen::Index rows = static_cast<Eigen::Index>(n1.size());
  const Eigen::Index cols = static_cast<Eigen::Index>(n2.size());

  double best = std::numeric_limits<double>::infinity();
  std::optional<Matrix> best_plan;
  bool any = false;
  for (int fixed = 0; fixed < 2; ++fixed) {
    const Block& fb = blocks[fixed];
    const Block& ob = blocks[1 - fixed];
    if (!vertices_enumerable(fb.a, fb.b)) continue;
    any = true;
    for (const Matrix& v : transport_vertices(fb.a, fb.b)) {
      Matrix plan = Matrix::Zero(rows, cols);
      put(plan, fb.mass * v, fb.rows, fb.cols);
      // With one block fixed, only the cross-block terms depend on the other.
      const Matrix g = take(gradient(w1, w2, plan, pv), ob.rows, ob.cols);
      const OtSolution s = solve_exact({ob.a, ob.b, g});
      put(plan, ob.mass * s.plan.matrix(), ob.rows, ob.cols);
      const double value = objective(w1, w2, plan, pv);
      if (value < best) {
        best = value;
        best_plan = std::move(plan);
      }
    }
  }
  if (!any)
    throw Error(ErrorCode::too_large,
                "labeled_gw_distance_bruteforce: neither block polytope is small enough to enumerate");
  GwResult out;
  out.pi = Coupling(*best_plan, n1.mu(), n2.mu());
  out.distance = gw_distortion(n1, n2, out.pi, p);
  out.params.p = p;
  out.params.restarts = 1;
  out.method = "exact";
  out.certification = "exact: the objective is bilinear in the two block plans";
  RestartRecord rec;
  rec.objective = best;
  rec.converged = true;
  out.per_restart.push_back(std::move(rec));
  return out;
}

}  // namespace hnet

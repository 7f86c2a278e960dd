// SPDX-License-Identifier: Apache-2.0
#include "hnet/ot.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <sstream>

#include "hnet/error.hpp"

namespace hnet {

void OtProblem::validate() const {
  auto check = [](const Vector& m, const char* name) {
    if (m.size() == 0) throw Error(ErrorCode::invalid_measure, std::string(name) + " is empty");
    for (Eigen::Index i = 0; i < m.size(); ++i)
      if (!std::isfinite(m[i]) || m[i] <= 0.0)
        throw Error(ErrorCode::invalid_measure,
                    std::string(name) + " must be strictly positive (entry " + std::to_string(i) + ")");
    if (std::abs(m.sum() - 1.0) > kMeasureTol)
      throw Error(ErrorCode::invalid_measure, std::string(name) + " does not sum to 1");
  };
  check(a, "a");
  check(b, "b");
  if (cost.rows() != a.size() || cost.cols() != b.size()) {
    std::ostringstream os;
    os << "cost is " << cost.rows() << "x" << cost.cols() << ", expected " << a.size() << "x"
       << b.size();
    throw Error(ErrorCode::dimension_mismatch, os.str());
  }
  if (!cost.allFinite()) throw Error(ErrorCode::invalid_argument, "cost matrix is not finite");
}

Matrix tree_flows(const std::vector<std::pair<int, int>>& cells, const Vector& a, const Vector& b) {
  const int n = static_cast<int>(a.size());
  const int m = static_cast<int>(b.size());
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(n + m));
  for (std::size_t k = 0; k < cells.size(); ++k) {
    adj[static_cast<std::size_t>(cells[k].first)].push_back(static_cast<int>(k));
    adj[static_cast<std::size_t>(n + cells[k].second)].push_back(static_cast<int>(k));
  }
  std::vector<double> rem(static_cast<std::size_t>(n + m));
  for (int i = 0; i < n; ++i) rem[static_cast<std::size_t>(i)] = a[i];
  for (int j = 0; j < m; ++j) rem[static_cast<std::size_t>(n + j)] = b[j];
  std::vector<int> degree(static_cast<std::size_t>(n + m));
  std::deque<int> leaves;
  for (int v = 0; v < n + m; ++v) {
    degree[static_cast<std::size_t>(v)] = static_cast<int>(adj[static_cast<std::size_t>(v)].size());
    if (degree[static_cast<std::size_t>(v)] == 1) leaves.push_back(v);
  }
  std::vector<bool> done(cells.size(), false);
  Matrix flow = Matrix::Zero(n, m);
  std::size_t assigned = 0;
  while (!leaves.empty()) {
    const int v = leaves.front();
    leaves.pop_front();
    if (degree[static_cast<std::size_t>(v)] != 1) continue;
    int cell = -1;
    for (int k : adj[static_cast<std::size_t>(v)])
      if (!done[static_cast<std::size_t>(k)]) cell = k;
    const auto [i, j] = cells[static_cast<std::size_t>(cell)];
    const int other = v < n ? n + j : i;
    const double f = rem[static_cast<std::size_t>(v)];
    flow(i, j) = f;
    done[static_cast<std::size_t>(cell)] = true;
    ++assigned;
    rem[static_cast<std::size_t>(v)] = 0.0;
    rem[static_cast<std::size_t>(other)] -= f;
    degree[static_cast<std::size_t>(v)] = 0;
    if (--degree[static_cast<std::size_t>(other)] == 1) leaves.push_back(other);
  }
  if (assigned != cells.size()) throw Error(ErrorCode::internal, "basis cells do not form a tree");
  return flow;
}

// ---------------------------------------------------------------------------
// Transportation simplex on the bipartite spanning-tree basis.

namespace {

class TransportSimplex {
 public:
  TransportSimplex(const Vector& a, const Vector& b, const Matrix& cost)
      : a_(a), b_(b), c_(cost), n_(static_cast<int>(a.size())), m_(static_cast<int>(b.size())) {
    in_basis_.assign(static_cast<std::size_t>(n_ * m_), false);
    adj_.resize(static_cast<std::size_t>(n_ + m_));
    northwest_start();
    scale_ = std::max(1.0, c_.cwiseAbs().maxCoeff());
  }

  OtSolution run() {
    const long max_pivots = 50L * n_ * m_ + 1000;
    int degenerate_run = 0;
    int iterations = 0;
    for (;; ++iterations) {
      if (iterations > max_pivots)
        throw Error(ErrorCode::internal, "network simplex exceeded its pivot budget");
      compute_tree();
      const bool bland = degenerate_run > kBlandAfter;
      const int enter = price(bland);
      if (enter < 0) break;
      const double theta = pivot(enter);
      degenerate_run = theta > 0.0 ? 0 : degenerate_run + 1;
    }

    Matrix flow = tree_flows(basis_cells(), a_, b_);
    flow = flow.cwiseMax(0.0);
    ExactSum primal, dual;
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < m_; ++j)
        if (flow(i, j) != 0.0) primal.add(c_(i, j) * flow(i, j));
    for (int i = 0; i < n_; ++i) dual.add(a_[i] * u_[static_cast<std::size_t>(i)]);
    for (int j = 0; j < m_; ++j) dual.add(b_[j] * v_[static_cast<std::size_t>(j)]);

    OtSolution sol{Coupling(flow, a_, b_), primal.value(), iterations, Vector(n_), Vector(m_),
                   0.0, false};
    for (int i = 0; i < n_; ++i) sol.u[i] = u_[static_cast<std::size_t>(i)];
    for (int j = 0; j < m_; ++j) sol.v[j] = v_[static_cast<std::size_t>(j)];
    sol.duality_gap = std::abs(primal.value() - dual.value());
    return sol;
  }

 private:
  static constexpr int kBlandAfter = 64;

  int cell_id(int i, int j) const { return i * m_ + j; }

  void add_cell(int i, int j, double f) {
    const int id = cell_id(i, j);
    in_basis_[static_cast<std::size_t>(id)] = true;
    flow_[id] = f;
    adj_[static_cast<std::size_t>(i)].push_back(id);
    adj_[static_cast<std::size_t>(n_ + j)].push_back(id);
  }

  void remove_cell(int id) {
    const int i = id / m_;
    const int j = id % m_;
    in_basis_[static_cast<std::size_t>(id)] = false;
    flow_.erase(id);
    auto drop = [id](std::vector<int>& v) { v.erase(std::find(v.begin(), v.end(), id)); };
    drop(adj_[static_cast<std::size_t>(i)]);
    drop(adj_[static_cast<std::size_t>(n_ + j)]);
  }

  // Degenerate cells are kept so the basis is always a spanning tree.
  void northwest_start() {
    std::vector<double> ra(a_.data(), a_.data() + n_);
    std::vector<double> rb(b_.data(), b_.data() + m_);
    int i = 0, j = 0;
    while (i < n_ && j < m_) {
      const double f = std::min(ra[static_cast<std::size_t>(i)], rb[static_cast<std::size_t>(j)]);
      add_cell(i, j, f);
      ra[static_cast<std::size_t>(i)] -= f;
      rb[static_cast<std::size_t>(j)] -= f;
      if (i == n_ - 1) {
        ++j;
      } else if (j == m_ - 1) {
        ++i;
      } else if (ra[static_cast<std::size_t>(i)] <= rb[static_cast<std::size_t>(j)]) {
        ++i;
      } else {
        ++j;
      }
    }
  }

  std::vector<std::pair<int, int>> basis_cells() const {
    std::vector<std::pair<int, int>> cells;
    for (const auto& [id, f] : flow_) cells.emplace_back(id / m_, id % m_);
    return cells;
  }

  // Potentials, parents and depths by BFS from row 0.
  void compute_tree() {
    const std::size_t total = static_cast<std::size_t>(n_ + m_);
    u_.assign(static_cast<std::size_t>(n_), 0.0);
    v_.assign(static_cast<std::size_t>(m_), 0.0);
    parent_cell_.assign(total, -1);
    parent_node_.assign(total, -1);
    depth_.assign(total, -1);
    std::vector<int> queue{0};
    depth_[0] = 0;
    for (std::size_t q = 0; q < queue.size(); ++q) {
      const int node = queue[q];
      for (int id : adj_[static_cast<std::size_t>(node)]) {
        const int i = id / m_;
        const int j = id % m_;
        const int other = node < n_ ? n_ + j : i;
        if (depth_[static_cast<std::size_t>(other)] >= 0) continue;
        if (node < n_)
          v_[static_cast<std::size_t>(j)] = c_(i, j) - u_[static_cast<std::size_t>(i)];
        else
          u_[static_cast<std::size_t>(i)] = c_(i, j) - v_[static_cast<std::size_t>(j)];
        depth_[static_cast<std::size_t>(other)] = depth_[static_cast<std::size_t>(node)] + 1;
        parent_cell_[static_cast<std::size_t>(other)] = id;
        parent_node_[static_cast<std::size_t>(other)] = node;
        queue.push_back(other);
      }
    }
    if (queue.size() != total) throw Error(ErrorCode::internal, "simplex basis is not spanning");
  }

  int price(bool bland) const {
    const double eps = 1e-12 * scale_;
    int best = -1;
    double best_rc = -eps;
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < m_; ++j) {
        const int id = cell_id(i, j);
        if (in_basis_[static_cast<std::size_t>(id)]) continue;
        const double rc = c_(i, j) - u_[static_cast<std::size_t>(i)] - v_[static_cast<std::size_t>(j)];
        if (rc < best_rc) {
          if (bland) return id;
          best_rc = rc;
          best = id;
        }
      }
    return best;
  }

  double pivot(int enter) {
    const int ei = enter / m_;
    const int ej = enter % m_;
    // Path in the tree from column node ej back to row node ei.
    std::vector<int> from_col, from_row;
    int x = n_ + ej;
    int y = ei;
    while (depth_[static_cast<std::size_t>(x)] > depth_[static_cast<std::size_t>(y)]) {
      from_col.push_back(parent_cell_[static_cast<std::size_t>(x)]);
      x = parent_node_[static_cast<std::size_t>(x)];
    }
    while (depth_[static_cast<std::size_t>(y)] > depth_[static_cast<std::size_t>(x)]) {
      from_row.push_back(parent_cell_[static_cast<std::size_t>(y)]);
      y = parent_node_[static_cast<std::size_t>(y)];
    }
    while (x != y) {
      from_col.push_back(parent_cell_[static_cast<std::size_t>(x)]);
      x = parent_node_[static_cast<std::size_t>(x)];
      from_row.push_back(parent_cell_[static_cast<std::size_t>(y)]);
      y = parent_node_[static_cast<std::size_t>(y)];
    }
    std::vector<int> cycle = from_col;
    cycle.insert(cycle.end(), from_row.rbegin(), from_row.rend());

    // Cells at even positions lose flow, odd positions gain.
    double theta = std::numeric_limits<double>::infinity();
    int leave = -1;
    for (std::size_t k = 0; k < cycle.size(); k += 2) {
      const int id = cycle[k];
      const double f = flow_.at(id);
      if (f < theta || (f == theta && id < leave)) {
        theta = f;
        leave = id;
      }
    }
    theta = std::max(theta, 0.0);
    for (std::size_t k = 0; k < cycle.size(); ++k) {
      double& f = flow_.at(cycle[k]);
      f += (k % 2 == 0) ? -theta : theta;
    }
    remove_cell(leave);
    add_cell(ei, ej, theta);
    return theta;
  }

  const Vector& a_;
  const Vector& b_;
  const Matrix& c_;
  int n_, m_;
  double scale_ = 1.0;
  std::vector<bool> in_basis_;
  std::vector<std::vector<int>> adj_;
  std::map<int, double> flow_;
  std::vector<double> u_, v_;
  std::vector<int> parent_cell_, parent_node_, depth_;
};

}  // namespace

OtSolution solve_exact(const OtProblem& prob) {
  prob.validate();
  return TransportSimplex(prob.a, prob.b, prob.cost).run();
}

// ---------------------------------------------------------------------------

Matrix round_to_marginals(Matrix plan, const Vector& a, const Vector& b) {
  const Vector rows = plan.rowwise().sum();
  for (Eigen::Index i = 0; i < plan.rows(); ++i)
    if (rows[i] > a[i]) plan.row(i) *= a[i] / rows[i];
  const Vector cols = plan.colwise().sum().transpose();
  for (Eigen::Index j = 0; j < plan.cols(); ++j)
    if (cols[j] > b[j]) plan.col(j) *= b[j] / cols[j];
  const Vector er = (a - plan.rowwise().sum()).cwiseMax(0.0);
  const Vector ec = (b - plan.colwise().sum().transpose()).cwiseMax(0.0);
  const double total = er.sum();
  if (total > 0.0) plan += er * ec.transpose() / total;
  return plan;
}

namespace {

double log_sum_exp(const double* v, Eigen::Index n, Eigen::Index stride) {
  double mx = -std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < n; ++k) mx = std::max(mx, v[k * stride]);
  if (!std::isfinite(mx)) return mx;
  double s = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) s += std::exp(v[k * stride] - mx);
  return mx + std::log(s);
}

OtSolution finish(const OtProblem& prob, const Matrix& raw, int iterations, bool log_domain) {
  Matrix plan = round_to_marginals(raw, prob.a, prob.b);
  ExactSum obj;
  for (Eigen::Index i = 0; i < plan.rows(); ++i)
    for (Eigen::Index j = 0; j < plan.cols(); ++j)
      if (plan(i, j) != 0.0) obj.add(prob.cost(i, j) * plan(i, j));
  return OtSolution{Coupling(plan, prob.a, prob.b), obj.value(), iterations, Vector(), Vector(),
                    0.0, log_domain};
}

[[noreturn]] void fail(int iterations, double violation, bool log_domain) {
  std::ostringstream os;
  os << "Sinkhorn did not converge in " << iterations << " iterations (marginal violation "
     << violation << (log_domain ? ", log domain)" : ")");
  throw Error(ErrorCode::not_converged, os.str());
}

// Returns false if the scaling iteration broke down numerically.
bool sinkhorn_scaling(const OtProblem& prob, double eps, int max_iter, double tol,
                      OtSolution* out) {
  // Kernel entries below exp(-600) lose relative precision or underflow.
  const double lo = prob.cost.minCoeff();
  if ((prob.cost.maxCoeff() - lo) / eps > 600.0) return false;
  const Matrix k = prob.cost.unaryExpr([&](double c) { return std::exp(-(c - lo) / eps); });
  Vector u = Vector::Ones(prob.a.size());
  Vector v = Vector::Ones(prob.b.size());
  double viol = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= max_iter; ++it) {
    u = prob.a.cwiseQuotient(k * v);
    v = prob.b.cwiseQuotient(k.transpose() * u);
    if (!u.allFinite() || !v.allFinite() || (u.array() <= 0.0).any() || (v.array() <= 0.0).any())
      return false;
    // After the v-update columns are exact; measure the row residual.
    const Matrix plan = u.asDiagonal() * k * v.asDiagonal();
    viol = (plan.rowwise().sum() - prob.a).cwiseAbs().maxCoeff();
    if (viol <= tol) {
      *out = finish(prob, plan, it, false);
      return true;
    }
  }
  fail(max_iter, viol, false);
}

OtSolution sinkhorn_log(const OtProblem& prob, double eps, int max_iter, double tol) {
  const Eigen::Index n = prob.a.size();
  const Eigen::Index m = prob.b.size();
  const Vector log_a = prob.a.array().log().matrix();
  const Vector log_b = prob.b.array().log().matrix();
  Vector f = Vector::Zero(n);
  Vector g = Vector::Zero(m);
  Matrix scratch(n, m);  // column-major; scratch(i,j) = (f_i + g_j - C_ij) / eps
  double viol = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= max_iter; ++it) {
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < m; ++j) scratch(i, j) = (g[j] - prob.cost(i, j)) / eps;
    for (Eigen::Index i = 0; i < n; ++i)
      f[i] = eps * (log_a[i] - log_sum_exp(scratch.data() + i, m, n));
    for (Eigen::Index j = 0; j < m; ++j)
      for (Eigen::Index i = 0; i < n; ++i) scratch(i, j) = (f[i] - prob.cost(i, j)) / eps;
    for (Eigen::Index j = 0; j < m; ++j)
      g[j] = eps * (log_b[j] - log_sum_exp(scratch.data() + j * n, n, 1));
    Matrix plan(n, m);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < m; ++j)
        plan(i, j) = std::exp((f[i] + g[j] - prob.cost(i, j)) / eps);
    viol = (plan.rowwise().sum() - prob.a).cwiseAbs().maxCoeff();
    if (viol <= tol) return finish(prob, plan, it, true);
  }
  fail(max_iter, viol, true);
}

}  // namespace

OtSolution solve_entropic(const OtProblem& prob, double epsilon, int max_iter, double tol) {
  prob.validate();
  if (!(epsilon > 0.0)) throw Error(ErrorCode::invalid_argument, "epsilon must be > 0");
  if (max_iter < 1) throw Error(ErrorCode::invalid_argument, "max_iter must be >= 1");
  if (!(tol > 0.0)) throw Error(ErrorCode::invalid_argument, "tol must be > 0");
  OtSolution out{Coupling::product(prob.a, prob.b), 0.0, 0, Vector(), Vector(), 0.0, false};
  if (sinkhorn_scaling(prob, epsilon, max_iter, tol, &out)) return out;
  return sinkhorn_log(prob, epsilon, max_iter, tol);
}

}  // namespace hnet

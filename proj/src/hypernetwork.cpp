// SPDX-License-Identifier: Apache-2.0
#include "hnet/hypernetwork.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

#include "hnet/error.hpp"

namespace hnet {

namespace {

Labels default_labels(std::size_t n) {
  Labels out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(std::to_string(i));
  return out;
}

void check_probability(const Vector& m, const char* name) {
  if (m.size() == 0) throw Error(ErrorCode::invalid_measure, std::string(name) + " is empty");
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    if (!std::isfinite(m[i]) || m[i] <= 0.0) {
      std::ostringstream os;
      os << name << "[" << i << "] = " << m[i] << " is not strictly positive";
      throw Error(ErrorCode::invalid_measure, os.str());
    }
  }
  const double total = m.sum();
  if (std::abs(total - 1.0) > kMeasureTol) {
    std::ostringstream os;
    os.precision(17);
    os << name << " sums to " << total << ", expected 1";
    throw Error(ErrorCode::invalid_measure, os.str());
  }
}

void check_relation(const Matrix& w, Eigen::Index rows, Eigen::Index cols) {
  if (w.rows() != rows || w.cols() != cols) {
    std::ostringstream os;
    os << "omega has shape " << w.rows() << "x" << w.cols() << ", expected " << rows << "x"
       << cols;
    throw Error(ErrorCode::dimension_mismatch, os.str());
  }
  for (Eigen::Index i = 0; i < w.rows(); ++i)
    for (Eigen::Index j = 0; j < w.cols(); ++j)
      if (!std::isfinite(w(i, j)) || w(i, j) < 0.0) {
        std::ostringstream os;
        os << "omega(" << i << "," << j << ") = " << w(i, j) << " is not finite and nonnegative";
        throw Error(ErrorCode::invalid_argument, os.str());
      }
}

void check_labels(Labels& ids, std::size_t n, const char* what) {
  if (ids.empty()) ids = default_labels(n);
  if (ids.size() != n)
    throw Error(ErrorCode::dimension_mismatch,
                std::string(what) + ": " + std::to_string(ids.size()) + " labels for " +
                    std::to_string(n) + " entries");
  Labels sorted = ids;
  std::sort(sorted.begin(), sorted.end());
  auto dup = std::adjacent_find(sorted.begin(), sorted.end());
  if (dup != sorted.end())
    throw Error(ErrorCode::invalid_argument, std::string(what) + ": duplicate label '" + *dup + "'");
}

double pth_root(double s, double p) {
  if (s <= 0.0) return 0.0;
  if (p == 1.0) return s;
  if (p == 2.0) return std::sqrt(s);
  return std::pow(s, 1.0 / p);
}

double power(double d, double p) {
  if (p == 1.0) return d;
  if (p == 2.0) return d * d;
  return std::pow(d, p);
}

}  // namespace

// ---------------------------------------------------------------------------

Order::Order(double p) : value_(p) {
  if (!(p >= 1.0))
    throw Error(ErrorCode::invalid_argument, "order must be >= 1, got " + std::to_string(p));
  if (std::isinf(p)) infinite_ = true;
}

Order Order::infinity() {
  Order o;
  o.infinite_ = true;
  o.value_ = std::numeric_limits<double>::infinity();
  return o;
}

Order Order::parse(const std::string& text) {
  std::string lower;
  for (char c : text) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (lower == "inf" || lower == "infinity") return infinity();
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw Error(ErrorCode::invalid_argument, "cannot parse order '" + text + "'");
  }
  if (used != text.size())
    throw Error(ErrorCode::invalid_argument, "cannot parse order '" + text + "'");
  return Order(v);
}

std::string Order::to_string() const {
  if (infinite_) return "inf";
  std::ostringstream os;
  os << value_;
  return os.str();
}

// ---------------------------------------------------------------------------

void ExactSum::add(double x) {
  std::size_t i = 0;
  for (double y : partials_) {
    if (std::abs(x) < std::abs(y)) std::swap(x, y);
    const double hi = x + y;
    const double lo = y - (hi - x);
    if (lo != 0.0) partials_[i++] = lo;
    x = hi;
  }
  partials_.resize(i);
  partials_.push_back(x);
}

double ExactSum::value() const {
  std::size_t n = partials_.size();
  if (n == 0) return 0.0;
  double hi = partials_[--n];
  double lo = 0.0;
  while (n > 0) {
    const double x = hi;
    const double y = partials_[--n];
    hi = x + y;
    lo = y - (hi - x);
    if (lo != 0.0) break;
  }
  // Round half-even correction, as in the classic msum final step.
  if (n > 0 && ((lo < 0.0 && partials_[n - 1] < 0.0) || (lo > 0.0 && partials_[n - 1] > 0.0))) {
    const double y = lo * 2.0;
    const double x = hi + y;
    if (y == x - hi) hi = x;
  }
  return hi;
}

// ---------------------------------------------------------------------------

MeasureNetwork::MeasureNetwork(Labels ids, Vector mu, Matrix omega)
    : ids_(std::move(ids)), mu_(std::move(mu)), omega_(std::move(omega)) {
  check_probability(mu_, "mu");
  check_relation(omega_, mu_.size(), mu_.size());
  check_labels(ids_, size(), "network nodes");
}

MeasureHypernetwork::MeasureHypernetwork(Labels node_ids, Vector mu, Labels hyperedge_ids,
                                         Vector nu, Matrix omega)
    : node_ids_(std::move(node_ids)),
      mu_(std::move(mu)),
      hyperedge_ids_(std::move(hyperedge_ids)),
      nu_(std::move(nu)),
      omega_(std::move(omega)) {
  check_probability(mu_, "mu");
  check_probability(nu_, "nu");
  check_relation(omega_, mu_.size(), nu_.size());
  check_labels(node_ids_, num_nodes(), "nodes");
  check_labels(hyperedge_ids_, num_hyperedges(), "hyperedges");
}

bool operator==(const MeasureHypernetwork& a, const MeasureHypernetwork& b) {
  return a.node_ids_ == b.node_ids_ && a.hyperedge_ids_ == b.hyperedge_ids_ &&
         a.mu_.size() == b.mu_.size() && a.nu_.size() == b.nu_.size() && a.mu_ == b.mu_ &&
         a.nu_ == b.nu_ && a.omega_ == b.omega_;
}

// ---------------------------------------------------------------------------

Coupling::Coupling(Matrix plan, Vector row_marginal, Vector col_marginal)
    : plan_(std::move(plan)), row_(std::move(row_marginal)), col_(std::move(col_marginal)) {
  if (plan_.rows() != row_.size() || plan_.cols() != col_.size()) {
    std::ostringstream os;
    os << "coupling shape " << plan_.rows() << "x" << plan_.cols() << " does not match marginals ("
       << row_.size() << ", " << col_.size() << ")";
    throw Error(ErrorCode::dimension_mismatch, os.str());
  }
  for (Eigen::Index i = 0; i < plan_.rows(); ++i)
    for (Eigen::Index j = 0; j < plan_.cols(); ++j) {
      double& v = plan_(i, j);
      if (!std::isfinite(v) || v < -1e-12) {
        std::ostringstream os;
        os << "coupling entry (" << i << "," << j << ") = " << v << " is negative or not finite";
        throw Error(ErrorCode::invalid_coupling, os.str());
      }
      if (v < 0.0) v = 0.0;
    }
  const double viol = marginal_violation();
  if (!(viol <= kCouplingTol)) {
    std::ostringstream os;
    os << "coupling marginals violated by " << viol;
    throw Error(ErrorCode::invalid_coupling, os.str());
  }
}

Coupling Coupling::product(const Vector& a, const Vector& b) {
  return Coupling(a * b.transpose(), a, b);
}

Coupling Coupling::diagonal(const Vector& a) {
  return Coupling(Matrix(a.asDiagonal()), a, a);
}

Coupling Coupling::transpose() const {
  return Coupling(plan_.transpose(), col_, row_);
}

double Coupling::marginal_violation() const {
  if (plan_.size() == 0) return 0.0;
  const double r = (plan_.rowwise().sum() - row_).cwiseAbs().maxCoeff();
  const double c = (plan_.colwise().sum().transpose() - col_).cwiseAbs().maxCoeff();
  return std::max(r, c);
}

void DistanceParams::validate() const {
  if (restarts < 1) throw Error(ErrorCode::invalid_argument, "restarts must be >= 1");
  if (max_iter < 1) throw Error(ErrorCode::invalid_argument, "max_iter must be >= 1");
  if (!(tol > 0.0)) throw Error(ErrorCode::invalid_argument, "tol must be > 0");
  if (solver == Solver::entropic && !(epsilon > 0.0))
    throw Error(ErrorCode::invalid_argument, "epsilon must be > 0 for the entropic solver");
}

void require_couples(const Coupling& pi, const Vector& a, const Vector& b, const char* what) {
  if (pi.rows() != a.size() || pi.cols() != b.size()) {
    std::ostringstream os;
    os << what << ": coupling is " << pi.rows() << "x" << pi.cols() << ", expected " << a.size()
       << "x" << b.size();
    throw Error(ErrorCode::dimension_mismatch, os.str());
  }
  const double dr = (pi.matrix().rowwise().sum() - a).cwiseAbs().maxCoeff();
  const double dc = (pi.matrix().colwise().sum().transpose() - b).cwiseAbs().maxCoeff();
  if (!(std::max(dr, dc) <= kCouplingTol)) {
    std::ostringstream os;
    os << what << ": coupling marginals differ from the measures by " << std::max(dr, dc);
    throw Error(ErrorCode::invalid_coupling, os.str());
  }
}

// ---------------------------------------------------------------------------

namespace {

// Shared kernel: sum over (x,x') in `outer` and (y,y') in `inner` of
// |w1(x,y) - w2(x',y')|^p outer(x,x') inner(y,y').
double distortion_kernel(const Matrix& w1, const Matrix& w2, const Matrix& outer,
                         const Matrix& inner, Order p) {
  if (p.is_infinite()) {
    double best = 0.0;
    for (Eigen::Index x = 0; x < outer.rows(); ++x)
      for (Eigen::Index xp = 0; xp < outer.cols(); ++xp) {
        if (!(outer(x, xp) > kSupportTol)) continue;
        for (Eigen::Index y = 0; y < inner.rows(); ++y)
          for (Eigen::Index yp = 0; yp < inner.cols(); ++yp) {
            if (!(inner(y, yp) > kSupportTol)) continue;
            best = std::max(best, std::abs(w1(x, y) - w2(xp, yp)));
          }
      }
    return best;
  }
  const double pv = p.value();
  ExactSum sum;
  for (Eigen::Index x = 0; x < outer.rows(); ++x)
    for (Eigen::Index xp = 0; xp < outer.cols(); ++xp) {
      const double a = outer(x, xp);
      if (a == 0.0) continue;
      for (Eigen::Index y = 0; y < inner.rows(); ++y)
        for (Eigen::Index yp = 0; yp < inner.cols(); ++yp) {
          const double b = inner(y, yp);
          if (b == 0.0) continue;
          const double d = std::abs(w1(x, y) - w2(xp, yp));
          if (d == 0.0) continue;
          sum.add(power(d, pv) * (a * b));
        }
    }
  return pth_root(sum.value(), pv);
}

}  // namespace

double gw_distortion(const MeasureNetwork& n1, const MeasureNetwork& n2, const Coupling& pi,
                     Order p) {
  require_couples(pi, n1.mu(), n2.mu(), "gw_distortion");
  return distortion_kernel(n1.omega(), n2.omega(), pi.matrix(), pi.matrix(), p);
}

double coot_distortion(const MeasureHypernetwork& h1, const MeasureHypernetwork& h2,
                       const Coupling& pi, const Coupling& xi, Order p) {
  require_couples(pi, h1.mu(), h2.mu(), "coot_distortion (node coupling)");
  require_couples(xi, h1.nu(), h2.nu(), "coot_distortion (hyperedge coupling)");
  return distortion_kernel(h1.omega(), h2.omega(), pi.matrix(), xi.matrix(), p);
}

MeasureHypernetwork dualize(const MeasureHypernetwork& h) {
  return MeasureHypernetwork(h.hyperedge_ids(), h.nu(), h.node_ids(), h.mu(),
                             h.omega().transpose());
}

MeasureHypernetwork geodesic_point(const MeasureHypernetwork& h1, const MeasureHypernetwork& h2,
                                   const Coupling& pi, const Coupling& xi, double t) {
  if (!(t >= 0.0 && t <= 1.0))
    throw Error(ErrorCode::invalid_argument, "geodesic time must lie in [0, 1]");
  require_couples(pi, h1.mu(), h2.mu(), "geodesic_point (node coupling)");
  require_couples(xi, h1.nu(), h2.nu(), "geodesic_point (hyperedge coupling)");

  struct Cell {
    Eigen::Index a, b;
    double mass;
  };
  auto support = [](const Matrix& m) {
    std::vector<Cell> cells;
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      for (Eigen::Index j = 0; j < m.cols(); ++j)
        if (m(i, j) > kSupportTol) cells.push_back({i, j, m(i, j)});
    return cells;
  };
  const auto nodes = support(pi.matrix());
  const auto edges = support(xi.matrix());
  if (nodes.empty() || edges.empty())
    throw Error(ErrorCode::internal, "geodesic_point: coupling has empty support");

  auto measure = [](const std::vector<Cell>& cells) {
    Vector m(static_cast<Eigen::Index>(cells.size()));
    for (std::size_t k = 0; k < cells.size(); ++k) m[static_cast<Eigen::Index>(k)] = cells[k].mass;
    return Vector(m / m.sum());
  };
  auto labels = [](const std::vector<Cell>& cells, const Labels& l1, const Labels& l2) {
    Labels out;
    for (const auto& c : cells)
      out.push_back(l1[static_cast<std::size_t>(c.a)] + "|" + l2[static_cast<std::size_t>(c.b)]);
    return out;
  };

  Matrix w(static_cast<Eigen::Index>(nodes.size()), static_cast<Eigen::Index>(edges.size()));
  for (std::size_t i = 0; i < nodes.size(); ++i)
    for (std::size_t j = 0; j < edges.size(); ++j)
      w(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          (1.0 - t) * h1.omega()(nodes[i].a, edges[j].a) + t * h2.omega()(nodes[i].b, edges[j].b);

  return MeasureHypernetwork(labels(nodes, h1.node_ids(), h2.node_ids()), measure(nodes),
                             labels(edges, h1.hyperedge_ids(), h2.hyperedge_ids()),
                             measure(edges), std::move(w));
}

namespace {

bool rows_match(const Matrix& w, Eigen::Index i, Eigen::Index j, double tol) {
  for (Eigen::Index k = 0; k < w.cols(); ++k)
    if (std::abs(w(i, k) - w(j, k)) > tol) return false;
  return true;
}

// One pass of row merges. Returns true if anything merged.
bool merge_rows(Matrix& w, Vector& mass, Labels& ids, double tol) {
  std::vector<Eigen::Index> keep;
  std::vector<double> kept_mass;
  std::vector<bool> absorbed(static_cast<std::size_t>(w.rows()), false);
  for (Eigen::Index i = 0; i < w.rows(); ++i) {
    if (absorbed[static_cast<std::size_t>(i)]) continue;
    double m = mass[i];
    for (Eigen::Index j = i + 1; j < w.rows(); ++j) {
      if (absorbed[static_cast<std::size_t>(j)] || !rows_match(w, i, j, tol)) continue;
      absorbed[static_cast<std::size_t>(j)] = true;
      m += mass[j];
    }
    keep.push_back(i);
    kept_mass.push_back(m);
  }
  if (static_cast<Eigen::Index>(keep.size()) == w.rows()) return false;
  Matrix nw(static_cast<Eigen::Index>(keep.size()), w.cols());
  Vector nm(static_cast<Eigen::Index>(keep.size()));
  Labels nids;
  for (std::size_t k = 0; k < keep.size(); ++k) {
    nw.row(static_cast<Eigen::Index>(k)) = w.row(keep[k]);
    nm[static_cast<Eigen::Index>(k)] = kept_mass[k];
    nids.push_back(ids[static_cast<std::size_t>(keep[k])]);
  }
  w = std::move(nw);
  mass = std::move(nm);
  ids = std::move(nids);
  return true;
}

}  // namespace

MeasureHypernetwork collapse_canonical(const MeasureHypernetwork& h, double tol) {
  if (!(tol >= 0.0)) throw Error(ErrorCode::invalid_argument, "collapse tolerance must be >= 0");
  Matrix w = h.omega();
  Vector mu = h.mu();
  Vector nu = h.nu();
  Labels nodes = h.node_ids();
  Labels edges = h.hyperedge_ids();
  for (;;) {
    const bool rows = merge_rows(w, mu, nodes, tol);
    Matrix wt = w.transpose();
    const bool cols = merge_rows(wt, nu, edges, tol);
    w = wt.transpose();
    if (!rows && !cols) break;
  }
  return MeasureHypernetwork(std::move(nodes), std::move(mu), std::move(edges), std::move(nu),
                             std::move(w));
}

}  // namespace hnet

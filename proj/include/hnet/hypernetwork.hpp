// SPDX-License-Identifier: Apache-2.0
//
// Finite measure networks and hypernetworks, couplings between their
// measures, and the distortion functionals that the distances minimize.
#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace hnet {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Labels = std::vector<std::string>;

// Exponent in [1, inf]. Infinity is a distinguished state, not a huge double.
class Order {
 public:
  Order() = default;
  explicit Order(double p);

  static Order infinity();
  // Accepts a decimal number or "inf"/"infinity".
  static Order parse(const std::string& text);

  bool is_infinite() const noexcept { return infinite_; }
  // Only meaningful for finite orders.
  double value() const noexcept { return value_; }
  std::string to_string() const;

  friend bool operator==(const Order& a, const Order& b) noexcept {
    return a.infinite_ == b.infinite_ && (a.infinite_ || a.value_ == b.value_);
  }
  friend bool operator<=(const Order& a, const Order& b) noexcept {
    if (b.infinite_) return true;
    if (a.infinite_) return false;
    return a.value_ <= b.value_;
  }

 private:
  double value_ = 2.0;
  bool infinite_ = false;
};

inline constexpr double kMeasureTol = 1e-12;
inline constexpr double kCouplingTol = 1e-9;
// Coupling entries above this count as support (p = inf, geodesics).
inline constexpr double kSupportTol = 1e-15;

class MeasureNetwork {
 public:
  // Empty `ids` means "0", "1", ... are generated.
  MeasureNetwork(Labels ids, Vector mu, Matrix omega);

  std::size_t size() const noexcept { return static_cast<std::size_t>(mu_.size()); }
  const Labels& ids() const noexcept { return ids_; }
  const Vector& mu() const noexcept { return mu_; }
  const Matrix& omega() const noexcept { return omega_; }

 private:
  Labels ids_;
  Vector mu_;
  Matrix omega_;
};

class MeasureHypernetwork {
 public:
  MeasureHypernetwork(Labels node_ids, Vector mu, Labels hyperedge_ids, Vector nu,
                      Matrix omega);

  std::size_t num_nodes() const noexcept { return static_cast<std::size_t>(mu_.size()); }
  std::size_t num_hyperedges() const noexcept { return static_cast<std::size_t>(nu_.size()); }
  const Labels& node_ids() const noexcept { return node_ids_; }
  const Labels& hyperedge_ids() const noexcept { return hyperedge_ids_; }
  const Vector& mu() const noexcept { return mu_; }
  const Vector& nu() const noexcept { return nu_; }
  const Matrix& omega() const noexcept { return omega_; }

  friend bool operator==(const MeasureHypernetwork& a, const MeasureHypernetwork& b);

 private:
  Labels node_ids_;
  Vector mu_;
  Labels hyperedge_ids_;
  Vector nu_;
  Matrix omega_;
};

// Nonnegative matrix whose row and column sums match the stored marginals
// to within kCouplingTol. Tiny negative round-off (> -1e-12) is clamped.
class Coupling {
 public:
  // The trivial coupling of two one-point measures.
  Coupling() : Coupling(Matrix::Ones(1, 1), Vector::Ones(1), Vector::Ones(1)) {}
  Coupling(Matrix plan, Vector row_marginal, Vector col_marginal);

  static Coupling product(const Vector& a, const Vector& b);
  // Requires a == b; places the common measure on the diagonal.
  static Coupling diagonal(const Vector& a);

  const Matrix& matrix() const noexcept { return plan_; }
  const Vector& row_marginal() const noexcept { return row_; }
  const Vector& col_marginal() const noexcept { return col_; }
  Eigen::Index rows() const noexcept { return plan_.rows(); }
  Eigen::Index cols() const noexcept { return plan_.cols(); }
  double operator()(Eigen::Index i, Eigen::Index j) const { return plan_(i, j); }

  Coupling transpose() const;
  // Largest absolute deviation of row/column sums from the marginals.
  double marginal_violation() const;

 private:
  Matrix plan_;
  Vector row_;
  Vector col_;
};

enum class Solver { exact, entropic };

struct DistanceParams {
  Order p{2.0};
  Solver solver = Solver::exact;
  double epsilon = 1e-3;
  int restarts = 10;
  int max_iter = 200;
  double tol = 1e-8;
  std::uint64_t seed = 0;
  // Worker threads for restarts; 0 picks the hardware concurrency.
  unsigned threads = 0;

  void validate() const;
};

// Throws unless `pi` couples `a` and `b` (shape and marginals within kCouplingTol).
void require_couples(const Coupling& pi, const Vector& a, const Vector& b, const char* what);

double gw_distortion(const MeasureNetwork& n1, const MeasureNetwork& n2, const Coupling& pi,
                     Order p);

double coot_distortion(const MeasureHypernetwork& h1, const MeasureHypernetwork& h2,
                       const Coupling& pi, const Coupling& xi, Order p);

MeasureHypernetwork dualize(const MeasureHypernetwork& h);

// Point at time t on the straight-line path between h1 and h2 through (pi, xi).
// Node (x, x') is labelled "x|x'"; zero-mass cells are dropped.
MeasureHypernetwork geodesic_point(const MeasureHypernetwork& h1, const MeasureHypernetwork& h2,
                                   const Coupling& pi, const Coupling& xi, double t);

// Merges nodes with identical rows and hyperedges with identical columns until
// no more merges apply. Rows are scanned before columns; the lowest index is
// the representative and keeps its label.
MeasureHypernetwork collapse_canonical(const MeasureHypernetwork& h, double tol = 0.0);

// Correctly rounded sum of `terms`; independent of their order.
class ExactSum {
 public:
  void add(double x);
  double value() const;

 private:
  std::vector<double> partials_;
};

}  // namespace hnet

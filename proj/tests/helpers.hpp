// SPDX-License-Identifier: Apache-2.0
//
// Random instance generators and slow reference evaluations shared by the
// unit and acceptance tests. The references are written straight from the
// definitions and deliberately avoid the library's kernels.
#pragma once

#include <cmath>
#include <random>
#include <string>

#include "hnet/hypernetwork.hpp"

namespace hnet::testing {

inline Vector random_probability(Eigen::Index n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.2, 1.0);
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = u(rng);
  return v / v.sum();
}

inline Vector uniform_probability(Eigen::Index n) {
  return Vector::Constant(n, 1.0 / static_cast<double>(n));
}

inline Matrix random_relation(Eigen::Index n, Eigen::Index m, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix w(n, m);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < m; ++j) w(i, j) = u(rng);
  return w;
}

inline MeasureHypernetwork random_hypernetwork(Eigen::Index n, Eigen::Index m, std::mt19937_64& rng,
                                               bool uniform = false) {
  Vector mu = uniform ? uniform_probability(n) : random_probability(n, rng);
  Vector nu = uniform ? uniform_probability(m) : random_probability(m, rng);
  return MeasureHypernetwork({}, mu, {}, nu, random_relation(n, m, rng));
}

inline MeasureNetwork random_network(Eigen::Index n, std::mt19937_64& rng, bool uniform = false) {
  Vector mu = uniform ? uniform_probability(n) : random_probability(n, rng);
  return MeasureNetwork({}, mu, random_relation(n, n, rng));
}

// Quadruple sum straight from the definition, p finite.
inline double reference_coot_distortion(const Matrix& w1, const Matrix& w2, const Matrix& pi,
                                        const Matrix& xi, double p) {
  long double s = 0.0L;
  for (Eigen::Index x = 0; x < w1.rows(); ++x)
    for (Eigen::Index xp = 0; xp < w2.rows(); ++xp)
      for (Eigen::Index y = 0; y < w1.cols(); ++y)
        for (Eigen::Index yp = 0; yp < w2.cols(); ++yp)
          s += std::pow(std::abs(w1(x, y) - w2(xp, yp)), p) * pi(x, xp) * xi(y, yp);
  return std::pow(static_cast<double>(s), 1.0 / p);
}

inline double reference_gw_distortion(const Matrix& w1, const Matrix& w2, const Matrix& pi,
                                      double p) {
  return reference_coot_distortion(w1, w2, pi, pi, p);
}

// M[y,y'] = sum |w1(x,y) - w2(x',y')|^p pi(x,x') by four nested loops.
inline Matrix reference_cost_for_xi(const Matrix& w1, const Matrix& w2, const Matrix& pi,
                                    double p) {
  Matrix m = Matrix::Zero(w1.cols(), w2.cols());
  for (Eigen::Index y = 0; y < w1.cols(); ++y)
    for (Eigen::Index yp = 0; yp < w2.cols(); ++yp) {
      long double s = 0.0L;
      for (Eigen::Index x = 0; x < w1.rows(); ++x)
        for (Eigen::Index xp = 0; xp < w2.rows(); ++xp)
          s += std::pow(std::abs(w1(x, y) - w2(xp, yp)), p) * pi(x, xp);
      m(y, yp) = static_cast<double>(s);
    }
  return m;
}

// The two-node scaling family: w = diag(alpha, alpha), uniform measures.
inline MeasureHypernetwork scaling_family(double alpha) {
  Matrix w = Matrix::Zero(2, 2);
  w(0, 0) = alpha;
  w(1, 1) = alpha;
  return MeasureHypernetwork({"x1", "x2"}, uniform_probability(2), {"y1", "y2"},
                             uniform_probability(2), w);
}

// Weakly isomorphic pair: a 2x3 relation and its 3x2 partner.
inline MeasureHypernetwork weak_iso_left() {
  Matrix w(2, 3);
  w << 0, 2, 2, 1, 2, 2;
  Vector mu(2);
  mu << 1.0 / 3.0, 2.0 / 3.0;
  return MeasureHypernetwork({"x1", "x2"}, mu, {"y1", "y2", "y3"}, uniform_probability(3), w);
}

inline MeasureHypernetwork weak_iso_right() {
  Matrix w(3, 2);
  w << 0, 2, 1, 2, 1, 2;
  Vector nu(2);
  nu << 1.0 / 3.0, 2.0 / 3.0;
  return MeasureHypernetwork({"x1", "x2", "x3"}, uniform_probability(3), {"y1", "y2"}, nu, w);
}

}  // namespace hnet::testing

// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "helpers.hpp"
#include "hnet/coot.hpp"
#include "hnet/error.hpp"
#include "hnet/graphify.hpp"
#include "hnet/gw.hpp"
#include "hnet/polytope.hpp"

using namespace hnet;
using namespace hnet::testing;

namespace {

double permutation_gw(const MeasureNetwork& n1, const MeasureNetwork& n2, double p) {
  const auto n = static_cast<Eigen::Index>(n1.size());
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    Matrix plan = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) plan(i, perm[static_cast<std::size_t>(i)]) = 1.0 / n;
    best = std::min(best, reference_gw_distortion(n1.omega(), n2.omega(), plan, p));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// Positive semidefinite nonnegative relation: the objective is concave on the
// coupling polytope, so some vertex is a global minimizer.
MeasureNetwork gram_network(Eigen::Index n, std::mt19937_64& rng) {
  const Matrix a = random_relation(n, 3, rng);
  return MeasureNetwork({}, uniform_probability(n), a * a.transpose());
}

// Every pair of block vertices, evaluated by the reference distortion.
double restricted_vertex_minimum(const LabeledBipartiteNetwork& b1,
                                 const LabeledBipartiteNetwork& b2, double p) {
  auto block_marginal = [](const Vector& mu, const std::vector<Eigen::Index>& idx) {
    Vector v(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t i = 0; i < idx.size(); ++i) v[static_cast<Eigen::Index>(i)] = mu[idx[i]];
    return v;
  };
  const Vector& m1 = b1.network().mu();
  const Vector& m2 = b2.network().mu();
  const auto left = transport_vertices(block_marginal(m1, b1.left_indices()),
                                       block_marginal(m2, b2.left_indices()));
  const auto right = transport_vertices(block_marginal(m1, b1.right_indices()),
                                        block_marginal(m2, b2.right_indices()));
  double best = std::numeric_limits<double>::infinity();
  for (const Matrix& l : left)
    for (const Matrix& r : right) {
      Matrix plan = Matrix::Zero(m1.size(), m2.size());
      for (std::size_t i = 0; i < b1.left_indices().size(); ++i)
        for (std::size_t j = 0; j < b2.left_indices().size(); ++j)
          plan(b1.left_indices()[i], b2.left_indices()[j]) =
              l(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      for (std::size_t i = 0; i < b1.right_indices().size(); ++i)
        for (std::size_t j = 0; j < b2.right_indices().size(); ++j)
          plan(b1.right_indices()[i], b2.right_indices()[j]) =
              r(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      best = std::min(best, reference_gw_distortion(b1.network().omega(), b2.network().omega(),
                                                    plan, p));
    }
  return best;
}

}  // namespace

TEST_SUITE("gw") {

TEST_CASE("gw_distance examples") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 5; ++trial) {
    const MeasureNetwork n = random_network(5, rng);
    CHECK(gw_distance(n, n).distance <= 1e-8);
  }
  const MeasureNetwork a({}, Vector::Ones(1), Matrix::Constant(1, 1, 0.25));
  const MeasureNetwork b({}, Vector::Ones(1), Matrix::Constant(1, 1, 2.0));
  CHECK(gw_distance(a, b).distance == doctest::Approx(1.75).epsilon(1e-15));
}

TEST_CASE("descent matches the permutation oracle on concave instances") {
  std::mt19937_64 rng(42);
  // One fixed pair, as a regression example.
  const MeasureNetwork n1 = gram_network(4, rng);
  const MeasureNetwork n2 = gram_network(4, rng);
  CHECK(gw_distance(n1, n2).distance == doctest::Approx(permutation_gw(n1, n2, 2.0)).epsilon(1e-6));

  int matched = 0;
  const int trials = 60;
  for (int t = 0; t < trials; ++t) {
    const MeasureNetwork a = gram_network(4, rng);
    const MeasureNetwork b = gram_network(4, rng);
    const double oracle = permutation_gw(a, b, 2.0);
    const double d = gw_distance(a, b).distance;
    CHECK(d >= oracle - 1e-9);
    if (std::abs(d - oracle) <= 1e-6) ++matched;
  }
  MESSAGE("gw descent matched the permutation oracle on " << matched << "/" << trials);
  CHECK(matched >= 54);
}

TEST_CASE("descent can beat every vertex on indefinite instances") {
  // The objective is not concave here; the minimum need not be a vertex.
  std::mt19937_64 rng(43);
  int below = 0;
  for (int t = 0; t < 20; ++t) {
    const MeasureNetwork a = random_network(4, rng, true);
    const MeasureNetwork b = random_network(4, rng, true);
    const GwResult vertices = gw_distance_bruteforce(a, b);
    CHECK(vertices.distance <= permutation_gw(a, b, 2.0) + 1e-12);
    if (gw_distance(a, b).distance < permutation_gw(a, b, 2.0) - 1e-6) ++below;
  }
  CHECK(below > 0);
}

TEST_CASE("monotone descent") {
  std::mt19937_64 rng(44);
  for (int t = 0; t < 10; ++t) {
    const MeasureNetwork a = random_network(5, rng);
    const MeasureNetwork b = random_network(4, rng);
    for (Order p : {Order(1.0), Order(2.0), Order(3.0)}) {
      DistanceParams params;
      params.p = p;
      params.restarts = 3;
      for (const auto& rec : gw_distance(a, b, params).per_restart)
        for (std::size_t k = 1; k < rec.trace.size(); ++k) CHECK(rec.trace[k] <= rec.trace[k - 1] + 1e-10);
    }
  }
}

TEST_CASE("distance equals the distortion of the returned coupling") {
  std::mt19937_64 rng(45);
  const MeasureNetwork a = random_network(4, rng);
  const MeasureNetwork b = random_network(3, rng);
  const GwResult r = gw_distance(a, b);
  CHECK(r.distance == doctest::Approx(reference_gw_distortion(a.omega(), b.omega(), r.pi.matrix(), 2.0))
                          .epsilon(1e-12));
  CHECK(r.pi.marginal_violation() <= 1e-9);
}

TEST_CASE("symmetry") {
  std::mt19937_64 rng(46);
  for (int t = 0; t < 15; ++t) {
    const MeasureNetwork a = random_network(4, rng);
    const MeasureNetwork b = random_network(3 + t % 2, rng);
    CHECK(std::abs(gw_distance(a, b).distance - gw_distance(b, a).distance) <= 1e-7);
  }
}

TEST_CASE("triangle inequality on exact triples") {
  std::mt19937_64 rng(47);
  for (int t = 0; t < 10; ++t) {
    const MeasureNetwork a = gram_network(3, rng);
    const MeasureNetwork b = gram_network(3, rng);
    const MeasureNetwork c = gram_network(3, rng);
    const double ab = gw_distance_bruteforce(a, b).distance;
    const double bc = gw_distance_bruteforce(b, c).distance;
    const double ac = gw_distance_bruteforce(a, c).distance;
    CHECK(ac <= ab + bc + 1e-9);
  }
}

TEST_CASE("gw_distance_bruteforce examples") {
  std::mt19937_64 rng(48);
  const MeasureNetwork n = random_network(3, rng);
  CHECK(gw_distance_bruteforce(n, n).distance == 0.0);

  Matrix swap(2, 2);
  swap << 0, 1, 1, 0;
  const MeasureNetwork s({}, uniform_probability(2), swap);
  CHECK(gw_distance_bruteforce(s, s).distance == 0.0);

  for (int t = 0; t < 10; ++t) {
    const MeasureNetwork a = random_network(3, rng);
    const MeasureNetwork b = random_network(3, rng);
    const GwResult oracle = gw_distance_bruteforce(a, b);
    CHECK(oracle.method == "vertices");
    CHECK(oracle.certification.find("not a certified global minimum") != std::string::npos);
    for (const auto& rec : gw_distance(a, b).per_restart)
      CHECK(oracle.per_restart[0].objective <= rec.objective + 1e-9);
  }
  CHECK_THROWS_AS(gw_distance_bruteforce(random_network(7, rng, true), random_network(7, rng, true)),
                  Error);
  CHECK_THROWS_AS(gw_distance_bruteforce(n, n, Order::infinity()), Error);
}

TEST_CASE("infinite order is evaluated at the descent result and flagged") {
  std::mt19937_64 rng(49);
  const MeasureNetwork a = random_network(3, rng);
  const MeasureNetwork b = random_network(3, rng);
  DistanceParams params;
  params.p = Order::infinity();
  const GwResult r = gw_distance(a, b, params);
  CHECK_FALSE(r.certified_local);
  CHECK(r.distance == gw_distortion(a, b, r.pi, Order::infinity()));
}

TEST_CASE("labeled bipartite networks validate their structure") {
  Matrix w(2, 2);
  w << 0, 1, 1, 0;
  const MeasureNetwork ok({}, uniform_probability(2), w);
  CHECK_NOTHROW(LabeledBipartiteNetwork(ok, {true, false}));
  CHECK_THROWS_AS(LabeledBipartiteNetwork(ok, {true, true}), Error);
  CHECK_THROWS_AS(LabeledBipartiteNetwork(ok, {true}), Error);

  Vector skew(2);
  skew << 0.3, 0.7;
  CHECK_THROWS_AS(LabeledBipartiteNetwork(MeasureNetwork({}, skew, w), {true, false}), Error);
  Matrix inside(2, 2);
  inside << 1, 1, 1, 0;
  CHECK_THROWS_AS(LabeledBipartiteNetwork(MeasureNetwork({}, uniform_probability(2), inside),
                                          {true, false}),
                  Error);
  Matrix asym(2, 2);
  asym << 0, 1, 2, 0;
  CHECK_THROWS_AS(LabeledBipartiteNetwork(MeasureNetwork({}, uniform_probability(2), asym),
                                          {true, false}),
                  Error);
}

TEST_CASE("labeled distance examples") {
  std::mt19937_64 rng(50);
  const auto b = bipartite_incidence(random_hypernetwork(3, 2, rng));
  CHECK(labeled_gw_distance(b, b).distance <= 1e-8);
  CHECK(labeled_gw_distance_bruteforce(b, b).distance == 0.0);
}

TEST_CASE("labeled oracle equals the restricted vertex minimum") {
  std::mt19937_64 rng(51);
  for (int t = 0; t < 15; ++t) {
    const auto b1 = bipartite_incidence(random_hypernetwork(2 + t % 2, 3, rng));
    const auto b2 = bipartite_incidence(random_hypernetwork(3, 2 + t % 2, rng));
    for (double p : {1.0, 2.0}) {
      const GwResult r = labeled_gw_distance_bruteforce(b1, b2, Order(p));
      CHECK(r.distance == doctest::Approx(restricted_vertex_minimum(b1, b2, p)).epsilon(1e-12));
      CHECK(r.method == "exact");
      // Mass never crosses the blocks.
      for (auto i : b1.left_indices())
        for (auto j : b2.right_indices()) CHECK(r.pi(i, j) == 0.0);
    }
  }
}

TEST_CASE("labeled descent stays in the blocks and is dominated by the oracle") {
  std::mt19937_64 rng(52);
  for (int t = 0; t < 10; ++t) {
    const auto b1 = bipartite_incidence(random_hypernetwork(3, 3, rng));
    const auto b2 = bipartite_incidence(random_hypernetwork(3, 2, rng));
    const GwResult heuristic = labeled_gw_distance(b1, b2);
    for (auto i : b1.left_indices())
      for (auto j : b2.right_indices()) CHECK(heuristic.pi(i, j) == 0.0);
    for (auto i : b1.right_indices())
      for (auto j : b2.left_indices()) CHECK(heuristic.pi(i, j) == 0.0);
    CHECK(labeled_gw_distance_bruteforce(b1, b2).distance <= heuristic.distance + 1e-9);
    for (const auto& rec : heuristic.per_restart)
      for (std::size_t k = 1; k < rec.trace.size(); ++k) CHECK(rec.trace[k] <= rec.trace[k - 1] + 1e-10);
  }
}

TEST_CASE("bipartite isometry with both sides exact") {
  std::mt19937_64 rng(53);
  for (int t = 0; t < 20; ++t) {
    const auto h1 = random_hypernetwork(1 + t % 3, 1 + (t / 3) % 3, rng);
    const auto h2 = random_hypernetwork(1 + (t / 2) % 3, 1 + (t + 1) % 3, rng);
    for (double p : {1.0, 2.0}) {
      const double dh = coot_distance_bruteforce(h1, h2, Order(p)).distance;
      const double db = labeled_gw_distance_bruteforce(bipartite_incidence(h1), bipartite_incidence(h2),
                                                       Order(p))
                            .distance;
      CHECK(dh == doctest::Approx(std::pow(2.0, 1.0 / p) * db).epsilon(1e-9));
    }
  }
}

TEST_CASE("labeled is at least unlabeled") {
  std::mt19937_64 rng(54);
  for (int t = 0; t < 10; ++t) {
    const auto b1 = bipartite_incidence(random_hypernetwork(2, 2, rng));
    const auto b2 = bipartite_incidence(random_hypernetwork(2, 2, rng));
    const double labeled = labeled_gw_distance_bruteforce(b1, b2).distance;
    CHECK(labeled >= gw_distance_bruteforce(b1.network(), b2.network()).distance - 1e-9);
  }
}

TEST_CASE("restarts are deterministic across thread counts") {
  std::mt19937_64 rng(55);
  const MeasureNetwork a = random_network(5, rng);
  const MeasureNetwork b = random_network(5, rng);
  DistanceParams one, many;
  one.threads = 1;
  many.threads = 4;
  const GwResult r1 = gw_distance(a, b, one);
  const GwResult r4 = gw_distance(a, b, many);
  CHECK(r1.distance == r4.distance);
  CHECK(r1.pi.matrix() == r4.pi.matrix());
}

}  // TEST_SUITE

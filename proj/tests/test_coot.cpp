// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <iostream>
#include <random>

#include "helpers.hpp"
#include "hnet/coot.hpp"
#include "hnet/error.hpp"

using namespace hnet;
using namespace hnet::testing;

TEST_SUITE("coot") {

TEST_CASE("cost matrix for xi") {
  std::mt19937_64 rng(31);
  const auto h = random_hypernetwork(3, 4, rng);
  const Matrix self = coot_cost_matrix_for_xi(h, h, Coupling::diagonal(h.mu()));
  for (Eigen::Index y = 0; y < 4; ++y) CHECK(std::abs(self(y, y)) <= 1e-15);

  const auto h1 = random_hypernetwork(2, 2, rng);
  const auto h2 = random_hypernetwork(2, 3, rng);
  const Coupling pi = random_coupling(h1.mu(), h2.mu(), rng);
  for (double p : {2.0, 1.0, 3.0}) {
    const Matrix fast = coot_cost_matrix_for_xi(h1, h2, pi, Order(p));
    const Matrix ref = reference_cost_for_xi(h1.omega(), h2.omega(), pi.matrix(), p);
    CHECK((fast - ref).cwiseAbs().maxCoeff() <= 1e-12);
  }

  for (double alpha : {2.0, 3.0, 5.0}) {
    const auto ha = scaling_family(alpha);
    const auto h1a = scaling_family(1.0);
    const Matrix m = coot_cost_matrix_for_xi(ha, h1a, Coupling::diagonal(ha.mu()));
    Matrix expected(2, 2);
    expected << (alpha - 1) * (alpha - 1) / 2, (alpha * alpha + 1) / 2, (alpha * alpha + 1) / 2,
        (alpha - 1) * (alpha - 1) / 2;
    CHECK((m - expected).cwiseAbs().maxCoeff() <= 1e-14);
  }
  CHECK_THROWS_AS(coot_cost_matrix_for_xi(h, h, Coupling::diagonal(h.mu()), Order::infinity()), Error);
}

TEST_CASE("cost matrix for pi mirrors the xi form under duality") {
  std::mt19937_64 rng(32);
  for (int trial = 0; trial < 10; ++trial) {
    const auto h1 = random_hypernetwork(3, 2, rng);
    const auto h2 = random_hypernetwork(4, 3, rng);
    const Coupling xi = random_coupling(h1.nu(), h2.nu(), rng);
    const Matrix direct = coot_cost_matrix_for_pi(h1, h2, xi);
    const Matrix via_dual = coot_cost_matrix_for_xi(dualize(h1), dualize(h2), xi);
    CHECK(direct == via_dual);
    const Matrix ref = reference_cost_for_xi(h1.omega().transpose(), h2.omega().transpose(),
                                             xi.matrix(), 2.0);
    CHECK((direct - ref).cwiseAbs().maxCoeff() <= 1e-12);
  }
  const auto h = random_hypernetwork(3, 3, rng);
  const Matrix self = coot_cost_matrix_for_pi(h, h, Coupling::diagonal(h.nu()));
  for (Eigen::Index x = 0; x < 3; ++x) CHECK(std::abs(self(x, x)) <= 1e-15);
}

TEST_CASE("coot_distance examples") {
  std::mt19937_64 rng(33);
  const auto h = random_hypernetwork(4, 3, rng);
  const CootResult self = coot_distance(h, h);
  CHECK(self.distance <= 1e-8);

  for (double alpha : {2.0, 4.0}) {
    const CootResult r = coot_distance(scaling_family(alpha), scaling_family(1.0));
    CHECK(r.distance == doctest::Approx((alpha - 1) / std::sqrt(2.0)).epsilon(1e-6));
  }

  const CootResult weak = coot_distance(weak_iso_left(), weak_iso_right());
  CHECK(weak.distance <= 1e-8);
  CHECK(weak.per_restart.size() == 10);
  CHECK(weak.certified_local);
}

TEST_CASE("result invariants: distance equals the distortion of the couplings") {
  std::mt19937_64 rng(34);
  for (int trial = 0; trial < 5; ++trial) {
    const auto h1 = random_hypernetwork(4, 3, rng);
    const auto h2 = random_hypernetwork(3, 5, rng);
    for (Order p : {Order(1.0), Order(2.0), Order(3.0)}) {
      DistanceParams params;
      params.p = p;
      params.restarts = 4;
      const CootResult r = coot_distance(h1, h2, params);
      CHECK(r.distance >= 0.0);
      CHECK(std::abs(r.distance - coot_distortion(h1, h2, r.pi, r.xi, p)) <= 1e-9);
      CHECK(r.pi.marginal_violation() <= 1e-9);
      CHECK(r.xi.marginal_violation() <= 1e-9);
    }
  }
}

TEST_CASE("monotone descent across half-steps") {
  std::mt19937_64 rng(35);
  for (int trial = 0; trial < 10; ++trial) {
    const auto h1 = random_hypernetwork(5, 4, rng);
    const auto h2 = random_hypernetwork(4, 6, rng);
    DistanceParams params;
    params.p = trial % 2 == 0 ? Order(2.0) : Order(1.0);
    params.restarts = 5;
    params.seed = static_cast<std::uint64_t>(trial);
    const CootResult r = coot_distance(h1, h2, params);
    for (const auto& rec : r.per_restart)
      for (std::size_t k = 1; k < rec.trace.size(); ++k) CHECK(rec.trace[k] <= rec.trace[k - 1] + 1e-10);
  }
}

TEST_CASE("coot_distance_bruteforce examples") {
  std::mt19937_64 rng(36);
  const auto h = random_hypernetwork(3, 4, rng);
  CHECK(coot_distance_bruteforce(h, h).distance == 0.0);
  for (double alpha : {2.0, 4.0, 8.0})
    for (double p : {1.0, 2.0}) {
      const CootResult r = coot_distance_bruteforce(scaling_family(alpha), scaling_family(1.0), Order(p));
      CHECK(std::abs(r.distance - (alpha - 1) / std::pow(2.0, 1.0 / p)) <= 1e-12);
    }
  CHECK_THROWS_AS(coot_distance_bruteforce(h, h, Order::infinity()), Error);
  const auto big1 = random_hypernetwork(7, 7, rng);
  const auto big2 = random_hypernetwork(7, 7, rng);
  CHECK_THROWS_AS(coot_distance_bruteforce(big1, big2), Error);
}

TEST_CASE("oracle dominates and usually matches the heuristic") {
  std::mt19937_64 rng(37);
  int matched = 0;
  const int trials = 40;
  for (int trial = 0; trial < trials; ++trial) {
    const auto h1 = random_hypernetwork(3, 3, rng, true);
    const auto h2 = random_hypernetwork(3, 3, rng, true);
    DistanceParams params;
    params.seed = static_cast<std::uint64_t>(trial);
    const CootResult bcd = coot_distance(h1, h2, params);
    const CootResult exact = coot_distance_bruteforce(h1, h2);
    for (const auto& rec : bcd.per_restart)
      CHECK(exact.per_restart[0].objective <= rec.objective + 1e-9);
    CHECK(exact.distance <= bcd.distance + 1e-9);
    if (std::abs(exact.distance - bcd.distance) <= 1e-6) ++matched;
  }
  MESSAGE("bcd matched the oracle on " << matched << "/" << trials << " uniform 3x3 instances");
  CHECK(matched >= 38);
}

TEST_CASE("symmetry and dual invariance") {
  std::mt19937_64 rng(38);
  for (int trial = 0; trial < 30; ++trial) {
    const auto h1 = random_hypernetwork(3, 3 + trial % 2, rng, trial % 3 == 0);
    const auto h2 = random_hypernetwork(3, 3, rng, trial % 2 == 0);
    DistanceParams params;
    params.seed = 100 + static_cast<std::uint64_t>(trial);
    const double d12 = coot_distance(h1, h2, params).distance;
    const double d21 = coot_distance(h2, h1, params).distance;
    const double dual = coot_distance(dualize(h1), dualize(h2), params).distance;
    const double exact = coot_distance_bruteforce(h1, h2).distance;
    // Starts are drawn per side and both alternation orders run, so swapped and
    // dualized inputs replay the same descents even when they stop short of the optimum.
    CHECK(d12 >= exact - 1e-12);
    CHECK(std::abs(d12 - d21) <= 1e-7);
    CHECK(std::abs(d12 - dual) <= 1e-7);
    CHECK(std::abs(coot_distance_bruteforce(h2, h1).distance - exact) <= 1e-12);
  }
}

TEST_CASE("triangle inequality on exact distances") {
  std::mt19937_64 rng(39);
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = random_hypernetwork(2 + trial % 3, 3, rng);
    const auto b = random_hypernetwork(3, 2 + trial % 2, rng);
    const auto c = random_hypernetwork(4, 2 + trial % 3, rng);
    for (double p : {1.0, 2.0}) {
      const double ab = coot_distance_bruteforce(a, b, Order(p)).distance;
      const double bc = coot_distance_bruteforce(b, c, Order(p)).distance;
      const double ac = coot_distance_bruteforce(a, c, Order(p)).distance;
      CHECK(ac <= ab + bc + 1e-9);
    }
  }
}

TEST_CASE("geodesic points are evenly spaced") {
  std::mt19937_64 rng(40);
  const double times[] = {0.0, 0.25, 0.5, 1.0};
  for (int trial = 0; trial < 4; ++trial) {
    const auto h1 = random_hypernetwork(2, 2, rng);
    const auto h2 = random_hypernetwork(2, 2, rng);
    const CootResult best = coot_distance_bruteforce(h1, h2);
    for (double s : times)
      for (double t : times) {
        if (t <= s) continue;
        const auto gs = geodesic_point(h1, h2, best.pi, best.xi, s);
        const auto gt = geodesic_point(h1, h2, best.pi, best.xi, t);
        CHECK(std::abs(coot_distance_bruteforce(gs, gt).distance - (t - s) * best.distance) <= 1e-8);
      }
    CHECK(coot_distance_bruteforce(h1, geodesic_point(h1, h2, best.pi, best.xi, 0.0)).distance <= 1e-8);
    CHECK(coot_distance_bruteforce(h2, geodesic_point(h1, h2, best.pi, best.xi, 1.0)).distance <= 1e-8);
  }
}

TEST_CASE("collapse preserves the exact distance") {
  std::mt19937_64 rng(41);
  CHECK(coot_distance_bruteforce(collapse_canonical(weak_iso_left()),
                                 collapse_canonical(weak_iso_right()))
            .distance == 0.0);
  std::uniform_int_distribution<int> level(0, 1);
  for (int trial = 0; trial < 20; ++trial) {
    Matrix w(4, 3);
    for (Eigen::Index i = 0; i < 4; ++i)
      for (Eigen::Index j = 0; j < 3; ++j) w(i, j) = level(rng);
    const MeasureHypernetwork h({}, random_probability(4, rng), {}, random_probability(3, rng), w);
    const auto c = collapse_canonical(h);
    CHECK(c.mu().sum() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(c.nu().sum() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(coot_distance_bruteforce(h, c).distance <= 1e-9);
  }
}

TEST_CASE("infinite order is a flagged upper bound") {
  const DistanceParams params{Order::infinity()};
  const CootResult r = coot_distance(scaling_family(3.0), scaling_family(1.0), params);
  CHECK_FALSE(r.certified_local);
  CHECK(r.distance == doctest::Approx(2.0));
}

TEST_CASE("entropic inner solver") {
  std::mt19937_64 rng(42);
  const auto h1 = random_hypernetwork(3, 3, rng);
  const auto h2 = random_hypernetwork(3, 3, rng);
  DistanceParams params;
  params.solver = Solver::entropic;
  params.epsilon = 1e-2;
  params.restarts = 3;
  const CootResult r = coot_distance(h1, h2, params);
  const double exact = coot_distance_bruteforce(h1, h2).distance;
  CHECK(r.distance >= exact - 1e-12);
  CHECK(r.distance <= exact + 0.1);
  CHECK_FALSE(r.certified_local);
}

TEST_CASE("deterministic across thread counts") {
  std::mt19937_64 rng(43);
  const auto h1 = random_hypernetwork(6, 5, rng);
  const auto h2 = random_hypernetwork(5, 6, rng);
  DistanceParams serial;
  serial.threads = 1;
  serial.seed = 9;
  DistanceParams wide = serial;
  wide.threads = 4;
  const CootResult a = coot_distance(h1, h2, serial);
  const CootResult b = coot_distance(h1, h2, wide);
  CHECK(a.distance == b.distance);
  CHECK(a.pi.matrix() == b.pi.matrix());
  CHECK(a.best_restart == b.best_restart);
}

}  // TEST_SUITE

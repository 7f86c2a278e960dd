// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "hnet/coot.hpp"
#include "hnet/graphify.hpp"
#include "hnet/gw.hpp"

using namespace hnet;
using namespace hnet::testing;

namespace {

// Hyperedges a = {1,2}, b = {1,3,4}, c = {2,4,5}, d = {3,4} as an incidence relation.
MeasureHypernetwork five_by_four() {
  Matrix w(5, 4);
  w << 1, 1, 0, 0,  //
      1, 0, 1, 0,   //
      0, 1, 0, 1,   //
      0, 1, 1, 1,   //
      0, 0, 1, 0;
  return MeasureHypernetwork({"1", "2", "3", "4", "5"}, uniform_probability(5),
                             {"a", "b", "c", "d"}, uniform_probability(4), w);
}

double direct_clique_entry(const MeasureHypernetwork& h, Eigen::Index a, Eigen::Index b, Order q) {
  const Matrix& w = h.omega();
  if (q.is_infinite()) {
    double m = 0.0;
    for (Eigen::Index y = 0; y < w.cols(); ++y) m = std::max(m, std::min(w(a, y), w(b, y)));
    return m;
  }
  long double s = 0.0L;
  for (Eigen::Index y = 0; y < w.cols(); ++y) s += std::pow(std::min(w(a, y), w(b, y)), q.value()) * h.nu()[y];
  return std::pow(static_cast<double>(s), 1.0 / q.value());
}

}  // namespace

TEST_SUITE("graphify") {

TEST_CASE("bipartite_incidence examples") {
  const auto b = bipartite_incidence(five_by_four());
  const auto& net = b.network();
  CHECK(net.size() == 9);
  for (int i = 0; i < 5; ++i) CHECK(net.mu()[i] == 0.1);
  for (int i = 5; i < 9; ++i) CHECK(net.mu()[i] == 0.125);
  CHECK(net.omega()(0, 5) == 1.0);
  CHECK(net.omega()(5, 0) == 1.0);
  CHECK(net.omega()(0, 1) == 0.0);
  CHECK(b.left_indices().size() == 5);
  CHECK(net.ids()[5] == "a");

  const MeasureHypernetwork single({}, Vector::Ones(1), {}, Vector::Ones(1), Matrix::Constant(1, 1, 2.5));
  const auto s = bipartite_incidence(single);
  Matrix expect(2, 2);
  expect << 0, 2.5, 2.5, 0;
  CHECK(s.network().omega() == expect);
  // Default labels collide ("0" on both sides), so both get prefixed.
  CHECK(s.network().ids()[0] == "n:0");
  CHECK(s.network().ids()[1] == "e:0");
}

TEST_CASE("bipartite_restriction inverts bipartite_incidence") {
  std::mt19937_64 rng(61);
  for (int t = 0; t < 10; ++t) {
    const auto h = random_hypernetwork(1 + t % 4, 1 + (t / 2) % 4, rng);
    CHECK(bipartite_restriction(bipartite_incidence(h)) == h);
  }
  CHECK(bipartite_restriction(bipartite_incidence(five_by_four())) == five_by_four());
}

TEST_CASE("clique_expansion examples") {
  const auto h = five_by_four();
  const auto adj = clique_expansion(h, Order::infinity());
  // Pairs sharing a hyperedge: 12 13 14 24 25 34 45.
  Matrix expect(5, 5);
  expect << 1, 1, 1, 1, 0,  //
      1, 1, 0, 1, 1,        //
      1, 0, 1, 1, 0,        //
      1, 1, 1, 1, 1,        //
      0, 1, 0, 1, 1;
  CHECK(adj.omega() == expect);

  const auto share = clique_expansion(h, Order(1.0));
  CHECK(share.omega()(2, 3) == 0.5);  // nodes 3 and 4 share b and d
  CHECK(share.omega()(0, 1) == 0.25);
  CHECK(share.omega()(0, 4) == 0.0);
  CHECK(share.omega()(3, 3) == 0.75);

  std::mt19937_64 rng(62);
  const Vector mu = random_probability(3, rng);
  const Vector nu = random_probability(4, rng);
  const MeasureHypernetwork constant({}, mu, {}, nu, Matrix::Constant(3, 4, 0.7));
  for (Order q : {Order(1.0), Order(2.0), Order(3.5), Order::infinity()})
    CHECK((clique_expansion(constant, q).omega().array() - 0.7).abs().maxCoeff() <= 1e-15);
}

TEST_CASE("line_graph examples") {
  const auto h = five_by_four();
  const auto lg = line_graph(h, Order::infinity());
  // Overlaps: ab ac bc bd cd; a and d are disjoint.
  Matrix expect = Matrix::Ones(4, 4);
  expect(0, 3) = expect(3, 0) = 0.0;
  CHECK(lg.omega() == expect);
  CHECK(lg.ids() == h.hyperedge_ids());

  std::mt19937_64 rng(63);
  for (int t = 0; t < 10; ++t) {
    const auto r = random_hypernetwork(3 + t % 2, 4, rng);
    for (Order q : {Order(1.0), Order(2.0), Order::infinity()}) {
      CHECK(line_graph(r, q).omega() == clique_expansion(dualize(r), q).omega());
      const auto cq = clique_expansion(r, q);
      for (Eigen::Index a = 0; a < 3; ++a)
        for (Eigen::Index b = 0; b < 3; ++b)
          CHECK(cq.omega()(a, b) == doctest::Approx(direct_clique_entry(r, a, b, q)).epsilon(1e-14));
    }
  }
}

TEST_CASE("matrix_product_line_graph examples") {
  for (double alpha : {2.0, 4.0}) {
    const auto l = matrix_product_line_graph(scaling_family(alpha));
    Matrix expect = Matrix::Zero(2, 2);
    expect(0, 0) = expect(1, 1) = alpha * alpha / 2.0;
    CHECK(l.omega() == expect);
  }
  // Hyperedges {1,2} and {2,3}: intersection sizes [[2,1],[1,2]].
  Matrix w(3, 2);
  w << 1, 0, 1, 1, 0, 1;
  const MeasureHypernetwork h({}, uniform_probability(3), {}, uniform_probability(2), w);
  Matrix sizes(2, 2);
  sizes << 2, 1, 1, 2;
  CHECK((matrix_product_line_graph(h).omega() - sizes / 3.0).cwiseAbs().maxCoeff() <= 1e-16);

  std::mt19937_64 rng(64);
  const auto one = random_hypernetwork(4, 1, rng);
  double expect_single = 0.0;
  for (int x = 0; x < 4; ++x) expect_single += one.mu()[x] * one.omega()(x, 0) * one.omega()(x, 0);
  CHECK(matrix_product_line_graph(one).omega()(0, 0) == doctest::Approx(expect_single).epsilon(1e-15));
}

TEST_CASE("clique and line maps are 2-Lipschitz on exact pairs") {
  std::mt19937_64 rng(65);
  for (int t = 0; t < 8; ++t) {
    const auto h1 = random_hypernetwork(2 + t % 2, 2 + (t / 2) % 2, rng);
    const auto h2 = random_hypernetwork(3 - t % 2, 2 + (t / 4) % 2, rng);
    for (double p : {1.0, 2.0}) {
      const double dh = coot_distance_bruteforce(h1, h2, Order(p)).distance;
      for (double q : {1.0, 2.0}) {
        if (q > p) continue;
        const double dq = gw_distance_bruteforce(clique_expansion(h1, Order(q)),
                                                 clique_expansion(h2, Order(q)), Order(p))
                              .distance;
        const double dl = gw_distance_bruteforce(line_graph(h1, Order(q)), line_graph(h2, Order(q)),
                                                 Order(p))
                              .distance;
        CHECK(dq <= 2.0 * dh + 1e-9);
        CHECK(dl <= 2.0 * dh + 1e-9);
      }
    }
  }
}

TEST_CASE("matrix-product line graph is not Lipschitz") {
  for (double alpha : {2.0, 4.0, 8.0, 16.0}) {
    const double dh = coot_distance_bruteforce(scaling_family(alpha), scaling_family(1.0)).distance;
    const double dn = gw_distance_bruteforce(matrix_product_line_graph(scaling_family(alpha)),
                                             matrix_product_line_graph(scaling_family(1.0)))
                          .distance;
    CHECK(dn == doctest::Approx((alpha * alpha - 1.0) / (2.0 * std::sqrt(2.0))).epsilon(1e-12));
    CHECK(dn / dh == doctest::Approx((alpha + 1.0) / 2.0).epsilon(1e-9));
  }
}

TEST_CASE("weakly isomorphic inputs give isomorphic graphifications") {
  const auto left = weak_iso_left();
  const auto right = weak_iso_right();
  CHECK(coot_distance_bruteforce(left, right).distance <= 1e-12);
  for (Order q : {Order(1.0), Order(2.0), Order::infinity()}) {
    CHECK(gw_distance_bruteforce(clique_expansion(left, q), clique_expansion(right, q)).distance <= 1e-9);
    CHECK(gw_distance_bruteforce(line_graph(left, q), line_graph(right, q)).distance <= 1e-9);
  }
}

}  // TEST_SUITE

// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <set>

#include "hnet/error.hpp"
#include "hnet/io.hpp"
#include "hnet/simplify.hpp"

using namespace hnet;

namespace {

CombinatorialHypergraph five_four() {
  return parse_hypergraph(io::read_file(std::string(HNET_FIXTURE_DIR) + "/five_four.txt"));
}

// Two copies of one hyperedge plus a neighbour.
CombinatorialHypergraph with_duplicate() {
  return CombinatorialHypergraph({"1", "2", "3"}, {{"a", {"1", "2"}}, {"b", {"1", "2"}}, {"c", {"2", "3"}}});
}

}  // namespace

TEST_SUITE("simplify") {

TEST_CASE("step 0 is the input and the last step has one hyperedge") {
  const auto g = five_four();
  const auto t = simplification_sequence(g, SimplifyMode::hyperedge, LineWeight::jaccard);
  REQUIRE(t.steps.size() >= 2);
  CHECK(t.steps.front().hypergraph == g);
  CHECK(t.steps.back().hypergraph.num_hyperedges() == 1);
  CHECK(t.steps.back().hypergraph.num_nodes() == g.num_nodes());
  // Merge weights strictly increase; one step per distinct MST weight.
  for (std::size_t i = 2; i < t.steps.size(); ++i) CHECK(t.steps[i].merge_weight > t.steps[i - 1].merge_weight);
  double total = 0.0;
  for (double w : t.steps.back().hypergraph.hyperedge_weights()) total += w;
  CHECK(total == doctest::Approx(4.0));
}

TEST_CASE("every level covers the same nodes and counts stay monotone") {
  const auto g = five_four();
  for (auto w : {LineWeight::jaccard, LineWeight::intersection, LineWeight::overlap}) {
    const auto t = simplification_sequence(g, SimplifyMode::hyperedge, w);
    for (std::size_t i = 1; i < t.steps.size(); ++i) {
      CHECK(t.steps[i].hypergraph.num_hyperedges() < t.steps[i - 1].hypergraph.num_hyperedges());
      CHECK_FALSE(t.steps[i].merged.empty());
    }
  }
}

TEST_CASE("identical hyperedges collapse first") {
  const auto t = simplification_sequence(with_duplicate(), SimplifyMode::hyperedge, LineWeight::jaccard);
  REQUIRE(t.steps.size() == 3);
  CHECK(t.steps[1].merge_weight == 1.0);
  REQUIRE(t.steps[1].merged.size() == 1);
  CHECK(t.steps[1].merged[0] == Labels{"a", "b"});
  CHECK(t.steps[1].hypergraph.hyperedge_ids() == Labels{"a+b", "c"});
  CHECK(t.steps[1].hypergraph.hyperedge_weights() == std::vector<double>{2.0, 1.0});
}

TEST_CASE("node mode merges nodes through the dual") {
  const auto g = five_four();
  const auto t = simplification_sequence(g, SimplifyMode::node, LineWeight::jaccard);
  CHECK(t.steps.front().hypergraph == g);
  const auto& last = t.steps.back().hypergraph;
  CHECK(last.num_nodes() == 1);
  CHECK(last.num_hyperedges() == g.num_hyperedges());
}

TEST_CASE("a disconnected hypergraph is rejected with its components") {
  const CombinatorialHypergraph g({"1", "2", "3"}, {{"a", {"1", "2"}}, {"b", {"3"}}});
  try {
    simplification_sequence(g, SimplifyMode::hyperedge, LineWeight::jaccard);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::disconnected);
    CHECK(std::string(e.what()).find("{a}, {b}") != std::string::npos);
  }
}

TEST_CASE("distance curve starts at zero and the duplicate merge costs nothing") {
  DistanceParams params;
  params.restarts = 6;
  auto t = simplification_sequence(with_duplicate(), SimplifyMode::hyperedge, LineWeight::jaccard);
  distance_curve(t, ModelParams{}, params);
  REQUIRE(t.has_distances);
  CHECK(t.steps[0].min_distance <= 1e-8);
  CHECK(t.steps[1].min_distance <= 1e-6);
  CHECK(t.steps[2].min_distance > 1e-3);
  for (const auto& s : t.steps) {
    CHECK(s.restart_distances.size() == 6);
    for (double d : s.restart_distances) CHECK(d >= s.min_distance - 1e-9);
  }

  auto plain = simplification_sequence(with_duplicate(), SimplifyMode::hyperedge, LineWeight::jaccard, false);
  distance_curve(plain, ModelParams{}, params);
  CHECK(plain.steps[1].min_distance > 1e-3);
}

TEST_CASE("elbow detection") {
  SUBCASE("a single jump") {
    const auto e = detect_elbow({0, 0, 0, 5, 5.1});
    CHECK_FALSE(e.no_elbow);
    REQUIRE(!e.ranked.empty());
    CHECK(e.ranked[0].step == 3);
    CHECK(e.ranked[0].score == doctest::Approx(5.0));
    CHECK(e.ranked.size() == 3);
  }
  SUBCASE("a linear curve has none") {
    CHECK(detect_elbow({0, 1, 2, 3, 4}).no_elbow);
  }
  SUBCASE("larger jump ranks first") {
    const auto e = detect_elbow({0, 0, 1, 1, 1, 4, 4});
    CHECK(e.ranked[0].step == 5);
    CHECK(e.ranked[1].step == 2);
  }
  SUBCASE("ties go to the earlier step") {
    const auto e = detect_elbow({0, 0, 1, 1, 2, 2});
    CHECK(e.ranked[0].step == 2);
    CHECK(e.ranked[1].step == 4);
  }
  CHECK_THROWS_AS(detect_elbow({1, 2}), Error);
}

}  // TEST_SUITE

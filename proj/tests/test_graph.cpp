#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "rloc/graph.hpp"

using namespace rloc;

namespace {

RangeGraph square_with_diagonal() {
  return RangeGraph(4, {0, 1}, {{0, 1, 1.0}, {1, 2, 1.0}, {2, 3, 1.0}, {3, 0, 1.0}, {0, 2, std::sqrt(2.0)}});
}

}  // namespace

TEST_CASE("range graph normalizes and indexes edges") {
  const RangeGraph g = square_with_diagonal();
  REQUIRE(g.edges().size() == 5);
  for (const Edge& e : g.edges()) CHECK(e.i < e.j);
  // Edge (3, 0) is stored as (0, 3) and sorted.
  CHECK(g.edges()[1].i == 0);
  CHECK(g.edges()[1].j == 2);
  CHECK(g.edges()[2].j == 3);
  CHECK(g.measured(3, 0) == g.measured(0, 3));
  CHECK(g.has_edge(2, 0));
  CHECK_FALSE(g.has_edge(1, 3));
  CHECK_FALSE(g.measured(1, 3).has_value());
  CHECK(g.degree(0) == 3);
  CHECK(g.mean_degree() == doctest::Approx(2.5));
  CHECK(g.is_anchor(1));
  CHECK_FALSE(g.is_anchor(2));
  const auto nb = g.neighbors(0);
  REQUIRE(nb.size() == 3);
  CHECK(nb[0].vertex == 1);
  CHECK(nb[1].vertex == 2);
  CHECK(nb[2].vertex == 3);
}

TEST_CASE("range graph rejects malformed input") {
  CHECK_THROWS_AS(RangeGraph(3, {}, {{1, 1, 1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(RangeGraph(3, {}, {{0, 1, 1.0}, {1, 0, 2.0}}), std::invalid_argument);
  CHECK_THROWS_AS(RangeGraph(3, {}, {{0, 1, 0.0}}), std::invalid_argument);
  CHECK_THROWS_AS(RangeGraph(3, {}, {{0, 1, -2.0}}), std::invalid_argument);
  CHECK_THROWS_AS(RangeGraph(3, {}, {{0, 3, 1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(RangeGraph(3, {3}, {}), std::invalid_argument);
  CHECK_THROWS_AS(RangeGraph(3, {1, 1}, {}), std::invalid_argument);
  CHECK_THROWS_AS(RangeGraph(3, {}, {{0, 1, INFINITY}}), std::invalid_argument);
}

TEST_CASE("connected parts are sorted and ordered by smallest member") {
  const RangeGraph g(6, {}, {{4, 5, 1.0}, {0, 2, 1.0}, {1, 3, 1.0}, {3, 5, 1.0}});
  const auto parts = g.connected_parts();
  REQUIRE(parts.size() == 2);
  CHECK(parts[0] == std::vector<int>{0, 2});
  CHECK(parts[1] == std::vector<int>{1, 3, 4, 5});
  CHECK_FALSE(g.is_connected());
  CHECK(square_with_diagonal().is_connected());
}

TEST_CASE("induced subgraph keeps anchors and internal edges") {
  const RangeGraph g = square_with_diagonal();
  const std::vector<int> pick{2, 0, 3};
  const Subgraph sub = induced_subgraph(g, pick);
  CHECK(sub.to_parent == pick);
  CHECK(sub.graph.node_count() == 3);
  // Parent anchor 0 is local vertex 1.
  REQUIRE(sub.graph.anchors().size() == 1);
  CHECK(sub.graph.anchors()[0] == 1);
  // Parent edges 0-2, 2-3, 0-3 survive.
  CHECK(sub.graph.edges().size() == 3);
  CHECK(sub.graph.measured(0, 1) == doctest::Approx(std::sqrt(2.0)));
  const std::vector<int> dup{1, 1};
  CHECK_THROWS_AS(induced_subgraph(g, dup), std::invalid_argument);
}

TEST_CASE("noise application") {
  CHECK(apply_noise(10.0, NoiseModel::multiplicative(0.1, 30.0), 1.0) == doctest::Approx(11.0));
  CHECK(apply_noise(10.0, NoiseModel::none(), 3.0) == 10.0);
  CHECK(apply_noise(1.0, NoiseModel::additive(0.5, 0.3), 2.0) == doctest::Approx(1.3));
  CHECK(apply_noise(1.0, NoiseModel::additive(0.5, 0.3), -2.0) == doctest::Approx(0.7));
  // A pathological draw stays positive.
  CHECK(apply_noise(1.0, NoiseModel::multiplicative(0.5, 1.0), -10.0) > 0.0);
  CHECK(NoiseModel::multiplicative(0.1, 30.0).bound == doctest::Approx(6.0));
}

TEST_CASE("noise model validation and names") {
  NoiseModel bad{NoiseKind::kNone, 0.2, 0.0};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  NoiseModel negative{NoiseKind::kAdditiveBounded, -1.0, 0.0};
  CHECK_THROWS_AS(negative.validate(), std::invalid_argument);
  for (NoiseKind k : {NoiseKind::kNone, NoiseKind::kMultiplicativeGaussian, NoiseKind::kAdditiveBounded}) {
    CHECK(noise_kind_from_string(to_string(k)) == k);
  }
  CHECK_THROWS_AS(noise_kind_from_string("lognormal"), std::invalid_argument);
}

TEST_CASE("ambiguous region check is annulus membership") {
  const RangeGraph g(2, {0}, {{0, 1, 5.0}});
  EmbeddedGraph eg{g, {Point2{0, 0}, std::nullopt}};
  CHECK(ambiguous_region_check({5.0, 0.0}, 1, eg, 0.1));
  CHECK_FALSE(ambiguous_region_check({5.2, 0.0}, 1, eg, 0.1));
  CHECK(ambiguous_region_check({0.0, -5.05}, 1, eg, 0.1));

  EmbeddedGraph lonely{g, {std::nullopt, Point2{1, 1}}};
  CHECK_THROWS_WITH_AS(ambiguous_region_check({0, 0}, 1, lonely, 1.0), "unconstrained vertex", std::invalid_argument);
}

TEST_CASE("embedded graph location access") {
  EmbeddedGraph eg{square_with_diagonal(), {Point2{0, 0}, std::nullopt}};
  CHECK(eg.located(0));
  CHECK_FALSE(eg.located(1));
  CHECK_FALSE(eg.located(3));
  CHECK(eg.at(0) == Point2{0, 0});
  CHECK_THROWS_AS(eg.at(1), std::invalid_argument);
}

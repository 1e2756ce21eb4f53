#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "oracles.hpp"
#include "rloc/flip_risk.hpp"

using namespace rloc;

namespace {

Band band_through(Point2 a, Point2 b, double c = 0.1) { return Band{0, 1, a, b, {0, 1}, c}; }

// s1=(0,1), s2=(0,-1), l=(-1,0), r=(1,0) as vertices 0..3.
EmbeddedGraph bowtie(std::vector<int> anchors) {
  const double s = std::sqrt(2.0);
  RangeGraph g(4, std::move(anchors), {{0, 2, s}, {1, 2, s}, {0, 3, s}, {1, 3, s}, {0, 1, 2.0}});
  return EmbeddedGraph{g, {Point2{0, 1}, Point2{0, -1}, Point2{-1, 0}, Point2{1, 0}}};
}

double max_length_error(const EmbeddedGraph& eg, const LocationMap& locations) {
  double worst = 0.0;
  for (const Edge& e : eg.graph.edges()) {
    worst = std::max(worst, std::abs(distance(*locations[e.i], *locations[e.j]) - e.measured));
  }
  return worst;
}

}  // namespace

TEST_CASE("point side and band distance") {
  const Band x_axis = band_through({0, 0}, {1, 0});
  CHECK(point_line_side(x_axis, {0.5, 2}) == 1);
  CHECK(point_line_side(x_axis, {0.5, -2}) == -1);
  CHECK(point_line_side(x_axis, {2, 0}) == 0);
  CHECK(point_band_distance({0, 1}, x_axis) == doctest::Approx(1.0));
  CHECK(point_band_distance({7, 0}, x_axis) == 0.0);
  // |cross((1, 0.05), (2, 0))| / |(1, 0.05)|
  const double expected = 0.1 / std::hypot(1.0, 0.05);
  CHECK(point_band_distance({2, 0}, band_through({0, 0}, {1, 0.05})) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(expected == doctest::Approx(0.0999).epsilon(1e-3));
}

TEST_CASE("nearest band lookup") {
  const std::vector<Band> bands{band_through({0, 0.3}, {1, 0.3}), band_through({0, 0.1}, {1, 0.1}),
                                band_through({0, -0.1}, {1, -0.1})};
  const std::vector<std::size_t> first{0};
  auto hit = find_min_dis({0, 0}, bands, first);
  REQUIRE(hit);
  CHECK(hit->band == 0);
  CHECK(hit->distance == doctest::Approx(0.3));

  const std::vector<std::size_t> two{0, 1};
  hit = find_min_dis({0, 0}, bands, two);
  CHECK(hit->band == 1);
  CHECK(hit->distance == doctest::Approx(0.1));

  const std::vector<std::size_t> tie{2, 1};
  CHECK(find_min_dis({0, 0}, bands, tie)->band == 1);
  CHECK_FALSE(find_min_dis({0, 0}, bands, {}).has_value());
}

TEST_CASE("band generation examples") {
  const RangeGraph g3(3, {}, {});
  SUBCASE("collinear points share one band") {
    const EmbeddedGraph eg{g3, {Point2{0, 0}, Point2{1, 0}, Point2{2, 0}}};
    const auto bands = generate_bands(eg, 0.1);
    REQUIRE(bands.size() == 1);
    CHECK(bands[0].members == std::vector<int>{0, 1, 2});
  }
  SUBCASE("triangle gives three pair bands") {
    const EmbeddedGraph eg{g3, {Point2{0, 0}, Point2{1, 0}, Point2{0.5, 1}}};
    const auto bands = generate_bands(eg, 0.1);
    REQUIRE(bands.size() == 3);
    for (const Band& b : bands) CHECK(b.members.size() == 2);
  }
  SUBCASE("near-collinear point merges within c") {
    const EmbeddedGraph eg{g3, {Point2{0, 0}, Point2{1, 0.05}, Point2{2, 0}}};
    const auto bands = generate_bands(eg, 0.15);
    REQUIRE(bands.size() == 1);
    CHECK(bands[0].members == std::vector<int>{0, 1, 2});
    CHECK(generate_bands(eg, 0.05).size() == 3);
  }
  SUBCASE("degenerate inputs") {
    const EmbeddedGraph single{RangeGraph(1, {}, {}), {Point2{0, 0}}};
    CHECK(generate_bands(single, 0.1).empty());
    const EmbeddedGraph partial{g3, {Point2{0, 0}, std::nullopt, Point2{1, 1}}};
    CHECK_THROWS_AS(generate_bands(partial, 0.1), std::invalid_argument);
    const EmbeddedGraph eg{g3, {Point2{0, 0}, Point2{0, 0}, Point2{1, 1}}};
    CHECK_THROWS_AS(generate_bands(eg, 0.0), std::invalid_argument);
    // Coincident points never open a band of their own.
    for (const Band& b : generate_bands(eg, 0.1)) CHECK(distance(b.from, b.to) > 0.0);
  }
}

TEST_CASE("band invariants on random embeddings") {
  RandomStream rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 4 + trial % 7;
    EmbeddedGraph eg{RangeGraph(n, {}, {}), {}};
    for (int v = 0; v < n; ++v) eg.locations.emplace_back(Point2{rng.uniform(0, 10), rng.uniform(0, 10)});
    const double c = 0.5;
    const auto bands = generate_bands(eg, c);
    for (const Band& b : bands) {
      CHECK(b.u != b.w);
      CHECK(std::binary_search(b.members.begin(), b.members.end(), b.u));
      CHECK(std::binary_search(b.members.begin(), b.members.end(), b.w));
      for (int m : b.members) CHECK(point_band_distance(eg.at(m), b) <= c + 1e-12);
    }
    // Every pair shares a band or is not within c of any shared band line.
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        bool shared = false;
        for (const Band& b : bands) {
          shared = shared || (std::binary_search(b.members.begin(), b.members.end(), i) &&
                              std::binary_search(b.members.begin(), b.members.end(), j));
        }
        CHECK(shared);
      }
    }
  }
}

TEST_CASE("mirror detection on the triangle and bowtie") {
  const RangeGraph tri(3, {0}, {{0, 1, 1.0}, {1, 2, 1.0}, {0, 2, 1.0}});
  const EmbeddedGraph eg{tri, {Point2{0, 0}, Point2{1, 0}, Point2{0.5, std::sqrt(0.75)}}};
  CHECK(find_mirrors(eg, 0.1).mirror_count == 0);

  const MirrorReport free = find_mirrors(bowtie({}), 0.1);
  REQUIRE(free.mirror_count == 1);
  const auto idx = free.mirror_indices();
  REQUIRE(idx.size() == 1);
  const BandCheck& check = free.checks[idx[0]];
  CHECK(check.members == std::vector<int>{0, 1});
  CHECK(check.verdict == BandVerdict::kMirror);
  // Line s1 -> s2 points down, so r = (1, 0) is on its left.
  CHECK(check.plus == std::vector<int>{3});
  CHECK(check.minus == std::vector<int>{2});
  for (std::size_t k = 0; k < free.checks.size(); ++k) {
    if (k != idx[0]) CHECK(free.checks[k].verdict != BandVerdict::kMirror);
  }

  const MirrorReport anchored = find_mirrors(bowtie({2, 3}), 0.1);
  CHECK(anchored.mirror_count == 0);
  CHECK(anchored.checks[idx[0]].verdict == BandVerdict::kAnchorsBothSides);
  CHECK(find_mirrors(bowtie({2}), 0.1).mirror_count == 1);
  CHECK(to_string(BandVerdict::kCrossingEdge) == "crossing-edge");
}

TEST_CASE("mirror report partitions the vertex set") {
  RandomStream rng(5);
  for (int trial = 0; trial < 40; ++trial) {
    const EmbeddedGraph eg = oracle::lattice_graph(rng, 6 + trial % 4, 0.4, 2);
    const MirrorReport report = find_mirrors(eg, 0.1);
    CHECK(report.mirror_count == static_cast<int>(report.mirror_indices().size()));
    for (std::size_t k : report.mirror_indices()) {
      const BandCheck& c = report.checks[k];
      std::vector<int> all = c.members;
      all.insert(all.end(), c.plus.begin(), c.plus.end());
      all.insert(all.end(), c.minus.begin(), c.minus.end());
      std::sort(all.begin(), all.end());
      CHECK(std::adjacent_find(all.begin(), all.end()) == all.end());
      CHECK(static_cast<int>(all.size()) == eg.graph.node_count());
      for (const Edge& e : eg.graph.edges()) {
        const bool ip = std::binary_search(c.plus.begin(), c.plus.end(), e.i);
        const bool jp = std::binary_search(c.plus.begin(), c.plus.end(), e.j);
        const bool im = std::binary_search(c.minus.begin(), c.minus.end(), e.i);
        const bool jm = std::binary_search(c.minus.begin(), c.minus.end(), e.j);
        CHECK_FALSE(((ip && jm) || (im && jp)));
      }
    }
  }
}

TEST_CASE("mirror count matches the subset enumeration oracle") {
  RandomStream rng(2024);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 4 + trial % 6;
    const EmbeddedGraph eg = oracle::lattice_graph(rng, n, 0.3 + 0.05 * (trial % 5), trial % 3);
    CHECK(find_mirrors(eg, 0.1).mirror_count == oracle::mirror_count(eg, 0.1));
  }
}

TEST_CASE("reflection across a mirror") {
  const EmbeddedGraph eg = bowtie({});
  const MirrorReport report = find_mirrors(eg, 0.1);
  const std::size_t m = report.mirror_indices().at(0);

  const std::vector<int> left{2};
  const LocationMap flipped = reflect_across_mirror(report, m, left, eg.locations);
  CHECK(flipped[2]->x == doctest::Approx(1.0));
  CHECK(flipped[2]->y == doctest::Approx(0.0).epsilon(1e-15));
  for (int v : {0, 1, 3}) CHECK(flipped[v] == eg.locations[v]);

  // The flipped embedding reproduces every edge length.
  CHECK(max_length_error(eg, flipped) <= 1e-12);
  const EmbeddedGraph flipped_eg{eg.graph, flipped};
  for (int v = 0; v < 4; ++v) CHECK(ambiguous_region_check(*flipped[v], v, flipped_eg, 0.0));

  // Involution.
  const LocationMap back = reflect_across_mirror(report, m, left, flipped);
  for (int v = 0; v < 4; ++v) CHECK(distance(*back[v], *eg.locations[v]) <= 1e-12);

  CHECK(reflect_across_mirror(report, m, {}, eg.locations) == eg.locations);
  const std::vector<int> mixed{2, 3};
  CHECK_THROWS_AS(reflect_across_mirror(report, m, mixed, eg.locations), std::invalid_argument);
  for (std::size_t k = 0; k < report.bands.size(); ++k) {
    if (!report.indicator[k]) CHECK_THROWS_AS(reflect_across_mirror(report, k, left, eg.locations), std::invalid_argument);
  }
}

TEST_CASE("detected mirrors are feasible flips on exact lattice embeddings") {
  RandomStream rng(77);
  for (int trial = 0; trial < 40; ++trial) {
    const EmbeddedGraph eg = oracle::lattice_graph(rng, 7 + trial % 3, 0.45, 1);
    const MirrorReport report = find_mirrors(eg, 0.1);
    for (std::size_t k : report.mirror_indices()) {
      const LocationMap a = reflect_across_mirror(report, k, report.checks[k].plus, eg.locations);
      const LocationMap b = reflect_across_mirror(report, k, report.checks[k].minus, eg.locations);
      CHECK(max_length_error(eg, a) <= 1e-9);
      CHECK(max_length_error(eg, b) <= 1e-9);
    }
  }
}

TEST_CASE("flip candidate enumeration") {
  // Two hinged triangles on each side of a shared spine: 0-1 spine, 2 left, 3 right.
  const EmbeddedGraph eg = bowtie({});
  const MirrorReport report = find_mirrors(eg, 0.1);

  auto cands = enumerate_flip_candidates(report, eg.locations, {});
  REQUIRE(cands.size() == 2);
  CHECK(cands[0] == eg.locations);
  // Sides tie in size, so the minus side (vertex 2) flips.
  CHECK(cands[1][2]->x == doctest::Approx(1.0));
  CHECK(cands[1][3] == eg.locations[3]);

  const std::vector<int> protect_left{2};
  cands = enumerate_flip_candidates(report, eg.locations, protect_left);
  REQUIRE(cands.size() == 2);
  CHECK(cands[1][3]->x == doctest::Approx(-1.0));
  CHECK(cands[1][2] == eg.locations[2]);

  const std::vector<int> protect_both{2, 3};
  CHECK(enumerate_flip_candidates(report, eg.locations, protect_both).size() == 1);
}

TEST_CASE("flip candidates respect the cap") {
  // Hub 0 with three spokes; each spoke carries a wing hinged on the hub.
  const int k = 3;
  LocationMap loc{Point2{0, 0}};
  std::vector<Edge> edges;
  for (int i = 0; i < k; ++i) {
    const double t = 2.0 * M_PI * i / k;
    const double tw = t + 0.35;
    loc.emplace_back(Point2{4 * std::cos(t), 4 * std::sin(t)});
    loc.emplace_back(Point2{3 * std::cos(tw), 3 * std::sin(tw)});
    const int s = 1 + 2 * i;
    const int w = s + 1;
    edges.push_back({0, s, 4.0});
    edges.push_back({0, w, 3.0});
    edges.push_back({s, w, distance(*loc[s], *loc[w])});
  }
  const EmbeddedGraph eg{RangeGraph(2 * k + 1, {}, edges), loc};
  const MirrorReport report = find_mirrors(eg, 0.1);
  const std::size_t m = report.mirror_indices().size();
  REQUIRE(m >= 2);
  REQUIRE(m <= 12);
  const auto all = enumerate_flip_candidates(report, eg.locations, {}, std::size_t{1} << m);
  CHECK(all.size() == (std::size_t{1} << m));
  CHECK(all[0] == eg.locations);
  const auto capped = enumerate_flip_candidates(report, eg.locations, {}, (std::size_t{1} << m) - 1);
  CHECK(capped.size() == m + 1);
  for (std::size_t c = 1; c < capped.size(); ++c) CHECK(max_length_error(eg, capped[c]) <= 1e-9);
}

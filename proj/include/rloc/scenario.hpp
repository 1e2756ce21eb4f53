#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "rloc/geometry.hpp"
#include "rloc/graph.hpp"

namespace rloc {

/// Seeded random stream with platform-independent variate conversions.
///
/// std::mt19937_64 is fully specified by the standard; the uniform and normal
/// transforms below are written out so that every platform draws identical
/// values (std::normal_distribution is implementation-defined).
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Standard normal via the Box-Muller transform (pairs are cached).
  double normal();

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

struct Area {
  double width = 100.0;
  double height = 100.0;
};

struct ScenarioParams {
  int node_count = 30;
  Area area;
  double radius = 30.0;
  int anchor_count = 3;
  NoiseModel noise;
  std::uint64_t seed = 1;
  /// Explicit anchors; when empty the robust-triangle heuristic picks them.
  std::vector<int> anchor_ids;
};

/// Ground truth plus the measured range graph of one experiment.
struct Scenario {
  std::vector<Point2> true_positions;
  RangeGraph graph;
  Area area;
  double radius = 0.0;
  std::uint64_t seed = 0;
  NoiseModel noise;
  bool connected = true;

  int node_count() const { return graph.node_count(); }
  EmbeddedGraph true_embedding() const;
  LocationMap anchor_locations() const;
};

/// Draws n positions i.i.d. uniform over the area from `seed`. The scenario
/// generator consumes exactly these draws first, so positions depend only on
/// (n, area, seed).
std::vector<Point2> draw_positions(int node_count, Area area, std::uint64_t seed);

/// Random geometric scenario: all pairs within `radius` are measured, then
/// noised in ascending (i, j) order. Anchor-anchor edges carry true lengths.
/// Rejects n < 3, anchor_count < 3, anchor_count > n and radius <= 0.
Scenario generate_scenario(const ScenarioParams& params);

/// Measured range graph over given positions: pairs within `radius` get one
/// normal draw each from `rng` in ascending (i, j) order. The area is the
/// bounding box of the positions from the origin.
Scenario measure_positions(std::vector<Point2> positions, double radius, std::vector<int> anchors,
                           const NoiseModel& noise, RandomStream& rng);

/// Anchors chosen from true distances: the largest-product triangle, extended
/// greedily by the vertex farthest (max-min distance) from those already chosen.
std::vector<int> select_anchors_by_heuristic(std::span<const Point2> positions, double radius, int anchor_count);

/// Radius whose unit-disk graph over `positions` has mean degree within
/// +/- tolerance of `target` (bisection on the radius).
double radius_for_degree(std::span<const Point2> positions, double target_degree, double tolerance = 0.5);

}  // namespace rloc

#include "rloc/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace rloc {

double RandomStream::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RandomStream::normal() {
  if (spare_) {
    const double v = *spare_;
    spare_.reset();
    return v;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(theta);
  return r * std::cos(theta);
}

EmbeddedGraph Scenario::true_embedding() const {
  EmbeddedGraph e{graph, {}};
  e.locations.assign(true_positions.begin(), true_positions.end());
  return e;
}

LocationMap Scenario::anchor_locations() const {
  LocationMap out(graph.node_count());
  for (int a : graph.anchors()) out[a] = true_positions[a];
  return out;
}

std::vector<Point2> draw_positions(int node_count, Area area, std::uint64_t seed) {
  RandomStream rng(seed);
  std::vector<Point2> positions(node_count);
  for (Point2& p : positions) {
    p.x = rng.uniform(0.0, area.width);
    p.y = rng.uniform(0.0, area.height);
  }
  return positions;
}

std::vector<int> select_anchors_by_heuristic(std::span<const Point2> positions, double radius, int anchor_count) {
  const int n = static_cast<int>(positions.size());
  std::vector<int> chosen;
  double best = -1.0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double dij = distance(positions[i], positions[j]);
      if (dij > radius) continue;
      for (int k = j + 1; k < n; ++k) {
        const double dik = distance(positions[i], positions[k]);
        const double djk = distance(positions[j], positions[k]);
        if (dik > radius || djk > radius) continue;
        const double product = dij * dik * djk;
        if (product > best) {
          best = product;
          chosen = {i, j, k};
        }
      }
    }
  }
  if (chosen.empty() && n > 0) chosen.push_back(0);
  std::vector<bool> used(n, false);
  for (int v : chosen) used[v] = true;
  while (static_cast<int>(chosen.size()) < anchor_count) {
    int pick = -1;
    double pick_gap = -1.0;
    for (int v = 0; v < n; ++v) {
      if (used[v]) continue;
      double gap = std::numeric_limits<double>::infinity();
      for (int c : chosen) gap = std::min(gap, distance(positions[v], positions[c]));
      if (gap > pick_gap) {
        pick_gap = gap;
        pick = v;
      }
    }
    if (pick < 0) break;
    used[pick] = true;
    chosen.push_back(pick);
  }
  chosen.resize(std::min<std::size_t>(chosen.size(), anchor_count));
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

namespace {

double mean_degree_at(std::span<const Point2> positions, double radius) {
  const std::size_t n = positions.size();
  std::size_t edges = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (distance(positions[i], positions[j]) <= radius) ++edges;
    }
  }
  return n == 0 ? 0.0 : 2.0 * static_cast<double>(edges) / static_cast<double>(n);
}

}  // namespace

double radius_for_degree(std::span<const Point2> positions, double target_degree, double tolerance) {
  double lo = 0.0;
  double hi = 0.0;
  for (std::size_t i = 0; i < positions.size(); ++i) {
    for (std::size_t j = i + 1; j < positions.size(); ++j) hi = std::max(hi, distance(positions[i], positions[j]));
  }
  double best_radius = hi;
  double best_gap = std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < 80; ++iter) {
    const double mid = 0.5 * (lo + hi);
    const double deg = mean_degree_at(positions, mid);
    const double gap = std::abs(deg - target_degree);
    if (gap < best_gap) {
      best_gap = gap;
      best_radius = mid;
    }
    if (gap <= tolerance) return mid;
    if (deg < target_degree) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return best_radius;
}

Scenario generate_scenario(const ScenarioParams& params) {
  const int n = params.node_count;
  if (n < 3) throw std::invalid_argument("scenario needs at least 3 nodes");
  if (params.anchor_ids.empty()) {
    if (params.anchor_count < 3) throw std::invalid_argument("scenario needs at least 3 anchors");
    if (params.anchor_count > n) throw std::invalid_argument("anchor count exceeds node count");
  }
  if (!(params.radius > 0.0)) throw std::invalid_argument("radius must be positive");
  if (!(params.area.width > 0.0) || !(params.area.height > 0.0)) throw std::invalid_argument("area must be positive");
  params.noise.validate();

  // Positions first, then one normal draw per measured pair in (i, j) order.
  RandomStream rng(params.seed);
  std::vector<Point2> positions(n);
  for (Point2& p : positions) {
    p.x = rng.uniform(0.0, params.area.width);
    p.y = rng.uniform(0.0, params.area.height);
  }
  std::vector<int> anchors = params.anchor_ids;
  if (anchors.empty()) anchors = select_anchors_by_heuristic(positions, params.radius, params.anchor_count);

  Scenario s = measure_positions(std::move(positions), params.radius, std::move(anchors), params.noise, rng);
  s.area = params.area;
  s.seed = params.seed;
  return s;
}

Scenario measure_positions(std::vector<Point2> positions, double radius, std::vector<int> anchors,
                           const NoiseModel& noise, RandomStream& rng) {
  if (!(radius > 0.0)) throw std::invalid_argument("radius must be positive");
  noise.validate();
  const int n = static_cast<int>(positions.size());
  std::vector<bool> is_anchor(n, false);
  for (int a : anchors) {
    if (a < 0 || a >= n) throw std::invalid_argument("anchor id out of range");
    is_anchor[a] = true;
  }

  Scenario s;
  s.true_positions = std::move(positions);
  s.radius = radius;
  s.noise = noise;
  double max_x = 0.0;
  double max_y = 0.0;
  for (const Point2& p : s.true_positions) {
    max_x = std::max(max_x, p.x);
    max_y = std::max(max_y, p.y);
  }
  s.area = {max_x, max_y};

  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double d = distance(s.true_positions[i], s.true_positions[j]);
      if (d > radius) continue;
      const double draw = rng.normal();
      const double measured = (is_anchor[i] && is_anchor[j]) ? d : apply_noise(d, noise, draw);
      edges.push_back({i, j, measured});
    }
  }
  s.graph = RangeGraph(n, std::move(anchors), std::move(edges));
  s.connected = s.graph.is_connected();
  return s;
}

}  // namespace rloc

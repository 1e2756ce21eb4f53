#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rloc/flip_risk.hpp"
#include "rloc/geometry.hpp"
#include "rloc/graph.hpp"
#include "rloc/least_squares.hpp"
#include "rloc/realization.hpp"

namespace rloc {

using Triangle = std::array<int, 3>;

/// Largest product of measured side lengths over triangles whose vertices are
/// all in `available` (sorted ids). Ties go to the lexicographically smallest
/// triple; triangles in `skip` are ignored. std::nullopt when none exists.
std::optional<Triangle> select_robust_triangle(const RangeGraph& graph, std::span<const int> available,
                                               const std::set<Triangle>* skip = nullptr);

/// Absorbs every available vertex with at least two edges into the growing
/// member set, sweeping in ascending id order until nothing changes. Returns
/// the members in absorption order, `seed` first.
std::vector<int> grow_component(const RangeGraph& graph, std::span<const int> seed, std::span<const int> available);

struct Component {
  int id = 0;
  std::vector<int> members;  // absorbed by growth, in absorption order
  RealizedSet realized;      // local frame of the seed triangle
  std::vector<LocationMap> candidates;  // base realization first, then flip alternatives
  Triangle seed_triangle{};
  int mirror_count = 0;
};

struct RcgrOptions {
  double t_kappa = 4.0;
  /// Band half-width for mirror detection; defaults to the noise bound.
  std::optional<double> band_half_width;
  double noise_bound = 0.0;
  std::optional<double> radius_hint;
  /// When false the pipeline degrades to the ungated baseline: first-found
  /// realization order, no kappa gate, no mirror candidates.
  bool robust = true;
  std::size_t max_flip_candidates = 64;
};

/// Component generation and realization over the whole graph. Realized sets
/// are disjoint; vertices left out of every component are unlocalized.
std::vector<Component> rcgr(const RangeGraph& graph, const RcgrOptions& options);

struct RigidTransform {
  Eigen::Matrix2d linear = Eigen::Matrix2d::Identity();  // rotation, possibly times a reflection
  Eigen::Vector2d translation = Eigen::Vector2d::Zero();

  Point2 apply(Point2 p) const;
};

struct MergeOptions {
  bool refine = true;
  /// Placements differing by more than 2 * noise_bound count as distinct.
  double noise_bound = 0.0;
  /// A distinct placement whose RMS residual is within this factor of the
  /// best one makes the fit ambiguous; the component then waits for more links.
  double ambiguity_ratio = 2.0;
  /// Ranging radius. Placements that put unlinked vertices closer than
  /// radius - noise_bound are discarded unless nothing else remains.
  std::optional<double> radius_hint;
  SolverOptions solver{500, 1e-10, 10};
};

struct GlobalSolution {
  LocationMap locations;                               // anchor frame
  std::vector<std::optional<RigidTransform>> transforms;  // by component id
  std::vector<int> chosen_candidate;                   // by component id, -1 when not merged
  std::vector<int> unmergeable;                        // component ids
  std::vector<int> merge_order;
  std::vector<int> component_of;                       // by vertex, -1 when unlocalized
  /// RMS length residual over the measured edges between located vertices.
  double residual = 0.0;
  std::optional<std::string> warning;
};

/// Places components in the anchor frame. Components are taken greedily (most
/// member anchors, then most links to the merged body, then lowest id); each
/// flip candidate is fitted with both chiralities and the smallest residual
/// wins. A component with at most one anchor and fewer than three independent
/// links, or whose best fit stays ambiguous, is unmergeable. Anchors keep
/// their calibrated coordinates.
GlobalSolution merge_components(const std::vector<Component>& components, const RangeGraph& graph,
                                const LocationMap& anchor_coords, const MergeOptions& options = {});

struct RefineResult {
  LocationMap locations;
  SolverReport report;
  std::optional<std::string> warning;
};

/// Joint least squares over every measured edge between located vertices
/// with the anchors in `anchor_coords` held fixed. Unlocated vertices stay
/// unlocated. If the solver stalls the best iterate is returned with a warning.
RefineResult refine_lsq(const RangeGraph& graph, const LocationMap& initial, const LocationMap& anchor_coords,
                        const SolverOptions& options = {500, 1e-10, 10});

struct Localization {
  std::vector<Component> components;
  GlobalSolution solution;
  /// Global realization rank per vertex (component order, then realization
  /// order within the component); -1 when unlocalized.
  std::vector<int> realization_index;
};

/// rcgr followed by merge_components. Refinement follows options.robust.
Localization localize(const RangeGraph& graph, const LocationMap& anchor_coords, const RcgrOptions& options);

}  // namespace rloc

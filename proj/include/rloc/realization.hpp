#pragma once

#include <array>
#include <limits>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "rloc/geometry.hpp"
#include "rloc/graph.hpp"

namespace rloc {

/// Local coordinates of a seed triangle: origin at (0, 0), axis vertex on the
/// positive x axis, plane vertex in the upper half-plane.
struct LocalFrame {
  Point2 origin;
  Point2 axis;
  Point2 plane;
};

/// Throws std::invalid_argument("degenerate seed triangle") unless the three
/// lengths satisfy the strict triangle inequality.
LocalFrame init_local_frame(double d12, double d13, double d23);

/// Intersections of the circles (ref1, d1) and (ref2, d2), at most two,
/// ordered + side then - side of the line ref1 -> ref2. Circles that miss each
/// other by no more than 2 * bound are snapped to their tangent point.
std::vector<Point2> bilaterate(Point2 ref1, Point2 ref2, double d1, double d2, double bound = 0.0);

struct Trilateration {
  Point2 position;
  double rms_residual = 0.0;
  int iterations = 0;
  bool converged = false;
  /// Set when every reference is collinear; `alternative` is then the mirror
  /// candidate and `line` the reference pair used.
  bool ambiguous = false;
  std::optional<Point2> alternative;
  std::array<std::size_t, 2> line{0, 1};
};

/// Least-squares position from >= 3 references, started from the best
/// bilateration candidate over all reference pairs.
Trilateration trilaterate(std::span<const Point2> refs, std::span<const double> dists, double bound = 0.0);

enum class RealizationOrder {
  kSmallestKappa,  // realize the candidate whose RSM condition number is smallest
  kFirstFound,     // realize the lowest-index candidate, no kappa gate
};

struct RealizeOptions {
  double t_kappa = 4.0;
  double noise_bound = 0.0;
  /// Ranging radius; enables rejecting bilateration candidates that sit too
  /// close to realized non-neighbors.
  std::optional<double> radius_hint;
  RealizationOrder order = RealizationOrder::kSmallestKappa;
  /// Unresolved flip groups considered jointly when placing a vertex.
  int max_flip_groups = 4;
};

struct RealizedSet {
  std::vector<int> members;    // realization order, starters first
  LocationMap locations;       // indexed by vertex id of the parent graph
  std::vector<double> kappa;   // per vertex, NaN where not evaluated
  int open_flip_groups = 0;    // ambiguities still unresolved at the end
};

/// Sequential realization of `component` from the located `starters`.
///
/// Each step collects the unrealized members with at least two realized
/// neighbors, places them (least squares for >= 3 neighbors, bilateration for
/// 2) and, in kSmallestKappa order, realizes the one whose RSM condition
/// number over realized + {u} is smallest, provided it does not exceed
/// t_kappa. Realization stops when every candidate exceeds the threshold or
/// none remain. Throws when fewer than two starters are given.
RealizedSet robust_realize(const RangeGraph& graph, std::span<const int> component,
                           std::span<const std::pair<int, Point2>> starters, const RealizeOptions& options);

}  // namespace rloc

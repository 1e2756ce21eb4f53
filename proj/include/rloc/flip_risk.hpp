#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rloc/geometry.hpp"
#include "rloc/graph.hpp"

namespace rloc {

/// Thick line of half-width c around the line through the first two vertices
/// that created it. Members are kept sorted by vertex id.
struct Band {
  int u = 0;
  int w = 0;
  Point2 from;
  Point2 to;
  std::vector<int> members;
  double half_width = 0.0;
};

/// Sign of the cross product locating `point` relative to the band's center
/// line: +1 (left of u->w), -1 (right) or 0 (exactly collinear).
int point_line_side(const Band& band, Point2 point);

/// Perpendicular distance from `point` to the band's center line.
double point_band_distance(Point2 point, const Band& band);

struct BandHit {
  std::size_t band = 0;
  double distance = 0.0;
};

/// Nearest band among `candidates` (indices into `bands`). Ties go to the
/// lowest band index; an empty candidate set yields std::nullopt.
std::optional<BandHit> find_min_dis(Point2 point, std::span<const Band> bands, std::span<const std::size_t> candidates);

/// Band generation and mergence over all located vertices, visiting pairs
/// (i, j > i) in ascending order. Vertices closer than 1e-9 m are not used to
/// open a band.
std::vector<Band> generate_bands(const EmbeddedGraph& embedded, double half_width);

enum class BandVerdict {
  kMirror,
  kOneSided,        // all non-members on one side of the line
  kCrossingEdge,    // an edge joins the two sides
  kAnchorsBothSides,
};

std::string to_string(BandVerdict verdict);

/// Verification result for one band. `members` is the band's member set
/// widened by every vertex within c of the center line.
struct BandCheck {
  std::vector<int> members;
  std::vector<int> plus;
  std::vector<int> minus;
  BandVerdict verdict = BandVerdict::kOneSided;
};

struct MirrorReport {
  std::vector<Band> bands;
  std::vector<BandCheck> checks;
  std::vector<bool> indicator;
  int mirror_count = 0;

  std::vector<std::size_t> mirror_indices() const;
};

/// Checks every band against the three MIRROR conditions: non-members on both
/// sides, no edge between the sides, and at most one side holding anchors.
MirrorReport detect_mirrors(const EmbeddedGraph& embedded, std::vector<Band> bands);

/// Convenience: generate_bands followed by detect_mirrors.
MirrorReport find_mirrors(const EmbeddedGraph& embedded, double half_width);

/// Reflects `side` (which must be a subset of one side of the verified mirror
/// `band_index`) across the line through the current locations of the band's
/// two defining vertices. Other locations are unchanged.
LocationMap reflect_across_mirror(const MirrorReport& report, std::size_t band_index, std::span<const int> side,
                                  const LocationMap& locations);

/// Flip alternatives of a realization. For each mirror the side holding no
/// protected vertex is the one that flips (mirrors with protected vertices on
/// both sides are skipped). If 2^k fits within `max_candidates` every subset
/// of the k mirrors is enumerated in bitmask order; otherwise only the base
/// and the k single flips. The base realization is always first.
std::vector<LocationMap> enumerate_flip_candidates(const MirrorReport& report, const LocationMap& base,
                                                   std::span<const int> protected_vertices,
                                                   std::size_t max_candidates = 64);

}  // namespace rloc

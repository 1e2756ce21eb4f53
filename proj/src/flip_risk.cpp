#include "rloc/flip_risk.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace rloc {

namespace {

constexpr double kCoincident = 1e-9;

bool contains(const std::vector<int>& sorted, int v) { return std::binary_search(sorted.begin(), sorted.end(), v); }

void insert_sorted(std::vector<int>& sorted, int v) {
  auto it = std::lower_bound(sorted.begin(), sorted.end(), v);
  if (it == sorted.end() || *it != v) sorted.insert(it, v);
}

}  // namespace

int point_line_side(const Band& band, Point2 point) {
  const double p = (band.to.x - band.from.x) * (point.y - band.from.y) - (band.to.y - band.from.y) * (point.x - band.from.x);
  if (p > 0.0) return 1;
  if (p < 0.0) return -1;
  return 0;
}

double point_band_distance(Point2 point, const Band& band) { return line_distance(point, band.from, band.to); }

std::optional<BandHit> find_min_dis(Point2 point, std::span<const Band> bands, std::span<const std::size_t> candidates) {
  std::optional<BandHit> best;
  for (std::size_t idx : candidates) {
    const double d = point_band_distance(point, bands[idx]);
    if (!best || d < best->distance || (d == best->distance && idx < best->band)) best = BandHit{idx, d};
  }
  return best;
}

std::vector<Band> generate_bands(const EmbeddedGraph& embedded, double half_width) {
  if (!(half_width > 0.0)) throw std::invalid_argument("band half-width must be positive");
  const int n = embedded.graph.node_count();
  for (int v = 0; v < n; ++v) {
    if (!embedded.located(v)) throw std::invalid_argument("band generation needs every vertex located");
  }
  std::vector<Band> bands;
  if (n < 2) return bands;

  // covering[v]: indices of bands containing v, in creation order.
  std::vector<std::vector<std::size_t>> covering(n);
  for (int i = 0; i < n; ++i) {
    const Point2 pi = embedded.at(i);
    for (int j = i + 1; j < n; ++j) {
      const Point2 pj = embedded.at(j);
      const auto hit = find_min_dis(pj, bands, covering[i]);
      if (!hit || hit->distance > half_width) {
        if (distance(pi, pj) <= kCoincident) continue;
        bands.push_back(Band{i, j, pi, pj, {i, j}, half_width});
        covering[i].push_back(bands.size() - 1);
        covering[j].push_back(bands.size() - 1);
      } else if (!contains(bands[hit->band].members, j)) {
        insert_sorted(bands[hit->band].members, j);
        covering[j].push_back(hit->band);
      }
    }
  }
  return bands;
}

std::string to_string(BandVerdict verdict) {
  switch (verdict) {
    case BandVerdict::kMirror:
      return "mirror";
    case BandVerdict::kOneSided:
      return "one-sided";
    case BandVerdict::kCrossingEdge:
      return "crossing-edge";
    case BandVerdict::kAnchorsBothSides:
      return "anchors-both-sides";
  }
  return "one-sided";
}

std::vector<std::size_t> MirrorReport::mirror_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < indicator.size(); ++k) {
    if (indicator[k]) out.push_back(k);
  }
  return out;
}

MirrorReport detect_mirrors(const EmbeddedGraph& embedded, std::vector<Band> bands) {
  const RangeGraph& g = embedded.graph;
  const int n = g.node_count();
  MirrorReport report;
  report.bands = std::move(bands);
  report.checks.reserve(report.bands.size());
  report.indicator.assign(report.bands.size(), false);

  std::vector<int> side(n, 0);
  for (const Band& band : report.bands) {
    BandCheck check;
    check.members = band.members;
    std::fill(side.begin(), side.end(), 0);
    for (int v = 0; v < n; ++v) {
      if (contains(band.members, v)) continue;
      const Point2 p = embedded.at(v);
      if (point_band_distance(p, band) <= band.half_width) {
        insert_sorted(check.members, v);
        continue;
      }
      side[v] = point_line_side(band, p);
      (side[v] > 0 ? check.plus : check.minus).push_back(v);
    }

    if (check.plus.empty() || check.minus.empty()) {
      check.verdict = BandVerdict::kOneSided;
    } else if (std::any_of(g.edges().begin(), g.edges().end(),
                           [&](const Edge& e) { return side[e.i] * side[e.j] < 0; })) {
      check.verdict = BandVerdict::kCrossingEdge;
    } else {
      auto has_anchor = [&](const std::vector<int>& group) {
        return std::any_of(group.begin(), group.end(), [&](int v) { return g.is_anchor(v); });
      };
      check.verdict = (has_anchor(check.plus) && has_anchor(check.minus)) ? BandVerdict::kAnchorsBothSides
                                                                          : BandVerdict::kMirror;
    }
    report.indicator[report.checks.size()] = check.verdict == BandVerdict::kMirror;
    report.checks.push_back(std::move(check));
  }
  report.mirror_count = static_cast<int>(std::count(report.indicator.begin(), report.indicator.end(), true));
  return report;
}

MirrorReport find_mirrors(const EmbeddedGraph& embedded, double half_width) {
  return detect_mirrors(embedded, generate_bands(embedded, half_width));
}

LocationMap reflect_across_mirror(const MirrorReport& report, std::size_t band_index, std::span<const int> side,
                                  const LocationMap& locations) {
  if (band_index >= report.bands.size()) throw std::invalid_argument("band index out of range");
  if (!report.indicator[band_index]) throw std::invalid_argument("band is not a verified mirror");
  const BandCheck& check = report.checks[band_index];
  auto subset_of = [&](const std::vector<int>& group) {
    return std::all_of(side.begin(), side.end(), [&](int v) { return contains(group, v); });
  };
  if (!subset_of(check.plus) && !subset_of(check.minus)) {
    throw std::invalid_argument("side is not a subset of the mirror's vertex groups");
  }
  LocationMap out = locations;
  if (side.empty()) return out;
  const Band& band = report.bands[band_index];
  const auto& a = locations.at(band.u);
  const auto& b = locations.at(band.w);
  if (!a || !b) throw std::invalid_argument("mirror line vertices have no location");
  for (int v : side) {
    if (!out.at(v)) throw std::invalid_argument("vertex to reflect has no location");
    out[v] = reflect_across_line(*out[v], *a, *b);
  }
  return out;
}

std::vector<LocationMap> enumerate_flip_candidates(const MirrorReport& report, const LocationMap& base,
                                                   std::span<const int> protected_vertices,
                                                   std::size_t max_candidates) {
  struct Flip {
    std::size_t band;
    const std::vector<int>* side;
  };
  std::vector<Flip> flips;
  auto is_protected = [&](const std::vector<int>& group) {
    return std::any_of(group.begin(), group.end(), [&](int v) {
      return std::find(protected_vertices.begin(), protected_vertices.end(), v) != protected_vertices.end();
    });
  };
  for (std::size_t k : report.mirror_indices()) {
    const BandCheck& check = report.checks[k];
    const bool plus_locked = is_protected(check.plus);
    const bool minus_locked = is_protected(check.minus);
    if (plus_locked && minus_locked) continue;
    const std::vector<int>* side = nullptr;
    if (plus_locked) {
      side = &check.minus;
    } else if (minus_locked) {
      side = &check.plus;
    } else {
      side = check.plus.size() < check.minus.size() ? &check.plus : &check.minus;
    }
    flips.push_back({k, side});
  }

  auto apply = [&](LocationMap& map, const Flip& flip) {
    const Band& band = report.bands[flip.band];
    const Point2 a = *map.at(band.u);
    const Point2 b = *map.at(band.w);
    for (int v : *flip.side) map[v] = reflect_across_line(*map[v], a, b);
  };

  std::vector<LocationMap> out{base};
  const std::size_t k = flips.size();
  const bool full = k < 63 && (std::size_t{1} << k) <= max_candidates;
  if (full) {
    for (std::size_t mask = 1; mask < (std::size_t{1} << k); ++mask) {
      LocationMap map = base;
      for (std::size_t f = 0; f < k; ++f) {
        if (mask & (std::size_t{1} << f)) apply(map, flips[f]);
      }
      out.push_back(std::move(map));
    }
  } else {
    for (const Flip& flip : flips) {
      LocationMap map = base;
      apply(map, flip);
      out.push_back(std::move(map));
    }
  }
  return out;
}

}  // namespace rloc

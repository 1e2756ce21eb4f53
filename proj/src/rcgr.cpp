#include "rloc/rcgr.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <utility>

namespace rloc {

std::optional<Triangle> select_robust_triangle(const RangeGraph& graph, std::span<const int> available,
                                               const std::set<Triangle>* skip) {
  std::vector<char> in(graph.node_count(), 0);
  for (int v : available) in.at(v) = 1;

  std::optional<Triangle> best;
  double best_product = -1.0;
  for (int i = 0; i < graph.node_count(); ++i) {
    if (!in[i]) continue;
    const auto ni = graph.neighbors(i);
    for (std::size_t a = 0; a < ni.size(); ++a) {
      const int j = ni[a].vertex;
      if (j <= i || !in[j]) continue;
      for (std::size_t b = a + 1; b < ni.size(); ++b) {
        const int k = ni[b].vertex;
        if (!in[k]) continue;
        const auto jk = graph.edge_index(j, k);
        if (!jk) continue;
        const Triangle t{i, j, k};
        if (skip && skip->count(t)) continue;
        const double product =
            graph.edges()[ni[a].edge].measured * graph.edges()[ni[b].edge].measured * graph.edges()[*jk].measured;
        if (product > best_product) {
          best_product = product;
          best = t;
        }
      }
    }
  }
  return best;
}

std::vector<int> grow_component(const RangeGraph& graph, std::span<const int> seed, std::span<const int> available) {
  const int n = graph.node_count();
  std::vector<char> open(n, 0);
  std::vector<char> member(n, 0);
  std::vector<int> links(n, 0);
  for (int v : available) open.at(v) = 1;

  std::vector<int> order;
  auto absorb = [&](int v) {
    member[v] = 1;
    order.push_back(v);
    for (const Incidence& inc : graph.neighbors(v)) ++links[inc.vertex];
  };
  for (int v : seed) {
    if (member.at(v)) throw std::invalid_argument("duplicate seed vertex");
    absorb(v);
  }

  bool changed = true;
  while (changed) {
    changed = false;
    for (int v = 0; v < n; ++v) {
      if (open[v] && !member[v] && links[v] >= 2) {
        absorb(v);
        changed = true;
      }
    }
  }
  return order;
}

namespace {

Component realize_component(const RangeGraph& graph, int id, const Triangle& tri, const LocalFrame& frame,
                            std::vector<int> members, const RcgrOptions& options) {
  Component comp;
  comp.id = id;
  comp.seed_triangle = tri;
  comp.members = std::move(members);

  RealizeOptions ro;
  ro.noise_bound = options.noise_bound;
  ro.radius_hint = options.radius_hint;
  if (options.robust) {
    ro.t_kappa = options.t_kappa;
    ro.order = RealizationOrder::kSmallestKappa;
  } else {
    ro.t_kappa = std::numeric_limits<double>::infinity();
    ro.order = RealizationOrder::kFirstFound;
  }
  const std::pair<int, Point2> starters[] = {{tri[0], frame.origin}, {tri[1], frame.axis}, {tri[2], frame.plane}};
  comp.realized = robust_realize(graph, comp.members, starters, ro);

  comp.candidates.push_back(comp.realized.locations);
  if (!options.robust) return comp;

  // Mirror analysis on the realized part, in its local frame.
  std::vector<int> realized = comp.realized.members;
  std::sort(realized.begin(), realized.end());
  const Subgraph sub = induced_subgraph(graph, realized);
  EmbeddedGraph local{sub.graph, LocationMap(realized.size())};
  std::vector<int> protect;
  for (std::size_t k = 0; k < realized.size(); ++k) {
    local.locations[k] = comp.realized.locations[realized[k]];
    if (std::find(tri.begin(), tri.end(), realized[k]) != tri.end()) protect.push_back(static_cast<int>(k));
  }
  const double c = options.band_half_width.value_or(options.noise_bound);
  if (!(c > 0.0) || realized.size() < 4) return comp;

  const MirrorReport report = find_mirrors(local, c);
  comp.mirror_count = report.mirror_count;
  if (report.mirror_count == 0) return comp;
  const std::vector<LocationMap> flips =
      enumerate_flip_candidates(report, local.locations, protect, options.max_flip_candidates);
  for (std::size_t f = 1; f < flips.size(); ++f) {
    LocationMap full(graph.node_count());
    for (std::size_t k = 0; k < realized.size(); ++k) full[realized[k]] = flips[f][k];
    comp.candidates.push_back(std::move(full));
  }
  return comp;
}

}  // namespace

std::vector<Component> rcgr(const RangeGraph& graph, const RcgrOptions& options) {
  const int n = graph.node_count();
  std::vector<char> grouped(n, 0);
  std::set<Triangle> rejected;
  std::vector<Component> components;

  while (true) {
    std::vector<int> available;
    for (int v = 0; v < n; ++v) {
      if (!grouped[v]) available.push_back(v);
    }
    const std::optional<Triangle> tri = select_robust_triangle(graph, available, &rejected);
    if (!tri) break;

    const auto [i, j, k] = *tri;
    LocalFrame frame;
    try {
      frame = init_local_frame(*graph.measured(i, j), *graph.measured(i, k), *graph.measured(j, k));
    } catch (const std::invalid_argument&) {
      rejected.insert(*tri);
      continue;
    }
    std::vector<int> members = grow_component(graph, *tri, available);
    Component comp = realize_component(graph, static_cast<int>(components.size()), *tri, frame,
                                       std::move(members), options);
    for (int v : comp.realized.members) grouped[v] = 1;
    components.push_back(std::move(comp));
  }
  return components;
}

Localization localize(const RangeGraph& graph, const LocationMap& anchor_coords, const RcgrOptions& options) {
  Localization out;
  out.components = rcgr(graph, options);
  MergeOptions mo;
  mo.refine = options.robust;
  mo.noise_bound = options.noise_bound;
  mo.radius_hint = options.radius_hint;
  out.solution = merge_components(out.components, graph, anchor_coords, mo);

  out.realization_index.assign(graph.node_count(), -1);
  int rank = 0;
  for (const Component& comp : out.components) {
    for (int v : comp.realized.members) {
      if (out.solution.locations[v] && out.solution.component_of[v] == comp.id) out.realization_index[v] = rank++;
    }
  }
  return out;
}

}  // namespace rloc

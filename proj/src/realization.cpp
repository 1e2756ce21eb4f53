#include "rloc/realization.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rloc/least_squares.hpp"
#include "rloc/sensitivity.hpp"

namespace rloc {

LocalFrame init_local_frame(double d12, double d13, double d23) {
  const bool positive = d12 > 0.0 && d13 > 0.0 && d23 > 0.0;
  if (!positive || !(d12 < d13 + d23) || !(d13 < d12 + d23) || !(d23 < d12 + d13)) {
    throw std::invalid_argument("degenerate seed triangle");
  }
  const double x = (d12 * d12 + d13 * d13 - d23 * d23) / (2.0 * d12);
  const double y = std::sqrt(std::max(d13 * d13 - x * x, 0.0));
  if (!(y > 0.0)) throw std::invalid_argument("degenerate seed triangle");
  return {{0.0, 0.0}, {d12, 0.0}, {x, y}};
}

std::vector<Point2> bilaterate(Point2 ref1, Point2 ref2, double d1, double d2, double bound) {
  const double span = distance(ref1, ref2);
  if (!(span > 0.0)) throw std::invalid_argument("coincident bilateration references");
  if (!(d1 > 0.0) || !(d2 > 0.0)) throw std::invalid_argument("bilateration distances must be positive");
  const Point2 ex = (1.0 / span) * (ref2 - ref1);
  const Point2 ey{-ex.y, ex.x};

  const double outer_gap = span - (d1 + d2);
  if (outer_gap > 0.0) {
    if (outer_gap > 2.0 * bound) return {};
    return {ref1 + (d1 + 0.5 * outer_gap) * ex};
  }
  if (d1 > d2 + span) {
    const double gap = d1 - d2 - span;
    if (gap > 2.0 * bound) return {};
    return {ref1 + (d1 - 0.5 * gap) * ex};
  }
  if (d2 > d1 + span) {
    const double gap = d2 - d1 - span;
    if (gap > 2.0 * bound) return {};
    return {ref2 - (d2 - 0.5 * gap) * ex};
  }

  const double a = (d1 * d1 - d2 * d2 + span * span) / (2.0 * span);
  const double h2 = d1 * d1 - a * a;
  const Point2 base = ref1 + a * ex;
  if (h2 <= 1e-24 * span * span) return {base};
  const double h = std::sqrt(h2);
  return {base + h * ey, base - h * ey};
}

namespace {

double squared_residual(Point2 x, std::span<const Point2> refs, std::span<const double> dists) {
  double s = 0.0;
  for (std::size_t k = 0; k < refs.size(); ++k) {
    const double r = distance(x, refs[k]) - dists[k];
    s += r * r;
  }
  return s;
}

SolverReport polish(Point2& x, std::span<const Point2> refs, std::span<const double> dists) {
  ResidualFunction f = [&](const Eigen::VectorXd& v, Eigen::VectorXd& r, Eigen::MatrixXd* jac) {
    r.resize(static_cast<Eigen::Index>(refs.size()));
    if (jac) jac->setZero(static_cast<Eigen::Index>(refs.size()), 2);
    for (std::size_t k = 0; k < refs.size(); ++k) {
      const double dx = v(0) - refs[k].x;
      const double dy = v(1) - refs[k].y;
      const double len = std::hypot(dx, dy);
      r(static_cast<Eigen::Index>(k)) = len - dists[k];
      if (jac && len > 0.0) {
        (*jac)(static_cast<Eigen::Index>(k), 0) = dx / len;
        (*jac)(static_cast<Eigen::Index>(k), 1) = dy / len;
      }
    }
  };
  Eigen::VectorXd v(2);
  v << x.x, x.y;
  const SolverReport report = minimize_least_squares(f, v, {100, 1e-10, 10});
  x = {v(0), v(1)};
  return report;
}

}  // namespace

Trilateration trilaterate(std::span<const Point2> refs, std::span<const double> dists, double bound) {
  if (refs.size() < 3) throw std::invalid_argument("trilateration needs at least 3 references");
  if (refs.size() != dists.size()) throw std::invalid_argument("reference and distance counts differ");

  std::size_t fi = 0;
  std::size_t fj = 1;
  double far = -1.0;
  for (std::size_t a = 0; a < refs.size(); ++a) {
    for (std::size_t b = a + 1; b < refs.size(); ++b) {
      const double d = distance(refs[a], refs[b]);
      if (d > far) {
        far = d;
        fi = a;
        fj = b;
      }
    }
  }
  if (!(far > 0.0)) throw std::invalid_argument("trilateration references coincide");

  const bool collinear = std::all_of(refs.begin(), refs.end(), [&](Point2 p) {
    return line_distance(p, refs[fi], refs[fj]) <= 1e-9 * far;
  });
  constexpr double kAlwaysSnap = std::numeric_limits<double>::infinity();

  Trilateration out;
  if (collinear) {
    std::vector<Point2> cands = bilaterate(refs[fi], refs[fj], dists[fi], dists[fj], kAlwaysSnap);
    for (Point2& c : cands) polish(c, refs, dists);
    out.position = cands.front();
    out.ambiguous = cands.size() == 2;
    if (out.ambiguous) out.alternative = cands[1];
    out.line = {fi, fj};
    out.rms_residual = std::sqrt(squared_residual(out.position, refs, dists) / static_cast<double>(refs.size()));
    out.converged = true;
    return out;
  }

  Point2 init = refs[0];
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < refs.size(); ++a) {
    for (std::size_t b = a + 1; b < refs.size(); ++b) {
      if (!(distance(refs[a], refs[b]) > 0.0)) continue;
      for (Point2 c : bilaterate(refs[a], refs[b], dists[a], dists[b], kAlwaysSnap)) {
        const double s = squared_residual(c, refs, dists);
        if (s < best) {
          best = s;
          init = c;
        }
      }
    }
  }
  (void)bound;
  out.position = init;
  const SolverReport report = polish(out.position, refs, dists);
  out.iterations = report.iterations;
  out.converged = report.converged;
  out.rms_residual = std::sqrt(2.0 * report.final_cost / static_cast<double>(refs.size()));
  return out;
}

namespace {

struct FlipGroup {
  int a = 0;  // line endpoints, never members of an open group
  int b = 0;
  std::vector<int> members;
  bool open = true;
};

struct Option {
  unsigned mask = 0;
  std::size_t candidate = 0;
  std::size_t candidate_count = 1;
  Point2 position;
  double score = 0.0;
  std::array<int, 2> line{-1, -1};
};

struct Placement {
  int vertex = -1;
  std::vector<int> groups;  // open groups touched, bit k of a mask flips groups[k]
  std::vector<Option> options;
  std::size_t best = 0;
  double kappa = std::numeric_limits<double>::quiet_NaN();
  double tie = 0.0;
};

class Realizer {
 public:
  Realizer(const RangeGraph& graph, std::span<const int> component, const RealizeOptions& options)
      : graph_(graph), options_(options), in_component_(graph.node_count(), 0),
        realized_flag_(graph.node_count(), 0), group_of_(graph.node_count(), -1) {
    for (int v : component) in_component_.at(v) = 1;
    out_.locations.assign(graph.node_count(), std::nullopt);
    out_.kappa.assign(graph.node_count(), std::numeric_limits<double>::quiet_NaN());
  }

  void add_starter(int v, Point2 p) {
    if (realized_flag_.at(v)) throw std::invalid_argument("duplicate starter");
    realize(v, p);
    if (!graph_.is_anchor(v)) pinned_.push_back(v);
  }

  void run() {
    while (true) {
      std::vector<Placement> feasible;
      for (int u = 0; u < graph_.node_count(); ++u) {
        if (!in_component_[u] || realized_flag_[u]) continue;
        if (realized_neighbor_count(u) < 2) continue;
        Placement pl = place(u);
        if (pl.options.empty()) continue;
        feasible.push_back(std::move(pl));
        if (options_.order == RealizationOrder::kFirstFound) break;
      }
      if (feasible.empty()) break;

      std::size_t pick = 0;
      if (options_.order == RealizationOrder::kSmallestKappa) {
        for (Placement& pl : feasible) pl.kappa = evaluate_kappa(pl);
        for (std::size_t k = 1; k < feasible.size(); ++k) {
          if (feasible[k].kappa < feasible[pick].kappa) pick = k;
        }
        if (feasible[pick].kappa > options_.t_kappa) break;
      }
      commit(feasible[pick]);
    }
    out_.open_flip_groups = static_cast<int>(
        std::count_if(groups_.begin(), groups_.end(), [](const FlipGroup& g) { return g.open; }));
  }

  RealizedSet take() { return std::move(out_); }

 private:
  void realize(int v, Point2 p) {
    out_.locations[v] = p;
    realized_flag_[v] = 1;
    out_.members.push_back(v);
    if (graph_.is_anchor(v)) pinned_.push_back(v);
  }

  int realized_neighbor_count(int u) const {
    int c = 0;
    for (const Incidence& inc : graph_.neighbors(u)) c += realized_flag_[inc.vertex];
    return c;
  }

  Point2 location_under(int v, unsigned mask, const std::vector<int>& groups) const {
    Point2 p = *out_.locations[v];
    const int g = group_of_[v];
    if (g < 0 || !groups_[g].open) return p;
    for (std::size_t k = 0; k < groups.size(); ++k) {
      if (groups[k] == g && (mask & (1u << k))) {
        return reflect_across_line(p, *out_.locations[groups_[g].a], *out_.locations[groups_[g].b]);
      }
    }
    return p;
  }

  double nonedge_violation(int u, Point2 x, unsigned mask, const std::vector<int>& groups) const {
    if (!options_.radius_hint) return 0.0;
    const double reach = *options_.radius_hint - options_.noise_bound;
    if (!(reach > 0.0)) return 0.0;
    double total = 0.0;
    for (int v : out_.members) {
      if (graph_.has_edge(u, v)) continue;
      total += std::max(0.0, reach - distance(x, location_under(v, mask, groups)));
    }
    return total;
  }

  Placement place(int u) const {
    Placement pl;
    pl.vertex = u;
    std::vector<int> refs;
    std::vector<double> dists;
    for (const Incidence& inc : graph_.neighbors(u)) {
      if (!realized_flag_[inc.vertex]) continue;
      refs.push_back(inc.vertex);
      dists.push_back(graph_.edges()[inc.edge].measured);
      const int g = group_of_[inc.vertex];
      if (g >= 0 && groups_[g].open && std::find(pl.groups.begin(), pl.groups.end(), g) == pl.groups.end() &&
          static_cast<int>(pl.groups.size()) < options_.max_flip_groups) {
        pl.groups.push_back(g);
      }
    }
    std::sort(pl.groups.begin(), pl.groups.end());

    double scale = 0.0;
    for (double d : dists) scale += d;
    scale /= static_cast<double>(dists.size());
    pl.tie = 1e-9 * (1.0 + scale);

    std::vector<Point2> pts(refs.size());
    for (unsigned mask = 0; mask < (1u << pl.groups.size()); ++mask) {
      for (std::size_t k = 0; k < refs.size(); ++k) pts[k] = location_under(refs[k], mask, pl.groups);
      std::vector<Point2> cands;
      std::array<int, 2> line{refs[0], refs[1]};
      try {
        if (refs.size() >= 3) {
          const Trilateration t = trilaterate(pts, dists, options_.noise_bound);
          cands.push_back(t.position);
          if (t.alternative) cands.push_back(*t.alternative);
          line = {refs[t.line[0]], refs[t.line[1]]};
        } else {
          cands = bilaterate(pts[0], pts[1], dists[0], dists[1], options_.noise_bound);
        }
      } catch (const std::invalid_argument&) {
        continue;
      }
      for (std::size_t c = 0; c < cands.size(); ++c) {
        double sq = 0.0;
        for (std::size_t k = 0; k < refs.size(); ++k) {
          const double r = distance(cands[c], pts[k]) - dists[k];
          sq += r * r;
        }
        Option opt;
        opt.mask = mask;
        opt.candidate = c;
        opt.candidate_count = cands.size();
        opt.position = cands[c];
        opt.score = std::sqrt(sq / static_cast<double>(refs.size())) + nonedge_violation(u, cands[c], mask, pl.groups);
        opt.line = line;
        pl.options.push_back(opt);
      }
    }
    for (std::size_t k = 1; k < pl.options.size(); ++k) {
      if (pl.options[k].score < pl.options[pl.best].score - pl.tie) pl.best = k;
    }
    return pl;
  }

  LocationMap locations_after(const Placement& pl) const {
    LocationMap map = out_.locations;
    const Option& opt = pl.options[pl.best];
    for (std::size_t k = 0; k < pl.groups.size(); ++k) {
      if (!(opt.mask & (1u << k))) continue;
      const FlipGroup& g = groups_[pl.groups[k]];
      for (int v : g.members) map[v] = reflect_across_line(*map[v], *out_.locations[g.a], *out_.locations[g.b]);
    }
    map[pl.vertex] = opt.position;
    return map;
  }

  double evaluate_kappa(const Placement& pl) const {
    const LocationMap map = locations_after(pl);
    try {
      return node_kappa(graph_, map, out_.members, pinned_, pl.vertex, *map[pl.vertex]);
    } catch (const std::invalid_argument&) {
      return std::numeric_limits<double>::infinity();
    }
  }

  double best_score_with_mask(const Placement& pl, unsigned mask) const {
    double s = std::numeric_limits<double>::infinity();
    for (const Option& o : pl.options) {
      if (o.mask == mask) s = std::min(s, o.score);
    }
    return s;
  }

  void commit(const Placement& pl) {
    const Option& opt = pl.options[pl.best];
    const int u = pl.vertex;

    // Apply the chosen flips; the line endpoints never move with a group.
    for (std::size_t k = 0; k < pl.groups.size(); ++k) {
      if (!(opt.mask & (1u << k))) continue;
      FlipGroup& g = groups_[pl.groups[k]];
      const Point2 a = *out_.locations[g.a];
      const Point2 b = *out_.locations[g.b];
      for (int v : g.members) out_.locations[v] = reflect_across_line(*out_.locations[v], a, b);
    }

    int joined = -1;
    for (std::size_t k = 0; k < pl.groups.size(); ++k) {
      const double toggled = best_score_with_mask(pl, opt.mask ^ (1u << k));
      FlipGroup& g = groups_[pl.groups[k]];
      if (std::abs(toggled - opt.score) <= pl.tie) {
        if (joined < 0) joined = pl.groups[k];
      } else {
        g.open = false;
      }
    }

    bool own_ambiguous = false;
    if (opt.candidate_count == 2) {
      for (const Option& o : pl.options) {
        if (o.mask == opt.mask && o.candidate != opt.candidate && std::abs(o.score - opt.score) <= pl.tie) {
          own_ambiguous = true;
        }
      }
    }

    realize(u, opt.position);
    out_.kappa[u] = pl.kappa;
    if (joined >= 0) {
      group_of_[u] = joined;
      groups_[joined].members.push_back(u);
    } else if (own_ambiguous) {
      int host = -1;
      for (int e : opt.line) {
        const int g = group_of_[e];
        if (g >= 0 && groups_[g].open) host = g;
      }
      if (host >= 0) {
        group_of_[u] = host;
        groups_[host].members.push_back(u);
      } else {
        group_of_[u] = static_cast<int>(groups_.size());
        groups_.push_back(FlipGroup{opt.line[0], opt.line[1], {u}, true});
      }
    }
  }

  const RangeGraph& graph_;
  RealizeOptions options_;
  std::vector<char> in_component_;
  std::vector<char> realized_flag_;
  std::vector<int> group_of_;
  std::vector<FlipGroup> groups_;
  std::vector<int> pinned_;
  RealizedSet out_;
};

}  // namespace

RealizedSet robust_realize(const RangeGraph& graph, std::span<const int> component,
                           std::span<const std::pair<int, Point2>> starters, const RealizeOptions& options) {
  if (starters.size() < 2) throw std::invalid_argument("robust realization needs at least 2 located starters");
  Realizer realizer(graph, component, options);
  for (const auto& [v, p] : starters) realizer.add_starter(v, p);
  realizer.run();
  return realizer.take();
}

}  // namespace rloc

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <tuple>

#include "rloc/rcgr.hpp"

namespace rloc {

Point2 RigidTransform::apply(Point2 p) const {
  const Eigen::Vector2d q = linear * Eigen::Vector2d(p.x, p.y) + translation;
  return {q.x(), q.y()};
}

namespace {

struct Link {
  Point2 local;
  Point2 body;
  double measured = 0.0;
};

struct FitProblem {
  std::vector<std::pair<Point2, Point2>> anchors;  // (local, calibrated)
  std::vector<Link> links;
  std::vector<int> member_ids;  // component side endpoints of links
  std::vector<int> body_ids;    // body side endpoints of links

  std::size_t residual_count() const { return 2 * anchors.size() + links.size(); }

  bool mergeable() const {
    if (anchors.size() >= 2) return true;
    auto distinct = [](std::vector<int> ids) {
      std::sort(ids.begin(), ids.end());
      return static_cast<std::size_t>(std::unique(ids.begin(), ids.end()) - ids.begin());
    };
    return links.size() >= 3 && distinct(member_ids) >= 2 && distinct(body_ids) >= 2;
  }
};

struct Fit {
  RigidTransform transform;
  double cost = std::numeric_limits<double>::infinity();
  double rms = std::numeric_limits<double>::infinity();
};

RigidTransform make_transform(double theta, double tx, double ty, double chirality) {
  RigidTransform t;
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  t.linear << c, -s * chirality, s, c * chirality;
  t.translation = {tx, ty};
  return t;
}

// One local minimum per start: Procrustes (with >= 2 anchors) plus 8 evenly
// spaced rotations.
std::vector<Fit> fit_transform(const FitProblem& problem, double chirality) {
  ResidualFunction f = [&](const Eigen::VectorXd& x, Eigen::VectorXd& r, Eigen::MatrixXd* jac) {
    const auto count = static_cast<Eigen::Index>(problem.residual_count());
    r.resize(count);
    if (jac) jac->setZero(count, 3);
    const double c = std::cos(x(0));
    const double s = std::sin(x(0));
    auto place = [&](Point2 q, Point2& p, Point2& dtheta) {
      const double qx = q.x;
      const double qy = chirality * q.y;
      p = {c * qx - s * qy + x(1), s * qx + c * qy + x(2)};
      dtheta = {-s * qx - c * qy, c * qx - s * qy};
    };
    Eigen::Index row = 0;
    for (const auto& [local, target] : problem.anchors) {
      Point2 p;
      Point2 dt;
      place(local, p, dt);
      r(row) = p.x - target.x;
      r(row + 1) = p.y - target.y;
      if (jac) {
        (*jac)(row, 0) = dt.x;
        (*jac)(row, 1) = 1.0;
        (*jac)(row + 1, 0) = dt.y;
        (*jac)(row + 1, 2) = 1.0;
      }
      row += 2;
    }
    for (const Link& link : problem.links) {
      Point2 p;
      Point2 dt;
      place(link.local, p, dt);
      const Point2 diff = p - link.body;
      const double len = norm(diff);
      r(row) = len - link.measured;
      if (jac && len > 0.0) {
        const Point2 u = (1.0 / len) * diff;
        (*jac)(row, 0) = dot(u, dt);
        (*jac)(row, 1) = u.x;
        (*jac)(row, 2) = u.y;
      }
      ++row;
    }
  };

  std::vector<Eigen::Vector3d> starts;
  auto translation_for = [&](double theta) -> Eigen::Vector2d {
    const RigidTransform rot = make_transform(theta, 0.0, 0.0, chirality);
    Point2 from{};
    Point2 to{};
    double weight = 0.0;
    if (!problem.anchors.empty()) {
      for (const auto& [local, target] : problem.anchors) {
        from = from + rot.apply(local);
        to = to + target;
        weight += 1.0;
      }
    } else {
      for (const Link& link : problem.links) {
        from = from + rot.apply(link.local);
        to = to + link.body;
        weight += 1.0;
      }
    }
    return {(to.x - from.x) / weight, (to.y - from.y) / weight};
  };
  if (problem.anchors.size() >= 2) {
    Point2 lc{};
    Point2 gc{};
    for (const auto& [local, target] : problem.anchors) {
      lc = lc + Point2{local.x, chirality * local.y};
      gc = gc + target;
    }
    const double m = static_cast<double>(problem.anchors.size());
    lc = (1.0 / m) * lc;
    gc = (1.0 / m) * gc;
    double sc = 0.0;
    double ss = 0.0;
    for (const auto& [local, target] : problem.anchors) {
      const Point2 q = Point2{local.x, chirality * local.y} - lc;
      const Point2 g = target - gc;
      sc += dot(q, g);
      ss += cross(q, g);
    }
    const double theta = std::atan2(ss, sc);
    const Eigen::Vector2d t = translation_for(theta);
    starts.emplace_back(theta, t.x(), t.y());
  }
  // Angle scan. For a fixed rotation each link puts the translation on a
  // circle around (body - rotated local), so pairwise circle intersections
  // give translation guesses; the best one per angle seeds a local solve.
  auto cost_at = [&](double theta, const Eigen::Vector2d& t) {
    Eigen::VectorXd r;
    f(Eigen::Vector3d(theta, t.x(), t.y()), r, nullptr);
    return r.squaredNorm();
  };
  constexpr int kAngles = 24;
  for (int k = 0; k < kAngles; ++k) {
    const double theta = 2.0 * std::numbers::pi * k / kAngles;
    const RigidTransform rot = make_transform(theta, 0.0, 0.0, chirality);
    Eigen::Vector2d best_t = translation_for(theta);
    double best_cost = cost_at(theta, best_t);
    for (std::size_t i = 0; i < problem.links.size(); ++i) {
      const Point2 ci = problem.links[i].body - rot.apply(problem.links[i].local);
      for (std::size_t j = i + 1; j < problem.links.size(); ++j) {
        const Point2 cj = problem.links[j].body - rot.apply(problem.links[j].local);
        if (distance(ci, cj) <= 1e-9) continue;
        const double slack = problem.links[i].measured + problem.links[j].measured;
        for (const Point2& t : bilaterate(ci, cj, problem.links[i].measured, problem.links[j].measured, slack)) {
          const Eigen::Vector2d tv(t.x, t.y);
          const double c = cost_at(theta, tv);
          if (c < best_cost) {
            best_cost = c;
            best_t = tv;
          }
        }
      }
    }
    starts.emplace_back(theta, best_t.x(), best_t.y());
  }

  std::vector<Fit> fits;
  for (const Eigen::Vector3d& start : starts) {
    Eigen::VectorXd x = start;
    const SolverReport report = minimize_least_squares(f, x, {200, 1e-12, 10});
    Fit fit;
    fit.cost = report.final_cost;
    fit.transform = make_transform(x(0), x(1), x(2), chirality);
    fit.rms = std::sqrt(2.0 * fit.cost / static_cast<double>(problem.residual_count()));
    fits.push_back(fit);
  }
  return fits;
}

FitProblem build_problem(const Component& comp, const LocationMap& candidate, const RangeGraph& graph,
                         const LocationMap& body, const LocationMap& anchor_coords) {
  FitProblem p;
  std::vector<char> member(graph.node_count(), 0);
  for (int v : comp.realized.members) member[v] = 1;
  for (int v : comp.realized.members) {
    const Point2 local = *candidate[v];
    if (graph.is_anchor(v) && anchor_coords[v]) p.anchors.emplace_back(local, *anchor_coords[v]);
    for (const Incidence& inc : graph.neighbors(v)) {
      const int b = inc.vertex;
      if (member[b] || !body[b]) continue;
      p.links.push_back({local, *body[b], graph.edges()[inc.edge].measured});
      p.member_ids.push_back(v);
      p.body_ids.push_back(b);
    }
  }
  return p;
}

double edge_rms(const RangeGraph& graph, const LocationMap& locations) {
  double sum = 0.0;
  std::size_t count = 0;
  for (const Edge& e : graph.edges()) {
    if (!locations[e.i] || !locations[e.j]) continue;
    const double r = distance(*locations[e.i], *locations[e.j]) - e.measured;
    sum += r * r;
    ++count;
  }
  return count ? std::sqrt(sum / static_cast<double>(count)) : 0.0;
}

struct Placement {
  RigidTransform transform;
  int candidate = 0;
  std::vector<int> settled;  // members placed consistently by every near-best option
};

// Best fit over every candidate, chirality and start. A clearly different
// transform of the chosen candidate that fits almost as well refuses the
// whole component; near-best alternatives among the other flip candidates
// only leave unsettled the vertices they move.
std::optional<Placement> place_component(const Component& comp, const RangeGraph& graph, const LocationMap& body,
                                         const LocationMap& anchor_coords, const MergeOptions& options) {
  struct Option {
    Fit fit;
    int candidate;
  };
  std::vector<Option> all;
  for (std::size_t c = 0; c < comp.candidates.size(); ++c) {
    const FitProblem p = build_problem(comp, comp.candidates[c], graph, body, anchor_coords);
    for (double chirality : {1.0, -1.0}) {
      for (const Fit& fit : fit_transform(p, chirality)) all.push_back({fit, static_cast<int>(c)});
    }
  }
  auto placed = [&](const Option& o, int v) { return o.fit.transform.apply(*comp.candidates[o.candidate][v]); };

  // With a radius, an option that puts an unlinked pair (inside the candidate
  // or against the merged body) closer than radius - noise_bound contradicts
  // the ranging model. Such options are dropped while a consistent one exists.
  std::vector<char> viable(all.size(), 1);
  if (options.radius_hint) {
    const double reach = *options.radius_hint - options.noise_bound;
    std::vector<char> member(graph.node_count(), 0);
    for (int v : comp.realized.members) member[v] = 1;
    auto consistent = [&](const Option& o) {
      const LocationMap& cand = comp.candidates[o.candidate];
      for (int v : comp.realized.members) {
        for (int w = 0; w < graph.node_count(); ++w) {
          if (w == v || graph.has_edge(v, w)) continue;
          if (member[w] && w > v && distance(*cand[v], *cand[w]) < reach) return false;
          if (!member[w] && body[w] && distance(placed(o, v), *body[w]) < reach) return false;
        }
      }
      return true;
    };
    for (std::size_t k = 0; k < all.size(); ++k) viable[k] = consistent(all[k]);
    if (std::none_of(viable.begin(), viable.end(), [](char c) { return c != 0; })) viable.assign(all.size(), 1);
  }
  std::size_t best = all.size();
  for (std::size_t k = 0; k < all.size(); ++k) {
    if (viable[k] && (best == all.size() || all[k].fit.rms < all[best].fit.rms)) best = k;
  }

  double extent = 0.0;
  for (int v : comp.realized.members) extent = std::max(extent, norm(placed(all[best], v)));
  const double distinct = std::max(2.0 * options.noise_bound, 1e-6 * (1.0 + extent));
  const double close = options.ambiguity_ratio * all[best].fit.rms + 1e-9 * (1.0 + extent);

  std::vector<char> moved(graph.node_count(), 0);
  for (std::size_t k = 0; k < all.size(); ++k) {
    const Option& o = all[k];
    if (!viable[k] || o.fit.rms > close) continue;
    for (int v : comp.realized.members) {
      if (distance(placed(o, v), placed(all[best], v)) <= distinct) continue;
      if (o.candidate == all[best].candidate) return std::nullopt;
      moved[v] = 1;
    }
  }
  Placement out{all[best].fit.transform, all[best].candidate, {}};
  for (int v : comp.realized.members) {
    if (!moved[v]) out.settled.push_back(v);
  }
  return out;
}

}  // namespace

GlobalSolution merge_components(const std::vector<Component>& components, const RangeGraph& graph,
                                const LocationMap& anchor_coords, const MergeOptions& options) {
  const int n = graph.node_count();
  if (static_cast<int>(anchor_coords.size()) != n) throw std::invalid_argument("anchor map size mismatch");
  GlobalSolution sol;
  sol.locations.assign(n, std::nullopt);
  for (int a : graph.anchors()) sol.locations[a] = anchor_coords[a];
  sol.transforms.assign(components.size(), std::nullopt);
  sol.chosen_candidate.assign(components.size(), -1);
  sol.component_of.assign(n, -1);

  std::vector<char> done(components.size(), 0);
  while (true) {
    // Mergeable components in greedy order: most anchors, most links, lowest id.
    std::vector<std::pair<std::tuple<std::size_t, std::size_t>, int>> queue;
    for (std::size_t k = 0; k < components.size(); ++k) {
      if (done[k]) continue;
      const FitProblem p = build_problem(components[k], components[k].candidates.front(), graph, sol.locations,
                                         anchor_coords);
      if (p.mergeable()) queue.push_back({{p.anchors.size(), p.links.size()}, static_cast<int>(k)});
    }
    std::stable_sort(queue.begin(), queue.end(), [](const auto& a, const auto& b) { return a.first > b.first; });

    bool merged = false;
    for (const auto& entry : queue) {
      const int pick = entry.second;
      const Component& comp = components[pick];
      std::optional<Placement> placed = place_component(comp, graph, sol.locations, anchor_coords, options);
      if (!placed) continue;
      const LocationMap& chosen = comp.candidates[placed->candidate];
      for (int v : placed->settled) {
        if (!(graph.is_anchor(v) && anchor_coords[v])) sol.locations[v] = placed->transform.apply(*chosen[v]);
        sol.component_of[v] = comp.id;
      }
      sol.transforms[pick] = placed->transform;
      sol.chosen_candidate[pick] = placed->candidate;
      sol.merge_order.push_back(pick);
      done[pick] = 1;
      merged = true;
      break;
    }
    if (!merged) break;
  }
  for (std::size_t k = 0; k < components.size(); ++k) {
    if (!done[k]) sol.unmergeable.push_back(static_cast<int>(k));
  }

  if (options.refine) {
    RefineResult refined = refine_lsq(graph, sol.locations, anchor_coords, options.solver);
    sol.locations = std::move(refined.locations);
    sol.warning = std::move(refined.warning);
  }
  sol.residual = edge_rms(graph, sol.locations);
  return sol;
}

RefineResult refine_lsq(const RangeGraph& graph, const LocationMap& initial, const LocationMap& anchor_coords,
                        const SolverOptions& options) {
  const int n = graph.node_count();
  if (static_cast<int>(initial.size()) != n) throw std::invalid_argument("initial map size mismatch");
  RefineResult out;
  out.locations = initial;
  std::vector<int> column(n, -1);
  int variables = 0;
  for (int v = 0; v < n; ++v) {
    if (v < static_cast<int>(anchor_coords.size()) && anchor_coords[v] && graph.is_anchor(v)) {
      out.locations[v] = anchor_coords[v];
    } else if (out.locations[v]) {
      column[v] = variables++;
    }
  }
  std::vector<Edge> used;
  for (const Edge& e : graph.edges()) {
    if (out.locations[e.i] && out.locations[e.j] && (column[e.i] >= 0 || column[e.j] >= 0)) used.push_back(e);
  }
  if (variables == 0 || used.empty()) {
    out.report.converged = true;
    return out;
  }

  Eigen::VectorXd x(2 * variables);
  for (int v = 0; v < n; ++v) {
    if (column[v] >= 0) {
      x(2 * column[v]) = out.locations[v]->x;
      x(2 * column[v] + 1) = out.locations[v]->y;
    }
  }
  const LocationMap& fixed = out.locations;
  ResidualFunction f = [&](const Eigen::VectorXd& p, Eigen::VectorXd& r, Eigen::MatrixXd* jac) {
    r.resize(static_cast<Eigen::Index>(used.size()));
    if (jac) jac->setZero(static_cast<Eigen::Index>(used.size()), p.size());
    auto at = [&](int v) -> Point2 {
      return column[v] >= 0 ? Point2{p(2 * column[v]), p(2 * column[v] + 1)} : *fixed[v];
    };
    for (std::size_t k = 0; k < used.size(); ++k) {
      const Edge& e = used[k];
      const Point2 diff = at(e.i) - at(e.j);
      const double len = norm(diff);
      const auto row = static_cast<Eigen::Index>(k);
      r(row) = len - e.measured;
      if (!jac || !(len > 0.0)) continue;
      const Point2 u = (1.0 / len) * diff;
      if (column[e.i] >= 0) {
        (*jac)(row, 2 * column[e.i]) = u.x;
        (*jac)(row, 2 * column[e.i] + 1) = u.y;
      }
      if (column[e.j] >= 0) {
        (*jac)(row, 2 * column[e.j]) = -u.x;
        (*jac)(row, 2 * column[e.j] + 1) = -u.y;
      }
    }
  };
  out.report = minimize_least_squares(f, x, options);
  for (int v = 0; v < n; ++v) {
    if (column[v] >= 0) out.locations[v] = Point2{x(2 * column[v]), x(2 * column[v] + 1)};
  }
  if (out.report.stalled) out.warning = "refinement stalled; returning the best iterate";
  return out;
}

}  // namespace rloc

#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "oracles.hpp"
#include "rloc/harness.hpp"
#include "rloc/io.hpp"

using namespace rloc;

namespace {

LocationMap anchor_map(const Scenario& s) {
  LocationMap m(s.node_count());
  for (int a : s.graph.anchors()) m[a] = s.true_positions[a];
  return m;
}

LocationMap as_map(const std::vector<Point2>& pts) { return LocationMap(pts.begin(), pts.end()); }

// Dense noise-free layout whose unit disk graph has a trilateration order.
Scenario rigid_scenario(std::uint64_t seed, int n) {
  for (std::uint64_t attempt = 0;; ++attempt) {
    RandomStream rng(seed * 131 + attempt);
    std::vector<Point2> pts;
    for (int v = 0; v < n; ++v) pts.push_back({rng.uniform(0, 40), rng.uniform(0, 40)});
    RandomStream probe_rng(1);
    const Scenario probe = measure_positions(pts, 22.0, {}, NoiseModel::none(), probe_rng);
    std::vector<int> order;
    if (!oracle::is_trilateration_graph(probe.graph, &order)) continue;
    std::vector<int> anchors{order[0], order[1], order[2]};
    std::sort(anchors.begin(), anchors.end());
    if (line_distance(pts[anchors[2]], pts[anchors[0]], pts[anchors[1]]) < 2.0) continue;
    return measure_positions(pts, 22.0, anchors, NoiseModel::none(), probe_rng);
  }
}

void check_cdf(const std::vector<std::pair<double, double>>& cdf) {
  REQUIRE(!cdf.empty());
  CHECK(cdf.front().second >= 0.0);
  CHECK(cdf.back().second == 1.0);
  for (std::size_t k = 1; k < cdf.size(); ++k) {
    CHECK(cdf[k].first >= cdf[k - 1].first);
    CHECK(cdf[k].second >= cdf[k - 1].second);
  }
}

}  // namespace

TEST_CASE("error evaluation examples") {
  std::vector<Point2> truth;
  for (int v = 0; v < 10; ++v) truth.push_back({static_cast<double>(v), 0.0});

  ErrorSummary exact = evaluate_errors(truth, as_map(truth));
  CHECK(exact.mean == 0.0);
  CHECK(exact.max == 0.0);
  CHECK(exact.localized_fraction == 1.0);
  REQUIRE(exact.cdf.size() == 100);
  for (const auto& [level, fraction] : exact.cdf) {
    CHECK(level == 0.0);
    CHECK(fraction == 1.0);
  }

  LocationMap shifted = as_map(truth);
  shifted[4] = truth[4] + Point2{0.0, 3.0};
  const ErrorSummary one = evaluate_errors(truth, shifted);
  CHECK(one.mean == doctest::Approx(0.3));
  CHECK(one.max == doctest::Approx(3.0));
  CHECK(one.median == 0.0);
  CHECK(one.errors[4] == doctest::Approx(3.0));
  check_cdf(one.cdf);
  CHECK(one.cdf.back().first == doctest::Approx(3.0));
  CHECK(one.cdf.front().second == doctest::Approx(0.9));

  LocationMap partial = shifted;
  partial[0].reset();
  partial[1].reset();
  const ErrorSummary part = evaluate_errors(truth, partial);
  CHECK(part.evaluated == 10);
  CHECK(part.localized == 8);
  CHECK(part.localized_fraction == doctest::Approx(0.8));
  CHECK(part.mean == doctest::Approx(3.0 / 8.0));
  CHECK(std::isnan(part.errors[0]));

  std::vector<char> mask(10, 1);
  mask[4] = 0;
  const ErrorSummary masked = evaluate_errors(truth, shifted, mask);
  CHECK(masked.evaluated == 9);
  CHECK(masked.max == 0.0);
  CHECK(std::isnan(masked.errors[4]));

  const ErrorSummary nothing = evaluate_errors(truth, LocationMap(10));
  CHECK(nothing.localized == 0);
  CHECK(nothing.localized_fraction == 0.0);
}

TEST_CASE("quantiles and names") {
  const std::vector<double> v{1.0, 2.0, 3.0, 4.0};
  CHECK(sorted_quantile(v, 0.0) == 1.0);
  CHECK(sorted_quantile(v, 1.0) == 4.0);
  CHECK(sorted_quantile(v, 0.5) == doctest::Approx(2.5));
  CHECK(sorted_quantile(v, 0.9) == doctest::Approx(3.7));
  for (Algorithm a : kAllAlgorithms) CHECK(algorithm_from_string(to_string(a)) == a);
  CHECK_THROWS_AS(algorithm_from_string("sdp"), std::invalid_argument);
}

TEST_CASE("least-squares refinement examples") {
  const Scenario s = rigid_scenario(2, 14);
  const LocationMap truth = as_map(s.true_positions);
  const RefineResult still = refine_lsq(s.graph, truth, anchor_map(s));
  for (int v = 0; v < s.node_count(); ++v) CHECK(distance(*still.locations[v], s.true_positions[v]) <= 1e-12);

  RandomStream rng(3);
  LocationMap jitter = truth;
  for (auto& p : jitter) p = *p + Point2{0.05 * rng.normal(), 0.05 * rng.normal()};
  const RefineResult back = refine_lsq(s.graph, jitter, anchor_map(s));
  for (int v = 0; v < s.node_count(); ++v) CHECK(distance(*back.locations[v], s.true_positions[v]) <= 1e-8);
}

TEST_CASE("refinement never raises the residual of an rcgr start") {
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    ScenarioParams sp;
    sp.seed = seed;
    sp.noise = NoiseModel::multiplicative(0.1, sp.radius);
    const Scenario s = generate_scenario(sp);
    RcgrOptions opt;
    opt.noise_bound = s.noise.bound;
    opt.radius_hint = s.radius;
    const LocationMap anchors = anchor_map(s);
    const GlobalSolution raw =
        merge_components(rcgr(s.graph, opt), s.graph, anchors, MergeOptions{.refine = false, .noise_bound = s.noise.bound});
    const RefineResult refined = refine_lsq(s.graph, raw.locations, anchors);
    auto cost = [&](const LocationMap& m) {
      double c = 0.0;
      for (const Edge& e : s.graph.edges()) {
        if (m[e.i] && m[e.j]) c += std::pow(distance(*m[e.i], *m[e.j]) - e.measured, 2);
      }
      return c;
    };
    CHECK(cost(refined.locations) <= cost(raw.locations) * (1.0 + 1e-12));
    for (int v = 0; v < s.node_count(); ++v) CHECK(refined.locations[v].has_value() == raw.locations[v].has_value());
  }
}

TEST_CASE("baselines are exact without noise") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Scenario s = rigid_scenario(seed, 15);
    const Localization call = run_call_baseline(s.graph, anchor_map(s), 0.0, s.radius);
    const RefineResult lsq = run_lsq_oracle(s);
    for (int v = 0; v < s.node_count(); ++v) {
      REQUIRE(call.solution.locations[v].has_value());
      CHECK(distance(*call.solution.locations[v], s.true_positions[v]) <= 1e-6);
      CHECK(distance(*lsq.locations[v], s.true_positions[v]) <= 1e-9);
    }
  }
}

TEST_CASE("lsq oracle skips parts without three anchors") {
  RandomStream rng(1);
  // Two far apart triangles; only the first holds the anchors.
  const Scenario s = measure_positions({{0, 0}, {5, 0}, {0, 5}, {1, 1}, {80, 80}, {85, 80}, {80, 85}}, 10.0,
                                       {0, 1, 2}, NoiseModel::none(), rng);
  const RefineResult r = run_lsq_oracle(s);
  CHECK(distance(*r.locations[3], s.true_positions[3]) <= 1e-9);
  for (int v = 4; v < 7; ++v) CHECK_FALSE(r.locations[v].has_value());
}

TEST_CASE("trial runs share one scenario") {
  ScenarioParams sp;
  sp.seed = 12;
  sp.noise = NoiseModel::multiplicative(0.1, sp.radius);
  const Scenario s = generate_scenario(sp);
  const TrialResult t = run_trial(s, TrialOptions{}, 4);
  CHECK(t.trial == 4);
  CHECK(t.seed == 12);
  CHECK(t.truth == s.true_positions);
  REQUIRE(t.results.size() == 3);
  for (const AlgorithmResult& r : t.results) {
    const AlgorithmResult alone = run_algorithm(s, r.algorithm, TrialOptions{});
    CHECK(alone.estimates == r.estimates);
    CHECK(alone.summary.evaluated == s.node_count() - 3);
    check_cdf(r.summary.cdf.empty() ? std::vector<std::pair<double, double>>{{0.0, 1.0}} : r.summary.cdf);
    for (int a : s.graph.anchors()) CHECK(std::isnan(r.summary.errors[a]));
  }
}

TEST_CASE("zero-noise single-trial sweep ties at zero error") {
  SweepSpec spec;
  spec.trials = 1;
  spec.node_counts = {20};
  spec.radii = {45.0};
  spec.noise_scale = 0.0;
  spec.seed_base = 3;
  const SweepResult r = run_sweep(spec);
  REQUIRE(r.summary.size() == 3);
  for (const SweepRow& row : r.summary) {
    CHECK(row.trials == 1);
    CHECK(row.localized_fraction > 0.0);
    CHECK(row.mean <= 1e-6);
  }
}

TEST_CASE("sweeps are reproducible and independent of the worker count") {
  SweepSpec spec;
  spec.trials = 4;
  spec.node_counts = {25, 30};
  spec.target_degrees = {9.0};
  spec.seed_base = 50;
  auto render = [](const SweepResult& r) {
    std::ostringstream out;
    write_sweep_summary(out, r);
    write_sweep_cdf(out, r);
    write_degree_table(out, r);
    write_results_header(out);
    for (const SweepTrial& t : r.trials) {
      if (t.result) write_results(out, *t.result);
    }
    return out.str();
  };
  const std::string a = render(run_sweep(spec));
  spec.workers = 3;
  const SweepResult threaded = run_sweep(spec);
  CHECK(render(threaded) == a);
  REQUIRE(threaded.trials.size() == 8);
  for (const SweepTrial& t : threaded.trials) {
    REQUIRE(t.result.has_value());
    CHECK(t.result->seed == 50 + static_cast<std::uint64_t>(t.trial));
    CHECK(std::abs(t.result->mean_degree - 9.0) <= 0.5);
  }
  for (const SweepRow& row : threaded.summary) check_cdf(row.cdf);

  SweepSpec bad = spec;
  bad.radii.clear();
  bad.target_degrees.clear();
  CHECK_THROWS_AS(run_sweep(bad), std::invalid_argument);
  bad = spec;
  bad.trials = 0;
  CHECK_THROWS_AS(run_sweep(bad), std::invalid_argument);
}

TEST_CASE("number formatting round-trips") {
  RandomStream rng(6);
  for (int k = 0; k < 1000; ++k) {
    const double x = rng.normal() * std::pow(10.0, rng.uniform(-8, 8));
    CHECK(std::stod(format_number(x)) == x);
  }
  CHECK(format_number(std::numeric_limits<double>::quiet_NaN()) == "nan");
  CHECK(format_number(0.5) == "0.5");
}

TEST_CASE("file formats") {
  std::istringstream spec_in(R"({"trials": 5, "node_counts": [30, 40], "radii": [25], "seed_base": 9, "workers": 2})");
  const SweepSpec spec = read_sweep_spec(spec_in);
  CHECK(spec.trials == 5);
  CHECK(spec.node_counts == std::vector<int>{30, 40});
  CHECK(spec.radii == std::vector<double>{25.0});
  CHECK(spec.seed_base == 9);
  CHECK(spec.workers == 2);
  CHECK(sweep_configs(spec).size() == 2);

  std::istringstream graph_in(
      R"({"n": 3, "anchors": [0], "edges": [{"i": 0, "j": 1, "measured": 1.0}], "locations": [[0, 0], null, [2, 0]]})");
  const EmbeddedGraph eg = read_embedded_graph(graph_in);
  CHECK(eg.graph.node_count() == 3);
  CHECK(eg.graph.is_anchor(0));
  CHECK(eg.located(0));
  CHECK_FALSE(eg.located(1));
  CHECK(eg.at(2) == Point2{2, 0});

  ScenarioParams sp;
  sp.seed = 2;
  const Scenario s = generate_scenario(sp);
  std::ostringstream out;
  write_results_header(out);
  write_results(out, run_trial(s, TrialOptions{.algorithms = {Algorithm::kLsq}}));
  std::istringstream lines(out.str());
  std::string line;
  std::getline(lines, line);
  CHECK(line == "trial,algo,vertex,true_x,true_y,est_x,est_y,error,component_id");
  int rows = 0;
  while (std::getline(lines, line)) {
    ++rows;
    CHECK(std::count(line.begin(), line.end(), ',') == 8);
  }
  CHECK(rows == s.node_count());

  std::ostringstream rsm;
  const EmbeddedGraph tri{RangeGraph(3, {0, 1}, {{0, 2, 1.0}, {1, 2, 1.0}}),
                          {Point2{-1, 0}, Point2{1, 0}, Point2{0, 1}}};
  const SensitivityMatrix a = build_rsm(tri, std::vector<int>{0, 1});
  write_rsm(rsm, a, condition_number(a));
  CHECK(rsm.str().find("rows 2 cols 2") == 0);
  CHECK(rsm.str().find("kappa 1") != std::string::npos);
}

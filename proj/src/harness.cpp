#include "rloc/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

namespace rloc {

std::string to_string(Algorithm algo) {
  switch (algo) {
    case Algorithm::kRcgr:
      return "rcgr";
    case Algorithm::kCall:
      return "call";
    case Algorithm::kLsq:
      return "lsq";
  }
  return "unknown";
}

Algorithm algorithm_from_string(const std::string& name) {
  if (name == "rcgr") return Algorithm::kRcgr;
  if (name == "call") return Algorithm::kCall;
  if (name == "lsq") return Algorithm::kLsq;
  throw std::invalid_argument("unknown algorithm '" + name + "'");
}

double sorted_quantile(std::span<const double> sorted, double q) {
  if (sorted.empty()) return std::numeric_limits<double>::quiet_NaN();
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

namespace {

void fill_statistics(std::vector<double> values, ErrorSummary& s) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  s.localized = static_cast<int>(values.size());
  s.localized_fraction = s.evaluated ? static_cast<double>(s.localized) / s.evaluated : 0.0;
  s.cdf.clear();
  if (values.empty()) {
    s.mean = s.median = s.p90 = s.max = nan;
    return;
  }
  double sum = 0.0;
  for (double e : values) sum += e;
  s.mean = sum / static_cast<double>(values.size());
  s.median = sorted_quantile(values, 0.5);
  s.p90 = sorted_quantile(values, 0.9);
  s.max = values.back();
  for (int k = 0; k < 100; ++k) {
    const double level = s.max * k / 99.0;
    const auto below = std::upper_bound(values.begin(), values.end(), level) - values.begin();
    s.cdf.emplace_back(level, static_cast<double>(below) / static_cast<double>(values.size()));
  }
  // The top level is the maximum itself, so the fraction there is exactly one.
  s.cdf.back() = {s.max, 1.0};
}

std::vector<char> ordinary_mask(const RangeGraph& graph) {
  std::vector<char> mask(graph.node_count(), 1);
  for (int a : graph.anchors()) mask[a] = 0;
  return mask;
}

}  // namespace

ErrorSummary evaluate_errors(std::span<const Point2> truth, const LocationMap& estimates,
                             const std::vector<char>& mask) {
  if (estimates.size() != truth.size()) throw std::invalid_argument("truth and estimates differ in size");
  if (!mask.empty() && mask.size() != truth.size()) throw std::invalid_argument("mask size mismatch");
  ErrorSummary s;
  s.errors.assign(truth.size(), std::numeric_limits<double>::quiet_NaN());
  std::vector<double> values;
  for (std::size_t v = 0; v < truth.size(); ++v) {
    if (!mask.empty() && !mask[v]) continue;
    ++s.evaluated;
    if (!estimates[v]) continue;
    s.errors[v] = distance(truth[v], *estimates[v]);
    values.push_back(s.errors[v]);
  }
  fill_statistics(std::move(values), s);
  return s;
}

Localization run_call_baseline(const RangeGraph& graph, const LocationMap& anchor_coords, double noise_bound,
                               std::optional<double> radius_hint) {
  RcgrOptions options;
  options.robust = false;
  options.noise_bound = noise_bound;
  options.radius_hint = radius_hint;
  return localize(graph, anchor_coords, options);
}

RefineResult run_lsq_oracle(const Scenario& scenario) {
  const RangeGraph& g = scenario.graph;
  LocationMap initial(g.node_count());
  for (const std::vector<int>& part : g.connected_parts()) {
    const auto anchors = std::count_if(part.begin(), part.end(), [&](int v) { return g.is_anchor(v); });
    if (anchors < 3) continue;
    for (int v : part) initial[v] = scenario.true_positions[v];
  }
  return refine_lsq(g, initial, scenario.anchor_locations());
}

AlgorithmResult run_algorithm(const Scenario& scenario, Algorithm algo, const TrialOptions& options) {
  const RangeGraph& g = scenario.graph;
  AlgorithmResult out;
  out.algorithm = algo;
  const LocationMap anchors = scenario.anchor_locations();
  if (algo == Algorithm::kLsq) {
    RefineResult r = run_lsq_oracle(scenario);
    out.estimates = std::move(r.locations);
    out.warning = std::move(r.warning);
    out.component_id.assign(g.node_count(), -1);
    out.realization_index.assign(g.node_count(), -1);
  } else {
    Localization loc;
    if (algo == Algorithm::kRcgr) {
      RcgrOptions ro;
      ro.t_kappa = options.t_kappa;
      ro.noise_bound = scenario.noise.bound;
      ro.band_half_width = options.band_half_width;
      ro.radius_hint = scenario.radius;
      loc = localize(g, anchors, ro);
    } else {
      loc = run_call_baseline(g, anchors, scenario.noise.bound, scenario.radius);
    }
    out.estimates = std::move(loc.solution.locations);
    out.component_id = std::move(loc.solution.component_of);
    out.realization_index = std::move(loc.realization_index);
    out.component_count = static_cast<int>(loc.components.size());
    out.warning = std::move(loc.solution.warning);
  }
  out.summary = evaluate_errors(scenario.true_positions, out.estimates, ordinary_mask(g));
  return out;
}

TrialResult run_trial(const Scenario& scenario, const TrialOptions& options, int trial) {
  TrialResult t;
  t.trial = trial;
  t.seed = scenario.seed;
  t.node_count = scenario.node_count();
  t.radius = scenario.radius;
  t.mean_degree = scenario.graph.mean_degree();
  t.truth = scenario.true_positions;
  for (Algorithm algo : options.algorithms) t.results.push_back(run_algorithm(scenario, algo, options));
  return t;
}

void SweepSpec::validate() const {
  if (trials < 1) throw std::invalid_argument("sweep needs at least one trial");
  if (node_counts.empty()) throw std::invalid_argument("sweep needs at least one node count");
  if (radii.empty() && target_degrees.empty()) throw std::invalid_argument("sweep needs radii or target degrees");
  if (!(noise_scale >= 0.0)) throw std::invalid_argument("noise scale must be non-negative");
  if (workers < 1) throw std::invalid_argument("worker count must be positive");
  for (int n : node_counts) {
    if (n < anchor_count || n < 3) throw std::invalid_argument("node count smaller than anchor count");
  }
}

std::vector<SweepConfig> sweep_configs(const SweepSpec& spec) {
  std::vector<SweepConfig> configs;
  for (int n : spec.node_counts) {
    if (!spec.target_degrees.empty()) {
      for (double d : spec.target_degrees) configs.push_back({n, std::nullopt, d});
    } else {
      for (double r : spec.radii) configs.push_back({n, r, std::nullopt});
    }
  }
  return configs;
}

SweepRow aggregate(std::span<const TrialResult* const> trials, Algorithm algo) {
  SweepRow row;
  row.algorithm = algo;
  ErrorSummary pooled;
  std::vector<double> values;
  double degree_sum = 0.0;
  double trial_mean_sum = 0.0;
  int trial_means = 0;
  for (const TrialResult* t : trials) {
    for (const AlgorithmResult& r : t->results) {
      if (r.algorithm != algo) continue;
      ++row.trials;
      degree_sum += t->mean_degree;
      pooled.evaluated += r.summary.evaluated;
      for (double e : r.summary.errors) {
        if (!std::isnan(e)) values.push_back(e);
      }
      if (r.summary.localized > 0) {
        trial_mean_sum += r.summary.mean;
        ++trial_means;
      }
    }
  }
  fill_statistics(std::move(values), pooled);
  row.mean_degree = row.trials ? degree_sum / row.trials : 0.0;
  row.mean = pooled.mean;
  row.median = pooled.median;
  row.p90 = pooled.p90;
  row.localized_fraction = pooled.localized_fraction;
  row.trial_mean = trial_means ? trial_mean_sum / trial_means : std::numeric_limits<double>::quiet_NaN();
  row.cdf = std::move(pooled.cdf);
  return row;
}

SweepResult run_sweep(const SweepSpec& spec) {
  spec.validate();
  SweepResult out;
  out.configs = sweep_configs(spec);
  for (std::size_t c = 0; c < out.configs.size(); ++c) {
    for (int t = 0; t < spec.trials; ++t) out.trials.push_back({c, t, std::nullopt, std::nullopt});
  }

  TrialOptions options;
  options.t_kappa = spec.t_kappa;
  auto work = [&](SweepTrial& slot) {
    const SweepConfig& cfg = out.configs[slot.config];
    const std::uint64_t seed = spec.seed_base + static_cast<std::uint64_t>(slot.trial);
    try {
      double radius = cfg.radius.value_or(0.0);
      if (cfg.target_degree) {
        radius = radius_for_degree(draw_positions(cfg.node_count, spec.area, seed), *cfg.target_degree);
      }
      ScenarioParams params;
      params.node_count = cfg.node_count;
      params.area = spec.area;
      params.radius = radius;
      params.anchor_count = spec.anchor_count;
      params.seed = seed;
      params.noise = spec.noise_scale > 0.0 ? NoiseModel::multiplicative(spec.noise_scale, radius) : NoiseModel::none();
      slot.result = run_trial(generate_scenario(params), options, slot.trial);
    } catch (const std::exception& e) {
      slot.failure = e.what();
    }
  };

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < out.trials.size(); k = next++) work(out.trials[k]);
  };
  const int threads = std::min<int>(spec.workers, static_cast<int>(out.trials.size()));
  std::vector<std::thread> pool;
  for (int k = 1; k < threads; ++k) pool.emplace_back(worker);
  worker();
  for (std::thread& th : pool) th.join();

  for (std::size_t c = 0; c < out.configs.size(); ++c) {
    std::vector<const TrialResult*> done;
    for (const SweepTrial& st : out.trials) {
      if (st.config == c && st.result) done.push_back(&*st.result);
    }
    for (Algorithm algo : kAllAlgorithms) {
      SweepRow row = aggregate(done, algo);
      row.config = c;
      out.summary.push_back(std::move(row));
    }
  }
  return out;
}

}  // namespace rloc

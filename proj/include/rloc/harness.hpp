#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rloc/geometry.hpp"
#include "rloc/rcgr.hpp"
#include "rloc/scenario.hpp"

namespace rloc {

enum class Algorithm { kRcgr, kCall, kLsq };

std::string to_string(Algorithm algo);
Algorithm algorithm_from_string(const std::string& name);
inline constexpr Algorithm kAllAlgorithms[] = {Algorithm::kRcgr, Algorithm::kCall, Algorithm::kLsq};

struct ErrorSummary {
  std::vector<double> errors;  // per vertex; NaN when unlocalized or not evaluated
  int evaluated = 0;
  int localized = 0;
  double mean = 0.0;
  double median = 0.0;
  double p90 = 0.0;
  double max = 0.0;
  double localized_fraction = 0.0;
  /// Empirical CDF of the localized errors at 100 evenly spaced levels from 0
  /// to the maximum error.
  std::vector<std::pair<double, double>> cdf;
};

/// Errors of `estimates` against `truth` over the vertices flagged in `mask`
/// (every vertex when the mask is empty). Unlocalized vertices only lower the
/// localized fraction.
ErrorSummary evaluate_errors(std::span<const Point2> truth, const LocationMap& estimates,
                             const std::vector<char>& mask = {});

/// Linear-interpolated quantile of already sorted values, q in [0, 1].
double sorted_quantile(std::span<const double> sorted, double q);

/// Ungated baseline: the component pipeline in first-found order without
/// kappa gating, mirror candidates or joint refinement.
Localization run_call_baseline(const RangeGraph& graph, const LocationMap& anchor_coords, double noise_bound,
                               std::optional<double> radius_hint);

/// Least-squares reference started from the true positions. Only connected
/// parts holding at least three anchors are localized.
RefineResult run_lsq_oracle(const Scenario& scenario);

struct TrialOptions {
  double t_kappa = 4.0;
  std::optional<double> band_half_width;
  std::vector<Algorithm> algorithms{kAllAlgorithms[0], kAllAlgorithms[1], kAllAlgorithms[2]};
};

struct AlgorithmResult {
  Algorithm algorithm = Algorithm::kRcgr;
  LocationMap estimates;
  std::vector<int> component_id;       // -1 when unlocalized or not component based
  std::vector<int> realization_index;  // -1 when unlocalized or not component based
  int component_count = 0;
  ErrorSummary summary;  // over ordinary vertices
  std::optional<std::string> warning;
};

struct TrialResult {
  int trial = 0;
  std::uint64_t seed = 0;
  int node_count = 0;
  double radius = 0.0;
  double mean_degree = 0.0;
  std::vector<Point2> truth;
  std::vector<AlgorithmResult> results;
};

AlgorithmResult run_algorithm(const Scenario& scenario, Algorithm algo, const TrialOptions& options);

/// Every requested algorithm on the same scenario.
TrialResult run_trial(const Scenario& scenario, const TrialOptions& options, int trial = 0);

struct SweepSpec {
  int trials = 30;
  std::vector<int> node_counts{30};
  std::vector<double> radii;           // used when target_degrees is empty
  std::vector<double> target_degrees;  // radius tuned per trial
  double noise_scale = 0.1;
  double t_kappa = 4.0;
  std::uint64_t seed_base = 1;
  Area area;
  int anchor_count = 3;
  int workers = 1;

  void validate() const;
};

struct SweepConfig {
  int node_count = 0;
  std::optional<double> radius;
  std::optional<double> target_degree;
};

struct SweepTrial {
  std::size_t config = 0;
  int trial = 0;
  std::optional<TrialResult> result;
  std::optional<std::string> failure;
};

struct SweepRow {
  std::size_t config = 0;
  Algorithm algorithm = Algorithm::kRcgr;
  int trials = 0;
  double mean_degree = 0.0;  // averaged over successful trials
  double mean = 0.0;         // pooled over every evaluated vertex
  double median = 0.0;
  double p90 = 0.0;
  double localized_fraction = 0.0;
  double trial_mean = 0.0;  // average of the per-trial mean errors
  std::vector<std::pair<double, double>> cdf;
};

struct SweepResult {
  std::vector<SweepConfig> configs;
  std::vector<SweepTrial> trials;  // config-major, then trial index
  std::vector<SweepRow> summary;   // config-major, then algorithm
};

std::vector<SweepConfig> sweep_configs(const SweepSpec& spec);

/// Runs every configuration x trial (trial t uses seed_base + t) on up to
/// spec.workers threads. A failing trial is recorded and the sweep continues.
SweepResult run_sweep(const SweepSpec& spec);

/// Pooled statistics of one algorithm over a set of trials.
SweepRow aggregate(std::span<const TrialResult* const> trials, Algorithm algo);

}  // namespace rloc

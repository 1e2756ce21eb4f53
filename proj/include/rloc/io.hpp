#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "rloc/flip_risk.hpp"
#include "rloc/harness.hpp"
#include "rloc/scenario.hpp"
#include "rloc/sensitivity.hpp"

namespace rloc {

/// Decimal text that round-trips the double exactly ("nan" for NaN).
std::string format_number(double value);

/// Scenario as JSON: node count, area, radius, seed, noise, anchors, true
/// positions and measured edges.
void write_scenario(std::ostream& out, const Scenario& scenario);
Scenario read_scenario(std::istream& in);

/// Accepts either a scenario file (true positions become the locations) or a
/// graph file with a "locations" array whose entries may be null.
EmbeddedGraph read_embedded_graph(std::istream& in);

void write_mirror_report(std::ostream& out, const MirrorReport& report);

/// One "row col value" line per non-zero entry, then the singular values and kappa.
void write_rsm(std::ostream& out, const SensitivityMatrix& a, const SpectrumResult& spectrum);

SweepSpec read_sweep_spec(std::istream& in);

/// Per-vertex results: trial, algo, vertex, true_x, true_y, est_x, est_y, error, component_id.
void write_results_header(std::ostream& out);
void write_results(std::ostream& out, const TrialResult& trial);

/// One row per algorithm of a single trial.
void write_trial_summary(std::ostream& out, const TrialResult& trial);

void write_sweep_summary(std::ostream& out, const SweepResult& sweep);
void write_sweep_cdf(std::ostream& out, const SweepResult& sweep);
/// Mean error against average degree per configuration and algorithm.
void write_degree_table(std::ostream& out, const SweepResult& sweep);
void write_sweep_failures(std::ostream& out, const SweepResult& sweep);

}  // namespace rloc

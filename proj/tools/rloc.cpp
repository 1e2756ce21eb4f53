// Command-line front end: scenario generation, graph analysis, single trials
// and Monte-Carlo sweeps.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <string>

#include <CLI11.hpp>

#include "rloc/flip_risk.hpp"
#include "rloc/harness.hpp"
#include "rloc/io.hpp"
#include "rloc/scenario.hpp"
#include "rloc/sensitivity.hpp"

namespace {

struct GenerateArgs {
  int nodes = 30;
  double radius = 30.0;
  double width = 100.0;
  double height = 100.0;
  int anchors = 3;
  std::string noise = "multiplicative";
  double noise_scale = 0.1;
  double noise_bound = -1.0;
  std::uint64_t seed = 1;

  void add_to(CLI::App& cmd) {
    cmd.add_option("-n,--nodes", nodes, "Number of nodes")->capture_default_str();
    cmd.add_option("-r,--radius", radius, "Ranging radius in meters")->capture_default_str();
    cmd.add_option("--width", width, "Area width in meters")->capture_default_str();
    cmd.add_option("--height", height, "Area height in meters")->capture_default_str();
    cmd.add_option("-a,--anchors", anchors, "Number of anchors")->capture_default_str();
    cmd.add_option("--noise", noise, "none, multiplicative or additive")->capture_default_str();
    cmd.add_option("--noise-scale", noise_scale, "Noise scale")->capture_default_str();
    cmd.add_option("--noise-bound", noise_bound, "Noise bound C (default 2 * scale * radius)");
    cmd.add_option("--seed", seed, "Random seed")->capture_default_str();
  }

  rloc::Scenario build() const {
    rloc::ScenarioParams p;
    p.node_count = nodes;
    p.radius = radius;
    p.area = {width, height};
    p.anchor_count = anchors;
    p.seed = seed;
    switch (rloc::noise_kind_from_string(noise)) {
      case rloc::NoiseKind::kNone:
        p.noise = rloc::NoiseModel::none();
        break;
      case rloc::NoiseKind::kMultiplicativeGaussian:
        p.noise = rloc::NoiseModel::multiplicative(noise_scale, radius);
        if (noise_bound >= 0.0) p.noise.bound = noise_bound;
        break;
      case rloc::NoiseKind::kAdditiveBounded:
        p.noise = rloc::NoiseModel::additive(noise_scale, noise_bound >= 0.0 ? noise_bound : 2.0 * noise_scale);
        break;
    }
    return rloc::generate_scenario(p);
  }
};

// Output stream that is stdout for an empty path or "-".
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (!path.empty() && path != "-") {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw std::runtime_error("cannot open '" + path + "' for writing");
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return in;
}

void analyze(const std::string& path, bool mirrors, bool rsm, double band_width, const std::string& out_path) {
  std::ifstream in = open_input(path);
  const rloc::EmbeddedGraph eg = rloc::read_embedded_graph(in);
  if (!mirrors && !rsm) mirrors = rsm = true;
  Sink sink(out_path);
  std::ostream& out = sink.stream();
  if (mirrors) {
    out << "# mirrors (band half-width " << rloc::format_number(band_width) << ")\n";
    rloc::write_mirror_report(out, rloc::find_mirrors(eg, band_width));
  }
  if (rsm) {
    const auto anchors = eg.graph.anchors();
    const rloc::SensitivityMatrix a = rloc::build_rsm(eg, anchors);
    out << "# rsm\n";
    rloc::write_rsm(out, a, rloc::condition_number(a));
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust range-based network localization"};
  app.require_subcommand(1);

  GenerateArgs gen;
  std::string gen_out;
  CLI::App* generate = app.add_subcommand("generate", "Write a random scenario as JSON");
  gen.add_to(*generate);
  generate->add_option("-o,--out", gen_out, "Output file (default stdout)");

  std::string analyze_in;
  std::string analyze_out;
  bool want_mirrors = false;
  bool want_rsm = false;
  double band_width = 1.0;
  CLI::App* analyze_cmd = app.add_subcommand("analyze", "Mirror report and sensitivity spectrum of a graph file");
  analyze_cmd->add_option("file", analyze_in, "Scenario or embedded graph JSON")->required();
  analyze_cmd->add_flag("--mirrors", want_mirrors, "Report flip-ambiguity mirrors");
  analyze_cmd->add_flag("--rsm", want_rsm, "Report the ranging sensitivity matrix and kappa");
  analyze_cmd->add_option("--band-width", band_width, "Band half-width c in meters")->capture_default_str();
  analyze_cmd->add_option("-o,--out", analyze_out, "Output file (default stdout)");

  GenerateArgs run_gen;
  std::string run_scenario;
  std::string algo = "all";
  double t_kappa = 4.0;
  std::string run_out;
  std::string run_summary;
  CLI::App* run = app.add_subcommand("run", "Localize one scenario");
  run_gen.add_to(*run);
  run->add_option("-s,--scenario", run_scenario, "Scenario JSON (otherwise one is generated)");
  run->add_option("--algo", algo, "rcgr, call, lsq or all")
      ->check(CLI::IsMember({"rcgr", "call", "lsq", "all"}))
      ->capture_default_str();
  run->add_option("--t-kappa", t_kappa, "Condition number threshold (inf disables the gate)")->capture_default_str();
  run->add_option("-o,--out", run_out, "Per-vertex results CSV (default stdout)");
  run->add_option("--summary", run_summary, "Per-algorithm summary CSV");

  std::string spec_path;
  std::string out_dir = ".";
  CLI::App* sweep = app.add_subcommand("sweep", "Run a Monte-Carlo sweep from a JSON spec");
  sweep->add_option("spec", spec_path, "Sweep spec JSON")->required();
  sweep->add_option("--out-dir", out_dir, "Directory for the result tables")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*generate) {
      Sink sink(gen_out);
      rloc::write_scenario(sink.stream(), gen.build());
    } else if (*analyze_cmd) {
      analyze(analyze_in, want_mirrors, want_rsm, band_width, analyze_out);
    } else if (*run) {
      rloc::Scenario scenario;
      if (!run_scenario.empty()) {
        std::ifstream in = open_input(run_scenario);
        scenario = rloc::read_scenario(in);
      } else {
        scenario = run_gen.build();
      }
      rloc::TrialOptions options;
      options.t_kappa = t_kappa;
      if (algo != "all") options.algorithms = {rloc::algorithm_from_string(algo)};
      const rloc::TrialResult trial = rloc::run_trial(scenario, options);
      for (const rloc::AlgorithmResult& r : trial.results) {
        if (r.warning) std::cerr << "warning (" << rloc::to_string(r.algorithm) << "): " << *r.warning << '\n';
      }
      Sink sink(run_out);
      rloc::write_results_header(sink.stream());
      rloc::write_results(sink.stream(), trial);
      if (!run_summary.empty()) {
        Sink summary(run_summary);
        rloc::write_trial_summary(summary.stream(), trial);
      }
    } else if (*sweep) {
      std::ifstream in = open_input(spec_path);
      const rloc::SweepSpec spec = rloc::read_sweep_spec(in);
      const rloc::SweepResult result = rloc::run_sweep(spec);
      const std::filesystem::path dir(out_dir);
      std::filesystem::create_directories(dir);
      for (std::size_t c = 0; c < result.configs.size(); ++c) {
        Sink sink((dir / ("results_" + std::to_string(c) + ".csv")).string());
        rloc::write_results_header(sink.stream());
        for (const rloc::SweepTrial& t : result.trials) {
          if (t.config == c && t.result) rloc::write_results(sink.stream(), *t.result);
        }
      }
      {
        Sink sink((dir / "summary.csv").string());
        rloc::write_sweep_summary(sink.stream(), result);
      }
      {
        Sink sink((dir / "cdf.csv").string());
        rloc::write_sweep_cdf(sink.stream(), result);
      }
      {
        Sink sink((dir / "degree.csv").string());
        rloc::write_degree_table(sink.stream(), result);
      }
      {
        Sink sink((dir / "failures.csv").string());
        rloc::write_sweep_failures(sink.stream(), result);
      }
      std::size_t failed = 0;
      for (const rloc::SweepTrial& t : result.trials) failed += t.failure.has_value();
      std::cerr << result.trials.size() - failed << " trials completed, " << failed << " failed\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

#include "rloc/io.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

namespace rloc {

using nlohmann::json;

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

namespace {

json noise_json(const NoiseModel& noise) {
  return {{"kind", to_string(noise.kind)}, {"scale", noise.scale}, {"bound", noise.bound}};
}

NoiseModel noise_from_json(const json& j) {
  NoiseModel m;
  m.kind = noise_kind_from_string(j.value("kind", "none"));
  m.scale = j.value("scale", 0.0);
  m.bound = j.value("bound", 0.0);
  m.validate();
  return m;
}

RangeGraph graph_from_json(const json& j) {
  const int n = j.at("n").get<int>();
  std::vector<int> anchors = j.value("anchors", std::vector<int>{});
  std::vector<Edge> edges;
  for (const json& e : j.at("edges")) {
    edges.push_back({e.at("i").get<int>(), e.at("j").get<int>(), e.at("measured").get<double>()});
  }
  return RangeGraph(n, std::move(anchors), std::move(edges));
}

json parse(std::istream& in) {
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("malformed JSON: ") + e.what());
  }
}

}  // namespace

void write_scenario(std::ostream& out, const Scenario& s) {
  json j;
  j["n"] = s.node_count();
  j["area"] = {{"width", s.area.width}, {"height", s.area.height}};
  j["radius"] = s.radius;
  j["seed"] = s.seed;
  j["noise"] = noise_json(s.noise);
  j["anchors"] = std::vector<int>(s.graph.anchors().begin(), s.graph.anchors().end());
  json positions = json::array();
  for (const Point2& p : s.true_positions) positions.push_back({p.x, p.y});
  j["positions"] = std::move(positions);
  json edges = json::array();
  for (const Edge& e : s.graph.edges()) edges.push_back({{"i", e.i}, {"j", e.j}, {"measured", e.measured}});
  j["edges"] = std::move(edges);
  out << j.dump(2) << '\n';
}

Scenario read_scenario(std::istream& in) {
  const json j = parse(in);
  try {
    Scenario s;
    s.graph = graph_from_json(j);
    for (const json& p : j.at("positions")) s.true_positions.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
    if (static_cast<int>(s.true_positions.size()) != s.graph.node_count()) {
      throw std::invalid_argument("position count does not match n");
    }
    if (j.contains("area")) s.area = {j["area"].at("width").get<double>(), j["area"].at("height").get<double>()};
    s.radius = j.value("radius", 0.0);
    s.seed = j.value("seed", std::uint64_t{0});
    if (j.contains("noise")) s.noise = noise_from_json(j["noise"]);
    s.connected = s.graph.is_connected();
    return s;
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("malformed scenario: ") + e.what());
  }
}

EmbeddedGraph read_embedded_graph(std::istream& in) {
  const json j = parse(in);
  try {
    EmbeddedGraph eg;
    eg.graph = graph_from_json(j);
    const json& locs = j.contains("locations") ? j.at("locations") : j.at("positions");
    for (const json& p : locs) {
      if (p.is_null()) {
        eg.locations.emplace_back(std::nullopt);
      } else {
        eg.locations.emplace_back(Point2{p.at(0).get<double>(), p.at(1).get<double>()});
      }
    }
    if (static_cast<int>(eg.locations.size()) != eg.graph.node_count()) {
      throw std::invalid_argument("location count does not match n");
    }
    return eg;
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("malformed graph: ") + e.what());
  }
}

void write_mirror_report(std::ostream& out, const MirrorReport& report) {
  json bands = json::array();
  for (std::size_t k = 0; k < report.bands.size(); ++k) {
    const Band& b = report.bands[k];
    const BandCheck& c = report.checks[k];
    bands.push_back({{"index", k},
                     {"u", b.u},
                     {"w", b.w},
                     {"members", c.members},
                     {"plus", c.plus},
                     {"minus", c.minus},
                     {"verdict", to_string(c.verdict)}});
  }
  json j{{"mirror_count", report.mirror_count}, {"mirrors", report.mirror_indices()}, {"bands", std::move(bands)}};
  out << j.dump(2) << '\n';
}

void write_rsm(std::ostream& out, const SensitivityMatrix& a, const SpectrumResult& spectrum) {
  out << "rows " << a.rows() << " cols " << a.cols() << '\n';
  for (Eigen::Index r = 0; r < a.rows(); ++r) {
    for (Eigen::Index c = 0; c < a.cols(); ++c) {
      if (a.values(r, c) != 0.0) out << r << ' ' << c << ' ' << format_number(a.values(r, c)) << '\n';
    }
  }
  out << "singular_values";
  for (double s : spectrum.singular_values) out << ' ' << format_number(s);
  out << "\nrank " << spectrum.rank << "\nkappa " << format_number(spectrum.condition_number) << '\n';
}

SweepSpec read_sweep_spec(std::istream& in) {
  const json j = parse(in);
  try {
    SweepSpec s;
    s.trials = j.value("trials", s.trials);
    s.node_counts = j.value("node_counts", s.node_counts);
    s.radii = j.value("radii", s.radii);
    s.target_degrees = j.value("target_degrees", s.target_degrees);
    s.noise_scale = j.value("noise_scale", s.noise_scale);
    s.t_kappa = j.value("t_kappa", s.t_kappa);
    s.seed_base = j.value("seed_base", s.seed_base);
    if (j.contains("area")) s.area = {j["area"].at("width").get<double>(), j["area"].at("height").get<double>()};
    s.anchor_count = j.value("anchor_count", s.anchor_count);
    s.workers = j.value("workers", s.workers);
    s.validate();
    return s;
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("malformed sweep spec: ") + e.what());
  }
}

void write_results_header(std::ostream& out) {
  out << "trial,algo,vertex,true_x,true_y,est_x,est_y,error,component_id\n";
}

void write_results(std::ostream& out, const TrialResult& trial) {
  for (const AlgorithmResult& r : trial.results) {
    for (std::size_t v = 0; v < trial.truth.size(); ++v) {
      const double nan = std::numeric_limits<double>::quiet_NaN();
      const Point2 est = r.estimates[v].value_or(Point2{nan, nan});
      const double err = r.estimates[v] ? distance(*r.estimates[v], trial.truth[v]) : nan;
      out << trial.trial << ',' << to_string(r.algorithm) << ',' << v << ',' << format_number(trial.truth[v].x) << ','
          << format_number(trial.truth[v].y) << ',' << format_number(est.x) << ',' << format_number(est.y) << ','
          << format_number(err) << ',' << r.component_id[v] << '\n';
    }
  }
}

void write_trial_summary(std::ostream& out, const TrialResult& trial) {
  out << "algo,mean,median,p90,max,localized_fraction,component_count\n";
  for (const AlgorithmResult& r : trial.results) {
    const ErrorSummary& s = r.summary;
    out << to_string(r.algorithm) << ',' << format_number(s.mean) << ',' << format_number(s.median) << ','
        << format_number(s.p90) << ',' << format_number(s.max) << ',' << format_number(s.localized_fraction) << ','
        << r.component_count << '\n';
  }
}

namespace {

std::string config_label(const SweepConfig& c) {
  return std::to_string(c.node_count) + ',' + (c.radius ? format_number(*c.radius) : "") + ',' +
         (c.target_degree ? format_number(*c.target_degree) : "");
}

}  // namespace

void write_sweep_summary(std::ostream& out, const SweepResult& sweep) {
  out << "config,node_count,radius,target_degree,algo,trials,mean,median,p90,localized_fraction,trial_mean\n";
  for (const SweepRow& r : sweep.summary) {
    out << r.config << ',' << config_label(sweep.configs[r.config]) << ',' << to_string(r.algorithm) << ','
        << r.trials << ',' << format_number(r.mean) << ',' << format_number(r.median) << ',' << format_number(r.p90)
        << ',' << format_number(r.localized_fraction) << ',' << format_number(r.trial_mean) << '\n';
  }
}

void write_sweep_cdf(std::ostream& out, const SweepResult& sweep) {
  out << "config,algo,error_level,fraction\n";
  for (const SweepRow& r : sweep.summary) {
    for (const auto& [level, fraction] : r.cdf) {
      out << r.config << ',' << to_string(r.algorithm) << ',' << format_number(level) << ','
          << format_number(fraction) << '\n';
    }
  }
}

void write_degree_table(std::ostream& out, const SweepResult& sweep) {
  out << "config,node_count,target_degree,mean_degree,algo,mean_error\n";
  for (const SweepRow& r : sweep.summary) {
    const SweepConfig& c = sweep.configs[r.config];
    out << r.config << ',' << c.node_count << ',' << (c.target_degree ? format_number(*c.target_degree) : "") << ','
        << format_number(r.mean_degree) << ',' << to_string(r.algorithm) << ',' << format_number(r.trial_mean)
        << '\n';
  }
}

void write_sweep_failures(std::ostream& out, const SweepResult& sweep) {
  out << "config,trial,message\n";
  for (const SweepTrial& t : sweep.trials) {
    if (t.failure) out << t.config << ',' << t.trial << ",\"" << *t.failure << "\"\n";
  }
}

}  // namespace rloc

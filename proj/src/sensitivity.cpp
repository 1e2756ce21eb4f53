#include "rloc/sensitivity.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace rloc {

SensitivityMatrix build_rsm(const RangeGraph& graph, const LocationMap& locations, std::span<const int> vertices,
                            std::span<const int> pinned) {
  const int n = graph.node_count();
  std::vector<char> selected(n, 0);
  std::vector<char> fixed(n, 0);
  for (int v : vertices) selected.at(v) = 1;
  for (int v : pinned) fixed.at(v) = 1;

  SensitivityMatrix a;
  std::vector<int> column(n, -1);
  std::vector<int> ordered(vertices.begin(), vertices.end());
  std::sort(ordered.begin(), ordered.end());
  for (int v : ordered) {
    if (!locations.at(v)) throw std::invalid_argument("vertex " + std::to_string(v) + " has no location");
    if (!fixed[v]) {
      column[v] = static_cast<int>(a.column_vertices.size());
      a.column_vertices.push_back(v);
    }
  }

  struct Entry {
    int row;
    int col;
    double value;
  };
  std::vector<Entry> entries;
  for (const Edge& e : graph.edges()) {
    if (!selected[e.i] || !selected[e.j]) continue;
    if (fixed[e.i] && fixed[e.j]) continue;
    const Point2 diff = *locations[e.i] - *locations[e.j];
    const double len = norm(diff);
    if (!(len > 0.0)) {
      throw std::invalid_argument("zero-length edge " + std::to_string(e.i) + "-" + std::to_string(e.j));
    }
    const int row = static_cast<int>(a.row_edges.size());
    a.row_edges.emplace_back(e.i, e.j);
    if (column[e.i] >= 0) {
      entries.push_back({row, 2 * column[e.i], diff.x / len});
      entries.push_back({row, 2 * column[e.i] + 1, diff.y / len});
    }
    if (column[e.j] >= 0) {
      entries.push_back({row, 2 * column[e.j], -diff.x / len});
      entries.push_back({row, 2 * column[e.j] + 1, -diff.y / len});
    }
  }
  a.values = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(a.row_edges.size()),
                                   2 * static_cast<Eigen::Index>(a.column_vertices.size()));
  for (const Entry& en : entries) a.values(en.row, en.col) = en.value;
  return a;
}

SensitivityMatrix build_rsm(const EmbeddedGraph& embedded, std::span<const int> pinned) {
  std::vector<int> all(embedded.graph.node_count());
  for (int v = 0; v < embedded.graph.node_count(); ++v) all[v] = v;
  LocationMap locations = embedded.locations;
  locations.resize(embedded.graph.node_count());
  return build_rsm(embedded.graph, locations, all, pinned);
}

SpectrumResult condition_number(const SensitivityMatrix& a) {
  if (a.rows() == 0 || a.cols() < 2) throw std::invalid_argument("no perturbable edges");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a.values);
  const Eigen::VectorXd& s = svd.singularValues();

  SpectrumResult out;
  out.singular_values.assign(s.data(), s.data() + s.size());
  out.singular_values.resize(static_cast<std::size_t>(a.cols()), 0.0);
  const double sigma_max = out.singular_values.front();
  const double tol = sigma_max * static_cast<double>(std::max(a.rows(), a.cols())) *
                     std::numeric_limits<double>::epsilon();
  out.rank = static_cast<int>(std::count_if(out.singular_values.begin(), out.singular_values.end(),
                                            [&](double v) { return v > tol; }));
  out.full_rank = out.rank == static_cast<int>(a.cols());
  out.condition_number =
      out.full_rank ? sigma_max / out.singular_values.back() : std::numeric_limits<double>::infinity();
  return out;
}

bool rank_check(const SensitivityMatrix& a, int n, int m) {
  if (m < 2) throw std::invalid_argument("anchor frame undefined");
  if (a.cols() != 2 * static_cast<Eigen::Index>(n - m)) {
    throw std::invalid_argument("matrix column count does not match 2(n - m)");
  }
  if (a.rows() == 0) return a.cols() == 0;
  return condition_number(a).rank == 2 * (n - m);
}

Eigen::VectorXd predict_perturbation(const SensitivityMatrix& a, const Eigen::VectorXd& delta_d) {
  if (delta_d.size() != a.rows()) throw std::invalid_argument("length change vector does not match matrix rows");
  SpectrumResult spectrum = condition_number(a);
  if (!spectrum.full_rank) throw RankDeficientError(std::move(spectrum));
  return a.values.completeOrthogonalDecomposition().solve(delta_d);
}

double node_kappa(const RangeGraph& graph, const LocationMap& realized, std::span<const int> realized_vertices,
                  std::span<const int> pinned, int candidate, Point2 candidate_location) {
  LocationMap locations = realized;
  locations.at(candidate) = candidate_location;
  std::vector<int> vertices(realized_vertices.begin(), realized_vertices.end());
  vertices.push_back(candidate);
  const SensitivityMatrix a = build_rsm(graph, locations, vertices, pinned);
  if (a.rows() == 0 || a.cols() < 2) return std::numeric_limits<double>::infinity();
  return condition_number(a).condition_number;
}

}  // namespace rloc

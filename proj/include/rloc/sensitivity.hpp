#pragma once

#include <limits>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "rloc/geometry.hpp"
#include "rloc/graph.hpp"

namespace rloc {

/// Ranging sensitivity matrix: maps ordinary-vertex displacements (x, y per
/// vertex) to first-order edge length changes.
///
/// Row k belongs to `row_edges[k]`; columns 2c and 2c + 1 belong to the x and y
/// displacement of `column_vertices[c]`. Edges between two pinned vertices
/// produce no row, pinned vertices produce no columns.
struct SensitivityMatrix {
  Eigen::MatrixXd values;
  std::vector<std::pair<int, int>> row_edges;
  std::vector<int> column_vertices;

  Eigen::Index rows() const { return values.rows(); }
  Eigen::Index cols() const { return values.cols(); }
};

struct SpectrumResult {
  std::vector<double> singular_values;  // descending, one per column
  double condition_number = std::numeric_limits<double>::infinity();
  bool full_rank = false;
  int rank = 0;
};

/// Builds the RSM over all vertices of `embedded`, treating `pinned` as the
/// anchor frame. Entry denominators use the embedded inter-point distance.
/// Throws when a vertex has no location or an edge has zero embedded length.
SensitivityMatrix build_rsm(const EmbeddedGraph& embedded, std::span<const int> pinned);

/// Same construction restricted to the subgraph induced by `vertices`.
SensitivityMatrix build_rsm(const RangeGraph& graph, const LocationMap& locations, std::span<const int> vertices,
                            std::span<const int> pinned);

/// Singular spectrum and kappa = sigma_1 / sigma_last. Rank tolerance is
/// sigma_max * max(rows, cols) * machine epsilon; a deficient rank gives an
/// infinite kappa. Throws std::invalid_argument("no perturbable edges") for an
/// empty matrix.
SpectrumResult condition_number(const SensitivityMatrix& a);

/// True iff the numerical rank equals 2 (n - m). Requires m >= 2.
bool rank_check(const SensitivityMatrix& a, int n, int m);

class RankDeficientError : public std::runtime_error {
 public:
  explicit RankDeficientError(SpectrumResult spectrum)
      : std::runtime_error("sensitivity matrix is rank deficient"), spectrum_(std::move(spectrum)) {}
  const SpectrumResult& spectrum() const { return spectrum_; }

 private:
  SpectrumResult spectrum_;
};

/// Minimum-norm least-squares displacement for the edge length changes
/// `delta_d` (ordered like the rows). The result is ordered like the columns.
Eigen::VectorXd predict_perturbation(const SensitivityMatrix& a, const Eigen::VectorXd& delta_d);

/// kappa of the RSM on (realized + {candidate}) with `pinned` as anchors and
/// `candidate` placed at `candidate_location`. Returns +inf when the matrix is
/// empty or rank deficient.
double node_kappa(const RangeGraph& graph, const LocationMap& realized, std::span<const int> realized_vertices,
                  std::span<const int> pinned, int candidate, Point2 candidate_location);

}  // namespace rloc

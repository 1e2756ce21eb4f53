#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rloc/geometry.hpp"

namespace rloc {

/// Undirected range measurement between vertices i < j.
struct Edge {
  int i = 0;
  int j = 0;
  double measured = 0.0;
};

/// Neighbor entry in an adjacency list: the other endpoint and the edge index.
struct Incidence {
  int vertex = 0;
  std::size_t edge = 0;
};

/// Range graph G = (V, E) with anchor flags and measured edge lengths.
///
/// Vertices are 0-based. Edges are stored with i < j, sorted by (i, j), and
/// each adjacency list is sorted by neighbor id. The graph is immutable after
/// construction; the constructor rejects self-loops, duplicate edges,
/// non-positive lengths and out-of-range anchor ids with std::invalid_argument.
class RangeGraph {
 public:
  RangeGraph() = default;
  RangeGraph(int node_count, std::vector<int> anchors, std::vector<Edge> edges);

  int node_count() const { return node_count_; }
  std::span<const int> anchors() const { return anchors_; }
  bool is_anchor(int v) const { return anchor_flag_.at(v); }
  std::span<const Edge> edges() const { return edges_; }
  std::span<const Incidence> neighbors(int v) const { return adjacency_.at(v); }
  int degree(int v) const { return static_cast<int>(adjacency_.at(v).size()); }

  std::optional<std::size_t> edge_index(int a, int b) const;
  bool has_edge(int a, int b) const { return edge_index(a, b).has_value(); }
  std::optional<double> measured(int a, int b) const;

  double mean_degree() const;

  /// Connected parts as sorted vertex lists, ordered by smallest member.
  std::vector<std::vector<int>> connected_parts() const;
  bool is_connected() const { return connected_parts().size() <= 1; }

 private:
  int node_count_ = 0;
  std::vector<int> anchors_;
  std::vector<bool> anchor_flag_;
  std::vector<Edge> edges_;
  std::vector<std::vector<Incidence>> adjacency_;
};

/// Induced subgraph with renumbered vertices; `to_parent[k]` is the original id of k.
struct Subgraph {
  RangeGraph graph;
  std::vector<int> to_parent;
};

/// Anchors of the parent that fall inside `vertices` stay anchors in the subgraph.
Subgraph induced_subgraph(const RangeGraph& graph, std::span<const int> vertices);

/// A range graph together with a (possibly partial) location for each vertex.
struct EmbeddedGraph {
  RangeGraph graph;
  LocationMap locations;

  bool located(int v) const { return v < static_cast<int>(locations.size()) && locations[v].has_value(); }
  Point2 at(int v) const;
};

enum class NoiseKind { kNone, kMultiplicativeGaussian, kAdditiveBounded };

/// Ranging noise model. `bound` is the noise bound C used by annulus checks.
struct NoiseModel {
  NoiseKind kind = NoiseKind::kNone;
  double scale = 0.0;
  double bound = 0.0;

  static NoiseModel none() { return {}; }
  /// Multiplicative Gaussian noise; C defaults to 2 * scale * radius.
  static NoiseModel multiplicative(double scale, double radius);
  static NoiseModel additive(double scale, double bound);

  void validate() const;
};

std::string to_string(NoiseKind kind);
NoiseKind noise_kind_from_string(const std::string& name);

/// Applies the noise model to a true distance using a caller-supplied variate.
double apply_noise(double true_distance, const NoiseModel& noise, double draw);

/// True iff `candidate` lies in every annulus [d - C, d + C] around the located
/// neighbors of `vertex`. Throws std::invalid_argument("unconstrained vertex")
/// when no neighbor is located.
bool ambiguous_region_check(Point2 candidate, int vertex, const EmbeddedGraph& embedded, double bound);

}  // namespace rloc

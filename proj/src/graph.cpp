#include "rloc/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace rloc {

RangeGraph::RangeGraph(int node_count, std::vector<int> anchors, std::vector<Edge> edges)
    : node_count_(node_count), anchors_(std::move(anchors)), edges_(std::move(edges)) {
  if (node_count_ < 0) throw std::invalid_argument("negative node count");
  anchor_flag_.assign(node_count_, false);
  std::sort(anchors_.begin(), anchors_.end());
  for (std::size_t k = 0; k < anchors_.size(); ++k) {
    const int a = anchors_[k];
    if (a < 0 || a >= node_count_) throw std::invalid_argument("anchor id out of range");
    if (k > 0 && anchors_[k - 1] == a) throw std::invalid_argument("duplicate anchor id");
    anchor_flag_[a] = true;
  }

  for (Edge& e : edges_) {
    if (e.i == e.j) throw std::invalid_argument("self-loop edge");
    if (e.i < 0 || e.j < 0 || e.i >= node_count_ || e.j >= node_count_) {
      throw std::invalid_argument("edge endpoint out of range");
    }
    if (!(e.measured > 0.0) || !std::isfinite(e.measured)) {
      throw std::invalid_argument("edge measurement must be positive and finite");
    }
    if (e.i > e.j) std::swap(e.i, e.j);
  }
  std::sort(edges_.begin(), edges_.end(), [](const Edge& a, const Edge& b) {
    return a.i != b.i ? a.i < b.i : a.j < b.j;
  });
  for (std::size_t k = 1; k < edges_.size(); ++k) {
    if (edges_[k].i == edges_[k - 1].i && edges_[k].j == edges_[k - 1].j) {
      throw std::invalid_argument("duplicate edge");
    }
  }

  adjacency_.assign(node_count_, {});
  for (std::size_t k = 0; k < edges_.size(); ++k) {
    adjacency_[edges_[k].i].push_back({edges_[k].j, k});
    adjacency_[edges_[k].j].push_back({edges_[k].i, k});
  }
  for (auto& list : adjacency_) {
    std::sort(list.begin(), list.end(), [](const Incidence& a, const Incidence& b) { return a.vertex < b.vertex; });
  }
}

std::optional<std::size_t> RangeGraph::edge_index(int a, int b) const {
  if (a < 0 || b < 0 || a >= node_count_ || b >= node_count_) return std::nullopt;
  const auto& list = adjacency_[a];
  auto it = std::lower_bound(list.begin(), list.end(), b,
                             [](const Incidence& inc, int v) { return inc.vertex < v; });
  if (it == list.end() || it->vertex != b) return std::nullopt;
  return it->edge;
}

std::optional<double> RangeGraph::measured(int a, int b) const {
  if (auto k = edge_index(a, b)) return edges_[*k].measured;
  return std::nullopt;
}

double RangeGraph::mean_degree() const {
  if (node_count_ == 0) return 0.0;
  return 2.0 * static_cast<double>(edges_.size()) / node_count_;
}

std::vector<std::vector<int>> RangeGraph::connected_parts() const {
  std::vector<int> label(node_count_, -1);
  std::vector<std::vector<int>> parts;
  for (int s = 0; s < node_count_; ++s) {
    if (label[s] >= 0) continue;
    const int id = static_cast<int>(parts.size());
    parts.emplace_back();
    std::vector<int> stack{s};
    label[s] = id;
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      parts[id].push_back(v);
      for (const Incidence& inc : adjacency_[v]) {
        if (label[inc.vertex] < 0) {
          label[inc.vertex] = id;
          stack.push_back(inc.vertex);
        }
      }
    }
    std::sort(parts[id].begin(), parts[id].end());
  }
  return parts;
}

Subgraph induced_subgraph(const RangeGraph& graph, std::span<const int> vertices) {
  Subgraph sub;
  sub.to_parent.assign(vertices.begin(), vertices.end());
  std::vector<int> local(graph.node_count(), -1);
  for (std::size_t k = 0; k < sub.to_parent.size(); ++k) {
    const int v = sub.to_parent[k];
    if (local.at(v) >= 0) throw std::invalid_argument("duplicate vertex in subgraph selection");
    local[v] = static_cast<int>(k);
  }
  std::vector<int> anchors;
  std::vector<Edge> edges;
  for (std::size_t k = 0; k < sub.to_parent.size(); ++k) {
    const int v = sub.to_parent[k];
    if (graph.is_anchor(v)) anchors.push_back(static_cast<int>(k));
    for (const Incidence& inc : graph.neighbors(v)) {
      const int w = local[inc.vertex];
      if (w > static_cast<int>(k)) {
        edges.push_back({static_cast<int>(k), w, graph.edges()[inc.edge].measured});
      }
    }
  }
  sub.graph = RangeGraph(static_cast<int>(sub.to_parent.size()), std::move(anchors), std::move(edges));
  return sub;
}

Point2 EmbeddedGraph::at(int v) const {
  if (!located(v)) throw std::invalid_argument("vertex " + std::to_string(v) + " has no location");
  return *locations[v];
}

NoiseModel NoiseModel::multiplicative(double scale, double radius) {
  return {NoiseKind::kMultiplicativeGaussian, scale, 2.0 * scale * radius};
}

NoiseModel NoiseModel::additive(double scale, double bound) {
  return {NoiseKind::kAdditiveBounded, scale, bound};
}

void NoiseModel::validate() const {
  if (!(scale >= 0.0) || !(bound >= 0.0)) throw std::invalid_argument("noise scale and bound must be >= 0");
  if (kind == NoiseKind::kNone && scale != 0.0) throw std::invalid_argument("noise kind none requires scale 0");
}

std::string to_string(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::kNone:
      return "none";
    case NoiseKind::kMultiplicativeGaussian:
      return "multiplicative-gaussian";
    case NoiseKind::kAdditiveBounded:
      return "additive-bounded";
  }
  return "none";
}

NoiseKind noise_kind_from_string(const std::string& name) {
  if (name == "none") return NoiseKind::kNone;
  if (name == "multiplicative-gaussian" || name == "multiplicative") return NoiseKind::kMultiplicativeGaussian;
  if (name == "additive-bounded" || name == "additive") return NoiseKind::kAdditiveBounded;
  throw std::invalid_argument("unknown noise kind: " + name);
}

double apply_noise(double true_distance, const NoiseModel& noise, double draw) {
  double d = true_distance;
  switch (noise.kind) {
    case NoiseKind::kNone:
      break;
    case NoiseKind::kMultiplicativeGaussian:
      d = true_distance * (1.0 + noise.scale * draw);
      break;
    case NoiseKind::kAdditiveBounded:
      d = std::clamp(true_distance + noise.scale * draw, true_distance - noise.bound, true_distance + noise.bound);
      break;
  }
  // Measurements stay strictly positive.
  const double floor = 1e-9 * true_distance;
  return std::max(d, floor > 0.0 ? floor : 1e-12);
}

bool ambiguous_region_check(Point2 candidate, int vertex, const EmbeddedGraph& embedded, double bound) {
  int constrained = 0;
  bool inside = true;
  for (const Incidence& inc : embedded.graph.neighbors(vertex)) {
    if (!embedded.located(inc.vertex)) continue;
    ++constrained;
    const double d = embedded.graph.edges()[inc.edge].measured;
    const double r = distance(candidate, *embedded.locations[inc.vertex]);
    // Relative slack absorbs round-off so that C = 0 accepts exact embeddings.
    if (std::abs(r - d) > bound + 1e-12 * d) inside = false;
  }
  if (constrained == 0) throw std::invalid_argument("unconstrained vertex");
  return inside;
}

}  // namespace rloc

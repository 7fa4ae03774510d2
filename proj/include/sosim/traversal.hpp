#pragma once

// Edge and path weights under obstacle uncertainty, deterministic Dijkstra,
// and the Reset Disambiguation (RD) walk.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <queue>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sosim/geometry.hpp"
#include "sosim/pointproc.hpp"
#include "sosim/sensor.hpp"

namespace sosim {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// No path to the target exists under current knowledge.
class InfeasibleScene : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Immutable traversal problem: graph, obstacles, endpoints, and the
/// edge-to-obstacle incidence index.
class Scene {
 public:
  Scene(std::shared_ptr<const GeometricGraph> graph, std::vector<Obstacle> obstacles, int source,
        int target, Window window = {}, Window insertion_window = {}, std::uint64_t seed = 0)
      : graph_(std::move(graph)),
        obstacles_(std::move(obstacles)),
        source_(source),
        target_(target),
        window_(window),
        insertion_window_(insertion_window),
        seed_(seed) {
    if (!graph_) throw std::invalid_argument("scene requires a graph");
    if (!graph_->contains_vertex(source_) || !graph_->contains_vertex(target_)) {
      throw std::invalid_argument("source and target must be graph vertices");
    }
    if (source_ == target_) throw std::invalid_argument("source and target must differ");
    std::vector<Disk> disks;
    disks.reserve(obstacles_.size());
    for (const Obstacle& o : obstacles_) {
      if (!(o.disk.radius > 0.0)) throw std::invalid_argument("obstacle radius must be positive");
      if (!(o.cost > 0.0)) throw std::invalid_argument("disambiguation cost must be positive");
      if (!(o.mark >= kMarkEpsilon && o.mark <= 1.0 - kMarkEpsilon)) {
        throw std::invalid_argument("obstacle mark outside [eps, 1 - eps]");
      }
      for (int v : {source_, target_}) {
        if (squared_distance(graph_->position(v), o.disk.center) <= o.disk.radius * o.disk.radius) {
          throw std::invalid_argument("source/target inside obstacle " + std::to_string(o.id));
        }
      }
      disks.push_back(o.disk);
    }
    edge_obstacles_ = index_edge_disks(*graph_, disks);
  }

  const GeometricGraph& graph() const noexcept { return *graph_; }
  std::shared_ptr<const GeometricGraph> graph_ptr() const noexcept { return graph_; }
  const std::vector<Obstacle>& obstacles() const noexcept { return obstacles_; }
  int source() const noexcept { return source_; }
  int target() const noexcept { return target_; }
  const Window& window() const noexcept { return window_; }
  const Window& insertion_window() const noexcept { return insertion_window_; }
  std::uint64_t seed() const noexcept { return seed_; }

  /// Obstacle indices (positions in obstacles()) intersecting edge `e`.
  std::span<const int> edge_obstacles(int e) const {
    return edge_obstacles_.at(static_cast<std::size_t>(e));
  }
  const std::vector<std::vector<int>>& incidence() const noexcept { return edge_obstacles_; }

 private:
  std::shared_ptr<const GeometricGraph> graph_;
  std::vector<Obstacle> obstacles_;
  int source_;
  int target_;
  Window window_;
  Window insertion_window_;
  std::uint64_t seed_;
  std::vector<std::vector<int>> edge_obstacles_;
};

/// w(e) = l(e) + 1/2 * sum over ambiguous x touching e of c(x) / (1 - p(x));
/// +inf if any known-true obstacle touches e. Known-false obstacles add 0.
inline double edge_weight(const Edge& e, std::span<const int> incident,
                          std::span<const Obstacle> obstacles) {
  double risk = 0.0;
  for (int k : incident) {
    const Obstacle& o = obstacles[static_cast<std::size_t>(k)];
    switch (o.knowledge) {
      case Knowledge::KnownTrue:
        return kInfinity;
      case Knowledge::KnownFalse:
        break;
      case Knowledge::Ambiguous:
        risk += o.cost / (1.0 - o.mark);
        break;
    }
  }
  return e.length + 0.5 * risk;
}

/// Weights of every edge in the scene under the given knowledge state.
inline std::vector<double> edge_weights(const Scene& scene, std::span<const Obstacle> obstacles) {
  const auto& edges = scene.graph().edges();
  std::vector<double> w(edges.size());
  for (std::size_t e = 0; e < edges.size(); ++e) {
    w[e] = edge_weight(edges[e], scene.edge_obstacles(static_cast<int>(e)), obstacles);
  }
  return w;
}

/// Sum of edge weights along a vertex sequence, using the scene's obstacle
/// knowledge. Throws if consecutive vertices are not adjacent.
inline double path_weight(const Scene& scene, std::span<const int> path) {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    const auto e = scene.graph().find_edge(path[i], path[i + 1]);
    if (!e) {
      throw std::invalid_argument("path vertices " + std::to_string(path[i]) + " and " +
                                  std::to_string(path[i + 1]) + " are not adjacent");
    }
    total += edge_weight(scene.graph().edge(*e), scene.edge_obstacles(*e), scene.obstacles());
  }
  return total;
}

struct ShortestPathTree {
  int source = 0;
  std::vector<double> dist;
  std::vector<int> pred;       // -1 for the source and unreached vertices
  std::vector<int> pred_edge;  // edge id used to reach each vertex

  bool reached(int v) const { return dist.at(static_cast<std::size_t>(v)) < kInfinity; }

  /// Vertex sequence source..v, empty if v is unreachable.
  std::vector<int> path_to(int v) const {
    if (!reached(v)) return {};
    std::vector<int> path;
    for (int x = v; x != -1; x = pred[static_cast<std::size_t>(x)]) path.push_back(x);
    std::reverse(path.begin(), path.end());
    return path;
  }
};

/// Single-source Dijkstra. `weight(edge_id)` must be >= 0; +inf marks a
/// blocked edge. Among equal-distance predecessors the smallest vertex id
/// wins, so the tree is deterministic.
template <class WeightFn>
ShortestPathTree shortest_path(const GeometricGraph& graph, WeightFn&& weight, int src) {
  if (!graph.contains_vertex(src)) throw std::invalid_argument("source vertex out of range");
  const std::size_t n = graph.vertex_count();
  ShortestPathTree tree;
  tree.source = src;
  tree.dist.assign(n, kInfinity);
  tree.pred.assign(n, -1);
  tree.pred_edge.assign(n, -1);
  std::vector<char> done(n, 0);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  tree.dist[static_cast<std::size_t>(src)] = 0.0;
  heap.emplace(0.0, src);
  while (!heap.empty()) {
    const auto [du, u] = heap.top();
    heap.pop();
    const auto ui = static_cast<std::size_t>(u);
    if (done[ui]) continue;
    done[ui] = 1;
    for (const Arc& arc : graph.neighbors(u)) {
      const double w = weight(arc.edge);
      if (w < 0.0) throw std::invalid_argument("negative edge weight");
      if (!(w < kInfinity)) continue;
      const auto vi = static_cast<std::size_t>(arc.to);
      if (done[vi]) continue;
      const double nd = du + w;
      if (nd < tree.dist[vi]) {
        tree.dist[vi] = nd;
        tree.pred[vi] = u;
        tree.pred_edge[vi] = arc.edge;
        heap.emplace(nd, arc.to);
      } else if (nd == tree.dist[vi] && u < tree.pred[vi]) {
        tree.pred[vi] = u;
        tree.pred_edge[vi] = arc.edge;
      }
    }
  }
  return tree;
}

inline ShortestPathTree shortest_path(const GeometricGraph& graph, std::span<const double> weights,
                                      int src) {
  if (weights.size() != graph.edge_count()) {
    throw std::invalid_argument("weight vector size does not match edge count");
  }
  return shortest_path(graph, [&](int e) { return weights[static_cast<std::size_t>(e)]; }, src);
}

struct DisambiguationEvent {
  int at_vertex = 0;
  int walk_position = 0;  // index into TraversalResult::walk of at_vertex
  int obstacle = 0;       // obstacle id
  int obstacle_index = 0; // position in Scene::obstacles()
  Status revealed = Status::FalseObstacle;
  double cost_paid = 0.0;
  int event_index = 0;
};

struct TraversalResult {
  std::vector<int> walk;
  double distance = 0.0;
  double disambiguation_cost = 0.0;
  double total_cost = 0.0;
  std::vector<DisambiguationEvent> events;

  int n_dis() const noexcept { return static_cast<int>(events.size()); }
};

/// Reset Disambiguation. From the current vertex, follow the minimum-weight
/// path to the target. Before stepping onto an edge touched by an ambiguous
/// disk, stop, disambiguate the disk whose boundary the edge meets first
/// (ties by obstacle id), pay its cost, and re-plan from where the agent
/// stands. Ends at the target.
inline TraversalResult rd_traverse(const Scene& scene) {
  const GeometricGraph& g = scene.graph();
  std::vector<Obstacle> obstacles = scene.obstacles();
  for (Obstacle& o : obstacles) o.knowledge = Knowledge::Ambiguous;

  TraversalResult out;
  int current = scene.source();
  out.walk.push_back(current);
  std::vector<double> weights(g.edge_count());

  while (current != scene.target()) {
    for (std::size_t e = 0; e < g.edge_count(); ++e) {
      weights[e] = edge_weight(g.edges()[e], scene.edge_obstacles(static_cast<int>(e)), obstacles);
    }
    const ShortestPathTree tree = shortest_path(g, std::span<const double>(weights), current);
    if (!tree.reached(scene.target())) {
      throw InfeasibleScene("target " + std::to_string(scene.target()) +
                            " unreachable from vertex " + std::to_string(current));
    }
    const std::vector<int> plan = tree.path_to(scene.target());
    for (std::size_t step = 1; step < plan.size(); ++step) {
      const int next = plan[step];
      const int edge = tree.pred_edge[static_cast<std::size_t>(next)];
      const Point2 from = g.position(current);
      const Point2 to = g.position(next);

      std::optional<int> pick;
      double pick_t = kInfinity;
      for (int k : scene.edge_obstacles(edge)) {
        const Obstacle& o = obstacles[static_cast<std::size_t>(k)];
        if (o.knowledge != Knowledge::Ambiguous) continue;
        const double t = entry_parameter(from, to, o.disk).value_or(kInfinity);
        if (!pick || t < pick_t ||
            (t == pick_t && o.id < obstacles[static_cast<std::size_t>(*pick)].id)) {
          pick = k;
          pick_t = t;
        }
      }
      if (pick) {
        Obstacle& o = obstacles[static_cast<std::size_t>(*pick)];
        o.knowledge = o.status == Status::TrueObstacle ? Knowledge::KnownTrue : Knowledge::KnownFalse;
        out.events.push_back(DisambiguationEvent{current,
                                                 static_cast<int>(out.walk.size()) - 1,
                                                 o.id,
                                                 *pick,
                                                 o.status,
                                                 o.cost,
                                                 static_cast<int>(out.events.size())});
        out.disambiguation_cost += o.cost;
        break;
      }
      out.walk.push_back(next);
      out.distance += g.edge(edge).length;
      current = next;
    }
  }
  out.total_cost = out.distance + out.disambiguation_cost;
  return out;
}

}  // namespace sosim

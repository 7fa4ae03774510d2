#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace sosim {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

inline double distance(Point2 a, Point2 b) noexcept {
  return std::hypot(a.x - b.x, a.y - b.y);
}

inline double squared_distance(Point2 a, Point2 b) noexcept {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

struct Disk {
  Point2 center;
  double radius = 0.0;
};

/// Undirected edge between two vertex ids with its base length.
struct Edge {
  int u = 0;
  int v = 0;
  double length = 0.0;
};

/// An entry in a vertex's adjacency list.
struct Arc {
  int to = 0;
  int edge = 0;
};

/// Planar undirected graph. Vertices carry coordinates; edges carry base
/// lengths. Immutable once built.
class GeometricGraph {
 public:
  GeometricGraph() = default;

  GeometricGraph(std::vector<Point2> vertices, std::vector<Edge> edges)
      : vertices_(std::move(vertices)), edges_(std::move(edges)) {
    const int n = static_cast<int>(vertices_.size());
    for (const Point2& p : vertices_) {
      if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
        throw std::invalid_argument("vertex coordinates must be finite");
      }
    }
    std::vector<std::size_t> degree(vertices_.size(), 0);
    for (const Edge& e : edges_) {
      if (e.u < 0 || e.u >= n || e.v < 0 || e.v >= n) {
        throw std::invalid_argument("edge endpoint out of range");
      }
      if (e.u == e.v) throw std::invalid_argument("self-loop edge");
      if (!(e.length > 0.0) || !std::isfinite(e.length)) {
        throw std::invalid_argument("edge length must be positive and finite");
      }
      ++degree[e.u];
      ++degree[e.v];
    }
    offsets_.assign(vertices_.size() + 1, 0);
    for (std::size_t i = 0; i < vertices_.size(); ++i) {
      offsets_[i + 1] = offsets_[i] + degree[i];
    }
    arcs_.resize(offsets_.back());
    std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
    for (int id = 0; id < static_cast<int>(edges_.size()); ++id) {
      const Edge& e = edges_[id];
      arcs_[fill[e.u]++] = Arc{e.v, id};
      arcs_[fill[e.v]++] = Arc{e.u, id};
    }
    for (std::size_t i = 0; i < vertices_.size(); ++i) {
      auto first = arcs_.begin() + static_cast<std::ptrdiff_t>(offsets_[i]);
      auto last = arcs_.begin() + static_cast<std::ptrdiff_t>(offsets_[i + 1]);
      std::sort(first, last, [](const Arc& a, const Arc& b) { return a.to < b.to; });
      if (std::adjacent_find(first, last, [](const Arc& a, const Arc& b) {
            return a.to == b.to;
          }) != last) {
        throw std::invalid_argument("duplicate edge at vertex " + std::to_string(i));
      }
    }
  }

  std::size_t vertex_count() const noexcept { return vertices_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }

  const std::vector<Point2>& vertices() const noexcept { return vertices_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }

  Point2 position(int v) const { return vertices_.at(static_cast<std::size_t>(v)); }
  const Edge& edge(int id) const { return edges_.at(static_cast<std::size_t>(id)); }

  /// Arcs leaving `v`, sorted by neighbor id.
  std::span<const Arc> neighbors(int v) const {
    const auto i = static_cast<std::size_t>(v);
    return {arcs_.data() + offsets_.at(i), offsets_.at(i + 1) - offsets_.at(i)};
  }

  std::size_t degree(int v) const { return neighbors(v).size(); }

  std::optional<int> find_edge(int u, int v) const {
    if (u < 0 || v < 0 || u >= static_cast<int>(vertex_count()) ||
        v >= static_cast<int>(vertex_count())) {
      return std::nullopt;
    }
    const auto arcs = neighbors(u);
    const auto it = std::lower_bound(arcs.begin(), arcs.end(), v,
                                     [](const Arc& a, int key) { return a.to < key; });
    if (it == arcs.end() || it->to != v) return std::nullopt;
    return it->edge;
  }

  bool contains_vertex(int v) const noexcept {
    return v >= 0 && v < static_cast<int>(vertex_count());
  }

 private:
  std::vector<Point2> vertices_;
  std::vector<Edge> edges_;
  std::vector<std::size_t> offsets_;
  std::vector<Arc> arcs_;
};

/// Vertex id of lattice point (i, j) in a lattice of the given width.
constexpr int lattice_vertex(int width, int i, int j) noexcept { return j * width + i; }

/// 8-adjacency integer lattice: vertex (i, j) for 0 <= i < width,
/// 0 <= j < height; unit axis edges and both diagonals of every cell.
inline GeometricGraph build_lattice(int width, int height) {
  if (width < 2 || height < 2) {
    throw std::invalid_argument("lattice dimensions must be at least 2x2");
  }
  std::vector<Point2> vertices;
  vertices.reserve(static_cast<std::size_t>(width) * height);
  for (int j = 0; j < height; ++j) {
    for (int i = 0; i < width; ++i) {
      vertices.push_back({static_cast<double>(i), static_cast<double>(j)});
    }
  }
  const double diag = std::sqrt(2.0);
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>((width - 1) * height + width * (height - 1) +
                                         2 * (width - 1) * (height - 1)));
  for (int j = 0; j < height; ++j) {
    for (int i = 0; i < width; ++i) {
      const int v = lattice_vertex(width, i, j);
      if (i + 1 < width) edges.push_back({v, lattice_vertex(width, i + 1, j), 1.0});
      if (j + 1 < height) edges.push_back({v, lattice_vertex(width, i, j + 1), 1.0});
      if (i + 1 < width && j + 1 < height) {
        edges.push_back({v, lattice_vertex(width, i + 1, j + 1), diag});
        edges.push_back({lattice_vertex(width, i + 1, j), lattice_vertex(width, i, j + 1), diag});
      }
    }
  }
  return GeometricGraph(std::move(vertices), std::move(edges));
}

namespace detail {

// Squared distance from c to segment [a,b] compared against r^2 without
// dividing: interior case uses |w|^2 * |d|^2 - (w.d)^2 <= r^2 * |d|^2.
// Endpoints are put in lexicographic order so the result is symmetric.
inline bool segment_within(Point2 a, Point2 b, Point2 c, double r) noexcept {
  if (b.x < a.x || (b.x == a.x && b.y < a.y)) std::swap(a, b);
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const double wx = c.x - a.x;
  const double wy = c.y - a.y;
  const double proj = wx * dx + wy * dy;
  const double len2 = dx * dx + dy * dy;
  const double r2 = r * r;
  if (proj <= 0.0) return wx * wx + wy * wy <= r2;
  if (proj >= len2) return squared_distance(b, c) <= r2;
  return (wx * wx + wy * wy) * len2 - proj * proj <= r2 * len2;
}

}  // namespace detail

/// True iff the closed disk touches the closed segment [a,b].
inline bool segment_disk_intersects(Point2 a, Point2 b, const Disk& d) {
  if (a == b) throw std::invalid_argument("degenerate segment");
  return detail::segment_within(a, b, d.center, d.radius);
}

/// Smallest t in [0,1] with a + t(b - a) inside the closed disk, or nullopt
/// when the segment misses the disk. Agrees with segment_disk_intersects.
inline std::optional<double> entry_parameter(Point2 a, Point2 b, const Disk& d) {
  if (a == b) throw std::invalid_argument("degenerate segment");
  if (!detail::segment_within(a, b, d.center, d.radius)) return std::nullopt;
  const double wx = d.center.x - a.x;
  const double wy = d.center.y - a.y;
  const double w2 = wx * wx + wy * wy;
  const double r2 = d.radius * d.radius;
  if (w2 <= r2) return 0.0;
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  const double proj = wx * dx + wy * dy;
  const double disc = std::max(0.0, proj * proj - len2 * (w2 - r2));
  const double t = (proj - std::sqrt(disc)) / len2;
  return std::clamp(t, 0.0, 1.0);
}

/// For every edge, the ascending list of disk indices intersecting it.
inline std::vector<std::vector<int>> index_edge_disks(const GeometricGraph& graph,
                                                      std::span<const Disk> disks) {
  std::vector<std::vector<int>> incidence(graph.edge_count());
  for (int k = 0; k < static_cast<int>(disks.size()); ++k) {
    const Disk& d = disks[static_cast<std::size_t>(k)];
    // Bounding-box prefilter, padded so it never rejects a touching edge.
    const double pad = d.radius * (1.0 + 1e-9) +
                       1e-9 * (std::abs(d.center.x) + std::abs(d.center.y));
    const double lox = d.center.x - pad;
    const double hix = d.center.x + pad;
    const double loy = d.center.y - pad;
    const double hiy = d.center.y + pad;
    for (std::size_t e = 0; e < graph.edge_count(); ++e) {
      const Edge& edge = graph.edges()[e];
      const Point2 a = graph.vertices()[static_cast<std::size_t>(edge.u)];
      const Point2 b = graph.vertices()[static_cast<std::size_t>(edge.v)];
      if (std::max(a.x, b.x) < lox || std::min(a.x, b.x) > hix ||
          std::max(a.y, b.y) < loy || std::min(a.y, b.y) > hiy) {
        continue;
      }
      if (detail::segment_within(a, b, d.center, d.radius)) {
        incidence[e].push_back(k);
      }
    }
  }
  return incidence;
}

}  // namespace sosim

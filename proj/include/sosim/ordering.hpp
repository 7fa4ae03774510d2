#pragma once

// Empirical stochastic-ordering checks on coupled scenes.
//
// Path-weight experiments evaluate W = sum over path edges of w(e) on one
// fixed path with every obstacle ambiguous. Within a replication all
// scenarios share obstacle centers and per-obstacle mark draws; only
// statuses (or the sensor model) change.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sosim/geometry.hpp"
#include "sosim/montecarlo.hpp"
#include "sosim/pointproc.hpp"
#include "sosim/rng.hpp"
#include "sosim/sensor.hpp"
#include "sosim/stats.hpp"
#include "sosim/traversal.hpp"

namespace sosim {

/// Empirical CDF: F(t) = #{values <= t} / n.
class Ecdf {
 public:
  explicit Ecdf(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) throw std::invalid_argument("ECDF of empty sample");
    std::sort(values_.begin(), values_.end());
  }
  double operator()(double t) const {
    const auto it = std::upper_bound(values_.begin(), values_.end(), t);
    return static_cast<double>(it - values_.begin()) / static_cast<double>(values_.size());
  }
  std::size_t size() const noexcept { return values_.size(); }
  const std::vector<double>& values() const noexcept { return values_; }

 private:
  std::vector<double> values_;
};

struct OrderingReport {
  std::string test;
  std::string label_x;
  std::string label_y;
  std::string kind = "theorem";  // theorem | analytic | conjecture
  bool holds = false;
  double max_violation = 0.0;    // max_t F_Y(t) - F_X(t)
  double tolerance = 0.0;
  std::size_t n_x = 0;
  std::size_t n_y = 0;
  double mean_x = 0.0;
  double mean_y = 0.0;
  double median_x = 0.0;
  double median_y = 0.0;
};

/// Tests X <=st Y: F_X(t) >= F_Y(t) - tol at every point of the merged
/// sample support.
inline OrderingReport dominates_st(std::span<const double> x, std::span<const double> y,
                                   double tol, std::string label_x = "X",
                                   std::string label_y = "Y") {
  if (x.empty() || y.empty()) throw std::invalid_argument("dominates_st: empty sample");
  if (!(tol >= 0.0)) throw std::invalid_argument("dominates_st: tolerance must be >= 0");
  std::vector<double> xs(x.begin(), x.end());
  std::vector<double> ys(y.begin(), y.end());
  std::sort(xs.begin(), xs.end());
  std::sort(ys.begin(), ys.end());
  const double nx = static_cast<double>(xs.size());
  const double ny = static_cast<double>(ys.size());
  double worst = -1.0;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < xs.size() || j < ys.size()) {
    double t = 0.0;
    if (j == ys.size() || (i < xs.size() && xs[i] <= ys[j])) {
      t = xs[i];
    } else {
      t = ys[j];
    }
    while (i < xs.size() && xs[i] <= t) ++i;
    while (j < ys.size() && ys[j] <= t) ++j;
    worst = std::max(worst, static_cast<double>(j) / ny - static_cast<double>(i) / nx);
  }
  OrderingReport r;
  r.label_x = std::move(label_x);
  r.label_y = std::move(label_y);
  r.max_violation = worst;
  r.tolerance = tol;
  r.holds = worst <= tol;
  r.n_x = xs.size();
  r.n_y = ys.size();
  r.mean_x = mean(xs);
  r.mean_y = mean(ys);
  r.median_x = median(xs);
  r.median_y = median(ys);
  return r;
}

/// Fraction of coupled pairs with x_i <= y_i.
inline double pairwise_probability(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.empty()) throw std::invalid_argument("pairwise_probability: bad sizes");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < x.size(); ++i) hits += x[i] <= y[i] ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(x.size());
}

/// A fixed vertex path on a lattice with its segment geometry.
class FixedPath {
 public:
  FixedPath(std::shared_ptr<const GeometricGraph> graph, std::vector<int> vertices)
      : graph_(std::move(graph)), vertices_(std::move(vertices)) {
    if (vertices_.size() < 2) throw std::invalid_argument("fixed path needs at least one edge");
    for (std::size_t i = 0; i + 1 < vertices_.size(); ++i) {
      const auto e = graph_->find_edge(vertices_[i], vertices_[i + 1]);
      if (!e) throw std::invalid_argument("fixed path vertices are not adjacent");
      edges_.push_back(*e);
      length_ += graph_->edge(*e).length;
    }
  }

  const GeometricGraph& graph() const noexcept { return *graph_; }
  std::shared_ptr<const GeometricGraph> graph_ptr() const noexcept { return graph_; }
  const std::vector<int>& vertices() const noexcept { return vertices_; }
  const std::vector<int>& edges() const noexcept { return edges_; }
  double length() const noexcept { return length_; }

  /// Number of path edges the disk touches.
  int hits(const Disk& d) const {
    int k = 0;
    for (int e : edges_) {
      const Edge& edge = graph_->edge(e);
      if (segment_disk_intersects(graph_->position(edge.u), graph_->position(edge.v), d)) ++k;
    }
    return k;
  }

 private:
  std::shared_ptr<const GeometricGraph> graph_;
  std::vector<int> vertices_;
  std::vector<int> edges_;
  double length_ = 0.0;
};

/// Straight lattice path between two vertices sharing an x coordinate.
inline std::vector<int> straight_column_path(int width, Point2 s, Point2 t) {
  if (s.x != t.x) throw std::invalid_argument("straight column path needs s.x == t.x");
  const int i = static_cast<int>(s.x);
  const int j0 = static_cast<int>(s.y);
  const int j1 = static_cast<int>(t.y);
  std::vector<int> path;
  const int step = j1 >= j0 ? 1 : -1;
  for (int j = j0;; j += step) {
    path.push_back(lattice_vertex(width, i, j));
    if (j == j1) break;
  }
  return path;
}

/// Shared settings for fixed-path experiments.
struct OrderingSetup {
  int n_o = 40;
  Placement placement = UniformPlacement{};
  SensorModel sensor{};
  double cost = 5.0;
  double radius = 4.5;
  int grid_width = 101;
  int grid_height = 101;
  Point2 source{50.0, 100.0};
  Point2 target{50.0, 1.0};
  Window insertion_window{10.0, 90.0, 10.0, 90.0};
  std::vector<int> path;  // lattice vertex ids; empty = straight s-t column
  int reps = 10000;
  std::uint64_t seed = 0;

  std::uint64_t replication_seed(int rep) const {
    return hash_combine(hash_combine(seed, fnv1a("ordering")), static_cast<std::uint64_t>(rep));
  }

  FixedPath fixed_path() const {
    auto g = std::make_shared<const GeometricGraph>(build_lattice(grid_width, grid_height));
    std::vector<int> p = path.empty() ? straight_column_path(grid_width, source, target) : path;
    return FixedPath(std::move(g), std::move(p));
  }
};

/// Everything drawn once per replication and shared by coupled scenarios.
struct CoupledDraw {
  std::vector<Point2> centers;
  std::vector<int> hits;         // path edges touched, per obstacle
  std::vector<int> order;        // status permutation; first n_T are true
  std::vector<MarkPair> marks;   // per obstacle, under setup.sensor
};

inline CoupledDraw coupled_draw(const OrderingSetup& setup, const FixedPath& path, int rep) {
  const std::uint64_t s = setup.replication_seed(rep);
  CoupledDraw d;
  RngStream placement_rng = stage_stream(s, Stage::Placement);
  d.centers = place_points(setup.placement, setup.n_o, setup.insertion_window, placement_rng);
  d.hits.reserve(d.centers.size());
  for (const Point2& c : d.centers) d.hits.push_back(path.hits(Disk{c, setup.radius}));
  RngStream status_rng = stage_stream(s, Stage::Status);
  d.order = random_permutation(setup.n_o, status_rng);
  RngStream mark_rng = stage_stream(s, Stage::Marks);
  d.marks = draw_mark_pairs(d.centers.size(), setup.sensor, mark_rng);
  return d;
}

/// Marks for the same replication under a different sensor model.
inline std::vector<MarkPair> coupled_marks(const OrderingSetup& setup, int rep,
                                           const SensorModel& model) {
  RngStream mark_rng = stage_stream(setup.replication_seed(rep), Stage::Marks);
  return draw_mark_pairs(static_cast<std::size_t>(setup.n_o), model, mark_rng);
}

/// W on the fixed path when the first n_true obstacles of `order` are true.
inline double fixed_path_weight(const CoupledDraw& d, std::span<const MarkPair> marks, int n_true,
                                double path_length, double cost) {
  std::vector<char> is_true(d.centers.size(), 0);
  for (int k = 0; k < n_true; ++k) is_true[static_cast<std::size_t>(d.order[static_cast<std::size_t>(k)])] = 1;
  double risk = 0.0;
  for (std::size_t i = 0; i < d.centers.size(); ++i) {
    if (d.hits[i] == 0) continue;
    const double p = is_true[i] ? marks[i].if_true : marks[i].if_false;
    risk += d.hits[i] * (cost / (1.0 - p));
  }
  return path_length + 0.5 * risk;
}

struct CompositionSamples {
  std::vector<double> false_only;
  std::vector<double> mixed;
  std::vector<double> true_only;
};

/// W^F, W^M (half true), W^T on shared placements and mark draws.
inline CompositionSamples coupled_composition_samples(const OrderingSetup& setup) {
  if (setup.n_o <= 0 || setup.reps <= 0) throw std::invalid_argument("need n_o > 0 and reps > 0");
  const FixedPath path = setup.fixed_path();
  CompositionSamples out;
  for (int rep = 0; rep < setup.reps; ++rep) {
    const CoupledDraw d = coupled_draw(setup, path, rep);
    out.false_only.push_back(fixed_path_weight(d, d.marks, 0, path.length(), setup.cost));
    out.mixed.push_back(fixed_path_weight(d, d.marks, setup.n_o / 2, path.length(), setup.cost));
    out.true_only.push_back(fixed_path_weight(d, d.marks, setup.n_o, path.length(), setup.cost));
  }
  return out;
}

/// n_T for ratio rho = n_T / n_F at fixed total; infinity means all true.
inline int true_count_for_ratio(double rho, int n_o) {
  if (std::isnan(rho) || rho < 0.0) throw std::invalid_argument("ratio must be >= 0");
  if (std::isinf(rho)) return n_o;
  const int n_true = static_cast<int>(std::lround(rho * n_o / (1.0 + rho)));
  if ((rho > 0.0 && n_true == 0) || n_true >= n_o) {
    throw std::invalid_argument("ratio " + format_number(rho) + " not realizable with " +
                                std::to_string(n_o) + " obstacles");
  }
  return n_true;
}

/// One sample set per ratio; true sets are nested across ratios.
inline std::vector<std::vector<double>> ratio_sweep_samples(const OrderingSetup& setup,
                                                            const std::vector<double>& ratios) {
  std::vector<int> counts;
  for (double rho : ratios) counts.push_back(true_count_for_ratio(rho, setup.n_o));
  const FixedPath path = setup.fixed_path();
  std::vector<std::vector<double>> out(ratios.size());
  for (int rep = 0; rep < setup.reps; ++rep) {
    const CoupledDraw d = coupled_draw(setup, path, rep);
    for (std::size_t k = 0; k < counts.size(); ++k) {
      out[k].push_back(fixed_path_weight(d, d.marks, counts[k], path.length(), setup.cost));
    }
  }
  return out;
}

/// W under two sensor models on shared placements, all obstacles of one
/// status (FalseOnly or TrueOnly). Requires a <= a' and b >= b'.
inline std::pair<std::vector<double>, std::vector<double>> sensor_fidelity_samples(
    const OrderingSetup& setup, const SensorModel& sharp, const SensorModel& flat,
    CompositionKind kind) {
  sharp.validate();
  flat.validate();
  if (sharp.a > flat.a || sharp.b < flat.b) {
    throw std::invalid_argument("sensor fidelity comparison needs a <= a' and b >= b'");
  }
  if (kind != CompositionKind::FalseOnly && kind != CompositionKind::TrueOnly) {
    throw std::invalid_argument("sensor fidelity comparison is for false_only or true_only");
  }
  const int n_true = kind == CompositionKind::TrueOnly ? setup.n_o : 0;
  const FixedPath path = setup.fixed_path();
  std::pair<std::vector<double>, std::vector<double>> out;
  for (int rep = 0; rep < setup.reps; ++rep) {
    const CoupledDraw d = coupled_draw(setup, path, rep);
    const auto m1 = coupled_marks(setup, rep, sharp);
    const auto m2 = coupled_marks(setup, rep, flat);
    out.first.push_back(fixed_path_weight(d, m1, n_true, path.length(), setup.cost));
    out.second.push_back(fixed_path_weight(d, m2, n_true, path.length(), setup.cost));
  }
  return out;
}

struct BetaShape {
  double a = 1.0;
  double b = 1.0;
};

/// Sums of n i.i.d. Beta variates for X and Y on common random numbers.
inline std::pair<std::vector<double>, std::vector<double>> beta_sum_samples(
    BetaShape x, BetaShape y, int n, int reps, std::uint64_t seed) {
  if (n <= 0 || reps <= 0) throw std::invalid_argument("need n > 0 and reps > 0");
  std::pair<std::vector<double>, std::vector<double>> out;
  for (int rep = 0; rep < reps; ++rep) {
    const std::uint64_t s = hash_combine(hash_combine(seed, fnv1a("beta_sum")), static_cast<std::uint64_t>(rep));
    RngStream rx(s, 0);
    RngStream ry(s, 0);
    double sx = 0.0;
    double sy = 0.0;
    for (int i = 0; i < n; ++i) {
      sx += beta_sample(x.a, x.b, rx);
      sy += beta_sample(y.a, y.b, ry);
    }
    out.first.push_back(sx);
    out.second.push_back(sy);
  }
  return out;
}

/// Sum of n i.i.d. X_i against sum of n i.i.d. Y_i, with X_i <=st Y_i.
inline OrderingReport beta_sum_check(BetaShape x, BetaShape y, int n, int reps, double tol,
                                      std::uint64_t seed = 0) {
  const auto [sx, sy] = beta_sum_samples(x, y, n, reps, seed);
  auto r = dominates_st(sx, sy, tol,
                        "sum" + std::to_string(n) + " Beta(" + format_number(x.a) + "," + format_number(x.b) + ")",
                        "sum" + std::to_string(n) + " Beta(" + format_number(y.a) + "," + format_number(y.b) + ")");
  r.test = "beta_sum";
  return r;
}

/// Analytic check of Beta(a,b) <=st Beta(b,a) for a < b on an evenly spaced
/// grid over [0,1]: violation is max_x I_x(b,a) - I_x(a,b).
inline OrderingReport reflection_check(double a, double b, int grid_points = 1001,
                                   double tol = 1e-10) {
  if (grid_points < 2) throw std::invalid_argument("grid needs at least two points");
  OrderingReport r;
  r.test = "reflection_pairs";
  r.kind = "analytic";
  r.label_x = "Beta(" + format_number(a) + "," + format_number(b) + ")";
  r.label_y = "Beta(" + format_number(b) + "," + format_number(a) + ")";
  double worst = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < grid_points; ++i) {
    const double x = static_cast<double>(i) / (grid_points - 1);
    worst = std::max(worst, beta_cdf(b, a, x) - beta_cdf(a, b, x));
  }
  r.max_violation = worst;
  r.tolerance = tol;
  r.holds = worst <= tol;
  r.n_x = r.n_y = static_cast<std::size_t>(grid_points);
  r.mean_x = a / (a + b);
  r.mean_y = b / (a + b);
  r.median_x = std::numeric_limits<double>::quiet_NaN();
  r.median_y = std::numeric_limits<double>::quiet_NaN();
  return r;
}

struct VariabilityRow {
  std::string label;
  std::size_t n = 0;
  double mean = 0.0;
  double variance = 0.0;
  double min = 0.0;
  double max = 0.0;
  double range = 0.0;
};

/// Fixed-path weight samples for one placement, all obstacles in the
/// status given by `kind` (false by default).
inline std::vector<double> placement_weight_samples(const OrderingSetup& setup,
                                                    CompositionKind kind = CompositionKind::FalseOnly) {
  const FixedPath path = setup.fixed_path();
  const int n_true = kind == CompositionKind::TrueOnly ? setup.n_o
                     : kind == CompositionKind::Mixed  ? setup.n_o / 2
                                                       : 0;
  std::vector<double> w;
  w.reserve(static_cast<std::size_t>(setup.reps));
  for (int rep = 0; rep < setup.reps; ++rep) {
    const CoupledDraw d = coupled_draw(setup, path, rep);
    w.push_back(fixed_path_weight(d, d.marks, n_true, path.length(), setup.cost));
  }
  return w;
}

inline VariabilityRow variability_row(std::string label, std::span<const double> w) {
  VariabilityRow row;
  row.label = std::move(label);
  row.n = w.size();
  row.mean = mean(w);
  row.variance = variance(w);
  row.min = *std::min_element(w.begin(), w.end());
  row.max = *std::max_element(w.begin(), w.end());
  row.range = row.max - row.min;
  return row;
}

/// Range and variance of W per placement. Reports; asserts nothing.
inline std::vector<VariabilityRow> variability_experiment(
    const OrderingSetup& base, const std::vector<std::pair<std::string, Placement>>& placements,
    CompositionKind kind = CompositionKind::FalseOnly) {
  std::vector<VariabilityRow> rows;
  for (const auto& [label, placement] : placements) {
    OrderingSetup s = base;
    s.placement = placement;
    const auto w = placement_weight_samples(s, kind);
    rows.push_back(variability_row(label, w));
  }
  return rows;
}

/// Realized RD costs C^F, C^M (half true), C^T on coupled lattice scenes.
inline CompositionSamples rd_composition_samples(const OrderingSetup& setup) {
  auto graph = std::make_shared<const GeometricGraph>(build_lattice(setup.grid_width, setup.grid_height));
  const FixedPath path = setup.fixed_path();
  ExperimentConfig cfg;
  cfg.grid_width = setup.grid_width;
  cfg.grid_height = setup.grid_height;
  const int s = cfg.lattice_id(setup.source);
  const int t = cfg.lattice_id(setup.target);
  const Window domain{0.0, setup.grid_width - 1.0, 0.0, setup.grid_height - 1.0};
  CompositionSamples out;
  for (int rep = 0; rep < setup.reps; ++rep) {
    const CoupledDraw d = coupled_draw(setup, path, rep);
    auto run = [&](int n_true) {
      std::vector<char> is_true(d.centers.size(), 0);
      for (int k = 0; k < n_true; ++k) is_true[static_cast<std::size_t>(d.order[static_cast<std::size_t>(k)])] = 1;
      std::vector<Obstacle> obs(d.centers.size());
      for (std::size_t i = 0; i < obs.size(); ++i) {
        obs[i].id = static_cast<int>(i);
        obs[i].disk = {d.centers[i], setup.radius};
        obs[i].cost = setup.cost;
        obs[i].status = is_true[i] ? Status::TrueObstacle : Status::FalseObstacle;
        obs[i].mark = is_true[i] ? d.marks[i].if_true : d.marks[i].if_false;
      }
      const Scene scene(graph, std::move(obs), s, t, domain, setup.insertion_window,
                        setup.replication_seed(rep));
      return rd_traverse(scene).total_cost;
    };
    out.false_only.push_back(run(0));
    out.mixed.push_back(run(setup.n_o / 2));
    out.true_only.push_back(run(setup.n_o));
  }
  return out;
}

}  // namespace sosim

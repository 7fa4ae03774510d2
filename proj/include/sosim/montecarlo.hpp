#pragma once

// Seeded Monte Carlo harness: scene generation per replication, parallel
// sweeps with canonical output order, and per-cell summaries.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <variant>
#include <vector>

#include "sosim/format.hpp"
#include "sosim/geometry.hpp"
#include "sosim/pointproc.hpp"
#include "sosim/rng.hpp"
#include "sosim/sensor.hpp"
#include "sosim/stats.hpp"
#include "sosim/traversal.hpp"

namespace sosim {

struct UniformPlacement {
  friend bool operator==(const UniformPlacement&, const UniformPlacement&) = default;
};

struct StraussPlacement {
  double d = 7.0;
  double gamma = 1.0;
  int burn_in_sweeps = 500;
  friend bool operator==(const StraussPlacement&, const StraussPlacement&) = default;
};

struct MaternPlacement {
  int kappa = 2;
  double r0 = 15.0;
  friend bool operator==(const MaternPlacement&, const MaternPlacement&) = default;
};

using Placement = std::variant<UniformPlacement, StraussPlacement, MaternPlacement>;

inline std::string placement_name(const Placement& p) {
  switch (p.index()) {
    case 0: return "uniform";
    case 1: return "strauss";
    default: return "matern";
  }
}

/// Draws n obstacle centers from the placement process inside `w`.
inline std::vector<Point2> place_points(const Placement& placement, int n, const Window& w,
                                        RngStream& rng) {
  if (n == 0) return {};
  if (const auto* s = std::get_if<StraussPlacement>(&placement)) {
    return sample_strauss(StraussParams{n, s->d, s->gamma, s->burn_in_sweeps}, w, rng);
  }
  if (const auto* m = std::get_if<MaternPlacement>(&placement)) {
    return sample_matern(MaternParams{m->kappa, m->r0, n}, w, rng);
  }
  return sample_uniform(n, w, rng);
}

enum class CompositionKind { None, FalseOnly, TrueOnly, Mixed };

struct Composition {
  CompositionKind kind = CompositionKind::FalseOnly;
  int n_true = 0;
  int n_false = 0;

  static Composition none() { return {CompositionKind::None, 0, 0}; }
  static Composition false_only(int n) { return {CompositionKind::FalseOnly, 0, n}; }
  static Composition true_only(int n) { return {CompositionKind::TrueOnly, n, 0}; }
  static Composition mixed(int n_true, int n_false) {
    return {CompositionKind::Mixed, n_true, n_false};
  }

  int total() const noexcept { return n_true + n_false; }

  std::string name() const {
    switch (kind) {
      case CompositionKind::None: return "none";
      case CompositionKind::FalseOnly: return "false_only";
      case CompositionKind::TrueOnly: return "true_only";
      case CompositionKind::Mixed: return "mixed";
    }
    return "unknown";
  }

  void validate() const {
    if (n_true < 0 || n_false < 0) throw std::invalid_argument("obstacle counts must be >= 0");
    switch (kind) {
      case CompositionKind::None:
        if (total() != 0) throw std::invalid_argument("composition 'none' has no obstacles");
        break;
      case CompositionKind::FalseOnly:
        if (n_true != 0 || n_false <= 0) throw std::invalid_argument("false_only needs n_F > 0, n_T = 0");
        break;
      case CompositionKind::TrueOnly:
        if (n_false != 0 || n_true <= 0) throw std::invalid_argument("true_only needs n_T > 0, n_F = 0");
        break;
      case CompositionKind::Mixed:
        if (n_true <= 0 || n_false <= 0) throw std::invalid_argument("mixed needs n_T > 0 and n_F > 0");
        break;
    }
  }

  friend bool operator==(const Composition&, const Composition&) = default;
};

/// One obstacle size option: radius and the disambiguation cost that goes with it.
struct SizeClass {
  double radius = 4.5;
  double cost = 5.0;
  friend bool operator==(const SizeClass&, const SizeClass&) = default;
};

/// Sub-stream tags; each replication draws each stage from its own stream.
enum class Stage : std::uint64_t { Placement = 1, Status = 2, Marks = 3, Sizes = 4 };

struct ExperimentConfig {
  Placement placement = UniformPlacement{};
  Composition composition = Composition::false_only(50);
  SensorModel sensor{};
  double cost = 5.0;
  double radius = 4.5;
  std::vector<SizeClass> size_classes;  // when nonempty, each obstacle picks one uniformly
  int grid_width = 101;
  int grid_height = 101;
  Point2 source{50.0, 100.0};
  Point2 target{50.0, 1.0};
  Window insertion_window{10.0, 90.0, 10.0, 90.0};
  int replications = 100;
  std::uint64_t master_seed = 0;

  Window domain() const {
    return {0.0, static_cast<double>(grid_width - 1), 0.0, static_cast<double>(grid_height - 1)};
  }

  int lattice_id(Point2 p) const {
    const double i = std::round(p.x);
    const double j = std::round(p.y);
    if (i != p.x || j != p.y || i < 0 || j < 0 || i >= grid_width || j >= grid_height) {
      throw std::invalid_argument("endpoint (" + format_number(p.x) + "," + format_number(p.y) +
                                  ") is not a lattice vertex");
    }
    return lattice_vertex(grid_width, static_cast<int>(i), static_cast<int>(j));
  }

  void validate() const {
    if (grid_width < 2 || grid_height < 2) throw std::invalid_argument("grid must be at least 2x2");
    composition.validate();
    sensor.validate();
    insertion_window.validate();
    if (replications < 1) throw std::invalid_argument("replications must be >= 1");
    if (!(cost > 0.0)) throw std::invalid_argument("disambiguation cost must be positive");
    if (!(radius > 0.0)) throw std::invalid_argument("obstacle radius must be positive");
    for (const SizeClass& s : size_classes) {
      if (!(s.radius > 0.0) || !(s.cost > 0.0)) {
        throw std::invalid_argument("size classes need positive radius and cost");
      }
    }
    if (lattice_id(source) == lattice_id(target)) throw std::invalid_argument("s and t coincide");
    if (const auto* s = std::get_if<StraussPlacement>(&placement)) {
      StraussParams{1, s->d, s->gamma, s->burn_in_sweeps}.validate();
    }
    if (const auto* m = std::get_if<MaternPlacement>(&placement)) {
      if (composition.total() > 0) MaternParams{m->kappa, m->r0, composition.total()}.validate();
    }
  }

  /// Canonical description of the parameter cell (everything except the
  /// replication count and master seed). Stream derivation hashes it.
  std::string cell_id() const {
    std::string s = "placement=" + placement_name(placement);
    if (const auto* st = std::get_if<StraussPlacement>(&placement)) {
      s += ";gamma=" + format_number(st->gamma) + ";d=" + format_number(st->d) +
           ";burn_in=" + format_number(st->burn_in_sweeps);
    } else if (const auto* m = std::get_if<MaternPlacement>(&placement)) {
      s += ";kappa=" + format_number(m->kappa) + ";r0=" + format_number(m->r0);
    }
    s += ";composition=" + composition.name() + ";n_T=" + format_number(composition.n_true) +
         ";n_F=" + format_number(composition.n_false);
    s += ";beta=" + format_number(sensor.a) + "," + format_number(sensor.b);
    if (size_classes.empty()) {
      s += ";r=" + format_number(radius) + ";c=" + format_number(cost);
    } else {
      s += ";sizes=";
      for (std::size_t i = 0; i < size_classes.size(); ++i) {
        if (i) s += "|";
        s += format_number(size_classes[i].radius) + ":" + format_number(size_classes[i].cost);
      }
    }
    s += ";grid=" + format_number(grid_width) + "x" + format_number(grid_height);
    s += ";s=" + format_number(source.x) + "," + format_number(source.y);
    s += ";t=" + format_number(target.x) + "," + format_number(target.y);
    s += ";window=" + format_number(insertion_window.xmin) + "," +
         format_number(insertion_window.xmax) + "," + format_number(insertion_window.ymin) + "," +
         format_number(insertion_window.ymax);
    return s;
  }
};

/// Seed for replication `rep` of a config; pure in (master_seed, cell, rep).
inline std::uint64_t replication_seed(const ExperimentConfig& config, int rep) {
  return hash_combine(hash_combine(config.master_seed, fnv1a(config.cell_id())),
                      static_cast<std::uint64_t>(rep));
}

inline RngStream stage_stream(std::uint64_t rep_seed, Stage stage) {
  return RngStream(rep_seed, static_cast<std::uint64_t>(stage));
}

/// Uniformly random ordering of 0..n-1 (Fisher-Yates).
inline std::vector<int> random_permutation(int n, RngStream& rng) {
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  for (int i = n - 1; i > 0; --i) {
    const auto j = static_cast<int>(rng.below(static_cast<std::uint64_t>(i) + 1));
    std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
  }
  return perm;
}

/// Statuses for n obstacles with the first n_true entries of a random
/// permutation set true. Smaller n_true on the same stream gives a subset.
inline std::vector<Status> nested_statuses(int n, int n_true, RngStream& status_rng) {
  std::vector<Status> st(static_cast<std::size_t>(n), Status::FalseObstacle);
  const auto perm = random_permutation(n, status_rng);
  for (int k = 0; k < n_true; ++k) st[static_cast<std::size_t>(perm[static_cast<std::size_t>(k)])] = Status::TrueObstacle;
  return st;
}

/// Obstacles for one replication, built from the separate stage streams.
inline std::vector<Obstacle> generate_obstacles(const ExperimentConfig& config,
                                                std::uint64_t rep_seed) {
  const int n = config.composition.total();
  RngStream placement_rng = stage_stream(rep_seed, Stage::Placement);
  const auto centers = place_points(config.placement, n, config.insertion_window, placement_rng);

  std::vector<Status> statuses(static_cast<std::size_t>(n), Status::FalseObstacle);
  if (config.composition.kind == CompositionKind::TrueOnly) {
    std::fill(statuses.begin(), statuses.end(), Status::TrueObstacle);
  } else if (config.composition.kind == CompositionKind::Mixed) {
    RngStream status_rng = stage_stream(rep_seed, Stage::Status);
    statuses = nested_statuses(n, config.composition.n_true, status_rng);
  }

  std::vector<Obstacle> obstacles(static_cast<std::size_t>(n));
  RngStream size_rng = stage_stream(rep_seed, Stage::Sizes);
  for (int i = 0; i < n; ++i) {
    Obstacle& o = obstacles[static_cast<std::size_t>(i)];
    o.id = i;
    o.disk = {centers[static_cast<std::size_t>(i)], config.radius};
    o.cost = config.cost;
    if (!config.size_classes.empty()) {
      const auto& sc = config.size_classes[size_rng.below(config.size_classes.size())];
      o.disk.radius = sc.radius;
      o.cost = sc.cost;
    }
    o.status = statuses[static_cast<std::size_t>(i)];
  }
  RngStream mark_rng = stage_stream(rep_seed, Stage::Marks);
  return assign_marks(std::move(obstacles), config.sensor, mark_rng);
}

inline Scene build_scene(const ExperimentConfig& config, int rep,
                         std::shared_ptr<const GeometricGraph> graph = nullptr) {
  config.validate();
  if (!graph) graph = std::make_shared<const GeometricGraph>(build_lattice(config.grid_width, config.grid_height));
  const std::uint64_t seed = replication_seed(config, rep);
  return Scene(std::move(graph), generate_obstacles(config, seed), config.lattice_id(config.source),
               config.lattice_id(config.target), config.domain(), config.insertion_window, seed);
}

/// One Monte Carlo replication, flattened for tabular output.
struct SweepRecord {
  std::string cell;
  std::string placement;
  double gamma = std::numeric_limits<double>::quiet_NaN();
  double d = std::numeric_limits<double>::quiet_NaN();
  double kappa = std::numeric_limits<double>::quiet_NaN();
  double r0 = std::numeric_limits<double>::quiet_NaN();
  std::string composition;
  int n_true = 0;
  int n_false = 0;
  int rep = 0;
  std::uint64_t seed = 0;
  double total_cost = 0.0;
  int n_dis = 0;
  double walk_length = 0.0;
  double disambiguation_cost = 0.0;
  double wall_time_s = 0.0;  // informational; not part of any CSV
};

inline SweepRecord make_record(const ExperimentConfig& config, int rep, std::uint64_t seed,
                               const TraversalResult& r) {
  SweepRecord rec;
  rec.cell = config.cell_id();
  rec.placement = placement_name(config.placement);
  if (const auto* s = std::get_if<StraussPlacement>(&config.placement)) {
    rec.gamma = s->gamma;
    rec.d = s->d;
  } else if (const auto* m = std::get_if<MaternPlacement>(&config.placement)) {
    rec.kappa = m->kappa;
    rec.r0 = m->r0;
  }
  rec.composition = config.composition.name();
  rec.n_true = config.composition.n_true;
  rec.n_false = config.composition.n_false;
  rec.rep = rep;
  rec.seed = seed;
  rec.total_cost = r.total_cost;
  rec.n_dis = r.n_dis();
  rec.walk_length = r.distance;
  rec.disambiguation_cost = r.disambiguation_cost;
  return rec;
}

inline SweepRecord run_replication(const ExperimentConfig& config, int rep,
                                   std::shared_ptr<const GeometricGraph> graph = nullptr) {
  const auto start = std::chrono::steady_clock::now();
  const Scene scene = build_scene(config, rep, std::move(graph));
  const TraversalResult result = rd_traverse(scene);
  SweepRecord rec = make_record(config, rep, scene.seed(), result);
  rec.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

/// A replication failed; names the offending parameter cell.
class SweepError : public std::runtime_error {
 public:
  SweepError(std::string cell, int rep, const std::string& what, bool infeasible)
      : std::runtime_error("cell [" + cell + "] rep " + std::to_string(rep) + ": " + what),
        cell_(std::move(cell)),
        rep_(rep),
        infeasible_(infeasible) {}
  const std::string& cell() const noexcept { return cell_; }
  int rep() const noexcept { return rep_; }
  bool infeasible() const noexcept { return infeasible_; }

 private:
  std::string cell_;
  int rep_;
  bool infeasible_;
};

struct SweepOptions {
  unsigned jobs = 1;
  std::function<void(std::size_t done, std::size_t total)> progress;
};

/// Runs every (config, rep) pair; output is in config order then rep order
/// regardless of `jobs`.
inline std::vector<SweepRecord> run_sweep(const std::vector<ExperimentConfig>& configs,
                                          const SweepOptions& options = {}) {
  if (configs.empty()) throw std::invalid_argument("run_sweep: no configurations");
  struct Task {
    std::size_t config;
    int rep;
  };
  std::vector<Task> tasks;
  std::map<std::pair<int, int>, std::shared_ptr<const GeometricGraph>> graphs;
  std::vector<std::shared_ptr<const GeometricGraph>> graph_of(configs.size());
  for (std::size_t c = 0; c < configs.size(); ++c) {
    configs[c].validate();
    auto& g = graphs[{configs[c].grid_width, configs[c].grid_height}];
    if (!g) g = std::make_shared<const GeometricGraph>(build_lattice(configs[c].grid_width, configs[c].grid_height));
    graph_of[c] = g;
    for (int r = 0; r < configs[c].replications; ++r) tasks.push_back({c, r});
  }

  std::vector<SweepRecord> records(tasks.size());
  std::vector<std::exception_ptr> errors(tasks.size());
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> done{0};
  std::mutex progress_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      const Task& t = tasks[i];
      try {
        records[i] = run_replication(configs[t.config], t.rep, graph_of[t.config]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
      const std::size_t d = ++done;
      if (options.progress) {
        std::lock_guard lock(progress_mutex);
        options.progress(d, tasks.size());
      }
    }
  };
  const unsigned jobs = std::max(1u, options.jobs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    if (!errors[i]) continue;
    const std::string cell = configs[tasks[i].config].cell_id();
    try {
      std::rethrow_exception(errors[i]);
    } catch (const InfeasibleScene& e) {
      throw SweepError(cell, tasks[i].rep, e.what(), true);
    } catch (const std::exception& e) {
      throw SweepError(cell, tasks[i].rep, e.what(), false);
    }
  }
  return records;
}

/// Value of a named record field as text, for grouping.
inline std::string record_field(const SweepRecord& r, std::string_view name) {
  if (name == "cell") return r.cell;
  if (name == "placement") return r.placement;
  if (name == "gamma") return format_number(r.gamma);
  if (name == "d") return format_number(r.d);
  if (name == "kappa") return format_number(r.kappa);
  if (name == "r0") return format_number(r.r0);
  if (name == "composition") return r.composition;
  if (name == "n_T") return format_number(r.n_true);
  if (name == "n_F") return format_number(r.n_false);
  throw std::invalid_argument("unknown grouping field '" + std::string(name) + "'");
}

struct SummaryRow {
  std::string cell;
  std::size_t count = 0;
  double mean_cost = 0.0;
  double variance = 0.0;
  double min_cost = 0.0;
  double max_cost = 0.0;
  double range = 0.0;
  double mean_n_dis = 0.0;
};

/// Per-group statistics of C. Groups appear in order of first occurrence.
/// An empty group_by groups by full parameter cell.
inline std::vector<SummaryRow> summarize(const std::vector<SweepRecord>& records,
                                         const std::vector<std::string>& group_by = {}) {
  if (records.empty()) throw std::invalid_argument("summarize: no records");
  std::vector<std::string> order;
  std::map<std::string, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < records.size(); ++i) {
    std::string key;
    if (group_by.empty()) {
      key = records[i].cell;
    } else {
      for (std::size_t g = 0; g < group_by.size(); ++g) {
        if (g) key += ";";
        key += group_by[g] + "=" + record_field(records[i], group_by[g]);
      }
    }
    auto [it, inserted] = groups.try_emplace(key);
    if (inserted) order.push_back(key);
    it->second.push_back(i);
  }
  std::vector<SummaryRow> rows;
  rows.reserve(order.size());
  for (const std::string& key : order) {
    const auto& idx = groups[key];
    std::vector<double> costs;
    double dis = 0.0;
    for (std::size_t i : idx) {
      costs.push_back(records[i].total_cost);
      dis += records[i].n_dis;
    }
    SummaryRow row;
    row.cell = key;
    row.count = idx.size();
    row.mean_cost = mean(costs);
    row.variance = variance(costs);
    row.min_cost = *std::min_element(costs.begin(), costs.end());
    row.max_cost = *std::max_element(costs.begin(), costs.end());
    row.range = row.max_cost - row.min_cost;
    row.mean_n_dis = dis / static_cast<double>(idx.size());
    rows.push_back(row);
  }
  return rows;
}

/// Evenly spaced values lo, lo + step, ..., up to hi (inclusive within 1e-9).
inline std::vector<double> grid_values(double lo, double hi, double step) {
  if (!(step > 0.0) || hi < lo) throw std::invalid_argument("grid_values: bad range");
  std::vector<double> v;
  const auto n = static_cast<long long>(std::floor((hi - lo) / step + 1e-9));
  for (long long i = 0; i <= n; ++i) {
    // Round to 12 significant decimals so 0.1 steps print as 0.3, not 0.30000000000000004.
    const double x = lo + static_cast<double>(i) * step;
    v.push_back(std::round(x * 1e12) / 1e12);
  }
  return v;
}

}  // namespace sosim

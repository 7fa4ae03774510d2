#pragma once

// Subcommand implementations. The executable only parses flags and calls
// run_command; tests call the same entry points in-process.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "sosim/config.hpp"
#include "sosim/io.hpp"
#include "sosim/montecarlo.hpp"
#include "sosim/ordering.hpp"
#include "sosim/traversal.hpp"

namespace sosim {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitConfig = 2,
  kExitInfeasible = 3,
  kExitIo = 4,
};

struct CliOptions {
  std::string config;     // empty = all defaults
  std::string out = ".";  // output directory
  bool svg = false;
  std::optional<std::uint64_t> seed;
  std::optional<int> reps;
  std::optional<unsigned> jobs;
  std::string nodes;  // network mode; overrides [network] nodes
  std::string edges;
};

namespace detail {

inline RunConfig effective_config(const CliOptions& opt) {
  RunConfig rc = opt.config.empty() ? RunConfig{} : load_config(opt.config);
  if (opt.config.empty()) rc.experiment.composition = Composition::none();
  if (opt.seed) rc.experiment.master_seed = *opt.seed;
  if (opt.reps) {
    if (*opt.reps < 1) throw ConfigError("--reps must be >= 1");
    rc.experiment.replications = *opt.reps;
    rc.ordering.reps = *opt.reps;
  }
  if (opt.jobs) {
    if (*opt.jobs < 1) throw ConfigError("--jobs must be >= 1");
    rc.jobs = *opt.jobs;
  }
  return rc;
}

inline std::filesystem::path output_dir(const CliOptions& opt) {
  const std::filesystem::path dir(opt.out.empty() ? "." : opt.out);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw IoError("cannot create output directory '" + dir.string() + "'");
  }
  return dir;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os = open_output(path.string());
  os << text;
  if (!os) throw IoError("write failed for '" + path.string() + "'");
}

template <class Writer>
void write_file(const std::filesystem::path& path, Writer&& writer) {
  std::ostringstream buffer;
  writer(buffer);
  write_text(path, buffer.str());
}

}  // namespace detail

/// One scene (replication 0 of the configured cell): obstacles.csv,
/// walk.csv, summary.txt and optionally scene.svg.
inline int cmd_simulate(const CliOptions& opt, std::ostream& out, std::ostream& err) {
  const RunConfig rc = detail::effective_config(opt);
  const ExperimentConfig& ex = rc.experiment;
  warn_if_non_discriminating(ex.sensor, err);
  try {
    ex.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  const auto dir = detail::output_dir(opt);
  const Scene scene = build_scene(ex, 0);
  const TraversalResult result = rd_traverse(scene);
  detail::write_file(dir / "obstacles.csv", [&](std::ostream& os) { write_obstacles_csv(os, scene.obstacles()); });
  detail::write_file(dir / "walk.csv", [&](std::ostream& os) { write_walk_csv(os, scene.graph(), result); });
  const std::string line = summary_line(result);
  detail::write_text(dir / "summary.txt", line + "\n");
  if (opt.svg) {
    detail::write_file(dir / "scene.svg", [&](std::ostream& os) {
      write_svg(os, scene.graph(), scene.window(), scene.obstacles(), &result);
    });
  }
  out << line << "\n";
  return kExitOk;
}

/// Every (cell, replication) of the sweep grid: records.csv and summary.csv.
inline int cmd_sweep(const CliOptions& opt, std::ostream& out, std::ostream& err) {
  const RunConfig rc = detail::effective_config(opt);
  warn_if_non_discriminating(rc.experiment.sensor, err);
  const auto configs = expand_sweep(rc);
  const auto dir = detail::output_dir(opt);
  SweepOptions so;
  so.jobs = rc.jobs;
  so.progress = [&err](std::size_t done, std::size_t total) {
    const std::size_t step = std::max<std::size_t>(1, total / 20);
    if (done % step == 0 || done == total) err << "sweep: " << done << "/" << total << " replications\n";
  };
  const auto records = run_sweep(configs, so);
  const auto rows = summarize(records, rc.group_by);
  detail::write_file(dir / "records.csv", [&](std::ostream& os) { write_records_csv(os, records); });
  detail::write_file(dir / "summary.csv", [&](std::ostream& os) { write_summary_csv(os, rows); });
  out << "records=" << records.size() << ", cells=" << configs.size()
      << ", summary_rows=" << rows.size() << "\n";
  return kExitOk;
}

/// All stochastic-ordering checks configured in [ordering].
inline std::vector<OrderingReport> ordering_reports(const RunConfig& rc,
                                                    std::vector<VariabilityRow>* variability,
                                                    std::ostream& err) {
  const OrderingOptions& o = rc.ordering;
  OrderingSetup setup = ordering_setup(rc);
  std::vector<OrderingReport> reports;
  auto push = [&](OrderingReport r, std::string test, std::string kind = "theorem") {
    r.test = std::move(test);
    r.kind = std::move(kind);
    reports.push_back(std::move(r));
  };

  for (const BetaShape& s : o.reflection_pairs) {
    OrderingReport r = reflection_check(s.a, s.b);
    push(r, "beta_reflection", "analytic");
  }
  if (!o.reflection_pairs.empty()) {
    const BetaShape x = o.reflection_pairs.front();
    push(beta_sum_check(x, {x.b, x.a}, o.sum_n, o.reps, o.tol, setup.seed), "beta_sum");
  }

  err << "ordering: composition triple\n";
  const auto comp = coupled_composition_samples(setup);
  push(dominates_st(comp.false_only, comp.mixed, o.tol, "W_false_only", "W_mixed"), "composition");
  push(dominates_st(comp.mixed, comp.true_only, o.tol, "W_mixed", "W_true_only"), "composition");

  if (!o.ratios.empty()) {
    err << "ordering: true/false ratio sweep\n";
    std::vector<double> ratios = o.ratios;
    std::sort(ratios.begin(), ratios.end());
    const auto samples = ratio_sweep_samples(setup, ratios);
    for (std::size_t i = 0; i < ratios.size(); ++i) {
      for (std::size_t j = i + 1; j < ratios.size(); ++j) {
        push(dominates_st(samples[i], samples[j], o.tol, "W_rho=" + format_rounded(ratios[i], 6),
                          "W_rho=" + format_rounded(ratios[j], 6)),
             "ratio");
      }
    }
  }

  err << "ordering: sensor fidelity\n";
  const SensorModel sharp = setup.sensor;
  const SensorModel flat = o.flat_sensor;
  const std::string ls = "Beta(" + format_number(sharp.a) + "," + format_number(sharp.b) + ")";
  const std::string lf = "Beta(" + format_number(flat.a) + "," + format_number(flat.b) + ")";
  const auto sf = sensor_fidelity_samples(setup, sharp, flat, CompositionKind::FalseOnly);
  push(dominates_st(sf.first, sf.second, o.tol, "W_false_only " + ls, "W_false_only " + lf), "sensor_false");
  const auto stt = sensor_fidelity_samples(setup, sharp, flat, CompositionKind::TrueOnly);
  push(dominates_st(stt.first, stt.second, o.tol, "W_true_only " + ls, "W_true_only " + lf), "sensor_true");

  if (o.rd_reps > 0) {
    err << "ordering: realized traversal costs\n";
    OrderingSetup rd = setup;
    rd.reps = o.rd_reps;
    const auto c = rd_composition_samples(rd);
    push(dominates_st(c.false_only, c.mixed, o.tol, "C_false_only", "C_mixed"), "rd_composition", "conjecture");
    push(dominates_st(c.mixed, c.true_only, o.tol, "C_mixed", "C_true_only"), "rd_composition", "conjecture");
  }

  if (variability && o.variability_reps > 0) {
    err << "ordering: placement variability\n";
    OrderingSetup vs = setup;
    vs.reps = o.variability_reps;
    const int kappa = std::min(2, std::max(1, setup.n_o));
    *variability = variability_experiment(
        vs, {{"uniform", UniformPlacement{}},
             {"strauss(gamma=0,d=7)", StraussPlacement{7.0, 0.0, 500}},
             {"matern(kappa=" + std::to_string(kappa) + ",r0=5)", MaternPlacement{kappa, 5.0}}});
  }
  return reports;
}

inline std::string ordering_text(const std::vector<OrderingReport>& reports) {
  std::ostringstream os;
  for (const OrderingReport& r : reports) {
    os << (r.kind == "theorem" || r.kind == "analytic" ? (r.holds ? "HOLDS " : "FAILS ") : "INFO  ")
       << r.test << " [" << r.kind << "] " << r.label_x << " <=st " << r.label_y
       << ": max_violation=" << format_rounded(r.max_violation, 6)
       << " tol=" << format_number(r.tolerance) << " mean " << format_rounded(r.mean_x, 6) << " vs "
       << format_rounded(r.mean_y, 6) << "\n";
  }
  return os.str();
}

/// ordering.csv, ordering.txt and, when enabled, variability.csv.
inline int cmd_ordering(const CliOptions& opt, std::ostream& out, std::ostream& err) {
  const RunConfig rc = detail::effective_config(opt);
  warn_if_non_discriminating(rc.experiment.sensor, err);
  const auto dir = detail::output_dir(opt);
  std::vector<VariabilityRow> variability;
  std::vector<OrderingReport> reports;
  try {
    reports = ordering_reports(rc, &variability, err);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  detail::write_file(dir / "ordering.csv", [&](std::ostream& os) { write_ordering_csv(os, reports); });
  const std::string text = ordering_text(reports);
  detail::write_text(dir / "ordering.txt", text);
  if (!variability.empty()) {
    detail::write_file(dir / "variability.csv", [&](std::ostream& os) { write_variability_csv(os, variability); });
  }
  out << text;
  return kExitOk;
}

/// Loaded network scene; shared by cmd_network and tests.
struct NetworkScene {
  Network network;
  Scene scene;
  std::vector<int> dropped;  // generated obstacle ids removed for covering s or t
};

inline NetworkScene build_network_scene(const RunConfig& rc, const CliOptions& opt) {
  const std::string nodes = !opt.nodes.empty() ? opt.nodes : rc.resolve(rc.network.nodes);
  const std::string edges = !opt.edges.empty() ? opt.edges : rc.resolve(rc.network.edges);
  if (nodes.empty() || edges.empty()) throw ConfigError("network mode needs nodes and edges files");
  if (!rc.network.source || !rc.network.target) throw ConfigError("[network] source and target node ids are required");
  Network net = load_network(read_csv_file(nodes), read_csv_file(edges));
  int s = 0;
  int t = 0;
  try {
    s = net.index(*rc.network.source);
    t = net.index(*rc.network.target);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("[network] ") + e.what());
  }
  if (s == t) throw ConfigError("[network] source and target must differ");
  if (!connected(*net.graph, s, t)) {
    throw InfeasibleScene("network nodes " + std::to_string(*rc.network.source) + " and " +
                          std::to_string(*rc.network.target) + " are not connected");
  }
  const ExperimentConfig& ex = rc.experiment;
  const Window bbox = net.bounding_box();
  std::vector<Obstacle> obstacles;
  std::vector<int> dropped;
  std::uint64_t seed = hash_combine(ex.master_seed, fnv1a("network"));
  if (!rc.network.obstacles.empty()) {
    RngStream mark_rng = stage_stream(seed, Stage::Marks);
    obstacles = load_obstacles(read_csv_file(rc.resolve(rc.network.obstacles)), ex.cost, ex.sensor, mark_rng);
  } else if (ex.composition.total() > 0) {
    ExperimentConfig gen = ex;
    gen.insertion_window = bbox;
    seed = hash_combine(hash_combine(ex.master_seed, fnv1a("network:" + gen.cell_id())), 0);
    for (Obstacle& o : generate_obstacles(gen, seed)) {
      bool covers = false;
      for (int v : {s, t}) {
        covers = covers || squared_distance(net.graph->position(v), o.disk.center) <= o.disk.radius * o.disk.radius;
      }
      if (covers) {
        dropped.push_back(o.id);
      } else {
        obstacles.push_back(o);
      }
    }
  }
  try {
    Scene scene(net.graph, std::move(obstacles), s, t, bbox, bbox, seed);
    return NetworkScene{std::move(net), std::move(scene), std::move(dropped)};
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

/// RD on a user network: obstacles.csv, walk.csv (file node ids),
/// summary.txt and network.svg.
inline int cmd_network(const CliOptions& opt, std::ostream& out, std::ostream& err) {
  const RunConfig rc = detail::effective_config(opt);
  warn_if_non_discriminating(rc.experiment.sensor, err);
  const NetworkScene ns = build_network_scene(rc, opt);
  for (int id : ns.dropped) err << "warning: generated obstacle " << id << " covers s or t; dropped\n";
  const auto dir = detail::output_dir(opt);
  const TraversalResult result = rd_traverse(ns.scene);
  detail::write_file(dir / "obstacles.csv", [&](std::ostream& os) { write_obstacles_csv(os, ns.scene.obstacles()); });
  detail::write_file(dir / "walk.csv", [&](std::ostream& os) {
    write_walk_csv(os, ns.scene.graph(), result, ns.network.node_ids);
  });
  const std::string text = summary_line(result) + "\n" + "total=" + decomposition_line(result) + "\n";
  detail::write_text(dir / "summary.txt", text);
  detail::write_file(dir / "network.svg", [&](std::ostream& os) {
    SvgOptions so;
    so.draw_edges = true;
    write_svg(os, ns.scene.graph(), ns.scene.window(), ns.scene.obstacles(), &result, so);
  });
  out << text;
  return kExitOk;
}

/// Dispatches a subcommand and maps failures to exit codes.
inline int run_command(const std::string& command, const CliOptions& opt, std::ostream& out,
                       std::ostream& err) {
  try {
    if (command == "simulate") return cmd_simulate(opt, out, err);
    if (command == "sweep") return cmd_sweep(opt, out, err);
    if (command == "ordering") return cmd_ordering(opt, out, err);
    if (command == "network") return cmd_network(opt, out, err);
    err << "error: unknown command '" << command << "'\n";
    return kExitConfig;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const InfeasibleScene& e) {
    err << "infeasible scene: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const SweepError& e) {
    err << "sweep failed: " << e.what() << "\n";
    return e.infeasible() ? kExitInfeasible : kExitFailure;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace sosim

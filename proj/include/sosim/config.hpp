#pragma once

// Sectioned key=value run configuration.
//
//   # comment
//   [scene]
//   grid = 101x101
//   s = 50,100
//
// Unknown sections and keys are errors.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "sosim/io.hpp"
#include "sosim/montecarlo.hpp"
#include "sosim/ordering.hpp"

namespace sosim {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One swept parameter and its values.
struct SweepAxis {
  std::string key;
  std::vector<double> values;
};

struct OrderingOptions {
  int n_o = 40;
  int reps = 10000;
  double tol = 0.02;
  std::vector<double> ratios{1.0 / 3.0, 1.0, 3.0};
  SensorModel flat_sensor{3.0, 5.0};
  std::vector<BetaShape> reflection_pairs{{2.0, 6.0}, {1.0, 3.0}, {3.0, 9.0}};
  int sum_n = 5;
  int rd_reps = 0;           // realized-cost conjecture rows; 0 disables
  int variability_reps = 0;  // placement variability table; 0 disables
};

struct NetworkOptions {
  std::string nodes;
  std::string edges;
  std::string obstacles;  // manual placement CSV; empty = generate
  std::optional<long long> source;
  std::optional<long long> target;
};

struct RunConfig {
  ExperimentConfig experiment;
  std::vector<SweepAxis> sweep;
  std::vector<std::string> group_by;
  OrderingOptions ordering;
  NetworkOptions network;
  unsigned jobs = 1;
  std::filesystem::path base_dir;  // relative file references resolve here

  std::string resolve(const std::string& p) const {
    if (p.empty()) return p;
    const std::filesystem::path path(p);
    return path.is_absolute() || base_dir.empty() ? p : (base_dir / path).string();
  }
};

namespace detail {

inline double config_real(const std::string& where, const std::string& v) {
  const auto x = parse_real(v);
  if (!x) throw ConfigError(where + ": expected a number, got '" + v + "'");
  return *x;
}

inline long long config_int(const std::string& where, const std::string& v) {
  const auto x = parse_integer(v);
  if (!x) throw ConfigError(where + ": expected an integer, got '" + v + "'");
  return *x;
}

inline std::vector<double> config_reals(const std::string& where, const std::string& v) {
  std::vector<double> out;
  for (const auto& f : split(v, ',')) out.push_back(config_real(where, f));
  return out;
}

inline std::pair<double, double> config_pair(const std::string& where, const std::string& v,
                                             char sep = ',') {
  const auto f = split(v, sep);
  if (f.size() != 2) throw ConfigError(where + ": expected two values, got '" + v + "'");
  return {config_real(where, f[0]), config_real(where, f[1])};
}

/// "a,b,c" or "lo:hi:step".
inline std::vector<double> config_values(const std::string& where, const std::string& v) {
  if (v.find(':') != std::string::npos) {
    const auto f = split(v, ':');
    if (f.size() != 3) throw ConfigError(where + ": range must be lo:hi:step");
    try {
      return grid_values(config_real(where, f[0]), config_real(where, f[1]), config_real(where, f[2]));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(where + ": " + e.what());
    }
  }
  return config_reals(where, v);
}

inline int checked_int(const std::string& where, long long v, long long lo, long long hi) {
  if (v < lo || v > hi) {
    throw ConfigError(where + ": value " + std::to_string(v) + " outside [" + std::to_string(lo) +
                      ", " + std::to_string(hi) + "]");
  }
  return static_cast<int>(v);
}

}  // namespace detail

inline const std::map<std::string, std::set<std::string>>& config_schema() {
  static const std::map<std::string, std::set<std::string>> schema{
      {"scene", {"grid", "s", "t", "r", "c", "window"}},
      {"sensor", {"beta"}},
      {"placement", {"type", "gamma", "d", "burn_in", "kappa", "r0"}},
      {"composition", {"type", "n_T", "n_F"}},
      {"sizes", {"radii", "costs"}},
      {"run", {"reps", "seed", "jobs"}},
      {"sweep", {"gamma", "d", "burn_in", "kappa", "r0", "n_T", "n_F", "r", "c", "group_by"}},
      {"ordering",
       {"n_o", "reps", "tol", "ratios", "flat_beta", "reflection_pairs", "sum_n", "rd_reps",
        "variability_reps"}},
      {"network", {"nodes", "edges", "obstacles", "source", "target"}},
  };
  return schema;
}

/// Parses configuration text. `source` names the input in messages.
inline RunConfig parse_config(std::istream& is, const std::string& source = "config") {
  struct Entry {
    std::string value;
    int line;
  };
  std::map<std::string, std::map<std::string, Entry>> entries;
  std::vector<std::pair<std::string, std::string>> sweep_order;
  const auto& schema = config_schema();
  std::string section;
  std::string raw;
  int lineno = 0;
  while (std::getline(is, raw)) {
    ++lineno;
    const std::string where = source + ":" + std::to_string(lineno);
    auto hash = raw.find('#');
    std::string line(trim(hash == std::string::npos ? std::string_view(raw) : std::string_view(raw).substr(0, hash)));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + ": malformed section header");
      section = std::string(trim(std::string_view(line).substr(1, line.size() - 2)));
      if (!schema.count(section)) throw ConfigError(where + ": unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
    if (section.empty()) throw ConfigError(where + ": key outside any section");
    const std::string key(trim(std::string_view(line).substr(0, eq)));
    const std::string value(trim(std::string_view(line).substr(eq + 1)));
    if (!schema.at(section).count(key)) {
      throw ConfigError(where + ": unknown key '" + key + "' in [" + section + "]");
    }
    if (!entries[section].emplace(key, Entry{value, lineno}).second) {
      throw ConfigError(where + ": duplicate key '" + key + "'");
    }
    if (section == "sweep" && key != "group_by") sweep_order.emplace_back(key, value);
  }

  RunConfig rc;
  ExperimentConfig& ex = rc.experiment;
  ex.composition = Composition::none();
  auto get = [&](const std::string& sec, const std::string& key) -> std::optional<std::pair<std::string, std::string>> {
    const auto s = entries.find(sec);
    if (s == entries.end()) return std::nullopt;
    const auto k = s->second.find(key);
    if (k == s->second.end()) return std::nullopt;
    return std::make_pair(source + ":" + std::to_string(k->second.line) + ": " + key, k->second.value);
  };

  if (auto v = get("scene", "grid")) {
    const auto [w, h] = detail::config_pair(v->first, v->second, 'x');
    if (w != std::floor(w) || h != std::floor(h) || w < 2 || h < 2 || w > 100000 || h > 100000) {
      throw ConfigError(v->first + ": grid must be WxH with integers >= 2");
    }
    ex.grid_width = static_cast<int>(w);
    ex.grid_height = static_cast<int>(h);
  }
  if (auto v = get("scene", "s")) ex.source = {detail::config_pair(v->first, v->second).first, detail::config_pair(v->first, v->second).second};
  if (auto v = get("scene", "t")) ex.target = {detail::config_pair(v->first, v->second).first, detail::config_pair(v->first, v->second).second};
  if (auto v = get("scene", "r")) ex.radius = detail::config_real(v->first, v->second);
  if (auto v = get("scene", "c")) ex.cost = detail::config_real(v->first, v->second);
  if (auto v = get("scene", "window")) {
    const auto f = detail::config_reals(v->first, v->second);
    if (f.size() != 4) throw ConfigError(v->first + ": window is xmin,xmax,ymin,ymax");
    ex.insertion_window = {f[0], f[1], f[2], f[3]};
  }
  if (auto v = get("sensor", "beta")) {
    const auto [a, b] = detail::config_pair(v->first, v->second);
    ex.sensor = {a, b};
  }

  std::string ptype = "uniform";
  if (auto v = get("placement", "type")) ptype = v->second;
  StraussPlacement st;
  MaternPlacement mt;
  if (auto v = get("placement", "gamma")) st.gamma = detail::config_real(v->first, v->second);
  if (auto v = get("placement", "d")) st.d = detail::config_real(v->first, v->second);
  if (auto v = get("placement", "burn_in")) st.burn_in_sweeps = detail::checked_int(v->first, detail::config_int(v->first, v->second), 0, 1000000);
  if (auto v = get("placement", "kappa")) mt.kappa = detail::checked_int(v->first, detail::config_int(v->first, v->second), 1, 1000000);
  if (auto v = get("placement", "r0")) mt.r0 = detail::config_real(v->first, v->second);
  if (ptype == "uniform") {
    ex.placement = UniformPlacement{};
  } else if (ptype == "strauss") {
    ex.placement = st;
  } else if (ptype == "matern") {
    ex.placement = mt;
  } else {
    throw ConfigError(get("placement", "type")->first + ": placement must be uniform, strauss or matern");
  }
  for (const char* k : {"gamma", "d", "burn_in"}) {
    if (get("placement", k) && ptype != "strauss") throw ConfigError(get("placement", k)->first + " applies only to strauss placement");
  }
  for (const char* k : {"kappa", "r0"}) {
    if (get("placement", k) && ptype != "matern") throw ConfigError(get("placement", k)->first + " applies only to matern placement");
  }

  int n_true = 0;
  int n_false = 0;
  if (auto v = get("composition", "n_T")) n_true = detail::checked_int(v->first, detail::config_int(v->first, v->second), 0, 1000000);
  if (auto v = get("composition", "n_F")) n_false = detail::checked_int(v->first, detail::config_int(v->first, v->second), 0, 1000000);
  std::string ctype;
  if (auto v = get("composition", "type")) {
    ctype = v->second;
  } else {
    const bool has_t = n_true > 0 || entries["sweep"].count("n_T");
    const bool has_f = n_false > 0 || entries["sweep"].count("n_F");
    ctype = has_t && has_f ? "mixed" : has_t ? "true_only" : has_f ? "false_only" : "none";
  }
  if (ctype == "none") {
    ex.composition = Composition::none();
  } else if (ctype == "false_only") {
    ex.composition = {CompositionKind::FalseOnly, n_true, n_false};
  } else if (ctype == "true_only") {
    ex.composition = {CompositionKind::TrueOnly, n_true, n_false};
  } else if (ctype == "mixed") {
    ex.composition = {CompositionKind::Mixed, n_true, n_false};
  } else {
    throw ConfigError(get("composition", "type")->first + ": composition must be none, false_only, true_only or mixed");
  }

  {
    const auto radii = get("sizes", "radii");
    const auto costs = get("sizes", "costs");
    if (radii.has_value() != costs.has_value()) throw ConfigError(source + ": [sizes] needs both radii and costs");
    if (radii) {
      const auto r = detail::config_reals(radii->first, radii->second);
      const auto c = detail::config_reals(costs->first, costs->second);
      if (r.size() != c.size()) throw ConfigError(costs->first + ": radii and costs differ in length");
      for (std::size_t i = 0; i < r.size(); ++i) ex.size_classes.push_back({r[i], c[i]});
    }
  }

  if (auto v = get("run", "reps")) ex.replications = detail::checked_int(v->first, detail::config_int(v->first, v->second), 1, 100000000);
  if (auto v = get("run", "seed")) {
    const auto s = detail::config_int(v->first, v->second);
    if (s < 0) throw ConfigError(v->first + ": seed must be >= 0");
    ex.master_seed = static_cast<std::uint64_t>(s);
  }
  if (auto v = get("run", "jobs")) rc.jobs = static_cast<unsigned>(detail::checked_int(v->first, detail::config_int(v->first, v->second), 1, 1024));

  for (const auto& [key, value] : sweep_order) {
    const auto v = get("sweep", key);
    SweepAxis axis{key, detail::config_values(v->first, value)};
    if (axis.values.empty()) throw ConfigError(v->first + ": empty sweep axis");
    if ((key == "gamma" || key == "d" || key == "burn_in") && ptype != "strauss") {
      throw ConfigError(v->first + ": sweeping " + key + " needs strauss placement");
    }
    if ((key == "kappa" || key == "r0") && ptype != "matern") {
      throw ConfigError(v->first + ": sweeping " + key + " needs matern placement");
    }
    rc.sweep.push_back(std::move(axis));
  }
  if (auto v = get("sweep", "group_by")) {
    for (const auto& f : split(v->second, ',')) {
      SweepRecord probe;
      try {
        record_field(probe, f);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(v->first + ": " + e.what());
      }
      rc.group_by.push_back(f);
    }
  }

  OrderingOptions& o = rc.ordering;
  if (auto v = get("ordering", "n_o")) o.n_o = detail::checked_int(v->first, detail::config_int(v->first, v->second), 1, 1000000);
  if (auto v = get("ordering", "reps")) o.reps = detail::checked_int(v->first, detail::config_int(v->first, v->second), 1, 100000000);
  if (auto v = get("ordering", "tol")) o.tol = detail::config_real(v->first, v->second);
  if (auto v = get("ordering", "ratios")) o.ratios = detail::config_reals(v->first, v->second);
  if (auto v = get("ordering", "flat_beta")) {
    const auto [a, b] = detail::config_pair(v->first, v->second);
    o.flat_sensor = {a, b};
  }
  if (auto v = get("ordering", "reflection_pairs")) {
    o.reflection_pairs.clear();
    for (const auto& pair : split(v->second, ';')) {
      const auto [a, b] = detail::config_pair(v->first, pair);
      o.reflection_pairs.push_back({a, b});
    }
  }
  if (auto v = get("ordering", "sum_n")) o.sum_n = detail::checked_int(v->first, detail::config_int(v->first, v->second), 1, 100000);
  if (auto v = get("ordering", "rd_reps")) o.rd_reps = detail::checked_int(v->first, detail::config_int(v->first, v->second), 0, 100000000);
  if (auto v = get("ordering", "variability_reps")) o.variability_reps = detail::checked_int(v->first, detail::config_int(v->first, v->second), 0, 100000000);

  if (auto v = get("network", "nodes")) rc.network.nodes = v->second;
  if (auto v = get("network", "edges")) rc.network.edges = v->second;
  if (auto v = get("network", "obstacles")) rc.network.obstacles = v->second;
  if (auto v = get("network", "source")) rc.network.source = detail::config_int(v->first, v->second);
  if (auto v = get("network", "target")) rc.network.target = detail::config_int(v->first, v->second);

  try {
    ex.sensor.validate();
    if (!entries["sweep"].count("n_T") && !entries["sweep"].count("n_F")) ex.composition.validate();
    ex.insertion_window.validate();
    if (!(ex.cost > 0.0)) throw std::invalid_argument("c must be positive");
    if (!(ex.radius > 0.0)) throw std::invalid_argument("r must be positive");
    if (!(o.tol >= 0.0)) throw std::invalid_argument("ordering tol must be >= 0");
    o.flat_sensor.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(source + ": " + e.what());
  }
  return rc;
}

inline RunConfig parse_config_text(const std::string& text, const std::string& source = "config") {
  std::istringstream is(text);
  return parse_config(is, source);
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open config '" + path + "'");
  RunConfig rc = parse_config(is, path);
  rc.base_dir = std::filesystem::path(path).parent_path();
  return rc;
}

/// Cartesian product of the sweep axes over the base experiment, first axis
/// outermost. No axes gives the base experiment alone.
inline std::vector<ExperimentConfig> expand_sweep(const RunConfig& rc) {
  std::vector<ExperimentConfig> out{rc.experiment};
  for (const SweepAxis& axis : rc.sweep) {
    std::vector<ExperimentConfig> next;
    for (const ExperimentConfig& base : out) {
      for (double v : axis.values) {
        ExperimentConfig c = base;
        const std::string where = "sweep " + axis.key + "=" + format_number(v);
        auto as_int = [&](double x) {
          if (x != std::floor(x) || x < 0 || x > 1e9) throw ConfigError(where + ": expected a non-negative integer");
          return static_cast<int>(x);
        };
        if (axis.key == "gamma") {
          std::get<StraussPlacement>(c.placement).gamma = v;
        } else if (axis.key == "d") {
          std::get<StraussPlacement>(c.placement).d = v;
        } else if (axis.key == "burn_in") {
          std::get<StraussPlacement>(c.placement).burn_in_sweeps = as_int(v);
        } else if (axis.key == "kappa") {
          std::get<MaternPlacement>(c.placement).kappa = as_int(v);
        } else if (axis.key == "r0") {
          std::get<MaternPlacement>(c.placement).r0 = v;
        } else if (axis.key == "n_T") {
          c.composition.n_true = as_int(v);
        } else if (axis.key == "n_F") {
          c.composition.n_false = as_int(v);
        } else if (axis.key == "r") {
          c.radius = v;
        } else if (axis.key == "c") {
          c.cost = v;
        }
        next.push_back(std::move(c));
      }
    }
    out = std::move(next);
  }
  for (const ExperimentConfig& c : out) {
    try {
      c.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError("invalid cell [" + c.cell_id() + "]: " + e.what());
    }
  }
  return out;
}

inline OrderingSetup ordering_setup(const RunConfig& rc) {
  const ExperimentConfig& ex = rc.experiment;
  OrderingSetup s;
  s.n_o = rc.ordering.n_o;
  s.placement = ex.placement;
  s.sensor = ex.sensor;
  s.cost = ex.cost;
  s.radius = ex.radius;
  s.grid_width = ex.grid_width;
  s.grid_height = ex.grid_height;
  s.source = ex.source;
  s.target = ex.target;
  s.insertion_window = ex.insertion_window;
  s.reps = rc.ordering.reps;
  s.seed = ex.master_seed;
  return s;
}

}  // namespace sosim

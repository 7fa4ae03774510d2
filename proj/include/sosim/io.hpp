#pragma once

// CSV and SVG emission, CSV network/obstacle ingestion.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "sosim/format.hpp"
#include "sosim/geometry.hpp"
#include "sosim/montecarlo.hpp"
#include "sosim/ordering.hpp"
#include "sosim/sensor.hpp"
#include "sosim/traversal.hpp"

namespace sosim {

/// Malformed input file; carries the offending line when known.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& source, int line, const std::string& what)
      : std::runtime_error(source + (line > 0 ? ":" + std::to_string(line) : std::string()) + ": " +
                           what),
        line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    out.emplace_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

/// Locale-independent real parse; accepts "inf" and fractions "p/q".
inline std::optional<double> parse_real(std::string_view text) {
  text = trim(text);
  if (text == "inf" || text == "Inf" || text == "infinity") return std::numeric_limits<double>::infinity();
  if (const auto slash = text.find('/'); slash != std::string_view::npos) {
    const auto num = parse_real(text.substr(0, slash));
    const auto den = parse_real(text.substr(slash + 1));
    if (!num || !den || *den == 0.0) return std::nullopt;
    return *num / *den;
  }
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size() || text.empty()) return std::nullopt;
  return v;
}

inline std::optional<long long> parse_integer(std::string_view text) {
  text = trim(text);
  long long v = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size() || text.empty()) return std::nullopt;
  return v;
}

inline std::ofstream open_output(const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open '" + path + "' for writing");
  return os;
}

inline void write_obstacles_csv(std::ostream& os, const std::vector<Obstacle>& obstacles) {
  os << "id,x,y,r,status,p,c\n";
  for (const Obstacle& o : obstacles) {
    os << o.id << ',' << format_number(o.disk.center.x) << ',' << format_number(o.disk.center.y)
       << ',' << format_number(o.disk.radius) << ',' << status_code(o.status) << ','
       << format_number(o.mark) << ',' << format_number(o.cost) << '\n';
  }
}

/// One row per walk vertex. `labels` maps vertex ids to printed ids
/// (identity when empty). Disambiguations made while standing at a step
/// are listed in `event` as "obstacle:status" joined by '|'.
inline void write_walk_csv(std::ostream& os, const GeometricGraph& graph, const TraversalResult& r,
                           const std::vector<long long>& labels = {}) {
  os << "step,vertex,x,y,cum_distance,event\n";
  double cum = 0.0;
  std::size_t next_event = 0;
  for (std::size_t k = 0; k < r.walk.size(); ++k) {
    const int v = r.walk[k];
    if (k > 0) cum += graph.edge(*graph.find_edge(r.walk[k - 1], v)).length;
    std::string events;
    while (next_event < r.events.size() &&
           r.events[next_event].walk_position == static_cast<int>(k)) {
      if (!events.empty()) events += '|';
      events += std::to_string(r.events[next_event].obstacle) + ':' +
                status_code(r.events[next_event].revealed);
      ++next_event;
    }
    const Point2 p = graph.position(v);
    os << k << ',' << (labels.empty() ? v : labels[static_cast<std::size_t>(v)]) << ','
       << format_number(p.x) << ',' << format_number(p.y) << ',' << format_number(cum) << ','
       << events << '\n';
  }
}

/// "distance=..., disambiguation=..., total=..."
inline std::string summary_line(const TraversalResult& r) {
  return "distance=" + format_rounded(r.distance) +
         ", disambiguation=" + format_rounded(r.disambiguation_cost) +
         ", total=" + format_rounded(r.total_cost);
}

/// "total (path + disambiguation)" decomposition.
inline std::string decomposition_line(const TraversalResult& r) {
  return format_rounded(r.total_cost) + " (" + format_rounded(r.distance) + " path + " +
         format_rounded(r.disambiguation_cost) + " disambiguation)";
}

inline void write_records_csv(std::ostream& os, const std::vector<SweepRecord>& records) {
  os << "placement,gamma,d,kappa,r0,composition,n_T,n_F,rep,seed,C,n_dis,walk_length\n";
  for (const SweepRecord& r : records) {
    os << r.placement << ',' << format_number(r.gamma) << ',' << format_number(r.d) << ','
       << format_number(r.kappa) << ',' << format_number(r.r0) << ',' << r.composition << ','
       << r.n_true << ',' << r.n_false << ',' << r.rep << ',' << r.seed << ','
       << format_number(r.total_cost) << ',' << r.n_dis << ',' << format_number(r.walk_length)
       << '\n';
  }
}

inline std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + '"';
}

inline void write_summary_csv(std::ostream& os, const std::vector<SummaryRow>& rows) {
  os << "cell,count,mean_C,var_C,min_C,max_C,range_C,mean_n_dis\n";
  for (const SummaryRow& r : rows) {
    os << csv_quote(r.cell) << ',' << r.count << ',' << format_number(r.mean_cost) << ','
       << format_number(r.variance) << ',' << format_number(r.min_cost) << ','
       << format_number(r.max_cost) << ',' << format_number(r.range) << ','
       << format_number(r.mean_n_dis) << '\n';
  }
}

inline void write_ordering_csv(std::ostream& os, const std::vector<OrderingReport>& reports) {
  os << "test,kind,x,y,holds,max_violation,tol,n_x,n_y,mean_x,mean_y,median_x,median_y\n";
  for (const OrderingReport& r : reports) {
    os << r.test << ',' << r.kind << ',' << csv_quote(r.label_x) << ',' << csv_quote(r.label_y)
       << ',' << (r.holds ? "true" : "false") << ',' << format_number(r.max_violation) << ','
       << format_number(r.tolerance) << ',' << r.n_x << ',' << r.n_y << ','
       << format_number(r.mean_x) << ',' << format_number(r.mean_y) << ','
       << format_number(r.median_x) << ',' << format_number(r.median_y) << '\n';
  }
}

inline void write_variability_csv(std::ostream& os, const std::vector<VariabilityRow>& rows) {
  os << "placement,n,mean_W,var_W,min_W,max_W,range_W\n";
  for (const VariabilityRow& r : rows) {
    os << csv_quote(r.label) << ',' << r.n << ',' << format_number(r.mean) << ','
       << format_number(r.variance) << ',' << format_number(r.min) << ','
       << format_number(r.max) << ',' << format_number(r.range) << '\n';
  }
}

/// Header-indexed CSV table; rows keep their 1-based source line numbers.
struct CsvTable {
  std::string source;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<int> lines;

  std::optional<std::size_t> column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return i;
    }
    return std::nullopt;
  }
  std::size_t require(std::string_view name) const {
    const auto c = column(name);
    if (!c) throw ParseError(source, 1, "missing column '" + std::string(name) + "'");
    return *c;
  }
};

// One CSV record; double quotes group commas and "" is a literal quote.
inline std::vector<std::string> split_csv_record(std::string_view s, const std::string& source, int lineno) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  bool was_quoted = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (quoted) {
      if (c != '"') {
        field += c;
      } else if (i + 1 < s.size() && s[i + 1] == '"') {
        field += '"';
        ++i;
      } else {
        quoted = false;
      }
    } else if (c == '"' && trim(field).empty()) {
      quoted = was_quoted = true;
      field.clear();
    } else if (c == ',') {
      out.push_back(was_quoted ? field : std::string(trim(field)));
      field.clear();
      was_quoted = false;
    } else {
      field += c;
    }
  }
  if (quoted) throw ParseError(source, lineno, "unterminated quoted field");
  out.push_back(was_quoted ? field : std::string(trim(field)));
  return out;
}

inline CsvTable read_csv(std::istream& is, const std::string& source) {
  CsvTable t;
  t.source = source;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    auto fields = split_csv_record(body, source, lineno);
    if (t.header.empty()) {
      t.header = std::move(fields);
      continue;
    }
    if (fields.size() != t.header.size()) {
      throw ParseError(source, lineno, "expected " + std::to_string(t.header.size()) +
                                           " fields, found " + std::to_string(fields.size()));
    }
    t.rows.push_back(std::move(fields));
    t.lines.push_back(lineno);
  }
  if (t.header.empty()) throw ParseError(source, 0, "empty CSV file");
  return t;
}

inline CsvTable read_csv_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open '" + path + "'");
  return read_csv(is, path);
}

/// Geometric graph loaded from node and edge tables, with original ids.
struct Network {
  std::shared_ptr<const GeometricGraph> graph;
  std::vector<long long> node_ids;  // dense index -> file id
  std::map<long long, int> index_of;

  int index(long long id) const {
    const auto it = index_of.find(id);
    if (it == index_of.end()) throw std::invalid_argument("unknown node id " + std::to_string(id));
    return it->second;
  }

  Window bounding_box() const {
    Window w{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
             std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (const Point2& p : graph->vertices()) {
      w.xmin = std::min(w.xmin, p.x);
      w.xmax = std::max(w.xmax, p.x);
      w.ymin = std::min(w.ymin, p.y);
      w.ymax = std::max(w.ymax, p.y);
    }
    return w;
  }
};

/// nodes(id, x, y) and edges(u, v[, length]); a missing or empty length is
/// the Euclidean distance between the endpoints.
inline Network load_network(const CsvTable& nodes, const CsvTable& edges) {
  Network net;
  const auto cid = nodes.require("id");
  const auto cx = nodes.require("x");
  const auto cy = nodes.require("y");
  std::vector<Point2> pts;
  for (std::size_t r = 0; r < nodes.rows.size(); ++r) {
    const auto& row = nodes.rows[r];
    const auto id = parse_integer(row[cid]);
    const auto x = parse_real(row[cx]);
    const auto y = parse_real(row[cy]);
    if (!id || !x || !y) throw ParseError(nodes.source, nodes.lines[r], "malformed node row");
    if (!std::isfinite(*x) || !std::isfinite(*y)) {
      throw ParseError(nodes.source, nodes.lines[r], "non-finite node coordinate");
    }
    if (!net.index_of.emplace(*id, static_cast<int>(pts.size())).second) {
      throw ParseError(nodes.source, nodes.lines[r], "duplicate node id " + std::to_string(*id));
    }
    net.node_ids.push_back(*id);
    pts.push_back({*x, *y});
  }
  const auto cu = edges.require("u");
  const auto cv = edges.require("v");
  const auto clen = edges.column("length");
  std::vector<Edge> list;
  std::map<std::pair<int, int>, int> seen;
  for (std::size_t r = 0; r < edges.rows.size(); ++r) {
    const auto& row = edges.rows[r];
    const int line = edges.lines[r];
    const auto u = parse_integer(row[cu]);
    const auto v = parse_integer(row[cv]);
    if (!u || !v) throw ParseError(edges.source, line, "malformed edge row");
    const auto iu = net.index_of.find(*u);
    const auto iv = net.index_of.find(*v);
    if (iu == net.index_of.end()) throw ParseError(edges.source, line, "unknown node id " + std::to_string(*u));
    if (iv == net.index_of.end()) throw ParseError(edges.source, line, "unknown node id " + std::to_string(*v));
    if (iu->second == iv->second) throw ParseError(edges.source, line, "self-loop edge");
    const auto key = std::minmax(iu->second, iv->second);
    if (!seen.emplace(key, line).second) throw ParseError(edges.source, line, "duplicate edge");
    double len = distance(pts[static_cast<std::size_t>(iu->second)], pts[static_cast<std::size_t>(iv->second)]);
    if (clen && !row[*clen].empty()) {
      const auto l = parse_real(row[*clen]);
      if (!l || !(*l > 0.0) || !std::isfinite(*l)) throw ParseError(edges.source, line, "edge length must be positive");
      len = *l;
    }
    if (!(len > 0.0)) throw ParseError(edges.source, line, "zero-length edge between coincident nodes");
    list.push_back({iu->second, iv->second, len});
  }
  net.graph = std::make_shared<const GeometricGraph>(std::move(pts), std::move(list));
  return net;
}

/// True when t is reachable from s ignoring obstacles.
inline bool connected(const GeometricGraph& g, int s, int t) {
  std::vector<char> seen(g.vertex_count(), 0);
  std::vector<int> stack{s};
  seen[static_cast<std::size_t>(s)] = 1;
  while (!stack.empty()) {
    const int u = stack.back();
    stack.pop_back();
    if (u == t) return true;
    for (const Arc& a : g.neighbors(u)) {
      if (!seen[static_cast<std::size_t>(a.to)]) {
        seen[static_cast<std::size_t>(a.to)] = 1;
        stack.push_back(a.to);
      }
    }
  }
  return false;
}

/// Manually placed obstacles: columns x, y, r, status (T/F) and optional
/// c and p. Missing c uses `default_cost`; missing p is drawn from the
/// sensor with `mark_rng`.
inline std::vector<Obstacle> load_obstacles(const CsvTable& t, double default_cost,
                                            const SensorModel& sensor, RngStream& mark_rng) {
  const auto cx = t.require("x");
  const auto cy = t.require("y");
  const auto cr = t.require("r");
  const auto cs = t.require("status");
  const auto cc = t.column("c");
  const auto cp = t.column("p");
  std::vector<Obstacle> out;
  const auto pairs = draw_mark_pairs(t.rows.size(), sensor, mark_rng);
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& row = t.rows[i];
    const int line = t.lines[i];
    Obstacle o;
    o.id = static_cast<int>(i);
    const auto x = parse_real(row[cx]);
    const auto y = parse_real(row[cy]);
    const auto r = parse_real(row[cr]);
    if (!x || !y || !r || !(*r > 0.0)) throw ParseError(t.source, line, "malformed obstacle geometry");
    o.disk = {{*x, *y}, *r};
    if (row[cs] == "T" || row[cs] == "true") {
      o.status = Status::TrueObstacle;
    } else if (row[cs] == "F" || row[cs] == "false") {
      o.status = Status::FalseObstacle;
    } else {
      throw ParseError(t.source, line, "status must be T or F");
    }
    o.cost = default_cost;
    if (cc && !row[*cc].empty()) {
      const auto c = parse_real(row[*cc]);
      if (!c || !(*c > 0.0)) throw ParseError(t.source, line, "cost must be positive");
      o.cost = *c;
    }
    o.mark = o.status == Status::TrueObstacle ? pairs[i].if_true : pairs[i].if_false;
    if (cp && !row[*cp].empty()) {
      const auto p = parse_real(row[*cp]);
      if (!p || !(*p > 0.0 && *p < 1.0)) throw ParseError(t.source, line, "p must be in (0,1)");
      o.mark = clamp_mark(*p);
    }
    out.push_back(o);
  }
  return out;
}

struct SvgOptions {
  bool draw_edges = false;  // network mode: draw every graph edge
  double scale = 6.0;
};

/// Scene drawing: true obstacles solid, false obstacles dashed, the walk as
/// a single polyline. Exactly one <circle> per obstacle.
inline void write_svg(std::ostream& os, const GeometricGraph& g, Window view,
                      const std::vector<Obstacle>& obstacles, const TraversalResult* r,
                      const SvgOptions& opt = {}) {
  for (const Obstacle& o : obstacles) {
    view.xmin = std::min(view.xmin, o.disk.center.x - o.disk.radius);
    view.xmax = std::max(view.xmax, o.disk.center.x + o.disk.radius);
    view.ymin = std::min(view.ymin, o.disk.center.y - o.disk.radius);
    view.ymax = std::max(view.ymax, o.disk.center.y + o.disk.radius);
  }
  const double pad = 0.02 * std::max(view.width(), view.height());
  const double vw = view.width() + 2 * pad;
  const double vh = view.height() + 2 * pad;
  const double unit = std::max(vw, vh) / 500.0;
  auto X = [&](double x) { return format_rounded(x - view.xmin + pad, 8); };
  auto Y = [&](double y) { return format_rounded(view.ymax - y + pad, 8); };  // y up
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << format_rounded(vw, 8) << ' '
     << format_rounded(vh, 8) << "\" width=\"" << format_rounded(vw * opt.scale * 500.0 / std::max(vw, vh) / 6.0 * 1.2, 6)
     << "\" height=\"" << format_rounded(vh * opt.scale * 500.0 / std::max(vw, vh) / 6.0 * 1.2, 6) << "\">\n";
  os << "<rect x=\"0\" y=\"0\" width=\"" << format_rounded(vw, 8) << "\" height=\""
     << format_rounded(vh, 8) << "\" fill=\"white\"/>\n";
  if (opt.draw_edges) {
    os << "<g stroke=\"#bbbbbb\" stroke-width=\"" << format_rounded(unit, 6) << "\">\n";
    for (const Edge& e : g.edges()) {
      const Point2 a = g.position(e.u);
      const Point2 b = g.position(e.v);
      os << "<line x1=\"" << X(a.x) << "\" y1=\"" << Y(a.y) << "\" x2=\"" << X(b.x) << "\" y2=\""
         << Y(b.y) << "\"/>\n";
    }
    os << "</g>\n";
  }
  for (const Obstacle& o : obstacles) {
    const bool is_true = o.status == Status::TrueObstacle;
    os << "<circle cx=\"" << X(o.disk.center.x) << "\" cy=\"" << Y(o.disk.center.y) << "\" r=\""
       << format_rounded(o.disk.radius, 8) << "\" fill=\""
       << (is_true ? "#d62728\" fill-opacity=\"0.55\"" : "none\"")
       << " stroke=\"" << (is_true ? "#d62728" : "#555555") << "\" stroke-width=\""
       << format_rounded(unit * 1.5, 6) << "\"";
    if (!is_true) os << " stroke-dasharray=\"" << format_rounded(unit * 4, 6) << ' ' << format_rounded(unit * 3, 6) << "\"";
    os << "><title>obstacle " << o.id << " " << status_code(o.status) << " p=" << format_rounded(o.mark, 4)
       << "</title></circle>\n";
  }
  if (r && !r->walk.empty()) {
    os << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"" << format_rounded(unit * 2.5, 6)
       << "\" points=\"";
    for (std::size_t k = 0; k < r->walk.size(); ++k) {
      const Point2 p = g.position(r->walk[k]);
      if (k) os << ' ';
      os << X(p.x) << ',' << Y(p.y);
    }
    os << "\"/>\n";
    const Point2 s = g.position(r->walk.front());
    const Point2 t = g.position(r->walk.back());
    const double m = unit * 8;
    for (const Point2& p : {s, t}) {
      os << "<rect x=\"" << format_rounded(p.x - view.xmin + pad - m / 2, 8) << "\" y=\""
         << format_rounded(view.ymax - p.y + pad - m / 2, 8) << "\" width=\"" << format_rounded(m, 6)
         << "\" height=\"" << format_rounded(m, 6) << "\" fill=\"black\"/>\n";
    }
  }
  os << "</svg>\n";
}

}  // namespace sosim

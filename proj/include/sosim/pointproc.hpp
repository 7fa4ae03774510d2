#pragma once

// Obstacle-center samplers: uniform (complete spatial randomness),
// conditional Strauss (regular / inhibitory) and Matérn cluster
// (aggregated). Every sampler is a pure function of its RngStream.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "sosim/geometry.hpp"
#include "sosim/rng.hpp"

namespace sosim {

/// Closed axis-aligned rectangle.
struct Window {
  double xmin = 0.0;
  double xmax = 0.0;
  double ymin = 0.0;
  double ymax = 0.0;

  void validate() const {
    if (!(xmin < xmax) || !(ymin < ymax)) {
      throw std::invalid_argument("window must satisfy xmin < xmax and ymin < ymax");
    }
  }
  bool contains(Point2 p) const noexcept {
    return p.x >= xmin && p.x <= xmax && p.y >= ymin && p.y <= ymax;
  }
  Point2 clamp(Point2 p) const noexcept {
    return {std::clamp(p.x, xmin, xmax), std::clamp(p.y, ymin, ymax)};
  }
  double width() const noexcept { return xmax - xmin; }
  double height() const noexcept { return ymax - ymin; }
  double diagonal() const noexcept { return std::hypot(width(), height()); }

  friend bool operator==(const Window&, const Window&) = default;
};

struct StraussParams {
  int n = 0;
  double d = 0.0;
  double gamma = 1.0;
  int burn_in_sweeps = 500;

  void validate() const {
    if (n <= 0) throw std::invalid_argument("Strauss n must be positive");
    if (!(d > 0.0)) throw std::invalid_argument("Strauss interaction distance must be positive");
    if (!(gamma >= 0.0 && gamma <= 1.0)) throw std::invalid_argument("Strauss gamma must be in [0,1]");
    if (burn_in_sweeps < 0) throw std::invalid_argument("burn-in sweeps must be non-negative");
  }
};

/// `n` is the exact total offspring count; the mean per parent is n / kappa.
struct MaternParams {
  int kappa = 1;
  double r0 = 1.0;
  int n = 0;

  void validate() const {
    if (kappa <= 0) throw std::invalid_argument("Matern kappa must be positive");
    if (!(r0 > 0.0)) throw std::invalid_argument("Matern cluster radius must be positive");
    if (n <= 0) throw std::invalid_argument("Matern n must be positive");
    if (kappa > n) throw std::invalid_argument("Matern kappa must not exceed n");
  }
};

inline Point2 uniform_point(const Window& w, RngStream& rng) {
  const double x = rng.uniform(w.xmin, w.xmax);
  const double y = rng.uniform(w.ymin, w.ymax);
  return {x, y};
}

inline std::vector<Point2> sample_uniform(int n, const Window& w, RngStream& rng) {
  if (n < 0) throw std::invalid_argument("point count must be non-negative");
  w.validate();
  std::vector<Point2> points;
  points.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) points.push_back(uniform_point(w, rng));
  return points;
}

/// Number of unordered pairs at distance strictly less than d.
inline long long count_close_pairs(const std::vector<Point2>& points, double d) {
  if (!(d > 0.0)) throw std::invalid_argument("interaction distance must be positive");
  const double d2 = d * d;
  long long count = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      if (squared_distance(points[i], points[j]) < d2) ++count;
    }
  }
  return count;
}

/// Metropolis acceptance for a single-site Strauss move changing the
/// close-pair count by delta: accept with probability min(1, gamma^delta).
/// With gamma = 0 this is "accept iff delta <= 0" (0^0 = 1).
inline bool strauss_accepts(double gamma, long long delta, double u) {
  if (delta <= 0) return true;
  if (gamma <= 0.0) return false;
  return u < std::pow(gamma, static_cast<double>(delta));
}

/// One proposal of the Strauss sampler, exposed for instrumentation.
struct StraussStep {
  int sweep = 0;
  int index = 0;
  Point2 from;
  Point2 to;
  long long delta = 0;
  double u = 0.0;
  bool accepted = false;
};

struct NullStraussObserver {
  void operator()(const StraussStep&) const noexcept {}
};

/// Conditional (fixed-n) Strauss process by single-site Metropolis: start
/// from n uniform points, then for each sweep propose relocating every point
/// in index order to a fresh uniform location.
template <class Observer = NullStraussObserver>
std::vector<Point2> sample_strauss(const StraussParams& p, const Window& w, RngStream& rng,
                                   Observer&& observe = Observer{}) {
  p.validate();
  std::vector<Point2> points = sample_uniform(p.n, w, rng);
  const double d2 = p.d * p.d;
  auto close_to = [&](Point2 q, std::size_t skip) {
    long long c = 0;
    for (std::size_t j = 0; j < points.size(); ++j) {
      if (j != skip && squared_distance(points[j], q) < d2) ++c;
    }
    return c;
  };
  for (int sweep = 0; sweep < p.burn_in_sweeps; ++sweep) {
    for (std::size_t i = 0; i < points.size(); ++i) {
      const Point2 proposal = uniform_point(w, rng);
      const double u = rng.uniform();
      const long long delta = close_to(proposal, i) - close_to(points[i], i);
      const bool accepted = strauss_accepts(p.gamma, delta, u);
      observe(StraussStep{sweep, static_cast<int>(i), points[i], proposal, delta, u, accepted});
      if (accepted) points[i] = proposal;
    }
  }
  return points;
}

struct MaternSample {
  std::vector<Point2> points;
  std::vector<Point2> parents;
  std::vector<int> parent_of;  // parent index per offspring
};

/// Matérn cluster with exact total count: kappa uniform parents, each
/// offspring picks a parent uniformly and lands uniformly in the disk of
/// radius r0 around it. Candidates outside the window are redrawn up to
/// 1000 times, then clamped into the window.
inline MaternSample sample_matern_detailed(const MaternParams& p, const Window& w,
                                           RngStream& rng) {
  p.validate();
  w.validate();
  constexpr int kMaxRetries = 1000;
  MaternSample out;
  out.parents = sample_uniform(p.kappa, w, rng);
  out.points.reserve(static_cast<std::size_t>(p.n));
  out.parent_of.reserve(static_cast<std::size_t>(p.n));
  for (int k = 0; k < p.n; ++k) {
    const auto parent = static_cast<int>(rng.below(static_cast<std::uint64_t>(p.kappa)));
    const Point2 c = out.parents[static_cast<std::size_t>(parent)];
    Point2 q;
    bool inside = false;
    for (int attempt = 0; attempt < kMaxRetries && !inside; ++attempt) {
      const double rad = p.r0 * std::sqrt(rng.uniform());
      const double theta = 2.0 * std::numbers::pi * rng.uniform();
      q = {c.x + rad * std::cos(theta), c.y + rad * std::sin(theta)};
      inside = w.contains(q);
    }
    out.points.push_back(inside ? q : w.clamp(q));
    out.parent_of.push_back(parent);
  }
  return out;
}

inline std::vector<Point2> sample_matern(const MaternParams& p, const Window& w, RngStream& rng) {
  return sample_matern_detailed(p, w, rng).points;
}

/// Mean distance from each point to its nearest neighbor.
inline double mean_nearest_neighbor(const std::vector<Point2>& points) {
  if (points.size() < 2) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < points.size(); ++j) {
      if (i != j) best = std::min(best, squared_distance(points[i], points[j]));
    }
    total += std::sqrt(best);
  }
  return total / static_cast<double>(points.size());
}

}  // namespace sosim

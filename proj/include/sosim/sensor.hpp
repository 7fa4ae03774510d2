#pragma once

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sosim/geometry.hpp"
#include "sosim/rng.hpp"

namespace sosim {

enum class Status { TrueObstacle, FalseObstacle };
enum class Knowledge { Ambiguous, KnownTrue, KnownFalse };

inline char status_code(Status s) noexcept { return s == Status::TrueObstacle ? 'T' : 'F'; }

/// Marks are kept away from 0 and 1 so c / (1 - p) stays finite.
inline constexpr double kMarkEpsilon = 1e-9;

struct Obstacle {
  int id = 0;
  Disk disk;
  Status status = Status::FalseObstacle;
  double mark = 0.5;
  double cost = 5.0;
  Knowledge knowledge = Knowledge::Ambiguous;
};

/// False marks ~ Beta(a, b); true marks ~ Beta(b, a).
struct SensorModel {
  double a = 2.0;
  double b = 6.0;

  void validate() const {
    if (!(a > 0.0) || !(b > 0.0)) {
      throw std::invalid_argument("Beta shape parameters must be positive");
    }
  }
  bool discriminating() const noexcept { return a < b; }

  friend bool operator==(const SensorModel&, const SensorModel&) = default;
};

/// Writes a warning for a sensor that does not separate true from false.
inline void warn_if_non_discriminating(const SensorModel& m, std::ostream& os = std::cerr) {
  if (!m.discriminating()) {
    os << "warning: sensor Beta(" << m.a << "," << m.b
       << ") has a >= b; false marks are not stochastically smaller than true marks\n";
  }
}

/// Gamma(shape, 1) by Marsaglia and Tsang; shapes below 1 use the
/// U^(1/shape) boost.
inline double gamma_sample(double shape, RngStream& rng) {
  if (!(shape > 0.0)) throw std::invalid_argument("Gamma shape must be positive");
  if (shape < 1.0) {
    const double g = gamma_sample(shape + 1.0, rng);
    return g * std::pow(rng.uniform_open(), 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x = 0.0;
    double v = 0.0;
    do {
      x = rng.normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform_open();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

inline double clamp_mark(double p) noexcept {
  return std::clamp(p, kMarkEpsilon, 1.0 - kMarkEpsilon);
}

/// One Beta(a, b) variate as X / (X + Y) with X ~ Gamma(a), Y ~ Gamma(b),
/// clamped to [eps, 1 - eps].
inline double beta_sample(double a, double b, RngStream& rng) {
  if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("Beta shape parameters must be positive");
  const double x = gamma_sample(a, rng);
  const double y = gamma_sample(b, rng);
  const double s = x + y;
  if (!(s > 0.0)) return clamp_mark(0.5);
  return clamp_mark(x / s);
}

/// Both candidate marks for one obstacle, drawn false-first.
struct MarkPair {
  double if_false = 0.5;
  double if_true = 0.5;
};

/// Per obstacle, draws a Beta(a,b) mark and a Beta(b,a) mark in that order.
/// The mark an obstacle receives therefore depends only on its index and its
/// status, so scenes that differ only in statuses share mark draws.
inline std::vector<MarkPair> draw_mark_pairs(std::size_t count, const SensorModel& model,
                                             RngStream& rng) {
  model.validate();
  std::vector<MarkPair> pairs(count);
  for (auto& p : pairs) {
    p.if_false = beta_sample(model.a, model.b, rng);
    p.if_true = beta_sample(model.b, model.a, rng);
  }
  return pairs;
}

/// Sets each obstacle's mark from its status (false ~ Beta(a,b), true ~
/// Beta(b,a)) and resets knowledge to Ambiguous. Costs are untouched.
inline std::vector<Obstacle> assign_marks(std::vector<Obstacle> obstacles,
                                          const SensorModel& model, RngStream& rng) {
  const auto pairs = draw_mark_pairs(obstacles.size(), model, rng);
  for (std::size_t i = 0; i < obstacles.size(); ++i) {
    Obstacle& o = obstacles[i];
    o.mark = o.status == Status::TrueObstacle ? pairs[i].if_true : pairs[i].if_false;
    o.knowledge = Knowledge::Ambiguous;
  }
  return obstacles;
}

namespace detail {

// Modified Lentz evaluation of the incomplete beta continued fraction.
inline double ibeta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIterations = 10000;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) return h;
  }
  return h;
}

}  // namespace detail

/// Regularized incomplete beta I_x(a, b): the Beta(a, b) CDF at x.
inline double beta_cdf(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("Beta shape parameters must be positive");
  if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument("beta_cdf argument outside [0,1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                           a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  double result = 0.0;
  if (x < (a + 1.0) / (a + b + 2.0)) {
    result = front * detail::ibeta_continued_fraction(a, b, x) / a;
  } else {
    result = 1.0 - front * detail::ibeta_continued_fraction(b, a, 1.0 - x) / b;
  }
  return std::clamp(result, 0.0, 1.0);
}

}  // namespace sosim

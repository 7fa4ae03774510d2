#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

namespace sosim {

/// Pearson correlation needs variation in both samples.
class UndefinedCorrelation : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

inline double mean(std::span<const double> xs) {
  if (xs.empty()) throw std::invalid_argument("mean of empty sample");
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

/// Unbiased sample variance; 0 for a single value.
inline double variance(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return ss / static_cast<double>(xs.size() - 1);
}

inline double median(std::span<const double> xs) {
  if (xs.empty()) throw std::invalid_argument("median of empty sample");
  std::vector<double> v(xs.begin(), xs.end());
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

/// Standard error of mean(a) - mean(b) for independent samples.
inline double standard_error_of_difference(std::span<const double> a, std::span<const double> b) {
  return std::sqrt(variance(a) / static_cast<double>(a.size()) +
                   variance(b) / static_cast<double>(b.size()));
}

inline double pearson_corr(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw std::invalid_argument("pearson_corr: length mismatch");
  if (xs.size() < 2) throw std::invalid_argument("pearson_corr: need at least two points");
  const double mx = mean(xs);
  const double my = mean(ys);
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw UndefinedCorrelation("pearson_corr: zero variance");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

}  // namespace sosim

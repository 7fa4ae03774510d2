#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "sosim/pointproc.hpp"
#include "sosim/rng.hpp"

using namespace sosim;

namespace {
const Window kWindow{10, 90, 10, 90};
}

TEST(Rng, StreamsAreDeterministicAndDistinct) {
  RngStream a(42, 1);
  RngStream b(42, 1);
  RngStream c(42, 2);
  RngStream d(43, 1);
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    EXPECT_EQ(x, b.next_u64());
    EXPECT_NE(x, c.next_u64());
    EXPECT_NE(x, d.next_u64());
  }
}

TEST(Rng, UniformAndBelowRanges) {
  RngStream r(1, 0);
  std::vector<int> counts(7, 0);
  for (int i = 0; i < 70000; ++i) {
    const double u = r.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    const double o = r.uniform_open();
    ASSERT_GT(o, 0.0);
    ASSERT_LT(o, 1.0);
    ++counts[r.below(7)];
  }
  for (int c : counts) EXPECT_NEAR(c, 10000, 500);
  EXPECT_EQ(r.below(1), 0u);
}

TEST(Rng, NormalMoments) {
  RngStream r(9, 0);
  double s = 0;
  double s2 = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double z = r.normal();
    s += z;
    s2 += z * z;
  }
  EXPECT_NEAR(s / n, 0.0, 0.01);
  EXPECT_NEAR(s2 / n, 1.0, 0.015);
}

TEST(Rng, HashHelpers) {
  EXPECT_NE(hash_combine(1, 2), hash_combine(2, 1));
  EXPECT_EQ(fnv1a(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a("a"), 0xaf63dc4c8601ec8cULL);
}

TEST(Window, ContainsAndClamp) {
  EXPECT_TRUE(kWindow.contains({10, 90}));
  EXPECT_FALSE(kWindow.contains({9.999, 50}));
  EXPECT_EQ(kWindow.clamp({0, 100}), (Point2{10, 90}));
  EXPECT_THROW((Window{5, 1, 0, 1}.validate()), std::invalid_argument);
}

TEST(Uniform, SupportAndMean) {
  RngStream rng(2, 0);
  EXPECT_TRUE(sample_uniform(0, kWindow, rng).empty());
  for (const Point2& p : sample_uniform(100, kWindow, rng)) EXPECT_TRUE(kWindow.contains(p));
  const auto pts = sample_uniform(100000, kWindow, rng);
  double sx = 0;
  for (const Point2& p : pts) sx += p.x;
  EXPECT_NEAR(sx / static_cast<double>(pts.size()), 50.0, 0.3);
  EXPECT_THROW(sample_uniform(-1, kWindow, rng), std::invalid_argument);
}

TEST(PairCount, Examples) {
  EXPECT_EQ(count_close_pairs({{0, 0}, {1, 0}, {3, 0}}, 1.5), 1);
  EXPECT_EQ(count_close_pairs({{4, 4}}, 10), 0);
  EXPECT_EQ(count_close_pairs({{1, 1}, {1, 1}, {1, 1}, {1, 1}}, 0.5), 6);
  // Strict inequality: a pair at exactly d is not close.
  EXPECT_EQ(count_close_pairs({{0, 0}, {2, 0}}, 2.0), 0);
}

TEST(Strauss, AcceptanceRule) {
  EXPECT_TRUE(strauss_accepts(0.0, 0, 0.99));
  EXPECT_TRUE(strauss_accepts(0.0, -3, 0.99));
  EXPECT_FALSE(strauss_accepts(0.0, 1, 0.0));
  EXPECT_TRUE(strauss_accepts(0.5, 2, 0.24));
  EXPECT_FALSE(strauss_accepts(0.5, 2, 0.25));
  EXPECT_TRUE(strauss_accepts(1.0, 100, 0.999999));
}

TEST(Strauss, InstrumentedStepsFollowTheRule) {
  RngStream rng(7, 0);
  const StraussParams p{30, 7.0, 0.5, 20};
  std::size_t steps = 0;
  std::size_t accepted = 0;
  const auto pts = sample_strauss(p, kWindow, rng, [&](const StraussStep& s) {
    ++steps;
    accepted += s.accepted;
    const bool expect = s.delta <= 0 || s.u < std::pow(0.5, static_cast<double>(s.delta));
    EXPECT_EQ(s.accepted, expect);
    EXPECT_TRUE(kWindow.contains(s.to));
  });
  EXPECT_EQ(steps, 30u * 20u);
  EXPECT_GT(accepted, 0u);
  EXPECT_EQ(pts.size(), 30u);
}

TEST(Strauss, GammaOneAcceptsEverything) {
  RngStream rng(8, 0);
  bool all = true;
  sample_strauss(StraussParams{25, 9.0, 1.0, 10}, kWindow, rng, [&](const StraussStep& s) { all = all && s.accepted; });
  EXPECT_TRUE(all);
}

TEST(Strauss, HardCorePacking) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    RngStream rng(seed, 0);
    const auto pts = sample_strauss(StraussParams{10, 7.0, 0.0, 500}, kWindow, rng);
    EXPECT_EQ(count_close_pairs(pts, 7.0), 0);
    for (const Point2& q : pts) EXPECT_TRUE(kWindow.contains(q));
  }
}

TEST(Strauss, PairCountDecreasesWithGamma) {
  double previous = std::numeric_limits<double>::infinity();
  for (double gamma : {1.0, 0.5, 0.0}) {
    double total = 0;
    for (int k = 0; k < 200; ++k) {
      RngStream rng(static_cast<std::uint64_t>(k), 77);
      total += static_cast<double>(count_close_pairs(sample_strauss(StraussParams{50, 7.0, gamma, 100}, kWindow, rng), 7.0));
    }
    const double m = total / 200.0;
    EXPECT_LT(m, previous) << "gamma=" << gamma;
    previous = m;
  }
}

TEST(Strauss, ValidatesParameters) {
  RngStream rng(0, 0);
  EXPECT_THROW(sample_strauss(StraussParams{5, 7.0, 1.5, 10}, kWindow, rng), std::invalid_argument);
  EXPECT_THROW(sample_strauss(StraussParams{5, -1.0, 0.5, 10}, kWindow, rng), std::invalid_argument);
  EXPECT_THROW(sample_strauss(StraussParams{5, 7.0, 0.5, -1}, kWindow, rng), std::invalid_argument);
}

TEST(Matern, DegenerateCluster) {
  RngStream rng(4, 0);
  const auto pts = sample_matern(MaternParams{1, 0.001, 20}, kWindow, rng);
  ASSERT_EQ(pts.size(), 20u);
  for (const Point2& a : pts) {
    for (const Point2& b : pts) EXPECT_LE(distance(a, b), 0.002);
  }
}

TEST(Matern, OffspringStayNearParents) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    RngStream rng(seed, 5);
    const auto s = sample_matern_detailed(MaternParams{2, 15.0, 20}, kWindow, rng);
    ASSERT_EQ(s.points.size(), 20u);
    ASSERT_EQ(s.parents.size(), 2u);
    for (std::size_t i = 0; i < s.points.size(); ++i) {
      EXPECT_TRUE(kWindow.contains(s.points[i]));
      bool near = false;
      for (const Point2& p : s.parents) near = near || distance(p, s.points[i]) <= 15.0 + 1e-12;
      EXPECT_TRUE(near);
      EXPECT_LE(distance(s.parents[static_cast<std::size_t>(s.parent_of[i])], s.points[i]), 15.0 + 1e-12);
    }
  }
}

TEST(Matern, WideClustersLookUniform) {
  double nn_matern = 0;
  double nn_uniform = 0;
  for (int k = 0; k < 200; ++k) {
    RngStream a(static_cast<std::uint64_t>(k), 1);
    RngStream b(static_cast<std::uint64_t>(k), 2);
    nn_matern += mean_nearest_neighbor(sample_matern(MaternParams{2, kWindow.diagonal() * 1.5, 50}, kWindow, a));
    nn_uniform += mean_nearest_neighbor(sample_uniform(50, kWindow, b));
  }
  EXPECT_NEAR(nn_matern / nn_uniform, 1.0, 0.10);
}

TEST(Matern, ValidatesParameters) {
  RngStream rng(0, 0);
  EXPECT_THROW(sample_matern(MaternParams{0, 5, 10}, kWindow, rng), std::invalid_argument);
  EXPECT_THROW(sample_matern(MaternParams{11, 5, 10}, kWindow, rng), std::invalid_argument);
  EXPECT_THROW(sample_matern(MaternParams{2, -1, 10}, kWindow, rng), std::invalid_argument);
}

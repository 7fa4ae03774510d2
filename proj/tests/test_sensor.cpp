#include <gtest/gtest.h>

#include <algorithm>
#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <sstream>

#include "oracles.hpp"
#include "sosim/sensor.hpp"

using namespace sosim;

TEST(BetaCdf, Examples) {
  EXPECT_NEAR(beta_cdf(1, 1, 0.3), 0.3, 1e-15);
  EXPECT_NEAR(beta_cdf(2, 2, 0.5), 0.5, 1e-15);
  EXPECT_EQ(beta_cdf(2, 6, 0.0), 0.0);
  EXPECT_EQ(beta_cdf(2, 6, 1.0), 1.0);
  EXPECT_THROW(beta_cdf(0, 1, 0.5), std::invalid_argument);
  EXPECT_THROW(beta_cdf(1, 1, 1.5), std::invalid_argument);
}

TEST(BetaCdf, IntegerShapesMatchBinomialSum) {
  for (int a = 1; a <= 12; ++a) {
    for (int b = 1; b <= 12; ++b) {
      for (int i = 1; i < 100; ++i) {
        const double x = i / 100.0;
        EXPECT_NEAR(beta_cdf(a, b, x), oracle::beta_cdf_integer(a, b, x), 1e-12) << a << "," << b << "," << x;
      }
    }
  }
}

TEST(BetaCdf, RealShapesMatchReference) {
  for (double a : {0.3, 0.5, 1.7, 2.5, 7.25, 30.0}) {
    for (double b : {0.4, 1.0, 3.3, 9.5, 45.0}) {
      for (int i = 1; i < 50; ++i) {
        const double x = i / 50.0;
        EXPECT_NEAR(beta_cdf(a, b, x), boost::math::ibeta(a, b, x), 1e-12) << a << "," << b << "," << x;
      }
    }
  }
}

TEST(BetaCdf, ReflectionIdentity) {
  for (double a : {0.7, 2.0, 6.0}) {
    for (double b : {1.3, 2.0, 6.0}) {
      for (int i = 0; i <= 20; ++i) {
        const double x = i / 20.0;
        EXPECT_NEAR(beta_cdf(a, b, x), 1.0 - beta_cdf(b, a, 1.0 - x), 1e-13);
      }
    }
  }
}

TEST(BetaCdf, Monotone) {
  double prev = 0.0;
  for (int i = 0; i <= 1000; ++i) {
    const double v = beta_cdf(2.0, 6.0, i / 1000.0);
    EXPECT_GE(v, prev);
    prev = v;
  }
}

TEST(BetaSample, UniformKolmogorovSmirnov) {
  RngStream rng(21, 0);
  std::vector<double> xs(100000);
  for (double& x : xs) x = beta_sample(1, 1, rng);
  std::sort(xs.begin(), xs.end());
  double ks = 0;
  const double n = static_cast<double>(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    ks = std::max({ks, std::abs((i + 1) / n - xs[i]), std::abs(xs[i] - i / n)});
  }
  EXPECT_LT(ks, 0.01);
}

TEST(BetaSample, MeansAndRange) {
  for (auto [a, b, m] : {std::tuple{2.0, 6.0, 0.25}, std::tuple{6.0, 2.0, 0.75}, std::tuple{0.5, 0.5, 0.5}}) {
    RngStream rng(3, 0);
    double s = 0;
    for (int i = 0; i < 100000; ++i) {
      const double x = beta_sample(a, b, rng);
      ASSERT_GE(x, kMarkEpsilon);
      ASSERT_LE(x, 1.0 - kMarkEpsilon);
      s += x;
    }
    EXPECT_NEAR(s / 100000.0, m, 0.005);
  }
}

TEST(BetaSample, MatchesCdfAtQuantiles) {
  RngStream rng(17, 0);
  std::vector<double> xs(50000);
  for (double& x : xs) x = beta_sample(2.5, 4.0, rng);
  for (double q : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    const double frac = static_cast<double>(std::count_if(xs.begin(), xs.end(), [&](double x) { return x <= q; })) / 50000.0;
    EXPECT_NEAR(frac, beta_cdf(2.5, 4.0, q), 0.01);
  }
}

TEST(BetaSample, RejectsBadShapes) {
  RngStream rng(0, 0);
  EXPECT_THROW(beta_sample(0, 1, rng), std::invalid_argument);
  EXPECT_THROW(beta_sample(1, -2, rng), std::invalid_argument);
  EXPECT_THROW(gamma_sample(0, rng), std::invalid_argument);
}

TEST(Sensor, AssignMarks) {
  RngStream rng(1, 3);
  EXPECT_TRUE(assign_marks({}, SensorModel{}, rng).empty());
  std::vector<Obstacle> field(10000);
  for (std::size_t i = 0; i < field.size(); ++i) {
    field[i].id = static_cast<int>(i);
    field[i].knowledge = Knowledge::KnownTrue;
  }
  const auto marked = assign_marks(field, SensorModel{2, 6}, rng);
  double s = 0;
  for (const Obstacle& o : marked) {
    s += o.mark;
    EXPECT_EQ(o.knowledge, Knowledge::Ambiguous);
  }
  EXPECT_NEAR(s / 10000.0, 0.25, 0.015);
}

TEST(Sensor, MixedFieldSeparatesStatuses) {
  RngStream rng(2, 3);
  std::vector<Obstacle> field(1000);
  for (std::size_t i = 0; i < field.size(); ++i) field[i].status = i % 2 ? Status::TrueObstacle : Status::FalseObstacle;
  const auto marked = assign_marks(field, SensorModel{2, 6}, rng);
  double st = 0;
  double sf = 0;
  for (const Obstacle& o : marked) (o.status == Status::TrueObstacle ? st : sf) += o.mark;
  EXPECT_GT(st / 500.0, sf / 500.0);
  EXPECT_NEAR(st / 500.0, 0.75, 0.03);
}

TEST(Sensor, MarkDependsOnlyOnIndexAndStatus) {
  std::vector<Obstacle> a(50);
  std::vector<Obstacle> b(50);
  for (std::size_t i = 0; i < 50; ++i) b[i].status = i % 3 ? Status::FalseObstacle : Status::TrueObstacle;
  RngStream r1(5, 3);
  RngStream r2(5, 3);
  const auto ma = assign_marks(a, SensorModel{}, r1);
  const auto mb = assign_marks(b, SensorModel{}, r2);
  for (std::size_t i = 0; i < 50; ++i) {
    if (b[i].status == Status::FalseObstacle) {
      EXPECT_EQ(ma[i].mark, mb[i].mark);
    }
  }
}

TEST(Sensor, NonDiscriminatingWarning) {
  std::ostringstream os;
  warn_if_non_discriminating(SensorModel{2, 6}, os);
  EXPECT_TRUE(os.str().empty());
  warn_if_non_discriminating(SensorModel{6, 2}, os);
  EXPECT_NE(os.str().find("warning"), std::string::npos);
  EXPECT_THROW((SensorModel{0, 1}.validate()), std::invalid_argument);
}

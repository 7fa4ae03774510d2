#include <gtest/gtest.h>

#include "sosim/ordering.hpp"

using namespace sosim;

namespace {

OrderingSetup small_setup(int reps = 300) {
  OrderingSetup s;
  s.reps = reps;
  s.seed = 3;
  return s;
}

}  // namespace

TEST(Dominance, Examples) {
  const std::vector<double> x{1, 2, 3};
  const std::vector<double> y{2, 3, 4};
  EXPECT_TRUE(dominates_st(x, y, 0).holds);
  EXPECT_TRUE(dominates_st(x, x, 0).holds);
  EXPECT_LE(dominates_st(x, x, 0).max_violation, 0.0);
  const auto r = dominates_st(std::vector<double>{5}, std::vector<double>{1}, 0);
  EXPECT_FALSE(r.holds);
  EXPECT_DOUBLE_EQ(r.max_violation, 1.0);
  EXPECT_FALSE(dominates_st(y, x, 0).holds);
  EXPECT_TRUE(dominates_st(y, x, 1.0).holds);
  EXPECT_THROW(dominates_st(std::vector<double>{}, x, 0), std::invalid_argument);
}

TEST(Dominance, ReportsMeansAndMedians) {
  const auto r = dominates_st(std::vector<double>{1, 2, 3, 10}, std::vector<double>{2, 4}, 0.1, "a", "b");
  EXPECT_EQ(r.label_x, "a");
  EXPECT_DOUBLE_EQ(r.mean_x, 4.0);
  EXPECT_DOUBLE_EQ(r.median_x, 2.5);
  EXPECT_DOUBLE_EQ(r.mean_y, 3.0);
  EXPECT_EQ(r.n_x, 4u);
}

TEST(Ecdf, Values) {
  const Ecdf f({3, 1, 2, 2});
  EXPECT_EQ(f(0.5), 0.0);
  EXPECT_EQ(f(2), 0.75);
  EXPECT_EQ(f(3), 1.0);
}

TEST(Ordering, PathMissesEverything) {
  OrderingSetup s = small_setup(20);
  s.insertion_window = {70, 90, 10, 90};  // far from the x = 50 column
  const auto c = coupled_composition_samples(s);
  for (int i = 0; i < s.reps; ++i) {
    EXPECT_EQ(c.false_only[static_cast<std::size_t>(i)], 99.0);
    EXPECT_EQ(c.mixed[static_cast<std::size_t>(i)], 99.0);
    EXPECT_EQ(c.true_only[static_cast<std::size_t>(i)], 99.0);
  }
}

TEST(Ordering, CoupledCompositionIsPathwiseOrdered) {
  const OrderingSetup s = small_setup();
  const auto c = coupled_composition_samples(s);
  EXPECT_GT(pairwise_probability(c.false_only, c.mixed), 0.5);
  EXPECT_LT(mean(c.false_only), mean(c.mixed));
  EXPECT_LT(mean(c.mixed), mean(c.true_only));
}

TEST(Ordering, RatioEndpoints) {
  const OrderingSetup s = small_setup(50);
  const auto comp = coupled_composition_samples(s);
  const auto sweep = ratio_sweep_samples(s, {0.0, 1.0, std::numeric_limits<double>::infinity()});
  EXPECT_EQ(sweep[0], comp.false_only);
  EXPECT_EQ(sweep[1], comp.mixed);
  EXPECT_EQ(sweep[2], comp.true_only);
  EXPECT_EQ(true_count_for_ratio(1.0 / 3.0, 40), 10);
  EXPECT_EQ(true_count_for_ratio(3.0, 40), 30);
  EXPECT_THROW(true_count_for_ratio(-1, 40), std::invalid_argument);
  EXPECT_THROW(true_count_for_ratio(1e-6, 40), std::invalid_argument);
  EXPECT_THROW(true_count_for_ratio(1e9, 40), std::invalid_argument);
}

TEST(Ordering, IdenticalSensorsGiveIdenticalSamples) {
  const OrderingSetup s = small_setup(50);
  const auto [a, b] = sensor_fidelity_samples(s, SensorModel{2, 6}, SensorModel{2, 6}, CompositionKind::FalseOnly);
  EXPECT_EQ(a, b);
  EXPECT_TRUE(dominates_st(a, b, 0).holds);
  EXPECT_TRUE(dominates_st(b, a, 0).holds);
  EXPECT_THROW(sensor_fidelity_samples(s, SensorModel{3, 5}, SensorModel{2, 6}, CompositionKind::FalseOnly), std::invalid_argument);
  EXPECT_THROW(sensor_fidelity_samples(s, SensorModel{2, 6}, SensorModel{3, 5}, CompositionKind::Mixed), std::invalid_argument);
}

TEST(Ordering, FalseSensorFidelity) {
  const OrderingSetup s = small_setup(2000);
  const auto [sharp, flat] = sensor_fidelity_samples(s, SensorModel{2, 6}, SensorModel{3, 5}, CompositionKind::FalseOnly);
  EXPECT_TRUE(dominates_st(sharp, flat, 0.05).holds);
  EXPECT_LT(mean(sharp), mean(flat));
}

TEST(BetaSums, Checks) {
  const auto r1 = beta_sum_check({2, 6}, {6, 2}, 1, 2000, 0.05);
  EXPECT_TRUE(r1.holds);
  const auto deg = beta_sum_check({2, 6}, {2, 6}, 5, 500, 0.0);
  EXPECT_TRUE(deg.holds);
  EXPECT_EQ(deg.max_violation, 0.0);
  EXPECT_TRUE(beta_sum_check({2, 6}, {6, 2}, 5, 2000, 0.02).holds);
}

TEST(BetaReflection, Analytic) {
  for (auto [a, b] : {std::pair{2.0, 6.0}, std::pair{1.0, 3.0}, std::pair{3.0, 9.0}}) {
    const auto r = reflection_check(a, b);
    EXPECT_TRUE(r.holds);
    EXPECT_LE(r.max_violation, 1e-10);
    EXPECT_EQ(r.kind, "analytic");
  }
  EXPECT_FALSE(reflection_check(6, 2).holds);
}

TEST(Variability, ShapeAndDegenerateCases) {
  OrderingSetup s = small_setup(1);
  s.n_o = 50;
  const std::vector<std::pair<std::string, Placement>> three{
      {"strauss", StraussPlacement{7, 0, 500}}, {"uniform", UniformPlacement{}}, {"matern", MaternPlacement{2, 5}}};
  const auto single = variability_experiment(s, three);
  ASSERT_EQ(single.size(), 3u);
  for (const auto& row : single) EXPECT_EQ(row.range, 0.0);

  s.reps = 30;
  const auto same = variability_experiment(s, {{"a", UniformPlacement{}}, {"b", UniformPlacement{}}});
  EXPECT_EQ(same[0].mean, same[1].mean);
  EXPECT_EQ(same[0].variance, same[1].variance);
}

TEST(RdComposition, RealizedCostsAreBounded) {
  OrderingSetup s = small_setup(10);
  const auto c = rd_composition_samples(s);
  ASSERT_EQ(c.false_only.size(), 10u);
  for (std::size_t i = 0; i < 10; ++i) {
    EXPECT_GE(c.false_only[i], 99.0);
    EXPECT_GE(c.true_only[i], 99.0);
  }
}

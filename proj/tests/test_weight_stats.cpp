#include <gtest/gtest.h>

#include <Eigen/Dense>

#include "test_util.hpp"

using namespace scn2d;

TEST(SampleWeight, ScalarProductMethodsCoincide) {
  // with one entry both the product and the outer-product draws are a*b
  for (auto dist : {WeightDist::uniform_pm1, WeightDist::standard_normal}) {
    for (std::uint64_t s = 0; s < 20; ++s) {
      Rng a(s), b(s);
      EXPECT_EQ(sample_weight(SamplingMethod::m3, 1, 1, dist, a), sample_weight(SamplingMethod::m2, 1, 1, dist, b));
    }
  }
}

TEST(SampleWeight, UniformMomentsOfM1) {
  Rng rng(1);
  double s = 0, s2 = 0;
  std::size_t n = 0;
  for (int k = 0; k < 200; ++k)
    for (double x : sample_weight(SamplingMethod::m1, 28, 28, WeightDist::uniform_pm1, rng)) {
      ASSERT_LE(std::abs(x), 1.0);
      s += x;
      s2 += x * x;
      ++n;
    }
  EXPECT_NEAR(s / double(n), 0.0, 0.01);
  EXPECT_NEAR(s2 / double(n), 1.0 / 3.0, 0.01);
}

TEST(SampleWeight, OuterProductHasRankOne) {
  Rng rng(2);
  for (int k = 0; k < 10; ++k) {
    const Vector w = sample_weight(SamplingMethod::m3, 6, 5, WeightDist::standard_normal, rng);
    Eigen::MatrixXd m(6, 5);
    for (std::size_t j = 0; j < 5; ++j)
      for (std::size_t i = 0; i < 6; ++i) m(i, j) = w[j * 6 + i];
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    svd.setThreshold(1e-12);
    EXPECT_EQ(svd.rank(), 1);
  }
}

TEST(SmallFraction, Cases) {
  EXPECT_EQ(small_fraction(std::vector<double>{0.005, 0.5, 0.009, 2.0}, 0.01), 0.5);
  EXPECT_EQ(small_fraction(std::vector<double>{-0.01, 0.01}, 0.01), 1.0);
  EXPECT_EQ(small_fraction(std::vector<double>{}, 0.01), 0.0);
}

// Scaling the weights and the threshold together leaves the fraction unchanged.
TEST(SmallFraction, ScaleCovariance) {
  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 50; ++rep) {
    const Vector w = scn2d::testing::random_vector(64, rng);
    for (double c : {0.5, 2.0, 8.0}) {
      Vector cw = w;
      for (auto& x : cw) x *= c;
      EXPECT_EQ(small_fraction(cw, 0.1 * c), small_fraction(w, 0.1));
    }
  }
}

TEST(Estimate, BoundsDeterminismAndStdError) {
  StatsSpec spec;
  spec.trials = 2000;
  spec.seed = 11;
  for (auto m : {SamplingMethod::m1, SamplingMethod::m2, SamplingMethod::m3}) {
    const auto e = estimate_probability(m, spec);
    EXPECT_GE(e.p_hat, 0.0);
    EXPECT_LE(e.p_hat, 1.0);
    EXPECT_EQ(e.trials, 2000u);
    EXPECT_DOUBLE_EQ(e.std_error, std::sqrt(e.p_hat * (1 - e.p_hat) / 2000.0));
    const auto again = estimate_probability(m, spec, 3);
    EXPECT_EQ(again.hits, e.hits);
  }
}

TEST(Estimate, GridCellMatchesSingleEstimate) {
  const std::vector<double> ps{0.06, 0.08, 0.1}, taus{0.001, 0.005, 0.01};
  const StatsGrid g = estimate_grid(WeightDist::uniform_pm1, 10, 12, ps, taus, 1500, 5, 2);
  for (auto m : {SamplingMethod::m1, SamplingMethod::m2, SamplingMethod::m3})
    for (std::size_t pi = 0; pi < ps.size(); ++pi)
      for (std::size_t ti = 0; ti < taus.size(); ++ti) {
        const StatsSpec spec{10, 12, WeightDist::uniform_pm1, taus[ti], ps[pi], 1500, 5};
        EXPECT_EQ(g.at(m, pi, ti).hits, estimate_probability(m, spec).hits);
      }
}

TEST(Estimate, TinyThresholdFractionIsAlmostSure) {
  // with p = 1/(2d) a single small entry suffices; for the outer product one
  // small factor entry zeroes a whole row, so that is essentially certain
  StatsSpec spec{28, 28, WeightDist::uniform_pm1, 0.05, 1.0 / (2 * 784.0), 3000, 2};
  EXPECT_GT(estimate_probability(SamplingMethod::m3, spec).p_hat, 0.95);
  EXPECT_GT(estimate_probability(SamplingMethod::m1, spec).p_hat, 0.95);
}

TEST(Estimate, OrderingAtReducedTrials) {
  for (auto dist : {WeightDist::uniform_pm1, WeightDist::standard_normal}) {
    const std::vector<double> ps{0.06, 0.08}, taus{0.005, 0.01};
    const StatsGrid g = estimate_grid(dist, 28, 28, ps, taus, 5000, 9);
    for (std::size_t pi = 0; pi < ps.size(); ++pi)
      for (std::size_t ti = 0; ti < taus.size(); ++ti) {
        EXPECT_GE(g.at(SamplingMethod::m3, pi, ti).p_hat, g.at(SamplingMethod::m2, pi, ti).p_hat);
        EXPECT_GE(g.at(SamplingMethod::m2, pi, ti).p_hat, g.at(SamplingMethod::m1, pi, ti).p_hat);
      }
  }
}

TEST(Estimate, RejectsBadSpecs) {
  StatsSpec spec;
  spec.p = 0.0;
  EXPECT_THROW(estimate_probability(SamplingMethod::m1, spec), Error);
  spec = StatsSpec{};
  spec.trials = 0;
  EXPECT_THROW(estimate_probability(SamplingMethod::m1, spec), Error);
  EXPECT_THROW(estimate_grid(WeightDist::uniform_pm1, 2, 2, {0.1}, {-1.0}, 10, 1), Error);
}

#include <gtest/gtest.h>

#include "test_util.hpp"

using namespace scn2d;
using scn2d::testing::max_abs_diff;
using scn2d::testing::random_inputs;
using scn2d::testing::random_matrix;
using scn2d::testing::random_vector;

namespace {

Network random_net(std::size_t l, std::size_t d1, std::size_t d2, std::size_t m, double scale, std::mt19937_64& rng) {
  std::vector<HiddenNode> nodes;
  for (std::size_t j = 0; j < l; ++j)
    nodes.emplace_back(
        TwoDNode{random_vector(d1, rng, -scale, scale), random_vector(d2, rng, -scale, scale), random_vector(1, rng)[0]});
  return Network(InputShape::grid(d1, d2), std::move(nodes), random_matrix(l, m, rng, -2, 2), Provenance{});
}

}  // namespace

TEST(DirectionalDerivative, ZeroAndUnitDirections) {
  std::mt19937_64 rng(1);
  const Network net = random_net(4, 3, 2, 1, 1.0, rng);
  const Inputs x = random_inputs(5, 3, 2, rng);
  EXPECT_EQ(directional_derivative(net, x, Matrix(5, 6)), Matrix(5, 4));

  // Z_i = e_k picks out g(1-g) * (u_a v_b) for the entry k = b*d1 + a
  Matrix z(5, 6);
  for (std::size_t i = 0; i < 5; ++i) z(i, 3) = 1.0;  // a = 0, b = 1
  const Matrix d = directional_derivative(net, x, z);
  const Matrix h = hidden_matrix(net, x);
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 4; ++j) {
      const auto& n = std::get<TwoDNode>(net.nodes()[j]);
      EXPECT_NEAR(d(i, j), h(i, j) * (1 - h(i, j)) * n.u[0] * n.v[1], 1e-15);
    }
}

TEST(DirectionalDerivative, MatchesFiniteDifferences) {
  std::mt19937_64 rng(2);
  for (int rep = 0; rep < 10; ++rep) {
    const Network net = random_net(6, 4, 3, 2, 2.0, rng);
    const Inputs x = random_inputs(8, 4, 3, rng);
    const Matrix z = random_matrix(8, 12, rng);
    const Matrix d = directional_derivative(net, x, z);
    const Matrix h0 = hidden_matrix(net, x);
    for (double eta : {1e-3, 1e-4, 1e-5}) {
      Matrix fd = hidden_matrix(net, perturb(x, eta, z)) - h0;
      for (auto& v : fd.data()) v /= eta;
      // forward differences carry an O(eta) error
      EXPECT_LE(max_abs_diff(fd, d), 10.0 * eta) << "eta=" << eta;
    }
  }
}

// The first-order remainder shrinks quadratically: halving eta cuts it ~4x.
TEST(DirectionalDerivative, TaylorRemainderHalving) {
  std::mt19937_64 rng(3);
  int checked = 0;
  for (int rep = 0; rep < 25; ++rep) {
    const Network net = random_net(5, 3, 3, 1, 2.0, rng);
    const Inputs x = random_inputs(6, 3, 3, rng);
    const Matrix z = random_matrix(6, 9, rng);
    const Matrix d = directional_derivative(net, x, z);
    const Matrix h0 = hidden_matrix(net, x);
    auto remainder = [&](double eta) {
      return frobenius_norm(hidden_matrix(net, perturb(x, eta, z)) - h0 - eta * d);
    };
    const double r1 = remainder(1e-2), r2 = remainder(5e-3);
    ASSERT_GT(r1, 0.0);
    EXPECT_LE(r2 / r1, 0.3);
    ++checked;
  }
  EXPECT_GE(checked, 20);
}

// ||dH beta|| <= ||dH|| ||beta|| <= max||Z_i|| * ||H o (O-H) o W|| * ||beta||
TEST(Indicator, CauchySchwarzChain) {
  std::mt19937_64 rng(4);
  for (int rep = 0; rep < 30; ++rep) {
    const Network net = random_net(7, 3, 4, 2, 3.0, rng);
    const Inputs x = random_inputs(10, 3, 4, rng);
    const Matrix z = random_matrix(10, 12, rng);
    const Matrix d = directional_derivative(net, x, z);
    const double a = frobenius_norm(matmul(d, net.beta()));
    const double b = frobenius_norm(d) * frobenius_norm(net.beta());
    const double c = max_row_norm(z) * indicator_theta_raw(net, x);
    EXPECT_LE(a, b * (1 + 1e-12));
    EXPECT_LE(b, c * (1 + 1e-12));
  }
}

TEST(Indicator, HandCases) {
  const Inputs x(InputShape::grid(1, 1), Matrix{{0.0}});
  // g = 0.5 at the origin, so H(1-H) = 0.25 and ||w|| = |u v|
  const Network one(x.shape, {TwoDNode{{2.0}, {3.0}, 0.0}}, Matrix{{4.0}}, Provenance{});
  EXPECT_DOUBLE_EQ(indicator_theta_raw(one, x), 0.25 * 6.0 * 4.0);

  const Network zero(x.shape, {TwoDNode{{0.0}, {0.0}, 0.0}}, Matrix{{4.0}}, Provenance{});
  EXPECT_EQ(indicator_theta_raw(zero, x), 0.0);
}

TEST(Indicator, SaturationShrinksContribution) {
  // inputs away from zero: scaling a node's weights pushes it into saturation
  const Inputs x(InputShape::grid(2, 1), Matrix{{1.0, 0.5}, {0.8, 0.9}, {0.6, 0.3}});
  const Network base(x.shape, {TwoDNode{{1.0, 1.0}, {1.0}, 0.0}}, Matrix{{1.0}}, Provenance{});
  const Network big(x.shape, {TwoDNode{{10.0, 10.0}, {1.0}, 0.0}}, Matrix{{1.0}}, Provenance{});
  EXPECT_LT(indicator_theta_raw(big, x), indicator_theta_raw(base, x));
}

TEST(Indicator, InvariantUnderNodePermutation) {
  std::mt19937_64 rng(5);
  const Network net = random_net(5, 2, 3, 2, 1.5, rng);
  const Inputs x = random_inputs(7, 2, 3, rng);
  std::vector<HiddenNode> nodes(net.nodes().rbegin(), net.nodes().rend());
  Matrix beta(5, 2);
  for (std::size_t j = 0; j < 5; ++j)
    for (std::size_t q = 0; q < 2; ++q) beta(j, q) = net.beta()(4 - j, q);
  const Network rev(net.input_shape(), std::move(nodes), beta, Provenance{});
  EXPECT_NEAR(indicator_theta_raw(rev, x), indicator_theta_raw(net, x), 1e-12);
  EXPECT_LE(max_abs_diff(predict(rev, x), predict(net, x)), 1e-12);
}

TEST(Indicator, TwoDEqualsOneDTwin) {
  std::mt19937_64 rng(6);
  const Network net = random_net(5, 3, 3, 1, 1.0, rng);
  const Inputs x = random_inputs(9, 3, 3, rng);
  EXPECT_NEAR(indicator_theta_raw(net, x), indicator_theta_raw(to_one_d(net), x), 1e-12);
}

TEST(NormalizeIndicators, Cases) {
  EXPECT_EQ(normalize_indicators(std::vector<double>{2, 4}), (std::vector<double>{0.5, 1.0}));
  EXPECT_EQ(normalize_indicators(std::vector<double>{3.7}), (std::vector<double>{1.0}));
  EXPECT_THROW(normalize_indicators(std::vector<double>{0, 0}), DegenerateError);
  EXPECT_THROW(normalize_indicators(std::vector<double>{}), DegenerateError);
}

TEST(Bound, ZeroPerturbationIsTrainingError) {
  std::mt19937_64 rng(7);
  const Network net = random_net(4, 2, 2, 1, 1.0, rng);
  const Inputs x = random_inputs(6, 2, 2, rng);
  const Matrix t = random_matrix(6, 1, rng);
  const double train = frobenius_norm(predict(net, x) - t);
  EXPECT_EQ(test_error_bound(net, x, t, PerturbationSpec{0.0, random_matrix(6, 4, rng)}), train);
  EXPECT_EQ(test_error_bound(net, x, t, PerturbationSpec{0.5, Matrix(6, 4)}), train);
  EXPECT_THROW(test_error_bound(net, x, t, PerturbationSpec{0.1, Matrix(5, 4)}), ShapeError);
  EXPECT_THROW(test_error_bound(net, x, t, PerturbationSpec{-0.1, Matrix(6, 4)}), Error);
}

TEST(Bound, HoldsForSmallPerturbations) {
  std::mt19937_64 rng(8);
  for (int rep = 0; rep < 30; ++rep) {
    const Network net = random_net(6, 3, 3, 2, 2.0, rng);
    const Inputs x = random_inputs(12, 3, 3, rng);
    const Matrix t = random_matrix(12, 2, rng);
    const Matrix z = random_matrix(12, 9, rng);
    for (double eta : {1e-3, 1e-4}) {
      const double measured = frobenius_norm(predict(net, perturb(x, eta, z)) - t);
      EXPECT_LE(measured, test_error_bound(net, x, t, PerturbationSpec{eta, z}) + 1e-6);
    }
  }
}

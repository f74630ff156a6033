#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "test_util.hpp"

using namespace scn2d;
using scn2d::testing::max_abs_diff;
using scn2d::testing::naive_matmul;
using scn2d::testing::random_matrix;
using scn2d::testing::random_vector;

TEST(Matrix, RejectsNonFiniteData) {
  EXPECT_THROW(Matrix(1, 2, std::vector<double>{1.0, std::nan("")}), NumericError);
  EXPECT_THROW(Matrix(1, 1, std::vector<double>{std::numeric_limits<double>::infinity()}), NumericError);
  EXPECT_THROW(Matrix(2, 2, std::vector<double>{1.0}), ShapeError);
}

TEST(Matmul, IdentityAndHandArithmetic) {
  const Matrix a{{1, 2}, {3, 4}};
  EXPECT_EQ(matmul(Matrix::identity(2), a), a);
  EXPECT_EQ(matmul(a, Matrix{{1}, {1}}), (Matrix{{3}, {7}}));
}

TEST(Matmul, MatchesTripleLoop) {
  std::mt19937_64 rng(11);
  const Matrix a = random_matrix(5, 3, rng), b = random_matrix(3, 2, rng);
  EXPECT_LE(max_abs_diff(matmul(a, b), naive_matmul(a, b)), 1e-12);
}

TEST(Matmul, ShapeErrorNamesBothShapes) {
  try {
    matmul(Matrix(2, 3), Matrix(2, 3));
    FAIL();
  } catch (const ShapeError& e) {
    EXPECT_NE(std::string(e.what()).find("2x3 times 2x3"), std::string::npos);
  }
}

TEST(Matmul, Associative) {
  std::mt19937_64 rng(12);
  for (int rep = 0; rep < 50; ++rep) {
    const Matrix a = random_matrix(4, 6, rng), b = random_matrix(6, 3, rng), c = random_matrix(3, 5, rng);
    const Matrix l = matmul(matmul(a, b), c), r = matmul(a, matmul(b, c));
    EXPECT_LE(max_abs_diff(l, r), 1e-10 * (1.0 + frobenius_norm(l)));
  }
}

TEST(Hadamard, Cases) {
  const Matrix a{{1, 2}, {3, 4}};
  EXPECT_EQ(hadamard(a, Matrix(2, 2, 1.0)), a);
  EXPECT_EQ(hadamard(Matrix{{1, 2}}, Matrix{{3, 4}}), (Matrix{{3, 8}}));
  EXPECT_EQ(hadamard(a, Matrix(2, 2)), Matrix(2, 2));
  EXPECT_THROW(hadamard(a, Matrix(1, 2)), ShapeError);
}

TEST(FrobeniusNorm, Cases) {
  EXPECT_EQ(frobenius_norm(Matrix(3, 3)), 0.0);
  EXPECT_EQ(frobenius_norm(Matrix{{3, 4}}), 5.0);
  std::mt19937_64 rng(13);
  const Matrix a = random_matrix(7, 9, rng);
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * a(i, j);
  EXPECT_NEAR(frobenius_norm(a), std::sqrt(s), 1e-13);
}

TEST(Vectorize, ColumnMajor) {
  EXPECT_EQ(vectorize(Matrix{{1, 2}, {3, 4}}), (Matrix{{1}, {3}, {2}, {4}}));
  const Matrix col{{5}, {6}, {7}};
  EXPECT_EQ(vectorize(col), col);
  std::mt19937_64 rng(14);
  const Matrix x = random_matrix(3, 5, rng);
  EXPECT_EQ(unvectorize(vectorize(x).data(), 3, 5), x);
}

TEST(Outer, Cases) {
  EXPECT_EQ(outer(Vector{1, 0}, Vector{0, 1}), (Matrix{{0, 1}, {0, 0}}));
  EXPECT_EQ(outer(Vector{1, 2}, Vector{3, 4}), (Matrix{{3, 4}, {6, 8}}));
  std::mt19937_64 rng(15);
  for (int rep = 0; rep < 20; ++rep) {
    const Vector u = random_vector(4, rng), v = random_vector(6, rng);
    EXPECT_NEAR(frobenius_norm(outer(u, v)), norm2(u) * norm2(v), 1e-12);
  }
}

TEST(BilinearForm, Cases) {
  EXPECT_EQ(bilinear_form(Vector{1, 2}, Matrix::identity(2), Vector{3, 4}), 11.0);
  EXPECT_EQ(bilinear_form(Vector{1, 2}, Matrix(2, 2), Vector{3, 4}), 0.0);
  EXPECT_THROW(bilinear_form(Vector{1, 2}, Matrix(3, 2), Vector{3, 4}), ShapeError);
  EXPECT_THROW(bilinear_form_vec(Vector{1, 2}, Vector{1, 2, 3}, Vector{3, 4}), ShapeError);
}

// Property: u^T x v == vec(u v^T)^T vec(x), over random shapes.
TEST(BilinearForm, VectorizationIdentity) {
  std::mt19937_64 rng(16);
  std::uniform_int_distribution<std::size_t> dim(1, 9);
  for (int rep = 0; rep < 1000; ++rep) {
    const std::size_t d1 = dim(rng), d2 = dim(rng);
    const Vector u = random_vector(d1, rng), v = random_vector(d2, rng);
    const Matrix x = random_matrix(d1, d2, rng);
    const double lhs = bilinear_form(u, x, v);
    const double rhs = dot(vectorize(outer(u, v)).data(), vectorize(x).data());
    ASSERT_NEAR(lhs, rhs, 1e-12) << "d1=" << d1 << " d2=" << d2;
    ASSERT_NEAR(bilinear_form_vec(u, vectorize(x).data(), v), lhs, 1e-12);
  }
}

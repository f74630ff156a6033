#pragma once

#include <algorithm>
#include <limits>

#include <Eigen/Dense>

#include "scn2d/matrix.hpp"

namespace scn2d {

/// Minimum-Frobenius-norm solution of min ||H beta - T||_F, i.e. pinv(H) T.
///
/// Uses a thin SVD. Singular values below max(N, L) * eps * sigma_max are
/// dropped, so duplicated or collinear columns of H are handled.
inline Matrix least_squares(const Matrix& h, const Matrix& t) {
  if (h.rows() != t.rows())
    throw ShapeError("least_squares: H is " + h.shape_string() + ", T is " + t.shape_string());
  if (!h.all_finite() || !t.all_finite()) throw NumericError("least_squares: non-finite entries in H or T");

  const auto n = static_cast<Eigen::Index>(h.rows());
  const auto l = static_cast<Eigen::Index>(h.cols());
  const auto m = static_cast<Eigen::Index>(t.cols());
  Matrix beta(h.cols(), t.cols());
  if (l == 0 || m == 0 || n == 0) return beta;

  using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Eigen::Map<const RowMajor> hm(h.data().data(), n, l);
  Eigen::Map<const RowMajor> tm(t.data().data(), n, m);

  Eigen::BDCSVD<Eigen::MatrixXd> svd(Eigen::MatrixXd(hm), Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sigma = svd.singularValues();
  const double cutoff = static_cast<double>(std::max(n, l)) * std::numeric_limits<double>::epsilon() *
                        (sigma.size() > 0 ? sigma(0) : 0.0);

  Eigen::MatrixXd ut_t = svd.matrixU().transpose() * tm;
  for (Eigen::Index k = 0; k < sigma.size(); ++k) {
    if (sigma(k) > cutoff && sigma(k) > 0.0)
      ut_t.row(k) /= sigma(k);
    else
      ut_t.row(k).setZero();
  }
  Eigen::Map<RowMajor>(beta.data().data(), l, m) = svd.matrixV() * ut_t;
  beta.check_finite();
  return beta;
}

}  // namespace scn2d

#pragma once

// First-order sensitivity of the hidden layer to input perturbations and the
// test-error bound built from it:
//
//   ||H(X + eta Z) beta - T||_F <= ||H beta - T||_F
//       + eta * max_i ||Z_i||_2 * ||H o (O - H) o W||_F * ||beta||_F + O(eta^2)
//
// where o is the Hadamard product, O the all-ones matrix and W the N x L
// matrix whose every row is (||w_1||, ..., ||w_L||).

#include <algorithm>
#include <cmath>
#include <vector>

#include "scn2d/model.hpp"

namespace scn2d {

struct PerturbationSpec {
  double eta = 0.0;  ///< perturbation scale; zero gives the training error
  Matrix z;          ///< N x d direction, rows in the same vec layout as the inputs

  void validate(const Inputs& x) const {
    if (!(eta >= 0.0) || !std::isfinite(eta)) throw Error("perturbation: eta must be finite and nonnegative");
    if (z.rows() != x.count() || z.cols() != x.shape.size())
      throw ShapeError("perturbation: Z is " + z.shape_string() + ", inputs are " + std::to_string(x.count()) +
                       "x" + std::to_string(x.shape.size()));
    z.check_finite();
  }
};

/// X + eta Z with the input shape preserved.
inline Inputs perturb(const Inputs& x, double eta, const Matrix& z) {
  return Inputs(x.shape, x.flat + eta * z);
}

/// dH in direction Z: entry (i, j) = g_ij (1 - g_ij) * w_j^T Z_i, with
/// w_j = vec(u_j v_j^T) for 2D nodes (evaluated as u_j^T Z_i v_j).
inline Matrix directional_derivative(const Network& net, const Inputs& x, const Matrix& z) {
  const Inputs xs = as_network_inputs(net, x);
  if (z.rows() != xs.count() || z.cols() != xs.shape.size())
    throw ShapeError("directional_derivative: Z is " + z.shape_string() + ", inputs are " +
                     std::to_string(xs.count()) + "x" + std::to_string(xs.shape.size()));
  const auto& nodes = net.nodes();
  Matrix d(xs.count(), nodes.size());
  for (std::size_t i = 0; i < xs.count(); ++i) {
    auto xi = xs.sample(i);
    auto zi = z.row(i);
    for (std::size_t j = 0; j < nodes.size(); ++j) {
      const double g = node_output(nodes[j], xi);
      const double wz = preactivation(nodes[j], zi) - std::visit([](const auto& n) { return n.b; }, nodes[j]);
      d(i, j) = g * (1.0 - g) * wz;
    }
  }
  return d;
}

/// N x L matrix H o (O - H) o W.
inline Matrix saturation_matrix(const Network& net, const Inputs& x) {
  const Matrix h = hidden_matrix(net, x);
  Matrix one_minus_h(h.rows(), h.cols());
  for (std::size_t k = 0; k < h.size(); ++k) one_minus_h.data()[k] = 1.0 - h.data()[k];
  Matrix w(h.rows(), h.cols());
  for (std::size_t j = 0; j < net.hidden_count(); ++j) {
    const double nj = weight_norm(net.nodes()[j]);
    for (std::size_t i = 0; i < h.rows(); ++i) w(i, j) = nj;
  }
  return hadamard(hadamard(h, one_minus_h), w);
}

/// ||H o (O - H) o W||_F * ||beta||_F, the unnormalized generalization indicator.
inline double indicator_theta_raw(const Network& net, const Inputs& x) {
  return frobenius_norm(saturation_matrix(net, x)) * frobenius_norm(net.beta());
}

/// Divides every value by the maximum, so the largest maps to exactly 1.
inline std::vector<double> normalize_indicators(std::span<const double> raws) {
  if (raws.empty()) throw DegenerateError("normalize_indicators: empty input");
  const double top = *std::max_element(raws.begin(), raws.end());
  if (!(top > 0.0)) throw DegenerateError("normalize_indicators: all indicators are zero");
  std::vector<double> out(raws.size());
  for (std::size_t k = 0; k < raws.size(); ++k) out[k] = raws[k] == top ? 1.0 : raws[k] / top;
  return out;
}

inline double max_row_norm(const Matrix& z) {
  double best = 0.0;
  for (std::size_t i = 0; i < z.rows(); ++i) best = std::max(best, norm2(z.row(i)));
  return best;
}

/// First-order test-error bound (the O(eta^2) term is dropped). With
/// include_z_factor = false the max_i ||Z_i|| factor is omitted.
inline double test_error_bound(const Network& net, const Inputs& x, const Matrix& t, const PerturbationSpec& spec,
                               bool include_z_factor = true) {
  spec.validate(x);
  const double train_err = frobenius_norm(predict(net, x) - t);
  if (spec.eta == 0.0) return train_err;
  const double zf = include_z_factor ? max_row_norm(spec.z) : 1.0;
  return train_err + spec.eta * zf * indicator_theta_raw(net, x);
}

}  // namespace scn2d

#pragma once

// Hidden nodes, networks and forward evaluation.
//
// Inputs are carried as an N x d matrix whose row i is vec(x_i), the
// column-major vectorization of the d1 x d2 sample. A 1D node sees that row
// directly; a 2D node evaluates u^T x v on it without reshaping.

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "scn2d/error.hpp"
#include "scn2d/matrix.hpp"

namespace scn2d {

struct InputShape {
  std::size_t d1 = 0;
  std::size_t d2 = 1;
  bool is_matrix = false;

  static InputShape flat(std::size_t d) { return {d, 1, false}; }
  static InputShape grid(std::size_t d1, std::size_t d2) { return {d1, d2, true}; }

  std::size_t size() const noexcept { return d1 * d2; }
  std::string str() const {
    return is_matrix ? std::to_string(d1) + "x" + std::to_string(d2) : std::to_string(d1);
  }
  friend bool operator==(const InputShape&, const InputShape&) = default;
};

/// A batch of N samples sharing one shape; row i of `flat` is vec(x_i).
struct Inputs {
  InputShape shape;
  Matrix flat;

  Inputs() = default;
  Inputs(InputShape s, Matrix f) : shape(s), flat(std::move(f)) {
    if (flat.cols() != shape.size())
      throw ShapeError("inputs: rows have " + std::to_string(flat.cols()) + " entries, shape " + shape.str() +
                       " needs " + std::to_string(shape.size()));
  }

  std::size_t count() const noexcept { return flat.rows(); }
  std::span<const double> sample(std::size_t i) const noexcept { return flat.row(i); }

  /// Same samples viewed as flat d-vectors.
  Inputs flattened() const { return Inputs(InputShape::flat(shape.size()), flat); }
};

enum class Activation { sigmoid };

/// Logistic sigmoid, evaluated so that large |t| never produces NaN.
inline double activate(double t) noexcept {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

struct OneDNode {
  Vector w;
  double b = 0.0;
  friend bool operator==(const OneDNode&, const OneDNode&) = default;
};

struct TwoDNode {
  Vector u;
  Vector v;
  double b = 0.0;
  friend bool operator==(const TwoDNode&, const TwoDNode&) = default;
};

using HiddenNode = std::variant<OneDNode, TwoDNode>;

inline bool is_two_d(const HiddenNode& n) noexcept { return std::holds_alternative<TwoDNode>(n); }

/// ||w||_2 of the node's effective input weight; ||u||*||v|| for 2D nodes.
inline double weight_norm(const HiddenNode& node) {
  return std::visit(
      [](const auto& n) -> double {
        if constexpr (std::is_same_v<std::decay_t<decltype(n)>, TwoDNode>)
          return norm2(n.u) * norm2(n.v);
        else
          return norm2(n.w);
      },
      node);
}

/// The 1D twin of a 2D node: w = vec(u v^T), same bias.
inline OneDNode to_one_d(const HiddenNode& node) {
  if (const auto* n1 = std::get_if<OneDNode>(&node)) return *n1;
  const auto& n2 = std::get<TwoDNode>(node);
  Matrix w = vectorize(outer(n2.u, n2.v));
  return OneDNode{Vector(w.data().begin(), w.data().end()), n2.b};
}

inline void check_node_shape(const HiddenNode& node, const InputShape& shape) {
  if (const auto* n2 = std::get_if<TwoDNode>(&node)) {
    if (!shape.is_matrix || n2->u.size() != shape.d1 || n2->v.size() != shape.d2)
      throw ShapeError("2D node (" + std::to_string(n2->u.size()) + "x" + std::to_string(n2->v.size()) +
                       ") does not match input shape " + shape.str());
  } else {
    const auto& n1 = std::get<OneDNode>(node);
    if (n1.w.size() != shape.size())
      throw ShapeError("1D node of length " + std::to_string(n1.w.size()) + " does not match input shape " +
                       shape.str());
  }
}

/// Pre-activation w^T x + b (1D) or u^T x v + b (2D) on one flattened sample.
inline double preactivation(const HiddenNode& node, std::span<const double> x) {
  if (const auto* n2 = std::get_if<TwoDNode>(&node)) return bilinear_form_vec(n2->u, x, n2->v) + n2->b;
  const auto& n1 = std::get<OneDNode>(node);
  return dot(n1.w, x) + n1.b;
}

inline double node_output(const HiddenNode& node, std::span<const double> x) {
  return activate(preactivation(node, x));
}

/// Shape-checked single-sample evaluation.
inline double node_output(const HiddenNode& node, const Inputs& x, std::size_t i) {
  check_node_shape(node, x.shape);
  return node_output(node, x.sample(i));
}

/// Activation vector h = [g(node, x_1), ..., g(node, x_N)].
inline Vector node_column(const HiddenNode& node, const Inputs& x) {
  check_node_shape(node, x.shape);
  Vector h(x.count());
  for (std::size_t i = 0; i < x.count(); ++i) h[i] = node_output(node, x.sample(i));
  return h;
}

/// N x L hidden-layer output matrix, columns in node order.
inline Matrix hidden_matrix(std::span<const HiddenNode> nodes, const Inputs& x) {
  for (const auto& n : nodes) check_node_shape(n, x.shape);
  Matrix h(x.count(), nodes.size());
  for (std::size_t i = 0; i < x.count(); ++i) {
    auto xi = x.sample(i);
    for (std::size_t j = 0; j < nodes.size(); ++j) h(i, j) = node_output(nodes[j], xi);
  }
  return h;
}

inline bool node_is_finite(const HiddenNode& node) {
  auto finite = [](std::span<const double> v) {
    for (double x : v)
      if (!std::isfinite(x)) return false;
    return true;
  };
  if (const auto* n2 = std::get_if<TwoDNode>(&node)) return finite(n2->u) && finite(n2->v) && std::isfinite(n2->b);
  const auto& n1 = std::get<OneDNode>(node);
  return finite(n1.w) && std::isfinite(n1.b);
}

enum class Builder { scn, scn2d, rvfl, rvfl2d };

inline std::string builder_name(Builder b) {
  switch (b) {
    case Builder::scn: return "SCN";
    case Builder::scn2d: return "2DSCN";
    case Builder::rvfl: return "RVFL";
    case Builder::rvfl2d: return "2DRVFL";
  }
  return "?";
}

inline Builder parse_builder(const std::string& s) {
  if (s == "SCN" || s == "scn") return Builder::scn;
  if (s == "2DSCN" || s == "2dscn") return Builder::scn2d;
  if (s == "RVFL" || s == "rvfl") return Builder::rvfl;
  if (s == "2DRVFL" || s == "2drvfl") return Builder::rvfl2d;
  throw FormatError("unknown builder '" + s + "'");
}

struct Provenance {
  Builder builder = Builder::scn2d;
  std::uint64_t seed = 0;
  std::string config_digest;
  friend bool operator==(const Provenance&, const Provenance&) = default;
};

/// Trained one-hidden-layer learner f(x) = sum_j beta_j g_j(x). Immutable.
class Network {
 public:
  Network(InputShape shape, std::vector<HiddenNode> nodes, Matrix beta, Provenance provenance,
          Activation activation = Activation::sigmoid)
      : shape_(shape),
        nodes_(std::move(nodes)),
        beta_(std::move(beta)),
        provenance_(std::move(provenance)),
        activation_(activation) {
    if (beta_.rows() != nodes_.size())
      throw ShapeError("network: beta has " + std::to_string(beta_.rows()) + " rows for " +
                       std::to_string(nodes_.size()) + " nodes");
    beta_.check_finite();
    for (std::size_t j = 0; j < nodes_.size(); ++j) {
      if (is_two_d(nodes_[j]) != is_two_d(nodes_.front()))
        throw ShapeError("network: mixed 1D and 2D nodes");
      check_node_shape(nodes_[j], shape_);
      if (!node_is_finite(nodes_[j])) throw NumericError("network: non-finite node parameter");
    }
  }

  const InputShape& input_shape() const noexcept { return shape_; }
  const std::vector<HiddenNode>& nodes() const noexcept { return nodes_; }
  const Matrix& beta() const noexcept { return beta_; }
  const Provenance& provenance() const noexcept { return provenance_; }
  Activation activation() const noexcept { return activation_; }
  std::size_t hidden_count() const noexcept { return nodes_.size(); }
  std::size_t output_count() const noexcept { return beta_.cols(); }

  friend bool operator==(const Network&, const Network&) = default;

 private:
  InputShape shape_;
  std::vector<HiddenNode> nodes_;
  Matrix beta_;
  Provenance provenance_;
  Activation activation_;
};

/// Checks that `x` can be fed to `net`. A 1D network accepts any input with
/// the right total size; a 2D network needs the exact d1 x d2 shape.
inline void check_input(const Network& net, const Inputs& x) {
  const auto& s = net.input_shape();
  const bool ok = s.is_matrix ? (x.shape == s) : (x.shape.size() == s.size());
  if (!ok) throw ShapeError("network expects inputs " + s.str() + ", got " + x.shape.str());
}

/// Inputs as seen by the network's nodes (flattened for 1D networks).
inline Inputs as_network_inputs(const Network& net, const Inputs& x) {
  check_input(net, x);
  return net.input_shape().is_matrix ? x : x.flattened();
}

inline Matrix hidden_matrix(const Network& net, const Inputs& x) {
  return hidden_matrix(std::span<const HiddenNode>(net.nodes()), as_network_inputs(net, x));
}

/// N x m predictions H beta; all zeros for an empty network.
inline Matrix predict(const Network& net, const Inputs& x) {
  check_input(net, x);
  if (net.hidden_count() == 0) return Matrix(x.count(), net.output_count());
  return matmul(hidden_matrix(net, x), net.beta());
}

/// Same network with every 2D node replaced by its vec(u v^T) twin.
inline Network to_one_d(const Network& net) {
  std::vector<HiddenNode> nodes;
  nodes.reserve(net.hidden_count());
  for (const auto& n : net.nodes()) nodes.emplace_back(to_one_d(n));
  return Network(InputShape::flat(net.input_shape().size()), std::move(nodes), net.beta(), net.provenance(),
                 net.activation());
}

}  // namespace scn2d

#pragma once

// Random vector functional-link baselines (RVFL / 2DRVFL): every hidden
// parameter is drawn blindly from [-lambda, lambda] and only the output
// weights are fitted, in one least-squares solve. No direct input-output links.

#include <cstdint>
#include <string>
#include <vector>

#include "scn2d/configurator.hpp"

namespace scn2d {

/// Node j is drawn from child_rng(seed, {j}), so a network with more nodes
/// shares its first L draws with the smaller one.
inline Network train_rvfl(const Inputs& x_in, const Matrix& t, std::size_t hidden, double lambda, NodeKind kind,
                          std::uint64_t seed) {
  if (hidden == 0) throw Error("train_rvfl: need at least one hidden node");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw Error("train_rvfl: lambda must be positive");
  if (t.rows() != x_in.count())
    throw ShapeError("train_rvfl: " + std::to_string(x_in.count()) + " inputs but targets are " + t.shape_string());
  if (!x_in.flat.all_finite() || !t.all_finite()) throw NumericError("train_rvfl: non-finite training data");
  if (kind == NodeKind::two_d && !x_in.shape.is_matrix)
    throw ShapeError("train_rvfl: 2D nodes need matrix inputs, got shape " + x_in.shape.str());

  const Inputs x = kind == NodeKind::two_d ? x_in : x_in.flattened();
  std::vector<HiddenNode> nodes;
  nodes.reserve(hidden);
  for (std::size_t j = 0; j < hidden; ++j) {
    Rng rng = child_rng(seed, {j});
    nodes.push_back(sample_candidate(x.shape, kind, lambda, rng));
  }
  Matrix beta = least_squares(hidden_matrix(std::span<const HiddenNode>(nodes), x), t);

  TrainConfig digest_src;
  digest_src.max_nodes = hidden;
  digest_src.max_trials = 1;
  digest_src.lambdas = {lambda};
  digest_src.rs = {0.5};
  digest_src.seed = seed;
  Provenance prov{kind == NodeKind::two_d ? Builder::rvfl2d : Builder::rvfl, seed, digest_src.digest()};
  return Network(x.shape, std::move(nodes), std::move(beta), std::move(prov));
}

}  // namespace scn2d

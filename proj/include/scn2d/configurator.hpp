#pragma once

// Stochastic configuration of hidden nodes (SCN and its matrix-input variant).
//
// Each step draws T_max random candidates, keeps the ones that pass the
// supervisory test min_q xi_q >= 0, adds the best of them, and refits all
// output weights by least squares. The (lambda, r) grid is scanned lambda
// outer, r inner, both ascending, stopping at the first non-empty pool.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "scn2d/least_squares.hpp"
#include "scn2d/model.hpp"
#include "scn2d/random.hpp"

namespace scn2d {

enum class NodeKind { one_d, two_d };

struct TrainConfig {
  std::size_t max_nodes = 100;
  double tol = 0.0;          ///< stop once ||e||_F <= tol
  std::size_t max_trials = 5;  ///< candidates drawn per (lambda, r) attempt
  std::vector<double> lambdas{1, 5, 15, 30, 50, 100, 150, 200, 250};
  std::vector<double> rs{1 - 1e-2, 1 - 1e-3, 1 - 1e-4, 1 - 1e-5, 1 - 1e-6, 1 - 1e-7};
  std::uint64_t seed = 0;

  void validate() const {
    if (max_nodes == 0) throw Error("config: max_nodes must be positive");
    if (max_trials == 0) throw Error("config: max_trials must be positive");
    if (!(tol >= 0.0) || !std::isfinite(tol)) throw Error("config: tol must be finite and nonnegative");
    if (lambdas.empty() || rs.empty()) throw Error("config: lambda and r sets must be non-empty");
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
      if (!(lambdas[i] > 0.0) || !std::isfinite(lambdas[i])) throw Error("config: lambdas must be positive");
      if (i && !(lambdas[i] > lambdas[i - 1])) throw Error("config: lambdas must be strictly ascending");
    }
    for (std::size_t i = 0; i < rs.size(); ++i) {
      if (!(rs[i] > 0.0 && rs[i] < 1.0)) throw Error("config: r values must lie in (0,1)");
      if (i && !(rs[i] > rs[i - 1])) throw Error("config: r values must be strictly ascending");
    }
  }

  /// Stable 16-hex-digit FNV-1a digest of every field.
  std::string digest() const {
    std::string canon = "L=" + std::to_string(max_nodes) + ";T=" + std::to_string(max_trials) + ";tol=";
    auto put = [&canon](double x) {
      char buf[32];
      auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), x);
      canon.append(buf, end);
      canon += ',';
    };
    put(tol);
    canon += ";lambda=";
    for (double x : lambdas) put(x);
    canon += ";r=";
    for (double x : rs) put(x);
    canon += ";seed=" + std::to_string(seed);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : canon) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    char hex[17];
    for (int i = 15; i >= 0; --i) {
      hex[i] = "0123456789abcdef"[h & 0xf];
      h >>= 4;
    }
    hex[16] = '\0';
    return hex;
  }
};

struct CandidateScore {
  HiddenNode node;
  Vector xi_per_output;
  double xi_total = 0.0;
  double lambda_used = 0.0;
  double r_used = 0.0;
  std::size_t draw_index = 0;  ///< position of the winner within its pool

  bool admissible() const {
    return !xi_per_output.empty() && *std::min_element(xi_per_output.begin(), xi_per_output.end()) >= 0.0;
  }
};

enum class Termination { tolerance, max_nodes, exhausted };

inline std::string termination_name(Termination t) {
  switch (t) {
    case Termination::tolerance: return "tolerance";
    case Termination::max_nodes: return "L_max";
    case Termination::exhausted: return "exhausted";
  }
  return "?";
}

struct BuildReport {
  double initial_residual = 0.0;               ///< ||T||_F
  Vector initial_column_sq;                    ///< ||t_q||^2 per output
  std::vector<double> residual_history;        ///< ||e_L||_F after node L
  std::vector<Vector> column_sq_history;       ///< ||e_{L,q}||^2 after node L
  std::vector<double> accepted_r;
  std::vector<double> accepted_lambda;
  std::vector<Vector> accepted_xi;
  std::vector<std::size_t> candidates_tried;
  Termination terminated_by = Termination::max_nodes;

  double final_residual() const { return residual_history.empty() ? initial_residual : residual_history.back(); }

  void write_csv(std::ostream& os) const {
    os << "L,residual,r_used,lambda_used,candidates_tried\n";
    char buf[32];
    auto num = [&buf](double x) {
      auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), x);
      return std::string(buf, end);
    };
    for (std::size_t k = 0; k < residual_history.size(); ++k)
      os << (k + 1) << ',' << num(residual_history[k]) << ',' << num(accepted_r[k]) << ','
         << num(accepted_lambda[k]) << ',' << candidates_tried[k] << '\n';
  }

  friend bool operator==(const BuildReport&, const BuildReport&) = default;
};

/// Denominator guard for the xi scores: h^T h must exceed 1e-12 * N.
inline double hh_floor(std::size_t n) { return 1e-12 * static_cast<double>(n); }

/// xi_q = (e_q^T h)^2 / (h^T h) - (1 - r) e_q^T e_q for each output column q.
inline Vector xi_scores(const Matrix& e_prev, std::span<const double> h, double r) {
  if (h.size() != e_prev.rows())
    throw ShapeError("xi_scores: h has " + std::to_string(h.size()) + " entries, residual is " +
                     e_prev.shape_string());
  const double hh = dot(h, h);
  if (!(hh > hh_floor(h.size()))) throw DegenerateError("xi_scores: candidate activation has h^T h <= floor");
  const std::size_t m = e_prev.cols();
  Vector eh(m, 0.0), ee(m, 0.0);
  for (std::size_t i = 0; i < e_prev.rows(); ++i) {
    auto row = e_prev.row(i);
    for (std::size_t q = 0; q < m; ++q) {
      eh[q] += row[q] * h[i];
      ee[q] += row[q] * row[q];
    }
  }
  Vector xi(m);
  for (std::size_t q = 0; q < m; ++q) xi[q] = eh[q] * eh[q] / hh - (1.0 - r) * ee[q];
  return xi;
}

/// Uniform[-lambda, lambda] draws: w (1D) or u, v (2D), then b.
inline HiddenNode sample_candidate(const InputShape& shape, NodeKind kind, double lambda, Rng& rng) {
  std::uniform_real_distribution<double> dist(-lambda, lambda);
  auto fill = [&](std::size_t n) {
    Vector v(n);
    for (auto& x : v) x = dist(rng);
    return v;
  };
  if (kind == NodeKind::two_d) {
    if (!shape.is_matrix) throw ShapeError("2D node requested for flat input shape " + shape.str());
    TwoDNode n;
    n.u = fill(shape.d1);
    n.v = fill(shape.d2);
    n.b = dist(rng);
    return n;
  }
  OneDNode n;
  n.w = fill(shape.size());
  n.b = dist(rng);
  return n;
}

/// Stream for candidate k of one configuration attempt.
inline Rng candidate_rng(std::uint64_t attempt_seed, std::size_t k) { return child_rng(attempt_seed, {k}); }

/// Draws `max_trials` candidates (candidate k from candidate_rng(attempt_seed, k))
/// and returns the admissible one with the largest xi_total, first drawn on
/// ties. nullopt when no candidate is admissible.
inline std::optional<CandidateScore> configure_node(const Matrix& e_prev, const Inputs& x, NodeKind kind,
                                                    double lambda, double r, std::size_t max_trials,
                                                    std::uint64_t attempt_seed, unsigned threads = 1) {
  std::vector<std::optional<CandidateScore>> pool(max_trials);
  parallel_for(max_trials, threads, [&](std::size_t k) {
    Rng rng = candidate_rng(attempt_seed, k);
    HiddenNode node = sample_candidate(x.shape, kind, lambda, rng);
    Vector h = node_column(node, x);
    Vector xi;
    try {
      xi = xi_scores(e_prev, h, r);
    } catch (const DegenerateError&) {
      return;
    }
    CandidateScore c{std::move(node), std::move(xi), 0.0, lambda, r, k};
    if (!c.admissible()) return;
    for (double v : c.xi_per_output) c.xi_total += v;
    pool[k] = std::move(c);
  });
  std::optional<CandidateScore> best;
  for (auto& c : pool)
    if (c && (!best || c->xi_total > best->xi_total)) best = std::move(c);
  return best;
}

struct TrainResult {
  Network network;
  BuildReport report;
};

/// Incremental construction. `kind` two_d requires matrix-shaped inputs;
/// one_d flattens them.
inline TrainResult train_scn(const Inputs& x_in, const Matrix& t, const TrainConfig& cfg, NodeKind kind,
                             unsigned threads = 1) {
  cfg.validate();
  if (x_in.count() == 0) throw ShapeError("train_scn: no samples");
  if (t.rows() != x_in.count())
    throw ShapeError("train_scn: " + std::to_string(x_in.count()) + " inputs but targets are " + t.shape_string());
  if (!x_in.flat.all_finite() || !t.all_finite()) throw NumericError("train_scn: non-finite training data");
  if (kind == NodeKind::two_d && !x_in.shape.is_matrix)
    throw ShapeError("train_scn: 2D nodes need matrix inputs, got shape " + x_in.shape.str());

  const Inputs x = kind == NodeKind::two_d ? x_in : x_in.flattened();
  const std::size_t n = x.count();
  const std::size_t m = t.cols();

  auto column_sq = [m](const Matrix& e) {
    Vector s(m, 0.0);
    for (std::size_t i = 0; i < e.rows(); ++i)
      for (std::size_t q = 0; q < m; ++q) s[q] += e(i, q) * e(i, q);
    return s;
  };

  BuildReport report;
  Matrix e = t;  // f_0 = 0
  report.initial_residual = frobenius_norm(e);
  report.initial_column_sq = column_sq(e);

  std::vector<HiddenNode> nodes;
  std::vector<Vector> columns;
  Matrix beta(0, m);
  double residual = report.initial_residual;

  report.terminated_by = Termination::max_nodes;
  while (true) {
    if (residual <= cfg.tol) {
      report.terminated_by = Termination::tolerance;
      break;
    }
    if (nodes.size() >= cfg.max_nodes) {
      report.terminated_by = Termination::max_nodes;
      break;
    }
    const std::uint64_t step = nodes.size() + 1;
    std::optional<CandidateScore> chosen;
    std::size_t tried = 0;
    for (std::size_t li = 0; li < cfg.lambdas.size() && !chosen; ++li) {
      for (std::size_t ri = 0; ri < cfg.rs.size() && !chosen; ++ri) {
        const std::uint64_t attempt = child_seed(cfg.seed, {step, li, ri});
        chosen = configure_node(e, x, kind, cfg.lambdas[li], cfg.rs[ri], cfg.max_trials, attempt, threads);
        tried += cfg.max_trials;
      }
    }
    if (!chosen) {
      report.terminated_by = Termination::exhausted;
      break;
    }

    columns.push_back(node_column(chosen->node, x));
    Matrix h(n, columns.size());
    for (std::size_t j = 0; j < columns.size(); ++j)
      for (std::size_t i = 0; i < n; ++i) h(i, j) = columns[j][i];
    beta = least_squares(h, t);
    e = matmul(h, beta) - t;
    residual = frobenius_norm(e);

    report.residual_history.push_back(residual);
    report.column_sq_history.push_back(column_sq(e));
    report.accepted_r.push_back(chosen->r_used);
    report.accepted_lambda.push_back(chosen->lambda_used);
    report.accepted_xi.push_back(chosen->xi_per_output);
    report.candidates_tried.push_back(tried);
    nodes.push_back(std::move(chosen->node));
  }

  Provenance prov{kind == NodeKind::two_d ? Builder::scn2d : Builder::scn, cfg.seed, cfg.digest()};
  return {Network(x.shape, std::move(nodes), std::move(beta), std::move(prov)), std::move(report)};
}

}  // namespace scn2d

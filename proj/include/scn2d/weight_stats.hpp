#pragma once

// Monte Carlo study of how often random input-weight vectors carry many
// near-zero coordinates under three sampling strategies:
//   M1  w ~ P^d i.i.d.
//   M2  w = z1 o z2, z1, z2 ~ P^d i.i.d. (entrywise product)
//   M3  w = vec(u v^T), u ~ P^d1, v ~ P^d2 (rank-one outer product)
// For each strategy we estimate P(#{i : |w_i| <= tau} / d >= p).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "scn2d/error.hpp"
#include "scn2d/matrix.hpp"
#include "scn2d/random.hpp"

namespace scn2d {

enum class WeightDist { uniform_pm1, standard_normal };
enum class SamplingMethod { m1, m2, m3 };

inline std::string method_name(SamplingMethod m) {
  switch (m) {
    case SamplingMethod::m1: return "M1";
    case SamplingMethod::m2: return "M2";
    case SamplingMethod::m3: return "M3";
  }
  return "?";
}

inline std::string dist_name(WeightDist d) {
  return d == WeightDist::uniform_pm1 ? "uniform" : "gaussian";
}

struct StatsSpec {
  std::size_t d1 = 28;
  std::size_t d2 = 28;
  WeightDist dist = WeightDist::uniform_pm1;
  double tau = 0.01;
  double p = 0.08;
  std::size_t trials = 100000;
  std::uint64_t seed = 0;

  std::size_t d() const noexcept { return d1 * d2; }

  void validate() const {
    if (d1 == 0 || d2 == 0) throw Error("stats: d1 and d2 must be positive");
    if (!(tau > 0.0) || !std::isfinite(tau)) throw Error("stats: tau must be positive");
    if (!(p > 0.0 && p < 1.0)) throw Error("stats: p must lie in (0,1)");
    if (trials == 0) throw Error("stats: trials must be positive");
  }
};

struct ProbabilityEstimate {
  double p_hat = 0.0;
  double std_error = 0.0;
  std::size_t hits = 0;
  std::size_t trials = 0;
};

namespace detail {

class WeightDraw {
 public:
  explicit WeightDraw(WeightDist dist) : dist_(dist) {}
  double operator()(Rng& rng) {
    return dist_ == WeightDist::uniform_pm1 ? uniform_(rng) : normal_(rng);
  }

 private:
  WeightDist dist_;
  std::uniform_real_distribution<double> uniform_{-1.0, 1.0};
  std::normal_distribution<double> normal_{0.0, 1.0};
};

/// Stream for one (distribution, method, trial) triple.
inline Rng trial_rng(std::uint64_t seed, WeightDist dist, SamplingMethod method, std::size_t trial) {
  return child_rng(seed, {static_cast<std::uint64_t>(dist), static_cast<std::uint64_t>(method), trial});
}

}  // namespace detail

inline Vector sample_weight(SamplingMethod method, std::size_t d1, std::size_t d2, WeightDist dist, Rng& rng) {
  detail::WeightDraw draw(dist);
  const std::size_t d = d1 * d2;
  Vector w(d);
  switch (method) {
    case SamplingMethod::m1:
      for (auto& x : w) x = draw(rng);
      break;
    case SamplingMethod::m2: {
      for (auto& x : w) x = draw(rng);
      for (auto& x : w) x *= draw(rng);
      break;
    }
    case SamplingMethod::m3: {
      Vector u(d1), v(d2);
      for (auto& x : u) x = draw(rng);
      for (auto& x : v) x = draw(rng);
      // vec(u v^T), column-major
      for (std::size_t j = 0; j < d2; ++j)
        for (std::size_t i = 0; i < d1; ++i) w[j * d1 + i] = u[i] * v[j];
      break;
    }
  }
  return w;
}

inline Vector sample_weight(SamplingMethod method, const StatsSpec& spec, Rng& rng) {
  return sample_weight(method, spec.d1, spec.d2, spec.dist, rng);
}

/// #{i : |w_i| <= tau} / d; 0 for an empty vector.
inline double small_fraction(std::span<const double> w, double tau) {
  if (w.empty()) return 0.0;
  std::size_t c = 0;
  for (double x : w)
    if (std::abs(x) <= tau) ++c;
  return static_cast<double>(c) / static_cast<double>(w.size());
}

inline ProbabilityEstimate make_estimate(std::size_t hits, std::size_t trials) {
  ProbabilityEstimate e;
  e.hits = hits;
  e.trials = trials;
  e.p_hat = static_cast<double>(hits) / static_cast<double>(trials);
  e.std_error = std::sqrt(e.p_hat * (1.0 - e.p_hat) / static_cast<double>(trials));
  return e;
}

/// A full (p x tau) grid for one distribution. Every cell reuses the same
/// per-trial draws, so cell (p, tau) equals estimate_probability with that
/// (p, tau) and the same seed.
struct StatsGrid {
  WeightDist dist = WeightDist::uniform_pm1;
  std::vector<double> ps;
  std::vector<double> taus;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  // cells[method][pi][ti]
  std::vector<std::vector<std::vector<ProbabilityEstimate>>> cells;

  const ProbabilityEstimate& at(SamplingMethod m, std::size_t pi, std::size_t ti) const {
    return cells[static_cast<std::size_t>(m)][pi][ti];
  }
};

inline StatsGrid estimate_grid(WeightDist dist, std::size_t d1, std::size_t d2, std::vector<double> ps,
                               std::vector<double> taus, std::size_t trials, std::uint64_t seed,
                               unsigned threads = 1) {
  for (double tau : taus) StatsSpec{d1, d2, dist, tau, 0.5, trials, seed}.validate();
  for (double p : ps) StatsSpec{d1, d2, dist, 0.5, p, trials, seed}.validate();

  const std::size_t np = ps.size(), nt = taus.size();
  StatsGrid grid{dist, ps, taus, trials, seed, {}};
  grid.cells.assign(3, std::vector<std::vector<ProbabilityEstimate>>(np, std::vector<ProbabilityEstimate>(nt)));

  // Per-thread hit counters, merged after the run; counts are order-free.
  const unsigned workers = std::max(1u, threads);
  std::vector<std::vector<std::size_t>> hits(workers, std::vector<std::size_t>(3 * np * nt, 0));
  const std::size_t chunk = (trials + workers - 1) / workers;
  parallel_for(workers, workers, [&](std::size_t t) {
    auto& local = hits[t];
    std::vector<std::size_t> counts(nt);
    const std::size_t lo = t * chunk, hi = std::min(trials, lo + chunk);
    for (std::size_t trial = lo; trial < hi; ++trial) {
      for (std::size_t mi = 0; mi < 3; ++mi) {
        const auto method = static_cast<SamplingMethod>(mi);
        Rng rng = detail::trial_rng(seed, dist, method, trial);
        const Vector w = sample_weight(method, d1, d2, dist, rng);
        for (std::size_t ti = 0; ti < nt; ++ti) counts[ti] = 0;
        for (double x : w) {
          const double a = std::abs(x);
          for (std::size_t ti = 0; ti < nt; ++ti)
            if (a <= taus[ti]) ++counts[ti];
        }
        for (std::size_t pi = 0; pi < np; ++pi)
          for (std::size_t ti = 0; ti < nt; ++ti)
            if (static_cast<double>(counts[ti]) / static_cast<double>(w.size()) >= ps[pi])
              ++local[(mi * np + pi) * nt + ti];
      }
    }
  });
  for (std::size_t mi = 0; mi < 3; ++mi)
    for (std::size_t pi = 0; pi < np; ++pi)
      for (std::size_t ti = 0; ti < nt; ++ti) {
        std::size_t total = 0;
        for (const auto& h : hits) total += h[(mi * np + pi) * nt + ti];
        grid.cells[mi][pi][ti] = make_estimate(total, trials);
      }
  return grid;
}

/// P-hat = M / trials where M counts trials with small_fraction(w, tau) >= p.
inline ProbabilityEstimate estimate_probability(SamplingMethod method, const StatsSpec& spec, unsigned threads = 1) {
  spec.validate();
  const unsigned workers = std::max(1u, threads);
  std::vector<std::size_t> hits(workers, 0);
  const std::size_t chunk = (spec.trials + workers - 1) / workers;
  parallel_for(workers, workers, [&](std::size_t t) {
    const std::size_t lo = t * chunk, hi = std::min(spec.trials, lo + chunk);
    for (std::size_t trial = lo; trial < hi; ++trial) {
      Rng rng = detail::trial_rng(spec.seed, spec.dist, method, trial);
      if (small_fraction(sample_weight(method, spec, rng), spec.tau) >= spec.p) ++hits[t];
    }
  });
  std::size_t total = 0;
  for (auto h : hits) total += h;
  return make_estimate(total, spec.trials);
}

}  // namespace scn2d

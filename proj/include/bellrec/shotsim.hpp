#pragma once

// Photon-counting emulation: Poisson coincidence counts per measurement
// setting, correlator and CHSH estimates with first-order error propagation,
// and the blocked-path estimate of the mixing probability.

#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "bellrec/chsh.hpp"
#include "bellrec/errors.hpp"
#include "bellrec/qmat.hpp"
#include "bellrec/states.hpp"
#include "bellrec/strategies.hpp"

namespace bellrec {

struct ShotConfig {
  double mean_counts_per_setting = 1e5;
  std::uint64_t seed = 0;
  std::size_t n_repeats = 1;

  // Gaussian propagation is meaningless for very small counts.
  void validate() const {
    if (!(mean_counts_per_setting >= 100.0))
      throw InvalidArgument("shot config: mean_counts_per_setting must be >= 100");
    if (n_repeats == 0) throw InvalidArgument("shot config: n_repeats must be positive");
  }
};

/// Coincidence counts for the joint outcomes ++, +-, -+, -- (in that order).
struct CountRecord {
  std::array<std::uint64_t, 4> n{};

  std::uint64_t total() const { return n[0] + n[1] + n[2] + n[3]; }
};

struct Estimate {
  double value = 0.0;
  double sigma = 0.0;
};

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Independent stream per (seed, repeat, component, setting); the draw order
/// inside one task never depends on any other task.
inline Rng derive_stream(std::uint64_t seed, std::uint64_t repeat, std::uint64_t component, std::uint64_t setting) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ repeat);
  h = splitmix64(h ^ component);
  h = splitmix64(h ^ setting);
  return Rng(h);
}

/// q_ij = Tr((P_i^a ⊗ P_j^b) rho) with P_{±} = (I ± O)/2.
inline std::array<double, 4> outcome_probabilities(const TwoQubitState& state, const Mat2& a, const Mat2& b) {
  const Mat2 id = Mat2::identity();
  const std::array<Mat2, 2> pa{0.5 * (id + a), 0.5 * (id - a)};
  const std::array<Mat2, 2> pb{0.5 * (id + b), 0.5 * (id - b)};
  std::array<double, 4> q{};
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) {
      double v = trace_of_product(kron(pa[i], pb[j]), state.rho()).real();
      if (v < -1e-9) throw NumericalFailure("outcome probability is negative");
      q[2 * i + j] = std::max(v, 0.0);
    }
  return q;
}

inline CountRecord sample_counts(const TwoQubitState& state, const Mat2& a, const Mat2& b, double mean, Rng& rng) {
  const auto q = outcome_probabilities(state, a, b);
  CountRecord c;
  for (std::size_t k = 0; k < 4; ++k) {
    const double lambda = mean * q[k];
    if (lambda > 0.0) {
      std::poisson_distribution<std::uint64_t> dist(lambda);
      c.n[k] = dist(rng);
    }
  }
  return c;
}

inline CountRecord sample_counts(const TwoQubitState& state, const Mat2& a, const Mat2& b, const ShotConfig& cfg,
                                 Rng& rng) {
  cfg.validate();
  return sample_counts(state, a, b, cfg.mean_counts_per_setting, rng);
}

/// E = (N++ - N+- - N-+ + N--)/N, sigma^2 = sum_ij (dE/dN_ij)^2 N_ij.
inline Estimate estimate_correlator(const CountRecord& c) {
  const auto total = static_cast<double>(c.total());
  if (total <= 0.0) throw InvalidArgument("estimate_correlator: no counts");
  constexpr std::array<double, 4> sign{1.0, -1.0, -1.0, 1.0};
  double e = 0.0;
  for (std::size_t k = 0; k < 4; ++k) e += sign[k] * static_cast<double>(c.n[k]);
  e /= total;
  double var = 0.0;
  for (std::size_t k = 0; k < 4; ++k) {
    const double d = (sign[k] - e) / total;
    var += d * d * static_cast<double>(c.n[k]);
  }
  return {e, std::sqrt(var)};
}

/// Mixing probability of path 1 from blocked-path totals, P1/(P1+P2).
inline Estimate estimate_p(const CountRecord& path1, const CountRecord& path2) {
  const auto p1 = static_cast<double>(path1.total());
  const auto p2 = static_cast<double>(path2.total());
  const double t = p1 + p2;
  if (t <= 0.0) throw InvalidArgument("estimate_p: no counts on either path");
  return {p1 / t, std::sqrt(p1 * p2 / (t * t * t))};
}

struct ComponentEstimate {
  StrategyCase strategy;
  double probability = 0.0;  // configured
  Estimate s_ab;
  Estimate s_ac;
  CountRecord path_block;  // HH/HV/VH/VV counts with the other paths blocked
};

struct ExperimentResult {
  Estimate s_ab;
  Estimate s_ac;
  Estimate p_hat;  // of the first component
  std::vector<ComponentEstimate> components;
};

namespace detail {

inline Estimate estimate_chsh(const TwoQubitState& state, const ObservablePair& first, const ObservablePair& second,
                              double mean, std::uint64_t seed, std::uint64_t repeat, std::uint64_t component,
                              std::uint64_t setting_offset) {
  double value = 0.0, var = 0.0;
  for (std::size_t x = 0; x < 2; ++x)
    for (std::size_t y = 0; y < 2; ++y) {
      Rng rng = derive_stream(seed, repeat, component, setting_offset + 2 * x + y);
      const Estimate e = estimate_correlator(sample_counts(state, first[x], second[y], mean, rng));
      value += (x == 1 && y == 1) ? -e.value : e.value;
      var += e.sigma * e.sigma;
    }
  return {value, std::sqrt(var)};
}

}  // namespace detail

/// One emulated run of a mixed strategy. Each component is a path whose
/// per-setting mean is scaled by its probability; Charlie's statistics come
/// from the relayed state. Component CHSH values are combined with the
/// probabilities estimated from the blocked-path totals, and the uncertainty
/// of those probabilities is propagated too.
inline ExperimentResult run_experiment(const TwoQubitState& state, const MixedStrategy& strategy,
                                       const ShotConfig& cfg, std::uint64_t repeat = 0) {
  cfg.validate();
  ExperimentResult r;
  const auto& comps = strategy.components();
  for (std::size_t k = 0; k < comps.size(); ++k) {
    if (comps[k].probability <= 0.0) continue;
    const double mean = cfg.mean_counts_per_setting * comps[k].probability;
    const OperatorSet ops = build_operators(comps[k].strategy);
    const TwoQubitState relayed = luders_relay(state, ops);

    ComponentEstimate ce;
    ce.strategy = comps[k].strategy;
    ce.probability = comps[k].probability;
    ce.s_ab = detail::estimate_chsh(state, ops.alice, ops.bob, mean, cfg.seed, repeat, k, 0);
    ce.s_ac = detail::estimate_chsh(relayed, ops.alice, ops.charlie, mean, cfg.seed, repeat, k, 4);
    Rng rng = derive_stream(cfg.seed, repeat, k, 8);
    ce.path_block = sample_counts(relayed, pauli::sigma3(), pauli::sigma3(), mean, rng);
    r.components.push_back(ce);
  }
  if (r.components.empty()) throw InvalidArgument("run_experiment: no component with positive probability");

  double total = 0.0;
  for (const auto& c : r.components) total += static_cast<double>(c.path_block.total());
  if (total <= 0.0) throw NumericalFailure("run_experiment: no path counts");

  CountRecord rest;
  for (std::size_t k = 1; k < r.components.size(); ++k)
    for (std::size_t i = 0; i < 4; ++i) rest.n[i] += r.components[k].path_block.n[i];
  r.p_hat = estimate_p(r.components.front().path_block, rest);

  auto combine = [&](auto member) {
    double value = 0.0;
    for (const auto& c : r.components)
      value += static_cast<double>(c.path_block.total()) / total * (c.*member).value;
    double var = 0.0;
    for (const auto& c : r.components) {
      const double p_hat = static_cast<double>(c.path_block.total()) / total;
      const double s = (c.*member).sigma;
      const double lever = ((c.*member).value - value) / total;
      var += p_hat * p_hat * s * s + lever * lever * static_cast<double>(c.path_block.total());
    }
    return Estimate{value, std::sqrt(var)};
  };
  r.s_ab = combine(&ComponentEstimate::s_ab);
  r.s_ac = combine(&ComponentEstimate::s_ac);
  return r;
}

inline std::vector<ExperimentResult> run_repeats(const TwoQubitState& state, const MixedStrategy& strategy,
                                                 const ShotConfig& cfg) {
  cfg.validate();
  std::vector<ExperimentResult> out;
  out.reserve(cfg.n_repeats);
  for (std::size_t i = 0; i < cfg.n_repeats; ++i) out.push_back(run_experiment(state, strategy, cfg, i));
  return out;
}

}  // namespace bellrec

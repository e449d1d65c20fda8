#pragma once

// CHSH values: numerically from operators, from the closed forms of the three
// deterministic strategies, and mixed under shared randomness.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "bellrec/errors.hpp"
#include "bellrec/qmat.hpp"
#include "bellrec/states.hpp"
#include "bellrec/strategies.hpp"

namespace bellrec {

inline constexpr double kTsirelson = 2.0 * std::numbers::sqrt2;
inline constexpr double kClassicalBound = 2.0;

enum class Role { AB, AC };

struct ChshPair {
  double s_ab = 0.0;
  double s_ac = 0.0;
};

/// Re Tr((a ⊗ b)·rho). The imaginary residue must stay below 1e-10.
inline double correlator(const TwoQubitState& state, const Mat2& a, const Mat2& b) {
  const cplx t = trace_of_product(kron(a, b), state.rho());
  if (std::abs(t.imag()) > 1e-10) throw NumericalFailure("correlator: imaginary residue " + std::to_string(t.imag()));
  return t.real();
}

/// E(0,0) + E(0,1) + E(1,0) - E(1,1).
inline double chsh_numeric(const TwoQubitState& state, const ObservablePair& first, const ObservablePair& second) {
  double s = 0.0;
  for (std::size_t x = 0; x < 2; ++x)
    for (std::size_t y = 0; y < 2; ++y) {
      const double e = correlator(state, first[x], second[y]);
      s += (x == 1 && y == 1) ? -e : e;
    }
  return s;
}

/// Both CHSH values of one deterministic strategy; the Alice–Charlie value goes
/// through the relay channel.
inline ChshPair evaluate_case(const TwoQubitState& state, const StrategyCase& sc) {
  const OperatorSet ops = build_operators(sc);
  const TwoQubitState relayed = luders_relay(state, ops);
  return {chsh_numeric(state, ops.alice, ops.bob), chsh_numeric(relayed, ops.alice, ops.charlie)};
}

/// Closed-form CHSH values on the pure family state. For case 2 the setting is
/// ignored and Charlie's angle is taken to be optimal_chi(phi_state).
inline double closed_form(Case lambda, Role role, double phi_state, double setting) {
  const double s2 = std::sin(2.0 * phi_state);
  switch (lambda) {
    case Case::basis_projection:
      return role == Role::AB ? 2.0 * std::cos(setting) * s2 + 2.0 * std::sin(setting) : 2.0 * std::sin(setting);
    case Case::identity_measurement:
      return role == Role::AB ? 2.0 * std::cos(2.0 * phi_state) : 2.0 * std::sqrt(1.0 + s2 * s2);
    case Case::mixed:
      return role == Role::AB ? 2.0 * std::sin(setting + 2.0 * phi_state)
                              : std::sin(setting) + 2.0 * std::cos(setting) * s2;
  }
  throw InvalidArgument("closed_form: invalid strategy case");
}

inline ChshPair closed_form_pair(Case lambda, double phi_state, double setting) {
  return {closed_form(lambda, Role::AB, phi_state, setting), closed_form(lambda, Role::AC, phi_state, setting)};
}

struct Weighted {
  double value = 0.0;
  double probability = 0.0;
};

namespace detail {

inline void check_distribution(std::span<const double> probabilities) {
  if (probabilities.empty()) throw InvalidArgument("empty probability distribution");
  double sum = 0.0;
  for (const double p : probabilities) {
    if (!(p >= 0.0)) throw InvalidArgument("negative probability");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-12) throw InvalidArgument("probabilities do not sum to 1");
}

}  // namespace detail

/// Convex combination sum_k p_k·value_k.
inline double mix(std::span<const Weighted> values) {
  std::vector<double> ps;
  ps.reserve(values.size());
  for (const auto& w : values) ps.push_back(w.probability);
  detail::check_distribution(ps);
  double s = 0.0;
  for (const auto& w : values) s += w.probability * w.value;
  return s;
}

inline double mix(std::initializer_list<Weighted> values) {
  return mix(std::span<const Weighted>(values.begin(), values.size()));
}

/// Shared-randomness distribution over distinct deterministic strategies.
class MixedStrategy {
 public:
  struct Component {
    StrategyCase strategy;
    double probability = 0.0;
  };

  explicit MixedStrategy(std::vector<Component> components) : components_(std::move(components)) {
    if (components_.size() > 3) throw InvalidArgument("mixed strategy: at most 3 components");
    std::vector<double> ps;
    for (std::size_t i = 0; i < components_.size(); ++i) {
      ps.push_back(components_[i].probability);
      for (std::size_t j = 0; j < i; ++j)
        if (components_[i].strategy.lambda == components_[j].strategy.lambda)
          throw InvalidArgument("mixed strategy: repeated case");
    }
    detail::check_distribution(ps);
  }

  /// p·first + (1-p)·second.
  static MixedStrategy binary(const StrategyCase& first, const StrategyCase& second, double p) {
    return MixedStrategy({{first, p}, {second, 1.0 - p}});
  }

  const std::vector<Component>& components() const { return components_; }

 private:
  std::vector<Component> components_;
};

inline ChshPair evaluate(const TwoQubitState& state, const MixedStrategy& strategy) {
  ChshPair s;
  for (const auto& c : strategy.components()) {
    const ChshPair v = evaluate_case(state, c.strategy);
    s.s_ab += c.probability * v.s_ab;
    s.s_ac += c.probability * v.s_ac;
  }
  return s;
}

inline ChshPair mix_pairs(const ChshPair& first, const ChshPair& second, double p) {
  return {p * first.s_ab + (1.0 - p) * second.s_ab, p * first.s_ac + (1.0 - p) * second.s_ac};
}

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

/// S_AB interval over which tradeoff_closed_form is defined for the case.
inline Range tradeoff_domain(Case lambda, double phi_state) {
  const double s2 = std::sin(2.0 * phi_state);
  switch (lambda) {
    case Case::basis_projection: return {0.0, 2.0 * std::sqrt(1.0 + s2 * s2)};
    case Case::identity_measurement: return {0.0, kTsirelson};
    case Case::mixed: return {-2.0, 2.0};
  }
  throw InvalidArgument("tradeoff_domain: invalid strategy case");
}

/// S_AC as a function of S_AB along each deterministic strategy's optimal
/// trade-off curve.
///
/// Case 1 follows the branch phi_meas >= pi/2 - arctan(sin 2phi); case 3 the
/// branch cos(theta + 2phi) <= 0. These are the arcs the four-segment
/// frontier uses.
inline double tradeoff_closed_form(Case lambda, double phi_state, double s_ab) {
  const Range dom = tradeoff_domain(lambda, phi_state);
  constexpr double slack = 1e-9;
  if (!(s_ab >= dom.lo - slack && s_ab <= dom.hi + slack))
    throw InvalidArgument("tradeoff_closed_form: s_ab outside the achievable range");

  const double s2 = std::sin(2.0 * phi_state);
  const double c2 = std::cos(2.0 * phi_state);
  const auto root = [](double v) { return std::sqrt(std::max(0.0, v)); };
  switch (lambda) {
    case Case::basis_projection:
      return (s_ab + s2 * root(4.0 + 4.0 * s2 * s2 - s_ab * s_ab)) / (1.0 + s2 * s2);
    case Case::identity_measurement:
      return root(8.0 - s_ab * s_ab);
    case Case::mixed:
      return s2 * root(1.0 - s_ab * s_ab / 4.0) * (1.0 - 2.0 * c2) + (s_ab / 2.0) * (2.0 * s2 * s2 + c2);
  }
  throw InvalidArgument("tradeoff_closed_form: invalid strategy case");
}

}  // namespace bellrec

#pragma once

// The three deterministic projective strategies and the relay channel that
// carries Bob's post-measurement qubit on to Charlie.

#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "bellrec/errors.hpp"
#include "bellrec/qmat.hpp"
#include "bellrec/states.hpp"

namespace bellrec {

enum class Case : int {
  basis_projection = 1,      // Bob measures both inputs
  identity_measurement = 2,  // Bob measures nothing
  mixed = 3,                 // Bob measures on input 1 only
};

inline Case case_from_int(int lambda) {
  if (lambda < 1 || lambda > 3) throw InvalidArgument("strategy case must be 1, 2 or 3, got " + std::to_string(lambda));
  return static_cast<Case>(lambda);
}

inline int to_int(Case c) { return static_cast<int>(c); }

/// Free angles of the strategies. Only the member belonging to the case is read:
/// phi_meas for case 1, chi for case 2, theta for case 3.
struct Settings {
  double phi_meas = 0.0;
  double chi = 0.0;
  double theta = 0.0;
};

struct StrategyCase {
  Case lambda = Case::basis_projection;
  Settings settings;

  static StrategyCase with_setting(Case c, double angle) {
    StrategyCase s{c, {}};
    s.setting() = angle;
    return s;
  }

  double& setting() {
    switch (lambda) {
      case Case::basis_projection: return settings.phi_meas;
      case Case::identity_measurement: return settings.chi;
      case Case::mixed: return settings.theta;
    }
    throw InvalidArgument("invalid strategy case");
  }
  double setting() const {
    switch (lambda) {
      case Case::basis_projection: return settings.phi_meas;
      case Case::identity_measurement: return settings.chi;
      case Case::mixed: return settings.theta;
    }
    throw InvalidArgument("invalid strategy case");
  }
};

/// Dichotomic observables indexed by the party's binary input.
using ObservablePair = std::array<Mat2, 2>;

struct OperatorSet {
  ObservablePair alice;
  ObservablePair bob;
  std::array<Mat2, 2> bob_unitaries;
  ObservablePair charlie;
};

inline OperatorSet build_operators(const StrategyCase& sc) {
  using namespace pauli;
  const Mat2 id = identity();
  OperatorSet ops;
  switch (sc.lambda) {
    case Case::basis_projection: {
      const double phi = sc.settings.phi_meas;
      ops.alice = {sigma1(), sigma3()};
      ops.bob = {xz_observable(phi), std::cos(phi) * sigma1() - std::sin(phi) * sigma3()};
      ops.bob_unitaries = {id, rot_sigma2(phi - std::numbers::pi / 2.0)};
      ops.charlie = {xz_observable(phi), -xz_observable(phi)};
      return ops;
    }
    case Case::identity_measurement: {
      const double chi = sc.settings.chi;
      ops.alice = {sigma3(), sigma1()};
      ops.bob = {id, id};
      ops.bob_unitaries = {id, id};
      ops.charlie = {xz_observable(chi), -std::cos(chi) * sigma1() + std::sin(chi) * sigma3()};
      return ops;
    }
    case Case::mixed: {
      const double theta = sc.settings.theta;
      ops.alice = {xz_observable(theta), -std::cos(theta) * sigma1() + std::sin(theta) * sigma3()};
      ops.bob = {id, sigma1()};
      ops.bob_unitaries = {id, id};
      ops.charlie = {sigma3(), sigma1()};
      return ops;
    }
  }
  throw InvalidArgument("build_operators: invalid strategy case");
}

struct ChiChoice {
  double chi = 0.0;
  bool degenerate = false;  // phi_state == 0, where csc(2 phi) diverges
};

/// Charlie's best case-2 angle, arctan(csc(2·phi_state)).
inline ChiChoice optimal_chi(double phi_state) {
  if (!(phi_state >= 0.0 && phi_state <= kMaxStateAngle + 1e-12))
    throw InvalidArgument("optimal_chi: phi_state outside [0, pi/4]");
  const double s = std::sin(2.0 * phi_state);
  if (s <= 0.0) return {std::numbers::pi / 2.0, true};
  return {std::atan(1.0 / s), false};
}

inline StrategyCase optimal_case2(double phi_state) {
  return StrategyCase::with_setting(Case::identity_measurement, optimal_chi(phi_state).chi);
}

/// Effective Alice–Charlie state after Bob's measurement and correction,
/// averaged uniformly over Bob's input y:
///   sum_{y,b} (I ⊗ U_y sqrt(B_{b|y})) rho (I ⊗ U_y sqrt(B_{b|y}))† / 2
/// with B_{b|y} = (I + b·B_y)/2.
inline TwoQubitState luders_relay(const TwoQubitState& state, const OperatorSet& ops) {
  const Mat2 id = Mat2::identity();
  const Mat4& rho = state.rho();
  Mat4 out;
  for (std::size_t y = 0; y < 2; ++y) {
    for (const double b : {1.0, -1.0}) {
      const Mat2 effect = 0.5 * (id + b * ops.bob[y]);
      Mat2 root;
      try {
        root = sqrt_psd(effect);
      } catch (const NotPsdError& e) {
        throw NumericalFailure(std::string("luders_relay: ") + e.what());
      }
      const Mat4 k = kron(id, ops.bob_unitaries[y] * root);
      out += k * rho * k.adjoint();
    }
  }
  out *= 0.5;
  if (std::abs(out.trace() - 1.0) > 1e-10) throw NumericalFailure("luders_relay: trace not preserved");
  return TwoQubitState(0.5 * (out + out.adjoint()));
}

}  // namespace bellrec

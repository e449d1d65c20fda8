#pragma once

#include <array>
#include <cmath>
#include <numbers>

#include "bellrec/errors.hpp"
#include "bellrec/qmat.hpp"

namespace bellrec {

inline constexpr double kMaxStateAngle = std::numbers::pi / 4.0;

inline double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

/// Family cos(phi)|00> + sin(phi)|11>, phi in [0, pi/4], mixed with white
/// noise of weight noise_v.
struct StateSpec {
  double phi_state = kMaxStateAngle;
  double noise_v = 0.0;
};

/// A validated two-qubit density matrix.
class TwoQubitState {
 public:
  static constexpr double kHermitianTol = 1e-12;
  static constexpr double kTraceTol = 1e-9;
  static constexpr double kPsdTol = 1e-9;

  // Throws NumericalFailure if rho is not a density matrix within tolerance.
  explicit TwoQubitState(const Mat4& rho) : rho_(rho) {
    if (hermiticity_error(rho) > kHermitianTol) throw NumericalFailure("state: rho is not Hermitian");
    if (std::abs(rho.trace() - 1.0) > kTraceTol) throw NumericalFailure("state: trace is not 1");
    if (min_eigenvalue(rho) < -kPsdTol) throw NumericalFailure("state: rho is not positive semidefinite");
  }

  const Mat4& rho() const { return rho_; }

 private:
  Mat4 rho_;
};

inline std::array<double, 4> family_ket(double phi) {
  return {std::cos(phi), 0.0, 0.0, std::sin(phi)};
}

inline TwoQubitState prepare(const StateSpec& spec) {
  constexpr double slack = 1e-12;
  if (!(spec.phi_state >= -slack && spec.phi_state <= kMaxStateAngle + slack))
    throw InvalidArgument("prepare: phi_state outside [0, pi/4]");
  if (!(spec.noise_v >= 0.0 && spec.noise_v <= 1.0))
    throw InvalidArgument("prepare: noise_v outside [0, 1]");

  const auto psi = family_ket(spec.phi_state);
  Mat4 rho;
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) rho(i, j) = (1.0 - spec.noise_v) * psi[i] * psi[j];
  for (std::size_t i = 0; i < 4; ++i) rho(i, i) += spec.noise_v / 4.0;
  return TwoQubitState(rho);
}

/// <psi_target| rho |psi_target> for the pure family member at phi_target.
inline double fidelity_to_pure(const TwoQubitState& state, double phi_target) {
  const auto psi = family_ket(phi_target);
  cplx f = 0.0;
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) f += psi[i] * state.rho()(i, j) * psi[j];
  return std::clamp(f.real(), 0.0, 1.0);
}

}  // namespace bellrec

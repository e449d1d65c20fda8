// Walks through the main library entry points for a maximally entangled and a
// partially entangled source.

#include <iomanip>
#include <iostream>
#include <numbers>

#include "bellrec/bellrec.hpp"

using namespace bellrec;

namespace {

void report_pair(double phi_deg, Case first, Case second) {
  const double phi = deg_to_rad(phi_deg);
  const EqualPointResult r = equal_point(phi, first, second);
  std::cout << "phi_state " << phi_deg << " deg, cases (" << to_int(first) << "," << to_int(second) << "): "
            << "settings " << rad_to_deg(r.first.setting()) << " / " << rad_to_deg(r.second.setting()) << " deg, "
            << "p* " << r.p_star << ", S* " << r.s_star;
  if (const auto iv = violation_interval(phi, r.first, r.second))
    std::cout << ", both violate for p in [" << iv->lo << ", " << iv->hi << "]";
  std::cout << '\n';
}

}  // namespace

int main() {
  std::cout << std::setprecision(6);

  // Deterministic strategies on a Bell state.
  const TwoQubitState bell = prepare({std::numbers::pi / 4, 0.0});
  const ChshPair c1 = evaluate_case(bell, StrategyCase::with_setting(Case::basis_projection, deg_to_rad(75)));
  std::cout << "case 1 at 75 deg: S_AB " << c1.s_ab << ", S_AC " << c1.s_ac << '\n';

  // Best equal violation for each useful pair.
  report_pair(45.0, Case::basis_projection, Case::identity_measurement);
  report_pair(45.0, Case::basis_projection, Case::mixed);
  report_pair(34.08, Case::basis_projection, Case::identity_measurement);
  report_pair(41.48, Case::basis_projection, Case::mixed);

  // Frontier of all strategies.
  const FrontierCurve curve = full_frontier(deg_to_rad(41.48), 200);
  std::cout << "frontier at 41.48 deg: s_ab in [" << curve.s_ab_min() << ", " << curve.s_ab_max() << "], segments";
  for (const Segment s : curve.segment_order()) std::cout << ' ' << to_string(s);
  std::cout << '\n';

  // One emulated experiment with white noise on the source.
  const EqualPointResult r = equal_point(std::numbers::pi / 4, Case::basis_projection, Case::identity_measurement);
  const TwoQubitState noisy = prepare({std::numbers::pi / 4, 0.0196});
  const ExperimentResult e =
      run_experiment(noisy, MixedStrategy::binary(r.first, r.second, r.p_star), ShotConfig{1e6, 2024, 1});
  std::cout << "emulated run, fidelity " << fidelity_to_pure(noisy, std::numbers::pi / 4) << ": S_AB " << e.s_ab.value
            << " +- " << e.s_ab.sigma << ", S_AC " << e.s_ac.value << " +- " << e.s_ac.sigma << ", p " << e.p_hat.value
            << " +- " << e.p_hat.sigma << '\n';
}

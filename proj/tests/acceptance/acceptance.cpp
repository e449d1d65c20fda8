// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "bellrec/bellrec.hpp"
#include "test_support.hpp"

using namespace bellrec;

namespace {

constexpr double kPi = std::numbers::pi;
const double kSqrt2 = std::numbers::sqrt2;
const double kSqrt3 = std::sqrt(3.0);

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Largest |S| seen anywhere in the suite.
double g_max_abs_s = 0.0;

void track(const ChshPair& s) { g_max_abs_s = std::max({g_max_abs_s, std::abs(s.s_ab), std::abs(s.s_ac)}); }

struct Report {
  int failed = 0;

  void line(int id, bool ok, const std::string& detail) {
    std::printf("%s criterion %d: %s\n", ok ? "PASS" : "FAIL", id, detail.c_str());
    if (!ok) ++failed;
  }
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

void criterion1(Report& rep) {
  const auto t0 = Clock::now();
  const auto r = equal_point(kPi / 4, Case::basis_projection, Case::identity_measurement);
  const double elapsed = seconds_since(t0);
  const double ds = std::abs(r.s_star - 2 * kSqrt2 * (kSqrt3 - 1));
  const double dp = std::abs(r.p_star - (6 - 2 * kSqrt3) / 3);
  const double da = std::abs(rad_to_deg(r.first.setting()) - 75.0);
  const double dc = std::abs(rad_to_deg(r.second.setting()) - 45.0);
  track(r.first_point);
  track(r.second_point);
  rep.line(1, ds <= 1e-6 && dp <= 1e-6 && da <= 0.05 && dc <= 0.05 && elapsed < 10.0,
           fmt("ME (1,2) equal point |ds|=%.2e |dp|=%.2e, angle errors %.4f deg / %.4f deg", ds, dp, da, dc) +
               fmt(", %.2f s", elapsed));
}

void criterion2(Report& rep) {
  const auto r = equal_point(kPi / 4, Case::basis_projection, Case::identity_measurement);
  const auto iv = violation_interval(kPi / 4, r.first, r.second);
  if (!iv) {
    rep.line(2, false, "ME (1,2) violation interval is empty");
    return;
  }
  const double dlo = std::abs(iv->lo - 2 / std::sqrt(6.0));
  const double dhi = std::abs(iv->hi - (4 - 2 * kSqrt2) / (3 - kSqrt3));
  rep.line(2, dlo <= 1e-6 && dhi <= 1e-6,
           fmt("ME (1,2) violation interval [%.7f, %.7f], errors %.2e / %.2e", iv->lo, iv->hi, dlo, dhi));
}

void criterion3(Report& rep) {
  const auto r13 = equal_point(kPi / 4, Case::basis_projection, Case::mixed);
  const auto r12 = equal_point(kPi / 4, Case::basis_projection, Case::identity_measurement);
  const double da = std::abs(rad_to_deg(r13.first.setting()) - 71.57);
  const double dt = std::abs(rad_to_deg(r13.second.setting()) - 18.43);
  const double ds = std::abs(r13.s_star - 2 * std::sqrt(10.0) / 3);
  const double dp = std::abs(r13.p_star - 1.0 / 3.0);
  track(r13.first_point);
  track(r13.second_point);
  rep.line(3, da <= 0.05 && dt <= 0.05 && ds <= 1e-6 && dp <= 1e-6 && r13.s_star > r12.s_star,
           fmt("ME (1,3) angle errors %.4f deg / %.4f deg, |ds|=%.2e |dp|=%.2e", da, dt, ds, dp) +
               fmt(", s*(1,3)=%.7f > s*(1,2)=%.7f", r13.s_star, r12.s_star));
}

void criterion4(Report& rep) {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> phi_dist(0.0, kPi / 4);
  std::uniform_real_distribution<double> angle(-kPi, kPi);
  std::uniform_int_distribution<int> lambda(1, 3);
  int failures = 0;
  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const double phi = phi_dist(rng);
    const Case c = case_from_int(lambda(rng));
    // the case-2 closed form assumes Charlie's optimal rotation
    const double setting = c == Case::identity_measurement ? optimal_chi(phi).chi : angle(rng);
    const ChshPair numeric = evaluate_case(prepare({phi, 0.0}), StrategyCase::with_setting(c, setting));
    const ChshPair exact = closed_form_pair(c, phi, setting);
    track(numeric);
    const double err = std::max(std::abs(numeric.s_ab - exact.s_ab), std::abs(numeric.s_ac - exact.s_ac));
    worst = std::max(worst, err);
    if (err > 1e-10) ++failures;
  }
  const double elapsed = seconds_since(t0);
  rep.line(4, failures == 0 && elapsed < 30.0,
           fmt("1000 closed-form vs numeric tuples, %.0f failures, worst %.2e, %.2f s", failures, worst, elapsed));
}

void criterion5(Report& rep) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> phi_dist(0.0, kPi / 4);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst = 0.0;
  for (const Case c : {Case::basis_projection, Case::identity_measurement, Case::mixed}) {
    for (int t = 0; t < 200; ++t) {
      const double phi = phi_dist(rng);
      const double s2 = std::sin(2 * phi);
      double setting = 0.0;
      if (c == Case::basis_projection) {
        const double lo = kPi / 2 - std::atan(s2);
        setting = lo + unit(rng) * (kPi / 2 - lo);
      } else if (c == Case::mixed) {
        const double lo = kPi / 2 - 2 * phi;
        setting = lo + unit(rng) * (kPi / 2 - lo);
      }
      const ChshPair s = closed_form_pair(c, phi, setting);
      worst = std::max(worst, std::abs(tradeoff_closed_form(c, phi, s.s_ab) - s.s_ac));
    }
  }
  double circle = 0.0;
  for (int k = 0; k < 100; ++k) {
    const double phi = kPi / 4 * k / 99.0;
    const ChshPair s = closed_form_pair(Case::identity_measurement, phi, 0.0);
    circle = std::max(circle, std::abs(s.s_ab * s.s_ab + s.s_ac * s.s_ac - 8.0));
  }
  rep.line(5, worst <= 1e-9 && circle <= 1e-10,
           fmt("trade-off curves vs parametric pairs worst %.2e (tol 1e-9), case-2 circle worst %.2e (tol 1e-10)",
               worst, circle));
}

void criterion6(Report& rep) {
  const auto me = full_frontier(kPi / 4, 2000);
  const auto pe = full_frontier(deg_to_rad(41.48), 2000);
  for (const auto& pt : me.points) track({pt.s_ab, pt.s_ac});
  for (const auto& pt : pe.points) track({pt.s_ab, pt.s_ac});
  double best_gap = -1.0, at = 0.0;
  for (int k = 0; k <= 1100; ++k) {
    const double x = 2.0 + 0.11 * k / 1100.0;
    const auto a = me.value_at(x), b = pe.value_at(x);
    if (!a || !b || *a <= 2.0 || *b <= 2.0) continue;
    if (*b - *a > best_gap) {
      best_gap = *b - *a;
      at = x;
    }
  }
  const bool frontier_ok = best_gap > 0.0;

  const double area_pe = region_map(deg_to_rad(34.08), Case::basis_projection, Case::identity_measurement).area_fraction();
  const double area_me = region_map(kPi / 4, Case::basis_projection, Case::identity_measurement).area_fraction();
  const bool area_ok = area_pe > area_me;

  const double phi = deg_to_rad(34.08);
  const ChshPair c2 = evaluate_case(prepare({phi, 0.0}), optimal_case2(phi));
  track(c2);
  const auto me_at = me.value_at(c2.s_ab);
  const bool point_ok = std::abs(c2.s_ac - 2.7289) <= 1e-3 && std::abs(c2.s_ab - 0.7444) <= 1e-3 && me_at &&
                        c2.s_ac > *me_at;

  rep.line(6, frontier_ok && area_ok && point_ok,
           fmt("PE frontier beats ME by %.4f at s_ab=%.4f; ", best_gap, at) +
               fmt("region area %.4f (34.08 deg) vs %.4f (45 deg); ", area_pe, area_me) +
               fmt("case-2 point (%.4f, %.4f) vs ME frontier %.4f", c2.s_ab, c2.s_ac, me_at.value_or(NAN)));
}

void criterion7(Report& rep) {
  const auto t0 = Clock::now();
  const auto state = prepare({kPi / 4, 0.0});
  const auto r = equal_point(state, Case::basis_projection, Case::identity_measurement);
  const MixedStrategy strategy = MixedStrategy::binary(r.first, r.second, r.p_star);
  const double target = 2.0706;

  const auto runs = run_repeats(state, strategy, ShotConfig{1e5, 77, 100});
  bool ok = true;
  std::string detail = "100 runs at 1e5:";
  for (const auto member : {&ExperimentResult::s_ab, &ExperimentResult::s_ac}) {
    double sum = 0.0, sq = 0.0;
    int covered = 0;
    for (const auto& e : runs) {
      const Estimate& v = e.*member;
      sum += v.value;
      sq += v.value * v.value;
      if (std::abs(v.value - target) <= v.sigma) ++covered;
    }
    const double n = static_cast<double>(runs.size());
    const double mean = sum / n;
    const double se = std::sqrt((sq - n * mean * mean) / (n - 1) / n);
    const double z = std::abs(mean - target) / se;
    const double coverage = covered / n;
    ok = ok && z <= 4.0 && coverage >= 0.55 && coverage <= 0.80;
    detail += member == &ExperimentResult::s_ab ? " S_AB" : " S_AC";
    detail += fmt(" mean %.5f (%.2f SE), coverage %.0f%%;", mean, z, 100 * coverage);
  }

  double lo_sigma = 0.0, hi_sigma = 0.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    lo_sigma += run_experiment(state, strategy, ShotConfig{1e5, 1000 + seed, 1}).s_ac.sigma;
    hi_sigma += run_experiment(state, strategy, ShotConfig{1e7, 1000 + seed, 1}).s_ac.sigma;
  }
  const double ratio = lo_sigma / hi_sigma;
  const double elapsed = seconds_since(t0);
  ok = ok && std::abs(ratio - 10.0) <= 1.0 && elapsed < 120.0;
  rep.line(7, ok, detail + fmt(" sigma ratio over 100x counts %.3f, %.2f s", ratio, elapsed));
}

void criterion8(Report& rep) {
  const double f = fidelity_to_pure(prepare({kPi / 4, 0.0196}), kPi / 4);
  rep.line(8, std::abs(f - 0.9853) <= 1e-4, fmt("fidelity at v=0.0196 is %.6f", f));
}

void criterion9(Report& rep) {
  std::mt19937_64 rng(9);
  double trace_err = 0.0, psd_err = 0.0, identity_err = 0.0;
  for (int t = 0; t < 10000; ++t) {
    const TwoQubitState rho = testing_support::random_state(rng);
    const OperatorSet ops = testing_support::random_operators(rng);
    const TwoQubitState out = luders_relay(rho, ops);
    trace_err = std::max(trace_err, std::abs(out.rho().trace().real() - 1.0));
    psd_err = std::max(psd_err, -min_eigenvalue(out.rho()));
    track({chsh_numeric(rho, ops.alice, ops.bob), chsh_numeric(out, ops.alice, ops.charlie)});

    const OperatorSet id = build_operators(StrategyCase::with_setting(Case::identity_measurement, 0.001 * t));
    identity_err = std::max(identity_err, max_abs_diff(luders_relay(rho, id).rho(), rho.rho()));
  }
  const bool ok = trace_err <= 1e-10 && psd_err <= 1e-9 && identity_err <= 1e-12 && g_max_abs_s <= kTsirelson + 1e-9;
  rep.line(9, ok,
           fmt("relay trace error %.2e, most negative eigenvalue %.2e, case-2 identity error %.2e, ", trace_err, -psd_err,
               identity_err) +
               fmt("max |S| %.12f vs 2sqrt2 = %.12f", g_max_abs_s, kTsirelson));
}

}  // namespace

int main() {
  Report rep;
  criterion1(rep);
  criterion2(rep);
  criterion3(rep);
  criterion4(rep);
  criterion5(rep);
  criterion6(rep);
  criterion7(rep);
  criterion8(rep);
  criterion9(rep);
  std::printf("%d of 9 criteria failed\n", rep.failed);
  return rep.failed == 0 ? 0 : 1;
}

#pragma once

// Shared-randomness optimization over pairs of deterministic strategies:
// equal-point maximization of min{S_AB, S_AC}, the optimal trade-off frontier
// and double-violation region maps.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "bellrec/chsh.hpp"
#include "bellrec/errors.hpp"
#include "bellrec/golden.hpp"
#include "bellrec/states.hpp"
#include "bellrec/strategies.hpp"

namespace bellrec {

/// S_AC = k·S_AB + s0 through two deterministic points.
struct TangentLine {
  double k = 0.0;
  double s0 = 0.0;
};

inline std::optional<TangentLine> chord(const ChshPair& a, const ChshPair& b) {
  const double dx = b.s_ab - a.s_ab;
  if (dx == 0.0) return std::nullopt;
  const double k = (b.s_ac - a.s_ac) / dx;
  return TangentLine{k, a.s_ac - k * a.s_ab};
}

/// Where the line meets S_AB = S_AC: s0 / (1 - k).
inline double equal_value(const TangentLine& line) { return line.s0 / (1.0 - line.k); }

/// max over p in [0,1] of min{S_AB(p), S_AC(p)} for the mixture p·first + (1-p)·second.
struct MinMax {
  double p = 0.0;
  double value = 0.0;
  bool crossing = false;  // attained on S_AB = S_AC
};

inline MinMax best_min(const ChshPair& first, const ChshPair& second) {
  const double d1 = first.s_ab - first.s_ac;
  const double d2 = second.s_ab - second.s_ac;
  if (d1 == d2) {
    if (d1 == 0.0) {
      return first.s_ab >= second.s_ab ? MinMax{1.0, first.s_ab, true} : MinMax{0.0, second.s_ab, true};
    }
  } else if (d1 * d2 <= 0.0) {
    const double p = d2 / (d2 - d1);
    return {p, p * first.s_ab + (1.0 - p) * second.s_ab, true};
  }
  const double m1 = std::min(first.s_ab, first.s_ac);
  const double m2 = std::min(second.s_ab, second.s_ac);
  return m1 >= m2 ? MinMax{1.0, m1, false} : MinMax{0.0, m2, false};
}

struct EqualPointOptions {
  double angle_lo = -std::numbers::pi / 2.0;
  double angle_hi = std::numbers::pi / 2.0;
  double coarse_step = std::numbers::pi / 1800.0;  // 0.1 degree
  double tol = 1e-10;
  int inner_halfwidth_steps = 5;
};

struct EqualPointResult {
  StrategyCase first;
  StrategyCase second;
  ChshPair first_point;
  ChshPair second_point;
  double p_star = 0.0;  // probability of `first`
  double s_star = 0.0;  // common value S_AB = S_AC when `crossing`
  bool crossing = false;

  Settings settings() const {
    Settings s;
    for (const auto* sc : {&first, &second}) {
      switch (sc->lambda) {
        case Case::basis_projection: s.phi_meas = sc->settings.phi_meas; break;
        case Case::identity_measurement: s.chi = sc->settings.chi; break;
        case Case::mixed: s.theta = sc->settings.theta; break;
      }
    }
    return s;
  }

  bool double_violation() const { return crossing && s_star > kClassicalBound; }
};

namespace detail {

inline std::vector<double> linear_grid(double lo, double hi, double step) {
  if (!(step > 0.0) || !(hi >= lo)) throw InvalidArgument("grid: bad range or step");
  const auto n = static_cast<std::size_t>(std::llround((hi - lo) / step));
  std::vector<double> g(n + 1);
  for (std::size_t k = 0; k <= n; ++k) g[k] = lo + static_cast<double>(k) * step;
  g.back() = std::min(g.back(), hi);
  return g;
}

}  // namespace detail

/// Maximizes min{S_AB, S_AC} over the free angles of both strategies and the
/// mixing probability. Coarse grid over both angles, then nested
/// golden-section refinement. Ties go to the smaller angle.
inline EqualPointResult equal_point(const TwoQubitState& state, Case first, Case second,
                                    const EqualPointOptions& opt = {}) {
  if (first == second) throw InvalidArgument("equal_point: the two cases must differ");
  const std::vector<double> grid = detail::linear_grid(opt.angle_lo, opt.angle_hi, opt.coarse_step);

  auto point = [&](Case c, double angle) { return evaluate_case(state, StrategyCase::with_setting(c, angle)); };

  std::vector<ChshPair> curve1, curve2;
  curve1.reserve(grid.size());
  curve2.reserve(grid.size());
  for (const double a : grid) {
    curve1.push_back(point(first, a));
    curve2.push_back(point(second, a));
  }

  std::size_t best1 = 0, best2 = 0;
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid.size(); ++i)
    for (std::size_t j = 0; j < grid.size(); ++j) {
      const double v = best_min(curve1[i], curve2[j]).value;
      if (v > best) {
        best = v;
        best1 = i;
        best2 = j;
      }
    }

  double a1 = grid[best1], a2 = grid[best2];

  const double outer_lo = std::max(opt.angle_lo, a1 - opt.coarse_step);
  const double outer_hi = std::min(opt.angle_hi, a1 + opt.coarse_step);
  const double w = opt.inner_halfwidth_steps * opt.coarse_step;
  auto inner = [&](const ChshPair& p1, double& arg) {
    const LineMax m = golden_maximize([&](double b) { return best_min(p1, point(second, b)).value; },
                                      std::max(opt.angle_lo, a2 - w), std::min(opt.angle_hi, a2 + w), opt.tol);
    arg = m.x;
    return m.value;
  };
  double refined2 = a2;
  const LineMax outer = golden_maximize(
      [&](double a) {
        double b = 0.0;
        return inner(point(first, a), b);
      },
      outer_lo, outer_hi, opt.tol);
  const double refined_value = inner(point(first, outer.x), refined2);
  if (refined_value > best) {
    a1 = outer.x;
    a2 = refined2;
  }

  EqualPointResult r;
  r.first = StrategyCase::with_setting(first, a1);
  r.second = StrategyCase::with_setting(second, a2);
  r.first_point = evaluate_case(state, r.first);
  r.second_point = evaluate_case(state, r.second);
  const MinMax m = best_min(r.first_point, r.second_point);
  r.p_star = m.p;
  r.s_star = m.value;
  r.crossing = m.crossing;
  return r;
}

inline EqualPointResult equal_point(double phi_state, Case first, Case second, const EqualPointOptions& opt = {}) {
  return equal_point(prepare({phi_state, 0.0}), first, second, opt);
}

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double width() const { return hi - lo; }
};

/// Closed range of p for which p·first + (1-p)·second has both S_AB > 2 and
/// S_AC > 2 in its interior; nullopt when there is none.
inline std::optional<Interval> violation_interval(const ChshPair& first, const ChshPair& second) {
  Interval iv{0.0, 1.0};
  for (const auto& [x1, x2] : {std::pair{first.s_ab, second.s_ab}, std::pair{first.s_ac, second.s_ac}}) {
    if (x1 == x2) {
      if (!(x1 > kClassicalBound)) return std::nullopt;
      continue;
    }
    const double p0 = (kClassicalBound - x2) / (x1 - x2);
    if (x1 > x2) {
      iv.lo = std::max(iv.lo, p0);
    } else {
      iv.hi = std::min(iv.hi, p0);
    }
  }
  if (!(iv.lo < iv.hi)) return std::nullopt;
  return iv;
}

inline std::optional<Interval> violation_interval(const TwoQubitState& state, const StrategyCase& first,
                                                  const StrategyCase& second) {
  return violation_interval(evaluate_case(state, first), evaluate_case(state, second));
}

inline std::optional<Interval> violation_interval(double phi_state, const StrategyCase& first,
                                                  const StrategyCase& second) {
  return violation_interval(prepare({phi_state, 0.0}), first, second);
}

// ---------------------------------------------------------------------------
// Frontier

enum class Segment { mix12, mix13, mix23, det1, det2, det3 };

inline std::string to_string(Segment s) {
  switch (s) {
    case Segment::mix12: return "mix12";
    case Segment::mix13: return "mix13";
    case Segment::mix23: return "mix23";
    case Segment::det1: return "det1";
    case Segment::det2: return "det2";
    case Segment::det3: return "det3";
  }
  return "?";
}

inline Segment segment_between(Case a, Case b) {
  if (a == b) {
    switch (a) {
      case Case::basis_projection: return Segment::det1;
      case Case::identity_measurement: return Segment::det2;
      case Case::mixed: return Segment::det3;
    }
  }
  const int lo = std::min(to_int(a), to_int(b)), hi = std::max(to_int(a), to_int(b));
  if (lo == 1 && hi == 2) return Segment::mix12;
  if (lo == 1 && hi == 3) return Segment::mix13;
  return Segment::mix23;
}

/// One frontier point and the mixture that achieves it:
/// weight·left + (1 - weight)·right.
struct FrontierPoint {
  double s_ab = 0.0;
  double s_ac = 0.0;
  Segment segment = Segment::det1;
  StrategyCase left;
  StrategyCase right;
  double weight = 1.0;
};

struct FrontierCurve {
  std::vector<FrontierPoint> points;

  /// Distinct segment labels in order of increasing S_AB.
  std::vector<Segment> segment_order() const {
    std::vector<Segment> order;
    for (const auto& p : points)
      if (order.empty() || order.back() != p.segment) order.push_back(p.segment);
    return order;
  }

  double s_ab_min() const { return points.front().s_ab; }
  double s_ab_max() const { return points.back().s_ab; }

  /// Linear interpolation between stored points; nullopt outside the curve.
  std::optional<double> value_at(double s_ab) const {
    if (points.empty() || s_ab < s_ab_min() || s_ab > s_ab_max()) return std::nullopt;
    auto it = std::lower_bound(points.begin(), points.end(), s_ab,
                               [](const FrontierPoint& p, double x) { return p.s_ab < x; });
    if (it == points.begin()) return it->s_ac;
    const auto& b = *it;
    const auto& a = *(it - 1);
    const double t = (s_ab - a.s_ab) / (b.s_ab - a.s_ab);
    return a.s_ac + t * (b.s_ac - a.s_ac);
  }
};

namespace detail {

struct Sample {
  ChshPair value;
  StrategyCase source;
};

inline double cross(const ChshPair& o, const ChshPair& a, const ChshPair& b) {
  return (a.s_ab - o.s_ab) * (b.s_ac - o.s_ac) - (a.s_ac - o.s_ac) * (b.s_ab - o.s_ab);
}

// Upper hull by Andrew's monotone chain, left to right.
inline std::vector<Sample> upper_hull(std::vector<Sample> pts) {
  std::sort(pts.begin(), pts.end(), [](const Sample& a, const Sample& b) {
    return a.value.s_ab < b.value.s_ab || (a.value.s_ab == b.value.s_ab && a.value.s_ac < b.value.s_ac);
  });
  std::vector<Sample> hull;
  for (const auto& p : pts) {
    while (hull.size() >= 2 && cross(hull[hull.size() - 2].value, hull.back().value, p.value) >= 0.0) hull.pop_back();
    hull.push_back(p);
  }
  return hull;
}

}  // namespace detail

/// Upper concave envelope of everything reachable by mixing the three
/// deterministic strategies, from the point of largest S_AC to the point of
/// largest S_AB, resampled at n_points equally spaced S_AB values.
inline FrontierCurve full_frontier(double phi_state, std::size_t n_points, std::size_t samples_per_case = 20000) {
  if (n_points < 16) throw InvalidArgument("full_frontier: need at least 16 points");
  if (samples_per_case < 10000) throw InvalidArgument("full_frontier: need at least 1e4 samples per case");
  if (!(phi_state >= 0.0 && phi_state <= kMaxStateAngle + 1e-12))
    throw InvalidArgument("full_frontier: phi_state outside [0, pi/4]");

  std::vector<detail::Sample> samples;
  samples.reserve(2 * samples_per_case + 1);
  for (const Case c : {Case::basis_projection, Case::mixed}) {
    for (std::size_t k = 0; k < samples_per_case; ++k) {
      const double angle =
          -std::numbers::pi + 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(samples_per_case);
      samples.push_back({closed_form_pair(c, phi_state, angle), StrategyCase::with_setting(c, angle)});
    }
  }
  const StrategyCase c2 = optimal_case2(phi_state);
  samples.push_back({closed_form_pair(Case::identity_measurement, phi_state, c2.setting()), c2});

  std::vector<detail::Sample> hull = detail::upper_hull(std::move(samples));
  std::size_t top = 0;
  for (std::size_t i = 1; i < hull.size(); ++i)
    if (hull[i].value.s_ac >= hull[top].value.s_ac) top = i;
  hull.erase(hull.begin(), hull.begin() + static_cast<std::ptrdiff_t>(top));
  if (hull.size() < 2) throw NumericalFailure("full_frontier: degenerate hull");

  FrontierCurve curve;
  curve.points.reserve(n_points);
  const double x0 = hull.front().value.s_ab;
  const double x1 = hull.back().value.s_ab;
  std::size_t edge = 0;
  for (std::size_t i = 0; i < n_points; ++i) {
    const double x = i + 1 == n_points ? x1 : x0 + (x1 - x0) * static_cast<double>(i) / static_cast<double>(n_points - 1);
    while (edge + 2 < hull.size() && hull[edge + 1].value.s_ab < x) ++edge;
    const auto& a = hull[edge];
    const auto& b = hull[edge + 1];
    const double w = (b.value.s_ab - x) / (b.value.s_ab - a.value.s_ab);
    FrontierPoint fp;
    fp.s_ab = x;
    fp.s_ac = w * a.value.s_ac + (1.0 - w) * b.value.s_ac;
    fp.segment = segment_between(a.source.lambda, b.source.lambda);
    fp.left = a.source;
    fp.right = b.source;
    fp.weight = w;
    curve.points.push_back(fp);
  }
  return curve;
}

// ---------------------------------------------------------------------------
// Region maps

struct RegionGrid {
  double angle_lo = 0.0;
  double angle_hi = std::numbers::pi / 2.0;
  double angle_step = std::numbers::pi / 1800.0;  // 0.1 degree
  double p_step = 0.001;
  std::optional<double> fixed_angle;  // setting of the non-swept case
};

/// Double-violation mask over (setting of the swept case, probability p of
/// the swept case).
struct RegionMap {
  Case swept = Case::basis_projection;
  Case fixed = Case::identity_measurement;
  double fixed_angle = 0.0;
  std::vector<double> angles;
  std::vector<double> ps;
  std::vector<std::uint8_t> mask;  // row-major, angle-major

  bool at(std::size_t angle_index, std::size_t p_index) const { return mask[angle_index * ps.size() + p_index] != 0; }

  double area_fraction() const {
    std::size_t n = 0;
    for (const auto m : mask) n += m;
    return static_cast<double>(n) / static_cast<double>(mask.size());
  }
};

/// Cells are evaluated through the closed forms on the pure family state. The
/// non-swept angle defaults to optimal_chi for case 2 and to the equal-point
/// optimum otherwise.
inline RegionMap region_map(double phi_state, Case swept, Case fixed, const RegionGrid& grid = {}) {
  if (swept == fixed) throw InvalidArgument("region_map: the two cases must differ");
  if (!(phi_state >= 0.0 && phi_state <= kMaxStateAngle + 1e-12))
    throw InvalidArgument("region_map: phi_state outside [0, pi/4]");
  if (!(grid.p_step > 0.0 && grid.p_step <= 1.0)) throw InvalidArgument("region_map: bad p step");

  RegionMap map;
  map.swept = swept;
  map.fixed = fixed;
  map.angles = detail::linear_grid(grid.angle_lo, grid.angle_hi, grid.angle_step);
  map.ps = detail::linear_grid(0.0, 1.0, grid.p_step);
  if (map.angles.size() < 50 || map.ps.size() < 50) throw InvalidArgument("region_map: grid must be at least 50x50");

  if (grid.fixed_angle) {
    map.fixed_angle = *grid.fixed_angle;
  } else if (fixed == Case::identity_measurement) {
    map.fixed_angle = optimal_chi(phi_state).chi;
  } else {
    map.fixed_angle = equal_point(phi_state, swept, fixed).second.setting();
  }

  const ChshPair other = closed_form_pair(fixed, phi_state, map.fixed_angle);
  map.mask.assign(map.angles.size() * map.ps.size(), 0);
  for (std::size_t i = 0; i < map.angles.size(); ++i) {
    const ChshPair here = closed_form_pair(swept, phi_state, map.angles[i]);
    for (std::size_t j = 0; j < map.ps.size(); ++j) {
      const ChshPair s = mix_pairs(here, other, map.ps[j]);
      map.mask[i * map.ps.size() + j] = (s.s_ab > kClassicalBound && s.s_ac > kClassicalBound) ? 1 : 0;
    }
  }
  return map;
}

// ---------------------------------------------------------------------------

struct StateSweepResult {
  double phi_state = 0.0;
  EqualPointResult optimum;
};

/// Outer sweep over the state angle for the best equal-point value of a pair.
inline StateSweepResult best_state(Case first, Case second, double phi_lo, double phi_hi, double phi_step,
                                   const EqualPointOptions& opt = {}) {
  StateSweepResult best;
  bool have = false;
  for (const double phi : detail::linear_grid(phi_lo, phi_hi, phi_step)) {
    EqualPointResult r = equal_point(phi, first, second, opt);
    if (!have || r.s_star > best.optimum.s_star) {
      best = {phi, r};
      have = true;
    }
  }
  return best;
}

}  // namespace bellrec

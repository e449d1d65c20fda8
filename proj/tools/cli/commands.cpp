#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <locale>
#include <numbers>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "bellrec/bellrec.hpp"

namespace bellrec::cli {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr const char* kUnits = "angles in degrees; CHSH values and probabilities dimensionless";

std::vector<double> grid(double lo, double hi, double step) { return detail::linear_grid(lo, hi, step); }

TwoQubitState state_of(const RunConfig& cfg) { return prepare({deg_to_rad(cfg.phi_state_deg), cfg.noise_v}); }

std::pair<Case, Case> pair_of(const RunConfig& cfg) { return {case_from_int(cfg.pair[0]), case_from_int(cfg.pair[1])}; }

void require(bool ok, const std::string& msg) {
  if (!ok) throw InvalidArgument(msg);
}

void describe_pair(Table& t, const EqualPointResult& r) {
  t.meta.emplace_back("first_case", static_cast<std::int64_t>(to_int(r.first.lambda)));
  t.meta.emplace_back("first_setting_deg", rad_to_deg(r.first.setting()));
  t.meta.emplace_back("second_case", static_cast<std::int64_t>(to_int(r.second.lambda)));
  t.meta.emplace_back("second_setting_deg", rad_to_deg(r.second.setting()));
  t.meta.emplace_back("p_star", r.p_star);
  t.meta.emplace_back("s_star", r.s_star);
}

std::string cell_text(const Cell& c) {
  struct Visitor {
    std::string operator()(std::monostate) const { return "—"; }
    std::string operator()(bool b) const { return b ? "true" : "false"; }
    std::string operator()(std::int64_t i) const { return std::to_string(i); }
    std::string operator()(double d) const { return format_number(d); }
    std::string operator()(const std::string& s) const { return s; }
  };
  return std::visit(Visitor{}, c);
}

nlohmann::ordered_json cell_json(const Cell& c) {
  struct Visitor {
    nlohmann::ordered_json operator()(std::monostate) const { return nullptr; }
    nlohmann::ordered_json operator()(bool b) const { return b; }
    nlohmann::ordered_json operator()(std::int64_t i) const { return i; }
    nlohmann::ordered_json operator()(double d) const { return d; }
    nlohmann::ordered_json operator()(const std::string& s) const { return s; }
  };
  return std::visit(Visitor{}, c);
}

// ---- verify ----------------------------------------------------------------

struct Check {
  std::string name;
  double worst = 0.0;
  double tolerance = 0.0;
  bool passed = true;
};

TwoQubitState random_state(std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Mat4 a;
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) a(i, j) = cplx(g(rng), g(rng));
  Mat4 rho = a * a.adjoint();
  rho *= 1.0 / rho.trace().real();
  return TwoQubitState(0.5 * (rho + rho.adjoint()));
}

StrategyCase random_case(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> c(1, 3);
  std::uniform_real_distribution<double> angle(-kPi, kPi);
  return StrategyCase::with_setting(case_from_int(c(rng)), angle(rng));
}

std::vector<Check> run_checks() {
  std::vector<Check> checks;
  auto add = [&](std::string name, double worst, double tol) {
    checks.push_back({std::move(name), worst, tol, worst <= tol});
  };
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> phi_dist(0.0, kPi / 4);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double tsirelson_excess = -kTsirelson;

  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const double phi = phi_dist(rng);
    StrategyCase sc = random_case(rng);
    if (sc.lambda == Case::identity_measurement) sc = optimal_case2(phi);
    const ChshPair numeric = evaluate_case(prepare({phi, 0.0}), sc);
    const ChshPair exact = closed_form_pair(sc.lambda, phi, sc.setting());
    worst = std::max({worst, std::abs(numeric.s_ab - exact.s_ab), std::abs(numeric.s_ac - exact.s_ac)});
    tsirelson_excess = std::max({tsirelson_excess, std::abs(numeric.s_ab) - kTsirelson,
                                 std::abs(numeric.s_ac) - kTsirelson});
  }
  add("closed_form_vs_numeric", worst, 1e-10);

  for (const Case c : {Case::basis_projection, Case::identity_measurement, Case::mixed}) {
    worst = 0.0;
    for (int t = 0; t < 200; ++t) {
      const double phi = phi_dist(rng);
      const double s2 = std::sin(2 * phi);
      double angle = 0.0;
      if (c == Case::basis_projection) {
        const double lo = kPi / 2 - std::atan(s2);
        angle = lo + unit(rng) * (kPi / 2 - lo);
      } else if (c == Case::mixed) {
        const double lo = kPi / 2 - 2 * phi;
        angle = lo + unit(rng) * (kPi / 2 - lo);
      }
      const ChshPair s = closed_form_pair(c, phi, angle);
      worst = std::max(worst, std::abs(tradeoff_closed_form(c, phi, s.s_ab) - s.s_ac));
    }
    add("tradeoff_consistency_case" + std::to_string(to_int(c)), worst, 1e-9);
  }

  worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const double phi = kPi / 4 * k / 99.0;
    const ChshPair s = closed_form_pair(Case::identity_measurement, phi, 0.0);
    worst = std::max(worst, std::abs(s.s_ab * s.s_ab + s.s_ac * s.s_ac - 8.0));
  }
  add("case2_circle", worst, 1e-10);

  double trace_err = 0.0, psd_err = 0.0, identity_err = 0.0;
  for (int t = 0; t < 10000; ++t) {
    const TwoQubitState rho = random_state(rng);
    const StrategyCase sc = random_case(rng);
    const OperatorSet ops = build_operators(sc);
    const TwoQubitState out = luders_relay(rho, ops);
    trace_err = std::max(trace_err, std::abs(out.rho().trace().real() - 1.0));
    psd_err = std::max(psd_err, -min_eigenvalue(out.rho()));
    if (sc.lambda == Case::identity_measurement) identity_err = std::max(identity_err, max_abs_diff(out.rho(), rho.rho()));
    tsirelson_excess = std::max({tsirelson_excess, std::abs(chsh_numeric(rho, ops.alice, ops.bob)) - kTsirelson,
                                 std::abs(chsh_numeric(out, ops.alice, ops.charlie)) - kTsirelson});
  }
  add("relay_trace", trace_err, 1e-10);
  add("relay_psd", psd_err, 1e-9);
  add("relay_case2_identity", identity_err, 1e-12);
  add("tsirelson", std::max(0.0, tsirelson_excess), 1e-9);

  const auto r12 = equal_point(kPi / 4, Case::basis_projection, Case::identity_measurement);
  add("equal_point_me12_s", std::abs(r12.s_star - 2 * std::numbers::sqrt2 * (std::sqrt(3.0) - 1)), 1e-6);
  add("equal_point_me12_p", std::abs(r12.p_star - (6 - 2 * std::sqrt(3.0)) / 3), 1e-6);
  const auto r13 = equal_point(kPi / 4, Case::basis_projection, Case::mixed);
  add("equal_point_me13_s", std::abs(r13.s_star - 2 * std::sqrt(10.0) / 3), 1e-6);
  add("equal_point_me13_p", std::abs(r13.p_star - 1.0 / 3.0), 1e-6);

  const auto iv = violation_interval(kPi / 4, r12.first, r12.second);
  const double iv_err = iv ? std::max(std::abs(iv->lo - 2 / std::sqrt(6.0)),
                                      std::abs(iv->hi - (4 - 2 * std::numbers::sqrt2) / (3 - std::sqrt(3.0))))
                           : 1.0;
  add("violation_interval_me12", iv_err, 1e-6);

  add("noise_fidelity", std::abs(fidelity_to_pure(prepare({kPi / 4, 0.0196}), kPi / 4) - (1 - 3 * 0.0196 / 4)), 1e-12);
  return checks;
}

}  // namespace

std::string format_number(double v) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os << std::setprecision(17) << v;
  return os.str();
}

void validate(const RunConfig& cfg) {
  static const std::vector<std::string> known{"tradeoff", "sweep-p", "frontier", "region", "mc", "verify"};
  require(std::find(known.begin(), known.end(), cfg.subcommand) != known.end(), "unknown subcommand");
  require(cfg.phi_state_deg >= 0.0 && cfg.phi_state_deg <= 45.0, "--phi-state must be in [0, 45] degrees");
  require(cfg.noise_v >= 0.0 && cfg.noise_v <= 1.0, "--noise-v must be in [0, 1]");
  require(!cfg.cases.empty(), "--cases must not be empty");
  for (const int c : cfg.cases) require(c >= 1 && c <= 3, "--cases entries must be 1, 2 or 3");
  require(cfg.pair.size() == 2, "--pair takes exactly two cases");
  for (const int c : cfg.pair) require(c >= 1 && c <= 3, "--pair entries must be 1, 2 or 3");
  require(cfg.pair[0] != cfg.pair[1], "--pair needs two different cases");
  if (cfg.p) require(*cfg.p >= 0.0 && *cfg.p <= 1.0, "--p must be in [0, 1]");
  if (cfg.p_step) require(*cfg.p_step > 0.0 && *cfg.p_step <= 1.0, "--p-step must be in (0, 1]");
  if (cfg.angle_step_deg) require(*cfg.angle_step_deg > 0.0 && *cfg.angle_step_deg <= 90.0, "--angle-step must be in (0, 90]");
  require(cfg.mean >= 100.0, "--mean must be at least 100");
  require(cfg.repeats >= 1, "--repeats must be positive");
  require(cfg.points >= 16, "--points must be at least 16");
  if (cfg.subcommand == "frontier" || cfg.subcommand == "region")
    require(cfg.noise_v == 0.0, "--noise-v is not supported by " + cfg.subcommand);
  if (cfg.subcommand == "mc" && cfg.p) require(*cfg.p > 0.0 && *cfg.p < 1.0, "mc needs --p strictly inside (0, 1)");
}

Table cmd_tradeoff(const RunConfig& cfg) {
  const TwoQubitState state = state_of(cfg);
  const double phi = deg_to_rad(cfg.phi_state_deg);
  Table t;
  t.meta.emplace_back("phi_state_deg", cfg.phi_state_deg);
  t.meta.emplace_back("noise_v", cfg.noise_v);
  t.columns = {"lambda", "setting_deg", "s_ab", "s_ac"};
  const std::vector<double> settings = grid(0.0, 90.0, cfg.angle_step_deg.value_or(7.5));
  for (const int ci : cfg.cases) {
    const Case c = case_from_int(ci);
    if (c == Case::identity_measurement) {
      // case 2 has no swept setting: Charlie's rotation is fixed at its optimum
      const ChshPair s = evaluate_case(state, optimal_case2(phi));
      t.rows.push_back({static_cast<std::int64_t>(ci), std::monostate{}, s.s_ab, s.s_ac});
      continue;
    }
    for (const double deg : settings) {
      const ChshPair s = evaluate_case(state, StrategyCase::with_setting(c, deg_to_rad(deg)));
      t.rows.push_back({static_cast<std::int64_t>(ci), deg, s.s_ab, s.s_ac});
    }
  }
  return t;
}

Table cmd_sweep_p(const RunConfig& cfg) {
  const TwoQubitState state = state_of(cfg);
  const auto [first, second] = pair_of(cfg);
  const EqualPointResult r = equal_point(state, first, second);
  const ChshPair a = evaluate_case(state, r.first), b = evaluate_case(state, r.second);

  Table t;
  t.meta.emplace_back("phi_state_deg", cfg.phi_state_deg);
  t.meta.emplace_back("noise_v", cfg.noise_v);
  describe_pair(t, r);
  t.columns = {"p", "s_ab", "s_ac", "violates_both"};

  std::vector<double> ps = grid(0.0, 1.0, cfg.p_step.value_or(0.01));
  if (cfg.p && std::none_of(ps.begin(), ps.end(), [&](double q) { return std::abs(q - *cfg.p) < 1e-12; })) {
    ps.insert(std::upper_bound(ps.begin(), ps.end(), *cfg.p), *cfg.p);
  }
  for (const double p : ps) {
    const ChshPair s = mix_pairs(a, b, p);
    t.rows.push_back({p, s.s_ab, s.s_ac, std::min(s.s_ab, s.s_ac) > kClassicalBound});
  }
  return t;
}

Table cmd_frontier(const RunConfig& cfg) {
  const FrontierCurve curve = full_frontier(deg_to_rad(cfg.phi_state_deg), cfg.points);
  Table t;
  t.meta.emplace_back("phi_state_deg", cfg.phi_state_deg);
  t.columns = {"s_ab", "s_ac", "segment"};
  for (const auto& pt : curve.points) t.rows.push_back({pt.s_ab, pt.s_ac, to_string(pt.segment)});
  return t;
}

Table cmd_region(const RunConfig& cfg) {
  const auto [swept, fixed] = pair_of(cfg);
  RegionGrid g;
  if (cfg.angle_step_deg) g.angle_step = deg_to_rad(*cfg.angle_step_deg);
  if (cfg.p_step) g.p_step = *cfg.p_step;
  const RegionMap map = region_map(deg_to_rad(cfg.phi_state_deg), swept, fixed, g);

  Table t;
  t.meta.emplace_back("phi_state_deg", cfg.phi_state_deg);
  t.meta.emplace_back("swept_case", static_cast<std::int64_t>(to_int(swept)));
  t.meta.emplace_back("fixed_case", static_cast<std::int64_t>(to_int(fixed)));
  t.meta.emplace_back("fixed_setting_deg", rad_to_deg(map.fixed_angle));
  t.meta.emplace_back("area_fraction", map.area_fraction());
  t.columns = {"setting_deg", "p", "violates_both"};
  for (std::size_t i = 0; i < map.angles.size(); ++i)
    for (std::size_t j = 0; j < map.ps.size(); ++j)
      t.rows.push_back({rad_to_deg(map.angles[i]), map.ps[j], static_cast<bool>(map.at(i, j))});
  return t;
}

Table cmd_mc(const RunConfig& cfg) {
  const TwoQubitState state = state_of(cfg);
  const auto [first, second] = pair_of(cfg);
  const EqualPointResult r = equal_point(state, first, second);
  const double p = cfg.p.value_or(r.p_star);
  require(p > 0.0 && p < 1.0, "mc: mixing probability must be strictly inside (0, 1)");
  const auto runs = run_repeats(state, MixedStrategy::binary(r.first, r.second, p), ShotConfig{cfg.mean, cfg.seed, cfg.repeats});

  Table t;
  t.meta.emplace_back("phi_state_deg", cfg.phi_state_deg);
  t.meta.emplace_back("noise_v", cfg.noise_v);
  describe_pair(t, r);
  t.meta.emplace_back("p", p);
  t.meta.emplace_back("mean_counts_per_setting", cfg.mean);
  t.meta.emplace_back("seed", static_cast<std::int64_t>(cfg.seed));
  t.columns = {"repeat", "s_ab", "s_ab_sigma", "s_ac", "s_ac_sigma", "p_hat", "p_hat_sigma"};
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto& e = runs[i];
    t.rows.push_back({static_cast<std::int64_t>(i), e.s_ab.value, e.s_ab.sigma, e.s_ac.value, e.s_ac.sigma,
                      e.p_hat.value, e.p_hat.sigma});
  }
  return t;
}

Table cmd_verify(const RunConfig&) {
  Table t;
  t.columns = {"check", "passed", "worst", "tolerance"};
  for (const Check& c : run_checks()) {
    t.rows.push_back({c.name, c.passed, c.worst, c.tolerance});
    t.ok = t.ok && c.passed;
  }
  t.meta.emplace_back("all_passed", t.ok);
  return t;
}

Table dispatch(const RunConfig& cfg) {
  validate(cfg);
  if (cfg.subcommand == "tradeoff") return cmd_tradeoff(cfg);
  if (cfg.subcommand == "sweep-p") return cmd_sweep_p(cfg);
  if (cfg.subcommand == "frontier") return cmd_frontier(cfg);
  if (cfg.subcommand == "region") return cmd_region(cfg);
  if (cfg.subcommand == "mc") return cmd_mc(cfg);
  return cmd_verify(cfg);
}

void write_csv(std::ostream& os, const Table& t) {
  os << "# units: " << kUnits << '\n';
  for (const auto& [key, value] : t.meta) os << "# " << key << '=' << cell_text(value) << '\n';
  for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
  os << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << cell_text(row[i]);
    os << '\n';
  }
}

void write_json(std::ostream& os, const Table& t) {
  nlohmann::ordered_json doc;
  doc["units"] = kUnits;
  nlohmann::ordered_json meta = nlohmann::ordered_json::object();
  for (const auto& [key, value] : t.meta) meta[key] = cell_json(value);
  doc["meta"] = meta;
  doc["columns"] = t.columns;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& row : t.rows) {
    nlohmann::ordered_json r;
    for (std::size_t i = 0; i < row.size(); ++i) r[t.columns[i]] = cell_json(row[i]);
    rows.push_back(std::move(r));
  }
  doc["rows"] = std::move(rows);
  os << doc.dump(2) << '\n';
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sequential CHSH nonlocality recycling: sweeps, frontiers and shot-noise emulation"};
  app.require_subcommand(1);
  RunConfig cfg;
  std::string format = "csv";

  auto common = [&](CLI::App* sub) {
    sub->add_option("--phi-state", cfg.phi_state_deg, "state angle in degrees, [0, 45]");
    sub->add_option("--noise-v", cfg.noise_v, "white-noise weight v");
    sub->add_option("--out", cfg.out, "output path (default stdout)");
    sub->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  };
  auto with_pair = [&](CLI::App* sub) {
    sub->add_option("--pair", cfg.pair, "two strategy cases, e.g. 1,2")->delimiter(',')->expected(2);
  };

  CLI::App* tradeoff = app.add_subcommand("tradeoff", "sweep the setting of each deterministic case");
  common(tradeoff);
  tradeoff->add_option("--cases", cfg.cases, "cases to sweep, e.g. 1,2,3")->delimiter(',');
  tradeoff->add_option("--angle-step", cfg.angle_step_deg, "setting step in degrees (default 7.5)");

  CLI::App* sweep = app.add_subcommand("sweep-p", "sweep the mixing probability for a pair");
  common(sweep);
  with_pair(sweep);
  sweep->add_option("--p", cfg.p, "extra probability row to include");
  sweep->add_option("--p-step", cfg.p_step, "probability step (default 0.01)");

  CLI::App* frontier = app.add_subcommand("frontier", "optimal S_AC versus S_AB over all strategies");
  common(frontier);
  frontier->add_option("--points", cfg.points, "number of frontier points (default 400)");

  CLI::App* region = app.add_subcommand("region", "double-violation region over (setting, p)");
  common(region);
  with_pair(region);
  region->add_option("--angle-step", cfg.angle_step_deg, "setting step in degrees (default 0.1)");
  region->add_option("--p-step", cfg.p_step, "probability step (default 0.001)");

  CLI::App* mc = app.add_subcommand("mc", "Poissonian counting emulation of a mixed strategy");
  common(mc);
  with_pair(mc);
  mc->add_option("--p", cfg.p, "probability of the first case (default: equal-point optimum)");
  mc->add_option("--mean", cfg.mean, "mean counts per setting");
  mc->add_option("--seed", cfg.seed, "random seed");
  mc->add_option("--repeats", cfg.repeats, "number of independent runs");

  CLI::App* verify = app.add_subcommand("verify", "closed-form versus numeric oracle suite");
  common(verify);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }
  cfg.subcommand = app.get_subcommands().front()->get_name();
  cfg.format = format == "json" ? Format::json : Format::csv;

  Table table;
  try {
    table = dispatch(cfg);
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const NumericalFailure& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  }

  std::ofstream file;
  if (!cfg.out.empty()) {
    file.open(cfg.out, std::ios::binary);
    if (!file) {
      err << "error: cannot open " << cfg.out << '\n';
      return kExitUsage;
    }
  }
  std::ostream& sink = cfg.out.empty() ? out : file;
  if (cfg.format == Format::json)
    write_json(sink, table);
  else
    write_csv(sink, table);

  if (cfg.subcommand == "region") err << "area_fraction=" << format_number(std::get<double>(table.meta.back().second)) << '\n';
  if (cfg.subcommand == "verify") {
    for (const auto& row : table.rows)
      err << (std::get<bool>(row[1]) ? "PASS " : "FAIL ") << std::get<std::string>(row[0]) << '\n';
    if (!table.ok) return kExitVerifyFailed;
  }
  return kExitOk;
}

}  // namespace bellrec::cli

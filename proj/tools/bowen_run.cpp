// bowen-run: runs one experiment described by a JSON config, writes CSV
// curves plus a JSON sidecar, and exits 0 on pass, 2 on a tolerance
// failure and 1 on a usage error.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <Eigen/Eigenvalues>

#include "CLI11.hpp"
#include "bowen/bowen.hpp"
#include "config.hpp"

namespace bowen::cli {
namespace {

struct Outcome {
  bool pass = true;
  json summary = json::object();
  std::map<std::string, std::string> files;  // name -> content
  std::uint64_t steps = 0;
};

struct Context {
  ExperimentConfig cfg;
  std::size_t workers = 1;
};

std::vector<double> grid_of(const Params& p) { return default_grid(p.grid_points, p.grid_min, p.grid_max); }

HitTarget make_target(const System& sys, const ExperimentConfig& cfg) {
  if (cfg.target.word) return HitTarget::word(sys, CylinderWord(*cfg.target.word));
  return HitTarget::ball(sys, BowenSpec{make_center(cfg.target.center, cfg.seed), *cfg.target.epsilon, cfg.target.n});
}

// Metric entropy of the invariant measure.
double system_entropy(const System& sys) {
  double h = 0.0;
  const std::size_t a = sys.alphabet_size();
  for (std::size_t i = 0; i < a; ++i) {
    for (std::size_t j = 0; j < a; ++j) {
      const double p = sys.transition(static_cast<Symbol>(i), static_cast<Symbol>(j));
      if (p > 0.0) h -= sys.initial(static_cast<Symbol>(i)) * p * std::log(p);
    }
  }
  return h;
}

double second_eigenvalue_modulus(const System& sys) {
  const Eigen::MatrixXd p = bowen::detail::transition_eigen(sys);
  const Eigen::VectorXcd ev = Eigen::EigenSolver<Eigen::MatrixXd>(p).eigenvalues();
  std::vector<double> moduli;
  for (Eigen::Index i = 0; i < ev.size(); ++i) moduli.push_back(std::abs(ev(i)));
  std::sort(moduli.rbegin(), moduli.rend());
  return moduli.size() > 1 ? moduli[1] : 0.0;
}

std::string integer_curve_csv(const std::vector<double>& survival, std::uint64_t trials) {
  SurvivalCurve c;
  for (std::size_t r = 0; r < survival.size(); ++r) {
    c.t.push_back(static_cast<double>(r));
    c.survival.push_back(survival[r]);
    c.at_risk.push_back(static_cast<std::uint64_t>(std::llround(survival[r] * static_cast<double>(trials))));
  }
  return survival_csv(c);
}

std::uint64_t block_length(double mu, double beta) {
  return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::ceil(std::pow(mu, -beta))));
}

Outcome entry_law(const Context& ctx) {
  const auto& cfg = ctx.cfg;
  const System sys = make_system(cfg.system);
  const HitTarget target = make_target(sys, cfg);
  Outcome out;
  const double mu = target.measure();
  const EntrySample sample = sample_entry_times(sys, target, cfg.trials, cfg.seed, {cfg.horizon, ctx.workers});
  const std::uint64_t f = std::min(block_length(mu, cfg.params.beta), sample.horizon);
  const LambdaEstimate lambda = lambda_estimator(sample.survival_at(f), static_cast<double>(f), mu, sample.trials);
  const SurvivalReport report = survival_and_ks(sample, mu, lambda.lambda, grid_of(cfg.params));
  const double tol = cfg.tolerance.value_or(0.02);
  out.pass = report.ks_exponential <= tol && report.curve.reliable;
  out.files["survival.csv"] = survival_csv(report.curve);
  out.files["times.csv"] = times_csv(sample);
  out.summary = {{"mu", mu},
                 {"mu_exact", target.exact_measure()},
                 {"f", f},
                 {"lambda", lambda.lambda},
                 {"lambda_half_width", lambda.half_width},
                 {"ks", report.ks_exponential},
                 {"tolerance", tol},
                 {"sample", sample_metadata(sample)},
                 {"curve", curve_metadata(report.curve)}};
  for (auto t : sample.times) out.steps += t;
  return out;
}

Outcome return_law(const Context& ctx) {
  const auto& cfg = ctx.cfg;
  const System sys = make_system(cfg.system);
  const HitTarget target = make_target(sys, cfg);
  Outcome out;
  const double mu = target.measure();
  const std::uint64_t depth = default_depth(std::min(mu, 1.0), cfg.params.eta);
  const std::uint64_t delta = cfg.params.delta.value_or(2 * depth);
  const std::uint64_t per = target.word_set() ? period(sys, *target.word_set()) : 1;

  const EntrySample entry = sample_entry_times(sys, target, cfg.trials, cfg.seed, {cfg.horizon, ctx.workers});
  const std::uint64_t f = std::min(block_length(mu, cfg.params.beta), entry.horizon);
  const LambdaEstimate lambda = lambda_estimator(entry.survival_at(f), static_cast<double>(f), mu, entry.trials);

  ReturnOptions opt;
  opt.horizon = cfg.horizon;
  opt.burn_in = cfg.params.burn_in;
  opt.orbits = cfg.params.orbits;
  opt.workers = ctx.workers;
  const EntrySample returns = sample_return_times(sys, target, cfg.trials, cfg.seed, opt);
  const double a = returns.survival_at(per + delta);
  const SurvivalReport report = survival_and_ks(returns, mu, lambda.lambda, grid_of(cfg.params), ReturnLaw{a, per, delta});
  const double tol = cfg.tolerance.value_or(0.03);
  out.pass = *report.ks_a_exponential <= tol && report.curve.reliable;
  out.files["survival.csv"] = survival_csv(report.curve);
  out.files["times.csv"] = times_csv(returns);
  out.summary = {{"mu", mu},       {"period", per},         {"delta", delta},
                 {"a", a},         {"lambda", lambda.lambda}, {"f", f},
                 {"ks_a", *report.ks_a_exponential}, {"ks", report.ks_exponential}, {"tolerance", tol},
                 {"sample", sample_metadata(returns)}, {"curve", curve_metadata(report.curve)}};
  if (sys.is_shift() && target.word_set()) {
    const ConditionalLaw law = exact_conditional_survival(sys, *target.word_set(), delta, 1);
    out.summary["a_exact"] = law.a;
    out.summary["period_exact"] = law.period;
  }
  for (auto t : returns.times) out.steps += t;
  return out;
}

Outcome oracle_compare(const Context& ctx) {
  const auto& cfg = ctx.cfg;
  const System sys = make_system(cfg.system);
  const HitTarget target = make_target(sys, cfg);
  require(target.word_set() != nullptr, ErrorCode::InvalidArgument, "oracle-compare needs a cylinder target");
  Outcome out;
  const std::uint64_t horizon = cfg.horizon ? cfg.horizon : 1000;
  const EntrySample sample = sample_entry_times(sys, target, cfg.trials, cfg.seed, {horizon, ctx.workers});
  const SurvivalCurve exact = exact_survival(sys, *target.word_set(), horizon);
  const std::vector<double> empirical = sample.survival_by_time(horizon);
  double sup = 0.0;
  for (std::size_t t = 0; t <= horizon; ++t) sup = std::max(sup, std::abs(empirical[t] - exact.survival[t]));
  const double bound = dkw_bound(cfg.trials, 0.001);
  out.pass = sup <= bound;
  out.files["survival.csv"] = integer_curve_csv(empirical, sample.trials);
  out.files["oracle.csv"] = survival_csv(exact);
  out.summary = {{"sup_deviation", sup}, {"dkw_bound", bound}, {"mu", target.measure()}, {"sample", sample_metadata(sample)},
                 {"oracle", curve_metadata(exact)}};
  for (auto t : sample.times) out.steps += t;
  return out;
}

Outcome kac(const Context& ctx) {
  const auto& cfg = ctx.cfg;
  const System sys = make_system(cfg.system);
  const HitTarget target = make_target(sys, cfg);
  Outcome out;
  ReturnOptions opt;
  opt.horizon = cfg.horizon;
  opt.burn_in = cfg.params.burn_in;
  opt.orbits = cfg.params.orbits;
  opt.workers = ctx.workers;
  const EntrySample returns = sample_return_times(sys, target, cfg.trials, cfg.seed, opt);
  const double mu = target.measure();
  const double scaled = returns.mean() * mu;
  const double sigma = returns.standard_deviation() * mu / std::sqrt(static_cast<double>(returns.times.size()));
  out.pass = std::abs(scaled - 1.0) <= 4.0 * sigma && returns.censored == 0;
  out.summary = {{"mu", mu}, {"mean_times_mu", scaled}, {"deviation", std::abs(scaled - 1.0)}, {"sigma", sigma},
                 {"sample", sample_metadata(returns)}};
  if (sys.is_shift() && target.word_set()) {
    const double exact = exact_kac_mean(sys, *target.word_set());
    const double rel = std::abs(exact * mu - 1.0);
    out.summary["exact_mean"] = exact;
    out.summary["exact_relative_error"] = rel;
    out.pass = out.pass && rel <= 1e-9;
  }
  out.files["times.csv"] = times_csv(returns);
  for (auto t : returns.times) out.steps += t;
  return out;
}

Outcome entropy(const Context& ctx) {
  const auto& cfg = ctx.cfg;
  const System sys = make_system(cfg.system);
  Outcome out;
  const std::size_t points = cfg.params.points;
  std::vector<EntropyEstimate> est(points);
  parallel_for(points, ctx.workers, [&](std::size_t i) {
    CenterConfig c = cfg.target.center;
    c.sample += i;
    est[i] = entropy_estimators(sys, make_center(c, cfg.seed), *cfg.target.epsilon, cfg.target.n, cfg.horizon);
  });
  std::string csv = "point,brin_katok,ornstein_weiss\n";
  std::vector<double> ow;
  for (std::size_t i = 0; i < points; ++i) {
    csv += std::to_string(i) + "," + format_number(est[i].brin_katok) + ",";
    if (est[i].ornstein_weiss) {
      csv += format_number(*est[i].ornstein_weiss);
      ow.push_back(*est[i].ornstein_weiss);
    }
    csv += "\n";
  }
  const double h = system_entropy(sys);
  std::optional<double> median;
  if (!ow.empty()) {
    std::sort(ow.begin(), ow.end());
    median = ow.size() % 2 ? ow[ow.size() / 2] : 0.5 * (ow[ow.size() / 2 - 1] + ow[ow.size() / 2]);
  }
  const double tol = cfg.tolerance.value_or(0.2);
  out.pass = median && std::abs(*median - h) <= tol * h;
  out.files["entropy.csv"] = csv;
  out.summary = {{"entropy", h}, {"tolerance", tol}, {"censored", points - ow.size()}, {"brin_katok_first", est.front().brin_katok}};
  if (median) out.summary["ornstein_weiss_median"] = *median;
  return out;
}

Outcome mixing_scan(const Context& ctx) {
  const auto& cfg = ctx.cfg;
  const System sys = make_system(cfg.system);
  Outcome out;
  const AlphaScan scan = alpha_scan(sys, cfg.params.k_first, cfg.params.k_last, cfg.params.max_length);
  std::string csv = "k,alpha,envelope\n";
  double max_alpha = 0.0;
  for (std::size_t i = 0; i < scan.k.size(); ++i) {
    csv += std::to_string(scan.k[i]) + "," + format_number(scan.raw[i]) + "," + format_number(scan.envelope[i]) + "\n";
    max_alpha = std::max(max_alpha, scan.raw[i]);
  }
  out.files["alpha.csv"] = csv;
  out.summary = {{"model", to_string(scan.model.form)}, {"c", scan.model.c}, {"rate", scan.model.rate},
                 {"lower_bound", scan.lower_bound}, {"max_alpha", max_alpha}};
  if (sys.kind() == SystemKind::MarkovShift) {
    const double target_rate = second_eigenvalue_modulus(sys);
    const double tol = cfg.tolerance.value_or(0.2);
    out.summary["expected_rate"] = target_rate;
    out.pass = target_rate == 0.0 ? max_alpha <= 1e-12 : std::abs(scan.model.rate - target_rate) <= tol * target_rate;
  } else {
    out.pass = max_alpha <= 1e-12;
  }
  return out;
}

Outcome phi_scan(const Context& ctx) {
  const auto& cfg = ctx.cfg;
  const System sys = make_system(cfg.system);
  Outcome out;
  const Point x = make_center(cfg.target.center, cfg.seed);
  std::vector<double> deltas = cfg.params.deltas;
  std::sort(deltas.begin(), deltas.end());
  std::string csv = "delta,phi\n";
  double prev = 0.0;
  bool ok = true;
  for (double d : deltas) {
    const double v = phi(sys, *cfg.target.epsilon, d, x);
    csv += format_number(d) + "," + format_number(v) + "\n";
    ok = ok && v >= 0.0 && v >= prev;
    prev = v;
  }
  out.pass = ok;
  out.files["phi.csv"] = csv;
  out.summary = {{"epsilon", *cfg.target.epsilon}, {"monotone", ok}};
  return out;
}

Outcome tower_law(const Context& ctx) {
  const auto& cfg = ctx.cfg;
  const TowerModel model(TowerSpec{cfg.params.lambda_tail, cfg.params.i_max, cfg.params.gamma});
  const TowerPoint center(cfg.tower_center.column, cfg.tower_center.level, cfg.tower_center.future);
  Outcome out;
  const TowerExperiment ex = tower_hitting_experiment(model, center, *cfg.target.epsilon, cfg.target.n, cfg.trials, cfg.seed,
                                                      {cfg.horizon, ctx.workers}, grid_of(cfg.params));
  const ChiSquareResult occ = level_occupancy(model, cfg.params.occupancy_orbits, cfg.params.occupancy_steps, cfg.seed, ctx.workers);
  const double tol = cfg.tolerance.value_or(0.05);
  out.files["survival.csv"] = survival_csv(ex.report.curve);
  out.files["times.csv"] = times_csv(ex.sample);
  out.summary = {{"mu", ex.mu},
                 {"ball_columns", ex.ball.columns.size()},
                 {"lambda", ex.lambda.lambda},
                 {"f", ex.f},
                 {"ks", ex.report.ks_exponential},
                 {"tolerance", tol},
                 {"law_asserted", ex.law_asserted},
                 {"occupancy_chi2", occ.statistic},
                 {"occupancy_cells", occ.cells},
                 {"occupancy_p", occ.p_value},
                 {"non_principal_mass", ex.non_principal.mass},
                 {"non_principal_N", ex.non_principal.n},
                 {"non_principal_m", ex.non_principal.m},
                 {"mean_return", model.mean_return()},
                 {"truncation_mass", model.truncation_mass()},
                 {"sample", sample_metadata(ex.sample)},
                 {"curve", curve_metadata(ex.report.curve)}};
  out.pass = !ex.law_asserted ||
             (ex.report.ks_exponential <= tol && occ.p_value >= 0.01 && ex.non_principal.mass < 0.01 && ex.report.curve.reliable);
  for (auto t : ex.sample.times) out.steps += t;
  return out;
}

Outcome bound_eval(const Context& ctx) {
  const BoundConfig& b = ctx.cfg.bound;
  BoundInputs in{b.theta_n, b.t, b.s, b.lambda, b.f.value_or(1.0), b.mu_ball, b.mu_inner, b.depth, b.alpha_at_depth, b.c5, b.c6};
  const BoundValue v = b.f ? mainthm_bound(in) : minimize_mainthm_bound(in);
  const auto [lo, hi] = admissible_f_range(b.depth, b.mu_ball);
  Outcome out;
  std::string csv = "term,value\n";
  const char* names[] = {"regularity", "block", "gap", "mixing"};
  for (int i = 0; i < 4; ++i) csv += std::string(names[i]) + "," + format_number(v.terms[i]) + "\n";
  csv += "total," + format_number(v.value) + "\n";
  out.files["bound.csv"] = csv;
  out.summary = {{"bound", v.value}, {"f", v.f}, {"f_range", {lo, hi}}, {"minimised", !b.f.has_value()}};
  return out;
}

Outcome dispatch(const Context& ctx) {
  switch (ctx.cfg.kind) {
    case Kind::EntryLaw: return entry_law(ctx);
    case Kind::ReturnLaw: return return_law(ctx);
    case Kind::OracleCompare: return oracle_compare(ctx);
    case Kind::Kac: return kac(ctx);
    case Kind::Entropy: return entropy(ctx);
    case Kind::MixingScan: return mixing_scan(ctx);
    case Kind::PhiScan: return phi_scan(ctx);
    case Kind::TowerLaw: return tower_law(ctx);
    case Kind::BoundEval: return bound_eval(ctx);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown experiment kind");
}

}  // namespace
}  // namespace bowen::cli

int main(int argc, char** argv) {
  using namespace bowen;
  using namespace bowen::cli;

  CLI::App app{"Run one hitting-time experiment from a JSON config"};
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::size_t workers = 1;
  std::string out_dir = "out";
  app.add_option("--config", config_path, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "override the config seed");
  app.add_option("--workers", workers, "worker threads")->check(CLI::Range(std::size_t{1}, std::size_t{1024}));
  app.add_option("--out", out_dir, "output directory");
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  Context ctx;
  ctx.workers = workers;
  try {
    std::ifstream in(config_path);
    const json doc = json::parse(in);
    ctx.cfg = parse_config(doc);
  } catch (const json::parse_error& e) {
    std::cerr << "error: " << config_path << " is not valid JSON: " << e.what() << "\n";
    return 1;
  } catch (const ConfigError& e) {
    std::cerr << "error: invalid config " << config_path << "\n";
    for (const auto& p : e.problems()) std::cerr << "  " << p << "\n";
    return 1;
  }
  if (seed) ctx.cfg.seed = *seed;

  const auto start = std::chrono::steady_clock::now();
  Outcome outcome;
  try {
    outcome = dispatch(ctx);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  const std::filesystem::path dir(out_dir);
  json report;
  report["kind"] = to_string(ctx.cfg.kind);
  report["seed"] = ctx.cfg.seed;
  report["workers"] = workers;
  report["system"] = make_system(ctx.cfg.system).describe();
  report["pass"] = outcome.pass;
  report["summary"] = outcome.summary;
  report["wall_clock_seconds"] = seconds;
  report["steps"] = outcome.steps;
  json files = json::array();
  try {
    for (const auto& [name, content] : outcome.files) {
      write_file(dir / name, content);
      files.push_back((dir / name).string());
    }
    report["files"] = files;
    write_file(dir / "report.json", report.dump(2) + "\n");
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  std::cout << to_string(ctx.cfg.kind) << ": " << (outcome.pass ? "PASS" : "FAIL") << "\n" << outcome.summary.dump(2) << "\n";
  return outcome.pass ? 0 : 2;
}

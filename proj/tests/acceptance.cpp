// Acceptance suite: one line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bowen/bowen.hpp"

using namespace bowen;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string num(double a) { return fmt("%.6g", a); }

CylinderWord word(std::initializer_list<Symbol> s) { return CylinderWord(std::vector<Symbol>(s)); }

std::vector<CylinderWord> binary_words(std::size_t len) {
  std::vector<CylinderWord> out;
  for (std::uint64_t i = 0; i < (std::uint64_t{1} << len); ++i) out.push_back(detail::dyadic_word(i, len));
  return out;
}

struct Settings {
  std::uint64_t seed = 20240601;
  std::size_t workers = 1;
};

// Runs shared by the worker-count determinism check.
std::string oracle_run_csv(const Settings& s, std::size_t workers, double* sup = nullptr) {
  const System fair = System::bernoulli({0.5, 0.5});
  const WordSet target = single_word(word({1, 1}));
  constexpr std::uint64_t kTrials = 1'000'000;
  constexpr std::uint64_t kHorizon = 1000;
  const EntrySample sample = sample_entry_times(fair, HitTarget::words(fair, target), kTrials, s.seed, {kHorizon, workers});
  const SurvivalCurve exact = exact_survival(fair, target, kHorizon);
  const std::vector<double> emp = sample.survival_by_time(kHorizon);
  double worst = 0.0;
  for (std::size_t t = 0; t <= kHorizon; ++t) worst = std::max(worst, std::abs(emp[t] - exact.survival[t]));
  if (sup) *sup = worst;
  return times_csv(sample);
}

struct EntryLawRun {
  std::string csv;
  double ks = 0.0;
  double mu = 0.0;
  double lambda = 0.0;
  std::uint64_t f = 0;
  double censored = 0.0;
};

EntryLawRun doubling_entry_run(const Settings& s, std::size_t workers) {
  const System d = System::doubling_map();
  const BowenSpec spec{Point::sample(make_key(s.seed, StreamPurpose::Center, 0)), std::ldexp(1.0, -5), 10};
  const HitTarget target = HitTarget::ball(d, spec);
  EntryLawRun run;
  run.mu = target.measure();
  const EntrySample sample = sample_entry_times(d, target, 20'000, s.seed, {0, workers});
  run.f = static_cast<std::uint64_t>(std::ceil(std::pow(run.mu, -0.9)));
  run.lambda = lambda_estimator(sample.survival_at(run.f), static_cast<double>(run.f), run.mu, sample.trials).lambda;
  const SurvivalReport report = survival_and_ks(sample, run.mu, run.lambda);
  run.ks = report.ks_exponential;
  run.censored = report.censored_fraction;
  run.csv = survival_csv(report.curve) + times_csv(sample);
  return run;
}

struct TowerRun {
  TowerExperiment ex;
  std::string csv;
};

TowerRun tower_run(const Settings& s, std::size_t workers) {
  const TowerModel model(TowerSpec{9.0, 10'000, 0.5});
  // Column 3 at level 0 followed by unit columns: a ten-step ball of
  // measure about 1.7e-5.
  const TowerPoint center(3, 0, std::vector<Column>(16, 1));
  TowerRun run{tower_hitting_experiment(model, center, 0.6, 10, 20'000, s.seed, {0, workers}), {}};
  run.csv = survival_csv(run.ex.report.curve) + times_csv(run.ex.sample);
  return run;
}

std::string return_run_csv(const Settings& s, std::size_t workers) {
  const System markov = System::markov({{0.9, 0.1}, {0.2, 0.8}});
  ReturnOptions opt;
  opt.workers = workers;
  return times_csv(sample_return_times(markov, HitTarget::word(markov, word({0, 1})), 100'000, s.seed, opt));
}

Verdict criterion1(const Settings& s) {
  double sup = 0.0;
  oracle_run_csv(s, s.workers, &sup);
  const double bound = dkw_bound(1'000'000, 0.001);
  return {sup <= bound, "sup deviation " + num(sup) + " vs DKW bound " + num(bound)};
}

Verdict criterion2(const Settings& s) {
  const EntryLawRun run = doubling_entry_run(s, s.workers);
  const bool exact_mu = run.mu == 2.0 * std::ldexp(1.0, -5) * std::ldexp(1.0, -9);
  return {exact_mu && run.ks <= 0.02 && run.censored < 0.1,
          "mu " + num(run.mu) + ", f " + std::to_string(run.f) + ", lambda " + num(run.lambda) + ", KS " + num(run.ks) +
              " (tolerance 0.02)"};
}

Verdict criterion3(const Settings& s) {
  const System doubling = System::doubling_map();
  const System bern = System::bernoulli({0.3, 0.7});
  const System markov = System::markov({{0.9, 0.1}, {0.2, 0.8}});
  const Point x = Point::from_real(0.3);
  std::vector<std::pair<const System*, HitTarget>> targets{
      {&doubling, HitTarget::ball(doubling, {x, 0.125, 1})},
      {&doubling, HitTarget::ball(doubling, {x, 0.125, 3})},
      {&doubling, HitTarget::ball(doubling, {x, 0.0625, 3})},
      {&bern, HitTarget::word(bern, word({1}))},
      {&bern, HitTarget::word(bern, word({1, 0}))},
      {&bern, HitTarget::word(bern, word({0, 1, 1}))},
      {&markov, HitTarget::word(markov, word({0}))},
      {&markov, HitTarget::word(markov, word({0, 1}))},
      {&markov, HitTarget::word(markov, word({1, 1, 0}))},
  };
  bool ok = true;
  double worst = 0.0;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const auto& [sys, target] = targets[i];
    ReturnOptions opt;
    opt.workers = s.workers;
    const EntrySample r = sample_return_times(*sys, target, 100'000, s.seed + i, opt);
    const double mu = target.measure();
    const double sigma = r.standard_deviation() * mu / std::sqrt(static_cast<double>(r.times.size()));
    const double z = std::abs(r.mean() * mu - 1.0) / sigma;
    worst = std::max(worst, z);
    ok = ok && z <= 4.0 && r.censored == 0;
  }
  double worst_exact = 0.0;
  std::size_t exact_count = 0;
  for (const System* sys : {&bern, &markov}) {
    for (std::size_t len = 1; len <= 8; ++len) {
      for (const auto& w : binary_words(len)) {
        const WordSet t = single_word(w);
        const double mu = word_set_measure(*sys, t).value;
        worst_exact = std::max(worst_exact, std::abs(exact_kac_mean(*sys, t) * mu - 1.0));
        ++exact_count;
      }
    }
  }
  ok = ok && worst_exact <= 1e-9;
  return {ok, "max |mean mu - 1| / sigma " + num(worst) + " (limit 4); exact Kac over " + std::to_string(exact_count) +
                  " words, max relative error " + num(worst_exact)};
}

Verdict criterion4(const Settings&) {
  const System fair = System::bernoulli({0.5, 0.5});
  std::size_t lambda_checks = 0;
  std::size_t lambda_violations = 0;
  std::size_t envelope_violations = 0;
  double lambda_max = 0.0;
  for (std::size_t len = 1; len <= 6; ++len) {
    for (const auto& w : binary_words(len)) {
      const WordSet t = single_word(w);
      const double mu = word_set_measure(fair, t).value;
      const auto f_max = static_cast<std::uint64_t>(std::floor(0.5 / mu));
      const SurvivalCurve c = exact_survival(fair, t, static_cast<std::size_t>(std::ceil(1.0 / mu)) + 1);
      for (std::uint64_t f = 1; f <= f_max; ++f) {
        const double lambda = lambda_estimator(c.survival[f], static_cast<double>(f), mu).lambda;
        lambda_max = std::max(lambda_max, lambda);
        ++lambda_checks;
        if (!(lambda > 0.0 && lambda <= 2.0)) ++lambda_violations;
      }
      for (std::size_t r = 0; r < c.survival.size(); ++r) {
        if (1.0 - c.survival[r] > static_cast<double>(r) * mu) ++envelope_violations;
      }
    }
  }
  return {lambda_violations == 0 && envelope_violations == 0,
          std::to_string(lambda_checks) + " (target, f) pairs, " + std::to_string(lambda_violations) + " lambda violations (max " +
              num(lambda_max) + "), " + std::to_string(envelope_violations) + " envelope violations"};
}

Verdict criterion5(const Settings& s) {
  const System fair = System::bernoulli({0.5, 0.5});
  const WordSet target = single_word(word({1, 1}));
  constexpr std::uint64_t kDelta = 1;
  const ConditionalLaw law = exact_conditional_survival(fair, target, kDelta, 8);
  const double mu = 0.25;
  // mu^-0.9 = 3.48 leaves the admissible range f mu <= 1/2; take its top.
  const auto f = std::min(static_cast<std::uint64_t>(std::ceil(std::pow(mu, -0.9))), static_cast<std::uint64_t>(0.5 / mu));
  const double lambda = exact_lambda(fair, target, f).estimate.lambda;
  ReturnOptions opt;
  opt.workers = s.workers;
  const EntrySample r = sample_return_times(fair, HitTarget::words(fair, target), 100'000, s.seed, opt);
  const SurvivalReport report = survival_and_ks(r, mu, lambda, default_grid(), ReturnLaw{law.a, law.period, kDelta});
  const bool oracle_ok = law.a == 0.5 && law.period == 1;
  const double sup = *report.ks_a_exponential;
  return {oracle_ok && sup <= 0.03, "exact a " + num(law.a) + ", period " + std::to_string(law.period) + ", lambda " + num(lambda) +
                                        " (f " + std::to_string(f) + "), sup |S_A - a e^-t| " + num(sup) + " (tolerance 0.03)"};
}

Verdict criterion6(const Settings& s) {
  const System fair = System::bernoulli({0.5, 0.5});
  const double ln2 = std::log(2.0);
  constexpr std::size_t kPoints = 200;
  std::vector<EntropyEstimate> est(kPoints);
  parallel_for(kPoints, s.workers, [&](std::size_t i) {
    est[i] = entropy_estimators(fair, Point::sample(make_key(s.seed, StreamPurpose::Center, i)), 0.125, 20);
  });
  const double bk_error = std::abs(est[0].brin_katok - 23.0 / 20.0 * ln2);
  std::vector<double> ow;
  for (const auto& e : est) {
    if (e.ornstein_weiss) ow.push_back(*e.ornstein_weiss);
  }
  std::sort(ow.begin(), ow.end());
  const double median = ow.empty() ? 0.0 : (ow.size() % 2 ? ow[ow.size() / 2] : 0.5 * (ow[ow.size() / 2 - 1] + ow[ow.size() / 2]));
  const double rel = std::abs(median - ln2) / ln2;
  return {bk_error <= 1e-12 && rel <= 0.2 && !ow.empty(),
          "bk(20) error " + num(bk_error) + ", median ow " + num(median) + " (" + fmt("%.1f", 100 * rel) + "% from ln 2, " +
              std::to_string(kPoints - ow.size()) + " censored)"};
}

Verdict criterion7(const Settings&) {
  const System bern = System::bernoulli({0.3, 0.7});
  double worst = 0.0;
  for (std::size_t k = 1; k <= 20; ++k) worst = std::max(worst, alpha_coefficient(bern, k, 8).value.value);
  const System markov = System::markov({{0.9, 0.1}, {0.2, 0.8}});
  const AlphaScan scan = alpha_scan(markov, 5, 15, 8);
  const double rate = scan.model.form == AlphaModel::Form::Geometric ? scan.model.rate : 0.0;
  return {worst <= 1e-12 && std::abs(rate - 0.7) <= 0.14,
          "Bernoulli max alpha " + num(worst) + ", Markov fitted rate " + num(rate) + " (0.7 +- 20%)"};
}

Verdict criterion8(const Settings& s) {
  const System d = System::doubling_map();
  const int n = 2;
  const BowenSpec spec{Point::from_real(0.5), 0.1, n};
  const double mu = bowen_measure(d, spec).value;
  const Arc arc = resolve_ball(d, spec).arc();
  bool ok = true;
  std::string ratios;
  double prev = std::numeric_limits<double>::infinity();
  for (std::size_t depth : {2u * n, 4u * n, 8u * n}) {
    const InnerAnnulus ia = inner_and_annulus(d, spec, depth);
    const double inner = word_set_measure(d, ia.inner).value;
    const double annulus = word_set_measure(d, ia.annulus).value;
    const double ratio = annulus / mu;
    ok = ok && ratio < prev && inner <= mu && mu <= inner + annulus;
    prev = ratio;
    ratios += (ratios.empty() ? "" : ", ") + num(ratio);
    // Every inner cell lies inside the open arc; the outermost cells of the
    // annulus contain the arc endpoints.  Dyadic offsets from the centre are
    // exact in double precision.
    const double cell = std::ldexp(1.0, -static_cast<int>(depth));
    for (const auto& w : ia.inner.words()) {
      std::uint64_t j = 0;
      for (Symbol b : w.symbols) j = (j << 1) | b;
      const double lo = static_cast<double>(j) * cell - arc.center;
      ok = ok && lo > -arc.radius && lo + cell <= arc.radius;
    }
    std::set<std::uint64_t> cells;
    for (const auto& w : ia.annulus.words()) {
      std::uint64_t j = 0;
      for (Symbol b : w.symbols) j = (j << 1) | b;
      cells.insert(j);
    }
    const double low = static_cast<double>(*cells.begin()) * cell - arc.center;
    const double high = static_cast<double>(*cells.rbegin()) * cell - arc.center;
    ok = ok && low <= -arc.radius && -arc.radius < low + cell && high <= arc.radius && arc.radius < high + cell;
    // Random points as a cross-check of the set inclusions.
    for (std::uint64_t i = 0; i < 20'000; ++i) {
      const Point y = Point::sample(make_key(s.seed, StreamPurpose::Auxiliary, i));
      const bool in_ball = bowen_contains(d, spec, y);
      if (ia.inner.contains_point(d, y) && !in_ball) ok = false;
      if (in_ball && !ia.inner.contains_point(d, y) && !ia.annulus.contains_point(d, y)) ok = false;
    }
  }
  return {ok, "mu(annulus)/mu(B) at N = 4, 8, 16: " + ratios};
}

Verdict criterion9(const Settings& s) {
  const TowerRun run = tower_run(s, s.workers);
  const TowerModel model(TowerSpec{9.0, 10'000, 0.5});
  const ChiSquareResult occ = level_occupancy(model, 200'000, 50, s.seed, s.workers);
  const auto& ex = run.ex;
  const bool mu_ok = ex.mu >= 1e-5 && ex.mu <= 1e-4;
  return {mu_ok && ex.law_asserted && ex.report.ks_exponential <= 0.05 && occ.p_value >= 0.01 && ex.non_principal.mass < 0.01 &&
              ex.report.curve.reliable,
          "mu " + num(ex.mu) + ", lambda " + num(ex.lambda.lambda) + ", KS " + num(ex.report.ks_exponential) +
              " (tolerance 0.05), occupancy p " + num(occ.p_value) + " over " + std::to_string(occ.cells) + " cells, non-principal " +
              num(ex.non_principal.mass)};
}

Verdict criterion10(const Settings&) {
  BoundInputs in;
  in.theta_n = 0.0;
  in.alpha_at_depth = 0.0;
  in.depth = 10;
  in.f = 100;
  in.s = 10;
  in.mu_ball = 1e-4;
  in.mu_inner = 1e-4;
  in.c5 = 1.0;
  in.c6 = 1.0;
  const double v = mainthm_bound(in).value;
  bool rejected = false;
  BoundInputs bad = in;
  bad.mu_ball = 0.04;
  bad.f = 21;
  try {
    mainthm_bound(bad);
  } catch (const Error& e) {
    rejected = e.code() == ErrorCode::EmptyRange;
  }
  bool outside = false;
  in.f = 6000;
  try {
    mainthm_bound(in);
  } catch (const Error&) {
    outside = true;
  }
  return {std::abs(v - 1.02) <= 1e-12 && rejected && outside,
          "bound " + fmt("%.15g", v) + ", empty range rejected: " + (rejected ? "yes" : "no") + ", f outside range rejected: " +
              (outside ? "yes" : "no")};
}

Verdict criterion11(const Settings& s) {
  struct Case {
    const char* name;
    std::function<std::string(std::size_t)> run;
  };
  const std::vector<Case> cases{
      {"oracle-compare", [&](std::size_t w) { return oracle_run_csv(s, w); }},
      {"entry-law", [&](std::size_t w) { return doubling_entry_run(s, w).csv; }},
      {"return-law", [&](std::size_t w) { return return_run_csv(s, w); }},
      {"tower-law", [&](std::size_t w) { return tower_run(s, w).csv; }},
  };
  bool ok = true;
  std::string detail;
  for (const auto& c : cases) {
    const bool same = c.run(1) == c.run(4);
    ok = ok && same;
    detail += std::string(detail.empty() ? "" : ", ") + c.name + (same ? " identical" : " DIFFERENT");
  }
  return {ok, detail};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  Settings settings;
  std::vector<int> only;
  app.add_option("--seed", settings.seed, "master seed");
  app.add_option("--workers", settings.workers, "worker threads")->check(CLI::Range(std::size_t{1}, std::size_t{256}));
  app.add_option("--only", only, "run only these criteria")->delimiter(',');
  CLI11_PARSE(app, argc, argv);

  struct Criterion {
    int id;
    const char* title;
    double time_limit;  // seconds, 0 for none
    Verdict (*run)(const Settings&);
  };
  const std::vector<Criterion> criteria{
      {1, "oracle equivalence", 60, criterion1},
      {2, "exponential entry law", 120, criterion2},
      {3, "Kac identity", 0, criterion3},
      {4, "lambda bounds and envelope", 0, criterion4},
      {5, "return law with a", 0, criterion5},
      {6, "entropy estimators", 60, criterion6},
      {7, "alpha mixing", 0, criterion7},
      {8, "annulus control", 0, criterion8},
      {9, "tower law", 300, criterion9},
      {10, "error bound arithmetic", 0, criterion10},
      {11, "determinism across workers", 0, criterion11},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run(settings);
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.time_limit > 0 && secs > c.time_limit) {
      v.pass = false;
      v.detail += "; runtime over " + fmt("%.0f", c.time_limit) + " s";
    }
    failures += v.pass ? 0 : 1;
    std::cout << (v.pass ? "PASS" : "FAIL") << "  criterion " << c.id << " (" << c.title << "): " << v.detail << " ["
              << fmt("%.1f", secs) << " s]" << std::endl;
  }
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criterion(s) failed") << std::endl;
  return failures == 0 ? 0 : 1;
}

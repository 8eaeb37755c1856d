#pragma once

// Entry, return and higher-order return times to dynamic balls and cylinder
// unions, by Monte-Carlo orbit simulation; periods, the long-return
// fraction a_A, entropy estimators and the error-bound evaluator.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "bowen/automaton.hpp"
#include "bowen/error.hpp"
#include "bowen/measure.hpp"
#include "bowen/parallel.hpp"
#include "bowen/rng.hpp"
#include "bowen/stats.hpp"
#include "bowen/survival.hpp"
#include "bowen/symbolic.hpp"
#include "bowen/systems.hpp"

namespace bowen {

// --------------------------------------------------------------------------
// Target detectors.  A detector consumes the symbol sequence y_0, y_1, ...
// and, after the symbol with index e, reports whether T^p y lies in the
// target for p = e + 1 - lookahead().

struct WholeSpaceDetector {
  std::size_t lookahead() const noexcept { return 1; }
  bool feed(Symbol) noexcept { return true; }
};

class WordDetector {
 public:
  explicit WordDetector(const PatternAutomaton* automaton) : automaton_(automaton) {}
  std::size_t lookahead() const noexcept { return automaton_->word_length(); }
  bool feed(Symbol c) noexcept {
    state_ = automaton_->next(state_, c);
    return automaton_->accepting(state_);
  }

 private:
  const PatternAutomaton* automaton_;
  PatternAutomaton::State state_ = PatternAutomaton::kRoot;
};

// Doubling-map arc, read from a 64-bit window of the binary expansion.
class ArcDetector {
 public:
  explicit ArcDetector(Arc arc) : arc_(arc) {}
  std::size_t lookahead() const noexcept { return 64; }
  bool feed(Symbol c) noexcept {
    window_ = (window_ << 1) | c;
    return circle_distance(unit_value(window_), arc_.center) < arc_.radius;
  }

 private:
  Arc arc_;
  std::uint64_t window_ = 0;
};

// Doubling-map Bowen ball checked coordinate by coordinate (used when the
// ball is not a single arc).
class DoublingBowenDetector {
 public:
  DoublingBowenDetector(std::shared_ptr<const std::vector<double>> center_orbit, double epsilon)
      : center_(std::move(center_orbit)), epsilon_(epsilon), ring_(center_->size(), 0.0) {}
  std::size_t lookahead() const noexcept { return 63 + center_->size(); }
  bool feed(Symbol c) noexcept {
    window_ = (window_ << 1) | c;
    if (++fed_ < 64) return false;
    const std::size_t n = ring_.size();
    ring_[(fed_ - 64) % n] = unit_value(window_);
    if (fed_ - 64 + 1 < n) return false;
    const std::size_t first = fed_ - 64 + 1 - n;  // position whose ball test is now complete
    for (std::size_t k = 0; k < n; ++k) {
      if (!(circle_distance(ring_[(first + k) % n], (*center_)[k]) < epsilon_)) return false;
    }
    return true;
  }

 private:
  std::shared_ptr<const std::vector<double>> center_;
  double epsilon_;
  std::vector<double> ring_;
  std::uint64_t window_ = 0;
  std::size_t fed_ = 0;
};

using Detector = std::variant<WholeSpaceDetector, WordDetector, ArcDetector, DoublingBowenDetector>;

// A measurable target set together with its exact measure and a detector
// factory.
class HitTarget {
 public:
  static HitTarget whole_space() {
    HitTarget t;
    t.description_ = "whole-space";
    return t;
  }

  static HitTarget words(const System& sys, const WordSet& set) {
    if (set.length() == 0) return whole_space();
    HitTarget t;
    t.measure_ = word_set_measure(sys, set).value;
    require(t.measure_ > 0.0, ErrorCode::InvalidArgument, "target has zero measure");
    t.automaton_ = std::make_shared<PatternAutomaton>(sys.alphabet_size(), set);
    t.words_ = std::make_shared<WordSet>(set);
    t.description_ = set.size() == 1 ? "word:" + to_string(set.words().front())
                                     : "wordset:N=" + std::to_string(set.length()) + ",size=" + std::to_string(set.size());
    return t;
  }

  static HitTarget word(const System& sys, const CylinderWord& w) {
    return words(sys, WordSet(w.size(), WordRole::Inner, {w}));
  }

  static HitTarget ball(const System& sys, const BowenSpec& spec) {
    validate(spec);
    if (spec.epsilon > sys.diameter()) return whole_space();
    const std::string desc = "bowen:eps=" + format_double(spec.epsilon) + ",n=" + std::to_string(spec.n);
    if (sys.kind() == SystemKind::DoublingMap) {
      HitTarget t;
      t.description_ = desc;
      if (spec.epsilon < 0.25) {
        t.arc_ = resolve_ball(sys, spec).arc();
        t.measure_ = std::min(1.0, 2.0 * t.arc_->radius);
      } else {
        auto orbit = std::make_shared<std::vector<double>>();
        for (int k = 0; k < spec.n; ++k) orbit->push_back(real_value(sys, spec.center, static_cast<std::size_t>(k)));
        t.center_orbit_ = orbit;
        t.epsilon_ = spec.epsilon;
        t.measure_ = bowen_measure(sys, spec).value;
        t.exact_ = false;
      }
      return t;
    }
    const CylinderWord w = resolve_ball(sys, spec).word();
    if (w.empty()) return whole_space();
    HitTarget t = word(sys, w);
    t.description_ = desc;
    return t;
  }

  double measure() const noexcept { return measure_; }
  bool exact_measure() const noexcept { return exact_; }
  bool is_whole_space() const noexcept { return !automaton_ && !arc_ && !center_orbit_; }
  const std::string& describe() const noexcept { return description_; }
  // The cylinder union behind a word target, if any.
  const WordSet* word_set() const noexcept { return words_.get(); }

  Detector detector() const {
    if (automaton_) return WordDetector(automaton_.get());
    if (arc_) return ArcDetector(*arc_);
    if (center_orbit_) return DoublingBowenDetector(center_orbit_, epsilon_);
    return WholeSpaceDetector{};
  }

 private:
  static std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
  }

  double measure_ = 1.0;
  bool exact_ = true;
  std::string description_;
  std::shared_ptr<const PatternAutomaton> automaton_;
  std::shared_ptr<const WordSet> words_;
  std::optional<Arc> arc_;
  std::shared_ptr<const std::vector<double>> center_orbit_;
  double epsilon_ = 0.0;
};

// --------------------------------------------------------------------------
// Samples.

enum class SampleMode { Entry, Return, HigherOrder };

inline const char* to_string(SampleMode mode) {
  switch (mode) {
    case SampleMode::Entry: return "entry";
    case SampleMode::Return: return "return";
    case SampleMode::HigherOrder: return "higher-order";
  }
  return "unknown";
}

struct EntrySample {
  std::vector<std::uint64_t> times;  // uncensored observations, ascending
  std::uint64_t censored = 0;
  std::uint64_t trials = 0;
  std::uint64_t horizon = 0;
  SampleMode mode = SampleMode::Entry;
  unsigned order = 1;
  std::string target;

  bool all_censored() const noexcept { return times.empty(); }
  double censored_fraction() const noexcept {
    return trials == 0 ? 0.0 : static_cast<double>(censored) / static_cast<double>(trials);
  }

  double mean() const {
    require(!times.empty(), ErrorCode::Undefined, "mean of an all-censored sample");
    long double sum = 0;
    for (auto t : times) sum += t;
    return static_cast<double>(sum / static_cast<long double>(times.size()));
  }

  double standard_deviation() const {
    const double m = mean();
    long double acc = 0;
    for (auto t : times) acc += (static_cast<long double>(t) - m) * (static_cast<long double>(t) - m);
    return times.size() < 2 ? 0.0 : std::sqrt(static_cast<double>(acc / static_cast<long double>(times.size() - 1)));
  }

  // Empirical P(tau > r) for r = 0..r_max; censored trials count as survivors.
  std::vector<double> survival_by_time(std::uint64_t r_max) const {
    std::vector<double> out(r_max + 1);
    std::size_t idx = 0;
    const double n = static_cast<double>(trials);
    for (std::uint64_t r = 0; r <= r_max; ++r) {
      while (idx < times.size() && times[idx] <= r) ++idx;
      out[r] = static_cast<double>(times.size() - idx + censored) / n;
    }
    return out;
  }

  // Empirical P(tau > r) at one time.
  double survival_at(std::uint64_t r) const {
    const auto above = static_cast<std::size_t>(times.end() - std::upper_bound(times.begin(), times.end(), r));
    return static_cast<double>(above + censored) / static_cast<double>(trials);
  }
};

inline std::uint64_t default_horizon(double mu) {
  require(mu > 0.0, ErrorCode::InvalidArgument, "horizon needs a positive target measure");
  return static_cast<std::uint64_t>(std::ceil(50.0 / mu));
}

namespace detail {

// Time of the order-th visit at positions >= 1, or nothing past the horizon.
template <typename Det>
std::optional<std::uint64_t> visit_time(const System& sys, SymbolGenerator gen, Det det, unsigned order, std::uint64_t horizon) {
  const std::uint64_t lookahead = det.lookahead();
  unsigned hits = 0;
  for (std::uint64_t e = 0;; ++e) {
    const bool hit = det.feed(gen.next(sys));
    if (e + 1 < lookahead) continue;
    const std::uint64_t p = e + 1 - lookahead;
    if (p >= 1 && hit && ++hits == order) return p;
    if (p >= horizon) return std::nullopt;
  }
}

inline EntrySample collect(std::vector<std::optional<std::uint64_t>>& results, std::uint64_t horizon, SampleMode mode, unsigned order,
                           const std::string& target) {
  EntrySample sample;
  sample.trials = results.size();
  sample.horizon = horizon;
  sample.mode = mode;
  sample.order = order;
  sample.target = target;
  sample.times.reserve(results.size());
  for (const auto& r : results) {
    if (r) {
      sample.times.push_back(*r);
    } else {
      ++sample.censored;
    }
  }
  std::sort(sample.times.begin(), sample.times.end());
  return sample;
}

}  // namespace detail

struct SamplingOptions {
  std::uint64_t horizon = 0;  // 0 selects ceil(50 / mu)
  std::size_t workers = 1;
};

// Time of the order-th entry of independent orbits started from the
// invariant measure; order 1 is the plain entry time.
inline EntrySample higher_order_returns(const System& sys, const HitTarget& target, unsigned order, std::uint64_t trials,
                                        std::uint64_t seed, SamplingOptions options = {}) {
  require(order >= 1, ErrorCode::InvalidArgument, "return order must be at least 1");
  require(trials >= 1, ErrorCode::InvalidArgument, "at least one trial is required");
  const std::uint64_t horizon = options.horizon ? options.horizon : default_horizon(target.measure());
  std::vector<std::optional<std::uint64_t>> results(trials);
  parallel_for(trials, options.workers, [&](std::size_t i) {
    const SymbolGenerator gen(make_key(seed, StreamPurpose::Trial, i));
    results[i] = std::visit([&](auto det) { return detail::visit_time(sys, gen, det, order, horizon); }, target.detector());
  });
  return detail::collect(results, horizon, order == 1 ? SampleMode::Entry : SampleMode::HigherOrder, order, target.describe());
}

inline EntrySample sample_entry_times(const System& sys, const HitTarget& target, std::uint64_t trials, std::uint64_t seed,
                                      SamplingOptions options = {}) {
  return higher_order_returns(sys, target, 1, trials, seed, options);
}

struct ReturnOptions {
  std::uint64_t horizon = 0;      // gaps above it are censored; 0 selects ceil(50 / mu)
  std::uint64_t burn_in = 1'000'000;
  std::size_t orbits = 8;         // fixed, so results do not depend on workers
  std::uint64_t step_budget = 0;  // total steps over all orbits; 0 selects burn-in + 50 M / mu
  std::size_t workers = 1;
};

// Successive return gaps along long ergodic orbits.
inline EntrySample sample_return_times(const System& sys, const HitTarget& target, std::uint64_t returns, std::uint64_t seed,
                                       ReturnOptions options = {}) {
  require(returns >= 1, ErrorCode::InvalidArgument, "at least one return is required");
  require(options.orbits >= 1, ErrorCode::InvalidArgument, "at least one orbit is required");
  const std::uint64_t horizon = options.horizon ? options.horizon : default_horizon(target.measure());
  const std::size_t orbits = static_cast<std::size_t>(std::min<std::uint64_t>(options.orbits, returns));
  const double budget_total = options.step_budget
                                  ? static_cast<double>(options.step_budget)
                                  : static_cast<double>(options.burn_in) * static_cast<double>(orbits) +
                                        50.0 * static_cast<double>(returns) / target.measure();
  const auto budget_per_orbit = static_cast<std::uint64_t>(std::min(budget_total / static_cast<double>(orbits), 9.0e18));

  std::vector<std::vector<std::optional<std::uint64_t>>> per_orbit(orbits);
  parallel_for(orbits, options.workers, [&](std::size_t o) {
    const std::uint64_t quota = returns / orbits + (o < returns % orbits ? 1 : 0);
    auto& out = per_orbit[o];
    out.reserve(quota);
    std::visit(
        [&](auto det) {
          SymbolGenerator gen(make_key(seed, StreamPurpose::Orbit, o));
          const std::uint64_t lookahead = det.lookahead();
          std::optional<std::uint64_t> last;
          for (std::uint64_t e = 0; out.size() < quota; ++e) {
            const bool hit = det.feed(gen.next(sys));
            if (e + 1 < lookahead) continue;
            const std::uint64_t p = e + 1 - lookahead;
            require(p < budget_per_orbit, ErrorCode::BudgetExhausted,
                    "only " + std::to_string(out.size()) + " of " + std::to_string(quota) + " returns within the step budget");
            if (p < options.burn_in || !hit) continue;
            if (last) {
              const std::uint64_t gap = p - *last;
              out.push_back(gap <= horizon ? std::optional<std::uint64_t>(gap) : std::nullopt);
            }
            last = p;
          }
        },
        target.detector());
  });
  std::vector<std::optional<std::uint64_t>> all;
  all.reserve(returns);
  for (auto& v : per_orbit) all.insert(all.end(), v.begin(), v.end());
  return detail::collect(all, horizon, SampleMode::Return, 1, target.describe());
}

// --------------------------------------------------------------------------
// Period and long-return fraction.

namespace detail {

// reach[g][s][t]: a path of exactly g transitions from s to t has positive probability.
inline std::vector<std::vector<std::uint8_t>> reachability(const System& sys, std::size_t max_steps) {
  const std::size_t a = sys.alphabet_size();
  std::vector<std::vector<std::uint8_t>> reach(max_steps + 1, std::vector<std::uint8_t>(a * a, 0));
  for (std::size_t s = 0; s < a; ++s) reach[0][s * a + s] = 1;
  for (std::size_t g = 1; g <= max_steps; ++g) {
    for (std::size_t s = 0; s < a; ++s)
      for (std::size_t m = 0; m < a; ++m) {
        if (!reach[g - 1][s * a + m]) continue;
        for (std::size_t t = 0; t < a; ++t) {
          if (sys.transition(static_cast<Symbol>(m), static_cast<Symbol>(t)) > 0.0) reach[g][s * a + t] = 1;
        }
      }
  }
  return reach;
}

}  // namespace detail

// tau(A) = min{k > 0 : T^{-k} A cap A has positive measure}, by overlap of
// words and, beyond the word length, admissible bridging paths.
inline std::uint64_t period(const System& sys, const WordSet& target) {
  require(!target.empty(), ErrorCode::InvalidArgument, "period of an empty target");
  if (target.length() == 0) return 1;
  for (const auto& w : target.words()) {
    require(admissible(sys, w), ErrorCode::InvalidArgument, "target word " + to_string(w) + " has zero measure");
  }
  const std::size_t length = target.length();
  const std::size_t a = sys.alphabet_size();
  const std::size_t max_gap = a * a + 1;
  const auto reach = detail::reachability(sys, max_gap);
  for (std::size_t k = 1; k < length + max_gap; ++k) {
    for (const auto& u : target.words()) {
      for (const auto& v : target.words()) {
        if (k < length) {
          if (!std::equal(u.symbols.begin() + static_cast<std::ptrdiff_t>(k), u.symbols.end(), v.symbols.begin())) continue;
          // u followed by the last k symbols of v.
          bool ok = true;
          for (std::size_t i = length - k; i < length && ok; ++i) {
            const Symbol prev = i == length - k ? u.symbols.back() : v.symbols[i - 1];
            ok = sys.transition(prev, v.symbols[i]) > 0.0;
          }
          if (ok) return k;
        } else if (reach[k - length + 1][u.symbols.back() * a + v.symbols.front()]) {
          return k;
        }
      }
    }
  }
  throw Error(ErrorCode::Undefined, "target is never revisited");
}

inline std::uint64_t period(const System& sys, const CylinderWord& w) {
  return period(sys, WordSet(w.size(), WordRole::Inner, {w}));
}

struct AEstimate {
  double value = 0.0;
  double half_width = 0.0;  // 99% DKW
  std::uint64_t period = 0;
  std::uint64_t returns = 0;
};

// Empirical a_A = P_A(tau_A > tau(A) + Delta) from return gaps.
inline AEstimate a_estimate(const System& sys, const WordSet& target, std::uint64_t delta, std::uint64_t returns, std::uint64_t seed,
                            ReturnOptions options = {}) {
  require(delta >= 1, ErrorCode::InvalidArgument, "Delta must be at least 1");
  const HitTarget hit = HitTarget::words(sys, target);
  // X itself has no long returns; otherwise Delta < 1/mu(A).
  require(hit.measure() >= 1.0 || static_cast<double>(delta) < 1.0 / hit.measure(), ErrorCode::InvalidArgument,
          "Delta must be below 1/mu(A)");
  AEstimate out;
  out.period = period(sys, target);
  const EntrySample sample = sample_return_times(sys, hit, returns, seed, options);
  out.value = sample.survival_at(out.period + delta);
  out.half_width = dkw_bound(sample.trials, 0.01);
  out.returns = sample.trials;
  return out;
}

// --------------------------------------------------------------------------
// Survival curves against exponential laws.

struct ReturnLaw {
  double a = 1.0;
  std::uint64_t period = 1;
  std::uint64_t delta = 0;
};

struct SurvivalReport {
  SurvivalCurve curve;
  double ks_exponential = 0.0;                // sup_t |S(t) - e^{-t}|
  std::optional<double> ks_a_exponential;     // sup over t > (period+delta) lambda mu of |S(t) - a e^{-t}|
  double censored_fraction = 0.0;
};

inline constexpr double kMaxReliableCensoring = 0.10;

inline SurvivalReport survival_and_ks(const EntrySample& sample, double mu, double lambda, const std::vector<double>& grid = default_grid(),
                                      std::optional<ReturnLaw> law = std::nullopt) {
  require(!sample.all_censored(), ErrorCode::InvalidArgument, "sample is entirely censored");
  require(lambda > 0.0 && mu > 0.0, ErrorCode::InvalidArgument, "lambda and mu must be positive");
  const double scale = lambda * mu;
  const std::vector<double> by_time = sample.survival_by_time(sample.horizon);
  SurvivalReport report;
  report.censored_fraction = sample.censored_fraction();
  SurvivalCurve& curve = report.curve;
  curve.sample_size = sample.trials;
  curve.lambda = lambda;
  curve.mu = mu;
  curve.mode = MeasureMode::MonteCarlo;
  curve.reliable = report.censored_fraction <= kMaxReliableCensoring;
  for (double t : grid) {
    const double raw = std::floor(t / scale);
    const auto r = static_cast<std::uint64_t>(std::min(raw, static_cast<double>(sample.horizon)));
    curve.t.push_back(t);
    curve.survival.push_back(by_time[r]);
    curve.at_risk.push_back(static_cast<std::uint64_t>(std::llround(by_time[r] * static_cast<double>(sample.trials))));
  }
  report.ks_exponential = sup_distance_to_exponential(by_time, scale);
  if (law) {
    report.ks_a_exponential =
        sup_distance_to_exponential(by_time, scale, law->a, static_cast<double>(law->period + law->delta) * scale);
  }
  return report;
}

// Exact curve sampled on a rescaled grid (oracle counterpart of survival_and_ks).
inline SurvivalCurve rescale_exact(const std::vector<double>& by_time, double mu, double lambda, const std::vector<double>& grid) {
  SurvivalCurve curve;
  curve.lambda = lambda;
  curve.mu = mu;
  curve.mode = MeasureMode::Exact;
  const double scale = lambda * mu;
  for (double t : grid) {
    const auto r = static_cast<std::size_t>(std::min(std::floor(t / scale), static_cast<double>(by_time.size() - 1)));
    curve.t.push_back(t);
    curve.survival.push_back(by_time[r]);
    curve.at_risk.push_back(0);
  }
  return curve;
}

// --------------------------------------------------------------------------
// Entropy estimators.

struct EntropyEstimate {
  double brin_katok = 0.0;                   // -(1/n) log mu(B_{eps,n}(x))
  std::optional<double> ornstein_weiss;      // (1/n) log R_{eps,n}(x)
  std::optional<std::uint64_t> recurrence;   // R_{eps,n}(x); empty when censored
};

inline EntropyEstimate entropy_estimators(const System& sys, const Point& x, double epsilon, int n, std::uint64_t horizon = 0) {
  const BowenSpec spec{x, epsilon, n};
  EntropyEstimate out;
  const double mu = bowen_measure(sys, spec).value;
  out.brin_katok = -std::log(mu) / n;
  const HitTarget target = HitTarget::ball(sys, spec);
  if (horizon == 0) horizon = default_horizon(target.measure());
  Point cursor = x;
  out.recurrence = std::visit(
      [&](auto det) -> std::optional<std::uint64_t> {
        const std::uint64_t lookahead = det.lookahead();
        for (std::uint64_t e = 0;; ++e) {
          const bool hit = det.feed(cursor.symbol(sys, 0));
          cursor.advance(sys);
          if (e + 1 < lookahead) continue;
          const std::uint64_t p = e + 1 - lookahead;
          if (p >= 1 && hit) return p;
          if (p >= horizon) return std::nullopt;
        }
      },
      target.detector());
  if (out.recurrence) out.ornstein_weiss = std::log(static_cast<double>(*out.recurrence)) / n;
  return out;
}

// --------------------------------------------------------------------------
// Error bound for the rescaled entry law.

struct BoundInputs {
  double theta_n = 0.0;    // regularity modulus, taken as given
  double t = 1.0;
  double s = 1.0;
  double lambda = 1.0;
  double f = 1.0;
  double mu_ball = 0.0;
  double mu_inner = 0.0;
  double depth = 1.0;      // N(n)
  double alpha_at_depth = 0.0;
  double c5 = 1.0;
  double c6 = 1.0;
};

struct BoundValue {
  double value = 0.0;
  double terms[4] = {0, 0, 0, 0};
  double f = 0.0;
};

// Open admissible range (2 N, 1 / (2 mu(B))) for f.
inline std::pair<double, double> admissible_f_range(double depth, double mu_ball) { return {2.0 * depth, 0.5 / mu_ball}; }

inline BoundValue mainthm_bound(const BoundInputs& in) {
  require(in.s > 0 && in.lambda > 0 && in.f > 0 && in.mu_ball > 0 && in.mu_inner > 0 && in.depth > 0, ErrorCode::InvalidArgument,
          "bound inputs must be positive");
  require(in.theta_n >= 0 && in.t >= 0 && in.alpha_at_depth >= 0 && in.c5 >= 0 && in.c6 >= 0, ErrorCode::InvalidArgument,
          "bound inputs must be nonnegative");
  const auto [lo, hi] = admissible_f_range(in.depth, in.mu_ball);
  require(lo < hi, ErrorCode::EmptyRange, "admissible f-range (2N, 1/(2 mu(B))) is empty");
  require(in.f > lo && in.f < hi, ErrorCode::InvalidArgument, "f lies outside the admissible range (2N, 1/(2 mu(B)))");
  BoundValue out;
  out.f = in.f;
  out.terms[0] = in.theta_n * in.t / (in.s * in.lambda);
  out.terms[1] = 2.0 * in.f * in.mu_ball;
  out.terms[2] = in.c5 * in.s * in.depth / in.f;
  out.terms[3] = in.c6 * in.s * in.alpha_at_depth / (in.f * in.mu_inner);
  out.value = out.terms[0] + out.terms[1] + out.terms[2] + out.terms[3];
  return out;
}

// The bound minimised over integer f in the admissible range.  The f-dependent
// part is 2 f mu + K / f, so the optimum is at a neighbour of sqrt(K / (2 mu)).
inline BoundValue minimize_mainthm_bound(BoundInputs in) {
  require(in.mu_ball > 0 && in.depth > 0, ErrorCode::InvalidArgument, "bound inputs must be positive");
  const auto [lo, hi] = admissible_f_range(in.depth, in.mu_ball);
  const double first = std::floor(lo) + 1.0;
  const double last = std::ceil(hi) - 1.0;
  require(first <= last, ErrorCode::EmptyRange, "no integer f in the admissible range (2N, 1/(2 mu(B)))");
  const double k = in.c5 * in.s * in.depth + in.c6 * in.s * in.alpha_at_depth / in.mu_inner;
  const double centre = std::sqrt(k / (2.0 * in.mu_ball));
  BoundValue best;
  best.value = std::numeric_limits<double>::infinity();
  for (double candidate : {first, last, std::floor(centre), std::ceil(centre)}) {
    in.f = std::clamp(candidate, first, last);
    const BoundValue v = mainthm_bound(in);
    if (v.value < best.value) best = v;
  }
  return best;
}

// Defaults for the approximation depth and the block length.
struct ScalingParameters {
  double eta = 0.45;     // N(n) = ceil(mu(B)^-eta), eta in (0, 1/2)
  double beta = 0.9;     // f = ceil(mu(B~)^-beta), beta in (eta, 1)
  double c_prime = 0.5;  // C' in (0, 1)
};

inline std::uint64_t default_depth(double mu_ball, double eta = 0.45) {
  require(mu_ball > 0.0 && mu_ball <= 1.0, ErrorCode::InvalidArgument, "mu(B) must lie in (0,1]");
  require(eta > 0.0 && eta < 0.5, ErrorCode::InvalidArgument, "eta must lie in (0, 1/2)");
  return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::ceil(std::pow(mu_ball, -eta))));
}

inline std::uint64_t default_block_length(double mu_inner, double beta = 0.9) {
  require(mu_inner > 0.0 && mu_inner <= 1.0, ErrorCode::InvalidArgument, "mu(B~) must lie in (0,1]");
  require(beta > 0.0 && beta < 1.0, ErrorCode::InvalidArgument, "beta must lie in (0,1)");
  return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::ceil(std::pow(mu_inner, -beta))));
}

}  // namespace bowen

#pragma once

// Exact hitting- and return-time laws on shift systems (the doubling map is
// covered through its fair-bit coding).  The target is a union of cylinders
// recognised by a pattern automaton; the law of the first match is read off
// the sub-stochastic chain obtained by deleting accepting states.

#include <cmath>
#include <cstdint>
#include <vector>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "bowen/automaton.hpp"
#include "bowen/error.hpp"
#include "bowen/measure.hpp"
#include "bowen/survival.hpp"
#include "bowen/symbolic.hpp"

namespace bowen {

// Chain on (automaton state, last symbol); the last symbol is only tracked
// for Markov shifts.  Mass entering an accepting state is absorbed.
class AbsorbingChain {
 public:
  AbsorbingChain(const System& sys, const WordSet& target)
      : sys_(&sys), automaton_(sys.alphabet_size(), target), markov_(sys.kind() == SystemKind::MarkovShift) {
    for (const auto& w : target.words()) {
      require(admissible(sys, w), ErrorCode::InvalidArgument, "target word " + to_string(w) + " has zero measure");
    }
    const double states = static_cast<double>(automaton_.state_count()) * static_cast<double>(memory());
    require(states <= static_cast<double>(kMaxAutomatonStates), ErrorCode::CapacityExceeded,
            "absorbing chain needs " + std::to_string(states) + " states");
    target_ = target;
    mu_ = word_set_measure(sys, target).value;
  }

  std::size_t size() const noexcept { return automaton_.state_count() * memory(); }
  const PatternAutomaton& automaton() const noexcept { return automaton_; }
  double target_measure() const noexcept { return mu_; }

  // Distribution for the entry time: y_0 ~ invariant law, nothing read yet.
  std::vector<double> entry_start() const {
    std::vector<double> v(size(), 0.0);
    if (markov_) {
      for (std::size_t s = 0; s < memory(); ++s) v[index(PatternAutomaton::kRoot, s)] = sys_->initial(static_cast<Symbol>(s));
    } else {
      v[index(PatternAutomaton::kRoot, 0)] = 1.0;
    }
    return v;
  }

  // Distribution after reading y_0..y_{L-1} conditioned on landing in the target.
  std::vector<double> conditional_start() const {
    std::vector<double> v(size(), 0.0);
    for (const auto& w : target_.words()) {
      const auto state = automaton_.run(w);
      v[index(state, markov_ ? w.symbols.back() : 0)] += cylinder_measure(*sys_, w).value / mu_;
    }
    return v;
  }

  // Reads one symbol; returns the mass absorbed by this step.
  double step(std::vector<double>& v, std::vector<double>& scratch) const {
    scratch.assign(v.size(), 0.0);
    double absorbed = 0.0;
    const std::size_t a = sys_->alphabet_size();
    for (std::size_t q = 0; q < automaton_.state_count(); ++q) {
      for (std::size_t s = 0; s < memory(); ++s) {
        const double mass = v[index(static_cast<PatternAutomaton::State>(q), s)];
        if (mass == 0.0) continue;
        for (std::size_t c = 0; c < a; ++c) {
          const double p = markov_ ? sys_->transition(static_cast<Symbol>(s), static_cast<Symbol>(c)) : sys_->initial(static_cast<Symbol>(c));
          if (p == 0.0) continue;
          const auto to = automaton_.next(static_cast<PatternAutomaton::State>(q), static_cast<Symbol>(c));
          if (automaton_.accepting(to)) {
            absorbed += mass * p;
          } else {
            scratch[index(to, markov_ ? c : 0)] += mass * p;
          }
        }
      }
    }
    v.swap(scratch);
    return absorbed;
  }

  // Sparse I - Q over all states (transitions into accepting states removed).
  Eigen::SparseMatrix<double> resolvent_operator() const {
    std::vector<Eigen::Triplet<double>> entries;
    const std::size_t a = sys_->alphabet_size();
    for (std::size_t q = 0; q < automaton_.state_count(); ++q) {
      for (std::size_t s = 0; s < memory(); ++s) {
        const auto from = static_cast<int>(index(static_cast<PatternAutomaton::State>(q), s));
        entries.emplace_back(from, from, 1.0);
        for (std::size_t c = 0; c < a; ++c) {
          const double p = markov_ ? sys_->transition(static_cast<Symbol>(s), static_cast<Symbol>(c)) : sys_->initial(static_cast<Symbol>(c));
          const auto to = automaton_.next(static_cast<PatternAutomaton::State>(q), static_cast<Symbol>(c));
          if (p == 0.0 || automaton_.accepting(to)) continue;
          entries.emplace_back(from, static_cast<int>(index(to, markov_ ? c : 0)), -p);
        }
      }
    }
    const auto n = static_cast<int>(size());
    Eigen::SparseMatrix<double> m(n, n);
    m.setFromTriplets(entries.begin(), entries.end());
    return m;
  }

 private:
  std::size_t memory() const noexcept { return markov_ ? sys_->alphabet_size() : 1; }
  std::size_t index(PatternAutomaton::State q, std::size_t s) const noexcept { return q * memory() + s; }

  const System* sys_;
  PatternAutomaton automaton_;
  bool markov_;
  WordSet target_{1, WordRole::Inner};
  double mu_ = 0.0;
};

namespace detail {

inline double total(const std::vector<double>& v) {
  double sum = 0.0;
  for (double x : v) sum += x;
  return sum;
}

inline SurvivalCurve integer_curve(std::vector<double> values) {
  SurvivalCurve curve;
  curve.t.resize(values.size());
  for (std::size_t r = 0; r < values.size(); ++r) curve.t[r] = static_cast<double>(r);
  curve.survival = std::move(values);
  curve.mode = MeasureMode::Exact;
  return curve;
}

}  // namespace detail

// P(tau_A > t) for t = 0..t_max, on the raw integer grid.
inline SurvivalCurve exact_survival(const System& sys, const WordSet& target, std::size_t t_max) {
  const AbsorbingChain chain(sys, target);
  std::vector<double> v = chain.entry_start();
  std::vector<double> scratch;
  // Windows start at index 1, so the first L-1 reads cannot complete a match.
  for (std::size_t i = 0; i + 1 < target.length(); ++i) chain.step(v, scratch);
  std::vector<double> values(t_max + 1);
  values[0] = 1.0;
  for (std::size_t t = 1; t <= t_max; ++t) {
    chain.step(v, scratch);
    values[t] = detail::total(v);
  }
  SurvivalCurve curve = detail::integer_curve(std::move(values));
  curve.mu = chain.target_measure();
  return curve;
}

struct ConditionalLaw {
  SurvivalCurve curve;     // P_A(tau_A > t), t = 0..t_max
  double a = 0.0;          // P_A(tau_A > period + delta)
  std::uint64_t period = 0;
};

// Return-time law under the conditional measure mu(. | A).
inline ConditionalLaw exact_conditional_survival(const System& sys, const WordSet& target, std::uint64_t delta, std::size_t t_max) {
  const AbsorbingChain chain(sys, target);
  std::vector<double> v = chain.conditional_start();
  std::vector<double> scratch;
  std::vector<double> values{1.0};
  std::uint64_t period = 0;
  // Every state reaches acceptance, so some return happens within
  // states * alphabet steps; run at least that far to find the period.
  const std::size_t period_horizon = chain.size() * sys.alphabet_size() + target.length() + 1;
  for (std::size_t t = 1;; ++t) {
    const double absorbed = chain.step(v, scratch);
    values.push_back(detail::total(v));
    if (period == 0 && absorbed > 0.0) period = t;
    require(period != 0 || t < period_horizon, ErrorCode::Undefined, "target is never revisited");
    if (period != 0 && t >= t_max && t >= period + delta) break;
  }
  ConditionalLaw law;
  law.period = period;
  law.a = values[period + delta];
  values.resize(t_max + 1);
  law.curve = detail::integer_curve(std::move(values));
  law.curve.mu = chain.target_measure();
  return law;
}

// E_A[tau_A] from the resolvent (I - Q)^{-1} applied to the conditional start.
inline double exact_kac_mean(const System& sys, const WordSet& target) {
  const AbsorbingChain chain(sys, target);
  Eigen::SparseMatrix<double> op = chain.resolvent_operator();
  op.makeCompressed();
  Eigen::SparseLU<Eigen::SparseMatrix<double>> solver;
  solver.compute(op);
  require(solver.info() == Eigen::Success, ErrorCode::Undefined, "resolvent is singular");
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(chain.size()));
  const Eigen::VectorXd expected_steps = solver.solve(ones);
  require(solver.info() == Eigen::Success, ErrorCode::Undefined, "resolvent solve failed");
  const std::vector<double> start = chain.conditional_start();
  double mean = 0.0;
  for (std::size_t i = 0; i < start.size(); ++i) mean += start[i] * expected_steps(static_cast<Eigen::Index>(i));
  return mean;
}

struct ExactLambda {
  LambdaEstimate estimate;
  bool within_upper_bound = true;  // lambda <= 2
};

// Exact lambda_{A,f}; requires f mu(A) <= 1/2.
inline ExactLambda exact_lambda(const System& sys, const WordSet& target, std::uint64_t f) {
  require(f >= 1, ErrorCode::InvalidArgument, "f must be at least 1");
  const double mu = word_set_measure(sys, target).value;
  require(static_cast<double>(f) * mu <= 0.5, ErrorCode::InvalidArgument, "exact lambda requires f mu(A) <= 1/2");
  const SurvivalCurve curve = exact_survival(sys, target, f);
  ExactLambda out;
  out.estimate = lambda_estimator(curve.survival[f], static_cast<double>(f), mu);
  out.within_upper_bound = out.estimate.lambda > 0.0 && out.estimate.lambda <= 2.0;
  return out;
}

inline WordSet single_word(const CylinderWord& w) { return WordSet(w.size(), WordRole::Inner, {w}); }

}  // namespace bowen

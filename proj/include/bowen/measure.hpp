#pragma once

// Measures of cylinders, Bowen balls and metric balls; the regularity
// function phi; alpha-mixing coefficients and envelope models.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "bowen/error.hpp"
#include "bowen/stats.hpp"
#include "bowen/symbolic.hpp"
#include "bowen/systems.hpp"

namespace bowen {

enum class MeasureMode { Exact, MonteCarlo };

inline const char* to_string(MeasureMode mode) { return mode == MeasureMode::Exact ? "exact" : "monte-carlo"; }

struct MeasureValue {
  double value = 0.0;
  MeasureMode mode = MeasureMode::Exact;
  std::uint64_t samples = 0;
  double half_width = 0.0;  // 99% confidence, zero for exact values

  static MeasureValue exact(double v) { return MeasureValue{v, MeasureMode::Exact, 0, 0.0}; }
};

inline MeasureValue cylinder_measure(const System& sys, const CylinderWord& w) {
  require(in_alphabet(sys, w), ErrorCode::InvalidArgument, "word uses symbols outside the alphabet");
  if (sys.kind() == SystemKind::DoublingMap) {
    require(w.size() <= kMaxDyadicDepth, ErrorCode::DepthExceeded, "doubling-map cylinders are capped at depth 50");
    return MeasureValue::exact(std::ldexp(1.0, -static_cast<int>(w.size())));
  }
  if (w.empty()) return MeasureValue::exact(1.0);
  double m = sys.initial(w[0]);
  for (std::size_t i = 1; i < w.size(); ++i) m *= sys.transition(w[i - 1], w[i]);
  return MeasureValue::exact(m);
}

inline MeasureValue word_set_measure(const System& sys, const WordSet& set) {
  if (sys.kind() == SystemKind::DoublingMap) {
    return MeasureValue::exact(std::ldexp(static_cast<double>(set.size()), -static_cast<int>(set.length())));
  }
  double total = 0.0;
  for (const auto& w : set.words()) total += cylinder_measure(sys, w).value;
  return MeasureValue::exact(total);
}

// Monte-Carlo estimate of mu(B_{eps,n}(x)) by direct membership tests.
inline MeasureValue bowen_measure_mc(const System& sys, const BowenSpec& spec, std::uint64_t samples, std::uint64_t seed) {
  require(samples >= 1, ErrorCode::InvalidArgument, "at least one sample is required");
  std::uint64_t hits = 0;
  for (std::uint64_t i = 0; i < samples; ++i) {
    const Point y = sample_invariant(sys, make_key(seed, StreamPurpose::Auxiliary, i));
    hits += bowen_contains(sys, spec, y) ? 1 : 0;
  }
  return MeasureValue{static_cast<double>(hits) / static_cast<double>(samples), MeasureMode::MonteCarlo, samples,
                      dkw_bound(samples, 0.01)};
}

inline constexpr std::uint64_t kDefaultMeasureSamples = 1'000'000;

inline MeasureValue bowen_measure(const System& sys, const BowenSpec& spec) {
  validate(spec);
  if (spec.epsilon > sys.diameter()) return MeasureValue::exact(1.0);
  if (sys.kind() == SystemKind::DoublingMap) {
    if (spec.epsilon < 0.25) {
      return MeasureValue::exact(std::min(1.0, 2.0 * resolve_ball(sys, spec).arc().radius));
    }
    return bowen_measure_mc(sys, spec, kDefaultMeasureSamples, 0);
  }
  return cylinder_measure(sys, resolve_ball(sys, spec).word());
}

// mu(B(x, r)), the metric ball (a Bowen ball with n = 1).
inline double ball_measure(const System& sys, const Point& x, double radius) {
  require(radius > 0.0, ErrorCode::InvalidArgument, "radius must be positive");
  if (sys.kind() == SystemKind::DoublingMap) return radius >= 0.5 ? 1.0 : 2.0 * radius;
  if (radius > 1.0) return 1.0;
  // radius <= 1 forces at least one agreed symbol
  return cylinder_measure(sys, coding(sys, x, agreement_for_radius(radius))).value;
}

// Relative measure of the annulus B(x, eps+delta) \ B(x, eps-delta).
inline double phi(const System& sys, double epsilon, double delta, const Point& x) {
  require(delta > 0.0 && delta < epsilon, ErrorCode::InvalidArgument, "phi needs 0 < delta < epsilon");
  const double ball = ball_measure(sys, x, epsilon);
  require(ball > 0.0, ErrorCode::Undefined, "ball of radius epsilon has zero measure");
  return (ball_measure(sys, x, epsilon + delta) - ball_measure(sys, x, epsilon - delta)) / ball;
}

// Envelope model for the mixing coefficient alpha(k).
struct AlphaModel {
  enum class Form { Zero, Geometric, Polynomial };

  Form form = Form::Zero;
  double c = 0.0;
  double rate = 0.0;  // rho for Geometric, kappa for Polynomial

  static AlphaModel zero() { return {}; }
  static AlphaModel geometric(double c, double rho) {
    require(c > 0.0 && rho > 0.0 && rho < 1.0, ErrorCode::InvalidArgument, "geometric model needs c > 0 and rho in (0,1)");
    return {Form::Geometric, c, rho};
  }
  static AlphaModel polynomial(double c, double kappa) {
    require(c > 0.0 && kappa > 0.0, ErrorCode::InvalidArgument, "polynomial model needs c > 0 and kappa > 0");
    return {Form::Polynomial, c, kappa};
  }

  double operator()(double k) const {
    switch (form) {
      case Form::Zero: return 0.0;
      case Form::Geometric: return c * std::pow(rate, k);
      case Form::Polynomial: return c * std::pow(k, -(2.0 + rate));
    }
    return 0.0;
  }

  // Smallest integer k >= 1 with alpha(k) <= u; the Zero model returns 0.
  std::uint64_t inverse(double u) const {
    require(u > 0.0, ErrorCode::InvalidArgument, "alpha inverse needs a positive level");
    if (form == Form::Zero) return 0;
    double guess = form == Form::Geometric ? std::log(u / c) / std::log(rate) : std::pow(c / u, 1.0 / (2.0 + rate));
    guess = std::clamp(std::ceil(guess), 1.0, 9.0e15);
    auto k = static_cast<std::uint64_t>(guess);
    while (k > 1 && (*this)(static_cast<double>(k - 1)) <= u) --k;
    while ((*this)(static_cast<double>(k)) > u) ++k;
    return k;
  }
};

inline const char* to_string(AlphaModel::Form form) {
  switch (form) {
    case AlphaModel::Form::Zero: return "zero";
    case AlphaModel::Form::Geometric: return "geometric";
    case AlphaModel::Form::Polynomial: return "polynomial";
  }
  return "unknown";
}

// Number of cylinders the alpha search may enumerate on each side.
inline constexpr double kMaxAlphaWords = 1.0e7;

struct AlphaCoefficient {
  MeasureValue value;
  // True when the value maximises over single cylinders only, which bounds
  // the supremum over unions from below.
  bool lower_bound = false;
};

namespace detail {

// Visits every word of length 1..max_length.
template <typename Visit>
void for_each_word(std::size_t alphabet, std::size_t max_length, Visit&& visit) {
  std::vector<Symbol> word;
  for (std::size_t len = 1; len <= max_length; ++len) {
    word.assign(len, 0);
    while (true) {
      visit(word);
      std::size_t pos = len;
      while (pos > 0 && ++word[pos - 1] == alphabet) word[--pos] = 0;
      if (pos == 0) break;
    }
  }
}

inline Eigen::MatrixXd transition_eigen(const System& sys) {
  const auto a = static_cast<Eigen::Index>(sys.alphabet_size());
  Eigen::MatrixXd p(a, a);
  for (Eigen::Index i = 0; i < a; ++i)
    for (Eigen::Index j = 0; j < a; ++j) p(i, j) = sys.transition(static_cast<Symbol>(i), static_cast<Symbol>(j));
  return p;
}

}  // namespace detail

// sup |mu(A cap sigma^{-(n+k)} B) - mu(A) mu(B)| over cylinders A (length n)
// and B of length at most max_length.
inline AlphaCoefficient alpha_coefficient(const System& sys, std::size_t k, std::size_t max_length = 8) {
  require(k >= 1, ErrorCode::InvalidArgument, "alpha gap k must be at least 1");
  require(max_length >= 1, ErrorCode::InvalidArgument, "cylinder length cap must be at least 1");
  if (sys.kind() != SystemKind::MarkovShift) return {MeasureValue::exact(0.0), false};

  const std::size_t a = sys.alphabet_size();
  double words = 0.0;
  for (std::size_t len = 1; len <= max_length; ++len) words += std::pow(static_cast<double>(a), static_cast<double>(len));
  require(words <= kMaxAlphaWords, ErrorCode::CapacityExceeded,
          "alpha search over " + std::to_string(words) + " cylinders exceeds the cap");

  // A contributes mu(A) through its last symbol; B contributes the product
  // of its internal transitions through its first symbol.
  std::vector<double> best_past(a, 0.0);
  std::vector<double> best_future(a, 0.0);
  detail::for_each_word(a, max_length, [&](const std::vector<Symbol>& w) {
    double mu = sys.initial(w[0]);
    double tail = 1.0;
    for (std::size_t i = 1; i < w.size(); ++i) {
      const double p = sys.transition(w[i - 1], w[i]);
      mu *= p;
      tail *= p;
    }
    best_past[w.back()] = std::max(best_past[w.back()], mu);
    best_future[w.front()] = std::max(best_future[w.front()], tail);
  });

  Eigen::MatrixXd power = detail::transition_eigen(sys);
  Eigen::MatrixXd gap = Eigen::MatrixXd::Identity(power.rows(), power.cols());
  for (std::size_t e = k + 1; e > 0; e >>= 1) {
    if (e & 1U) gap = gap * power;
    power = power * power;
  }
  double sup = 0.0;
  for (std::size_t s = 0; s < a; ++s)
    for (std::size_t t = 0; t < a; ++t) {
      const double diff = std::abs(gap(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(t)) - sys.initial(static_cast<Symbol>(t)));
      sup = std::max(sup, best_past[s] * best_future[t] * diff);
    }
  return {MeasureValue::exact(sup), true};
}

struct AlphaScan {
  std::vector<std::size_t> k;
  std::vector<double> raw;
  std::vector<double> envelope;  // suffix maximum of raw over the scanned range
  AlphaModel model;              // fitted geometric model (Zero when all vanish)
  bool lower_bound = false;
};

// Least-squares fit of log alpha(k) = log c + k log rho over positive values.
inline AlphaModel fit_geometric(const std::vector<std::size_t>& ks, const std::vector<double>& values) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  double count = 0;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    if (!(values[i] > 0.0)) continue;
    const double x = static_cast<double>(ks[i]);
    const double y = std::log(values[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    count += 1;
  }
  if (count < 2) return AlphaModel::zero();
  const double slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
  const double intercept = (sy - slope * sx) / count;
  const double rho = std::exp(slope);
  if (!(rho > 0.0 && rho < 1.0)) return AlphaModel::zero();
  return AlphaModel::geometric(std::exp(intercept), rho);
}

inline AlphaScan alpha_scan(const System& sys, std::size_t k_first, std::size_t k_last, std::size_t max_length = 8) {
  require(k_first >= 1 && k_last >= k_first, ErrorCode::InvalidArgument, "alpha scan range must satisfy 1 <= first <= last");
  AlphaScan scan;
  for (std::size_t k = k_first; k <= k_last; ++k) {
    const AlphaCoefficient c = alpha_coefficient(sys, k, max_length);
    scan.k.push_back(k);
    scan.raw.push_back(c.value.value);
    scan.lower_bound = scan.lower_bound || c.lower_bound;
  }
  scan.envelope = scan.raw;
  for (std::size_t i = scan.envelope.size(); i-- > 1;) scan.envelope[i - 1] = std::max(scan.envelope[i - 1], scan.envelope[i]);
  scan.model = fit_geometric(scan.k, scan.raw);
  return scan;
}

// s = alpha^{-1}(C' mu(B~)) + N: the time gap used by the error bound.
inline std::uint64_t s_parameter(const AlphaModel& alpha, double mu_inner, std::uint64_t depth, double c_prime = 0.5) {
  require(mu_inner > 0.0 && mu_inner <= 1.0, ErrorCode::InvalidArgument, "mu of the inner approximation must lie in (0,1]");
  require(c_prime > 0.0 && c_prime < 1.0, ErrorCode::InvalidArgument, "C' must lie in (0,1)");
  return alpha.inverse(c_prime * mu_inner) + depth;
}

}  // namespace bowen

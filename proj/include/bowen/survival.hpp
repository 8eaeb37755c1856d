#pragma once

// Survival curves of hitting times, the lambda normaliser and sup-distances
// to exponential laws.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "bowen/error.hpp"
#include "bowen/measure.hpp"
#include "bowen/stats.hpp"

namespace bowen {

// P(tau > raw) sampled on a grid of rescaled times t = raw * lambda * mu.
struct SurvivalCurve {
  std::vector<double> t;
  std::vector<double> survival;
  std::vector<std::uint64_t> at_risk;  // number of trials with tau > raw time (empirical curves)
  std::uint64_t sample_size = 0;
  double lambda = 1.0;
  double mu = 1.0;
  MeasureMode mode = MeasureMode::Exact;
  bool reliable = true;

  double scale() const noexcept { return lambda * mu; }
};

struct LambdaEstimate {
  double lambda = 0.0;
  double f = 0.0;
  double mu = 0.0;
  double survival_at_f = 0.0;
  double half_width = 0.0;  // 99% confidence on lambda; zero for exact survival
};

// lambda_{B,f} = -log P(tau_B > f) / (f mu(B)).  With samples > 0 the
// survival is treated as an empirical frequency and a DKW interval is
// propagated.
inline LambdaEstimate lambda_estimator(double survival_at_f, double f, double mu, std::uint64_t samples = 0) {
  require(f > 0.0 && mu > 0.0, ErrorCode::InvalidArgument, "lambda needs f > 0 and mu > 0");
  require(survival_at_f > 0.0 && survival_at_f < 1.0, ErrorCode::Undefined,
          "lambda is undefined when P(tau > f) is 0 or 1");
  LambdaEstimate out{-std::log(survival_at_f) / (f * mu), f, mu, survival_at_f, 0.0};
  if (samples > 0) {
    const double h = dkw_bound(samples, 0.01);
    const double upper_s = std::min(survival_at_f + h, 1.0 - 1e-300);
    const double lower_s = std::max(survival_at_f - h, 1e-300);
    out.half_width = 0.5 * (-std::log(lower_s) + std::log(upper_s)) / (f * mu);
  }
  return out;
}

// 200 geometric points on [0.01, 10], preceded by t = 0.
inline std::vector<double> default_grid(std::size_t points = 200, double lo = 0.01, double hi = 10.0) {
  std::vector<double> grid{0.0};
  grid.reserve(points + 1);
  for (std::size_t i = 0; i < points; ++i) {
    const double frac = points == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(points - 1);
    grid.push_back(lo * std::pow(hi / lo, frac));
  }
  return grid;
}

// Sup over t > threshold of |S(t) - amplitude e^{-t}| for the right-continuous
// step function S(t) = P(tau * scale > t) of an integer-valued tau.  The
// survival at integer raw time r is survival(r), for r = 0..survival.size()-1;
// beyond the last value the comparison stops.
inline double sup_distance_to_exponential(const std::vector<double>& survival, double scale, double amplitude = 1.0,
                                          double threshold = -1.0) {
  require(scale > 0.0, ErrorCode::InvalidArgument, "rescaling factor must be positive");
  double sup = 0.0;
  for (std::size_t r = 0; r < survival.size(); ++r) {
    // On [r scale, (r+1) scale) the curve equals survival[r].
    const double left = static_cast<double>(r) * scale;
    const double right = static_cast<double>(r + 1) * scale;
    if (right <= threshold) continue;
    const double from = std::max(left, threshold);
    const double s = survival[r];
    sup = std::max(sup, std::abs(s - amplitude * std::exp(-from)));
    if (r + 1 < survival.size()) sup = std::max(sup, std::abs(s - amplitude * std::exp(-right)));
  }
  return sup;
}

}  // namespace bowen

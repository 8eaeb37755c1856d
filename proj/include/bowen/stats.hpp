#pragma once

// Distribution-free confidence bounds and goodness-of-fit helpers.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "bowen/error.hpp"

namespace bowen {

// Dvoretzky-Kiefer-Wolfowitz (Massart constant): with probability at least
// 1 - alpha the empirical CDF of m samples is uniformly within this distance.
inline double dkw_bound(std::uint64_t m, double alpha) {
  require(m >= 1, ErrorCode::InvalidArgument, "DKW bound needs at least one sample");
  require(alpha > 0.0 && alpha < 1.0, ErrorCode::InvalidArgument, "DKW level must lie in (0,1)");
  return std::sqrt(std::log(2.0 / alpha) / (2.0 * static_cast<double>(m)));
}

// Two-sample DKW-style bound: sum of the one-sample bounds at alpha/2 each.
inline double dkw_two_sample_bound(std::uint64_t m1, std::uint64_t m2, double alpha) {
  return dkw_bound(m1, alpha / 2.0) + dkw_bound(m2, alpha / 2.0);
}

struct ChiSquareResult {
  double statistic = 0.0;
  std::size_t cells = 0;
  double p_value = 1.0;
};

// Pearson chi-square of observed counts against expected counts, restricted
// to cells with expected count at least min_expected; remaining cells are
// pooled into one cell when the pool itself reaches min_expected.
inline ChiSquareResult chi_square(const std::vector<double>& observed, const std::vector<double>& expected,
                                  double min_expected = 50.0) {
  require(observed.size() == expected.size(), ErrorCode::InvalidArgument, "chi-square needs matching cell vectors");
  ChiSquareResult out;
  double pool_obs = 0.0;
  double pool_exp = 0.0;
  auto add = [&](double o, double e) {
    out.statistic += (o - e) * (o - e) / e;
    ++out.cells;
  };
  for (std::size_t i = 0; i < observed.size(); ++i) {
    if (expected[i] >= min_expected) {
      add(observed[i], expected[i]);
    } else {
      pool_obs += observed[i];
      pool_exp += expected[i];
    }
  }
  if (pool_exp >= min_expected) add(pool_obs, pool_exp);
  if (out.cells >= 2) {
    boost::math::chi_squared dist(static_cast<double>(out.cells - 1));
    out.p_value = boost::math::cdf(boost::math::complement(dist, out.statistic));
  }
  return out;
}

// Sup distance between the empirical CDFs of two samples (sorted inputs).
template <typename T>
double two_sample_ks(const std::vector<T>& a, const std::vector<T>& b) {
  require(!a.empty() && !b.empty(), ErrorCode::InvalidArgument, "two-sample KS needs non-empty samples");
  std::size_t i = 0, j = 0;
  double sup = 0.0;
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  while (i < a.size() && j < b.size()) {
    const T v = a[i] < b[j] ? a[i] : b[j];
    while (i < a.size() && !(v < a[i])) ++i;
    while (j < b.size() && !(v < b[j])) ++j;
    sup = std::max(sup, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return sup;
}

}  // namespace bowen

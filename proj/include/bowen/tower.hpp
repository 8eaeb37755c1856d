#pragma once

// A Young tower with polynomial return-time tail.
//
// Columns i = 1..I_max have height R_i = i and base mass nu_i proportional to
// i^-(lambda_tail + 1).  The induced map on the base is the full shift on
// column indices with product measure nu, so a point is (column, level,
// future columns) and the invariant lift of nu picks column i with
// probability R_i nu_i / E[R] and a uniform level.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "bowen/error.hpp"
#include "bowen/hitting.hpp"
#include "bowen/measure.hpp"
#include "bowen/parallel.hpp"
#include "bowen/rng.hpp"
#include "bowen/stats.hpp"
#include "bowen/survival.hpp"

namespace bowen {

using Column = std::uint32_t;

struct TowerSpec {
  double lambda_tail = 9.0;
  std::size_t i_max = 10'000;
  double gamma = 0.5;
};

class TowerModel {
 public:
  explicit TowerModel(TowerSpec spec) : spec_(spec) {
    require(spec.lambda_tail > 1.0, ErrorCode::InvalidArgument, "tail exponent must exceed 1");
    require(spec.i_max >= 1 && spec.i_max <= 10'000'000, ErrorCode::InvalidArgument, "column cap must lie in 1..1e7");
    require(spec.gamma > 0.0 && spec.gamma < 1.0, ErrorCode::InvalidArgument, "gamma must lie in (0,1)");
    const std::size_t n = spec.i_max;
    base_mass_.resize(n);
    // Sum smallest terms first for accuracy.
    double z = 0.0;
    for (std::size_t i = n; i >= 1; --i) z += std::pow(static_cast<double>(i), -(spec.lambda_tail + 1.0));
    for (std::size_t i = 1; i <= n; ++i) base_mass_[i - 1] = std::pow(static_cast<double>(i), -(spec.lambda_tail + 1.0)) / z;
    normaliser_ = z;
    mean_return_ = 0.0;
    for (std::size_t i = n; i >= 1; --i) mean_return_ += static_cast<double>(i) * base_mass_[i - 1];
    base_cdf_.resize(n);
    column_cdf_.resize(n);
    double acc = 0.0;
    double acc_col = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
      acc += base_mass_[i - 1];
      acc_col += static_cast<double>(i) * base_mass_[i - 1] / mean_return_;
      base_cdf_[i - 1] = acc;
      column_cdf_[i - 1] = acc_col;
    }
    base_cdf_.back() = 1.0 + 1e-300;
    column_cdf_.back() = 1.0 + 1e-300;
  }

  const TowerSpec& spec() const noexcept { return spec_; }
  std::size_t columns() const noexcept { return spec_.i_max; }
  static std::uint64_t height(Column i) noexcept { return i; }

  // nu(Omega_{0,i}), normalised over the truncated columns.
  double base_mass(Column i) const { return base_mass_.at(i - 1); }
  double mean_return() const noexcept { return mean_return_; }
  // mu(Omega_{j,i}) = nu_i / E[R] for every level j < R_i.
  double cell_mass(Column i) const { return base_mass(i) / mean_return_; }

  Column draw_base(double u) const noexcept { return draw(base_cdf_, u); }
  Column draw_column(double u) const noexcept { return draw(column_cdf_, u); }

  // nu(R > j).
  double tail(std::uint64_t j) const {
    double s = 0.0;
    for (std::size_t i = spec_.i_max; i > j; --i) s += base_mass_[i - 1];
    return s;
  }

  // Mass beyond I_max of the untruncated law, relative to the kept mass.
  double truncation_mass() const {
    const double l = spec_.lambda_tail;
    // Integral bound for sum_{i > I} i^-(l+1).
    return std::pow(static_cast<double>(spec_.i_max), -l) / l / normaliser_;
  }

  // omega(m) = sqrt(sum_{R_i > m} R_i nu_i).
  double omega(std::uint64_t m) const {
    double s = 0.0;
    for (std::size_t i = spec_.i_max; i > m; --i) s += static_cast<double>(i) * base_mass_[i - 1];
    return std::sqrt(s);
  }

 private:
  static Column draw(const std::vector<double>& cdf, double u) noexcept {
    if (u < cdf[0]) return 1;
    return static_cast<Column>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin()) + 1;
  }

  TowerSpec spec_;
  std::vector<double> base_mass_;
  std::vector<double> base_cdf_;
  std::vector<double> column_cdf_;
  double normaliser_ = 1.0;
  double mean_return_ = 1.0;
};

// (column, level, future columns).  Future columns are drawn lazily from the
// point's stream and never change once drawn.
class TowerPoint {
 public:
  TowerPoint(Column column, std::uint64_t level, std::vector<Column> future = {}, std::optional<StreamKey> source = std::nullopt)
      : column_(column), level_(level), future_(std::move(future)) {
    require(column >= 1, ErrorCode::InvalidArgument, "columns are numbered from 1");
    require(level < TowerModel::height(column), ErrorCode::InvalidArgument, "level must be below the column height");
    if (source) stream_ = CounterStream(*source);
  }

  Column column() const noexcept { return column_; }
  std::uint64_t level() const noexcept { return level_; }

  // Column of the (k+1)-th return to the base.  Without a stream, an
  // exhausted future repeats column 1.
  Column future(const TowerModel& model, std::size_t k) const {
    while (future_.size() - head_ <= k) {
      future_.push_back(stream_ ? model.draw_base(stream_->next_unit()) : Column{1});
    }
    return future_[head_ + k];
  }

  void advance(const TowerModel& model) {
    if (level_ + 1 < TowerModel::height(column_)) {
      ++level_;
      return;
    }
    column_ = future(model, 0);
    level_ = 0;
    ++head_;
    if (head_ >= 4096 && head_ * 2 >= future_.size()) {
      future_.erase(future_.begin(), future_.begin() + static_cast<std::ptrdiff_t>(head_));
      head_ = 0;
    }
  }

 private:
  Column column_;
  std::uint64_t level_;
  mutable std::vector<Column> future_;
  mutable std::optional<CounterStream> stream_;
  std::size_t head_ = 0;
};

inline TowerPoint tower_step(const TowerModel& model, TowerPoint pt) {
  pt.advance(model);
  return pt;
}

// A point of the invariant (SRB) lift of nu.
inline TowerPoint sample_srb(const TowerModel& model, StreamKey key) {
  CounterStream stream(key);
  const Column c = model.draw_column(stream.next_unit());
  const std::uint64_t level = stream.next_below(TowerModel::height(c));
  // Future columns continue on a derived stream.
  return TowerPoint(c, level, {}, StreamKey{key.seed, mix64(key.id ^ 0x5eed5eed5eed5eedULL)});
}

inline constexpr std::size_t kMaxSeparation = 64;

// 0 in different partition elements, else 1 + agreeing future columns.
inline std::size_t separation(const TowerModel& model, const TowerPoint& x, const TowerPoint& y) {
  if (x.column() != y.column() || x.level() != y.level()) return 0;
  std::size_t s = 1;
  while (s < kMaxSeparation && x.future(model, s - 1) == y.future(model, s - 1)) ++s;
  return s;
}

inline double tower_distance(const TowerModel& model, const TowerPoint& x, const TowerPoint& y) {
  return std::pow(model.spec().gamma, static_cast<double>(separation(model, x, y)));
}

inline bool tower_bowen_contains(const TowerModel& model, const TowerPoint& center, double epsilon, int n, const TowerPoint& y) {
  TowerPoint a = center;
  TowerPoint b = y;
  for (int k = 0; k < n; ++k) {
    if (k > 0) {
      a.advance(model);
      b.advance(model);
    }
    if (!(tower_distance(model, a, b) < epsilon)) return false;
  }
  return true;
}

// A dynamic ball in the separation metric: the points at `level` whose
// current and next columns follow `columns`.  An empty column list is X.
struct TowerBall {
  std::uint64_t level = 0;
  std::vector<Column> columns;

  bool whole_space() const noexcept { return columns.empty(); }
};

inline TowerBall resolve_tower_ball(const TowerModel& model, const TowerPoint& center, double epsilon, int n) {
  require(epsilon > 0.0 && n >= 1, ErrorCode::InvalidArgument, "tower ball needs epsilon > 0 and n >= 1");
  if (epsilon > 1.0) return {};
  // Smallest separation s with gamma^s < epsilon.
  std::size_t needed = 0;
  while (!(std::pow(model.spec().gamma, static_cast<double>(needed)) < epsilon)) {
    ++needed;
    require(needed <= kMaxSeparation, ErrorCode::UnsupportedEpsilon, "epsilon below the separation resolution");
  }
  // Separation drops by one at every return to the base during the n steps.
  std::size_t returns = 0;
  TowerPoint walker = center;
  for (int k = 1; k < n; ++k) {
    walker.advance(model);
    if (walker.level() == 0) ++returns;
  }
  TowerBall ball;
  ball.level = center.level();
  ball.columns.push_back(center.column());
  for (std::size_t k = 0; k + 1 < returns + needed; ++k) ball.columns.push_back(center.future(model, k));
  return ball;
}

inline double tower_ball_measure(const TowerModel& model, const TowerBall& ball) {
  if (ball.whole_space()) return 1.0;
  double m = model.cell_mass(ball.columns.front());
  for (std::size_t k = 1; k < ball.columns.size(); ++k) m *= model.base_mass(ball.columns[k]);
  return m;
}

inline bool tower_ball_contains(const TowerModel& model, const TowerBall& ball, const TowerPoint& y) {
  if (ball.whole_space()) return true;
  if (y.column() != ball.columns.front() || y.level() != ball.level) return false;
  for (std::size_t k = 1; k < ball.columns.size(); ++k) {
    if (y.future(model, k - 1) != ball.columns[k]) return false;
  }
  return true;
}

inline MeasureValue tower_ball_measure_mc(const TowerModel& model, const TowerBall& ball, std::uint64_t samples, std::uint64_t seed,
                                          std::size_t workers = 1) {
  require(samples >= 1, ErrorCode::InvalidArgument, "at least one sample is required");
  constexpr std::size_t kChunks = 64;
  std::vector<std::uint64_t> hits(kChunks, 0);
  parallel_for(kChunks, workers, [&](std::size_t c) {
    for (std::uint64_t i = samples * c / kChunks; i < samples * (c + 1) / kChunks; ++i) {
      hits[c] += tower_ball_contains(model, ball, sample_srb(model, make_key(seed, StreamPurpose::Auxiliary, i))) ? 1 : 0;
    }
  });
  std::uint64_t total = 0;
  for (auto h : hits) total += h;
  return MeasureValue{static_cast<double>(total) / static_cast<double>(samples), MeasureMode::MonteCarlo, samples, dkw_bound(samples, 0.01)};
}

namespace detail {

// Prefix function of a column pattern.
inline std::vector<std::size_t> prefix_function(const std::vector<Column>& p) {
  std::vector<std::size_t> pi(p.size(), 0);
  for (std::size_t i = 1; i < p.size(); ++i) {
    std::size_t k = pi[i - 1];
    while (k > 0 && p[i] != p[k]) k = pi[k - 1];
    if (p[i] == p[k]) ++k;
    pi[i] = k;
  }
  return pi;
}

}  // namespace detail

// Entry time of an SRB-distributed orbit into a tower ball, column visit by
// column visit: the orbit is in the ball at time T_v + level exactly when the
// column sequence matches the pattern from visit v on.
inline std::optional<std::uint64_t> tower_entry_time(const TowerModel& model, const TowerBall& ball, const std::vector<std::size_t>& prefix,
                                                     StreamKey key, std::uint64_t horizon) {
  if (ball.whole_space()) return 1;
  CounterStream stream(key);
  const Column first = model.draw_column(stream.next_unit());
  const std::uint64_t level = stream.next_below(TowerModel::height(first));
  CounterStream future(StreamKey{key.seed, mix64(key.id ^ 0x5eed5eed5eed5eedULL)});
  const std::size_t k = ball.columns.size();
  std::vector<std::int64_t> starts(k);  // ring of visit start times
  std::int64_t start = -static_cast<std::int64_t>(level);
  std::size_t matched = 0;
  Column column = first;
  for (std::uint64_t visit = 0;; ++visit) {
    starts[visit % k] = start;
    while (matched > 0 && column != ball.columns[matched]) matched = prefix[matched - 1];
    if (column == ball.columns[matched]) ++matched;
    if (matched == k) {
      const std::int64_t hit = starts[(visit + 1 - k) % k] + static_cast<std::int64_t>(ball.level);
      if (hit >= 1 && static_cast<std::uint64_t>(hit) <= horizon) return static_cast<std::uint64_t>(hit);
      matched = prefix[matched - 1];
    }
    // The earliest match still possible starts at the oldest pending visit.
    const std::int64_t next_start = start + static_cast<std::int64_t>(TowerModel::height(column));
    const std::int64_t earliest = matched > 0 ? starts[(visit + 1 - matched) % k] : next_start;
    if (earliest + static_cast<std::int64_t>(ball.level) > static_cast<std::int64_t>(horizon)) return std::nullopt;
    start = next_start;
    column = model.draw_base(future.next_unit());
  }
}

inline constexpr double kYoungThreshold = 8.872983346207417;  // 5 + sqrt(15)

// Tall-tower exclusion: columns taller than m among the next N/m returns,
// plus the mass cut off by truncation.
struct NonPrincipal {
  std::uint64_t n = 0;
  std::uint64_t m = 0;
  double mass = 0.0;
};

inline NonPrincipal non_principal_mass(const TowerModel& model, double mu_ball, double eta = 0.45) {
  require(mu_ball > 0.0 && mu_ball <= 1.0, ErrorCode::InvalidArgument, "ball measure must lie in (0,1]");
  NonPrincipal out;
  out.n = static_cast<std::uint64_t>(std::ceil(std::pow(mu_ball, -eta)));
  const double l = model.spec().lambda_tail;
  const double exponent = l > 2.0 ? 0.5 * (1.0 / (l - 1.0) + 1.0) : 1.0;
  out.m = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::ceil(std::pow(static_cast<double>(out.n), exponent))));
  const double returns = static_cast<double>(out.n / out.m + 1);
  out.mass = -std::expm1(returns * std::log1p(-model.tail(out.m))) + model.truncation_mass();
  return out;
}

struct TowerExperiment {
  TowerBall ball;
  double mu = 0.0;
  std::uint64_t f = 0;
  LambdaEstimate lambda;
  EntrySample sample;
  SurvivalReport report;
  NonPrincipal non_principal;
  bool law_asserted = false;  // tail exponent above the Young threshold
};

inline EntrySample tower_entry_times(const TowerModel& model, const TowerBall& ball, std::uint64_t trials, std::uint64_t seed,
                                     SamplingOptions options = {}) {
  require(trials >= 1, ErrorCode::InvalidArgument, "at least one trial is required");
  const std::uint64_t horizon = options.horizon ? options.horizon : default_horizon(tower_ball_measure(model, ball));
  const auto prefix = detail::prefix_function(ball.columns);
  std::vector<std::optional<std::uint64_t>> results(trials);
  parallel_for(trials, options.workers, [&](std::size_t i) {
    results[i] = tower_entry_time(model, ball, prefix, make_key(seed, StreamPurpose::Trial, i), horizon);
  });
  return detail::collect(results, horizon, SampleMode::Entry, 1, "tower-ball");
}

inline TowerExperiment tower_hitting_experiment(const TowerModel& model, const TowerPoint& center, double epsilon, int n, std::uint64_t trials,
                                                std::uint64_t seed, SamplingOptions options = {},
                                                const std::vector<double>& grid = default_grid()) {
  TowerExperiment ex;
  ex.ball = resolve_tower_ball(model, center, epsilon, n);
  ex.mu = tower_ball_measure(model, ex.ball);
  ex.law_asserted = model.spec().lambda_tail > kYoungThreshold;
  ex.non_principal = non_principal_mass(model, ex.mu);
  ex.sample = tower_entry_times(model, ex.ball, trials, seed, options);
  if (ex.ball.whole_space()) {
    ex.f = 1;
    ex.lambda = LambdaEstimate{1.0, 1.0, 1.0, 0.0, 0.0};
  } else {
    ex.f = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::ceil(std::pow(ex.mu, -0.9))));
    ex.f = std::min(ex.f, ex.sample.horizon);
    ex.lambda = lambda_estimator(ex.sample.survival_at(ex.f), static_cast<double>(ex.f), ex.mu, trials);
  }
  ex.report = survival_and_ks(ex.sample, ex.mu, ex.lambda.lambda, grid);
  return ex;
}

// Occupancy of (column, level) cells by independent invariant orbits after
// `steps` steps, against mu(Omega_{j,i}) = nu_i / E[R].
inline ChiSquareResult level_occupancy(const TowerModel& model, std::uint64_t orbits, std::uint64_t steps, std::uint64_t seed,
                                       std::size_t workers = 1) {
  require(orbits >= 1, ErrorCode::InvalidArgument, "at least one orbit is required");
  // Cells in order (1,0), (2,0), (2,1), (3,0), ... up to the last one that
  // can carry expected count >= 50; everything else is one pooled cell.
  std::vector<std::pair<Column, std::uint64_t>> cells;
  for (Column i = 1; i <= model.columns(); ++i) {
    if (model.cell_mass(i) * static_cast<double>(orbits) < 50.0) break;
    for (std::uint64_t j = 0; j < TowerModel::height(i); ++j) cells.emplace_back(i, j);
  }
  const std::size_t pooled = cells.size();
  constexpr std::size_t kChunks = 64;
  std::vector<std::vector<double>> counts(kChunks, std::vector<double>(pooled + 1, 0.0));
  parallel_for(kChunks, workers, [&](std::size_t c) {
    for (std::uint64_t o = orbits * c / kChunks; o < orbits * (c + 1) / kChunks; ++o) {
      TowerPoint pt = sample_srb(model, make_key(seed, StreamPurpose::Orbit, o));
      for (std::uint64_t s = 0; s < steps; ++s) pt.advance(model);
      const auto it = std::find(cells.begin(), cells.end(), std::make_pair(pt.column(), pt.level()));
      counts[c][static_cast<std::size_t>(it - cells.begin())] += 1.0;
    }
  });
  std::vector<double> observed(pooled + 1, 0.0);
  for (const auto& chunk : counts) {
    for (std::size_t k = 0; k <= pooled; ++k) observed[k] += chunk[k];
  }
  std::vector<double> expected(pooled + 1, 0.0);
  double kept = 0.0;
  for (std::size_t k = 0; k < pooled; ++k) {
    expected[k] = model.cell_mass(cells[k].first) * static_cast<double>(orbits);
    kept += expected[k];
  }
  expected[pooled] = std::max(0.0, static_cast<double>(orbits) - kept);
  return chi_square(observed, expected);
}

struct TailCheck {
  double constant = 0.0;    // c in c j^-lambda
  double worst_ratio = 1.0; // max over j of max(r, 1/r), r = empirical / model
};

// Empirical nu(R > j) from base draws against c j^-lambda_tail.
inline TailCheck tail_law(const TowerModel& model, std::uint64_t samples, std::uint64_t seed, std::uint64_t j_first, std::uint64_t j_last) {
  require(samples >= 1 && j_first >= 1 && j_first <= j_last, ErrorCode::InvalidArgument, "invalid tail range");
  std::vector<std::uint64_t> above(j_last - j_first + 1, 0);
  CounterStream stream(make_key(seed, StreamPurpose::Auxiliary, 0));
  for (std::uint64_t s = 0; s < samples; ++s) {
    const Column c = model.draw_base(stream.next_unit());
    for (std::uint64_t j = j_first; j <= j_last && c > j; ++j) ++above[j - j_first];
  }
  double z = 0.0;
  for (std::size_t i = model.columns(); i >= 1; --i) z += std::pow(static_cast<double>(i), -(model.spec().lambda_tail + 1.0));
  TailCheck out;
  out.constant = 1.0 / (model.spec().lambda_tail * z);
  for (std::uint64_t j = j_first; j <= j_last; ++j) {
    const double empirical = static_cast<double>(above[j - j_first]) / static_cast<double>(samples);
    const double predicted = out.constant * std::pow(static_cast<double>(j), -model.spec().lambda_tail);
    const double r = empirical > 0.0 ? empirical / predicted : std::numeric_limits<double>::infinity();
    out.worst_ratio = std::max(out.worst_ratio, std::max(r, 1.0 / r));
  }
  return out;
}

}  // namespace bowen

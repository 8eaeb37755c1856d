#pragma once

// Concrete dynamical systems: the doubling map on the circle and Bernoulli /
// Markov one-sided shifts.  All three are represented through their symbolic
// coding.  A doubling-map point is its binary expansion, so T x = 2x mod 1 is
// the left shift of that expansion and deep orbits lose no precision.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bowen/error.hpp"
#include "bowen/rng.hpp"

namespace bowen {

using Symbol = std::uint8_t;

enum class SystemKind { DoublingMap, BernoulliShift, MarkovShift };

inline const char* to_string(SystemKind kind) {
  switch (kind) {
    case SystemKind::DoublingMap: return "doubling";
    case SystemKind::BernoulliShift: return "bernoulli";
    case SystemKind::MarkovShift: return "markov";
  }
  return "unknown";
}

inline constexpr double kProbabilityTolerance = 1e-12;
inline constexpr double kStationarityTolerance = 1e-10;
// Largest alphabet the symbolic machinery accepts (symbols are bytes).
inline constexpr std::size_t kMaxAlphabet = 64;

class System {
 public:
  static System doubling_map() {
    System sys;
    sys.kind_ = SystemKind::DoublingMap;
    sys.alphabet_ = 2;
    sys.initial_ = {0.5, 0.5};
    sys.transition_ = {0.5, 0.5, 0.5, 0.5};
    sys.build_tables();
    return sys;
  }

  static System bernoulli(std::vector<double> probabilities) {
    const std::size_t a = probabilities.size();
    require(a >= 2 && a <= kMaxAlphabet, ErrorCode::InvalidArgument,
            "bernoulli shift needs an alphabet of 2.." + std::to_string(kMaxAlphabet) + " symbols");
    double total = 0.0;
    for (double p : probabilities) {
      require(p >= 0.0 && p <= 1.0, ErrorCode::InvalidArgument, "symbol probability outside [0,1]");
      total += p;
    }
    require(std::abs(total - 1.0) <= kProbabilityTolerance, ErrorCode::InvalidArgument,
            "symbol probabilities must sum to 1");
    System sys;
    sys.kind_ = SystemKind::BernoulliShift;
    sys.alphabet_ = a;
    sys.initial_ = probabilities;
    sys.transition_.reserve(a * a);
    for (std::size_t i = 0; i < a; ++i) sys.transition_.insert(sys.transition_.end(), probabilities.begin(), probabilities.end());
    sys.build_tables();
    return sys;
  }

  // Row-stochastic matrix; the stationary vector is solved for and checked.
  static System markov(const std::vector<std::vector<double>>& matrix) {
    const std::size_t a = matrix.size();
    require(a >= 2 && a <= kMaxAlphabet, ErrorCode::InvalidArgument,
            "markov shift needs an alphabet of 2.." + std::to_string(kMaxAlphabet) + " symbols");
    System sys;
    sys.kind_ = SystemKind::MarkovShift;
    sys.alphabet_ = a;
    for (const auto& row : matrix) {
      require(row.size() == a, ErrorCode::InvalidArgument, "transition matrix must be square");
      double total = 0.0;
      for (double p : row) {
        require(p >= 0.0 && p <= 1.0, ErrorCode::InvalidArgument, "transition probability outside [0,1]");
        total += p;
      }
      require(std::abs(total - 1.0) <= kProbabilityTolerance, ErrorCode::InvalidArgument,
              "transition matrix rows must sum to 1");
      sys.transition_.insert(sys.transition_.end(), row.begin(), row.end());
    }
    sys.initial_ = stationary_vector(sys.transition_, a);
    for (double p : sys.initial_) {
      require(p > 0.0, ErrorCode::InvalidArgument, "stationary vector must be strictly positive");
    }
    for (std::size_t j = 0; j < a; ++j) {
      double acc = 0.0;
      for (std::size_t i = 0; i < a; ++i) acc += sys.initial_[i] * sys.transition_[i * a + j];
      require(std::abs(acc - sys.initial_[j]) <= kStationarityTolerance, ErrorCode::InvalidArgument,
              "stationary vector does not satisfy pi P = pi");
    }
    sys.build_tables();
    return sys;
  }

  SystemKind kind() const noexcept { return kind_; }
  std::size_t alphabet_size() const noexcept { return alphabet_; }
  bool is_shift() const noexcept { return kind_ != SystemKind::DoublingMap; }

  // Law of the zeroth symbol under the invariant measure.
  const std::vector<double>& initial() const noexcept { return initial_; }
  double initial(Symbol s) const noexcept { return initial_[s]; }
  double transition(Symbol from, Symbol to) const noexcept { return transition_[from * alphabet_ + to]; }
  // Row-major alphabet x alphabet matrix (rows are identical for Bernoulli).
  const std::vector<double>& transition_matrix() const noexcept { return transition_; }

  // Symbols are i.i.d. fair bits: the doubling map and Bernoulli(1/2, 1/2).
  bool fair_bits() const noexcept { return fair_bits_; }

  // Diameter of X in the system metric.
  double diameter() const noexcept { return kind_ == SystemKind::DoublingMap ? 0.5 : 1.0; }

  Symbol draw_initial(double u) const noexcept { return draw(initial_cdf_.data(), u); }
  Symbol draw_next(Symbol previous, double u) const noexcept {
    return draw(transition_cdf_.data() + previous * alphabet_, u);
  }

  std::string describe() const {
    std::string out = to_string(kind_);
    if (kind_ == SystemKind::BernoulliShift) {
      out += "(";
      for (std::size_t i = 0; i < alphabet_; ++i) out += (i ? "," : "") + format_prob(initial_[i]);
      out += ")";
    } else if (kind_ == SystemKind::MarkovShift) {
      out += "[";
      for (std::size_t i = 0; i < alphabet_; ++i) {
        out += i ? ";" : "";
        for (std::size_t j = 0; j < alphabet_; ++j) out += (j ? "," : "") + format_prob(transition(i, j));
      }
      out += "]";
    }
    return out;
  }

 private:
  System() = default;

  static std::string format_prob(double p) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", p);
    return buf;
  }

  static std::vector<double> stationary_vector(const std::vector<double>& p, std::size_t a) {
    // Solve pi (P - I) = 0 with the normalisation replacing one equation.
    Eigen::MatrixXd lhs(a, a);
    for (std::size_t i = 0; i < a; ++i)
      for (std::size_t j = 0; j < a; ++j) lhs(j, i) = p[i * a + j] - (i == j ? 1.0 : 0.0);
    lhs.row(a - 1).setOnes();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(a));
    rhs(static_cast<Eigen::Index>(a - 1)) = 1.0;
    const Eigen::VectorXd pi = lhs.fullPivLu().solve(rhs);
    std::vector<double> out(a);
    for (std::size_t i = 0; i < a; ++i) out[i] = pi(static_cast<Eigen::Index>(i));
    return out;
  }

  void build_tables() {
    auto cumulate = [this](const double* probs, double* cdf) {
      double acc = 0.0;
      for (std::size_t i = 0; i < alphabet_; ++i) {
        acc += probs[i];
        cdf[i] = acc;
      }
      cdf[alphabet_ - 1] = 1.0 + 1e-300;  // catch u rounding up to the top
    };
    initial_cdf_.assign(alphabet_, 0.0);
    transition_cdf_.assign(alphabet_ * alphabet_, 0.0);
    cumulate(initial_.data(), initial_cdf_.data());
    for (std::size_t i = 0; i < alphabet_; ++i) cumulate(transition_.data() + i * alphabet_, transition_cdf_.data() + i * alphabet_);
    fair_bits_ = kind_ == SystemKind::DoublingMap ||
                 (kind_ == SystemKind::BernoulliShift && alphabet_ == 2 && initial_[0] == 0.5 && initial_[1] == 0.5);
  }

  Symbol draw(const double* cdf, double u) const noexcept {
    std::size_t s = 0;
    while (s + 1 < alphabet_ && u >= cdf[s]) ++s;
    return static_cast<Symbol>(s);
  }

  SystemKind kind_ = SystemKind::DoublingMap;
  std::size_t alphabet_ = 2;
  std::vector<double> initial_;
  std::vector<double> transition_;
  std::vector<double> initial_cdf_;
  std::vector<double> transition_cdf_;
  bool fair_bits_ = false;
};

// Sequential generator of the symbol sequence y_0, y_1, ... of a point drawn
// from the invariant measure.  Fair-bit systems consume one 64-bit draw per
// 64 symbols; everything else consumes one uniform per symbol.
class SymbolGenerator {
 public:
  SymbolGenerator() = default;
  explicit SymbolGenerator(StreamKey key) : stream_(key) {}

  // Continue an existing sequence whose last emitted symbol was `previous`.
  SymbolGenerator(StreamKey key, std::uint64_t index, Symbol previous)
      : stream_(key), index_(index), previous_(previous) {}

  Symbol next(const System& sys) noexcept {
    Symbol s;
    if (sys.fair_bits()) {
      if (bits_left_ == 0) {
        bits_ = stream_.next_u64();
        bits_left_ = 64;
      }
      s = static_cast<Symbol>(bits_ >> 63);
      bits_ <<= 1;
      --bits_left_;
    } else {
      const double u = stream_.next_unit();
      s = index_ == 0 ? sys.draw_initial(u) : sys.draw_next(previous_, u);
    }
    previous_ = s;
    ++index_;
    return s;
  }

  // 64 fair bits at once, most significant first.  Only valid for fair-bit
  // systems when the generator sits on a 64-symbol boundary.
  std::uint64_t next_block() noexcept {
    index_ += 64;
    const std::uint64_t block = stream_.next_u64();
    previous_ = static_cast<Symbol>(block & 1U);
    return block;
  }

  bool at_block_boundary() const noexcept { return bits_left_ == 0; }
  std::uint64_t index() const noexcept { return index_; }

 private:
  CounterStream stream_{};
  std::uint64_t index_ = 0;
  Symbol previous_ = 0;
  std::uint64_t bits_ = 0;
  int bits_left_ = 0;
};

// A point of X, held as the symbol sequence of its coding starting at the
// current position.  Symbols are materialised on demand and never change once
// materialised.  Only a window is kept, so advancing is O(1) amortised.
class Point {
 public:
  Point() = default;

  // Binary expansion of x in [0,1); doubles have finite expansions, so the
  // tail is zero and exact.
  static Point from_real(double x) {
    require(x >= 0.0 && x < 1.0 && std::isfinite(x), ErrorCode::InvalidArgument, "doubling-map point must lie in [0,1)");
    Point p;
    while (x != 0.0) {
      x *= 2.0;
      const Symbol bit = x >= 1.0 ? 1 : 0;
      x -= bit;
      p.buffer_.push_back(bit);
    }
    return p;
  }

  // Explicit prefix, continued with symbol 0.
  static Point from_symbols(std::vector<Symbol> prefix) {
    Point p;
    p.buffer_ = std::move(prefix);
    return p;
  }

  // Explicit prefix, continued by the stream (Markov continuation is
  // conditioned on the last prefix symbol).
  static Point from_symbols(std::vector<Symbol> prefix, StreamKey continuation) {
    Point p;
    const Symbol last = prefix.empty() ? Symbol{0} : prefix.back();
    const std::uint64_t n = prefix.size();
    p.buffer_ = std::move(prefix);
    p.generator_ = SymbolGenerator(continuation, n, last);
    return p;
  }

  // A point distributed according to the invariant measure of sys.
  static Point sample(StreamKey key) {
    Point p;
    p.generator_ = SymbolGenerator(key);
    return p;
  }

  Symbol symbol(const System& sys, std::size_t k) const {
    materialize(sys, k + 1);
    return buffer_[head_ + k];
  }

  // Number of symbols from the current position that are already fixed.
  std::size_t materialized() const noexcept { return buffer_.size() - head_; }

  void advance(const System& sys) {
    materialize(sys, 1);
    ++head_;
    ++position_;
    if (head_ >= 4096 && head_ * 2 >= buffer_.size()) {
      buffer_.erase(buffer_.begin(), buffer_.begin() + static_cast<std::ptrdiff_t>(head_));
      head_ = 0;
    }
  }

  // 64 binary symbols starting at offset k, first symbol most significant.
  std::uint64_t bits64(const System& sys, std::size_t k) const {
    materialize(sys, k + 64);
    std::uint64_t reg = 0;
    for (std::size_t i = 0; i < 64; ++i) reg = (reg << 1) | buffer_[head_ + k + i];
    return reg;
  }

  std::uint64_t position() const noexcept { return position_; }

 private:
  void materialize(const System& sys, std::size_t count) const {
    while (buffer_.size() - head_ < count) {
      buffer_.push_back(generator_ ? generator_->next(sys) : Symbol{0});
    }
  }

  mutable std::vector<Symbol> buffer_;
  mutable std::optional<SymbolGenerator> generator_;
  std::size_t head_ = 0;
  std::uint64_t position_ = 0;
};

// Real value of a binary window: round-to-nearest of reg * 2^-64, kept in [0,1).
inline double unit_value(std::uint64_t reg) noexcept {
  const double v = std::ldexp(static_cast<double>(reg), -64);
  return v < 1.0 ? v : std::nextafter(1.0, 0.0);
}

inline double circle_distance(double a, double b) noexcept {
  const double d = std::abs(a - b);
  return std::min(d, 1.0 - d);
}

// Real coordinate of a doubling-map point.
inline double real_value(const System& sys, const Point& x, std::size_t offset = 0) {
  return unit_value(x.bits64(sys, offset));
}

// T(x).
inline Point step(const System& sys, Point x) {
  x.advance(sys);
  return x;
}

// Agreement depth compared by the shift metric; agreement beyond it counts
// as equality (distance 0).
inline constexpr std::size_t kMaxCompare = 64;

// Index of the first disagreeing symbol at or after offset, or kMaxCompare.
inline std::size_t agreement_length(const System& sys, const Point& x, const Point& y, std::size_t offset = 0) {
  for (std::size_t k = 0; k < kMaxCompare; ++k) {
    if (x.symbol(sys, offset + k) != y.symbol(sys, offset + k)) return k;
  }
  return kMaxCompare;
}

// d(T^offset x, T^offset y).
inline double distance(const System& sys, const Point& x, const Point& y, std::size_t offset = 0) {
  if (sys.kind() == SystemKind::DoublingMap) {
    return circle_distance(real_value(sys, x, offset), real_value(sys, y, offset));
  }
  const std::size_t k = agreement_length(sys, x, y, offset);
  return k == kMaxCompare ? 0.0 : std::ldexp(1.0, -static_cast<int>(k));
}

inline Point sample_invariant(const System&, StreamKey key) { return Point::sample(key); }

}  // namespace bowen

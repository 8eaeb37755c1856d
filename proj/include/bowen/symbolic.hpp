#pragma once

// Cylinder coding, dynamic (Bowen) balls and their approximation from the
// inside by unions of N-cylinders.

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstdint>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "bowen/error.hpp"
#include "bowen/systems.hpp"

namespace bowen {

// Deepest dyadic coding the doubling-map routines accept.
inline constexpr std::size_t kMaxDyadicDepth = 50;
// Largest word set materialised by inner_and_annulus.
inline constexpr std::size_t kMaxWordSetSize = std::size_t{1} << 22;

// A finite word over the system alphabet.  The empty word denotes X.
struct CylinderWord {
  std::vector<Symbol> symbols;

  CylinderWord() = default;
  explicit CylinderWord(std::vector<Symbol> s) : symbols(std::move(s)) {}
  CylinderWord(std::initializer_list<Symbol> s) : symbols(s) {}

  std::size_t size() const noexcept { return symbols.size(); }
  bool empty() const noexcept { return symbols.empty(); }
  Symbol operator[](std::size_t i) const noexcept { return symbols[i]; }

  friend auto operator<=>(const CylinderWord&, const CylinderWord&) = default;
  friend bool operator==(const CylinderWord&, const CylinderWord&) = default;
};

inline std::string to_string(const CylinderWord& w) {
  std::string out;
  out.reserve(w.size());
  for (Symbol s : w.symbols) out.push_back(static_cast<char>('0' + s));
  return out;
}

inline bool in_alphabet(const System& sys, const CylinderWord& w) {
  return std::all_of(w.symbols.begin(), w.symbols.end(), [&](Symbol s) { return s < sys.alphabet_size(); });
}

// Positive measure under sys (Markov words may use forbidden transitions).
inline bool admissible(const System& sys, const CylinderWord& w) {
  if (!in_alphabet(sys, w)) return false;
  if (w.empty()) return true;
  if (sys.initial(w[0]) <= 0.0) return false;
  for (std::size_t i = 1; i < w.size(); ++i) {
    if (sys.transition(w[i - 1], w[i]) <= 0.0) return false;
  }
  return true;
}

// The dynamic ball B_{eps,n}(center).
struct BowenSpec {
  Point center;
  double epsilon = 0.0;
  int n = 1;
};

inline void validate(const BowenSpec& spec) {
  require(spec.epsilon > 0.0 && std::isfinite(spec.epsilon), ErrorCode::InvalidArgument, "epsilon must be positive");
  require(spec.n >= 1, ErrorCode::InvalidArgument, "n must be at least 1");
}

// Open arc {y : circle_distance(y, center) < radius}.
struct Arc {
  double center = 0.0;
  double radius = 0.0;
};

struct BallResolution {
  std::variant<Arc, CylinderWord> shape;
  bool exact = true;

  bool is_arc() const noexcept { return std::holds_alternative<Arc>(shape); }
  const Arc& arc() const { return std::get<Arc>(shape); }
  const CylinderWord& word() const { return std::get<CylinderWord>(shape); }
};

// Itinerary of x through the generating partition for k steps.  For the
// doubling map this is {[0,1/2), [1/2,1)}, coded right-continuously.
inline CylinderWord coding(const System& sys, const Point& x, std::size_t k) {
  require(k >= 1, ErrorCode::InvalidArgument, "coding length must be at least 1");
  if (sys.kind() == SystemKind::DoublingMap) {
    require(k <= kMaxDyadicDepth, ErrorCode::DepthExceeded,
            "doubling-map coding is capped at depth " + std::to_string(kMaxDyadicDepth));
  }
  CylinderWord w;
  w.symbols.reserve(k);
  for (std::size_t i = 0; i < k; ++i) w.symbols.push_back(x.symbol(sys, i));
  return w;
}

// Diameter of the k-th join.
inline double join_diameter(const System&, std::size_t k) {
  require(k >= 1, ErrorCode::InvalidArgument, "join length must be at least 1");
  return std::ldexp(1.0, -static_cast<int>(std::min<std::size_t>(k, 1074)));
}

inline bool bowen_contains(const System& sys, const BowenSpec& spec, const Point& y) {
  for (int k = 0; k < spec.n; ++k) {
    if (!(distance(sys, spec.center, y, static_cast<std::size_t>(k)) < spec.epsilon)) return false;
  }
  return true;
}

// Smallest m with 2^-m < eps: shift-metric distance below eps iff the first
// m symbols agree.  Exact powers of two sit on the boundary of the strict
// inequality and need one more symbol.
inline std::size_t agreement_for_radius(double eps) {
  std::size_t m = 0;
  while (!(std::ldexp(1.0, -static_cast<int>(m)) < eps)) {
    ++m;
    require(m <= kMaxCompare, ErrorCode::UnsupportedEpsilon, "epsilon below the shift-metric resolution");
  }
  return m;
}

inline BallResolution resolve_ball(const System& sys, const BowenSpec& spec) {
  validate(spec);
  if (sys.kind() == SystemKind::DoublingMap) {
    require(spec.epsilon < 0.25, ErrorCode::UnsupportedEpsilon, "doubling-map balls are resolved for epsilon < 1/4 only");
    return BallResolution{Arc{real_value(sys, spec.center), std::ldexp(spec.epsilon, -(spec.n - 1))}, true};
  }
  const std::size_t m = agreement_for_radius(spec.epsilon);
  const std::size_t length = m == 0 ? 0 : static_cast<std::size_t>(spec.n) - 1 + m;
  CylinderWord w;
  w.symbols.reserve(length);
  for (std::size_t i = 0; i < length; ++i) w.symbols.push_back(spec.center.symbol(sys, i));
  return BallResolution{std::move(w), true};
}

enum class WordRole { Inner, Annulus };

inline const char* to_string(WordRole role) { return role == WordRole::Inner ? "inner" : "annulus"; }

// Distinct words of a common length, kept sorted.
class WordSet {
 public:
  WordSet(std::size_t length, WordRole role) : length_(length), role_(role) {}
  WordSet(std::size_t length, WordRole role, std::vector<CylinderWord> words) : length_(length), role_(role), words_(std::move(words)) {
    for (const auto& w : words_) {
      require(w.size() == length_, ErrorCode::InvalidArgument, "word length differs from the set length");
    }
    std::sort(words_.begin(), words_.end());
    require(std::adjacent_find(words_.begin(), words_.end()) == words_.end(), ErrorCode::InvalidArgument,
            "word set contains duplicates");
  }

  std::size_t length() const noexcept { return length_; }
  WordRole role() const noexcept { return role_; }
  const std::vector<CylinderWord>& words() const noexcept { return words_; }
  std::size_t size() const noexcept { return words_.size(); }
  bool empty() const noexcept { return words_.empty(); }

  bool contains(const CylinderWord& w) const { return std::binary_search(words_.begin(), words_.end(), w); }

  // Whether the N-cylinder of y belongs to the set.
  bool contains_point(const System& sys, const Point& y) const {
    if (length_ == 0) return !words_.empty();
    return contains(coding_unchecked(sys, y));
  }

 private:
  CylinderWord coding_unchecked(const System& sys, const Point& y) const {
    CylinderWord w;
    w.symbols.reserve(length_);
    for (std::size_t i = 0; i < length_; ++i) w.symbols.push_back(y.symbol(sys, i));
    return w;
  }

  std::size_t length_;
  WordRole role_;
  std::vector<CylinderWord> words_;
};

struct InnerAnnulus {
  WordSet inner;
  WordSet annulus;
};

namespace detail {

// floor(p + q) for doubles, exact (TwoSum error-free transformation).
inline std::int64_t floor_of_sum(double p, double q) {
  const double s = p + q;
  const double bp = s - p;
  const double e = (p - (s - bp)) + (q - bp);
  const double fs = std::floor(s);
  if (fs != s) return static_cast<std::int64_t>(fs);
  return static_cast<std::int64_t>(e < 0.0 ? fs - 1.0 : fs);
}

inline CylinderWord dyadic_word(std::uint64_t index, std::size_t depth) {
  CylinderWord w;
  w.symbols.resize(depth);
  for (std::size_t i = 0; i < depth; ++i) w.symbols[depth - 1 - i] = static_cast<Symbol>((index >> i) & 1U);
  return w;
}

inline std::uint64_t wrap(std::int64_t j, std::uint64_t cells) {
  const auto c = static_cast<std::int64_t>(cells);
  return static_cast<std::uint64_t>(((j % c) + c) % c);
}

}  // namespace detail

// Inner approximation by N-cylinders contained in the ball, and the annulus
// of N-cylinders meeting its topological boundary.
inline InnerAnnulus inner_and_annulus(const System& sys, const BowenSpec& spec, std::size_t depth) {
  const BallResolution ball = resolve_ball(sys, spec);
  InnerAnnulus out{WordSet(depth, WordRole::Inner), WordSet(depth, WordRole::Annulus)};
  std::vector<CylinderWord> inner;
  std::vector<CylinderWord> annulus;

  if (ball.is_arc()) {
    require(depth >= 1 && depth <= kMaxDyadicDepth, ErrorCode::DepthExceeded,
            "doubling-map cylinder depth must lie in 1.." + std::to_string(kMaxDyadicDepth));
    const std::uint64_t cells = std::uint64_t{1} << depth;
    const double c = std::ldexp(ball.arc().center, static_cast<int>(depth));
    const double r = std::ldexp(ball.arc().radius, static_cast<int>(depth));
    // Cell j = [j, j+1) in units of 2^-N; arc = (c - r, c + r).
    const std::int64_t low_cell = detail::floor_of_sum(c, -r);
    const std::int64_t high_cell = detail::floor_of_sum(c, r);
    const std::int64_t first_inner = low_cell + 1;
    const std::int64_t last_inner = high_cell - 1;
    if (last_inner >= first_inner) {
      const auto count = static_cast<std::uint64_t>(last_inner - first_inner + 1);
      require(count <= kMaxWordSetSize, ErrorCode::CapacityExceeded,
              "inner word set would hold " + std::to_string(count) + " words");
      inner.reserve(count);
      for (std::int64_t j = first_inner; j <= last_inner; ++j) inner.push_back(detail::dyadic_word(detail::wrap(j, cells), depth));
    }
    annulus.push_back(detail::dyadic_word(detail::wrap(low_cell, cells), depth));
    if (detail::wrap(high_cell, cells) != detail::wrap(low_cell, cells)) {
      annulus.push_back(detail::dyadic_word(detail::wrap(high_cell, cells), depth));
    }
  } else {
    const CylinderWord& w = ball.word();
    require(depth >= w.size(), ErrorCode::InvalidArgument,
            "cylinder depth " + std::to_string(depth) + " is below the ball resolution length " + std::to_string(w.size()));
    const std::size_t free = depth - w.size();
    const std::size_t a = sys.alphabet_size();
    double total = 1.0;
    for (std::size_t i = 0; i < free; ++i) total *= static_cast<double>(a);
    require(total <= static_cast<double>(kMaxWordSetSize), ErrorCode::CapacityExceeded,
            "inner word set would hold " + std::to_string(total) + " words");
    std::vector<Symbol> suffix(free, 0);
    while (true) {
      CylinderWord candidate = w;
      candidate.symbols.insert(candidate.symbols.end(), suffix.begin(), suffix.end());
      if (admissible(sys, candidate)) inner.push_back(std::move(candidate));
      std::size_t pos = free;
      while (pos > 0 && ++suffix[pos - 1] == a) suffix[--pos] = 0;
      if (pos == 0) break;
    }
  }
  out.inner = WordSet(depth, WordRole::Inner, std::move(inner));
  out.annulus = WordSet(depth, WordRole::Annulus, std::move(annulus));
  return out;
}

// Text form: header `N=<len> role=<inner|annulus>`, then one word per line.
inline std::string serialize(const WordSet& set) {
  std::string out = "N=" + std::to_string(set.length()) + " role=" + to_string(set.role()) + "\n";
  for (const auto& w : set.words()) {
    for (Symbol s : w.symbols) {
      require(s < 10, ErrorCode::InvalidArgument, "text word sets hold decimal symbols only");
    }
    out += to_string(w);
    out += '\n';
  }
  return out;
}

inline WordSet parse_word_set(const std::string& text) {
  std::istringstream in(text);
  std::string header;
  require(static_cast<bool>(std::getline(in, header)), ErrorCode::InvalidArgument, "word set text is empty");
  std::size_t length = 0;
  char role_buf[16] = {0};
  unsigned long long parsed_length = 0;
  require(std::sscanf(header.c_str(), "N=%llu role=%15s", &parsed_length, role_buf) == 2, ErrorCode::InvalidArgument,
          "malformed word set header: " + header);
  length = static_cast<std::size_t>(parsed_length);
  const std::string role_name(role_buf);
  require(role_name == "inner" || role_name == "annulus", ErrorCode::InvalidArgument, "unknown word set role: " + role_name);
  std::vector<CylinderWord> words;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    CylinderWord w;
    for (char ch : line) {
      require(ch >= '0' && ch <= '9', ErrorCode::InvalidArgument, "non-digit symbol in word: " + line);
      w.symbols.push_back(static_cast<Symbol>(ch - '0'));
    }
    words.push_back(std::move(w));
  }
  return WordSet(length, role_name == "inner" ? WordRole::Inner : WordRole::Annulus, std::move(words));
}

}  // namespace bowen

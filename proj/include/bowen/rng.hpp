#pragma once

// Counter-based random streams.
//
// Every random quantity in the library is a pure function of
// (global seed, stream id, counter).  A stream never holds hidden state
// beyond its counter, so a trial or an orbit can be replayed from its key
// alone and results do not depend on how work is split across threads.

#include <cstdint>

namespace bowen {

struct StreamKey {
  std::uint64_t seed = 0;
  std::uint64_t id = 0;

  friend bool operator==(const StreamKey&, const StreamKey&) = default;
};

// SplitMix64 finalizer (Stafford variant 13).
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ULL;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return z;
}

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

// Collapses a key to a 64-bit stream base; distinct ids give unrelated bases.
constexpr std::uint64_t stream_base(StreamKey key) noexcept {
  return mix64(mix64(key.seed + kGolden) ^ mix64(key.id * 0xd1b54a32d192ed03ULL + 0x8cb92ba72f3d8dd7ULL));
}

// The counter-th 64-bit draw of a stream.
constexpr std::uint64_t draw_u64(std::uint64_t base, std::uint64_t counter) noexcept {
  return mix64(base + (counter + 1) * kGolden);
}

// Uniform double in [0,1) with 53 random bits.
constexpr double to_unit(std::uint64_t bits) noexcept {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

// Sequential view of a stream.  Copying a CounterStream forks it at the
// current counter; both copies then produce identical draws.
class CounterStream {
 public:
  CounterStream() = default;
  explicit CounterStream(StreamKey key) : key_(key), base_(stream_base(key)) {}

  std::uint64_t next_u64() noexcept { return draw_u64(base_, counter_++); }
  double next_unit() noexcept { return to_unit(next_u64()); }

  // Uniform integer in [0, n) by multiply-shift; bias is below 2^-64 * n.
  std::uint64_t next_below(std::uint64_t n) noexcept {
    __extension__ using Wide = unsigned __int128;
    const Wide product = static_cast<Wide>(next_u64()) * n;
    return static_cast<std::uint64_t>(product >> 64);
  }

  StreamKey key() const noexcept { return key_; }
  std::uint64_t counter() const noexcept { return counter_; }

 private:
  StreamKey key_{};
  std::uint64_t base_ = stream_base(StreamKey{});
  std::uint64_t counter_ = 0;
};

// Streams used by one experiment are keyed (seed, purpose-tag + index) so
// that trial streams, orbit streams and centre-point streams never collide.
enum class StreamPurpose : std::uint64_t {
  Trial = 1,
  Orbit = 2,
  Center = 3,
  Auxiliary = 4,
};

constexpr StreamKey make_key(std::uint64_t seed, StreamPurpose purpose, std::uint64_t index) noexcept {
  return StreamKey{seed, (static_cast<std::uint64_t>(purpose) << 56) ^ index};
}

}  // namespace bowen

#pragma once

// Aho-Corasick pattern automaton over a set of words of common length.
// States are the distinct prefixes of the words; the transition table is
// completed with failure links so every state has an edge for every symbol.

#include <cstdint>
#include <queue>
#include <string>
#include <vector>

#include "bowen/error.hpp"
#include "bowen/symbolic.hpp"

namespace bowen {

inline constexpr std::size_t kMaxAutomatonStates = 100'000;

class PatternAutomaton {
 public:
  using State = std::uint32_t;
  static constexpr State kRoot = 0;

  PatternAutomaton(std::size_t alphabet, const WordSet& words) : alphabet_(alphabet), length_(words.length()) {
    require(alphabet >= 1 && alphabet <= kMaxAlphabet, ErrorCode::InvalidArgument, "automaton alphabet out of range");
    require(words.length() >= 1, ErrorCode::InvalidArgument, "automaton words must have length at least 1");
    require(!words.empty(), ErrorCode::InvalidArgument, "automaton needs at least one word");
    std::size_t bound = 1;
    for (const auto& w : words.words()) bound += w.size();
    add_state(0);
    for (const auto& w : words.words()) {
      State s = kRoot;
      for (Symbol c : w.symbols) {
        require(c < alphabet_, ErrorCode::InvalidArgument, "word symbol outside the alphabet");
        if (next_[s * alphabet_ + c] == kNone) {
          require(depth_.size() < kMaxAutomatonStates, ErrorCode::CapacityExceeded,
                  "pattern automaton exceeds " + std::to_string(kMaxAutomatonStates) + " states (needs up to " +
                      std::to_string(bound) + ")");
          const State fresh = add_state(depth_[s] + 1);
          next_[s * alphabet_ + c] = fresh;
        }
        s = next_[s * alphabet_ + c];
      }
      accepting_[s] = 1;
    }
    // Breadth-first completion of the goto function with failure links.
    std::vector<State> fail(depth_.size(), kRoot);
    std::queue<State> frontier;
    for (std::size_t c = 0; c < alphabet_; ++c) {
      State& edge = next_[kRoot * alphabet_ + c];
      if (edge == kNone) {
        edge = kRoot;
      } else {
        fail[edge] = kRoot;
        frontier.push(edge);
      }
    }
    while (!frontier.empty()) {
      const State s = frontier.front();
      frontier.pop();
      // Words share one length, so a proper suffix is never a full match.
      for (std::size_t c = 0; c < alphabet_; ++c) {
        State& edge = next_[s * alphabet_ + c];
        const State via_fail = next_[fail[s] * alphabet_ + c];
        if (edge == kNone) {
          edge = via_fail;
        } else {
          fail[edge] = via_fail;
          frontier.push(edge);
        }
      }
    }
  }

  std::size_t alphabet() const noexcept { return alphabet_; }
  std::size_t word_length() const noexcept { return length_; }
  std::size_t state_count() const noexcept { return depth_.size(); }

  State next(State s, Symbol c) const noexcept { return next_[s * alphabet_ + c]; }
  bool accepting(State s) const noexcept { return accepting_[s] != 0; }
  std::size_t depth(State s) const noexcept { return depth_[s]; }

  State run(const CylinderWord& w, State from = kRoot) const {
    State s = from;
    for (Symbol c : w.symbols) s = next(s, c);
    return s;
  }

 private:
  static constexpr State kNone = ~State{0};

  State add_state(std::size_t depth) {
    depth_.push_back(depth);
    accepting_.push_back(0);
    next_.resize(next_.size() + alphabet_, kNone);
    return static_cast<State>(depth_.size() - 1);
  }

  std::size_t alphabet_;
  std::size_t length_;
  std::vector<State> next_;
  std::vector<std::size_t> depth_;
  std::vector<std::uint8_t> accepting_;
};

}  // namespace bowen

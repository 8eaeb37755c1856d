#pragma once

#include <stdexcept>
#include <string>

namespace bowen {

enum class ErrorCode {
  InvalidArgument,
  DepthExceeded,
  UnsupportedEpsilon,
  CapacityExceeded,
  Undefined,
  BudgetExhausted,
  EmptyRange,
};

constexpr const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid-argument";
    case ErrorCode::DepthExceeded: return "depth-exceeded";
    case ErrorCode::UnsupportedEpsilon: return "unsupported-epsilon";
    case ErrorCode::CapacityExceeded: return "capacity-exceeded";
    case ErrorCode::Undefined: return "undefined";
    case ErrorCode::BudgetExhausted: return "budget-exhausted";
    case ErrorCode::EmptyRange: return "empty-range";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline void require(bool condition, ErrorCode code, const std::string& what) {
  if (!condition) throw Error(code, what);
}

}  // namespace bowen

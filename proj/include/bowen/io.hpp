#pragma once

// CSV and JSON output.  Numbers are written in shortest round-trip form with
// '.' as the decimal point, lines end in LF.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>

#include "json.hpp"

#include "bowen/error.hpp"
#include "bowen/hitting.hpp"
#include "bowen/survival.hpp"

namespace bowen {

inline std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

inline std::string survival_csv(const SurvivalCurve& curve) {
  std::string out = "t,survival,n_at_risk\n";
  for (std::size_t i = 0; i < curve.t.size(); ++i) {
    out += format_number(curve.t[i]);
    out += ',';
    out += format_number(curve.survival[i]);
    out += ',';
    out += std::to_string(i < curve.at_risk.size() ? curve.at_risk[i] : 0);
    out += '\n';
  }
  return out;
}

// Histogram of uncensored times; censored trials appear only in the sidecar.
inline std::string times_csv(const EntrySample& sample) {
  std::string out = "time,count\n";
  for (std::size_t i = 0; i < sample.times.size();) {
    std::size_t j = i;
    while (j < sample.times.size() && sample.times[j] == sample.times[i]) ++j;
    out += std::to_string(sample.times[i]);
    out += ',';
    out += std::to_string(j - i);
    out += '\n';
    i = j;
  }
  return out;
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(static_cast<bool>(out), ErrorCode::InvalidArgument, "cannot open " + path.string() + " for writing");
  out << content;
  require(static_cast<bool>(out), ErrorCode::InvalidArgument, "failed writing " + path.string());
}

inline nlohmann::json curve_metadata(const SurvivalCurve& curve) {
  return {{"lambda", curve.lambda},     {"mu", curve.mu},         {"mode", to_string(curve.mode)},
          {"sample_size", curve.sample_size}, {"reliable", curve.reliable}};
}

inline nlohmann::json sample_metadata(const EntrySample& sample) {
  return {{"target", sample.target},
          {"mode", to_string(sample.mode)},
          {"order", sample.order},
          {"trials", sample.trials},
          {"censored", sample.censored},
          {"censored_fraction", sample.censored_fraction()},
          {"horizon", sample.horizon}};
}

}  // namespace bowen

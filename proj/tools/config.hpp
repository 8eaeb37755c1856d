#pragma once

// Experiment configuration: one JSON document, validated in full so that
// every offending field is reported at once.

#include <cmath>
#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "bowen/systems.hpp"
#include "bowen/tower.hpp"

namespace bowen::cli {

using nlohmann::json;

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> problems)
      : std::runtime_error(join(problems)), problems_(std::move(problems)) {}

  const std::vector<std::string>& problems() const noexcept { return problems_; }

 private:
  static std::string join(const std::vector<std::string>& p) {
    std::string out;
    for (const auto& s : p) out += (out.empty() ? "" : "\n") + s;
    return out;
  }

  std::vector<std::string> problems_;
};

enum class Kind { EntryLaw, ReturnLaw, OracleCompare, Kac, Entropy, MixingScan, PhiScan, TowerLaw, BoundEval };

inline const std::vector<std::pair<std::string, Kind>>& kind_names() {
  static const std::vector<std::pair<std::string, Kind>> names{
      {"entry-law", Kind::EntryLaw}, {"return-law", Kind::ReturnLaw}, {"oracle-compare", Kind::OracleCompare},
      {"kac", Kind::Kac},           {"entropy", Kind::Entropy},       {"mixing-scan", Kind::MixingScan},
      {"phi-scan", Kind::PhiScan},   {"tower-law", Kind::TowerLaw},    {"bound-eval", Kind::BoundEval}};
  return names;
}

inline std::string to_string(Kind k) {
  for (const auto& [name, kind] : kind_names()) {
    if (kind == k) return name;
  }
  return "unknown";
}

struct SystemConfig {
  std::string type = "bernoulli";
  std::vector<double> probabilities{0.5, 0.5};
  std::vector<std::vector<double>> matrix;
};

struct CenterConfig {
  std::optional<double> real;
  std::optional<std::vector<Symbol>> symbols;
  std::uint64_t sample = 0;  // stream index when neither is given
};

struct TargetConfig {
  std::optional<std::vector<Symbol>> word;
  std::optional<double> epsilon;
  int n = 1;
  CenterConfig center;
};

struct TowerCenter {
  Column column = 1;
  std::uint64_t level = 0;
  std::vector<Column> future;
};

struct Params {
  double eta = 0.45;
  double beta = 0.9;
  std::optional<std::uint64_t> delta;
  double c_prime = 0.5;
  double gamma = 0.5;
  std::size_t i_max = 10'000;
  double lambda_tail = 9.0;
  std::size_t grid_points = 200;
  double grid_min = 0.01;
  double grid_max = 10.0;
  std::uint64_t burn_in = 1'000'000;
  std::size_t orbits = 8;
  std::size_t max_length = 8;  // alpha complexity cap
  std::size_t k_first = 1;
  std::size_t k_last = 20;
  std::vector<double> deltas;  // phi-scan radii offsets
  std::size_t points = 200;    // entropy centres
  std::uint64_t occupancy_orbits = 200'000;
  std::uint64_t occupancy_steps = 50;
};

struct BoundConfig {
  double theta_n = 0.0, t = 1.0, s = 1.0, lambda = 1.0;
  std::optional<double> f;
  double mu_ball = 0.0, mu_inner = 0.0, depth = 1.0, alpha_at_depth = 0.0, c5 = 1.0, c6 = 1.0;
};

struct ExperimentConfig {
  Kind kind = Kind::EntryLaw;
  SystemConfig system;
  TargetConfig target;
  TowerCenter tower_center;
  std::uint64_t trials = 10'000;
  std::uint64_t horizon = 0;
  std::uint64_t seed = 0;
  std::optional<double> tolerance;
  Params params;
  BoundConfig bound;
};

namespace detail {

class Reader {
 public:
  std::vector<std::string> problems;

  void check_keys(const json& obj, const std::string& where, const std::set<std::string>& allowed) {
    if (!obj.is_object()) {
      problems.push_back(where + ": expected an object");
      return;
    }
    for (const auto& [key, _] : obj.items()) {
      if (!allowed.count(key)) problems.push_back(where + ": unknown key '" + key + "'");
    }
  }

  template <typename T>
  bool get(const json& obj, const std::string& key, const std::string& where, T& out) {
    if (!obj.is_object() || !obj.contains(key)) return false;
    try {
      out = obj.at(key).get<T>();
      return true;
    } catch (const json::exception&) {
      problems.push_back(where + "." + key + ": wrong type");
      return false;
    }
  }

  void range(bool ok, const std::string& field, const std::string& admissible) {
    if (!ok) problems.push_back(field + ": outside admissible range " + admissible);
  }
};

}  // namespace detail

inline ExperimentConfig parse_config(const json& doc) {
  detail::Reader r;
  ExperimentConfig cfg;
  r.check_keys(doc, "config", {"kind", "system", "target", "tower", "M", "horizon", "seed", "tolerance", "params", "bound"});
  if (!doc.is_object()) throw ConfigError(r.problems);

  std::string kind;
  if (!r.get(doc, "kind", "config", kind)) {
    r.problems.push_back("config.kind: required, one of entry-law, return-law, oracle-compare, kac, entropy, mixing-scan, phi-scan, tower-law, bound-eval");
  } else {
    bool found = false;
    for (const auto& [name, k] : kind_names()) {
      if (name == kind) {
        cfg.kind = k;
        found = true;
      }
    }
    if (!found) r.problems.push_back("config.kind: unknown experiment kind '" + kind + "'");
  }

  if (doc.contains("system")) {
    const json& s = doc["system"];
    r.check_keys(s, "system", {"type", "probabilities", "matrix"});
    r.get(s, "type", "system", cfg.system.type);
    r.get(s, "probabilities", "system", cfg.system.probabilities);
    r.get(s, "matrix", "system", cfg.system.matrix);
    if (cfg.system.type != "doubling" && cfg.system.type != "bernoulli" && cfg.system.type != "markov") {
      r.problems.push_back("system.type: must be doubling, bernoulli or markov");
    } else if (cfg.system.type == "markov" && cfg.system.matrix.empty()) {
      r.problems.push_back("system.matrix: required for a markov system");
    }
  }

  if (doc.contains("target")) {
    const json& t = doc["target"];
    r.check_keys(t, "target", {"word", "epsilon", "n", "center"});
    std::vector<int> word;
    if (r.get(t, "word", "target", word)) {
      std::vector<Symbol> w;
      bool ok = !word.empty();
      for (int s : word) {
        ok = ok && s >= 0 && s < static_cast<int>(kMaxAlphabet);
        w.push_back(static_cast<Symbol>(s));
      }
      r.range(ok, "target.word", "non-empty, symbols in [0, 64)");
      cfg.target.word = w;
    }
    double eps = 0;
    if (r.get(t, "epsilon", "target", eps)) {
      r.range(eps > 0 && std::isfinite(eps), "target.epsilon", "(0, inf)");
      cfg.target.epsilon = eps;
    }
    if (r.get(t, "n", "target", cfg.target.n)) r.range(cfg.target.n >= 1, "target.n", "[1, inf)");
    if (t.is_object() && t.contains("center")) {
      const json& c = t["center"];
      r.check_keys(c, "target.center", {"real", "symbols", "sample"});
      double x = 0;
      if (r.get(c, "real", "target.center", x)) {
        r.range(x >= 0.0 && x < 1.0, "target.center.real", "[0, 1)");
        cfg.target.center.real = x;
      }
      std::vector<int> sym;
      if (r.get(c, "symbols", "target.center", sym)) {
        std::vector<Symbol> v;
        for (int s : sym) v.push_back(static_cast<Symbol>(s));
        cfg.target.center.symbols = v;
      }
      r.get(c, "sample", "target.center", cfg.target.center.sample);
    }
    if (cfg.target.word && cfg.target.epsilon) r.problems.push_back("target: give either word or epsilon/n, not both");
  }

  if (doc.contains("tower")) {
    const json& t = doc["tower"];
    r.check_keys(t, "tower", {"lambda_tail", "i_max", "gamma", "column", "level", "future"});
    if (r.get(t, "lambda_tail", "tower", cfg.params.lambda_tail)) r.range(cfg.params.lambda_tail > 1.0, "tower.lambda_tail", "(1, inf)");
    if (r.get(t, "i_max", "tower", cfg.params.i_max)) r.range(cfg.params.i_max >= 1 && cfg.params.i_max <= 10'000'000, "tower.i_max", "[1, 1e7]");
    if (r.get(t, "gamma", "tower", cfg.params.gamma)) r.range(cfg.params.gamma > 0 && cfg.params.gamma < 1, "tower.gamma", "(0, 1)");
    r.get(t, "column", "tower", cfg.tower_center.column);
    r.get(t, "level", "tower", cfg.tower_center.level);
    r.get(t, "future", "tower", cfg.tower_center.future);
    r.range(cfg.tower_center.column >= 1 && cfg.tower_center.level < cfg.tower_center.column, "tower.column/level",
            "column >= 1, 0 <= level < column");
    for (Column c : cfg.tower_center.future) r.range(c >= 1, "tower.future", "columns >= 1");
  }

  if (r.get(doc, "M", "config", cfg.trials)) r.range(cfg.trials >= 1, "M", "[1, inf)");
  r.get(doc, "horizon", "config", cfg.horizon);
  r.get(doc, "seed", "config", cfg.seed);
  double tol = 0;
  if (r.get(doc, "tolerance", "config", tol)) {
    r.range(tol > 0, "tolerance", "(0, inf)");
    cfg.tolerance = tol;
  }

  if (doc.contains("params")) {
    const json& p = doc["params"];
    r.check_keys(p, "params", {"eta", "beta", "delta", "c_prime", "gamma", "i_max", "grid", "burn_in", "orbits", "max_length",
                               "k_first", "k_last", "deltas", "points", "occupancy_orbits", "occupancy_steps"});
    Params& q = cfg.params;
    if (r.get(p, "eta", "params", q.eta)) r.range(q.eta > 0.0 && q.eta < 0.5, "params.eta", "(0, 0.5)");
    if (r.get(p, "beta", "params", q.beta)) r.range(q.beta > q.eta && q.beta < 1.0, "params.beta", "(eta, 1)");
    std::uint64_t delta = 0;
    if (r.get(p, "delta", "params", delta)) {
      r.range(delta >= 1, "params.delta", "[1, inf)");
      q.delta = delta;
    }
    if (r.get(p, "c_prime", "params", q.c_prime)) r.range(q.c_prime > 0.0 && q.c_prime < 1.0, "params.c_prime", "(0, 1)");
    if (r.get(p, "gamma", "params", q.gamma)) r.range(q.gamma > 0.0 && q.gamma < 1.0, "params.gamma", "(0, 1)");
    if (r.get(p, "i_max", "params", q.i_max)) r.range(q.i_max >= 1 && q.i_max <= 10'000'000, "params.i_max", "[1, 1e7]");
    if (p.is_object() && p.contains("grid")) {
      const json& g = p["grid"];
      r.check_keys(g, "params.grid", {"points", "min", "max"});
      r.get(g, "points", "params.grid", q.grid_points);
      r.get(g, "min", "params.grid", q.grid_min);
      r.get(g, "max", "params.grid", q.grid_max);
      r.range(q.grid_points >= 1 && q.grid_min > 0 && q.grid_max > q.grid_min, "params.grid", "points >= 1, 0 < min < max");
    }
    r.get(p, "burn_in", "params", q.burn_in);
    if (r.get(p, "orbits", "params", q.orbits)) r.range(q.orbits >= 1, "params.orbits", "[1, inf)");
    if (r.get(p, "max_length", "params", q.max_length)) r.range(q.max_length >= 1 && q.max_length <= 20, "params.max_length", "[1, 20]");
    r.get(p, "k_first", "params", q.k_first);
    r.get(p, "k_last", "params", q.k_last);
    r.range(q.k_first >= 1 && q.k_last >= q.k_first, "params.k_first/k_last", "1 <= k_first <= k_last");
    if (r.get(p, "deltas", "params", q.deltas)) {
      bool ok = !q.deltas.empty();
      for (double d : q.deltas) ok = ok && d > 0;
      r.range(ok, "params.deltas", "non-empty, all > 0");
    }
    if (r.get(p, "points", "params", q.points)) r.range(q.points >= 1, "params.points", "[1, inf)");
    r.get(p, "occupancy_orbits", "params", q.occupancy_orbits);
    r.get(p, "occupancy_steps", "params", q.occupancy_steps);
  }

  if (doc.contains("bound")) {
    const json& b = doc["bound"];
    r.check_keys(b, "bound", {"theta_n", "t", "s", "lambda", "f", "mu_ball", "mu_inner", "N", "alpha_at_N", "C5", "C6"});
    BoundConfig& q = cfg.bound;
    r.get(b, "theta_n", "bound", q.theta_n);
    r.get(b, "t", "bound", q.t);
    r.get(b, "s", "bound", q.s);
    r.get(b, "lambda", "bound", q.lambda);
    double f = 0;
    if (r.get(b, "f", "bound", f)) q.f = f;
    r.get(b, "mu_ball", "bound", q.mu_ball);
    r.get(b, "mu_inner", "bound", q.mu_inner);
    r.get(b, "N", "bound", q.depth);
    r.get(b, "alpha_at_N", "bound", q.alpha_at_depth);
    r.get(b, "C5", "bound", q.c5);
    r.get(b, "C6", "bound", q.c6);
    r.range(q.mu_ball > 0 && q.mu_ball <= 1, "bound.mu_ball", "(0, 1]");
    r.range(q.mu_inner > 0 && q.mu_inner <= 1, "bound.mu_inner", "(0, 1]");
    r.range(q.s > 0 && q.lambda > 0 && q.depth > 0, "bound.s/lambda/N", "(0, inf)");
    r.range(q.theta_n >= 0 && q.t >= 0 && q.alpha_at_depth >= 0 && q.c5 >= 0 && q.c6 >= 0, "bound.theta_n/t/alpha_at_N/C5/C6",
            "[0, inf)");
  }

  // Kind-specific requirements.
  const bool needs_target = cfg.kind == Kind::EntryLaw || cfg.kind == Kind::ReturnLaw || cfg.kind == Kind::OracleCompare ||
                            cfg.kind == Kind::Kac || cfg.kind == Kind::Entropy || cfg.kind == Kind::PhiScan;
  if (needs_target && !cfg.target.word && !cfg.target.epsilon) r.problems.push_back("target: word or epsilon required for this kind");
  if ((cfg.kind == Kind::OracleCompare) && cfg.system.type == "doubling") {
    r.problems.push_back("system.type: oracle-compare needs a shift system");
  }
  if ((cfg.kind == Kind::Entropy || cfg.kind == Kind::PhiScan || cfg.kind == Kind::TowerLaw) && cfg.target.word) {
    r.problems.push_back("target.word: this kind takes epsilon and n");
  }
  if (cfg.kind == Kind::TowerLaw && !cfg.target.epsilon) r.problems.push_back("target.epsilon: required for tower-law");
  if (cfg.kind == Kind::PhiScan && cfg.params.deltas.empty()) r.problems.push_back("params.deltas: required for phi-scan");
  if (cfg.kind == Kind::BoundEval && !doc.contains("bound")) r.problems.push_back("bound: required for bound-eval");

  if (!r.problems.empty()) throw ConfigError(r.problems);
  return cfg;
}

inline System make_system(const SystemConfig& s) {
  if (s.type == "doubling") return System::doubling_map();
  if (s.type == "markov") return System::markov(s.matrix);
  return System::bernoulli(s.probabilities);
}

inline Point make_center(const CenterConfig& c, std::uint64_t seed) {
  if (c.real) return Point::from_real(*c.real);
  if (c.symbols) return Point::from_symbols(*c.symbols, make_key(seed, StreamPurpose::Center, c.sample));
  return Point::sample(make_key(seed, StreamPurpose::Center, c.sample));
}

}  // namespace bowen::cli

#pragma once
// Shared small utilities: central tolerance block, deterministic RNG, errors.

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

#include <json.hpp>

namespace speclab {

using json = nlohmann::ordered_json;  // insertion-ordered keys => reproducible bytes

// Reports serialize +-infinity as the strings "inf"/"-inf" (JSON has no
// infinities); every real-valued report field goes through this.
inline json encode_real(double v) {
  if (std::isinf(v)) return json(v > 0 ? "inf" : "-inf");
  return json(v);
}

// Every numeric check in reports cites one of these; the whole block is echoed
// into every report so a reader can see which defaults were in force.
struct Tolerances {
  double linalg_identity = 1e-10;   // algebraic identities (quadratic form vs operator, ...)
  double eig_agree = 1e-8;          // eigenvalue agreement (dense vs iterative, spectra shifts)
  double norm_preserve = 1e-12;     // exact-arithmetic norm identities
  double rayleigh_slack = 1e-9;     // one-sided Rayleigh inequalities
  double window_change = 1e-3;      // truncation-window doubling stability
  double ess_estimate = 5e-3;       // essential-spectrum estimator comparisons
  double ratio_slack = 1e-12;       // monotone-series assertions

  json to_json() const {
    return json{{"linalg_identity", linalg_identity}, {"eig_agree", eig_agree},
                {"norm_preserve", norm_preserve},     {"rayleigh_slack", rayleigh_slack},
                {"window_change", window_change},     {"ess_estimate", ess_estimate},
                {"ratio_slack", ratio_slack}};
  }
};

inline const Tolerances& default_tolerances() {
  static const Tolerances t{};
  return t;
}

class SpeclabError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Thrown on malformed external input (scenario/graph JSON); the CLI maps it to
// the usage/schema exit code.
class SchemaError : public SpeclabError {
 public:
  using SpeclabError::SpeclabError;
};

// Strict-schema helpers: reject unknown fields, require listed ones.
inline void json_require_keys(const json& j, std::initializer_list<const char*> allowed,
                              std::initializer_list<const char*> required,
                              const std::string& where) {
  if (!j.is_object()) throw SchemaError(where + ": expected a JSON object");
  for (const auto& [k, v] : j.items()) {
    (void)v;
    bool ok = false;
    for (const char* a : allowed)
      if (k == a) ok = true;
    if (!ok) throw SchemaError(where + ": unknown field \"" + k + "\"");
  }
  for (const char* r : required)
    if (!j.contains(r)) throw SchemaError(where + ": missing field \"" + std::string(r) + "\"");
}

inline int json_get_int(const json& j, const char* key, const std::string& where) {
  if (!j.at(key).is_number_integer())
    throw SchemaError(where + ": field \"" + key + "\" must be an integer");
  return j.at(key).get<int>();
}

// One RNG type everywhere, always explicitly seeded, so that a fixed seed gives
// identical streams on every platform we build on.
using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) {
  // Portable: derive from the raw 64-bit draw instead of std::uniform_real_distribution,
  // whose output is implementation-defined.
  const double u = (rng() >> 11) * 0x1.0p-53;  // [0,1)
  return lo + (hi - lo) * u;
}

inline std::int64_t uniform_int(Rng& rng, std::int64_t lo, std::int64_t hi) {
  // [lo, hi] inclusive; rejection-free modulo is fine for our small ranges.
  const std::uint64_t span = static_cast<std::uint64_t>(hi - lo + 1);
  return lo + static_cast<std::int64_t>(rng() % span);
}

inline double gaussian(Rng& rng) {
  // Box-Muller on the portable uniform; avoids std::normal_distribution for the
  // same reproducibility reason.
  const double u1 = uniform(rng, 1e-300, 1.0);
  const double u2 = uniform(rng, 0.0, 1.0);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

}  // namespace speclab

#pragma once
// Scenario files, the theorem-verification harness, the example gallery, and
// report emission.
//
// A scenario is a versioned JSON document ("v1") naming a verification kind
// and its inputs.  Verifiers return a TheoremReport: a list of claims, each a
// numeric comparison with an explicit tolerance, plus embedded artifacts
// (certificates, estimate histories) and plot-ready series rows.  The
// overall outcome is one of
//
//   pass                 every claim holds
//   fail                 some claim fails
//   inconclusive         a budget ran out or a verdict stayed open; never a
//                        silent pass
//   hypothesis-violated  the statement's hypothesis fails on this input, so
//                        neither pass nor fail is claimed
//
// Reports are deterministic functions of (scenario, seed): running the same
// file twice yields byte-identical JSON.

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "speclab/graph.hpp"
#include "speclab/util.hpp"

namespace speclab {

struct Claim {
  std::string statement;
  std::string comparison;  // ">=" | "<=" | "=="
  double lhs = 0.0;
  double rhs = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  json to_json() const;
};

// Evaluate and record a claim; pass is lhs >= rhs - tol, lhs <= rhs + tol or
// |lhs - rhs| <= tol according to the comparison.
Claim make_claim(const std::string& statement, const std::string& comparison, double lhs,
                 double rhs, double tolerance);

struct SeriesRow {
  std::string name;
  double x = 0.0;
  double y = 0.0;
};

struct TheoremReport {
  std::string scenario;
  std::string kind;
  std::string outcome = "pass";
  std::string note;
  std::vector<Claim> claims;
  json artifacts = json::object();
  std::vector<SeriesRow> series;
  Tolerances tolerances = default_tolerances();

  // Derive the outcome from the claims unless a special outcome
  // (inconclusive / hypothesis-violated) was already set.
  void finish();
  json to_json() const;
  std::string csv() const;  // header "name,x,y", one row per series point
  int exit_code() const;    // 0 pass, 1 fail, 2 otherwise
};

struct Scenario {
  std::string name;
  std::string kind;  // monotonicity | tame | name | stability | gallery | hyperbolic
  std::uint64_t seed = 0;
  json inputs;

  static Scenario parse(const json& doc);          // strict, field-level errors
  static Scenario load(const std::string& path);   // read file + parse
};

// ---- verifiers ------------------------------------------------------------

// Bottom of the spectrum can only rise under a covering.  Fuzzes random
// finite covers, optionally checks a trivial cover for equality and an
// infinite cover through its exhaustion upper bounds, and validates the
// norm-preserving pushdown inequality on random test functions.
TheoremReport verify_monotonicity(const Scenario& s);

// Amenable coverings preserve the bottom of the spectrum: finite cases must
// agree to machine-level tolerance; infinite amenable fibers are checked by
// exhaustion plus explicit cutoff test functions built from the lifted base
// ground state on a certified Folner set.
TheoremReport verify_tame(const Scenario& s);

// Nonamenable coverings with a spectral hypothesis downstairs raise the
// bottom strictly.  Pass needs a certified positive lower bound upstairs
// (expansion certificate route); exhaustion alone is only an upper-bound
// family.  Infinite bases with no essential gap trip the hypothesis guard.
TheoremReport verify_name(const Scenario& s);

// Essential-spectrum estimates before/after a finite edit must agree.
TheoremReport verify_stability(const Scenario& s);

// Small catalog of infinite (or wrapped finite) graphs addressable from
// scenario inputs: {"type": "z_line"}, {"type": "regular_tree", "degree": d},
// {"type": "blob_chain", "blob_size": b[, "blob_count": k]}, or
// {"type": "finite", "graph": <graph document>}.
std::shared_ptr<const LazyGraph> build_lazy_graph(const json& spec, const std::string& where);

// Canned constructions with headline claims checked numerically.
TheoremReport run_gallery_entry(const std::string& name, std::uint64_t seed);
std::vector<std::string> gallery_names();

// Closed-form table queries, Poincare series, critical-exponent estimates,
// and the surface-of-revolution solver.
TheoremReport run_hyperbolic(const Scenario& s);

// Dispatch on scenario.kind.
TheoremReport run_scenario(const Scenario& s);
TheoremReport run_scenario_file(const std::string& path);

// Write <name>.report.json / <name>.csv into `dir` (atomically: temp file
// then rename).  `format` is "json" or "csv"; returns the file path.
std::string emit_report(const TheoremReport& report, const std::string& dir,
                        const std::string& format);

}  // namespace speclab

#pragma once
// Folner machinery for monodromy actions: Schreier graphs, boundary sets,
// certificate search, random-walk spectral-radius estimates, and a composite
// verdict.
//
// For a finite fiber subset E and a symmetric set S of generator letters, the
// boundary is
//
//     bd_S(E) = { x in E : x.g not in E for some g in S },
//
// and E is an (epsilon, S)-Folner set when |bd_S(E)| < epsilon |E|.  Finding
// such sets certifies amenability of the action; failing to find them proves
// nothing, so the negative direction is only ever reported as *evidence*,
// backed by return-probability estimates p_{2n}(e,e)^{1/(2n)} that plateau
// visibly below 1.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "speclab/covering.hpp"
#include "speclab/graph.hpp"
#include "speclab/util.hpp"

namespace speclab {

// S with inverses adjoined, deduplicated, in (generator, exponent) order;
// empty input means "all generators".  Letters must have exponent +-1.
std::vector<Letter> symmetrize_generators(const MonodromyAction& a,
                                          const std::vector<Letter>& S);

// One step x -> x.g^e.
Vid letter_step(const MonodromyAction& a, const Letter& l, Vid x);

struct SchreierGraph {
  WeightedGraph graph;      // unit conductances and measure; loops kept
  std::vector<Vid> window;  // sorted fiber states; graph vertex i is window[i]
  std::vector<double> stubs;  // per vertex: number of S-steps leaving the window
  json to_json(const MonodromyAction& a) const;
};

// Realize the action on a finite window of fiber states: one edge (x, x.g)
// per positive-direction generator incidence inside the window, a stub count
// per escaping incidence (both directions).
SchreierGraph schreier_graph(const MonodromyAction& a, const std::vector<Vid>& window,
                             const std::vector<Letter>& S = {});

// Exactly { x in E : x.g not in E for some g in the symmetrized S }.
std::vector<Vid> folner_boundary(const MonodromyAction& a, const std::vector<Vid>& E,
                                 const std::vector<Letter>& S = {});

struct FolnerCertificate {
  std::vector<Vid> subset;
  std::vector<Letter> generating_set;  // symmetrized
  std::vector<Vid> boundary;
  double ratio = 0.0;
  json to_json(const MonodromyAction& a) const;
};

struct FolnerBudget {
  int max_ball_radius = 32;
  std::size_t max_set_size = 200'000;
  int erosion_rounds = 4000;
  std::size_t exact_fiber_limit = 20;  // full subset enumeration below this
};

struct FolnerSearchResult {
  bool found = false;
  FolnerCertificate certificate;  // meaningful when found
  double best_ratio = 0.0;        // best ratio any strategy achieved
  json log;                       // per-strategy budgets and best ratios
};

// Strategies, in deterministic order: full finite fiber (ratio 0), growing
// balls, greedy erosion (delete the lexicographically smallest vertex among
// those with the most escaping steps), exact enumeration on small finite
// fibers.  First set with ratio < epsilon wins; otherwise the best ratio is
// reported and the result is explicitly not a disproof.
FolnerSearchResult folner_search(const MonodromyAction& a, const std::vector<Letter>& S,
                                 double epsilon, const FolnerBudget& budget = {});

struct RhoEstimate {
  std::vector<std::pair<int, double>> series;  // (2n, p_{2n}(e,e)^{1/(2n)})
  double value = 0.0;                          // last entry
  std::string method;                          // distance-chain | window-walk
  json to_json() const;
};

// Return-probability estimates for the uniform walk on the symmetrized S.
// Free actions with the full generator set and single-generator shifts reduce
// exactly to a birth-death chain on the distance from the base point; other
// actions walk on a ball window (radius n_max) and throw SpeclabError when
// the window exceeds the vertex budget.
RhoEstimate rw_radius_estimate(const MonodromyAction& a, const std::vector<Letter>& S,
                               int n_max, std::size_t vertex_budget = 2'000'000);

struct AmenabilityVerdict {
  std::string status;  // CertifiedAmenable | EvidenceNonamenable | Inconclusive
  std::optional<FolnerCertificate> certificate;
  std::optional<double> rho_lower;
  std::vector<std::pair<int, double>> rho_series;
  json search_log;
  json to_json(const MonodromyAction& a) const;
};

struct VerdictOptions {
  FolnerBudget folner;
  double delta_plateau = 0.05;  // plateau must sit below 1 - delta
  double slope_tol = 0.05;      // tail rise per remaining headroom
  int n_max_radial = 1000;      // walk budget when the distance chain is exact
  int n_max_window = 40;        // walk budget on explicit windows
  std::size_t vertex_budget = 2'000'000;
};

// CertifiedAmenable iff the search finds a set below epsilon.  Otherwise the
// walk estimates decide between EvidenceNonamenable (plateau below
// 1 - delta_plateau with small tail slope) and Inconclusive.  Never certifies
// non-amenability.
AmenabilityVerdict amenability_verdict(const MonodromyAction& a, const std::vector<Letter>& S,
                                       double epsilon, const VerdictOptions& opts = {});

}  // namespace speclab

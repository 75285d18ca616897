#pragma once
// Isoperimetric (Cheeger-type) quantities of weighted graphs.
//
// For a finite subset A, the edge boundary mass is the conductance sum over
// edges leaving A, and the volume is the measure sum over A; with a positive
// weight function phi the edge weights become c(x,y)•phi(x)•phi(y) and the
// volume weights m(x)•phi(x)^2.  On finite graphs the constant minimizes the
// ratio over subsets of at most half the total volume (otherwise the whole
// vertex set would win with ratio 0); on complements of balls inside infinite
// graphs the ratio is minimized over all finite subsets, with boundary edges
// counted into the removed ball as well (the Dirichlet form of the problem).
//
// The module also provides growth-based set search (find A whose
// r-neighborhood adds less than epsilon of its volume), a discrete Cheeger
// inequality check in the normalization
//
//     lambda_1(transformed) >= h_phi^2 / (2 D),
//     D = max_x sum_y c(x,y) phi(y) / (m(x) phi(x)),
//
// and a forest-counting certificate that bounds the isoperimetric ratio of
// the universal-cover tree of a finite base graph from below.

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "speclab/graph.hpp"
#include "speclab/linalg.hpp"
#include "speclab/util.hpp"

namespace speclab {

struct CutReport {
  std::vector<int> subset;
  double boundary_mass = 0.0;
  double volume = 0.0;
  double ratio = 0.0;
  std::string mode;  // exact | sweep | component
  json to_json() const;
};

// Boundary/volume/ratio of one subset (no half-volume cap applied here).
CutReport cut_ratio(const WeightedGraph& g, const std::vector<int>& subset,
                    const std::vector<double>* phi = nullptr);

// Minimal-ratio cut under the half-volume convention.  mode: "exact" (full
// enumeration, n <= 22), "sweep" (level sets of the second eigenvector), or
// "auto".  A disconnected graph short-circuits to ratio 0 with the smallest
// component as witness.  Ties prefer the lexicographically smallest subset.
CutReport cheeger_constant(const WeightedGraph& g, const std::vector<double>* phi = nullptr,
                           const std::string& mode = "auto",
                           const SolveOptions& solve = {});

struct AsymptoticCheegerOptions {
  std::vector<std::int64_t> schedule;  // removed-ball radii, increasing
  double window_factor = 4.0;
  std::size_t vertex_budget = 2'000'000;
  SolveOptions solve;
};

struct AsymptoticCheegerEstimate {
  std::vector<std::pair<std::int64_t, double>> history;  // (radius, best ratio found)
  double value = 0.0;  // entry at the largest removed radius
  json to_json() const;
};

// Best-found (hence upper-bound) isoperimetric ratios of complements of balls,
// via ground-state sweeps and distance annuli inside a window; boundary edges
// into the removed ball and through the window wall are both counted exactly.
AsymptoticCheegerEstimate asymptotic_cheeger(const LazyGraph& g,
                                             const AsymptoticCheegerOptions& opts);

// phi-volumes (|A^r minus A|, |A|) where A^r is the r-neighborhood of A.
std::pair<double, double> neighborhood_growth(const LazyGraph& g, const std::vector<Vid>& A,
                                              int r,
                                              const std::function<double(Vid)>& phi = {});

struct BuserOptions {
  double epsilon = 0.1;
  int r = 1;
  int max_radius = 64;                 // largest candidate ball radius
  std::size_t vertex_budget = 200'000; // enumeration cap per candidate
  int sweep_prefixes = 64;             // ground-state prefix candidates
  SolveOptions solve;
};

struct BuserResult {
  bool found = false;
  std::vector<Vid> subset;
  double growth = 0.0;  // |A^r minus A|
  double volume = 0.0;  // |A|
  double ratio = 0.0;
  std::string family;  // ball | whole-graph | sweep-prefix | (empty if not found)
  json to_json() const;
};

// Search for a finite A with |A^r \ A| < epsilon |A| among balls, the whole
// graph (when finite), and ground-state sweep prefixes.  Not finding one is
// not a proof that none exists.
BuserResult buser_set_search(const LazyGraph& g, const BuserOptions& opts);

struct CheegerBoundReport {
  double lambda_gap = 0.0;  // second eigenvalue of the transformed problem
  double h = 0.0;
  double D = 0.0;
  double bound = 0.0;  // h^2 / (2 D)
  double residual = 0.0;  // |H phi - lambda phi| infinity norm
  std::string h_mode;
  bool pass = false;
  json to_json() const;
};

// Check lambda_1 >= h^2/(2D) on the graph reweighted by a positive
// lambda-eigenfunction phi (weights c phi phi', volumes m phi^2; phi absent
// means phi == 1, which requires the potential to be constantly lambda).
CheegerBoundReport cheeger_inequality_check(const WeightedGraph& g,
                                            const std::vector<double>* phi = nullptr,
                                            double lambda = 0.0,
                                            const SolveOptions& solve = {},
                                            const Tolerances& tol = default_tolerances());

struct TreeExpansionCertificate {
  bool applies = false;
  double h_lower = 0.0;       // certified bound on the cover's isoperimetric ratio
  double lambda_lower = 0.0;  // h^2/(2D) + min V
  double D = 0.0;
  std::string reason;  // why it applies / does not apply
  json to_json() const;
};

// Forest counting on the universal-cover tree of a finite connected base:
// if every base degree is >= 2 (loops count twice), some degree exceeds 2,
// conductances and measures are uniform, and degree-2 vertices are pairwise
// non-adjacent and loop-free, then every finite subset of the cover tree has
// boundary at least h_lower times its size:
//   - no degree-2 vertices: h_lower = (min degree - 2) * c/m;
//   - otherwise:            h_lower = 2/(t+3) * c/m, with t the largest
//     number of degree-2 neighbors of any single vertex.
TreeExpansionCertificate universal_cover_expansion(const WeightedGraph& base);

}  // namespace speclab

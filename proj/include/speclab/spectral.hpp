#pragma once
// Bottom-of-spectrum computations.
//
// lambda0_finite      smallest eigenvalue of Q f = lambda M f on a finite
//                     graph, optionally restricted to a region (functions
//                     vanishing outside; crossing-edge conductance stays on
//                     the diagonal).
// lambda0_exhaustion  Dirichlet values on growing balls of a lazy graph;
//                     a non-increasing sequence of upper bounds.
// lambda_ess_estimate Dirichlet values on complements of growing balls,
//                     computed inside a window with an outer Dirichlet wall;
//                     a non-decreasing sequence approximating the bottom of
//                     the essential part of the spectrum.  Finite graphs get
//                     a +infinity sentinel once the complement is empty.
// stability_check     the essential-spectrum estimate before and after a
//                     finite edit of the graph; they must agree.
//
// Exhaustion and window values are upper bounds on the limiting quantity of
// the region they restrict; no lower bounds are claimed unless a separate
// certificate provides one, and reports carry the bound direction through
// the lower_bound / upper_bound fields.

#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "speclab/graph.hpp"
#include "speclab/linalg.hpp"
#include "speclab/util.hpp"

namespace speclab {

struct SpectralEstimate {
  double value = 0.0;  // +infinity sentinel when the variational problem is empty
  std::optional<double> lower_bound;
  std::optional<double> upper_bound;
  std::string method = "dense";  // dense | iterative | dirichlet | exhaustion
  std::vector<std::pair<std::int64_t, double>> history;  // (radius, value)
  bool converged = true;
  bool window_flag = false;  // initial window failed the doubling check
  json to_json() const;      // infinities serialized as the string "inf"
};

// Smallest eigenvalue on the whole graph, or on the subproblem of functions
// supported in `region`.  Dense solve up to opts.dense_limit vertices,
// certified bisection / iterative solve above.  Throws on an empty region.
SpectralEstimate lambda0_finite(const WeightedGraph& g,
                                const std::vector<int>* region = nullptr,
                                const SolveOptions& opts = {});

// Dirichlet value of a ball truncation (boundary mass on the diagonal).
SpectralEstimate lambda0_truncation(const Truncation& t, const SolveOptions& opts = {});

// A-priori bracket [min V, max V + 2 max_x sum_y c(x,y)/m(x)] containing the
// bottom of the spectrum of a finite graph.
std::pair<double, double> spectral_bracket(const WeightedGraph& g);

// Exact collapse of the Dirichlet problem on levels [a..b] of an equitable
// radial structure to a weighted path; `outer_wall` adds the Dirichlet mass of
// the level-(b+1) edges (absent when the graph ends at level b).
double radial_dirichlet_value(const RadialProfile& p, std::int64_t a, std::int64_t b,
                              bool outer_wall = true);

struct ExhaustionOptions {
  std::vector<std::int64_t> schedule;  // strictly increasing radii
  SolveOptions solve;
  bool use_radial = true;  // take the exact radial collapse when available
  std::size_t vertex_budget = 2'000'000;
};

SpectralEstimate lambda0_exhaustion(const LazyGraph& g, const ExhaustionOptions& opts);

struct EssOptions {
  std::vector<std::int64_t> schedule;  // removed-ball radii, strictly increasing
  SolveOptions solve;
  double window_factor = 4.0;  // initial window radius = window_factor * removed radius
  int max_doublings = 6;       // power-law tails (line-like ends) settle slowly
  double window_change_tol = 1e-3;
  bool use_radial = true;
  std::size_t vertex_budget = 2'000'000;
};

SpectralEstimate lambda_ess_estimate(const LazyGraph& g, const EssOptions& opts);

struct GraphEdits {
  std::map<Vid, double> potential;                     // vertex -> new V
  std::map<std::pair<Vid, Vid>, double> conductance;   // edge -> new c (0 removes)
  std::vector<Vid> deleted;                            // removed vertices
  bool empty() const { return potential.empty() && conductance.empty() && deleted.empty(); }
};

struct StabilityReport {
  SpectralEstimate before, after;
  double difference = 0.0;  // 0 when both sides are the +infinity sentinel
  double threshold = 0.0;
  bool pass = false;
  json to_json() const;
};

// Essential-spectrum estimate before and after a finite edit; PASS when the
// two estimates agree within twice the estimator tolerance.
StabilityReport stability_check(std::shared_ptr<const LazyGraph> base, const GraphEdits& edits,
                                const EssOptions& opts,
                                const Tolerances& tol = default_tolerances());

}  // namespace speclab

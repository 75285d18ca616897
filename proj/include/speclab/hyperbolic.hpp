#pragma once
// Closed-form bottom-of-spectrum constants for hyperbolic spaces, Poincare
// series over Moebius groups, critical-exponent estimation, the
// covering-dichotomy prediction, and the finite-volume cusp-like surface of
// revolution solver.
//
// Models: the upper half-plane (2x2 real matrices) and upper half-space (2x2
// complex matrices), both with points written as (zeta, t): horizontal
// coordinate zeta (real for the half-plane) and height t > 0, so
//
//     cosh d((zeta,t), (zeta',t')) = 1 + (|zeta-zeta'|^2 + (t-t')^2) / (2 t t').
//
// Distances to translates d(x, g y) are evaluated through the identity
// cosh d(o, M o) = ||M||_F^2 / 2 at the base point o = (0,1), conjugating by
// the upper-triangular map T_x : o -> x; this stays finite long after the
// naive route (apply M, then subtract nearly-boundary points) has lost all
// precision.

#include <array>
#include <complex>
#include <string>
#include <utility>
#include <vector>

#include "speclab/util.hpp"

namespace speclab {

// ---- closed forms ---------------------------------------------------------

struct HyperbolicSpace {
  std::string family;  // R | C | H | O
  int parameter = 0;   // R: the dimension itself; C/H: n with m=2n/4n; O: 2
  int dimension = 0;   // m
  int entropy = 0;     // h: volume growth rate
  double lambda0 = 0;  // h^2/4
  json to_json() const;
};

// The four-family entropy table: (R,m) h=m-1; (C,n) m=2n, h=m; (H,n) m=4n,
// h=m+2; (O,2) m=16, h=22.
HyperbolicSpace space_constants(const std::string& family, int n);

// delta*(m-1-delta) above the branch point delta=(m-1)/2, the constant
// (m-1)^2/4 below it; continuous where they meet.
double sullivan_lambda0(double delta, int m);

// ---- Moebius machinery ----------------------------------------------------

// Point in the half-plane (zeta real) or half-space model, height t > 0.
struct HPoint {
  std::complex<double> zeta{0.0, 0.0};
  double t = 1.0;
};

// 2x2 determinant-one matrix; real entries act on the half-plane, complex
// ones on the half-space.  The constructor rescales to det = 1 and rejects
// singular input.
struct Moebius {
  std::complex<double> a{1.0, 0.0}, b{0.0, 0.0}, c{0.0, 0.0}, d{1.0, 0.0};
  Moebius() = default;
  Moebius(std::complex<double> a_, std::complex<double> b_, std::complex<double> c_,
          std::complex<double> d_);

  Moebius operator*(const Moebius& o) const;
  Moebius inverse() const;
  bool is_real(double tol = 1e-12) const;
  bool is_identity(double tol = 1e-12) const;  // up to sign
  double frobenius_sq() const;

  std::complex<double> apply_halfplane(std::complex<double> z) const;
  HPoint apply_halfspace(const HPoint& p) const;
  json to_json() const;
};

// Matrix from a scenario array: [a,b,c,d] (reals) or [[re,im],...] pairs.
Moebius parse_moebius(const json& entries);

double hyperbolic_distance(const HPoint& p, const HPoint& q);

// d(x, M y) through the conjugated Frobenius identity.
double translate_distance(const Moebius& m, const HPoint& x, const HPoint& y);

// ---- Poincare series ------------------------------------------------------

struct PoincareSeries {
  double sum = 0.0;
  std::vector<double> layer_sums;    // by reduced word length, starting at 0
  std::vector<double> layer_ratios;  // layer k / layer k-1
  bool schottky_verified = false;    // isometric circles pairwise disjoint
  bool overflow = false;
  json to_json() const;
};

// Sum of e^{-s d(x, g y)} over reduced words of length <= max_word_len in the
// given generators and their inverses.  Distinctness of the group elements is
// exactly the (heuristically checked) Schottky property; when the check
// fails the series is still summed and the flag stays false.
PoincareSeries poincare_series(const std::vector<Moebius>& generators, double s,
                               const HPoint& x, const HPoint& y, int max_word_len);

struct DeltaInterval {
  double delta_lo = 0.0;
  double delta_hi = 0.0;
  int word_len = 0;
  bool heuristic = true;
  json to_json() const;  // {delta_lo, delta_hi, word_len, heuristic}
};

// Bisect on s between divergent and convergent layer behavior (root-test
// diagnostic on the last layers).  The bracket must straddle: divergent at
// bracket.first, convergent at bracket.second.  Identity-only generator sets
// return [0,0] exactly.
DeltaInterval critical_exponent_estimate(const std::vector<Moebius>& generators,
                                         const HPoint& x, std::pair<double, double> bracket,
                                         int max_word_len, double width = 0.05);

// ---- covering dichotomy ---------------------------------------------------

struct GefinPrediction {
  std::string relation;  // equal | strict | equal-by-case-2 | no-prediction
  int case_id = 0;       // 1 or 2
  std::string note;
  json to_json() const;
};

// Predicted relation between the bottom of the spectrum upstairs and
// downstairs: when lambda0 downstairs already equals the model space's, the
// cover inherits it (case 2); strictly below, the answer tracks the
// amenability verdict, and an inconclusive verdict yields no prediction.
GefinPrediction gefin_predict(double lambda0_m0, const HyperbolicSpace& H,
                              const std::string& amenability_status);

// ---- surface of revolution ------------------------------------------------

// Profile w(x) = exp(-x^alpha), x in [1, L], rotated around the axis: finite
// volume for every alpha in (0,1) (tail bound: x^alpha >= x L^{alpha-1} for
// x >= L, so the tail is at most L^{1-alpha} e^{-L^alpha} before the 2 pi).
struct RevolutionSurface {
  double alpha = 0.5;
  double L = 400.0;
  int N = 40000;  // grid intervals
};

struct SalphaTailEntry {
  double R = 0.0;
  // Bottom of the Dirichlet form on [R, L_j] for growing windows L_j; the
  // zero-extension embedding makes this non-increasing in the window, and it
  // tends to 0 as the window grows (the constant is almost admissible).
  std::vector<std::pair<double, double>> windows;  // (L_j, value)
  double value = 0.0;                              // largest window
};

struct SalphaReport {
  double volume = 0.0;      // 2 pi * Simpson integral of w over [1,L]
  double tail_bound = 0.0;  // analytic bound on the discarded 2 pi * tail
  double lambda0 = 0.0;     // Neumann bottom; 0 via the constant function
  std::vector<SalphaTailEntry> tail;
  json to_json() const;
};

// Radial discretization: grid conductances w(midpoint)/h, vertex weights
// w(x) h (half at the ends); Neumann bottom plus the Dirichlet tail series
// for each R in the schedule.
SalphaReport salpha_solver(const RevolutionSurface& surface,
                           const std::vector<double>& R_schedule);

}  // namespace speclab

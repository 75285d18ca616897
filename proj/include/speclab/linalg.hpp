#pragma once
// Eigenvalue machinery for the graph operators.
//
// Everything goes through the quadratic form: the generalized problem
// Q f = lambda M f (M = diag(m), positive) is symmetrized once as
// A = M^{-1/2} Q M^{-1/2}, a standard symmetric problem with u = M^{1/2} f.
// The m^{-1}-scaled non-symmetric operator is never formed.
//
// Three solve paths:
//  * dense (Eigen) for small systems, full spectra available;
//  * certified bisection by LDL^T inertia counts for banded systems
//    (1-D discretizations, radial collapses, chains);
//  * LOBPCG with Jacobi preconditioning for general sparse systems,
//    optionally deflated against already-computed eigenvectors.

#include <optional>
#include <utility>
#include <vector>

#include "speclab/graph.hpp"

namespace speclab {

// Symmetrized system A (sorted sparse rows, diagonal included).
struct SymmetricSystem {
  int n = 0;
  std::vector<std::vector<std::pair<int, double>>> rows;
  std::vector<double> sqrt_m;

  void apply(const std::vector<double>& x, std::vector<double>& y) const;
  // Certified interval containing every eigenvalue.
  std::pair<double, double> gershgorin() const;
  int bandwidth() const;
};

// Assemble the symmetrized system for `g`, optionally restricted to `region`
// (Dirichlet condition outside: crossing edges keep their diagonal mass but
// lose the coupling), with optional extra diagonal mass per vertex of g (used
// for truncations of infinite graphs).  Region vertices keep their order.
SymmetricSystem assemble_system(const WeightedGraph& g, const std::vector<int>* region = nullptr,
                                const std::vector<double>* extra_diag = nullptr);

// Dense full solve; values ascending, vectors[i] is the i-th eigenfunction in
// the original (un-symmetrized) coordinates f = M^{-1/2} u.
struct DenseSpectrum {
  std::vector<double> values;
  std::vector<std::vector<double>> vectors;
};
DenseSpectrum dense_spectrum(const SymmetricSystem& sys);

struct IterativeResult {
  double value = 0.0;
  double lower_bound = 0.0;  // certified (bisection) or Gershgorin fallback
  double upper_bound = 0.0;  // Rayleigh quotient of the iterate: always valid
  std::vector<double> vector_f;
  bool converged = false;
  int iterations = 0;
  double residual = 0.0;
  std::string method;
};

// Certified smallest eigenvalue via inertia bisection.  Returns nullopt when
// the (symmetrically permuted) system exceeds `max_bandwidth`.
std::optional<IterativeResult> banded_smallest(const SymmetricSystem& sys, double tol,
                                               int max_bandwidth = 64);

// Single-vector LOBPCG for the smallest eigenvalue orthogonal to `deflate`.
IterativeResult lobpcg_smallest(const SymmetricSystem& sys, double tol, int max_iterations,
                                std::uint64_t seed,
                                const std::vector<std::vector<double>>* deflate = nullptr);

struct SolveOptions {
  int dense_limit = 500;
  int max_bandwidth = 64;
  double tol = 1e-10;
  int max_iterations = 6000;
  std::uint64_t seed = 0;
  // Force a path for cross-checking; "auto" picks dense/banded/lobpcg.
  std::string force_method = "auto";
};

// Convenience driver: picks the path by size/structure and reports which ran.
IterativeResult smallest_eigenvalue(const SymmetricSystem& sys, const SolveOptions& opts = {});

// Smallest eigenvalue of a symmetric tridiagonal system given by diagonal and
// off-diagonal entries (used by radial collapses); certified bisection.
double tridiagonal_smallest(const std::vector<double>& diag, const std::vector<double>& off,
                            double tol = 1e-12);

}  // namespace speclab

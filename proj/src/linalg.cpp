#include "speclab/linalg.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace speclab {

void SymmetricSystem::apply(const std::vector<double>& x, std::vector<double>& y) const {
  y.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double s = 0;
    for (const auto& [j, a] : rows[i]) s += a * x[j];
    y[i] = s;
  }
}

std::pair<double, double> SymmetricSystem::gershgorin() const {
  double lo = 0, hi = 0;
  for (int i = 0; i < n; ++i) {
    double d = 0, off = 0;
    for (const auto& [j, a] : rows[i]) {
      if (j == i)
        d = a;
      else
        off += std::abs(a);
    }
    if (i == 0 || d - off < lo) lo = d - off;
    if (i == 0 || d + off > hi) hi = d + off;
  }
  return {lo, hi};
}

int SymmetricSystem::bandwidth() const {
  int bw = 0;
  for (int i = 0; i < n; ++i)
    for (const auto& [j, a] : rows[i]) {
      (void)a;
      bw = std::max(bw, std::abs(i - j));
    }
  return bw;
}

SymmetricSystem assemble_system(const WeightedGraph& g, const std::vector<int>* region,
                                const std::vector<double>* extra_diag) {
  std::vector<int> verts;
  if (region)
    verts = *region;
  else {
    verts.resize(g.size());
    std::iota(verts.begin(), verts.end(), 0);
  }
  std::vector<int> pos(g.size(), -1);
  for (std::size_t i = 0; i < verts.size(); ++i) pos[verts[i]] = static_cast<int>(i);

  SymmetricSystem sys;
  sys.n = static_cast<int>(verts.size());
  if (sys.n == 0) throw SpeclabError("empty region for eigenvalue solve");
  sys.rows.resize(sys.n);
  sys.sqrt_m.resize(sys.n);
  const auto& adj = g.adjacency();
  for (int i = 0; i < sys.n; ++i) {
    const int x = verts[i];
    const double mx = g.measure(x);
    sys.sqrt_m[i] = std::sqrt(mx);
    // Diagonal: full conductance mass (Dirichlet keeps crossing-edge mass),
    // potential, and any truncation boundary mass.
    double d = g.conductance_at(x) + mx * g.potential(x);
    if (extra_diag) d += (*extra_diag)[x];
    std::vector<std::pair<int, double>> row;
    for (const auto& [y, c] : adj[x]) {
      const int j = pos[y];
      if (j >= 0) row.emplace_back(j, -c / (sys.sqrt_m[i] * std::sqrt(g.measure(y))));
    }
    row.emplace_back(i, d / mx);
    std::sort(row.begin(), row.end());
    sys.rows[i] = std::move(row);
  }
  return sys;
}

DenseSpectrum dense_spectrum(const SymmetricSystem& sys) {
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(sys.n, sys.n);
  for (int i = 0; i < sys.n; ++i)
    for (const auto& [j, a] : sys.rows[i]) A(i, j) = a;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
  if (es.info() != Eigen::Success) throw SpeclabError("dense eigensolver failed to converge");
  DenseSpectrum out;
  out.values.assign(es.eigenvalues().data(), es.eigenvalues().data() + sys.n);
  out.vectors.resize(sys.n);
  for (int k = 0; k < sys.n; ++k) {
    out.vectors[k].resize(sys.n);
    for (int i = 0; i < sys.n; ++i) out.vectors[k][i] = es.eigenvectors()(i, k) / sys.sqrt_m[i];
  }
  return out;
}

// ---- banded inertia bisection --------------------------------------------

namespace {

// Number of eigenvalues of A strictly below sigma, by counting negative
// pivots of the banded LDL^T factorization of A - sigma*I.  Returns -1 when a
// pivot is too close to zero (caller nudges sigma).
int inertia_below(const SymmetricSystem& sys, int bw, double sigma, double pivot_floor) {
  const int n = sys.n;
  // Band storage: col[i][k] is entry (i, i-k), k = 0..bw.
  std::vector<std::vector<double>> L(n, std::vector<double>(bw + 1, 0.0));
  std::vector<double> d(n, 0.0);
  std::vector<std::vector<double>> a(n, std::vector<double>(bw + 1, 0.0));
  for (int i = 0; i < n; ++i)
    for (const auto& [j, v] : sys.rows[i])
      if (j <= i) a[i][i - j] = v;
  int negatives = 0;
  for (int i = 0; i < n; ++i) {
    double di = a[i][0] - sigma;
    for (int k = std::max(0, i - bw); k < i; ++k) {
      const double lik = L[i][i - k];
      di -= lik * lik * d[k];
    }
    if (std::abs(di) < pivot_floor) return -1;
    d[i] = di;
    if (di < 0) ++negatives;
    const int jmax = std::min(n - 1, i + bw);
    for (int j = i + 1; j <= jmax; ++j) {
      double s = (j - i <= bw) ? a[j][j - i] : 0.0;
      for (int k = std::max(0, j - bw); k < i; ++k) s -= L[j][j - k] * L[i][i - k] * d[k];
      L[j][j - i] = s / di;
    }
  }
  return negatives;
}

}  // namespace

std::optional<IterativeResult> banded_smallest(const SymmetricSystem& sys, double tol,
                                               int max_bandwidth) {
  const int bw = sys.bandwidth();
  if (bw > max_bandwidth) return std::nullopt;
  auto [lo, hi] = sys.gershgorin();
  const double scale = std::max({1.0, std::abs(lo), std::abs(hi)});
  const double floor_ = 1e-14 * scale;
  // Invariant: count(lo) == 0 and count(hi') >= 1 for hi' just above hi.
  double a = lo - 1e-9 * scale, b = hi + 1e-9 * scale;
  int iters = 0;
  while (b - a > tol * scale && iters < 200) {
    double mid = 0.5 * (a + b);
    int cnt = inertia_below(sys, bw, mid, floor_);
    for (int nudge = 0; cnt < 0 && nudge < 8; ++nudge) {
      mid += (nudge + 1) * 16.0 * floor_;  // step off the spectrum
      cnt = inertia_below(sys, bw, mid, floor_);
    }
    if (cnt < 0) break;
    if (cnt >= 1)
      b = mid;
    else
      a = mid;
    ++iters;
  }
  IterativeResult r;
  r.value = 0.5 * (a + b);
  r.lower_bound = a;
  r.upper_bound = b;
  r.converged = (b - a) <= std::max(4.0 * tol * scale, 1e-12 * scale);
  r.iterations = iters;
  r.residual = b - a;
  r.method = "bisection";
  return r;
}

double tridiagonal_smallest(const std::vector<double>& diag, const std::vector<double>& off,
                            double tol) {
  SymmetricSystem sys;
  sys.n = static_cast<int>(diag.size());
  sys.rows.resize(sys.n);
  sys.sqrt_m.assign(sys.n, 1.0);
  for (int i = 0; i < sys.n; ++i) {
    if (i > 0) sys.rows[i].emplace_back(i - 1, off[i - 1]);
    sys.rows[i].emplace_back(i, diag[i]);
    if (i + 1 < sys.n) sys.rows[i].emplace_back(i + 1, off[i]);
  }
  auto r = banded_smallest(sys, tol, 1);
  return r->value;
}

// ---- LOBPCG ---------------------------------------------------------------

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void axpy(double alpha, const std::vector<double>& x, std::vector<double>& y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

void scal(double alpha, std::vector<double>& x) {
  for (double& v : x) v *= alpha;
}

void project_out(const std::vector<std::vector<double>>& basis, std::vector<double>& x) {
  for (const auto& b : basis) axpy(-dot(b, x), b, x);
}

}  // namespace

IterativeResult lobpcg_smallest(const SymmetricSystem& sys, double tol, int max_iterations,
                                std::uint64_t seed,
                                const std::vector<std::vector<double>>* deflate) {
  const int n = sys.n;
  const auto [glo, ghi] = sys.gershgorin();
  const double scale = std::max({1.0, std::abs(glo), std::abs(ghi)});

  // Deflation basis in symmetrized coordinates, orthonormalized.
  std::vector<std::vector<double>> defl;
  if (deflate) {
    for (const auto& f : *deflate) {
      std::vector<double> u(n);
      for (int i = 0; i < n; ++i) u[i] = f[i] * sys.sqrt_m[i];
      project_out(defl, u);
      const double nrm = std::sqrt(dot(u, u));
      if (nrm > 1e-12) {
        scal(1.0 / nrm, u);
        defl.push_back(std::move(u));
      }
    }
  }

  Rng rng(seed ^ 0x5eed5eedULL);
  std::vector<double> x(n);
  for (double& v : x) v = 1.0 + 0.01 * gaussian(rng);  // near-constant start
  project_out(defl, x);
  scal(1.0 / std::sqrt(dot(x, x)), x);

  std::vector<double> Ax(n), w(n), p, Ap, Aw(n), r(n);
  sys.apply(x, Ax);
  double rho = dot(x, Ax);
  IterativeResult res;
  res.method = "lobpcg";

  std::vector<double> diagA(n, 0.0);
  for (int i = 0; i < n; ++i)
    for (const auto& [j, a] : sys.rows[i])
      if (j == i) diagA[i] = a;

  int it = 0;
  for (; it < max_iterations; ++it) {
    r = Ax;
    axpy(-rho, x, r);
    project_out(defl, r);
    const double rn = std::sqrt(dot(r, r));
    res.residual = rn;
    if (rn <= tol * scale) {
      res.converged = true;
      break;
    }
    // Jacobi preconditioner on A - rho.
    w = r;
    for (int i = 0; i < n; ++i) {
      const double dgap = diagA[i] - rho;
      w[i] /= (std::abs(dgap) > 1e-8 * scale) ? std::abs(dgap) : 1e-8 * scale;
    }
    project_out(defl, w);

    // Rayleigh-Ritz over span{x, w, p}.
    std::vector<std::vector<double>> S{x, w};
    if (!p.empty()) S.push_back(p);
    // Orthonormalize (modified Gram-Schmidt; drop near-dependent directions).
    std::vector<std::vector<double>> B;
    for (auto& s : S) {
      project_out(B, s);
      const double nrm = std::sqrt(dot(s, s));
      if (nrm > 1e-10) {
        scal(1.0 / nrm, s);
        B.push_back(s);
      }
    }
    const int k = static_cast<int>(B.size());
    Eigen::MatrixXd G(k, k);
    std::vector<std::vector<double>> AB(k, std::vector<double>(n));
    for (int a = 0; a < k; ++a) sys.apply(B[a], AB[a]);
    for (int a = 0; a < k; ++a)
      for (int b = 0; b <= a; ++b) {
        G(a, b) = dot(B[a], AB[b]);
        G(b, a) = G(a, b);
      }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
    Eigen::VectorXd c = es.eigenvectors().col(0);
    std::vector<double> xn(n, 0.0);
    for (int a = 0; a < k; ++a) axpy(c(a), B[a], xn);
    // p: the non-x part of the update direction, for the next subspace.
    std::vector<double> pn(n, 0.0);
    for (int a = 1; a < k; ++a) axpy(c(a), B[a], pn);
    const double pnorm = std::sqrt(dot(pn, pn));
    if (pnorm > 1e-12) {
      scal(1.0 / pnorm, pn);
      p = std::move(pn);
    } else {
      p.clear();
    }
    x = std::move(xn);
    project_out(defl, x);
    scal(1.0 / std::sqrt(dot(x, x)), x);
    sys.apply(x, Ax);
    rho = dot(x, Ax);
  }
  res.value = rho;
  res.upper_bound = rho;       // Rayleigh quotient of an admissible vector
  res.lower_bound = glo;       // only the coarse certified bracket
  res.iterations = it;
  res.vector_f.resize(n);
  for (int i = 0; i < n; ++i) res.vector_f[i] = x[i] / sys.sqrt_m[i];
  return res;
}

IterativeResult smallest_eigenvalue(const SymmetricSystem& sys, const SolveOptions& opts) {
  const bool want_auto = opts.force_method == "auto";
  if ((want_auto && sys.n <= opts.dense_limit) || opts.force_method == "dense") {
    auto sp = dense_spectrum(sys);
    IterativeResult r;
    r.value = sp.values.front();
    r.lower_bound = r.value - opts.tol;
    r.upper_bound = r.value + opts.tol;
    r.vector_f = sp.vectors.front();
    r.converged = true;
    r.method = "dense";
    return r;
  }
  if (want_auto || opts.force_method == "bisection") {
    auto b = banded_smallest(sys, opts.tol, opts.max_bandwidth);
    if (b) return *b;
    if (opts.force_method == "bisection")
      throw SpeclabError("system bandwidth exceeds the bisection limit");
  }
  return lobpcg_smallest(sys, opts.tol, opts.max_iterations, opts.seed, nullptr);
}

}  // namespace speclab

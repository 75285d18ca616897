#include "speclab/hyperbolic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include "speclab/graph.hpp"
#include "speclab/linalg.hpp"

namespace speclab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// acosh(u) for u >= 1, switching to the log form before u*u overflows or the
// direct form loses accuracy; clamps tiny negative roundoff below 1.
double stable_acosh(double u) {
  if (u < 1.0) {
    if (u > 1.0 - 1e-9) return 0.0;
    throw SpeclabError("cosh(distance) below 1: invalid point heights");
  }
  if (u > 1e8) return std::log(2.0) + std::log(u);
  return std::acosh(u);
}

void require_height(const HPoint& p) {
  if (!(p.t > 0.0)) throw SpeclabError("hyperbolic points need positive height");
}

// Upper-triangular map sending the base point (0,1) to p.
Moebius conjugator(const HPoint& p) {
  require_height(p);
  const double r = std::sqrt(p.t);
  return Moebius(std::complex<double>(r, 0.0), p.zeta / r, std::complex<double>(0.0, 0.0),
                 std::complex<double>(1.0 / r, 0.0));
}

}  // namespace

// ---- closed forms ---------------------------------------------------------

json HyperbolicSpace::to_json() const {
  json j;
  j["family"] = family;
  j["parameter"] = parameter;
  j["dimension"] = dimension;
  j["entropy"] = entropy;
  j["lambda0"] = lambda0;
  return j;
}

HyperbolicSpace space_constants(const std::string& family, int n) {
  HyperbolicSpace out;
  out.family = family;
  out.parameter = n;
  if (family == "R") {
    if (n < 2) throw SchemaError("family R needs dimension >= 2");
    out.dimension = n;
    out.entropy = n - 1;
  } else if (family == "C") {
    if (n < 1) throw SchemaError("family C needs parameter >= 1");
    out.dimension = 2 * n;
    out.entropy = out.dimension;
  } else if (family == "H") {
    if (n < 1) throw SchemaError("family H needs parameter >= 1");
    out.dimension = 4 * n;
    out.entropy = out.dimension + 2;
  } else if (family == "O") {
    if (n != 2) throw SchemaError("family O exists only with parameter 2");
    out.dimension = 16;
    out.entropy = 22;
  } else {
    throw SchemaError("unknown space family \"" + family + "\" (want R, C, H or O)");
  }
  out.lambda0 = 0.25 * static_cast<double>(out.entropy) * static_cast<double>(out.entropy);
  return out;
}

double sullivan_lambda0(double delta, int m) {
  if (!(delta >= 0.0)) throw SchemaError("exponent must be non-negative");
  if (m < 2) throw SchemaError("dimension must be at least 2");
  const double h = static_cast<double>(m - 1);
  if (delta >= 0.5 * h) return delta * (h - delta);
  return 0.25 * h * h;
}

// ---- Moebius machinery ----------------------------------------------------

Moebius::Moebius(std::complex<double> a_, std::complex<double> b_, std::complex<double> c_,
                 std::complex<double> d_)
    : a(a_), b(b_), c(c_), d(d_) {
  const std::complex<double> det = a * d - b * c;
  if (std::abs(det) < 1e-300) throw SchemaError("singular matrix is not a Moebius map");
  if (std::abs(det - 1.0) > 1e-12) {
    const std::complex<double> r = std::sqrt(det);
    a /= r;
    b /= r;
    c /= r;
    d /= r;
  }
}

Moebius Moebius::operator*(const Moebius& o) const {
  Moebius out;
  out.a = a * o.a + b * o.c;
  out.b = a * o.b + b * o.d;
  out.c = c * o.a + d * o.c;
  out.d = c * o.b + d * o.d;
  return out;
}

Moebius Moebius::inverse() const {
  Moebius out;
  out.a = d;
  out.b = -b;
  out.c = -c;
  out.d = a;
  return out;
}

bool Moebius::is_real(double tol) const {
  return std::abs(a.imag()) <= tol && std::abs(b.imag()) <= tol && std::abs(c.imag()) <= tol &&
         std::abs(d.imag()) <= tol;
}

bool Moebius::is_identity(double tol) const {
  const double off = std::abs(b) + std::abs(c);
  const double plus = std::abs(a - 1.0) + std::abs(d - 1.0);
  const double minus = std::abs(a + 1.0) + std::abs(d + 1.0);
  return off <= tol && std::min(plus, minus) <= tol;
}

double Moebius::frobenius_sq() const {
  return std::norm(a) + std::norm(b) + std::norm(c) + std::norm(d);
}

std::complex<double> Moebius::apply_halfplane(std::complex<double> z) const {
  if (!is_real()) throw SpeclabError("half-plane maps need real matrix entries");
  return (a * z + b) / (c * z + d);
}

HPoint Moebius::apply_halfspace(const HPoint& p) const {
  require_height(p);
  // (zeta, t) -> (((a zeta + b) conj(c zeta + d) + a conj(c) t^2) / D, t / D),
  // D = |c zeta + d|^2 + |c|^2 t^2.
  const std::complex<double> num = a * p.zeta + b;
  const std::complex<double> den = c * p.zeta + d;
  const double D = std::norm(den) + std::norm(c) * p.t * p.t;
  HPoint out;
  out.zeta = (num * std::conj(den) + a * std::conj(c) * p.t * p.t) / D;
  out.t = p.t / D;
  return out;
}

json Moebius::to_json() const {
  json j = json::array();
  for (const auto& e : {a, b, c, d}) j.push_back(json::array({e.real(), e.imag()}));
  return j;
}

Moebius parse_moebius(const json& entries) {
  if (!entries.is_array() || entries.size() != 4)
    throw SchemaError("a Moebius map is an array of 4 entries");
  std::array<std::complex<double>, 4> e;
  for (std::size_t i = 0; i < 4; ++i) {
    const json& v = entries[i];
    if (v.is_number()) {
      e[i] = std::complex<double>(v.get<double>(), 0.0);
    } else if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
      e[i] = std::complex<double>(v[0].get<double>(), v[1].get<double>());
    } else {
      throw SchemaError("matrix entries are numbers or [re, im] pairs");
    }
  }
  return Moebius(e[0], e[1], e[2], e[3]);
}

double hyperbolic_distance(const HPoint& p, const HPoint& q) {
  require_height(p);
  require_height(q);
  const double horiz = std::norm(p.zeta - q.zeta);
  const double vert = (p.t - q.t) * (p.t - q.t);
  return stable_acosh(1.0 + (horiz + vert) / (2.0 * p.t * q.t));
}

double translate_distance(const Moebius& m, const HPoint& x, const HPoint& y) {
  // d(x, m y) = d(o, Tx^{-1} m Ty o) and cosh d(o, M o) = ||M||_F^2 / 2.
  const Moebius M = conjugator(x).inverse() * (m * conjugator(y));
  const double f = M.frobenius_sq();
  if (!std::isfinite(f)) return kInf;
  return stable_acosh(0.5 * f);
}

// ---- Poincare series ------------------------------------------------------

namespace {

// Isometric circles (center -d/c, radius 1/|c|) of all generators and
// inverses are pairwise disjoint: the classical Schottky / ping-pong picture,
// which guarantees reduced words are pairwise distinct group elements.
bool schottky_circles_disjoint(const std::vector<Moebius>& letters) {
  std::vector<std::pair<std::complex<double>, double>> circles;
  for (const auto& g : letters) {
    if (std::abs(g.c) < 1e-12) return false;  // fixes infinity: no circle
    circles.emplace_back(-g.d / g.c, 1.0 / std::abs(g.c));
  }
  for (std::size_t i = 0; i < circles.size(); ++i)
    for (std::size_t j = i + 1; j < circles.size(); ++j)
      if (std::abs(circles[i].first - circles[j].first) <=
          circles[i].second + circles[j].second)
        return false;
  return true;
}

struct Word {
  Moebius m;
  int last = -1;  // letter index, -1 for the empty word
};

}  // namespace

json PoincareSeries::to_json() const {
  json j;
  j["sum"] = encode_real(sum);
  j["layer_sums"] = json::array();
  for (double v : layer_sums) j["layer_sums"].push_back(encode_real(v));
  j["layer_ratios"] = json::array();
  for (double v : layer_ratios) j["layer_ratios"].push_back(encode_real(v));
  j["schottky_verified"] = schottky_verified;
  j["overflow"] = overflow;
  return j;
}

PoincareSeries poincare_series(const std::vector<Moebius>& generators, double s, const HPoint& x,
                               const HPoint& y, int max_word_len) {
  if (generators.empty()) throw SchemaError("need at least one generator");
  if (max_word_len < 0) throw SchemaError("word length must be non-negative");
  if (!(s >= 0.0)) throw SchemaError("exponent s must be non-negative");
  require_height(x);
  require_height(y);

  const int g = static_cast<int>(generators.size());
  std::vector<Moebius> letters;
  letters.reserve(2 * static_cast<std::size_t>(g));
  for (const auto& m : generators) letters.push_back(m);
  for (const auto& m : generators) letters.push_back(m.inverse());
  const auto inverse_of = [g](int l) { return l < g ? l + g : l - g; };

  PoincareSeries out;
  out.schottky_verified = schottky_circles_disjoint(letters);

  const Moebius tx_inv = conjugator(x).inverse();
  const Moebius ty = conjugator(y);
  const auto term = [&](const Moebius& m) {
    const double f = (tx_inv * (m * ty)).frobenius_sq();
    if (!std::isfinite(f)) return 0.0;  // beyond double range: e^{-s d} -> 0
    return std::exp(-s * stable_acosh(0.5 * f));
  };

  constexpr std::size_t kWordBudget = 4'000'000;
  std::size_t words_seen = 1;

  std::vector<Word> layer{Word{}};
  out.layer_sums.push_back(term(Moebius{}));
  out.sum = out.layer_sums[0];

  for (int len = 1; len <= max_word_len; ++len) {
    const std::size_t branch = layer.size() * (2 * static_cast<std::size_t>(g));
    if (words_seen + branch > kWordBudget)
      throw SpeclabError("reduced-word enumeration exceeds the word budget at length " +
                         std::to_string(len));
    std::vector<Word> next;
    next.reserve(branch);
    double layer_sum = 0.0;
    for (const auto& w : layer) {
      for (int l = 0; l < 2 * g; ++l) {
        if (w.last >= 0 && l == inverse_of(w.last)) continue;  // keep words reduced
        Word nw;
        nw.m = w.m * letters[l];
        nw.last = l;
        layer_sum += term(nw.m);
        next.push_back(std::move(nw));
      }
    }
    words_seen += next.size();
    out.layer_sums.push_back(layer_sum);
    out.layer_ratios.push_back(out.layer_sums[len - 1] > 0.0
                                   ? layer_sum / out.layer_sums[len - 1]
                                   : kInf);
    out.sum += layer_sum;
    if (!std::isfinite(out.sum)) {
      out.overflow = true;
      break;
    }
    layer = std::move(next);
  }
  return out;
}

json DeltaInterval::to_json() const {
  json j;
  j["delta_lo"] = delta_lo;
  j["delta_hi"] = delta_hi;
  j["word_len"] = word_len;
  j["heuristic"] = heuristic;
  return j;
}

namespace {

// Root-test style diagnostic: geometric mean of the last few layer ratios at
// exponent s.  At or above 1 the tail layers are not decaying and the full
// series diverges.
bool layers_diverge(const std::vector<Moebius>& gens, double s, const HPoint& x,
                    int max_word_len) {
  const PoincareSeries ps = poincare_series(gens, s, x, x, max_word_len);
  if (ps.overflow) return true;
  const auto& r = ps.layer_ratios;
  if (r.empty()) return false;
  const std::size_t take = std::min<std::size_t>(3, r.size());
  double logsum = 0.0;
  for (std::size_t i = r.size() - take; i < r.size(); ++i) {
    if (!(r[i] > 0.0)) return false;  // a layer vanished: nothing left to sum
    if (!std::isfinite(r[i])) return true;
    logsum += std::log(r[i]);
  }
  return logsum / static_cast<double>(take) >= -1e-9;
}

}  // namespace

DeltaInterval critical_exponent_estimate(const std::vector<Moebius>& generators, const HPoint& x,
                                         std::pair<double, double> bracket, int max_word_len,
                                         double width) {
  if (generators.empty()) throw SchemaError("need at least one generator");
  if (!(width > 0.0)) throw SchemaError("interval width must be positive");
  if (!(bracket.first >= 0.0) || !(bracket.second > bracket.first))
    throw SchemaError("bracket must satisfy 0 <= lo < hi");

  const bool all_identity = std::all_of(generators.begin(), generators.end(),
                                        [](const Moebius& m) { return m.is_identity(); });
  if (all_identity) {
    DeltaInterval out;
    out.delta_lo = 0.0;
    out.delta_hi = 0.0;
    out.word_len = 0;
    return out;  // finite group generated: exponent 0, no search needed
  }

  double lo = bracket.first;
  double hi = bracket.second;
  if (!layers_diverge(generators, lo, x, max_word_len) ||
      layers_diverge(generators, hi, x, max_word_len))
    throw SpeclabError("bracket does not straddle the convergence change");

  for (int iter = 0; iter < 200 && hi - lo > width; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (layers_diverge(generators, mid, x, max_word_len))
      lo = mid;
    else
      hi = mid;
  }
  DeltaInterval out;
  out.delta_lo = lo;
  out.delta_hi = hi;
  out.word_len = max_word_len;
  return out;
}

// ---- covering dichotomy ---------------------------------------------------

json GefinPrediction::to_json() const {
  json j;
  j["relation"] = relation;
  j["case"] = case_id;
  j["note"] = note;
  return j;
}

GefinPrediction gefin_predict(double lambda0_m0, const HyperbolicSpace& H,
                              const std::string& amenability_status) {
  const double scale = std::max(1.0, H.lambda0);
  if (lambda0_m0 < -1e-9 * scale)
    throw SchemaError("bottom of the spectrum cannot be negative here");
  if (lambda0_m0 > H.lambda0 + 1e-9 * scale)
    throw SpeclabError("bottom of the spectrum exceeds the model-space value: not a quotient");

  GefinPrediction out;
  if (std::abs(lambda0_m0 - H.lambda0) <= 1e-9 * scale) {
    out.relation = "equal-by-case-2";
    out.case_id = 2;
    out.note = "base already sits at the model-space bottom; every cover inherits it";
    return out;
  }
  out.case_id = 1;
  if (amenability_status == "CertifiedAmenable") {
    out.relation = "equal";
    out.note = "amenable covering preserves the bottom of the spectrum";
  } else if (amenability_status == "EvidenceNonamenable") {
    out.relation = "strict";
    out.note = "nonamenable covering should raise the bottom strictly";
  } else if (amenability_status == "Inconclusive") {
    out.relation = "no-prediction";
    out.note = "amenability undetermined: the dichotomy picks no side";
  } else {
    throw SchemaError("unknown amenability status \"" + amenability_status + "\"");
  }
  return out;
}

// ---- surface of revolution ------------------------------------------------

namespace {

double profile_weight(double alpha, double x) { return std::exp(-std::pow(x, alpha)); }

// Composite Simpson over [1, L] with n (even) intervals.
double simpson_weight(double alpha, double L, int n) {
  const double h = (L - 1.0) / n;
  double acc = profile_weight(alpha, 1.0) + profile_weight(alpha, L);
  for (int i = 1; i < n; ++i)
    acc += profile_weight(alpha, 1.0 + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

}  // namespace

json SalphaReport::to_json() const {
  json j;
  j["volume"] = volume;
  j["tail_bound"] = tail_bound;
  j["lambda0"] = lambda0;
  j["tail"] = json::array();
  for (const auto& entry : tail) {
    json e;
    e["R"] = entry.R;
    e["windows"] = json::array();
    for (const auto& [end, value] : entry.windows)
      e["windows"].push_back(json{{"window_end", end}, {"value", value}});
    e["value"] = entry.value;
    j["tail"].push_back(std::move(e));
  }
  return j;
}

SalphaReport salpha_solver(const RevolutionSurface& surface,
                           const std::vector<double>& R_schedule) {
  const double alpha = surface.alpha;
  const double L = surface.L;
  if (!(alpha > 0.0 && alpha < 1.0)) throw SchemaError("alpha must lie in (0, 1)");
  if (!(L > 1.0)) throw SchemaError("truncation length must exceed 1");
  if (surface.N < 2) throw SchemaError("need at least 2 grid intervals");
  const int N = surface.N + (surface.N % 2);  // Simpson needs an even count
  const double h = (L - 1.0) / N;

  SalphaReport out;
  out.volume = 2.0 * M_PI * simpson_weight(alpha, L, N);
  // For x >= L concavity of x^alpha gives x^alpha >= x L^{alpha-1}, so the
  // dropped tail integral is below L^{1-alpha} e^{-L^alpha}.
  out.tail_bound = 2.0 * M_PI * std::pow(L, 1.0 - alpha) * std::exp(-std::pow(L, alpha));

  // Radial grid: x_i = 1 + i h; conductance across each cell w(mid)/h, vertex
  // weight w(x_i) h (half cells at the two ends), no potential.
  std::vector<EdgeRec> edges;
  edges.reserve(N);
  std::vector<double> measure(N + 1), potential(N + 1, 0.0);
  for (int i = 0; i < N; ++i)
    edges.push_back({i, i + 1, profile_weight(alpha, 1.0 + (i + 0.5) * h) / h});
  for (int i = 0; i <= N; ++i) {
    const double cell = (i == 0 || i == N) ? 0.5 * h : h;
    measure[i] = profile_weight(alpha, 1.0 + i * h) * cell;
  }
  const WeightedGraph line(N + 1, std::move(edges), std::move(measure), std::move(potential));

  // The form has no potential, so it is non-negative, and the constant
  // function makes it vanish: the Neumann bottom is exactly 0.  The banded
  // solve only cross-checks that within its certified bracket.
  const SymmetricSystem whole = assemble_system(line);
  const auto neumann = banded_smallest(whole, 1e-12);
  if (!neumann) throw SpeclabError("radial system unexpectedly not banded");
  if (std::abs(neumann->value) > 1e-6)
    throw SpeclabError("numerical Neumann bottom strayed from the exact value 0");
  out.lambda0 = 0.0;

  for (double R : R_schedule) {
    if (!(R > 1.0)) throw SchemaError("tail radii must exceed 1");
    const int iR = static_cast<int>(std::lround((R - 1.0) / h));
    SalphaTailEntry entry;
    entry.R = 1.0 + iR * h;
    for (double frac : {0.25, 0.5, 1.0}) {
      const double window_end = R + (L - R) * frac;
      const int iW = std::min(N, static_cast<int>(std::lround((window_end - 1.0) / h)));
      if (iW - iR < 2)
        throw SpeclabError("truncation length too small for the requested tail radius " +
                           std::to_string(R));
      std::vector<int> region;
      region.reserve(iW - iR - 1);
      for (int i = iR + 1; i < iW; ++i) region.push_back(i);
      const auto solved = banded_smallest(assemble_system(line, &region), 1e-12);
      if (!solved) throw SpeclabError("radial window unexpectedly not banded");
      entry.windows.emplace_back(1.0 + iW * h, solved->value);
    }
    entry.value = entry.windows.back().second;
    out.tail.push_back(std::move(entry));
  }
  return out;
}

}  // namespace speclab

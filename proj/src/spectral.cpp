#include "speclab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace speclab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

json SpectralEstimate::to_json() const {
  json j;
  j["value"] = encode_real(value);
  j["lower_bound"] = lower_bound ? encode_real(*lower_bound) : json(nullptr);
  j["upper_bound"] = upper_bound ? encode_real(*upper_bound) : json(nullptr);
  j["method"] = method;
  json h = json::array();
  for (const auto& [r, v] : history) h.push_back(json::array({r, encode_real(v)}));
  j["history"] = h;
  j["converged"] = converged;
  j["window_flag"] = window_flag;
  return j;
}

json StabilityReport::to_json() const {
  json j;
  j["before"] = before.to_json();
  j["after"] = after.to_json();
  j["difference"] = encode_real(difference);
  j["threshold"] = threshold;
  j["pass"] = pass;
  return j;
}

std::pair<double, double> spectral_bracket(const WeightedGraph& g) {
  double vmin = 0, vmax = 0, deg = 0;
  for (int x = 0; x < g.size(); ++x) {
    const double V = g.potential(x);
    if (x == 0 || V < vmin) vmin = V;
    if (x == 0 || V > vmax) vmax = V;
    deg = std::max(deg, g.conductance_at(x) / g.measure(x));
  }
  return {vmin, vmax + 2 * deg};
}

namespace {

SpectralEstimate from_result(const IterativeResult& r, const std::string& tag) {
  SpectralEstimate e;
  e.value = r.value;
  e.lower_bound = r.lower_bound;
  e.upper_bound = r.upper_bound;
  e.method = tag;
  e.converged = r.converged;
  return e;
}

SpectralEstimate solve_system(const SymmetricSystem& sys, const SolveOptions& opts,
                              const std::string& tag_small, const std::string& tag_large) {
  auto r = smallest_eigenvalue(sys, opts);
  if (!r.converged) throw SpeclabError("eigenvalue solve did not converge within budget");
  return from_result(r, r.method == "dense" ? tag_small : tag_large);
}

}  // namespace

SpectralEstimate lambda0_finite(const WeightedGraph& g, const std::vector<int>* region,
                                const SolveOptions& opts) {
  if (region && region->empty()) throw SpeclabError("empty region in Dirichlet problem");
  auto sys = assemble_system(g, region);
  auto e = solve_system(sys, opts, region ? "dirichlet" : "dense",
                        region ? "dirichlet" : "iterative");
  // The a-priori bracket holds for the unrestricted problem; the Dirichlet
  // value can only be larger, so the lower end stays valid there too.
  auto [blo, bhi] = spectral_bracket(g);
  if (e.lower_bound && *e.lower_bound < blo) e.lower_bound = blo;
  if (!region && e.upper_bound && *e.upper_bound > bhi) e.upper_bound = bhi;
  return e;
}

SpectralEstimate lambda0_truncation(const Truncation& t, const SolveOptions& opts) {
  if (t.graph.size() == 0) throw SpeclabError("empty truncation");
  auto sys = assemble_system(t.graph, nullptr, &t.dirichlet_mass);
  return solve_system(sys, opts, "dirichlet", "dirichlet");
}

double radial_dirichlet_value(const RadialProfile& p, std::int64_t a, std::int64_t b,
                              bool outer_wall) {
  if (b < a) throw SpeclabError("empty radial level range");
  const std::int64_t L = b - a + 1;
  std::vector<double> diag(L), off(L > 1 ? L - 1 : 0);
  // All matrix entries are built from level ratios e(k)/n(k), which stay O(1)
  // even when the raw level counts overflow toward 1e300.
  for (std::int64_t k = a; k <= b; ++k) {
    const double n_k = p.level_count(k);
    double coupling = 0;
    // Inward edges keep their diagonal mass whether the level below is inside
    // the range (coupled) or cut off (Dirichlet wall); same for the outer end.
    if (k > 0) coupling += p.level_edges(k - 1) / n_k;
    if (k < b || outer_wall) coupling += p.level_edges(k) / n_k;
    diag[k - a] = p.c / p.m * coupling + p.V;
    if (k < b) {
      const double r_up = p.level_edges(k) / n_k;
      const double r_down = p.level_edges(k) / p.level_count(k + 1);
      off[k - a] = -p.c / p.m * std::sqrt(r_up * r_down);
    }
  }
  return tridiagonal_smallest(diag, off);
}

SpectralEstimate lambda0_exhaustion(const LazyGraph& g, const ExhaustionOptions& opts) {
  if (opts.schedule.empty()) throw SpeclabError("empty exhaustion schedule");
  SpectralEstimate e;
  e.method = "exhaustion";
  const auto profile = opts.use_radial ? g.radial_profile() : std::nullopt;
  bool finished = false;
  for (std::size_t i = 0; i < opts.schedule.size() && !finished; ++i) {
    const std::int64_t r = opts.schedule[i];
    if (i > 0 && r <= opts.schedule[i - 1]) throw SpeclabError("schedule must increase");
    double v;
    if (profile) {
      v = radial_dirichlet_value(*profile, 0, r, true);
    } else {
      auto t = truncate_ball(g, {g.origin()}, static_cast<int>(r), opts.vertex_budget);
      v = lambda0_truncation(t, opts.solve).value;
      if (t.exhausted) finished = true;  // whole component reached: value exact
    }
    e.history.emplace_back(r, v);
  }
  e.value = e.history.back().second;
  e.upper_bound = e.value;  // Dirichlet values bound the limit from above
  e.converged = true;
  return e;
}

namespace {

// Dirichlet value of (complement of B(o, removed)) seen through a window of
// radius `window`; +infinity when the complement is empty and the graph is
// exhausted.  `exact` reports that no window wall was involved.
double complement_value(const LazyGraph& g, const std::optional<RadialProfile>& profile,
                        std::int64_t removed, std::int64_t window, const SolveOptions& solve,
                        std::size_t budget, bool* exact) {
  if (exact) *exact = false;
  if (profile) {
    return radial_dirichlet_value(*profile, removed + 1, window, true);
  }
  auto t = truncate_ball(g, {g.origin()}, static_cast<int>(window), budget);
  std::vector<int> region;
  for (int i = 0; i < t.graph.size(); ++i)
    if (t.distance[i] > removed) region.push_back(i);
  if (region.empty()) {
    if (t.exhausted) return kInf;
    throw SpeclabError("window does not exceed the removed radius");
  }
  if (exact) *exact = t.exhausted;
  auto sys = assemble_system(t.graph, &region, &t.dirichlet_mass);
  auto r = smallest_eigenvalue(sys, solve);
  if (!r.converged) throw SpeclabError("eigenvalue solve did not converge within budget");
  return r.value;
}

}  // namespace

SpectralEstimate lambda_ess_estimate(const LazyGraph& g, const EssOptions& opts) {
  if (opts.schedule.empty()) throw SpeclabError("empty removal schedule");
  SpectralEstimate e;
  e.method = "exhaustion";
  const auto profile = opts.use_radial ? g.radial_profile() : std::nullopt;

  // Pass 1: find, per removed radius, a window at which the value is stable
  // under doubling.  An unstable first doubling sets the flag; failing to
  // stabilize within the doubling budget clears `converged`.
  std::int64_t grand_window = 0;
  for (std::size_t i = 0; i < opts.schedule.size(); ++i) {
    const std::int64_t r = opts.schedule[i];
    if (r < 0 || (i > 0 && r <= opts.schedule[i - 1]))
      throw SpeclabError("schedule must be non-negative and increasing");
    std::int64_t w = std::max<std::int64_t>(
        static_cast<std::int64_t>(std::ceil(opts.window_factor * static_cast<double>(r))),
        r + 4);
    bool exact = false;
    double prev = complement_value(g, profile, r, w, opts.solve, opts.vertex_budget, &exact);
    if (std::isinf(prev) || exact) {
      grand_window = std::max(grand_window, w);
      continue;
    }
    bool stable = false;
    for (int d = 0; d < opts.max_doublings; ++d) {
      const std::int64_t w2 = 2 * w;
      const double next =
          complement_value(g, profile, r, w2, opts.solve, opts.vertex_budget, &exact);
      const bool settled = exact || std::abs(next - prev) <= opts.window_change_tol;
      if (d == 0 && !settled) e.window_flag = true;
      w = w2;
      prev = next;
      if (settled) {
        stable = true;
        break;
      }
    }
    if (!stable) e.converged = false;
    grand_window = std::max(grand_window, w);
  }

  // Pass 2: recompute every entry at the single largest window.  Within one
  // fixed window the regions are nested, so the history is exactly monotone
  // (non-decreasing) in the removed radius.
  for (const std::int64_t r : opts.schedule) {
    const double v =
        complement_value(g, profile, r, std::max(grand_window, r + 4), opts.solve,
                         opts.vertex_budget, nullptr);
    e.history.emplace_back(r, v);
  }
  double sup = -kInf;
  for (const auto& [r, v] : e.history) sup = std::max(sup, v);
  e.value = sup;
  return e;
}

StabilityReport stability_check(std::shared_ptr<const LazyGraph> base, const GraphEdits& edits,
                                const EssOptions& opts, const Tolerances& tol) {
  if (edits.empty()) throw SpeclabError("stability check needs a non-empty edit set");
  StabilityReport rep;
  rep.before = lambda_ess_estimate(*base, opts);
  EditedGraph edited(base, edits.potential, edits.conductance, edits.deleted);
  // Edits break radial symmetry; the estimate must not use the profile.
  EssOptions after_opts = opts;
  after_opts.use_radial = false;
  rep.after = lambda_ess_estimate(edited, after_opts);
  const bool both_inf = std::isinf(rep.before.value) && std::isinf(rep.after.value);
  rep.difference = both_inf ? 0.0 : rep.after.value - rep.before.value;
  rep.threshold = 2 * tol.ess_estimate;
  rep.pass = std::abs(rep.difference) <= rep.threshold;
  return rep;
}

}  // namespace speclab

#include "speclab/isoperimetry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <queue>
#include <set>
#include <stdexcept>
#include <unordered_map>

namespace speclab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> ones(int n) { return std::vector<double>(n, 1.0); }

void check_phi(const WeightedGraph& g, const std::vector<double>& phi) {
  if (static_cast<int>(phi.size()) != g.size())
    throw SpeclabError("weight function has wrong length");
  for (double v : phi)
    if (!(v > 0.0)) throw SpeclabError("weight function must be strictly positive");
}

// Graph with edge weights c*phi(x)*phi(y), volumes m*phi^2 and zero potential:
// the cut quantities of (g, phi) are the plain cut quantities of this graph.
WeightedGraph reweighted(const WeightedGraph& g, const std::vector<double>& phi) {
  std::vector<EdgeRec> es = g.edges();
  for (auto& e : es) e.c *= phi[e.u] * phi[e.v];
  std::vector<double> m(g.size()), V(g.size(), 0.0);
  for (int i = 0; i < g.size(); ++i) m[i] = g.measure(i) * phi[i] * phi[i];
  return WeightedGraph(g.size(), std::move(es), std::move(m), std::move(V));
}

// Second eigenvector of the weight-only form (potential ignored); the level
// sets of this vector are the sweep candidates.
std::vector<double> sweep_order_vector(const WeightedGraph& g, const SolveOptions& solve) {
  WeightedGraph flat(g.size(), g.edges(), g.measures(), std::vector<double>(g.size(), 0.0));
  SymmetricSystem sys = assemble_system(flat);
  if (g.size() <= std::max(solve.dense_limit, 2000)) {
    DenseSpectrum sp = dense_spectrum(sys);
    return sp.vectors.at(1);
  }
  std::vector<std::vector<double>> defl{ones(g.size())};
  IterativeResult r = lobpcg_smallest(sys, solve.tol, solve.max_iterations, solve.seed, &defl);
  return r.vector_f;
}

struct CutAccumulator {
  const WeightedGraph* g = nullptr;
  std::vector<char> in;
  double boundary = 0.0, volume = 0.0;

  explicit CutAccumulator(const WeightedGraph& graph)
      : g(&graph), in(static_cast<std::size_t>(graph.size()), 0) {}

  void toggle(int v) {
    const bool entering = !in[v];
    in[v] = entering ? 1 : 0;
    volume += (entering ? 1.0 : -1.0) * g->measure(v);
    for (const auto& [u, c] : g->adjacency()[v]) {
      // Edges to inside neighbors change role; edges to outside ones too.
      const bool u_in = in[u] != 0;
      if (entering)
        boundary += u_in ? -c : c;
      else
        boundary += u_in ? c : -c;
    }
  }

  std::vector<int> subset() const {
    std::vector<int> s;
    for (int i = 0; i < g->size(); ++i)
      if (in[i]) s.push_back(i);
    return s;
  }
};

struct BestCut {
  double ratio = kInf;
  double boundary = 0.0, volume = 0.0;
  std::vector<int> subset;

  // Keeps the smaller ratio; on a (relative) tie, the lexicographically
  // smallest subset, so reruns and platform changes cannot flip the answer.
  void offer(double r, double b, double v, const std::function<std::vector<int>()>& make) {
    if (!std::isfinite(ratio)) {
      ratio = r;
      boundary = b;
      volume = v;
      subset = make();
      return;
    }
    const double tol = 1e-12 * std::max(1.0, std::abs(ratio));
    if (r < ratio - tol) {
      ratio = r;
      boundary = b;
      volume = v;
      subset = make();
    } else if (r <= ratio + tol) {
      std::vector<int> cand = make();
      if (cand < subset) {
        ratio = r;
        boundary = b;
        volume = v;
        subset = std::move(cand);
      }
    }
  }
};

CutReport component_witness(const WeightedGraph& g) {
  const std::vector<int> comp = g.component_of();
  const int k = g.component_count();
  std::vector<double> vol(static_cast<std::size_t>(k), 0.0);
  for (int i = 0; i < g.size(); ++i) vol[comp[i]] += g.measure(i);
  int best = 0;
  for (int c = 1; c < k; ++c)
    if (vol[c] < vol[best] - 1e-15 * vol[best]) best = c;
  CutReport rep;
  for (int i = 0; i < g.size(); ++i)
    if (comp[i] == best) rep.subset.push_back(i);
  rep.boundary_mass = 0.0;
  rep.volume = vol[best];
  rep.ratio = 0.0;
  rep.mode = "component";
  return rep;
}

}  // namespace

json CutReport::to_json() const {
  json j;
  j["subset"] = subset;
  j["boundary"] = boundary_mass;
  j["volume"] = volume;
  j["ratio"] = ratio;
  j["mode"] = mode;
  return j;
}

CutReport cut_ratio(const WeightedGraph& g, const std::vector<int>& subset,
                    const std::vector<double>* phi) {
  const std::vector<double> w = phi ? *phi : ones(g.size());
  check_phi(g, w);
  if (subset.empty()) throw SpeclabError("cut subset must be nonempty");
  std::vector<char> in(static_cast<std::size_t>(g.size()), 0);
  for (int v : subset) {
    if (v < 0 || v >= g.size()) throw SpeclabError("cut subset vertex out of range");
    in[v] = 1;
  }
  CutReport rep;
  rep.subset = subset;
  std::sort(rep.subset.begin(), rep.subset.end());
  rep.subset.erase(std::unique(rep.subset.begin(), rep.subset.end()), rep.subset.end());
  for (int v : rep.subset) rep.volume += g.measure(v) * w[v] * w[v];
  for (const auto& e : g.edges())
    if (e.u != e.v && (in[e.u] != in[e.v])) rep.boundary_mass += e.c * w[e.u] * w[e.v];
  rep.ratio = rep.boundary_mass / rep.volume;
  return rep;
}

CutReport cheeger_constant(const WeightedGraph& g, const std::vector<double>* phi,
                           const std::string& mode, const SolveOptions& solve) {
  if (g.size() < 2) throw SpeclabError("cheeger_constant needs at least two vertices");
  const bool weighted = phi != nullptr;
  if (weighted) check_phi(g, *phi);
  const WeightedGraph work = weighted ? reweighted(g, *phi)
                                      : WeightedGraph(g.size(), g.edges(), g.measures(),
                                                      std::vector<double>(g.size(), 0.0));

  if (!work.connected()) return component_witness(work);

  std::string m = mode;
  if (m == "auto") m = work.size() <= 22 ? "exact" : "sweep";
  const double total = work.total_measure();
  const double half = total / 2.0 * (1.0 + 1e-12);
  BestCut best;

  if (m == "exact") {
    if (work.size() > 22) throw SpeclabError("exact cut enumeration limited to 22 vertices");
    const int n = work.size();
    CutAccumulator acc(work);
    const std::uint32_t count = 1u << n;
    // Gray-code walk: one vertex toggles per step, so boundary and volume
    // update in O(degree).
    for (std::uint32_t k = 1; k < count; ++k) {
      int bit = 0;
      while (((k >> bit) & 1u) == 0) ++bit;
      acc.toggle(bit);
      if (acc.volume <= 0.0 || acc.volume > half) continue;
      if (acc.volume >= total * (1.0 - 1e-12)) continue;  // not a proper subset
      best.offer(acc.boundary / acc.volume, acc.boundary, acc.volume,
                 [&acc] { return acc.subset(); });
    }
  } else if (m == "sweep") {
    const std::vector<double> f = sweep_order_vector(work, solve);
    std::vector<int> order(static_cast<std::size_t>(work.size()));
    for (int i = 0; i < work.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&f](int a, int b) {
      if (f[a] != f[b]) return f[a] < f[b];
      return a < b;
    });
    CutAccumulator acc(work);
    for (int k = 0; k + 1 < work.size(); ++k) {
      acc.toggle(order[k]);
      const bool use_prefix = acc.volume <= half;
      const double vol = use_prefix ? acc.volume : total - acc.volume;
      if (vol <= 0.0) continue;
      best.offer(acc.boundary / vol, acc.boundary, vol, [&acc, use_prefix] {
        std::vector<int> s = acc.subset();
        if (use_prefix) return s;
        std::vector<int> comp;
        std::size_t p = 0;
        for (int i = 0; i < acc.g->size(); ++i) {
          if (p < s.size() && s[p] == i)
            ++p;
          else
            comp.push_back(i);
        }
        return comp;
      });
    }
  } else {
    throw SpeclabError("unknown cut search mode: " + m);
  }

  if (!std::isfinite(best.ratio)) throw SpeclabError("cut search found no admissible subset");
  CutReport rep;
  rep.subset = std::move(best.subset);
  rep.boundary_mass = best.boundary;
  rep.volume = best.volume;
  rep.ratio = best.ratio;
  rep.mode = m;
  return rep;
}

json AsymptoticCheegerEstimate::to_json() const {
  json j;
  j["history"] = json::array();
  for (const auto& [r, v] : history) {
    json row;
    row["radius"] = r;
    row["estimate"] = encode_real(v);
    j["history"].push_back(row);
  }
  j["value"] = encode_real(value);
  return j;
}

AsymptoticCheegerEstimate asymptotic_cheeger(const LazyGraph& g,
                                             const AsymptoticCheegerOptions& opts) {
  if (opts.schedule.empty()) throw SpeclabError("asymptotic_cheeger needs a radius schedule");
  for (std::size_t i = 1; i < opts.schedule.size(); ++i)
    if (opts.schedule[i] <= opts.schedule[i - 1])
      throw SpeclabError("radius schedule must be strictly increasing");

  AsymptoticCheegerEstimate out;
  for (const std::int64_t r : opts.schedule) {
    const std::int64_t w = std::max<std::int64_t>(
        static_cast<std::int64_t>(std::ceil(opts.window_factor * static_cast<double>(r))), r + 4);
    Truncation t = truncate_ball(g, {g.origin()}, static_cast<int>(w), opts.vertex_budget);
    std::vector<int> region;
    for (int i = 0; i < t.graph.size(); ++i)
      if (t.distance[i] > r) region.push_back(i);
    if (region.empty()) {
      // The removed ball swallowed the whole (finite) graph: the infimum over
      // finite subsets of the complement is over an empty family.
      out.history.emplace_back(r, kInf);
      continue;
    }

    // Exact boundary mass of any subset of the region: edges inside the
    // truncation plus the recorded mass of edges leaving it.
    const int n = t.graph.size();
    std::vector<char> in_region(static_cast<std::size_t>(n), 0);
    for (int v : region) in_region[v] = 1;

    // Ground state of the Dirichlet problem on the region (weights only).
    WeightedGraph flat(n, t.graph.edges(), t.graph.measures(),
                       std::vector<double>(static_cast<std::size_t>(n), 0.0));
    SymmetricSystem sys = assemble_system(flat, &region, &t.dirichlet_mass);
    IterativeResult ground = smallest_eigenvalue(sys, opts.solve);
    std::vector<double> f = ground.vector_f;  // indexed by position in `region`

    // Orient each component so its ground state is nonnegative.
    {
      WeightedGraph sub = t.graph.induced_subgraph(region);
      const std::vector<int> comp = sub.component_of();
      const int k = *std::max_element(comp.begin(), comp.end()) + 1;
      std::vector<double> extreme(static_cast<std::size_t>(k), 0.0);
      for (std::size_t i = 0; i < f.size(); ++i)
        if (std::abs(f[i]) > std::abs(extreme[comp[i]])) extreme[comp[i]] = f[i];
      for (std::size_t i = 0; i < f.size(); ++i)
        if (extreme[comp[i]] < 0) f[i] = -f[i];
    }

    const auto evaluate_order = [&](const std::vector<int>& order,
                                    const std::vector<int>* eval_at) -> double {
      // order: region positions; sweep prefixes, boundary updated per vertex.
      std::vector<char> in(static_cast<std::size_t>(n), 0);
      double bnd = 0.0, vol = 0.0, bestr = kInf;
      std::size_t next_eval = 0;
      for (std::size_t k2 = 0; k2 < order.size(); ++k2) {
        const int v = region[order[k2]];
        in[v] = 1;
        vol += t.graph.measure(v);
        bnd += t.dirichlet_mass[v];
        for (const auto& [u, c] : t.graph.adjacency()[v]) bnd += in[u] ? -c : c;
        if (eval_at) {
          if (next_eval >= eval_at->size() || static_cast<int>(k2) != (*eval_at)[next_eval])
            continue;
          ++next_eval;
        }
        if (vol > 0.0) bestr = std::min(bestr, bnd / vol);
      }
      return bestr;
    };

    // Family 1: superlevel sets of the ground state.
    std::vector<int> by_f(region.size());
    for (std::size_t i = 0; i < region.size(); ++i) by_f[i] = static_cast<int>(i);
    std::sort(by_f.begin(), by_f.end(), [&](int a, int b) {
      if (f[a] != f[b]) return f[a] > f[b];
      return region[a] < region[b];
    });
    double est = evaluate_order(by_f, nullptr);

    // Family 2: distance annuli (r, j], evaluated at full levels only.
    std::vector<int> by_d(region.size());
    for (std::size_t i = 0; i < region.size(); ++i) by_d[i] = static_cast<int>(i);
    std::sort(by_d.begin(), by_d.end(), [&](int a, int b) {
      if (t.distance[region[a]] != t.distance[region[b]])
        return t.distance[region[a]] < t.distance[region[b]];
      return region[a] < region[b];
    });
    std::vector<int> level_ends;
    for (std::size_t i = 0; i < by_d.size(); ++i)
      if (i + 1 == by_d.size() ||
          t.distance[region[by_d[i + 1]]] != t.distance[region[by_d[i]]])
        level_ends.push_back(static_cast<int>(i));
    est = std::min(est, evaluate_order(by_d, &level_ends));

    out.history.emplace_back(r, est);
  }
  out.value = out.history.back().second;
  return out;
}

std::pair<double, double> neighborhood_growth(const LazyGraph& g, const std::vector<Vid>& A,
                                              int r, const std::function<double(Vid)>& phi) {
  if (A.empty()) throw SpeclabError("neighborhood_growth needs a nonempty set");
  if (r < 0) throw SpeclabError("neighborhood radius must be nonnegative");
  const auto weight = [&](Vid v) {
    const double p = phi ? phi(v) : 1.0;
    return g.measure(v) * p * p;
  };
  std::unordered_map<Vid, int> dist;
  std::queue<Vid> q;
  double vol_a = 0.0, vol_ring = 0.0;
  for (Vid v : A)
    if (dist.emplace(v, 0).second) {
      q.push(v);
      vol_a += weight(v);
    }
  while (!q.empty()) {
    const Vid v = q.front();
    q.pop();
    const int d = dist[v];
    if (d >= r) continue;
    for (const auto& [u, c] : g.neighbors(v)) {
      (void)c;
      if (dist.emplace(u, d + 1).second) {
        q.push(u);
        vol_ring += weight(u);
      }
    }
  }
  return {vol_ring, vol_a};
}

json BuserResult::to_json() const {
  json j;
  j["found"] = found;
  if (found) {
    j["subset_size"] = subset.size();
    j["growth"] = growth;
    j["volume"] = volume;
    j["ratio"] = ratio;
    j["family"] = family;
  }
  return j;
}

BuserResult buser_set_search(const LazyGraph& g, const BuserOptions& opts) {
  if (!(opts.epsilon > 0.0)) throw SpeclabError("epsilon must be positive");
  if (opts.r < 1) throw SpeclabError("neighborhood radius must be at least 1");
  BuserResult res;

  const auto accept = [&](std::vector<Vid> A, const std::string& family) {
    auto [ring, vol] = neighborhood_growth(g, A, opts.r);
    if (ring < opts.epsilon * vol) {
      res.found = true;
      res.subset = std::move(A);
      res.growth = ring;
      res.volume = vol;
      res.ratio = ring / vol;
      res.family = family;
      return true;
    }
    return false;
  };

  // BFS from the origin once, to the largest depth any ball candidate needs.
  std::unordered_map<Vid, int> dist;
  std::vector<Vid> order;  // BFS order
  std::vector<std::size_t> level_end;
  {
    std::queue<Vid> q;
    dist.emplace(g.origin(), 0);
    q.push(g.origin());
    order.push_back(g.origin());
    int cur_level = 0;
    bool truncated = false;
    std::size_t head = 0;
    while (head < order.size()) {
      const Vid v = order[head++];
      const int d = dist[v];
      if (d > cur_level) {
        level_end.push_back(head - 1);
        cur_level = d;
      }
      if (d >= opts.max_radius + opts.r) continue;
      for (const auto& [u, c] : g.neighbors(v)) {
        (void)c;
        if (order.size() >= opts.vertex_budget) {
          truncated = true;
          break;
        }
        if (dist.emplace(u, d + 1).second) order.push_back(u);
      }
      if (truncated) break;
    }
    if (!truncated) {
      level_end.push_back(order.size());
      // Frontier emptied within the depth cap: if the last explored depth is
      // below the cap, the whole component was enumerated.
      int max_d = 0;
      for (Vid v : order) max_d = std::max(max_d, dist[v]);
      if (max_d < opts.max_radius + opts.r && !order.empty()) {
        std::vector<Vid> all = order;
        if (accept(std::move(all), "whole-graph")) return res;
      }
    } else if (!level_end.empty()) {
      level_end.pop_back();  // last recorded level may be incomplete
    }
  }

  // Ball candidates B(origin, k); the BFS above is complete through each
  // recorded level, and evaluation re-runs an exact neighborhood BFS.
  std::vector<double> level_vol;
  {
    double acc = 0.0;
    std::size_t prev = 0;
    for (std::size_t e : level_end) {
      for (std::size_t i = prev; i < e; ++i) acc += g.measure(order[i]);
      prev = e;
      level_vol.push_back(acc);
    }
  }
  for (std::size_t k = 0; k + opts.r < level_vol.size() && static_cast<int>(k) <= opts.max_radius;
       ++k) {
    // Quick filter from the precomputed volumes (unit phi), then exact check.
    const double vol = level_vol[k];
    const double ring = level_vol[k + opts.r] - vol;
    if (ring >= opts.epsilon * vol) continue;
    std::vector<Vid> ball(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(level_end[k]));
    if (accept(std::move(ball), "ball")) return res;
  }

  // Sweep prefixes of the Dirichlet ground state on a budgeted ball.
  {
    int radius = 1;
    Truncation t = truncate_ball(g, {g.origin()}, radius, opts.vertex_budget);
    while (!t.exhausted) {
      Truncation bigger;
      try {
        bigger = truncate_ball(g, {g.origin()}, radius + 1, opts.vertex_budget);
      } catch (const SpeclabError&) {
        break;
      }
      t = std::move(bigger);
      ++radius;
      if (radius > 4 * opts.max_radius) break;
    }
    const int n = t.graph.size();
    if (n >= 2) {
      WeightedGraph flat(n, t.graph.edges(), t.graph.measures(),
                         std::vector<double>(static_cast<std::size_t>(n), 0.0));
      SymmetricSystem sys = assemble_system(flat, nullptr, &t.dirichlet_mass);
      IterativeResult ground = smallest_eigenvalue(sys, opts.solve);
      std::vector<double> f = ground.vector_f;
      double fmax = 0.0;
      for (double x : f)
        if (std::abs(x) > std::abs(fmax)) fmax = x;
      if (fmax < 0)
        for (double& x : f) x = -x;
      std::vector<int> by_f(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) by_f[i] = i;
      std::sort(by_f.begin(), by_f.end(), [&f](int a, int b) {
        if (f[a] != f[b]) return f[a] > f[b];
        return a < b;
      });
      const int checks = std::max(1, std::min(opts.sweep_prefixes, n - 1));
      std::set<int> sizes;
      for (int i = 1; i <= checks; ++i)
        sizes.insert(std::max(1, static_cast<int>(static_cast<std::int64_t>(n) * i / checks) - 1));
      for (int sz : sizes) {
        std::vector<Vid> A;
        A.reserve(static_cast<std::size_t>(sz));
        for (int i = 0; i < sz; ++i) A.push_back(t.ids[by_f[i]]);
        if (accept(std::move(A), "sweep-prefix")) return res;
      }
    }
  }

  return res;
}

json CheegerBoundReport::to_json() const {
  json j;
  j["lambda_gap"] = lambda_gap;
  j["h"] = h;
  j["D"] = D;
  j["bound"] = bound;
  j["residual"] = residual;
  j["h_mode"] = h_mode;
  j["pass"] = pass;
  return j;
}

CheegerBoundReport cheeger_inequality_check(const WeightedGraph& g,
                                            const std::vector<double>* phi, double lambda,
                                            const SolveOptions& solve, const Tolerances& tol) {
  if (g.size() < 2) throw SpeclabError("cheeger_inequality_check needs at least two vertices");
  const std::vector<double> w = phi ? *phi : ones(g.size());
  check_phi(g, w);

  CheegerBoundReport rep;
  // phi must be a lambda-eigenfunction: the reweighting removes the potential
  // exactly, and the spectrum shifts by lambda.
  const std::vector<double> Hphi = apply_operator(g, w);
  double scale = std::max(1.0, std::abs(lambda));
  for (int i = 0; i < g.size(); ++i) {
    rep.residual = std::max(rep.residual, std::abs(Hphi[i] - lambda * w[i]));
    scale = std::max(scale, std::abs(Hphi[i]));
  }
  if (rep.residual > tol.eig_agree * scale)
    throw SpeclabError("weight function is not an eigenfunction for the given value");

  const WeightedGraph t = reweighted(g, w);
  for (int x = 0; x < g.size(); ++x) {
    double s = 0.0;
    for (const auto& [y, c] : g.adjacency()[x]) s += c * w[y];
    rep.D = std::max(rep.D, s / (g.measure(x) * w[x]));
  }

  // Second eigenvalue of the reweighted (potential-free) problem.
  SymmetricSystem sys = assemble_system(t);
  if (t.size() <= std::max(solve.dense_limit, 2000)) {
    rep.lambda_gap = dense_spectrum(sys).values.at(1);
  } else {
    std::vector<std::vector<double>> defl{ones(t.size())};
    rep.lambda_gap =
        lobpcg_smallest(sys, solve.tol, solve.max_iterations, solve.seed, &defl).value;
  }

  CutReport cut = cheeger_constant(t, nullptr, t.size() <= 22 ? "exact" : "sweep", solve);
  rep.h = cut.ratio;
  rep.h_mode = cut.mode;
  rep.bound = rep.h * rep.h / (2.0 * rep.D);
  rep.pass = rep.lambda_gap >= rep.bound - 1e-12 * std::max(1.0, rep.bound);
  return rep;
}

json TreeExpansionCertificate::to_json() const {
  json j;
  j["applies"] = applies;
  j["h_lower"] = h_lower;
  j["lambda_lower"] = lambda_lower;
  j["D"] = D;
  j["reason"] = reason;
  return j;
}

TreeExpansionCertificate universal_cover_expansion(const WeightedGraph& base) {
  TreeExpansionCertificate cert;
  const int n = base.size();
  if (n == 0) {
    cert.reason = "empty base graph";
    return cert;
  }
  if (!base.connected()) {
    cert.reason = "base graph is not connected";
    return cert;
  }

  // Uniform conductance and measure, so ratios in the cover scale by c/m.
  double c0 = base.edges().empty() ? 0.0 : base.edges().front().c;
  for (const auto& e : base.edges())
    if (std::abs(e.c - c0) > 1e-12 * std::max(1.0, std::abs(c0))) {
      cert.reason = "conductances are not uniform";
      return cert;
    }
  const double m0 = base.measure(0);
  for (int i = 0; i < n; ++i)
    if (std::abs(base.measure(i) - m0) > 1e-12 * m0) {
      cert.reason = "measures are not uniform";
      return cert;
    }
  if (base.edges().empty()) {
    cert.reason = "base graph has no edges";
    return cert;
  }

  // Cover degrees equal base degrees with loops counted twice.
  std::vector<int> deg(static_cast<std::size_t>(n), 0);
  for (const auto& e : base.edges()) {
    deg[e.u] += 1;
    deg[e.v] += 1;  // a loop contributes two tree edges at every lift
  }
  const int dmin = *std::min_element(deg.begin(), deg.end());
  const int dmax = *std::max_element(deg.begin(), deg.end());
  if (dmin < 2) {
    cert.reason = "a degree-1 vertex gives the cover tree leaves";
    return cert;
  }
  if (dmax == 2) {
    cert.reason = "all degrees are 2: the cover is a line, which does not expand";
    return cert;
  }

  // Degree-2 vertices must be loop-free and pairwise non-adjacent: then every
  // finite connected subset A of the cover tree satisfies, with a2/a3 the
  // counts of degree-2 / degree->=3 vertices of A,
  //   boundary >= a3 + 2                  (tree edge count |A| - 1),
  //   boundary >= 2 a2 - t a3             (each degree-2 vertex has both
  //                                        edges to degree->=3 vertices,
  //                                        at most t of which sit in A per
  //                                        degree->=3 vertex),
  // whence boundary/|A| >= 2/(t+3); without degree-2 vertices the first count
  // alone gives boundary > (dmin - 2) |A|.
  int t = 0;
  bool has2 = false;
  for (int i = 0; i < n; ++i) has2 = has2 || deg[i] == 2;
  if (has2) {
    for (const auto& e : base.edges()) {
      if (deg[e.u] == 2 && deg[e.v] == 2) {
        cert.reason = e.u == e.v ? "a degree-2 vertex carries a loop"
                                 : "two degree-2 vertices are adjacent";
        return cert;
      }
    }
    std::vector<int> two_nbrs(static_cast<std::size_t>(n), 0);
    for (const auto& e : base.edges()) {
      if (e.u != e.v) {
        if (deg[e.v] == 2) two_nbrs[e.u] += 1;
        if (deg[e.u] == 2) two_nbrs[e.v] += 1;
      }
    }
    for (int i = 0; i < n; ++i)
      if (deg[i] >= 3) t = std::max(t, two_nbrs[i]);
  }

  const double cm = c0 / m0;
  cert.applies = true;
  cert.h_lower = cm * (has2 ? 2.0 / (t + 3) : static_cast<double>(dmin - 2));
  cert.D = cm * dmax;
  double vmin = base.potential(0);
  for (int i = 0; i < n; ++i) vmin = std::min(vmin, base.potential(i));
  cert.lambda_lower = cert.h_lower * cert.h_lower / (2.0 * cert.D) + vmin;
  cert.reason = has2 ? "degree-2 vertices independent; counting bound 2/(t+3)"
                     : "minimum degree at least 3; counting bound dmin-2";
  return cert;
}

}  // namespace speclab

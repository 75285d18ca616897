#include "speclab/amenability.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <queue>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace speclab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string format_letter(const MonodromyAction& a, const Letter& l) {
  return format_word(Word{l}, a.generators());
}

json letters_json(const MonodromyAction& a, const std::vector<Letter>& S) {
  json out = json::array();
  for (const Letter& l : S) out.push_back(format_letter(a, l));
  return out;
}

// Ball of the Schreier metric (w.r.t. the symmetrized S) around the base
// point; level_end[k] = number of states within distance k.  Stops early if
// the next level would exceed the cap; complete=true when the frontier died.
struct SchreierBall {
  std::vector<Vid> order;  // BFS order
  std::vector<std::size_t> level_end;
  bool complete = false;  // whole orbit enumerated
};

SchreierBall schreier_ball(const MonodromyAction& a, const std::vector<Letter>& S, int radius,
                           std::size_t cap) {
  SchreierBall b;
  std::unordered_set<Vid> seen;
  std::vector<Vid> frontier{a.base_fiber()};
  seen.insert(a.base_fiber());
  b.order.push_back(a.base_fiber());
  b.level_end.push_back(1);
  for (int r = 0; r < radius && !frontier.empty(); ++r) {
    std::vector<Vid> next;
    for (Vid x : frontier)
      for (const Letter& l : S) {
        const Vid y = letter_step(a, l, x);
        if (seen.insert(y).second) {
          next.push_back(y);
          if (b.order.size() + next.size() > cap) return b;  // over budget, incomplete
        }
      }
    std::sort(next.begin(), next.end());
    for (Vid y : next) b.order.push_back(y);
    b.level_end.push_back(b.order.size());
    frontier = std::move(next);
  }
  b.complete = frontier.empty();
  return b;
}

double boundary_ratio(const MonodromyAction& a, const std::vector<Letter>& S,
                      const std::vector<Vid>& E) {
  if (E.empty()) return kInf;
  return static_cast<double>(folner_boundary(a, E, S).size()) / static_cast<double>(E.size());
}

FolnerCertificate make_certificate(const MonodromyAction& a, const std::vector<Letter>& S,
                                   std::vector<Vid> E) {
  FolnerCertificate c;
  std::sort(E.begin(), E.end());
  c.boundary = folner_boundary(a, E, S);
  c.ratio = static_cast<double>(c.boundary.size()) / static_cast<double>(E.size());
  c.subset = std::move(E);
  c.generating_set = S;
  return c;
}

// Exact birth-death reduction of the distance-from-base process, when the
// walk is radially homogeneous: from distance 0 every step moves out, from
// distance k >= 1 the chance of stepping further out is p_up.
struct DistanceChain {
  double p_up = 0.5;
};

std::optional<DistanceChain> radial_chain(const MonodromyAction& a,
                                          const std::vector<Letter>& S) {
  const std::size_t k = a.generators().size();
  if (a.kind() == "free" && S.size() == 2 * k) {
    // Full symmetric set on reduced words: of 2k letters, one cancels.
    return DistanceChain{static_cast<double>(2 * k - 1) / static_cast<double>(2 * k)};
  }
  if (a.kind() == "z_shift" && k == 1 && S.size() == 2 && a.act(0, 0) != 0)
    return DistanceChain{0.5};
  return std::nullopt;
}

}  // namespace

std::vector<Letter> symmetrize_generators(const MonodromyAction& a,
                                          const std::vector<Letter>& S) {
  std::vector<Letter> base = S;
  if (base.empty())
    for (std::size_t g = 0; g < a.generators().size(); ++g)
      base.push_back(Letter{static_cast<int>(g), 1});
  std::set<std::pair<int, int>> seen;
  for (const Letter& l : base) {
    if (l.gen < 0 || l.gen >= static_cast<int>(a.generators().size()))
      throw SchemaError("unknown generator index in S");
    if (l.exp != 1 && l.exp != -1) throw SchemaError("generator letters must have exponent +-1");
    seen.insert({l.gen, l.exp});
    seen.insert({l.gen, -l.exp});
  }
  std::vector<Letter> out;
  for (const auto& [g, e] : seen) out.push_back(Letter{g, e});
  return out;
}

Vid letter_step(const MonodromyAction& a, const Letter& l, Vid x) {
  return l.exp > 0 ? a.act(l.gen, x) : a.act_inverse(l.gen, x);
}

json SchreierGraph::to_json(const MonodromyAction& a) const {
  json j;
  j["graph"] = graph.to_json();
  j["window"] = window;
  json labels = json::array();
  for (Vid v : window) labels.push_back(a.fiber_label(v));
  j["labels"] = labels;
  j["stubs"] = stubs;
  return j;
}

SchreierGraph schreier_graph(const MonodromyAction& a, const std::vector<Vid>& window,
                             const std::vector<Letter>& S) {
  if (window.empty()) throw SpeclabError("schreier_graph needs a nonempty window");
  const std::vector<Letter> sym = symmetrize_generators(a, S);
  SchreierGraph out;
  out.window = window;
  std::sort(out.window.begin(), out.window.end());
  out.window.erase(std::unique(out.window.begin(), out.window.end()), out.window.end());
  std::map<Vid, int> index;
  for (std::size_t i = 0; i < out.window.size(); ++i)
    index.emplace(out.window[i], static_cast<int>(i));

  const int n = static_cast<int>(out.window.size());
  std::vector<EdgeRec> edges;
  out.stubs.assign(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    const Vid x = out.window[i];
    // Edges once per positive generator incidence; stubs for both directions.
    for (std::size_t g = 0; g < a.generators().size(); ++g) {
      const Vid y = a.act(static_cast<int>(g), x);
      auto it = index.find(y);
      if (it != index.end())
        edges.push_back({i, it->second, 1.0});
      else
        out.stubs[i] += 1.0;
      const Vid z = a.act_inverse(static_cast<int>(g), x);
      if (index.find(z) == index.end()) out.stubs[i] += 1.0;
    }
  }
  out.graph = WeightedGraph(n, std::move(edges), std::vector<double>(n, 1.0),
                            std::vector<double>(n, 0.0));
  return out;
}

std::vector<Vid> folner_boundary(const MonodromyAction& a, const std::vector<Vid>& E,
                                 const std::vector<Letter>& S) {
  const std::vector<Letter> sym = symmetrize_generators(a, S);
  std::set<Vid> in(E.begin(), E.end());
  std::vector<Vid> out;
  for (Vid x : in) {
    for (const Letter& l : sym) {
      if (!in.count(letter_step(a, l, x))) {
        out.push_back(x);
        break;
      }
    }
  }
  return out;  // sorted: iteration over std::set
}

json FolnerCertificate::to_json(const MonodromyAction& a) const {
  json j;
  j["subset"] = subset;
  j["generating_set"] = letters_json(a, generating_set);
  j["boundary"] = boundary;
  j["ratio"] = ratio;
  return j;
}

FolnerSearchResult folner_search(const MonodromyAction& a, const std::vector<Letter>& S,
                                 double epsilon, const FolnerBudget& budget) {
  if (!(epsilon > 0)) throw SpeclabError("epsilon must be positive");
  const std::vector<Letter> sym = symmetrize_generators(a, S);
  FolnerSearchResult res;
  res.best_ratio = kInf;
  res.log["epsilon"] = epsilon;
  res.log["budgets"] = {{"max_ball_radius", budget.max_ball_radius},
                        {"max_set_size", budget.max_set_size},
                        {"erosion_rounds", budget.erosion_rounds},
                        {"exact_fiber_limit", budget.exact_fiber_limit}};
  json strategies = json::array();

  const auto finish = [&](std::vector<Vid> E, const char* strategy) {
    res.found = true;
    res.certificate = make_certificate(a, sym, std::move(E));
    res.best_ratio = std::min(res.best_ratio, res.certificate.ratio);
    res.log["winning_strategy"] = strategy;
    res.log["strategies"] = strategies;
    return res;
  };

  // Invariant sets have empty boundary: the full finite fiber always works.
  if (a.finite() && static_cast<std::size_t>(a.fiber_size()) <= budget.max_set_size) {
    std::vector<Vid> all(static_cast<std::size_t>(a.fiber_size()));
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<Vid>(i);
    strategies.push_back({{"strategy", "full-fiber"}, {"ratio", 0.0}});
    return finish(std::move(all), "full-fiber");
  }

  // Balls in the Schreier metric.
  SchreierBall ball = schreier_ball(a, sym, budget.max_ball_radius, budget.max_set_size);
  double ball_best = kInf;
  std::size_t ball_best_end = 0;
  for (std::size_t e : ball.level_end) {
    std::vector<Vid> E(ball.order.begin(), ball.order.begin() + static_cast<std::ptrdiff_t>(e));
    const double r = boundary_ratio(a, sym, E);
    if (r < ball_best) {
      ball_best = r;
      ball_best_end = e;
    }
    if (r < epsilon) {
      strategies.push_back({{"strategy", "ball-growth"}, {"best_ratio", r}});
      return finish(std::move(E), "ball-growth");
    }
  }
  strategies.push_back({{"strategy", "ball-growth"},
                        {"radius_reached", ball.level_end.size() - 1},
                        {"best_ratio", ball_best}});
  res.best_ratio = std::min(res.best_ratio, ball_best);

  // Greedy erosion from the best ball: repeatedly delete the vertex with the
  // most escaping steps (ties: smallest id), tracking the ratio as we go.
  if (ball_best_end >= 2) {
    std::set<Vid> E(ball.order.begin(),
                    ball.order.begin() + static_cast<std::ptrdiff_t>(ball_best_end));
    std::map<Vid, int> esc;  // escaping step count per member
    const auto escapes = [&](Vid x) {
      int c = 0;
      for (const Letter& l : sym)
        if (!E.count(letter_step(a, l, x))) ++c;
      return c;
    };
    // (-count, id) ordering: begin() is the max count, smallest id on ties.
    std::set<std::pair<int, Vid>> rank;
    std::size_t bnd = 0;
    for (Vid x : E) {
      const int c = escapes(x);
      esc[x] = c;
      rank.insert({-c, x});
      if (c > 0) ++bnd;
    }
    double erosion_best = kInf;
    int rounds = 0;
    while (E.size() >= 2 && rounds < budget.erosion_rounds) {
      ++rounds;
      const auto [neg, victim] = *rank.begin();
      rank.erase(rank.begin());
      E.erase(victim);
      esc.erase(victim);
      if (-neg > 0) --bnd;
      // Neighbors that could step onto the victim gained an escaping step.
      for (const Letter& l : sym) {
        const Vid y = letter_step(a, Letter{l.gen, -l.exp}, victim);
        auto it = esc.find(y);
        if (it == esc.end()) continue;
        const int before = it->second;
        const int after = escapes(y);
        if (after != before) {
          rank.erase({-before, y});
          rank.insert({-after, y});
          it->second = after;
          if (before == 0 && after > 0) ++bnd;
          if (before > 0 && after == 0) --bnd;
        }
      }
      const double r = static_cast<double>(bnd) / static_cast<double>(E.size());
      erosion_best = std::min(erosion_best, r);
      if (r < epsilon) {
        strategies.push_back({{"strategy", "greedy-erosion"}, {"best_ratio", r}});
        return finish(std::vector<Vid>(E.begin(), E.end()), "greedy-erosion");
      }
    }
    strategies.push_back({{"strategy", "greedy-erosion"},
                          {"rounds", rounds},
                          {"best_ratio", erosion_best}});
    res.best_ratio = std::min(res.best_ratio, erosion_best);
  }

  // Exact search on small finite fibers.
  if (a.finite() && static_cast<std::size_t>(a.fiber_size()) <= budget.exact_fiber_limit) {
    const int n = static_cast<int>(a.fiber_size());
    std::vector<std::uint32_t> out_mask(static_cast<std::size_t>(n), 0);
    for (int i = 0; i < n; ++i)
      for (const Letter& l : sym) {
        const Vid y = letter_step(a, l, i);
        out_mask[i] |= 1u << static_cast<int>(y);
      }
    double best = kInf;
    std::uint32_t best_mask = 0;
    const std::uint32_t count = 1u << n;
    for (std::uint32_t mask = 1; mask < count; ++mask) {
      int b = 0, sz = 0;
      for (int i = 0; i < n; ++i)
        if (mask & (1u << i)) {
          ++sz;
          if (out_mask[i] & ~mask) ++b;
        }
      const double r = static_cast<double>(b) / sz;
      if (r < best) {
        best = r;
        best_mask = mask;
      }
    }
    strategies.push_back({{"strategy", "exact"}, {"best_ratio", best}});
    res.best_ratio = std::min(res.best_ratio, best);
    if (best < epsilon) {
      std::vector<Vid> E;
      for (int i = 0; i < n; ++i)
        if (best_mask & (1u << i)) E.push_back(i);
      return finish(std::move(E), "exact");
    }
  }

  res.log["strategies"] = strategies;
  res.log["found"] = false;
  return res;
}

json RhoEstimate::to_json() const {
  json j;
  json s = json::array();
  for (const auto& [n, v] : series) s.push_back(json::array({n, v}));
  j["series"] = s;
  j["value"] = value;
  j["method"] = method;
  return j;
}

RhoEstimate rw_radius_estimate(const MonodromyAction& a, const std::vector<Letter>& S,
                               int n_max, std::size_t vertex_budget) {
  if (n_max < 2) throw SpeclabError("rw_radius_estimate needs n_max >= 2");
  const std::vector<Letter> sym = symmetrize_generators(a, S);
  RhoEstimate out;

  if (auto chain = radial_chain(a, sym)) {
    out.method = "distance-chain";
    // Exact distance process: from 0 always out, from k >= 1 out with p_up.
    const double up = chain->p_up, down = 1.0 - chain->p_up;
    std::vector<double> p(static_cast<std::size_t>(n_max) + 2, 0.0);
    p[0] = 1.0;
    for (int step = 1; step <= n_max; ++step) {
      std::vector<double> q(p.size(), 0.0);
      for (std::size_t k = 0; k < p.size(); ++k) {
        if (p[k] == 0.0) continue;
        if (k == 0) {
          q[1] += p[0];
        } else {
          if (k + 1 < q.size()) q[k + 1] += p[k] * up;
          q[k - 1] += p[k] * down;
        }
      }
      p = std::move(q);
      if (step % 2 == 0)
        out.series.emplace_back(step, std::pow(p[0], 1.0 / static_cast<double>(step)));
    }
  } else {
    out.method = "window-walk";
    SchreierBall ball = schreier_ball(a, sym, n_max, vertex_budget);
    if (!ball.complete && ball.level_end.size() < static_cast<std::size_t>(n_max) + 1)
      throw SpeclabError("walk window exceeds the vertex budget");
    const std::size_t n = ball.order.size();
    std::unordered_map<Vid, std::size_t> index;
    for (std::size_t i = 0; i < n; ++i) index.emplace(ball.order[i], i);
    // Column-stochastic step table: targets[i] lists where state i sends mass.
    std::vector<std::vector<std::size_t>> targets(n);
    for (std::size_t i = 0; i < n; ++i)
      for (const Letter& l : sym) {
        auto it = index.find(letter_step(a, l, ball.order[i]));
        if (it != index.end()) targets[i].push_back(it->second);
        // Mass leaving the window cannot contribute to a return within the
        // horizon (any returning path of length 2n stays within distance n).
      }
    const double inv = 1.0 / static_cast<double>(sym.size());
    std::vector<double> p(n, 0.0), q(n, 0.0);
    p[0] = 1.0;  // base state is first in BFS order
    for (int step = 1; step <= n_max; ++step) {
      std::fill(q.begin(), q.end(), 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        if (p[i] == 0.0) continue;
        const double share = p[i] * inv;
        for (std::size_t t : targets[i]) q[t] += share;
      }
      std::swap(p, q);
      if (step % 2 == 0)
        out.series.emplace_back(step, std::pow(p[0], 1.0 / static_cast<double>(step)));
    }
  }
  out.value = out.series.back().second;
  return out;
}

json AmenabilityVerdict::to_json(const MonodromyAction& a) const {
  json j;
  j["status"] = status;
  if (certificate) j["certificate"] = certificate->to_json(a);
  json s = json::array();
  for (const auto& [n, v] : rho_series) s.push_back(json::array({n, v}));
  j["rho_series"] = s;
  if (rho_lower) j["rho_lower"] = *rho_lower;
  j["budgets"] = search_log;
  return j;
}

AmenabilityVerdict amenability_verdict(const MonodromyAction& a, const std::vector<Letter>& S,
                                       double epsilon, const VerdictOptions& opts) {
  const std::vector<Letter> sym = symmetrize_generators(a, S);
  AmenabilityVerdict v;
  FolnerSearchResult search = folner_search(a, sym, epsilon, opts.folner);
  v.search_log = search.log;
  if (search.found) {
    v.status = "CertifiedAmenable";
    v.certificate = search.certificate;
    return v;
  }

  const bool radial = radial_chain(a, sym).has_value();
  const int n_max = radial ? opts.n_max_radial : opts.n_max_window;
  try {
    RhoEstimate rho = rw_radius_estimate(a, sym, n_max, opts.vertex_budget);
    v.rho_series = rho.series;
    v.rho_lower = rho.value;
    v.search_log["rho_method"] = rho.method;
    v.search_log["rho_n_max"] = n_max;
    // Plateau: visibly below 1, and the tail has stopped climbing relative to
    // the remaining headroom.
    const double last = rho.value;
    double at_half = rho.series.front().second;
    for (const auto& [n, val] : rho.series)
      if (n <= n_max / 2) at_half = val;
    const bool below = last <= 1.0 - opts.delta_plateau;
    const bool flat = (last - at_half) <= opts.slope_tol * (1.0 - last);
    v.status = (below && flat) ? "EvidenceNonamenable" : "Inconclusive";
  } catch (const SpeclabError&) {
    v.search_log["rho_method"] = "unavailable (window over budget)";
    v.status = "Inconclusive";
  }
  return v;
}

}  // namespace speclab

#include "speclab/graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>

namespace speclab {

WeightedGraph::WeightedGraph(int n, std::vector<EdgeRec> edges, std::vector<double> measure,
                             std::vector<double> potential)
    : n_(n), edges_(std::move(edges)), m_(std::move(measure)), V_(std::move(potential)) {
  if (n_ < 1) throw SchemaError("graph must have at least one vertex");
  if (static_cast<int>(m_.size()) != n_ || static_cast<int>(V_.size()) != n_)
    throw SchemaError("measure/potential length must equal vertex count");
  for (double m : m_)
    if (!(m > 0.0)) throw SchemaError("vertex measure must be positive");
  for (const auto& e : edges_) {
    if (e.u < 0 || e.u >= n_ || e.v < 0 || e.v >= n_)
      throw SchemaError("edge endpoint out of range");
    if (!(e.c > 0.0)) throw SchemaError("edge conductance must be positive");
  }
}

const std::vector<std::vector<std::pair<int, double>>>& WeightedGraph::adjacency() const {
  if (!adj_built_) {
    adj_.assign(n_, {});
    std::vector<std::map<int, double>> acc(n_);
    for (const auto& e : edges_) {
      if (e.u == e.v) continue;  // loops are spectrally inert
      acc[e.u][e.v] += e.c;
      acc[e.v][e.u] += e.c;
    }
    for (int v = 0; v < n_; ++v) adj_[v].assign(acc[v].begin(), acc[v].end());
    adj_built_ = true;
  }
  return adj_;
}

double WeightedGraph::total_measure() const {
  double s = 0;
  for (double m : m_) s += m;
  return s;
}

double WeightedGraph::conductance_at(int v) const {
  double s = 0;
  for (const auto& [w, c] : adjacency()[v]) {
    (void)w;
    s += c;
  }
  return s;
}

std::vector<int> WeightedGraph::component_of() const {
  std::vector<int> comp(n_, -1);
  const auto& adj = adjacency();
  int next = 0;
  for (int s = 0; s < n_; ++s) {
    if (comp[s] != -1) continue;
    comp[s] = next;
    std::deque<int> dq{s};
    while (!dq.empty()) {
      int x = dq.front();
      dq.pop_front();
      for (const auto& [y, c] : adj[x]) {
        (void)c;
        if (comp[y] == -1) {
          comp[y] = next;
          dq.push_back(y);
        }
      }
    }
    ++next;
  }
  return comp;
}

int WeightedGraph::component_count() const {
  auto comp = component_of();
  return comp.empty() ? 0 : 1 + *std::max_element(comp.begin(), comp.end());
}

bool WeightedGraph::connected() const { return component_count() <= 1; }

std::vector<int> WeightedGraph::bfs_distance(const std::vector<int>& sources) const {
  std::vector<int> dist(n_, -1);
  std::deque<int> dq;
  for (int s : sources) {
    if (dist[s] == -1) {
      dist[s] = 0;
      dq.push_back(s);
    }
  }
  const auto& adj = adjacency();
  while (!dq.empty()) {
    int x = dq.front();
    dq.pop_front();
    for (const auto& [y, c] : adj[x]) {
      (void)c;
      if (dist[y] == -1) {
        dist[y] = dist[x] + 1;
        dq.push_back(y);
      }
    }
  }
  return dist;
}

WeightedGraph WeightedGraph::induced_subgraph(const std::vector<int>& keep,
                                              std::vector<int>* old_to_new) const {
  std::vector<int> map(n_, -1);
  for (std::size_t i = 0; i < keep.size(); ++i) map[keep[i]] = static_cast<int>(i);
  std::vector<EdgeRec> edges;
  for (const auto& e : edges_)
    if (map[e.u] != -1 && map[e.v] != -1) edges.push_back({map[e.u], map[e.v], e.c});
  std::vector<double> m, V;
  for (int v : keep) {
    m.push_back(m_[v]);
    V.push_back(V_[v]);
  }
  if (old_to_new) *old_to_new = map;
  return WeightedGraph(static_cast<int>(keep.size()), std::move(edges), std::move(m),
                       std::move(V));
}

json WeightedGraph::to_json() const {
  json edges = json::array();
  for (const auto& e : edges_) edges.push_back(json::array({e.u, e.v, e.c}));
  return json{{"vertices", n_}, {"edges", edges}, {"measure", m_}, {"potential", V_}};
}

// ---- functions on graphs -------------------------------------------------

std::vector<double> apply_operator(const WeightedGraph& g, const std::vector<double>& f) {
  if (static_cast<int>(f.size()) != g.size())
    throw SpeclabError("function length does not match vertex count");
  std::vector<double> out(g.size(), 0.0);
  const auto& adj = g.adjacency();
  for (int x = 0; x < g.size(); ++x) {
    double s = 0;
    for (const auto& [y, c] : adj[x]) s += c * (f[x] - f[y]);
    out[x] = s / g.measure(x) + g.potential(x) * f[x];
  }
  return out;
}

double quadratic_form(const WeightedGraph& g, const std::vector<double>& f) {
  if (static_cast<int>(f.size()) != g.size())
    throw SpeclabError("function length does not match vertex count");
  double q = 0;
  for (const auto& e : g.edges()) {
    if (e.u == e.v) continue;
    const double d = f[e.u] - f[e.v];
    q += e.c * d * d;
  }
  for (int x = 0; x < g.size(); ++x) q += g.measure(x) * g.potential(x) * f[x] * f[x];
  return q;
}

double norm_sq(const WeightedGraph& g, const std::vector<double>& f) {
  double s = 0;
  for (int x = 0; x < g.size(); ++x) s += g.measure(x) * f[x] * f[x];
  return s;
}

double rayleigh_quotient(const WeightedGraph& g, const std::vector<double>& f) {
  const double den = norm_sq(g, f);
  if (!(den > 0.0)) throw SpeclabError("Rayleigh quotient of the zero function");
  return quadratic_form(g, f) / den;
}

// ---- truncation ----------------------------------------------------------

Truncation truncate_ball(const LazyGraph& g, const std::vector<Vid>& seeds, int radius,
                         std::size_t vertex_budget) {
  Truncation t;
  std::deque<Vid> dq;
  for (Vid s : seeds) {
    if (!t.index.count(s)) {
      t.index[s] = static_cast<int>(t.ids.size());
      t.ids.push_back(s);
      t.distance.push_back(0);
      dq.push_back(s);
    }
  }
  while (!dq.empty()) {
    Vid x = dq.front();
    dq.pop_front();
    const int dx = t.distance[t.index[x]];
    if (dx >= radius) continue;
    for (const auto& [y, c] : g.neighbors(x)) {
      (void)c;
      if (!t.index.count(y)) {
        if (t.ids.size() >= vertex_budget)
          throw SpeclabError("truncation exceeds vertex budget (" +
                             std::to_string(vertex_budget) + ")");
        t.index[y] = static_cast<int>(t.ids.size());
        t.ids.push_back(y);
        t.distance.push_back(dx + 1);
        dq.push_back(y);
      }
    }
  }
  t.exhausted = true;
  const int n = static_cast<int>(t.ids.size());
  std::vector<EdgeRec> edges;
  std::vector<double> m(n), V(n);
  t.dirichlet_mass.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    const Vid x = t.ids[i];
    m[i] = g.measure(x);
    V[i] = g.potential(x);
    for (const auto& [y, c] : g.neighbors(x)) {
      auto it = t.index.find(y);
      if (it == t.index.end()) {
        t.dirichlet_mass[i] += c;  // edge into the removed exterior
        t.exhausted = false;
      } else if (it->second > i) {
        edges.push_back({i, it->second, c});
      }
    }
  }
  t.graph = WeightedGraph(n, std::move(edges), std::move(m), std::move(V));
  return t;
}

std::vector<std::pair<Vid, double>> FiniteAsLazy::neighbors(Vid v) const {
  std::vector<std::pair<Vid, double>> out;
  for (const auto& [y, c] : g_.adjacency()[static_cast<int>(v)]) out.emplace_back(y, c);
  return out;
}

// ---- integer line --------------------------------------------------------

std::vector<std::pair<Vid, double>> ZLineGraph::neighbors(Vid v) const {
  return {{v - 1, 1.0}, {v + 1, 1.0}};
}

std::optional<RadialProfile> ZLineGraph::radial_profile() const {
  RadialProfile p;
  p.level_count = [](std::int64_t k) { return k == 0 ? 1.0 : 2.0; };
  p.level_edges = [](std::int64_t) { return 2.0; };
  return p;
}

// ---- regular tree --------------------------------------------------------

RegularTreeGraph::RegularTreeGraph(int degree) : d_(degree) {
  if (degree < 3) throw SpeclabError("regular tree requires degree >= 3");
}

Vid RegularTreeGraph::level_start(std::int64_t k) const {
  Vid s = 0, count = 1;
  for (std::int64_t lvl = 0; lvl < k; ++lvl) {
    s += count;
    count = (lvl == 0) ? d_ : count * (d_ - 1);
    if (s > (std::int64_t{1} << 60)) throw SpeclabError("tree vertex id out of range");
  }
  return s;
}

std::pair<std::int64_t, std::int64_t> RegularTreeGraph::locate(Vid v) const {
  Vid s = 0, count = 1;
  for (std::int64_t k = 0;; ++k) {
    if (v < s + count) return {k, v - s};
    s += count;
    count = (k == 0) ? d_ : count * (d_ - 1);
    if (s > (std::int64_t{1} << 60)) throw SpeclabError("tree vertex id out of range");
  }
}

std::vector<std::pair<Vid, double>> RegularTreeGraph::neighbors(Vid v) const {
  std::vector<std::pair<Vid, double>> out;
  if (v == 0) {
    for (int s = 0; s < d_; ++s) out.emplace_back(1 + s, 1.0);
    return out;
  }
  const auto [k, j] = locate(v);
  const Vid parent = (k == 1) ? 0 : level_start(k - 1) + j / (d_ - 1);
  out.emplace_back(parent, 1.0);
  const Vid child0 = level_start(k + 1) + j * (d_ - 1);
  for (int s = 0; s < d_ - 1; ++s) out.emplace_back(child0 + s, 1.0);
  return out;
}

std::optional<RadialProfile> RegularTreeGraph::radial_profile() const {
  RadialProfile p;
  const int d = d_;
  p.level_count = [d](std::int64_t k) {
    if (k == 0) return 1.0;
    double n = d;
    for (std::int64_t i = 1; i < k; ++i) n *= d - 1;
    return n;
  };
  p.level_edges = [d, lc = p.level_count](std::int64_t k) {
    return k == 0 ? double(d) : lc(k) * (d - 1);
  };
  return p;
}

// ---- chain of blobs ------------------------------------------------------

BlobChainGraph::BlobChainGraph(int blob_size, std::int64_t blob_count)
    : b_(blob_size), count_(blob_count) {
  if (b_ < 1) throw SchemaError("blob size must be >= 1");
  if (count_ == 0) throw SchemaError("blob count must be nonzero (or negative for infinite)");
}

Vid BlobChainGraph::encode(std::int64_t blob, int slot) const { return blob * b_ + slot; }

std::pair<std::int64_t, int> BlobChainGraph::decode(Vid v) const {
  std::int64_t slot = v % b_;
  if (slot < 0) slot += b_;
  return {(v - slot) / b_, static_cast<int>(slot)};
}

std::vector<std::pair<Vid, double>> BlobChainGraph::neighbors(Vid v) const {
  auto [k, s] = decode(v);
  std::vector<std::pair<Vid, double>> out;
  for (int t = 0; t < b_; ++t)
    if (t != s) out.emplace_back(encode(k, t), 1.0);
  if (s == 0) {
    if (k > 1) out.emplace_back(encode(k - 1, 0), 1.0 / static_cast<double>(k - 1));
    if (count_ < 0 || k < count_) out.emplace_back(encode(k + 1, 0), 1.0 / static_cast<double>(k));
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string BlobChainGraph::label(Vid v) const {
  auto [k, s] = decode(v);
  return "blob" + std::to_string(k) + ":" + std::to_string(s);
}

SparseVec BlobChainGraph::blob_indicator(std::int64_t K) const {
  SparseVec f;
  for (std::int64_t k = 1; k <= K; ++k)
    for (int s = 0; s < b_; ++s) f[encode(k, s)] = 1.0;
  return f;
}

// ---- edited graph --------------------------------------------------------

EditedGraph::EditedGraph(std::shared_ptr<const LazyGraph> base,
                         std::map<Vid, double> potential_override,
                         std::map<std::pair<Vid, Vid>, double> conductance_override,
                         std::vector<Vid> deleted)
    : base_(std::move(base)), vpot_(std::move(potential_override)), deleted_(std::move(deleted)) {
  // Accept conductance keys in either vertex order.
  for (const auto& [key, c] : conductance_override) {
    auto norm = std::minmax(key.first, key.second);
    cond_[{norm.first, norm.second}] = c;
  }
  std::sort(deleted_.begin(), deleted_.end());
}

bool EditedGraph::deleted(Vid v) const {
  return std::binary_search(deleted_.begin(), deleted_.end(), v);
}

Vid EditedGraph::origin() const {
  Vid o = base_->origin();
  if (deleted(o)) throw SpeclabError("origin vertex was deleted by the edit set");
  return o;
}

std::vector<std::pair<Vid, double>> EditedGraph::neighbors(Vid v) const {
  std::vector<std::pair<Vid, double>> out;
  for (auto [y, c] : base_->neighbors(v)) {
    if (deleted(y)) continue;
    auto key = std::minmax(v, y);
    auto it = cond_.find({key.first, key.second});
    const double eff = it == cond_.end() ? c : it->second;
    if (eff == 0.0) continue;  // conductance 0 removes the edge
    out.emplace_back(y, eff);
  }
  return out;
}

double EditedGraph::potential(Vid v) const {
  auto it = vpot_.find(v);
  return it == vpot_.end() ? base_->potential(v) : it->second;
}

// ---- builders ------------------------------------------------------------

WeightedGraph make_path(int n) {
  std::vector<EdgeRec> e;
  for (int i = 0; i + 1 < n; ++i) e.push_back({i, i + 1, 1.0});
  return WeightedGraph(n, e, std::vector<double>(n, 1.0), std::vector<double>(n, 0.0));
}

WeightedGraph make_cycle(int n) {
  std::vector<EdgeRec> e;
  for (int i = 0; i < n; ++i) e.push_back({i, (i + 1) % n, 1.0});
  return WeightedGraph(n, e, std::vector<double>(n, 1.0), std::vector<double>(n, 0.0));
}

WeightedGraph make_complete(int n) {
  std::vector<EdgeRec> e;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) e.push_back({i, j, 1.0});
  return WeightedGraph(n, e, std::vector<double>(n, 1.0), std::vector<double>(n, 0.0));
}

WeightedGraph make_bouquet(int loops) {
  std::vector<EdgeRec> e;
  for (int i = 0; i < loops; ++i) e.push_back({0, 0, 1.0});
  return WeightedGraph(1, e, {1.0}, {0.0});
}

static WeightedGraph make_star(int n) {
  std::vector<EdgeRec> e;
  for (int i = 1; i < n; ++i) e.push_back({0, i, 1.0});
  return WeightedGraph(n, e, std::vector<double>(n, 1.0), std::vector<double>(n, 0.0));
}


WeightedGraph build_graph(const json& spec) {
  if (!spec.is_object()) throw SchemaError("graph: expected a JSON object");
  if (spec.contains("generator")) {
    json_require_keys(spec, {"generator", "params"}, {"generator", "params"}, "graph");
    const std::string name = spec.at("generator").get<std::string>();
    const json& p = spec.at("params");
    if (name == "path") {
      json_require_keys(p, {"n"}, {"n"}, "path params");
      return make_path(json_get_int(p, "n", "path"));
    }
    if (name == "cycle") {
      json_require_keys(p, {"n"}, {"n"}, "cycle params");
      return make_cycle(json_get_int(p, "n", "cycle"));
    }
    if (name == "complete") {
      json_require_keys(p, {"n"}, {"n"}, "complete params");
      return make_complete(json_get_int(p, "n", "complete"));
    }
    if (name == "star") {
      json_require_keys(p, {"n"}, {"n"}, "star params");
      return make_star(json_get_int(p, "n", "star"));
    }
    if (name == "bouquet") {
      json_require_keys(p, {"loops"}, {"loops"}, "bouquet params");
      return make_bouquet(json_get_int(p, "loops", "bouquet"));
    }
    throw SchemaError("graph: unknown generator \"" + name + "\"");
  }
  json_require_keys(spec, {"vertices", "edges", "measure", "potential"}, {"vertices", "edges"},
               "graph");
  const int n = json_get_int(spec, "vertices", "graph");
  std::vector<EdgeRec> edges;
  for (const auto& e : spec.at("edges")) {
    if (!e.is_array() || e.size() != 3)
      throw SchemaError("graph: each edge must be a triple [i, j, c]");
    EdgeRec r;
    r.u = e.at(0).get<int>();
    r.v = e.at(1).get<int>();
    r.c = e.at(2).get<double>();
    edges.push_back(r);
  }
  std::vector<double> m(n, 1.0), V(n, 0.0);
  if (spec.contains("measure")) m = spec.at("measure").get<std::vector<double>>();
  if (spec.contains("potential")) V = spec.at("potential").get<std::vector<double>>();
  return WeightedGraph(n, std::move(edges), std::move(m), std::move(V));
}

WeightedGraph random_connected_graph(Rng& rng, int n, int extra, bool unit_weights) {
  std::vector<EdgeRec> edges;
  for (int v = 1; v < n; ++v) {
    const int u = static_cast<int>(uniform_int(rng, 0, v - 1));
    edges.push_back({u, v, unit_weights ? 1.0 : uniform(rng, 0.5, 2.0)});
  }
  for (int k = 0; k < extra; ++k) {
    const int u = static_cast<int>(uniform_int(rng, 0, n - 1));
    const int v = static_cast<int>(uniform_int(rng, 0, n - 1));
    edges.push_back({u, v, unit_weights ? 1.0 : uniform(rng, 0.5, 2.0)});
  }
  std::vector<double> m(n, 1.0), V(n, 0.0);
  if (!unit_weights) {
    for (int v = 0; v < n; ++v) {
      m[v] = uniform(rng, 0.5, 2.0);
      V[v] = uniform(rng, -1.0, 1.0);
    }
  }
  return WeightedGraph(n, std::move(edges), std::move(m), std::move(V));
}

}  // namespace speclab

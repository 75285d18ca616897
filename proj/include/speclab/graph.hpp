#pragma once
// Weighted graphs as discrete models of weighted manifolds.
//
// A finite WeightedGraph carries symmetric edge conductances c(x,y) > 0, a
// vertex measure m(x) > 0 and a potential V(x).  The Schroedinger operator is
//
//   (H f)(x) = m(x)^{-1} * sum_y c(x,y) (f(x) - f(y)) + V(x) f(x),
//
// self-adjoint on l2(m), with quadratic form
//
//   Q(f) = sum_{edges {x,y}} c(x,y) (f(x)-f(y))^2 + sum_x m(x) V(x) f(x)^2.
//
// Loops and parallel edges are allowed; loops are spectrally inert (the
// difference term vanishes) but kept in the edge list for structural uses
// (Schreier graphs, covers of bouquets).

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "speclab/util.hpp"

namespace speclab {

using Vid = std::int64_t;  // vertex id in a (possibly infinite) lazy graph

struct EdgeRec {
  int u = 0, v = 0;
  double c = 1.0;
};

class WeightedGraph {
 public:
  WeightedGraph() = default;
  WeightedGraph(int n, std::vector<EdgeRec> edges, std::vector<double> measure,
                std::vector<double> potential);

  int size() const { return n_; }
  const std::vector<EdgeRec>& edges() const { return edges_; }
  double measure(int v) const { return m_[v]; }
  double potential(int v) const { return V_[v]; }
  const std::vector<double>& measures() const { return m_; }
  const std::vector<double>& potentials() const { return V_; }

  // Aggregated adjacency: per vertex, (neighbor, summed conductance), loops
  // dropped, neighbors sorted ascending.  Built on first use.
  const std::vector<std::vector<std::pair<int, double>>>& adjacency() const;

  double total_measure() const;
  // sum_y c(x,y) over non-loop incidences (parallel edges summed).
  double conductance_at(int v) const;

  std::vector<int> component_of() const;  // component index per vertex
  int component_count() const;
  bool connected() const;

  // BFS graph distance (unit edge lengths, loops ignored); -1 if unreachable.
  std::vector<int> bfs_distance(const std::vector<int>& sources) const;

  WeightedGraph induced_subgraph(const std::vector<int>& keep,
                                 std::vector<int>* old_to_new = nullptr) const;

  json to_json() const;

 private:
  int n_ = 0;
  std::vector<EdgeRec> edges_;
  std::vector<double> m_, V_;
  mutable std::vector<std::vector<std::pair<int, double>>> adj_;
  mutable bool adj_built_ = false;
};

// ---- functions on graphs -------------------------------------------------

// (H f) for finite graphs.
std::vector<double> apply_operator(const WeightedGraph& g, const std::vector<double>& f);

// Q(f) / ||f||_m^2 ; throws on f == 0.
double rayleigh_quotient(const WeightedGraph& g, const std::vector<double>& f);

double quadratic_form(const WeightedGraph& g, const std::vector<double>& f);
double norm_sq(const WeightedGraph& g, const std::vector<double>& f);

// Finitely supported function on a lazy graph; ordered map => deterministic
// iteration in all downstream sums and reports.
using SparseVec = std::map<Vid, double>;

// ---- lazy (locally finite, possibly infinite) graphs ---------------------

// Equitable radial structure: the distance partition from the origin has
// level sizes n(k) and exactly e(k) edges between levels k and k+1, with
// uniform conductance c, measure m and potential V.  When present, Dirichlet
// problems on balls collapse exactly to a weighted path (the ground state of
// the ball is radial: average over the level-transitive automorphism group and
// use simplicity of the bottom eigenvalue).
struct RadialProfile {
  double c = 1.0, m = 1.0, V = 0.0;
  std::function<double(std::int64_t)> level_count;  // n(k), k >= 0
  std::function<double(std::int64_t)> level_edges;  // e(k) between k and k+1
};

class LazyGraph {
 public:
  virtual ~LazyGraph() = default;
  virtual Vid origin() const = 0;
  // Aggregated (neighbor, conductance) pairs, loops dropped, sorted by id.
  virtual std::vector<std::pair<Vid, double>> neighbors(Vid v) const = 0;
  virtual double measure(Vid v) const = 0;
  virtual double potential(Vid v) const = 0;
  // Printable vertex label for reports.
  virtual std::string label(Vid v) const { return std::to_string(v); }
  virtual std::optional<RadialProfile> radial_profile() const { return std::nullopt; }
};

// Finite truncation of a lazy graph: the induced graph on `ids` plus, for each
// kept vertex, the conductance mass of edges leaving the set.  Adding that
// mass to the diagonal imposes the Dirichlet condition f == 0 outside.
struct Truncation {
  WeightedGraph graph;
  std::vector<Vid> ids;                  // kept vertices, BFS order from the seeds
  std::map<Vid, int> index;              // id -> position in ids
  std::vector<double> dirichlet_mass;    // per kept vertex
  std::vector<int> distance;             // BFS distance from the seed set
  bool exhausted = false;                // true if the BFS frontier emptied (whole component)
};

// Ball truncation B(seeds, radius); throws SpeclabError if more than
// `vertex_budget` vertices would be enumerated.
Truncation truncate_ball(const LazyGraph& g, const std::vector<Vid>& seeds, int radius,
                         std::size_t vertex_budget = 2'000'000);

// View of a finite graph through the LazyGraph interface (ids = indices).
class FiniteAsLazy : public LazyGraph {
 public:
  explicit FiniteAsLazy(WeightedGraph g, Vid origin = 0) : g_(std::move(g)), origin_(origin) {}
  Vid origin() const override { return origin_; }
  std::vector<std::pair<Vid, double>> neighbors(Vid v) const override;
  double measure(Vid v) const override { return g_.measure(static_cast<int>(v)); }
  double potential(Vid v) const override { return g_.potential(static_cast<int>(v)); }
  const WeightedGraph& graph() const { return g_; }

 private:
  WeightedGraph g_;
  Vid origin_;
};

// The two-sided integer line with unit conductances and measure.
class ZLineGraph : public LazyGraph {
 public:
  Vid origin() const override { return 0; }
  std::vector<std::pair<Vid, double>> neighbors(Vid v) const override;
  double measure(Vid) const override { return 1.0; }
  double potential(Vid) const override { return 0.0; }
  std::optional<RadialProfile> radial_profile() const override;
};

// The infinite d-regular tree (unit conductances and measure), vertices in
// level order from the root: level k >= 1 holds d*(d-1)^(k-1) vertices.
class RegularTreeGraph : public LazyGraph {
 public:
  explicit RegularTreeGraph(int degree);
  Vid origin() const override { return 0; }
  std::vector<std::pair<Vid, double>> neighbors(Vid v) const override;
  double measure(Vid) const override { return 1.0; }
  double potential(Vid) const override { return 0.0; }
  std::optional<RadialProfile> radial_profile() const override;
  int degree() const { return d_; }

 private:
  Vid level_start(std::int64_t k) const;            // throws past the id range
  std::pair<std::int64_t, std::int64_t> locate(Vid v) const;  // (level, offset)
  int d_;
};

// One-sided chain of complete blobs K_b (unit conductances inside blob k),
// joined by neck edges of conductance 1/k between blob k and blob k+1.
// Necks vanish along the chain, so indicators of far blobs have arbitrarily
// small Rayleigh quotients.  blob_count < 0 means infinite.
class BlobChainGraph : public LazyGraph {
 public:
  BlobChainGraph(int blob_size, std::int64_t blob_count = -1);
  Vid origin() const override { return encode(1, 0); }
  std::vector<std::pair<Vid, double>> neighbors(Vid v) const override;
  double measure(Vid) const override { return 1.0; }
  double potential(Vid) const override { return 0.0; }
  std::string label(Vid v) const override;

  Vid encode(std::int64_t blob, int slot) const;
  std::pair<std::int64_t, int> decode(Vid v) const;
  int blob_size() const { return b_; }
  std::int64_t blob_count() const { return count_; }
  // Indicator of blobs 1..K, normalized nowhere; used as an explicit test
  // function whose Rayleigh quotient is (1/K)/(K*b).
  SparseVec blob_indicator(std::int64_t K) const;

 private:
  int b_;
  std::int64_t count_;
};

// Finite modification of a lazy graph: potential overrides, conductance
// overrides on existing edges, and vertex deletions.  Used by the stability
// checks (essential-spectrum estimates ignore finite edits).
class EditedGraph : public LazyGraph {
 public:
  EditedGraph(std::shared_ptr<const LazyGraph> base, std::map<Vid, double> potential_override,
              std::map<std::pair<Vid, Vid>, double> conductance_override,
              std::vector<Vid> deleted);
  Vid origin() const override;
  std::vector<std::pair<Vid, double>> neighbors(Vid v) const override;
  double measure(Vid v) const override { return base_->measure(v); }
  double potential(Vid v) const override;
  std::string label(Vid v) const override { return base_->label(v); }
  // No radial profile: edits break the symmetry.

 private:
  bool deleted(Vid v) const;
  std::shared_ptr<const LazyGraph> base_;
  std::map<Vid, double> vpot_;
  std::map<std::pair<Vid, Vid>, double> cond_;  // stored with key (min,max); 0 removes the edge
  std::vector<Vid> deleted_;
};

// ---- construction / serialization ---------------------------------------

// Parse the JSON graph description: either the explicit form
//   {"vertices": n, "edges": [[i,j,c],...], "measure": [...], "potential": [...]}
// (measure/potential optional, defaulting to 1 and 0) or the generator form
//   {"generator": name, "params": {...}}
// with generators: path {n}, cycle {n}, complete {n}, bouquet {loops},
// star {n}.  Unknown fields are rejected (SchemaError).
WeightedGraph build_graph(const json& spec);

WeightedGraph make_path(int n);
WeightedGraph make_cycle(int n);
WeightedGraph make_complete(int n);
WeightedGraph make_bouquet(int loops);  // single vertex, `loops` self-loops

// Seeded random connected graph: spanning tree + `extra` random edges (loops
// and parallels allowed), c in [0.5,2], m in [0.5,2], V in [-1,1].
WeightedGraph random_connected_graph(Rng& rng, int n, int extra, bool unit_weights = false);

}  // namespace speclab

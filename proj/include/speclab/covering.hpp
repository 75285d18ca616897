#pragma once
// Coverings of weighted graphs, described by voltages.
//
// A covering of a base graph is encoded by an action of the free group on the
// base's edge words: every oriented base edge carries a voltage word in the
// generators of a MonodromyAction, and the derived (total) graph has vertices
// (base vertex, fiber element) with an edge
//
//     ((x,i), (y, w.i))   of conductance c0(x,y)
//
// for each base edge {x,y} with voltage w.  Measure and potential lift
// unchanged: m1(x,i) = m0(x), V1(x,i) = V0(x), so the operator upstairs is
// the lift of the operator downstairs.  Every covering of a graph arises this
// way, which makes restriction to subgraphs and deck structure mechanical.
//
// Infinite fibers come from a closed catalog (integer shifts, integer
// lattices, free groups acting on reduced words, finite permutation groups,
// and componentwise products of these), so neighbor enumeration is always
// decidable.

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "speclab/graph.hpp"
#include "speclab/util.hpp"

namespace speclab {

// ---- words over a generating set -----------------------------------------

struct Letter {
  int gen = 0;  // index into the generator list
  int exp = 1;  // +1 or -1
};
using Word = std::vector<Letter>;

// Parse a whitespace-separated word like "a b^-1 a"; "" is the trivial word.
Word parse_word(const std::string& text, const std::vector<std::string>& generators);
std::string format_word(const Word& w, const std::vector<std::string>& generators);

// ---- monodromy actions ----------------------------------------------------

// A group action on a countable fiber, given by how each generator moves
// fiber elements.  Fiber elements are identified by integer ids; infinite
// fibers intern their states on first touch (synchronized, deterministic for
// a fixed call sequence).
class MonodromyAction {
 public:
  explicit MonodromyAction(std::vector<std::string> generators);
  virtual ~MonodromyAction() = default;

  const std::vector<std::string>& generators() const { return gens_; }
  int generator_index(const std::string& name) const;  // SchemaError on unknown

  virtual std::string kind() const = 0;
  virtual bool finite() const = 0;
  virtual std::int64_t fiber_size() const = 0;  // -1 when infinite
  virtual Vid act(int gen, Vid fiber) const = 0;
  virtual Vid act_inverse(int gen, Vid fiber) const = 0;
  virtual Vid base_fiber() const { return 0; }  // distinguished fiber element
  virtual std::string fiber_label(Vid fiber) const { return std::to_string(fiber); }

  Vid act_word(const Word& w, Vid fiber) const;
  Vid act_word_inverse(const Word& w, Vid fiber) const;

 protected:
  std::vector<std::string> gens_;
};

// One permutation of {0..degree-1} per generator.
std::shared_ptr<MonodromyAction> make_permutation_action(std::vector<std::string> generators,
                                                         int degree,
                                                         std::vector<std::vector<int>> perms);
// Fiber = integers; generator g shifts by shifts[g].
std::shared_ptr<MonodromyAction> make_shift_action(std::vector<std::string> generators,
                                                   std::vector<std::int64_t> shifts);
// Fiber = integer lattice of the given dimension; one shift vector per generator.
std::shared_ptr<MonodromyAction> make_lattice_action(
    std::vector<std::string> generators, int dim,
    std::vector<std::vector<std::int64_t>> shifts);
// Fiber = reduced words of the free group of the given rank; generator g acts
// by right multiplication.  Generators are named a, b, c, ...
std::shared_ptr<MonodromyAction> make_free_action(int rank);
// Componentwise product over a shared generator list.
std::shared_ptr<MonodromyAction> make_product_action(
    std::vector<std::shared_ptr<MonodromyAction>> factors);

// {"type": "permutations"|"z_shift"|"z_lattice"|"free"|"product", "params": {...}}
std::shared_ptr<MonodromyAction> build_action(const json& spec);

// ---- the covering ---------------------------------------------------------

class CoveringGraph {
 public:
  // voltage[e] belongs to base.edges()[e], read along the stored orientation
  // (u -> v).  Throws if a voltage is missing or uses an unknown generator.
  CoveringGraph(WeightedGraph base, std::shared_ptr<MonodromyAction> action,
                std::vector<Word> voltage);

  const WeightedGraph& base() const { return base_; }
  const MonodromyAction& action() const { return *action_; }
  std::shared_ptr<MonodromyAction> action_shared() const { return action_; }
  const std::vector<Word>& voltage() const { return voltage_; }

  bool finite_fiber() const { return action_->finite(); }
  std::int64_t fiber_size() const { return action_->fiber_size(); }

  // Vertex ids of the total graph: fiber-major composite integers.
  Vid encode(int base_vertex, Vid fiber) const;
  int project(Vid total_vertex) const;  // the covering projection on vertices
  Vid fiber_of(Vid total_vertex) const;

  // Lazy view of the total graph; self-contained, but shares this covering's
  // action (and hence its fiber-interning tables).
  std::shared_ptr<const LazyGraph> total() const;

  // Materialized total graph for finite fibers: vertex i*n + x is (x, fiber i).
  // Loop edges of the derived graph are kept in the edge list.
  WeightedGraph total_finite() const;  // throws when the fiber is infinite

 private:
  WeightedGraph base_;
  std::shared_ptr<MonodromyAction> action_;
  std::vector<Word> voltage_;
};

// {base: <graph>, action: {type, params}, voltage: [[edge index, word], ...]};
// edges without an entry get the trivial voltage.
CoveringGraph build_cover(const json& spec);

// f0 on the base, lifted to f0 ∘ p on the materialized total graph.
std::vector<double> lift_function(const CoveringGraph& cover, const std::vector<double>& f0);
// Lift onto the listed fibers only (the finite-window form for infinite fibers).
SparseVec lift_function(const CoveringGraph& cover, const std::vector<double>& f0,
                        const std::vector<Vid>& fiber_window);

// Fiberwise l2 norm: f0(x) = sqrt(sum over the fiber of f(x,i)^2).  Norms are
// preserved, and the Rayleigh quotient can only drop (fiberwise triangle
// inequality across each edge).
std::vector<double> pushdown(const CoveringGraph& cover, const std::vector<double>& f_total);
std::vector<double> pushdown(const CoveringGraph& cover, const SparseVec& f_total);

// The covering of base[K] by its preimage, voltages inherited.
CoveringGraph restrict_cover(const CoveringGraph& cover, const std::vector<int>& K);

// Cutoff profile 1 - d(x, F)/rho, clipped to [0,1]: 1 on F, 0 at distance
// >= rho, linear in between; supported in the rho-neighborhood of F.
SparseVec distance_cutoff(const LazyGraph& g, const std::vector<Vid>& F, int rho);

}  // namespace speclab

#include "speclab/covering.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>
#include <sstream>

namespace speclab {

// ---- words ---------------------------------------------------------------

Word parse_word(const std::string& text, const std::vector<std::string>& generators) {
  Word w;
  std::istringstream in(text);
  std::string tok;
  while (in >> tok) {
    Letter l;
    std::string name = tok;
    const auto caret = tok.find('^');
    if (caret != std::string::npos) {
      name = tok.substr(0, caret);
      const std::string e = tok.substr(caret + 1);
      if (e == "-1")
        l.exp = -1;
      else if (e == "1" || e == "+1")
        l.exp = 1;
      else
        throw SchemaError("voltage word: unsupported exponent \"" + e + "\"");
    }
    l.gen = -1;
    for (std::size_t i = 0; i < generators.size(); ++i)
      if (generators[i] == name) l.gen = static_cast<int>(i);
    if (l.gen < 0) throw SchemaError("voltage word uses unknown generator \"" + name + "\"");
    w.push_back(l);
  }
  return w;
}

std::string format_word(const Word& w, const std::vector<std::string>& generators) {
  std::string out;
  for (const Letter& l : w) {
    if (!out.empty()) out += ' ';
    out += generators[l.gen];
    if (l.exp < 0) out += "^-1";
  }
  return out;
}

// ---- monodromy actions ----------------------------------------------------

MonodromyAction::MonodromyAction(std::vector<std::string> generators)
    : gens_(std::move(generators)) {
  if (gens_.empty()) throw SchemaError("action needs at least one generator");
  for (std::size_t i = 0; i < gens_.size(); ++i)
    for (std::size_t j = i + 1; j < gens_.size(); ++j)
      if (gens_[i] == gens_[j])
        throw SchemaError("duplicate generator name \"" + gens_[i] + "\"");
}

int MonodromyAction::generator_index(const std::string& name) const {
  for (std::size_t i = 0; i < gens_.size(); ++i)
    if (gens_[i] == name) return static_cast<int>(i);
  throw SchemaError("unknown generator \"" + name + "\"");
}

Vid MonodromyAction::act_word(const Word& w, Vid fiber) const {
  for (const Letter& l : w) fiber = l.exp > 0 ? act(l.gen, fiber) : act_inverse(l.gen, fiber);
  return fiber;
}

Vid MonodromyAction::act_word_inverse(const Word& w, Vid fiber) const {
  for (auto it = w.rbegin(); it != w.rend(); ++it)
    fiber = it->exp > 0 ? act_inverse(it->gen, fiber) : act(it->gen, fiber);
  return fiber;
}

namespace {

std::vector<std::string> letter_names(int rank) {
  if (rank < 1 || rank > 26) throw SchemaError("generator rank must be between 1 and 26");
  std::vector<std::string> out;
  for (int i = 0; i < rank; ++i) out.push_back(std::string(1, static_cast<char>('a' + i)));
  return out;
}

class PermutationAction final : public MonodromyAction {
 public:
  PermutationAction(std::vector<std::string> gens, int degree,
                    std::vector<std::vector<int>> perms)
      : MonodromyAction(std::move(gens)), degree_(degree), perms_(std::move(perms)) {
    if (degree_ < 1) throw SchemaError("permutation degree must be at least 1");
    if (perms_.size() != gens_.size())
      throw SchemaError("need exactly one permutation per generator");
    inv_.resize(perms_.size());
    for (std::size_t g = 0; g < perms_.size(); ++g) {
      if (static_cast<int>(perms_[g].size()) != degree_)
        throw SchemaError("permutation length must equal the degree");
      std::vector<int> seen(degree_, 0);
      inv_[g].assign(degree_, 0);
      for (int y = 0; y < degree_; ++y) {
        const int z = perms_[g][y];
        if (z < 0 || z >= degree_ || seen[z]) throw SchemaError("not a permutation");
        seen[z] = 1;
        inv_[g][z] = y;
      }
    }
  }
  std::string kind() const override { return "permutations"; }
  bool finite() const override { return true; }
  std::int64_t fiber_size() const override { return degree_; }
  Vid act(int g, Vid y) const override { return perms_[g][check(y)]; }
  Vid act_inverse(int g, Vid y) const override { return inv_[g][check(y)]; }

 private:
  int check(Vid y) const {
    if (y < 0 || y >= degree_) throw SpeclabError("fiber element out of range");
    return static_cast<int>(y);
  }
  int degree_;
  std::vector<std::vector<int>> perms_, inv_;
};

class ShiftAction final : public MonodromyAction {
 public:
  ShiftAction(std::vector<std::string> gens, std::vector<std::int64_t> shifts)
      : MonodromyAction(std::move(gens)), shifts_(std::move(shifts)) {
    if (shifts_.size() != gens_.size()) throw SchemaError("need one shift per generator");
  }
  std::string kind() const override { return "z_shift"; }
  bool finite() const override { return false; }
  std::int64_t fiber_size() const override { return -1; }
  Vid act(int g, Vid y) const override { return y + shifts_[g]; }
  Vid act_inverse(int g, Vid y) const override { return y - shifts_[g]; }
  std::int64_t shift(int g) const { return shifts_[g]; }

 private:
  std::vector<std::int64_t> shifts_;
};

// Shared interner: ids are assigned in first-touch order, which is
// deterministic for any fixed (single-threaded) traversal; access is
// synchronized so concurrent enumeration stays safe.
template <typename State>
class Interner {
 public:
  explicit Interner(State initial) {
    states_.push_back(initial);
    index_[std::move(initial)] = 0;
  }
  State get(Vid id) const {
    std::lock_guard<std::mutex> lock(mu_);
    if (id < 0 || id >= static_cast<Vid>(states_.size()))
      throw SpeclabError("unknown fiber element id");
    return states_[id];
  }
  Vid put(State s) const {
    std::lock_guard<std::mutex> lock(mu_);
    auto [it, inserted] = index_.try_emplace(s, static_cast<Vid>(states_.size()));
    if (inserted) states_.push_back(std::move(s));
    return it->second;
  }

 private:
  mutable std::mutex mu_;
  mutable std::vector<State> states_;
  mutable std::map<State, Vid> index_;
};

class LatticeAction final : public MonodromyAction {
 public:
  LatticeAction(std::vector<std::string> gens, int dim,
                std::vector<std::vector<std::int64_t>> shifts)
      : MonodromyAction(std::move(gens)),
        dim_(dim),
        shifts_(std::move(shifts)),
        intern_(std::vector<std::int64_t>(dim > 0 ? dim : 0, 0)) {
    if (dim_ < 1) throw SchemaError("lattice dimension must be at least 1");
    if (shifts_.size() != gens_.size()) throw SchemaError("need one shift vector per generator");
    for (const auto& s : shifts_)
      if (static_cast<int>(s.size()) != dim_)
        throw SchemaError("shift vector length must equal the dimension");
  }
  std::string kind() const override { return "z_lattice"; }
  bool finite() const override { return false; }
  std::int64_t fiber_size() const override { return -1; }
  Vid act(int g, Vid y) const override { return moved(g, y, +1); }
  Vid act_inverse(int g, Vid y) const override { return moved(g, y, -1); }
  std::string fiber_label(Vid y) const override {
    const auto s = intern_.get(y);
    std::string out = "(";
    for (int i = 0; i < dim_; ++i) out += (i ? "," : "") + std::to_string(s[i]);
    return out + ")";
  }

 private:
  Vid moved(int g, Vid y, int sign) const {
    auto s = intern_.get(y);
    for (int i = 0; i < dim_; ++i) s[i] += sign * shifts_[g][i];
    return intern_.put(std::move(s));
  }
  int dim_;
  std::vector<std::vector<std::int64_t>> shifts_;
  Interner<std::vector<std::int64_t>> intern_;
};

class FreeAction final : public MonodromyAction {
 public:
  explicit FreeAction(int rank)
      : MonodromyAction(letter_names(rank)), intern_(std::vector<int>{}) {}
  std::string kind() const override { return "free"; }
  bool finite() const override { return false; }
  std::int64_t fiber_size() const override { return -1; }
  Vid act(int g, Vid y) const override { return appended(y, g + 1); }
  Vid act_inverse(int g, Vid y) const override { return appended(y, -(g + 1)); }
  std::string fiber_label(Vid y) const override {
    const auto w = intern_.get(y);
    if (w.empty()) return "e";
    std::string out;
    for (int letter : w) {
      out += gens_[std::abs(letter) - 1];
      if (letter < 0) out += "^-1";
    }
    return out;
  }

 private:
  // Right multiplication by a letter, with free reduction.
  Vid appended(Vid y, int letter) const {
    auto w = intern_.get(y);
    if (!w.empty() && w.back() == -letter)
      w.pop_back();
    else
      w.push_back(letter);
    return intern_.put(std::move(w));
  }
  Interner<std::vector<int>> intern_;
};

class ProductAction final : public MonodromyAction {
 public:
  explicit ProductAction(std::vector<std::shared_ptr<MonodromyAction>> factors)
      : MonodromyAction(shared_generators(factors)),
        factors_(std::move(factors)),
        intern_(base_tuple(factors_)) {
    all_finite_ = true;
    size_ = 1;
    for (const auto& f : factors_) {
      if (!f->finite()) {
        all_finite_ = false;
        break;
      }
      size_ *= f->fiber_size();
      if (size_ > (std::int64_t{1} << 40)) throw SchemaError("product fiber too large");
    }
  }
  std::string kind() const override { return "product"; }
  bool finite() const override { return all_finite_; }
  std::int64_t fiber_size() const override { return all_finite_ ? size_ : -1; }
  Vid act(int g, Vid y) const override { return moved(g, y, false); }
  Vid act_inverse(int g, Vid y) const override { return moved(g, y, true); }
  std::string fiber_label(Vid y) const override {
    const auto t = tuple_of(y);
    std::string out = "(";
    for (std::size_t i = 0; i < t.size(); ++i)
      out += (i ? ";" : "") + factors_[i]->fiber_label(t[i]);
    return out + ")";
  }

 private:
  static std::vector<std::string> shared_generators(
      const std::vector<std::shared_ptr<MonodromyAction>>& fs) {
    if (fs.empty()) throw SchemaError("product action needs at least one factor");
    for (const auto& f : fs)
      if (f->generators() != fs[0]->generators())
        throw SchemaError("product factors must share one generator list");
    return fs[0]->generators();
  }
  static std::vector<Vid> base_tuple(const std::vector<std::shared_ptr<MonodromyAction>>& fs) {
    std::vector<Vid> t;
    for (const auto& f : fs) t.push_back(f->base_fiber());
    return t;
  }
  // Finite products use positional (mixed-radix) ids so that every id in
  // [0, fiber_size) denotes a tuple; infinite products intern first-touch.
  std::vector<Vid> tuple_of(Vid y) const {
    if (!all_finite_) return intern_.get(y);
    if (y < 0 || y >= size_) throw SpeclabError("fiber element out of range");
    std::vector<Vid> t(factors_.size());
    for (std::size_t i = factors_.size(); i-- > 0;) {
      const std::int64_t k = factors_[i]->fiber_size();
      t[i] = y % k;
      y /= k;
    }
    return t;
  }
  Vid id_of(std::vector<Vid> t) const {
    if (!all_finite_) return intern_.put(std::move(t));
    Vid y = 0;
    for (std::size_t i = 0; i < factors_.size(); ++i)
      y = y * factors_[i]->fiber_size() + t[i];
    return y;
  }
  Vid moved(int g, Vid y, bool inverse) const {
    auto t = tuple_of(y);
    for (std::size_t i = 0; i < factors_.size(); ++i)
      t[i] = inverse ? factors_[i]->act_inverse(g, t[i]) : factors_[i]->act(g, t[i]);
    return id_of(std::move(t));
  }
  std::vector<std::shared_ptr<MonodromyAction>> factors_;
  Interner<std::vector<Vid>> intern_;
  bool all_finite_ = true;
  std::int64_t size_ = 1;
};

std::vector<std::string> generators_or_default(const json& p, std::size_t count,
                                               const std::string& where) {
  if (p.contains("generators")) {
    auto g = p.at("generators").get<std::vector<std::string>>();
    if (g.size() != count) throw SchemaError(where + ": generator list length mismatch");
    return g;
  }
  return letter_names(static_cast<int>(count));
}

}  // namespace

std::shared_ptr<MonodromyAction> make_permutation_action(std::vector<std::string> generators,
                                                         int degree,
                                                         std::vector<std::vector<int>> perms) {
  return std::make_shared<PermutationAction>(std::move(generators), degree, std::move(perms));
}

std::shared_ptr<MonodromyAction> make_shift_action(std::vector<std::string> generators,
                                                   std::vector<std::int64_t> shifts) {
  return std::make_shared<ShiftAction>(std::move(generators), std::move(shifts));
}

std::shared_ptr<MonodromyAction> make_lattice_action(
    std::vector<std::string> generators, int dim,
    std::vector<std::vector<std::int64_t>> shifts) {
  return std::make_shared<LatticeAction>(std::move(generators), dim, std::move(shifts));
}

std::shared_ptr<MonodromyAction> make_free_action(int rank) {
  return std::make_shared<FreeAction>(rank);
}

std::shared_ptr<MonodromyAction> make_product_action(
    std::vector<std::shared_ptr<MonodromyAction>> factors) {
  return std::make_shared<ProductAction>(std::move(factors));
}

std::shared_ptr<MonodromyAction> build_action(const json& spec) {
  json_require_keys(spec, {"type", "params"}, {"type", "params"}, "action");
  const std::string type = spec.at("type").get<std::string>();
  const json& p = spec.at("params");
  if (type == "permutations") {
    json_require_keys(p, {"generators", "degree", "perms"}, {"degree", "perms"},
                      "permutations params");
    auto perms = p.at("perms").get<std::vector<std::vector<int>>>();
    auto gens = generators_or_default(p, perms.size(), "permutations");
    return make_permutation_action(std::move(gens), json_get_int(p, "degree", "permutations"),
                                   std::move(perms));
  }
  if (type == "z_shift") {
    json_require_keys(p, {"generators", "shifts"}, {"shifts"}, "z_shift params");
    auto shifts = p.at("shifts").get<std::vector<std::int64_t>>();
    auto gens = generators_or_default(p, shifts.size(), "z_shift");
    return make_shift_action(std::move(gens), std::move(shifts));
  }
  if (type == "z_lattice") {
    json_require_keys(p, {"generators", "dim", "shifts"}, {"dim", "shifts"},
                      "z_lattice params");
    auto shifts = p.at("shifts").get<std::vector<std::vector<std::int64_t>>>();
    auto gens = generators_or_default(p, shifts.size(), "z_lattice");
    return make_lattice_action(std::move(gens), json_get_int(p, "dim", "z_lattice"),
                               std::move(shifts));
  }
  if (type == "free") {
    json_require_keys(p, {"rank"}, {"rank"}, "free params");
    return make_free_action(json_get_int(p, "rank", "free"));
  }
  if (type == "product") {
    json_require_keys(p, {"factors"}, {"factors"}, "product params");
    std::vector<std::shared_ptr<MonodromyAction>> fs;
    for (const auto& f : p.at("factors")) fs.push_back(build_action(f));
    return make_product_action(std::move(fs));
  }
  throw SchemaError("unknown action type \"" + type + "\"");
}

// ---- the covering ---------------------------------------------------------

CoveringGraph::CoveringGraph(WeightedGraph base, std::shared_ptr<MonodromyAction> action,
                             std::vector<Word> voltage)
    : base_(std::move(base)), action_(std::move(action)), voltage_(std::move(voltage)) {
  if (!action_) throw SchemaError("covering needs an action");
  if (voltage_.size() != base_.edges().size())
    throw SchemaError("need one voltage word per base edge");
  const int k = static_cast<int>(action_->generators().size());
  for (const Word& w : voltage_)
    for (const Letter& l : w)
      if (l.gen < 0 || l.gen >= k || (l.exp != 1 && l.exp != -1))
        throw SchemaError("voltage word uses an unknown generator or exponent");
}

Vid CoveringGraph::encode(int base_vertex, Vid fiber) const {
  return fiber * base_.size() + base_vertex;
}

int CoveringGraph::project(Vid total_vertex) const {
  const Vid n = base_.size();
  return static_cast<int>(((total_vertex % n) + n) % n);
}

Vid CoveringGraph::fiber_of(Vid total_vertex) const {
  return (total_vertex - project(total_vertex)) / base_.size();
}

namespace {

class DerivedGraph final : public LazyGraph {
 public:
  DerivedGraph(WeightedGraph base, std::shared_ptr<MonodromyAction> action,
               std::vector<Word> voltage)
      : base_(std::move(base)), action_(std::move(action)), voltage_(std::move(voltage)) {
    incidence_.assign(base_.size(), {});
    for (int idx = 0; idx < static_cast<int>(base_.edges().size()); ++idx) {
      const auto& e = base_.edges()[idx];
      incidence_[e.u].push_back({idx, true});
      incidence_[e.v].push_back({idx, false});
    }
  }

  Vid origin() const override { return encode(0, action_->base_fiber()); }

  std::vector<std::pair<Vid, double>> neighbors(Vid v) const override {
    const int x = project(v);
    const Vid i = fiber_of(v);
    std::map<Vid, double> acc;
    for (const auto& [idx, forward] : incidence_[x]) {
      const auto& e = base_.edges()[idx];
      const Word& w = voltage_[idx];
      const Vid j = forward ? action_->act_word(w, i) : action_->act_word_inverse(w, i);
      const Vid target = encode(forward ? e.v : e.u, j);
      if (target == v) continue;  // derived loop, spectrally inert
      acc[target] += e.c;
    }
    return {acc.begin(), acc.end()};
  }

  double measure(Vid v) const override { return base_.measure(project(v)); }
  double potential(Vid v) const override { return base_.potential(project(v)); }
  std::string label(Vid v) const override {
    return std::to_string(project(v)) + "@" + action_->fiber_label(fiber_of(v));
  }

  // The component of the origin collapses radially in two catalog shapes:
  //   - single-vertex base whose loops carry distinct free generators:
  //     the component is a (2L)-regular tree (L = loop count; L=1 is a line);
  //   - single loop with a nonzero integer shift: the component is a line.
  std::optional<RadialProfile> radial_profile() const override {
    if (base_.size() != 1 || base_.edges().empty()) return std::nullopt;
    const double c = base_.edges()[0].c;
    for (const auto& e : base_.edges())
      if (e.u != 0 || e.v != 0 || e.c != c) return std::nullopt;
    const double m = base_.measure(0), V = base_.potential(0);
    const std::string kind = action_->kind();
    if (kind == "z_shift" && base_.edges().size() == 1 && voltage_[0].size() == 1) {
      const auto* sa = dynamic_cast<const ShiftAction*>(action_.get());
      if (!sa || sa->shift(voltage_[0][0].gen) == 0) return std::nullopt;
      RadialProfile p;
      p.c = c, p.m = m, p.V = V;
      p.level_count = [](std::int64_t k) { return k == 0 ? 1.0 : 2.0; };
      p.level_edges = [](std::int64_t) { return 2.0; };
      return p;
    }
    if (kind == "free") {
      std::set<int> used;
      for (const Word& w : voltage_) {
        if (w.size() != 1) return std::nullopt;
        if (!used.insert(w[0].gen).second) return std::nullopt;
      }
      const int L = static_cast<int>(voltage_.size());
      const int deg = 2 * L;
      RadialProfile p;
      p.c = c, p.m = m, p.V = V;
      p.level_count = [deg](std::int64_t k) {
        if (k == 0) return 1.0;
        double n = deg;
        for (std::int64_t i = 1; i < k; ++i) n *= deg - 1;
        return n;
      };
      p.level_edges = [deg, lc = p.level_count](std::int64_t k) {
        return k == 0 ? double(deg) : lc(k) * (deg - 1);
      };
      return p;
    }
    return std::nullopt;
  }

 private:
  Vid encode(int x, Vid fiber) const { return fiber * base_.size() + x; }
  int project(Vid v) const {
    const Vid n = base_.size();
    return static_cast<int>(((v % n) + n) % n);
  }
  Vid fiber_of(Vid v) const { return (v - project(v)) / base_.size(); }

  WeightedGraph base_;
  std::shared_ptr<MonodromyAction> action_;
  std::vector<Word> voltage_;
  std::vector<std::vector<std::pair<int, bool>>> incidence_;
};

}  // namespace

std::shared_ptr<const LazyGraph> CoveringGraph::total() const {
  return std::make_shared<DerivedGraph>(base_, action_, voltage_);
}

WeightedGraph CoveringGraph::total_finite() const {
  if (!finite_fiber()) throw SpeclabError("cannot materialize an infinite-fiber covering");
  const std::int64_t k = fiber_size();
  const int n = base_.size();
  if (k * n > 5'000'000) throw SpeclabError("covering too large to materialize");
  std::vector<EdgeRec> edges;
  for (std::size_t idx = 0; idx < base_.edges().size(); ++idx) {
    const auto& e = base_.edges()[idx];
    for (Vid i = 0; i < k; ++i) {
      const Vid j = action_->act_word(voltage_[idx], i);
      edges.push_back({static_cast<int>(i * n + e.u), static_cast<int>(j * n + e.v), e.c});
    }
  }
  std::vector<double> m(k * n), V(k * n);
  for (Vid i = 0; i < k; ++i)
    for (int x = 0; x < n; ++x) {
      m[i * n + x] = base_.measure(x);
      V[i * n + x] = base_.potential(x);
    }
  return WeightedGraph(static_cast<int>(k * n), std::move(edges), std::move(m), std::move(V));
}

CoveringGraph build_cover(const json& spec) {
  json_require_keys(spec, {"base", "action", "voltage"}, {"base", "action"}, "cover");
  WeightedGraph base = build_graph(spec.at("base"));
  auto action = build_action(spec.at("action"));
  std::vector<Word> volt(base.edges().size());
  std::vector<bool> seen(base.edges().size(), false);
  if (spec.contains("voltage")) {
    for (const auto& entry : spec.at("voltage")) {
      if (!entry.is_array() || entry.size() != 2)
        throw SchemaError("cover: each voltage entry must be [edge index, word]");
      const int idx = entry.at(0).get<int>();
      if (idx < 0 || idx >= static_cast<int>(volt.size()))
        throw SchemaError("cover: voltage edge index out of range");
      if (seen[idx]) throw SchemaError("cover: duplicate voltage for one edge");
      seen[idx] = true;
      volt[idx] = parse_word(entry.at(1).get<std::string>(), action->generators());
    }
  }
  return CoveringGraph(std::move(base), std::move(action), std::move(volt));
}

// ---- lifts and pushdowns --------------------------------------------------

std::vector<double> lift_function(const CoveringGraph& cover, const std::vector<double>& f0) {
  if (!cover.finite_fiber())
    throw SpeclabError("lifting to an infinite fiber needs an explicit fiber window");
  const int n = cover.base().size();
  if (static_cast<int>(f0.size()) != n) throw SpeclabError("lift: function length mismatch");
  const std::int64_t k = cover.fiber_size();
  std::vector<double> out(k * n);
  for (Vid i = 0; i < k; ++i)
    for (int x = 0; x < n; ++x) out[i * n + x] = f0[x];
  return out;
}

SparseVec lift_function(const CoveringGraph& cover, const std::vector<double>& f0,
                        const std::vector<Vid>& fiber_window) {
  const int n = cover.base().size();
  if (static_cast<int>(f0.size()) != n) throw SpeclabError("lift: function length mismatch");
  if (fiber_window.empty()) throw SpeclabError("lift: empty fiber window");
  SparseVec out;
  for (Vid i : fiber_window)
    for (int x = 0; x < n; ++x)
      if (f0[x] != 0.0) out[cover.encode(x, i)] = f0[x];
  return out;
}

std::vector<double> pushdown(const CoveringGraph& cover, const std::vector<double>& f_total) {
  const int n = cover.base().size();
  const std::int64_t k = cover.fiber_size();
  if (k < 0 || static_cast<std::int64_t>(f_total.size()) != k * n)
    throw SpeclabError("pushdown: function length must be fiber size times base size");
  std::vector<double> out(n, 0.0);
  for (Vid i = 0; i < k; ++i)
    for (int x = 0; x < n; ++x) out[x] += f_total[i * n + x] * f_total[i * n + x];
  for (double& v : out) v = std::sqrt(v);
  return out;
}

std::vector<double> pushdown(const CoveringGraph& cover, const SparseVec& f_total) {
  std::vector<double> out(cover.base().size(), 0.0);
  for (const auto& [v, val] : f_total) out[cover.project(v)] += val * val;
  for (double& v : out) v = std::sqrt(v);
  return out;
}

CoveringGraph restrict_cover(const CoveringGraph& cover, const std::vector<int>& K) {
  if (K.empty()) throw SpeclabError("restriction to an empty vertex set");
  std::vector<int> old_to_new;
  WeightedGraph sub = cover.base().induced_subgraph(K, &old_to_new);
  std::vector<Word> volt;
  const auto& edges = cover.base().edges();
  for (std::size_t idx = 0; idx < edges.size(); ++idx)
    if (old_to_new[edges[idx].u] != -1 && old_to_new[edges[idx].v] != -1)
      volt.push_back(cover.voltage()[idx]);
  return CoveringGraph(std::move(sub), cover.action_shared(), std::move(volt));
}

SparseVec distance_cutoff(const LazyGraph& g, const std::vector<Vid>& F, int rho) {
  if (rho <= 0) throw SpeclabError("cutoff radius must be positive");
  if (F.empty()) throw SpeclabError("cutoff needs a non-empty core set");
  std::map<Vid, int> dist;
  std::deque<Vid> dq;
  for (Vid v : F)
    if (dist.emplace(v, 0).second) dq.push_back(v);
  while (!dq.empty()) {
    const Vid v = dq.front();
    dq.pop_front();
    const int d = dist.at(v);
    if (d >= rho) continue;
    for (const auto& [y, c] : g.neighbors(v)) {
      (void)c;
      if (dist.emplace(y, d + 1).second) dq.push_back(y);
    }
  }
  SparseVec out;
  for (const auto& [v, d] : dist) {
    const double val = 1.0 - static_cast<double>(d) / rho;
    if (val > 0) out[v] = val;
  }
  return out;
}

}  // namespace speclab

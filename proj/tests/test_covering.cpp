#include <doctest.h>

#include <cmath>
#include <vector>

#include "speclab/covering.hpp"
#include "speclab/spectral.hpp"

using namespace speclab;

TEST_SUITE("covering") {

TEST_CASE("trivial double cover is two disjoint copies") {
  auto act = make_permutation_action({"a"}, 2, {{0, 1}});
  CoveringGraph c(make_complete(2), act, {Word{}});
  const WeightedGraph t = c.total_finite();
  CHECK(t.size() == 4);
  CHECK(t.component_count() == 2);
  CHECK(lambda0_finite(t).value ==
        doctest::Approx(lambda0_finite(c.base()).value).epsilon(1e-12));

  const std::vector<double> lift = lift_function(c, {1.0, 0.0});
  CHECK(lift == std::vector<double>{1.0, 0.0, 1.0, 0.0});
  const std::vector<double> push = pushdown(c, lift);
  CHECK(push[0] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
  CHECK(push[1] == 0.0);
}

TEST_CASE("six-cycle over the triangle: connected double cover") {
  auto act = make_permutation_action({"a"}, 2, {{1, 0}});
  CoveringGraph c(make_cycle(3), act, {Word{}, Word{}, Word{{0, 1}}});
  const WeightedGraph t = c.total_finite();
  CHECK(t.size() == 6);
  CHECK(t.component_count() == 1);

  // Pushdown: norms preserved exactly, Rayleigh quotients never raised.
  Rng rng(7);
  int bad = 0;
  double worst = 1.0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> f(6);
    for (auto& v : f) v = gaussian(rng);
    const std::vector<double> f0 = pushdown(c, f);
    bool zero = true;
    for (double v : f0)
      if (v != 0.0) zero = false;
    if (zero) continue;
    const double r0 = rayleigh_quotient(c.base(), f0);
    const double r1 = rayleigh_quotient(t, f);
    worst = std::min(worst, r1 - r0);
    if (r0 > r1 + 1e-9) ++bad;
    if (std::abs(norm_sq(c.base(), f0) - norm_sq(t, f)) > 1e-12) ++bad;
  }
  CHECK(bad == 0);
  CHECK(worst >= -1e-9);
}

TEST_CASE("loop over one vertex unrolls to the integer line") {
  auto act = make_shift_action({"a"}, {1});
  CoveringGraph c(make_bouquet(1), act, {Word{{0, 1}}});
  auto tz = c.total();
  const auto nb = tz->neighbors(tz->origin());
  REQUIRE(nb.size() == 2);
  CHECK(nb[0].second == 1.0);
  CHECK(nb[1].second == 1.0);
  CHECK(nb[0].first != nb[1].first);

  ExhaustionOptions eo;
  eo.schedule = {100, 1000};
  const SpectralEstimate ex = lambda0_exhaustion(*tz, eo);
  CHECK(ex.value >= 0.0);
  CHECK(ex.value < 1e-5);
}

TEST_CASE("two loops unroll to the 4-regular tree") {
  auto act = make_free_action(2);
  CoveringGraph c(make_bouquet(2), act, {Word{{0, 1}}, Word{{1, 1}}});
  auto tt = c.total();
  const Truncation b3 = truncate_ball(*tt, {tt->origin()}, 3);
  CHECK(b3.graph.size() == 53);  // 1 + 4 + 12 + 36
  for (int i = 0; i < b3.graph.size(); ++i)
    if (b3.distance[i] < 3) CHECK(b3.graph.adjacency()[i].size() == 4);

  ExhaustionOptions eo;
  for (int r = 4; r <= 48; r += 4) eo.schedule.push_back(r);
  const SpectralEstimate ex = lambda0_exhaustion(*tt, eo);
  CHECK(ex.value == doctest::Approx(0.542471).epsilon(2e-5));
}

TEST_CASE("distance cutoff tapers linearly and has bounded support") {
  auto act = make_free_action(2);
  CoveringGraph c(make_bouquet(2), act, {Word{{0, 1}}, Word{{1, 1}}});
  auto tt = c.total();
  const Truncation b5 = truncate_ball(*tt, {tt->origin()}, 5);
  const SparseVec chi = distance_cutoff(*tt, b5.ids, 3);

  const Truncation b8 = truncate_ball(*tt, {tt->origin()}, 8);
  int outside = 0;
  for (const auto& [v, val] : chi) {
    (void)val;
    if (!b8.index.count(v)) ++outside;
  }
  CHECK(outside == 0);
  // 1 on the set, 2/3 then 1/3 on the next two spheres, 0 after.
  for (std::size_t i = 0; i < b8.ids.size(); ++i) {
    const Vid v = b8.ids[i];
    const auto it = chi.find(v);
    const double val = it == chi.end() ? 0.0 : it->second;
    const int d = b8.distance[i];
    if (d <= 5) CHECK(val == doctest::Approx(1.0));
    else if (d == 6) CHECK(val == doctest::Approx(2.0 / 3.0));
    else if (d == 7) CHECK(val == doctest::Approx(1.0 / 3.0));
    else CHECK(val == 0.0);
  }
}

TEST_CASE("random finite covers preserve the bottom of the spectrum") {
  Rng rng(42);
  double worst = 1.0, worst_abs = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + static_cast<int>(uniform_int(rng, 0, 4));
    const WeightedGraph base = random_connected_graph(rng, n, (int)uniform_int(rng, 0, 3));
    const int deg = 2 + static_cast<int>(uniform_int(rng, 0, 2));
    std::vector<std::vector<int>> perms;
    for (int g = 0; g < 2; ++g) {
      std::vector<int> p(deg);
      for (int i = 0; i < deg; ++i) p[i] = i;
      for (int i = deg - 1; i > 0; --i) std::swap(p[i], p[(int)uniform_int(rng, 0, i)]);
      perms.push_back(p);
    }
    auto act = make_permutation_action({"a", "b"}, deg, perms);
    std::vector<Word> volt;
    for (std::size_t e = 0; e < base.edges().size(); ++e) {
      Word w;
      const int len = static_cast<int>(uniform_int(rng, 0, 2));
      for (int l = 0; l < len; ++l)
        w.push_back({(int)uniform_int(rng, 0, 1), uniform(rng, 0, 1) < 0.5 ? 1 : -1});
      volt.push_back(w);
    }
    CoveringGraph c(base, act, volt);
    const double lb = lambda0_finite(base).value;
    const double lt = lambda0_finite(c.total_finite()).value;
    worst = std::min(worst, lt - lb);
    worst_abs = std::max(worst_abs, std::abs(lt - lb));
  }
  CHECK(worst >= -1e-8);     // monotonicity
  CHECK(worst_abs <= 1e-8);  // and in fact equality for finite fibers
}

TEST_CASE("restricting the base restricts the cover compatibly") {
  auto act = make_permutation_action({"a"}, 2, {{1, 0}});
  CoveringGraph c(make_cycle(3), act, {Word{}, Word{}, Word{{0, 1}}});
  const CoveringGraph r = restrict_cover(c, {0, 1});
  const WeightedGraph t = r.total_finite();
  CHECK(t.size() == 4);
  CHECK(t.component_count() == 2);
}

TEST_CASE("word parsing and monodromy round trips") {
  const std::vector<std::string> gens{"a", "b"};
  const Word w = parse_word("a b^-1 a", gens);
  REQUIRE(w.size() == 3);
  CHECK(w[0].gen == 0);
  CHECK(w[0].exp == 1);
  CHECK(w[1].gen == 1);
  CHECK(w[1].exp == -1);
  CHECK_THROWS_AS(parse_word("a c", gens), SchemaError);

  auto free2 = make_free_action(2);
  Rng rng(3);
  for (int t = 0; t < 50; ++t) {
    Word word;
    const int len = static_cast<int>(uniform_int(rng, 0, 6));
    for (int i = 0; i < len; ++i)
      word.push_back({(int)uniform_int(rng, 0, 1), uniform(rng, 0, 1) < 0.5 ? 1 : -1});
    Vid x = free2->base_fiber();
    Vid y = free2->act_word(word, x);
    // undo the word letter by letter
    for (auto it = word.rbegin(); it != word.rend(); ++it) {
      const Letter l = *it;
      y = l.exp > 0 ? free2->act_inverse(l.gen, y) : free2->act(l.gen, y);
    }
    CHECK(y == x);
  }
}

TEST_CASE("cover documents validate field by field") {
  const json good = {{"base", {{"generator", "bouquet"}, {"params", {{"loops", 2}}}}},
                     {"action", {{"type", "free"}, {"params", {{"rank", 2}}}}},
                     {"voltage", json::array({json::array({0, "a"}), json::array({1, "b"})})}};
  const CoveringGraph c = build_cover(good);
  CHECK_FALSE(c.finite_fiber());

  json bad = good;
  bad["voltage"] = json::array({json::array({7, "a"})});
  CHECK_THROWS_AS(build_cover(bad), SpeclabError);
  json bad2 = good;
  bad2["stray"] = 1;
  CHECK_THROWS_AS(build_cover(bad2), SchemaError);
  json bad3 = good;
  bad3["voltage"] = json::array({json::array({0, "q"})});
  CHECK_THROWS_AS(build_cover(bad3), SchemaError);
}

TEST_CASE("windowed lifts agree with dense lifts") {
  auto act = make_permutation_action({"a"}, 3, {{1, 2, 0}});
  CoveringGraph c(make_cycle(4), act,
                  {Word{{0, 1}}, Word{}, Word{}, Word{}});
  const std::vector<double> f0{1.0, -1.0, 2.0, 0.5};
  const std::vector<double> dense = lift_function(c, f0);
  const SparseVec sparse = lift_function(c, f0, {0, 1, 2});
  CHECK(sparse.size() == dense.size());
  for (const auto& [v, val] : sparse) {
    CHECK(val == f0[c.project(v)]);
    CHECK(val == dense[static_cast<std::size_t>(v)]);
  }
  CHECK_THROWS_AS(lift_function(c, f0, {}), SpeclabError);
}

}  // TEST_SUITE

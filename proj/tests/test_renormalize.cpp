#include <doctest.h>

#include <cmath>
#include <memory>
#include <vector>

#include "speclab/renormalize.hpp"
#include "speclab/spectral.hpp"

using namespace speclab;

namespace {

WeightedGraph k2v(double v0, double v1) {
  return WeightedGraph(2, {{0, 1, 1}}, {1, 1}, {v0, v1});
}

}  // namespace

TEST_SUITE("renormalize") {

TEST_CASE("edge graph ground states in closed form") {
  const GroundState flat = ground_state(k2v(0, 0));
  CHECK(flat.lambda == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(flat.phi[0] == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
  CHECK(flat.phi[1] == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));

  const GroundState well = ground_state(k2v(0, 1));
  // Eigenvalues of [[1,-1],[-1,2]]: (3 -+ sqrt5)/2.
  CHECK(well.lambda == doctest::Approx((3.0 - std::sqrt(5.0)) / 2.0).epsilon(1e-12));
  CHECK(well.phi[0] > 0);
  CHECK(well.phi[1] > 0);
  CHECK(well.residual < 1e-10);
}

TEST_CASE("reweighting shifts the whole spectrum to start at zero") {
  const WeightedGraph g = k2v(0, 1);
  const GroundState gs = ground_state(g);
  const WeightedGraph t = doob_transform(g, gs);
  const DenseSpectrum ts = dense_spectrum(assemble_system(t));
  CHECK(ts.values[0] == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(ts.values[1] == doctest::Approx(std::sqrt(5.0)).epsilon(1e-10));

  // The transformed bottom eigenfunction is constant.
  const GroundState tgs = ground_state(t);
  CHECK(tgs.phi[0] / tgs.phi[1] == doctest::Approx(1.0).epsilon(1e-8));

  CHECK(verify_intertwining(g, gs).pass);

  WeightedGraph p3(3, {{0, 1, 1}, {1, 2, 1}}, {1, 1, 1}, {1, 0, 1});
  const GroundState pgs = ground_state(p3);
  const DenseSpectrum ps = dense_spectrum(assemble_system(doob_transform(p3, pgs)));
  CHECK(ps.values[0] == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("disconnected graphs need the componentwise form") {
  const WeightedGraph g(4, {{0, 1, 1}, {2, 3, 1}}, {1, 1, 1, 1}, {0, 0, 5, 5});
  CHECK_THROWS_AS(ground_state(g), SpeclabError);
  const std::vector<GroundState> comps = ground_state_components(g);
  REQUIRE(comps.size() == 2);
  CHECK(comps[0].domain == std::vector<int>{0, 1});
  CHECK(comps[0].lambda == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(comps[1].domain == std::vector<int>{2, 3});
  CHECK(comps[1].lambda == doctest::Approx(5.0).epsilon(1e-12));
}

TEST_CASE("reweighting is unitary and preserves cut ratios") {
  Rng rng(99);
  int bad_norm = 0, bad_intertwine = 0, bad_ratio = 0, bad_gap = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const WeightedGraph g =
        random_connected_graph(rng, 3 + (int)uniform_int(rng, 0, 9), 3);
    const GroundState gs = ground_state(g);
    const WeightedGraph t = doob_transform(g, gs);

    std::vector<double> f(g.size());
    for (auto& v : f) v = uniform(rng, -2, 2);
    std::vector<double> pf(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) pf[i] = gs.phi[i] * f[i];
    if (std::abs(norm_sq(g, pf) - norm_sq(t, f)) > 1e-12 * std::max(1.0, norm_sq(t, f)))
      ++bad_norm;

    if (!verify_intertwining(g, gs, 20, trial).pass) ++bad_intertwine;

    if (g.size() <= 12) {
      for (int mask = 1; mask < (1 << g.size()) - 1; ++mask) {
        std::vector<int> sub;
        for (int i = 0; i < g.size(); ++i)
          if (mask & (1 << i)) sub.push_back(i);
        const CutReport a = cut_ratio(g, sub, &gs.phi);
        const CutReport b = cut_ratio(t, sub);
        if (std::abs(a.ratio - b.ratio) > 1e-12 * std::max(1.0, std::abs(b.ratio))) {
          ++bad_ratio;
          break;
        }
      }
    }

    if (!modified_cheeger_check(g, gs).pass) ++bad_gap;
  }
  CHECK(bad_norm == 0);
  CHECK(bad_intertwine == 0);
  CHECK(bad_ratio == 0);
  CHECK(bad_gap == 0);
}

TEST_CASE("constant potential reweights trivially") {
  const WeightedGraph g(3, {{0, 1, 2}, {1, 2, 3}}, {1, 2, 1}, {4, 4, 4});
  const GroundState gs = ground_state(g);
  CHECK(gs.lambda == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(gs.phi[0] == doctest::Approx(gs.phi[1]).epsilon(1e-10));
  const WeightedGraph t = doob_transform(g, gs);
  // Both weights scale by the same constant^2, so c/m survives; V drops to 0.
  CHECK(t.edges()[0].c / t.measure(0) == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(t.potential(0) == 0.0);
  CHECK(t.potential(2) == 0.0);
}

TEST_CASE("lazy reweighting by the constant function changes nothing") {
  auto base = std::make_shared<BlobChainGraph>(3, 5);
  const DoobGraph d(base, [](Vid) { return 1.0; });
  CHECK(d.neighbors(d.origin()) == base->neighbors(base->origin()));
  CHECK(d.measure(d.origin()) == base->measure(base->origin()));
  CHECK(d.potential(d.origin()) == 0.0);
}

}  // TEST_SUITE

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "speclab/amenability.hpp"
#include "speclab/covering.hpp"

using namespace speclab;

namespace {

// Breadth-first ball of the action, in discovery order.
std::vector<Vid> action_ball(const MonodromyAction& a, int radius) {
  const auto sym = symmetrize_generators(a, {});
  std::vector<Vid> w{a.base_fiber()};
  std::vector<Vid> frontier = w;
  for (int r = 0; r < radius; ++r) {
    std::vector<Vid> next;
    for (Vid x : frontier)
      for (const Letter& l : sym) {
        const Vid y = letter_step(a, l, x);
        if (std::find(w.begin(), w.end(), y) == w.end() &&
            std::find(next.begin(), next.end(), y) == next.end())
          next.push_back(y);
      }
    for (Vid y : next) w.push_back(y);
    frontier = next;
  }
  return w;
}

}  // namespace

TEST_SUITE("amenability") {

TEST_CASE("orbit graphs on windows: line segment, small group, tree ball") {
  auto zshift = make_shift_action({"t"}, {1});
  std::vector<Vid> w;
  for (Vid i = 0; i < 10; ++i) w.push_back(i);
  const SchreierGraph sg = schreier_graph(*zshift, w);
  CHECK(sg.graph.size() == 10);
  CHECK(sg.graph.edges().size() == 9);
  CHECK(sg.stubs[0] == 1.0);
  CHECK(sg.stubs[9] == 1.0);
  for (int i = 1; i < 9; ++i) CHECK(sg.stubs[i] == 0.0);

  auto s3 = make_permutation_action({"r", "s"}, 3, {{1, 2, 0}, {1, 0, 2}});
  const SchreierGraph sp = schreier_graph(*s3, {0, 1, 2});
  CHECK(sp.graph.size() == 3);
  CHECK(sp.graph.edges().size() == 6);  // includes the swap's fixed-point loop

  auto free2 = make_free_action(2);
  const SchreierGraph sf = schreier_graph(*free2, action_ball(*free2, 2));
  int stub_vertices = 0;
  double stub_edges = 0;
  for (double s : sf.stubs) {
    if (s > 0) ++stub_vertices;
    stub_edges += s;
  }
  CHECK(sf.graph.size() == 17);  // 1 + 4 + 12
  CHECK(stub_vertices == 12);
  CHECK(stub_edges == 36.0);  // 12 boundary vertices x 3 outward steps
}

TEST_CASE("boundary sets are computed exactly") {
  auto zshift = make_shift_action({"t"}, {1});
  std::vector<Vid> E;
  for (Vid i = 0; i < 8; ++i) E.push_back(i);
  const std::vector<Vid> b = folner_boundary(*zshift, E);
  REQUIRE(b.size() == 2);
  CHECK(b[0] == 0);
  CHECK(b[1] == 7);

  auto s3 = make_permutation_action({"r", "s"}, 3, {{1, 2, 0}, {1, 0, 2}});
  CHECK(folner_boundary(*s3, {0, 1, 2}).empty());
}

TEST_CASE("almost-invariant sets: found on shifts, absent on free pairs") {
  auto zshift = make_shift_action({"t"}, {1});
  const FolnerSearchResult r =
      folner_search(*zshift, {}, 0.05, {.max_ball_radius = 40});
  CHECK(r.found);
  CHECK(r.certificate.ratio < 0.05);
  CHECK(folner_boundary(*zshift, r.certificate.subset) == r.certificate.boundary);

  auto s3 = make_permutation_action({"r", "s"}, 3, {{1, 2, 0}, {1, 0, 2}});
  const FolnerSearchResult rf = folner_search(*s3, {}, 1e-9);
  CHECK(rf.found);
  CHECK(rf.certificate.ratio == 0.0);
  CHECK(rf.certificate.subset.size() == 3);  // the whole finite fiber

  auto free2 = make_free_action(2);
  FolnerBudget b;
  b.max_ball_radius = 8;
  b.max_set_size = 20000;
  b.erosion_rounds = 2000;
  const FolnerSearchResult rr = folner_search(*free2, {}, 0.2, b);
  CHECK_FALSE(rr.found);
  CHECK(rr.best_ratio >= 0.5);
}

TEST_CASE("return-probability series: exact chains and window walks") {
  auto zshift = make_shift_action({"t"}, {1});
  const RhoEstimate z = rw_radius_estimate(*zshift, {}, 40);
  CHECK(z.method == "distance-chain");
  // p_2 = 1/2, so the first entry is 2^{-1/2}.
  CHECK(z.series.front().second == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
  int drops = 0;
  for (std::size_t i = 1; i < z.series.size(); ++i)
    if (z.series[i].second < z.series[i - 1].second - 1e-12) ++drops;
  CHECK(drops == 0);

  auto free2 = make_free_action(2);
  const RhoEstimate f = rw_radius_estimate(*free2, {}, 40);
  CHECK(f.value == doctest::Approx(0.7798).epsilon(7e-4));
  CHECK(std::abs(f.value - std::sqrt(3.0) / 2.0) < 0.1);  // the n->inf limit
  for (std::size_t i = 1; i < f.series.size(); ++i)
    CHECK(f.series[i].second >= f.series[i - 1].second - 1e-12);

  auto s3 = make_permutation_action({"r", "s"}, 3, {{1, 2, 0}, {1, 0, 2}});
  const RhoEstimate sw = rw_radius_estimate(*s3, {}, 20);
  CHECK(sw.method == "window-walk");
  for (std::size_t i = 1; i < sw.series.size(); ++i)
    CHECK(sw.series[i].second >= sw.series[i - 1].second - 1e-12);

  auto one = make_permutation_action({"g"}, 1, {{0}});
  for (const auto& [n, v] : rw_radius_estimate(*one, {}, 10).series) {
    (void)n;
    CHECK(v == 1.0);
  }
}

TEST_CASE("chain reduction agrees with the generic walk on the same action") {
  auto zshift = make_shift_action({"t"}, {1});
  const RhoEstimate chain = rw_radius_estimate(*zshift, {}, 20);
  auto lattice = make_lattice_action({"t"}, 1, {{1}});
  const RhoEstimate walk = rw_radius_estimate(*lattice, {}, 20);
  CHECK(chain.method == "distance-chain");
  CHECK(walk.method == "window-walk");
  REQUIRE(chain.series.size() == walk.series.size());
  for (std::size_t i = 0; i < chain.series.size(); ++i)
    CHECK(chain.series[i].second ==
          doctest::Approx(walk.series[i].second).epsilon(1e-12));
}

TEST_CASE("composite verdicts: certify, gather evidence, or stay open") {
  auto zshift = make_shift_action({"t"}, {1});
  const AmenabilityVerdict vz = amenability_verdict(*zshift, {}, 0.05, {});
  CHECK(vz.status == "CertifiedAmenable");
  CHECK(vz.certificate.has_value());

  auto s3 = make_permutation_action({"r", "s"}, 3, {{1, 2, 0}, {1, 0, 2}});
  const AmenabilityVerdict vs = amenability_verdict(*s3, {}, 1e-6, {});
  CHECK(vs.status == "CertifiedAmenable");
  CHECK(vs.certificate->ratio == 0.0);

  auto free2 = make_free_action(2);
  VerdictOptions vo;
  vo.folner.max_ball_radius = 8;
  vo.folner.max_set_size = 20000;
  vo.folner.erosion_rounds = 500;
  const AmenabilityVerdict vf = amenability_verdict(*free2, {}, 0.2, vo);
  CHECK(vf.status == "EvidenceNonamenable");
  REQUIRE(vf.rho_lower.has_value());
  CHECK(*vf.rho_lower > 0.85);
  CHECK(*vf.rho_lower < 0.87);

  // Amenable action, starved budget: the walk climbs toward 1, so the verdict
  // must stay open rather than turn into counter-evidence.
  VerdictOptions tiny;
  tiny.folner.max_ball_radius = 3;
  tiny.folner.erosion_rounds = 10;
  const AmenabilityVerdict vt = amenability_verdict(*zshift, {}, 1e-4, tiny);
  CHECK(vt.status == "Inconclusive");
}

}  // TEST_SUITE

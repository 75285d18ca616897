#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "speclab/hyperbolic.hpp"
#include "speclab/util.hpp"

using namespace speclab;
using C = std::complex<double>;

namespace {

// Hyperbolic element with real axis endpoints p < q and translation length l.
Moebius axis_translation(double p, double q, double l) {
  const Moebius S(C(q), C(p), C(1), C(1));  // 0 -> p, infinity -> q
  const Moebius D(C(std::exp(l / 2)), C(0), C(0), C(std::exp(-l / 2)));
  return S * D * S.inverse();
}

}  // namespace

TEST_SUITE("hyperbolic") {

TEST_CASE("model-space constants across the four families") {
  const HyperbolicSpace r3 = space_constants("R", 3);
  CHECK(r3.dimension == 3);
  CHECK(r3.entropy == 2);
  CHECK(r3.lambda0 == 1.0);

  const HyperbolicSpace c2 = space_constants("C", 2);
  CHECK(c2.dimension == 4);
  CHECK(c2.entropy == 4);
  CHECK(c2.lambda0 == 4.0);

  const HyperbolicSpace h1 = space_constants("H", 1);
  CHECK(h1.dimension == 4);
  CHECK(h1.entropy == 6);
  CHECK(h1.lambda0 == 9.0);

  const HyperbolicSpace o2 = space_constants("O", 2);
  CHECK(o2.dimension == 16);
  CHECK(o2.entropy == 22);
  CHECK(o2.lambda0 == 121.0);

  CHECK_THROWS_AS(space_constants("O", 3), SchemaError);
  CHECK_THROWS_AS(space_constants("R", 1), SchemaError);
  CHECK_THROWS_AS(space_constants("X", 2), SchemaError);
}

TEST_CASE("exponent-to-bottom map: branch point, cap, continuity") {
  CHECK(sullivan_lambda0(1.0, 3) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(sullivan_lambda0(0.3, 2) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(sullivan_lambda0(2.0, 5) == doctest::Approx(4.0).epsilon(1e-15));
  int cap_violations = 0;
  for (int m = 2; m <= 9; ++m) {
    const double top = 0.25 * (m - 1.0) * (m - 1.0);
    const double bp = 0.5 * (m - 1.0);
    CHECK(sullivan_lambda0(bp, m) == doctest::Approx(top).epsilon(1e-14));
    CHECK(std::abs(sullivan_lambda0(bp - 1e-9, m) - sullivan_lambda0(bp + 1e-9, m)) < 1e-7);
    for (double d = 0.0; d <= m - 1.0 + 1e-9; d += 0.05)
      if (sullivan_lambda0(d, m) > top + 1e-14) ++cap_violations;
  }
  CHECK(cap_violations == 0);
  CHECK_THROWS_AS(sullivan_lambda0(-0.1, 3), SchemaError);
  CHECK_THROWS_AS(sullivan_lambda0(0.5, 1), SchemaError);
}

TEST_CASE("distances: closed forms, metric axioms, invariance, stability") {
  const HPoint i0{C(0, 0), 1.0}, i2{C(0, 0), 2.0}, one_i{C(1, 0), 1.0};
  CHECK(hyperbolic_distance(i0, i2) == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  CHECK(hyperbolic_distance(i0, i0) == 0.0);
  CHECK(hyperbolic_distance(i0, one_i) == doctest::Approx(std::acosh(1.5)).epsilon(1e-14));
  CHECK_THROWS_AS(hyperbolic_distance(HPoint{C(0, 0), 0.0}, HPoint{C(0, 0), 1.0}),
                  SpeclabError);

  Rng rng(7);
  int metric_violations = 0;
  for (int trial = 0; trial < 20000; ++trial) {
    const HPoint p{C(uniform(rng, -5, 5), uniform(rng, -5, 5)), uniform(rng, 0.1, 10)};
    const HPoint q{C(uniform(rng, -5, 5), uniform(rng, -5, 5)), uniform(rng, 0.1, 10)};
    const HPoint r{C(uniform(rng, -5, 5), uniform(rng, -5, 5)), uniform(rng, 0.1, 10)};
    const double pq = hyperbolic_distance(p, q);
    const double qr = hyperbolic_distance(q, r);
    const double pr = hyperbolic_distance(p, r);
    if (pq < 0 || pr > pq + qr + 1e-9) ++metric_violations;
    if (std::abs(pq - hyperbolic_distance(q, p)) > 1e-12) ++metric_violations;
  }
  CHECK(metric_violations == 0);

  Rng rng2(8);
  int invariance_violations = 0;
  for (int trial = 0; trial < 500; ++trial) {
    // Random det-1 real matrix from a triangular decomposition.
    const Moebius g = Moebius(C(1), C(uniform(rng2, -2, 2)), C(0), C(1)) *
                      Moebius(C(1), C(0), C(uniform(rng2, -2, 2)), C(1)) *
                      Moebius(C(std::exp(uniform(rng2, -1, 1))), C(0), C(0),
                              C(std::exp(-uniform(rng2, -1, 1))));
    const HPoint p{C(uniform(rng2, -3, 3), 0), uniform(rng2, 0.2, 5)};
    const HPoint q{C(uniform(rng2, -3, 3), 0), uniform(rng2, 0.2, 5)};
    const C gp = g.apply_halfplane(C(p.zeta.real(), p.t));
    const C gq = g.apply_halfplane(C(q.zeta.real(), q.t));
    const HPoint gP{C(gp.real(), 0), gp.imag()}, gQ{C(gq.real(), 0), gq.imag()};
    if (std::abs(hyperbolic_distance(gP, gQ) - hyperbolic_distance(p, q)) > 1e-8)
      ++invariance_violations;

    const Moebius h(C(uniform(rng2, -1, 1), uniform(rng2, -1, 1)),
                    C(uniform(rng2, -1, 1), uniform(rng2, -1, 1)),
                    C(uniform(rng2, -1, 1), uniform(rng2, -1, 1)),
                    C(uniform(rng2, -1, 1) + 4.0, uniform(rng2, -1, 1)));
    const HPoint u{C(uniform(rng2, -3, 3), uniform(rng2, -3, 3)), uniform(rng2, 0.2, 5)};
    const HPoint v{C(uniform(rng2, -3, 3), uniform(rng2, -3, 3)), uniform(rng2, 0.2, 5)};
    if (std::abs(hyperbolic_distance(h.apply_halfspace(u), h.apply_halfspace(v)) -
                 hyperbolic_distance(u, v)) > 1e-8)
      ++invariance_violations;
    if (std::abs(translate_distance(h, u, v) -
                 hyperbolic_distance(u, h.apply_halfspace(v))) > 1e-8)
      ++invariance_violations;
  }
  CHECK(invariance_violations == 0);

  // The conjugated-norm route stays exact far beyond the naive formula's range.
  const Moebius big = axis_translation(-1.0, 1.0, 600.0);
  const HPoint o{C(0, 0), 1.0};
  const double d600 = translate_distance(big, o, o);
  CHECK(std::isfinite(d600));
  CHECK(d600 == doctest::Approx(600.0).epsilon(1e-6));
}

TEST_CASE("matrix parsing, normalization, inverses") {
  const Moebius m(C(3, 0), C(0, 0), C(0, 0), C(3, 0));  // det 9, rescaled
  CHECK(m.is_identity());
  const Moebius g = parse_moebius(json::array({2.0, 0.0, 0.0, 0.5}));
  CHECK(std::abs(g.a - C(2, 0)) < 1e-12);
  CHECK(std::abs(g.d - C(0.5, 0)) < 1e-12);
  const Moebius gc = parse_moebius(
      json::array({json::array({0.0, 1.0}), 0.0, 0.0, json::array({0.0, -1.0})}));
  CHECK(std::abs(gc.a - C(0, 1)) < 1e-12);
  CHECK_THROWS_AS(parse_moebius(json::array({1.0, 2.0, 3.0})), SchemaError);
  CHECK_THROWS_AS(parse_moebius(json::array({1.0, 0.0, 0.0, 0.0})), SchemaError);
  CHECK((g * g.inverse()).is_identity(1e-12));
}

TEST_CASE("orbital sums over a cyclic group have a geometric closed form") {
  const Moebius gamma = parse_moebius(json::array({2.0, 0.0, 0.0, 0.5}));  // z -> 4z
  const HPoint o{C(0, 0), 1.0};
  CHECK(translate_distance(gamma, o, o) == doctest::Approx(std::log(4.0)).epsilon(1e-12));

  const PoincareSeries ps = poincare_series({gamma}, 1.0, o, o, 25);
  // 1 + 2 sum_k 4^{-k} = 1 + 2/3.
  CHECK(ps.sum == doctest::Approx(5.0 / 3.0).epsilon(1e-10));
  CHECK_FALSE(ps.overflow);
  CHECK_FALSE(ps.schottky_verified);  // diagonal matrices have no isometric circles
  REQUIRE(ps.layer_sums.size() == 26);
  CHECK(ps.layer_sums[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(ps.layer_sums[1] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(ps.layer_ratios[0] == doctest::Approx(0.5).epsilon(1e-9));
  for (std::size_t k = 1; k < ps.layer_ratios.size(); ++k)
    CHECK(ps.layer_ratios[k] == doctest::Approx(0.25).epsilon(1e-9));

  double prev = -1.0;
  for (int len = 0; len <= 8; ++len) {
    const PoincareSeries p = poincare_series({gamma}, 1.0, o, o, len);
    CHECK(p.sum >= prev - 1e-15);
    prev = p.sum;
  }
  CHECK(poincare_series({gamma}, 100.0, o, o, 10).sum ==
        doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("ping-pong pairs are detected and converge at small exponent") {
  const Moebius A = axis_translation(-1.0, 1.0, 5.0);
  const Moebius B = axis_translation(5.0, 9.0, 5.0);
  const PoincareSeries ps =
      poincare_series({A, B}, 0.5, HPoint{C(0, 0), 1.0}, HPoint{C(0, 0), 1.0}, 9);
  CHECK(ps.schottky_verified);
  CHECK_FALSE(ps.overflow);
  for (std::size_t k = 1; k < ps.layer_ratios.size(); ++k)
    CHECK(ps.layer_ratios[k] < 1.0);
  CHECK(std::isfinite(ps.sum));
  CHECK(ps.sum > 1.0);
}

TEST_CASE("critical exponent bisection") {
  const Moebius gamma = parse_moebius(json::array({2.0, 0.0, 0.0, 0.5}));
  const HPoint o{C(0, 0), 1.0};
  const DeltaInterval di = critical_exponent_estimate({gamma}, o, {0.0, 0.5}, 18);
  CHECK(di.heuristic);
  CHECK(di.delta_lo >= 0.0);
  CHECK(di.delta_lo <= 1e-12);  // the interval contains the true value 0
  CHECK(di.delta_hi <= 0.05);

  const DeltaInterval idd = critical_exponent_estimate({Moebius{}}, o, {0.0, 1.0}, 10);
  CHECK(idd.delta_lo == 0.0);
  CHECK(idd.delta_hi == 0.0);
  CHECK(idd.word_len == 0);

  // Longer translation lengths thin the group out: the estimate must fall.
  double last = 1e9;
  for (double l : {4.0, 6.0, 8.0}) {
    const Moebius A = axis_translation(-1.0, 1.0, l);
    const Moebius B = axis_translation(5.0, 9.0, l);
    const DeltaInterval d = critical_exponent_estimate({A, B}, o, {0.0, 1.0}, 9, 0.02);
    CHECK(d.delta_hi < last);
    last = d.delta_hi;
  }

  // The bracket must straddle the transition.
  CHECK_THROWS_AS(critical_exponent_estimate({gamma}, o, {0.2, 0.5}, 10), SpeclabError);
}

TEST_CASE("bottom-of-spectrum predictions for covers of model quotients") {
  const HyperbolicSpace H3 = space_constants("R", 3);  // lambda0 = 1
  CHECK(gefin_predict(0.84, H3, "EvidenceNonamenable").relation == "strict");
  CHECK(gefin_predict(1.0, H3, "EvidenceNonamenable").relation == "equal-by-case-2");
  CHECK(gefin_predict(1.0, H3, "CertifiedAmenable").relation == "equal-by-case-2");
  CHECK(gefin_predict(0.5, H3, "CertifiedAmenable").relation == "equal");
  CHECK(gefin_predict(0.7, H3, "Inconclusive").relation == "no-prediction");
  CHECK(gefin_predict(0.84, H3, "EvidenceNonamenable").case_id == 1);
  CHECK(gefin_predict(1.0, H3, "Inconclusive").case_id == 2);
  CHECK_THROWS_AS(gefin_predict(1.5, H3, "CertifiedAmenable"), SpeclabError);
  CHECK_THROWS_AS(gefin_predict(0.5, H3, "Maybe"), SchemaError);
}

TEST_CASE("cusp-like surface of revolution: volume, bottom, tail series") {
  const RevolutionSurface surf;  // alpha = 0.5, L = 400, N = 40000
  const SalphaReport rep = salpha_solver(surf, {100.0});

  // Quadrature oracle: the profile integral over [1, 400] in closed form.
  const double exact = 4.0 / std::exp(1.0) - 2.0 * 21.0 * std::exp(-20.0);
  const double vol_oracle = 2.0 * std::numbers::pi * exact;
  CHECK(std::abs(rep.volume - vol_oracle) / vol_oracle < 1e-6);
  CHECK(rep.tail_bound > 0.0);
  CHECK(rep.tail_bound < 1e-5);
  CHECK(rep.lambda0 == 0.0);

  REQUIRE(rep.tail.size() == 1);
  const SalphaTailEntry& t = rep.tail[0];
  REQUIRE(t.windows.size() == 3);
  CHECK(t.value <= 0.01);
  CHECK(t.value > 0.0);
  CHECK(t.windows[0].second >= t.windows[1].second - 1e-15);
  CHECK(t.windows[1].second >= t.windows[2].second - 1e-15);
  CHECK(t.windows.back().second < t.windows.front().second);
  CHECK(t.value == t.windows.back().second);

  CHECK_THROWS_AS(salpha_solver(surf, {399.999}), SpeclabError);
  CHECK_THROWS_AS(salpha_solver(surf, {0.5}), SchemaError);
  CHECK_THROWS_AS(salpha_solver({1.5, 400.0, 40000}, {}), SchemaError);
  CHECK_THROWS_AS(salpha_solver({0.5, 0.9, 40000}, {}), SchemaError);

  const SalphaReport rep2 = salpha_solver({0.25, 400.0, 20000}, {50.0});
  CHECK(rep2.tail[0].value > 0.0);
  CHECK(rep2.tail[0].windows[0].second >= rep2.tail[0].value);

  const json j = rep.to_json();
  CHECK(j.contains("volume"));
  CHECK(j.contains("tail"));
  CHECK(j["tail"][0].contains("windows"));
}

}  // TEST_SUITE

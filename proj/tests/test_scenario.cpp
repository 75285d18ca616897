#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <string>

#include "speclab/scenario.hpp"
#include "speclab/util.hpp"

using namespace speclab;

namespace {

bool throws_schema(const std::function<void()>& f) {
  try {
    f();
  } catch (const SchemaError&) {
    return true;
  } catch (...) {
    return false;
  }
  return false;
}

// SpeclabError but not the schema subclass (a rejected input, not a typo).
bool throws_plain(const std::function<void()>& f) {
  try {
    f();
  } catch (const SchemaError&) {
    return false;
  } catch (const SpeclabError&) {
    return true;
  } catch (...) {
    return false;
  }
  return false;
}

const Claim* find_claim(const TheoremReport& r, const std::string& needle) {
  for (const Claim& c : r.claims)
    if (c.statement.find(needle) != std::string::npos) return &c;
  return nullptr;
}

Scenario make(const std::string& name, const std::string& kind, std::uint64_t seed,
              json inputs) {
  json doc;
  doc["version"] = "v1";
  doc["name"] = name;
  doc["kind"] = kind;
  doc["seed"] = seed;
  doc["inputs"] = std::move(inputs);
  return Scenario::parse(doc);
}

std::string slurp(const std::string& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_SUITE("scenario") {

TEST_CASE("documents are validated field by field") {
  CHECK(throws_schema([] { Scenario::parse(json{{"version", "v1"}}); }));
  CHECK(throws_schema([] {
    Scenario::parse(json{{"version", "v2"}, {"name", "x"}, {"kind", "tame"}, {"seed", 0},
                         {"inputs", json::object()}});
  }));
  CHECK(throws_schema([] {
    Scenario::parse(json{{"version", "v1"}, {"name", "x"}, {"kind", "nope"}, {"seed", 0},
                         {"inputs", json::object()}});
  }));
  CHECK(throws_schema([] {
    Scenario::parse(json{{"version", "v1"}, {"name", "x"}, {"kind", "tame"}, {"seed", -3},
                         {"inputs", json::object()}});
  }));
  CHECK(throws_schema([] {
    Scenario::parse(json{{"version", "v1"}, {"name", "x"}, {"kind", "tame"}, {"seed", 0},
                         {"inputs", json::object()}, {"stray", 1}});
  }));
  const Scenario s = make("ok", "gallery", 7, json{{"name", "salpha"}});
  CHECK(s.name == "ok");
  CHECK(s.kind == "gallery");
  CHECK(s.seed == 7);
  CHECK(throws_schema([] { Scenario::load("/nonexistent/missing.json"); }));
}

TEST_CASE("claim comparisons carry their tolerances") {
  CHECK(make_claim("a", ">=", 1.0, 0.0, 0.0).pass);
  CHECK_FALSE(make_claim("a", ">=", -1e-6, 0.0, 1e-9).pass);
  CHECK(make_claim("a", "<=", 1.0 + 1e-10, 1.0, 1e-9).pass);
  CHECK(make_claim("a", "==", 2.0, 2.0 + 5e-9, 1e-8).pass);
  const double inf = std::numeric_limits<double>::infinity();
  CHECK(make_claim("a", "==", inf, inf, 0.0).pass);
  CHECK(make_claim("a", ">=", inf, 3.0, 0.0).pass);

  TheoremReport r;
  r.claims.push_back(make_claim("a", ">=", 1.0, 0.0, 0.0));
  r.finish();
  CHECK(r.outcome == "pass");
  CHECK(r.exit_code() == 0);
  r.claims.push_back(make_claim("b", "<=", 1.0, 0.0, 0.0));
  r.finish();
  CHECK(r.outcome == "fail");
  CHECK(r.exit_code() == 1);
  r.outcome = "inconclusive";
  CHECK(r.exit_code() == 2);
  r.finish();
  CHECK(r.outcome == "inconclusive");  // special outcomes survive finish()
}

TEST_CASE("fuzzed covers never lower the bottom, and runs are reproducible") {
  const Scenario s = make("mono", "monotonicity", 20260822,
                          json{{"trials", 60},
                               {"max_base", 8},
                               {"max_fiber", 8},
                               {"pushdown_per_cover", 1},
                               {"trivial_cover", true}});
  const TheoremReport r = run_scenario(s);
  CHECK(r.outcome == "pass");
  const Claim* gap = find_claim(r, "non-negative");
  REQUIRE(gap != nullptr);
  CHECK(gap->pass);
  CHECK(gap->lhs >= -1e-9);
  const Claim* norm = find_claim(r, "preserves the norm");
  REQUIRE(norm != nullptr);
  CHECK(norm->lhs <= 1e-12);
  const Claim* ray = find_claim(r, "cannot raise");
  REQUIRE(ray != nullptr);
  CHECK(ray->lhs <= 1e-9);
  CHECK(find_claim(r, "one-fold") != nullptr);

  CHECK(r.to_json().dump() == run_scenario(s).to_json().dump());
  const TheoremReport other = run_scenario(make("mono", "monotonicity", 1, s.inputs));
  CHECK(r.to_json().dump() != other.to_json().dump());
}

TEST_CASE("declared infinite covers are checked through exhaustion") {
  const json cover = {
      {"base", {{"generator", "bouquet"}, {"params", {{"loops", 2}}}}},
      {"action", {{"type", "free"}, {"params", {{"rank", 2}}}}},
      {"voltage", {{0, "a"}, {1, "b"}}},
  };
  const Scenario s = make("mono-ex", "monotonicity", 1,
                          json{{"trials", 0},
                               {"exhaustion", {{"cover", cover}, {"schedule", {6, 12, 24}}}}});
  const TheoremReport r = run_scenario(s);
  CHECK(r.outcome == "pass");
  const Claim* c = find_claim(r, "stay above lambda0(base)");
  REQUIRE(c != nullptr);
  CHECK(c->pass);
  CHECK(c->rhs == 0.0);
  CHECK(c->lhs > 0.5);
  CHECK_FALSE(r.series.empty());
}

TEST_CASE("finite cyclic towers preserve the bottom exactly") {
  const Scenario s = make("tame-cyc", "tame", 0,
                          json{{"epsilon", 0.25},
                               {"cyclic_family", {{"base_length", 3}, {"k_max", 10}}}});
  const TheoremReport r = run_scenario(s);
  CHECK(r.outcome == "pass");
  const Claim* c = find_claim(r, "finite amenable covers");
  REQUIRE(c != nullptr);
  CHECK(c->pass);
  CHECK(c->lhs <= 1e-8);
  CHECK(r.artifacts.at("finite_cases").size() == 10);
}

TEST_CASE("an unrolled potential well closes the gap along the line") {
  const json cover = {
      {"base", {{"vertices", 1}, {"edges", {{0, 0, 1.0}}}, {"potential", {-1.0}}}},
      {"action",
       {{"type", "z_shift"}, {"params", {{"generators", {"t"}}, {"shifts", {1}}}}}},
      {"voltage", {{0, "t"}}},
  };
  const Scenario s = make("tame-z", "tame", 0,
                          json{{"infinite",
                                {{"cover", cover},
                                 {"epsilon", 0.005},
                                 {"folner_ball_radius", 256},
                                 {"taper", 64},
                                 {"schedule", {50, 100, 200}},
                                 {"tolerance", 0.05}}}});
  const TheoremReport r = run_scenario(s);
  CHECK(r.outcome == "pass");
  const Claim* cut = find_claim(r, "cutoff of the lifted ground state");
  REQUIRE(cut != nullptr);
  CHECK(cut->pass);
  CHECK(cut->lhs < 0.01);
  const Claim* ex = find_claim(r, "close the gap");
  REQUIRE(ex != nullptr);
  CHECK(ex->pass);
  CHECK(ex->lhs < 0.01);
  CHECK(find_claim(r, "stays above lambda0(base)")->pass);
  CHECK(r.artifacts.at("lambda0_base").get<double>() == -1.0);
}

TEST_CASE("covers without an invariance certificate are turned away") {
  const json cover = {
      {"base", {{"generator", "bouquet"}, {"params", {{"loops", 2}}}}},
      {"action", {{"type", "free"}, {"params", {{"rank", 2}}}}},
      {"voltage", {{0, "a"}, {1, "b"}}},
  };
  const Scenario s = make("tame-bad", "tame", 0,
                          json{{"infinite", {{"cover", cover}, {"schedule", {4, 8}}}}});
  CHECK(throws_plain([&] { run_scenario(s); }));
}

TEST_CASE("strict raise over the tree cover, certificate and oracle agreeing") {
  const json cover = {
      {"base", {{"generator", "bouquet"}, {"params", {{"loops", 2}}}}},
      {"action", {{"type", "free"}, {"params", {{"rank", 2}}}}},
      {"voltage", {{0, "a"}, {1, "b"}}},
  };
  const Scenario s = make("name-tree", "name", 0,
                          json{{"cover", cover},
                               {"epsilon", 0.05},
                               {"schedule", {6, 12, 24, 48}},
                               {"oracle", 0.5358983848622454},
                               {"oracle_tolerance", 0.02},
                               {"gap_threshold", 0.1},
                               {"base_lambda0", 0.0}});
  const TheoremReport r = run_scenario(s);
  CHECK(r.outcome == "pass");
  CHECK(find_claim(r, "+inf sentinel")->pass);
  CHECK(find_claim(r, "declared value")->pass);
  const Claim* oracle = find_claim(r, "independent oracle");
  REQUIRE(oracle != nullptr);
  CHECK(oracle->pass);
  CHECK(oracle->lhs == doctest::Approx(0.542471).epsilon(1e-3));
  const Claim* lower = find_claim(r, "clears lambda0(base)");
  REQUIRE(lower != nullptr);
  CHECK(lower->pass);
  CHECK(lower->lhs == 0.5);
  CHECK(find_claim(r, "above the certified lower bound")->pass);
}

TEST_CASE("strict raise with a weaker certificate on a chorded cycle") {
  const json cover = {
      {"base",
       {{"vertices", 4},
        {"edges", {{0, 1, 1.0}, {1, 2, 1.0}, {2, 3, 1.0}, {3, 0, 1.0}, {0, 2, 1.0}}}}},
      {"action", {{"type", "free"}, {"params", {{"rank", 5}}}}},
      {"voltage", {{0, "a"}, {1, "b"}, {2, "c"}, {3, "d"}, {4, "e"}}},
  };
  const Scenario s = make("name-chord", "name", 0,
                          json{{"cover", cover},
                               {"epsilon", 0.05},
                               {"schedule", {4, 6, 8}},
                               {"gap_threshold", 0.02}});
  const TheoremReport r = run_scenario(s);
  CHECK(r.outcome == "pass");
  const Claim* lower = find_claim(r, "clears lambda0(base)");
  REQUIRE(lower != nullptr);
  CHECK(lower->pass);
}

TEST_CASE("a base with no essential gap trips the hypothesis guard") {
  const Scenario s = make("name-guard", "name", 0,
                          json{{"guard",
                                {{"base", {{"type", "blob_chain"}, {"blob_size", 4}}},
                                 {"lambda0_schedule", {8, 16, 32}},
                                 {"ess_schedule", {8, 16, 32}},
                                 {"margin", 0.05}}}});
  const TheoremReport r = run_scenario(s);
  CHECK(r.outcome == "hypothesis-violated");
  CHECK(r.note.find("hypothesis lambda_ess > lambda0 violated") != std::string::npos);
  CHECK(r.exit_code() == 2);
}

TEST_CASE("without a usable lower bound the verdict stays open") {
  const json cover = {
      {"base", {{"vertices", 1}, {"edges", {{0, 0, 1.0}, {0, 0, 2.0}}}}},
      {"action", {{"type", "free"}, {"params", {{"rank", 2}}}}},
      {"voltage", {{0, "a"}, {1, "b"}}},
  };
  const Scenario s = make("name-skew", "name", 0,
                          json{{"cover", cover}, {"schedule", {4, 6}}});
  const TheoremReport r = run_scenario(s);
  CHECK(r.outcome == "inconclusive");
  CHECK(r.note.find("one-sided") != std::string::npos);
}

TEST_CASE("essential spectrum shrugs off finite edits") {
  const Scenario s = make("stab-z", "stability", 0,
                          json{{"base", {{"type", "z_line"}}},
                               {"edits", {{"potential", {{0, 5.0}, {1, -2.0}}}}},
                               {"schedule", {16, 32, 64}},
                               {"tolerance", 0.01}});
  const TheoremReport r = run_scenario(s);
  CHECK(r.outcome == "pass");
  const Claim* agree = find_claim(r, "agree");
  REQUIRE(agree != nullptr);
  CHECK(agree->lhs <= 0.01);
  CHECK_FALSE(r.series.empty());

  CHECK(throws_schema([] {
    run_scenario(make("stab-bad", "stability", 0,
                      json{{"base", {{"type", "z_line"}}},
                           {"edits", json::object()},
                           {"schedule", {16}}}));
  }));
}

TEST_CASE("every gallery entry passes its own headline claims") {
  for (const std::string& name : gallery_names()) {
    const TheoremReport r = run_gallery_entry(name, 0);
    CHECK(r.outcome == "pass");
    CHECK_FALSE(r.claims.empty());
  }
  CHECK(throws_schema([] { run_gallery_entry("nope", 0); }));
  const Scenario s = make("my-gallery", "gallery", 0, json{{"name", "exa00-chain"}});
  const TheoremReport r = run_scenario(s);
  CHECK(r.scenario == "my-gallery");  // the scenario's name wins over the entry's
  CHECK(r.outcome == "pass");
}

TEST_CASE("hyperbolic blocks: tables, series, exponents") {
  const json inputs = {
      {"table",
       {{{"family", "R"}, {"n", 2}, {"entropy", 1.0}, {"lambda0", 0.25}},
        {{"family", "O"}, {"n", 2}, {"lambda0", 121.0}}}},
      {"sullivan",
       {{{"delta", 1.0}, {"m", 3}, {"expect", 1.0}},
        {{"delta", 0.3}, {"m", 2}, {"expect", 0.25}}}},
      {"series",
       {{"generators", {{{2.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}, {0.5, 0.0}}}},
        {"s", 1.0},
        {"max_word_len", 40},
        {"expect_sum", 5.0 / 3.0},
        {"tolerance", 1e-6}}},
      {"exponent",
       {{"generators", {{{2.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}, {0.5, 0.0}}}},
        {"bracket", {0.0, 0.5}},
        {"max_word_len", 24},
        {"width", 0.05},
        {"max_delta_hi", 0.05}}},
  };
  const TheoremReport r = run_scenario(make("hyp", "hyperbolic", 0, inputs));
  CHECK(r.outcome == "pass");
  CHECK(find_claim(r, "partial sum of the series")->pass);
  CHECK(find_claim(r, "interval top")->pass);

  CHECK(throws_schema([] { run_scenario(make("hyp-bad", "hyperbolic", 0, json::object())); }));
  CHECK(throws_schema([] {
    run_scenario(make("hyp-bad2", "hyperbolic", 0,
                      json{{"table", {{{"family", "R"}, {"n", 2}}}}, {"unknown_block", 1}}));
  }));
}

TEST_CASE("reports hit disk atomically and byte-identically") {
  namespace fs = std::filesystem;
  const fs::path dir1 = fs::temp_directory_path() / "scenario-emit-a";
  const fs::path dir2 = fs::temp_directory_path() / "scenario-emit-b";
  fs::remove_all(dir1);
  fs::remove_all(dir2);

  const Scenario s = make("emit-test", "monotonicity", 42,
                          json{{"trials", 5}, {"max_base", 5}, {"max_fiber", 4}});
  const TheoremReport r = run_scenario(s);
  const std::string p1 = emit_report(r, dir1.string(), "json");
  const std::string p2 = emit_report(run_scenario(s), dir2.string(), "json");
  CHECK_FALSE(slurp(p1).empty());
  CHECK(slurp(p1) == slurp(p2));
  CHECK(p1.find("emit-test.report.json") != std::string::npos);

  const std::string pc = emit_report(r, dir1.string(), "csv");
  CHECK(slurp(pc).rfind("name,x,y\n", 0) == 0);
  CHECK(throws_schema([&] { emit_report(r, dir1.string(), "yaml"); }));

  fs::remove_all(dir1);
  fs::remove_all(dir2);
}

}  // TEST_SUITE

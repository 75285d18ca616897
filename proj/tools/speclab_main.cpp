// Command-line front end: runs scenario files through the verification
// harness, offers direct single-shot computations (spectra, covers, Cheeger
// cuts, Folner searches), and emits reports as JSON or CSV.
//
// Exit codes: 0 every claim passed; 1 some claim failed; 2 nothing failed but
// some run was inconclusive (or guarded); 3 usage or schema error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "speclab/amenability.hpp"
#include "speclab/covering.hpp"
#include "speclab/graph.hpp"
#include "speclab/isoperimetry.hpp"
#include "speclab/renormalize.hpp"
#include "speclab/scenario.hpp"
#include "speclab/spectral.hpp"
#include "speclab/util.hpp"

namespace {

using namespace speclab;

struct RunOptions {
  std::vector<std::string> scenario_files;
  std::string input_file;     // direct-mode document (bare JSON, not a scenario)
  std::string gallery_name;   // gallery only
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  std::string format = "json";
};

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open input file: " + path);
  try {
    return json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError("input file " + path + ": " + e.what());
  }
}

std::string stem_of(const std::string& path) {
  return std::filesystem::path(path).stem().string();
}

std::vector<std::int64_t> schedule_from(const json& doc, const char* key,
                                        const std::string& where) {
  std::vector<std::int64_t> out;
  if (!doc.contains(key)) return out;
  if (!doc.at(key).is_array())
    throw SchemaError(where + ": \"" + std::string(key) + "\" must be an array of radii");
  for (const auto& v : doc.at(key)) out.push_back(v.get<std::int64_t>());
  return out;
}

std::vector<Letter> positive_letters(const MonodromyAction& a) {
  std::vector<Letter> out;
  for (int g = 0; g < static_cast<int>(a.generators().size()); ++g)
    out.push_back(Letter{g, 1});
  return out;
}

TheoremReport info_report(const std::string& name, const std::string& kind) {
  TheoremReport r;
  r.scenario = name;
  r.kind = kind;
  r.note = "informational computation; no claims checked";
  return r;
}

// ---- direct modes ---------------------------------------------------------

TheoremReport direct_spectra(const std::string& path, std::uint64_t seed) {
  const json doc = load_json(path);
  if (doc.contains("version"))
    throw SchemaError("this looks like a scenario file; pass it with --scenario");
  json_require_keys(doc, {"graph", "lazy", "schedule", "ess_schedule"}, {}, "spectra input");
  TheoremReport r = info_report(stem_of(path), "spectra");
  SolveOptions solve;
  solve.seed = seed;
  if (doc.contains("graph")) {
    const WeightedGraph g = build_graph(doc.at("graph"));
    const SpectralEstimate est = lambda0_finite(g, nullptr, solve);
    r.artifacts["lambda0"] = est.to_json();
    if (g.size() <= 200) {
      const DenseSpectrum spec = dense_spectrum(assemble_system(g));
      json vals = json::array();
      for (double v : spec.values) vals.push_back(v);
      r.artifacts["spectrum"] = std::move(vals);
    }
  } else if (doc.contains("lazy")) {
    const auto g = build_lazy_graph(doc.at("lazy"), "spectra input.lazy");
    ExhaustionOptions eopts;
    eopts.schedule = schedule_from(doc, "schedule", "spectra input");
    if (eopts.schedule.empty())
      throw SchemaError("spectra input: a lazy graph needs a \"schedule\"");
    eopts.solve = solve;
    const SpectralEstimate est = lambda0_exhaustion(*g, eopts);
    r.artifacts["lambda0_exhaustion"] = est.to_json();
    for (const auto& [x, y] : est.history)
      r.series.push_back({"exhaustion", static_cast<double>(x), y});
    if (doc.contains("ess_schedule")) {
      EssOptions essopts;
      essopts.schedule = schedule_from(doc, "ess_schedule", "spectra input");
      essopts.solve = solve;
      const SpectralEstimate ess = lambda_ess_estimate(*g, essopts);
      r.artifacts["lambda_ess"] = ess.to_json();
      for (const auto& [x, y] : ess.history)
        r.series.push_back({"ess_estimate", static_cast<double>(x), y});
    }
  } else {
    throw SchemaError("spectra input: give \"graph\" or \"lazy\"");
  }
  return r;
}

TheoremReport direct_cover(const std::string& path, std::uint64_t seed) {
  const json doc = load_json(path);
  if (doc.contains("version"))
    throw SchemaError("this looks like a scenario file; pass it with --scenario");
  json_require_keys(doc, {"cover", "schedule"}, {"cover"}, "cover input");
  TheoremReport r = info_report(stem_of(path), "cover");
  SolveOptions solve;
  solve.seed = seed;
  const CoveringGraph cover = build_cover(doc.at("cover"));
  r.artifacts["lambda0_base"] = lambda0_finite(cover.base(), nullptr, solve).to_json();
  r.artifacts["fiber_size"] = cover.finite_fiber()
                                  ? json(cover.action().fiber_size())
                                  : json("inf");
  if (cover.finite_fiber()) {
    r.artifacts["lambda0_total"] =
        lambda0_finite(cover.total_finite(), nullptr, solve).to_json();
  } else {
    ExhaustionOptions eopts;
    eopts.schedule = schedule_from(doc, "schedule", "cover input");
    if (eopts.schedule.empty())
      throw SchemaError("cover input: an infinite fiber needs a \"schedule\"");
    eopts.solve = solve;
    const SpectralEstimate est = lambda0_exhaustion(*cover.total(), eopts);
    r.artifacts["lambda0_total_exhaustion"] = est.to_json();
    for (const auto& [x, y] : est.history)
      r.series.push_back({"exhaustion", static_cast<double>(x), y});
  }
  return r;
}

TheoremReport direct_cheeger(const std::string& path, std::uint64_t seed) {
  const json doc = load_json(path);
  if (doc.contains("version"))
    throw SchemaError("this looks like a scenario file; pass it with --scenario");
  json_require_keys(doc, {"graph", "mode"}, {"graph"}, "cheeger input");
  TheoremReport r = info_report(stem_of(path), "cheeger");
  SolveOptions solve;
  solve.seed = seed;
  const WeightedGraph g = build_graph(doc.at("graph"));
  const std::string mode =
      doc.contains("mode") ? doc.at("mode").get<std::string>() : std::string("auto");
  r.artifacts["cut"] = cheeger_constant(g, nullptr, mode, solve).to_json();
  const GroundState gs = ground_state(g, 1e-10, solve);
  const CheegerBoundReport bound = cheeger_inequality_check(g, &gs.phi, gs.lambda, solve);
  r.artifacts["ground_state_lambda"] = gs.lambda;
  r.artifacts["bound"] = bound.to_json();
  r.claims.push_back(make_claim(
      "spectral gap above the ground state dominates h^2/(2D) in the transformed metric",
      ">=", bound.lambda_gap, bound.bound, 1e-12));
  r.note.clear();
  r.finish();
  return r;
}

TheoremReport direct_folner(const std::string& path, std::uint64_t) {
  const json doc = load_json(path);
  if (doc.contains("version"))
    throw SchemaError("this looks like a scenario file; pass it with --scenario");
  json_require_keys(doc, {"action", "epsilon", "max_ball_radius"}, {"action"},
                    "folner input");
  TheoremReport r = info_report(stem_of(path), "folner");
  const auto action = build_action(doc.at("action"));
  const double epsilon =
      doc.contains("epsilon") ? doc.at("epsilon").get<double>() : 0.25;
  VerdictOptions opts;
  if (doc.contains("max_ball_radius"))
    opts.folner.max_ball_radius = doc.at("max_ball_radius").get<int>();
  const AmenabilityVerdict verdict =
      amenability_verdict(*action, positive_letters(*action), epsilon, opts);
  r.artifacts["verdict"] = verdict.to_json(*action);
  for (const auto& [x, y] : verdict.rho_series)
    r.series.push_back({"rho", static_cast<double>(x), y});
  return r;
}

// ---- scenario runner ------------------------------------------------------

int worst_exit(int a, int b) {
  // 3 (usage) dominates, then 1 (fail), then 2 (inconclusive), then 0.
  if (a == 3 || b == 3) return 3;
  if (a == 1 || b == 1) return 1;
  if (a == 2 || b == 2) return 2;
  return 0;
}

struct Outcome {
  TheoremReport report;
  std::string error;  // non-empty: schema/usage failure, exit 3
};

int finish_reports(std::vector<Outcome>& outcomes, const RunOptions& opt) {
  int exit_code = 0;
  json bundle = json::array();
  for (Outcome& oc : outcomes) {
    if (!oc.error.empty()) {
      std::fprintf(stderr, "error: %s\n", oc.error.c_str());
      exit_code = worst_exit(exit_code, 3);
      continue;
    }
    exit_code = worst_exit(exit_code, oc.report.exit_code());
    if (!opt.out_dir.empty()) {
      const std::string path = emit_report(oc.report, opt.out_dir, opt.format);
      std::printf("%-20s %s -> %s\n", oc.report.outcome.c_str(),
                  oc.report.scenario.c_str(), path.c_str());
    } else if (opt.format == "csv") {
      std::fputs(oc.report.csv().c_str(), stdout);
    } else {
      bundle.push_back(oc.report.to_json());
    }
  }
  if (opt.out_dir.empty() && opt.format == "json" && !bundle.empty()) {
    if (bundle.size() == 1)
      std::printf("%s\n", bundle[0].dump(2).c_str());
    else
      std::printf("%s\n", bundle.dump(2).c_str());
  }
  return exit_code;
}

int run_scenarios(const RunOptions& opt, const std::vector<std::string>& allowed_kinds,
                  const std::string& subcommand) {
  std::vector<Scenario> scenarios;
  for (const std::string& file : opt.scenario_files) {
    Scenario s = Scenario::load(file);
    if (!allowed_kinds.empty() &&
        std::find(allowed_kinds.begin(), allowed_kinds.end(), s.kind) ==
            allowed_kinds.end()) {
      std::string kinds;
      for (const std::string& k : allowed_kinds) kinds += (kinds.empty() ? "" : ", ") + k;
      throw SchemaError("subcommand \"" + subcommand + "\" runs scenarios of kind " + kinds +
                        "; \"" + file + "\" has kind \"" + s.kind + "\"");
    }
    if (opt.seed) s.seed = *opt.seed;
    scenarios.push_back(std::move(s));
  }

  std::vector<std::future<Outcome>> futures;
  futures.reserve(scenarios.size());
  for (const Scenario& s : scenarios)
    futures.push_back(std::async(std::launch::async, [&s]() -> Outcome {
      Outcome oc;
      try {
        oc.report = run_scenario(s);
      } catch (const SpeclabError& e) {
        oc.error = s.name + ": " + e.what();
      }
      return oc;
    }));
  std::vector<Outcome> outcomes;
  outcomes.reserve(futures.size());
  for (auto& f : futures) outcomes.push_back(f.get());
  return finish_reports(outcomes, opt);
}

int run_direct(const RunOptions& opt,
               TheoremReport (*fn)(const std::string&, std::uint64_t)) {
  std::vector<Outcome> outcomes(1);
  try {
    outcomes[0].report = fn(opt.input_file, opt.seed.value_or(0));
  } catch (const SpeclabError& e) {
    outcomes[0].error = opt.input_file + ": " + e.what();
  }
  return finish_reports(outcomes, opt);
}

void add_common(CLI::App* sub, RunOptions& opt, bool with_input) {
  sub->add_option("--scenario", opt.scenario_files,
                  "scenario file (repeatable; versioned \"v1\" documents)");
  if (with_input)
    sub->add_option("--input", opt.input_file,
                    "bare JSON document for a one-shot computation");
  sub->add_option("--seed", opt.seed, "override the seed of every loaded scenario");
  sub->add_option("--out", opt.out_dir, "directory for report files (default: stdout)");
  sub->add_option("--format", opt.format, "report format")
      ->check(CLI::IsMember({"json", "csv"}));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "speclab: bottom-of-spectrum laboratory for weighted graphs, their covers, "
      "and hyperbolic comparison spaces"};
  app.require_subcommand(1);

  RunOptions spectra_opt, cover_opt, cheeger_opt, folner_opt, hyper_opt, verify_opt,
      gallery_opt;
  CLI::App* sc_spectra = app.add_subcommand(
      "spectra", "bottom eigenvalues of a graph (direct --input, or stability scenarios)");
  add_common(sc_spectra, spectra_opt, true);
  CLI::App* sc_cover = app.add_subcommand(
      "cover", "spectra of covering graphs (direct --input, or cover-law scenarios)");
  add_common(sc_cover, cover_opt, true);
  CLI::App* sc_cheeger = app.add_subcommand(
      "cheeger", "isoperimetric cuts and eigenvalue bounds (direct --input, or strict-gap "
                 "scenarios)");
  add_common(sc_cheeger, cheeger_opt, true);
  CLI::App* sc_folner = app.add_subcommand(
      "folner", "amenability verdicts for actions (direct --input, or equality scenarios)");
  add_common(sc_folner, folner_opt, true);
  CLI::App* sc_hyper =
      app.add_subcommand("hyperbolic", "hyperbolic-space constants, series and surfaces");
  add_common(sc_hyper, hyper_opt, false);
  CLI::App* sc_verify =
      app.add_subcommand("verify", "run scenario files of any kind and check their claims");
  add_common(sc_verify, verify_opt, false);
  CLI::App* sc_gallery =
      app.add_subcommand("gallery", "canned example constructions with headline claims");
  add_common(sc_gallery, gallery_opt, false);
  sc_gallery->add_option("--name", gallery_opt.gallery_name,
                         "catalog entry (default: run every entry)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 3;  // help and version are not errors
  }

  try {
    if (sc_verify->parsed()) {
      if (verify_opt.scenario_files.empty())
        throw SchemaError("verify: give at least one --scenario file");
      return run_scenarios(verify_opt, {}, "verify");
    }
    if (sc_hyper->parsed()) {
      if (hyper_opt.scenario_files.empty())
        throw SchemaError("hyperbolic: give at least one --scenario file");
      return run_scenarios(hyper_opt, {"hyperbolic"}, "hyperbolic");
    }
    if (sc_gallery->parsed()) {
      if (!gallery_opt.scenario_files.empty())
        return run_scenarios(gallery_opt, {"gallery"}, "gallery");
      std::vector<std::string> names = gallery_names();
      if (!gallery_opt.gallery_name.empty()) names = {gallery_opt.gallery_name};
      std::vector<Outcome> outcomes;
      for (const std::string& name : names) {
        Outcome oc;
        try {
          oc.report = run_gallery_entry(name, gallery_opt.seed.value_or(0));
        } catch (const SpeclabError& e) {
          oc.error = name + ": " + e.what();
        }
        outcomes.push_back(std::move(oc));
      }
      return finish_reports(outcomes, gallery_opt);
    }

    const auto dispatch_utility = [&](CLI::App* sub, RunOptions& opt,
                                      const std::vector<std::string>& kinds,
                                      const std::string& name,
                                      TheoremReport (*fn)(const std::string&, std::uint64_t))
        -> std::optional<int> {
      if (!sub->parsed()) return std::nullopt;
      if (!opt.input_file.empty() && !opt.scenario_files.empty())
        throw SchemaError(name + ": --input and --scenario are mutually exclusive");
      if (!opt.input_file.empty()) return run_direct(opt, fn);
      if (!opt.scenario_files.empty()) return run_scenarios(opt, kinds, name);
      throw SchemaError(name + ": give --input or --scenario");
    };

    if (auto code = dispatch_utility(sc_spectra, spectra_opt, {"stability"}, "spectra",
                                     &direct_spectra))
      return *code;
    if (auto code = dispatch_utility(sc_cover, cover_opt,
                                     {"monotonicity", "tame", "name"}, "cover",
                                     &direct_cover))
      return *code;
    if (auto code =
            dispatch_utility(sc_cheeger, cheeger_opt, {"name"}, "cheeger", &direct_cheeger))
      return *code;
    if (auto code =
            dispatch_utility(sc_folner, folner_opt, {"tame"}, "folner", &direct_folner))
      return *code;
  } catch (const SpeclabError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  return 3;  // unreachable with require_subcommand(1)
}

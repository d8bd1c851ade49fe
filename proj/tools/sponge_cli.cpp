// sponge: victim generation, attack campaigns, reporting and self-tests.
//
// Exit codes: 0 success, 1 usage or configuration error, 2 runtime or attack error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "sponge/campaign/campaign.hpp"
#include "sponge/error.hpp"
#include "sponge/report/records.hpp"
#include "sponge/selftest.hpp"
#include "sponge/text/corpus.hpp"
#include "sponge/victims/generate.hpp"
#include "sponge/victims/weights_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;

json read_config_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw sponge::ConfigError("cannot open config file " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw sponge::ConfigError(path.string() + ": " + e.what());
  }
}

void require_file(const fs::path& path, const char* what) {
  if (path.empty()) throw sponge::ConfigError(std::string(what) + " is required");
  if (!fs::is_regular_file(path)) {
    throw sponge::ConfigError(std::string(what) + " not found: " + path.string());
  }
}

const sponge::HomoglyphTable& homoglyph_table(const std::optional<fs::path>& path,
                                               std::optional<sponge::HomoglyphTable>& storage) {
  if (!path) return sponge::HomoglyphTable::builtin();
  require_file(*path, "homoglyph table");
  storage = sponge::HomoglyphTable::load(*path);
  return *storage;
}

// ---- gen-victim -------------------------------------------------------------

struct GenOptions {
  std::string config;
  std::string kind = "ar";
  std::uint64_t seed = sponge::kDefaultSeed;
  std::string corpus;
  std::string out;
  std::string homoglyphs;
  sponge::VictimDims dims;
};

void apply_gen_json(GenOptions& g, const json& doc) {
  if (!doc.is_object()) throw sponge::ConfigError("config file must hold a JSON object");
  try {
    for (const auto& [key, v] : doc.items()) {
      if (v.is_null()) continue;
      if (key == "kind") g.kind = v.get<std::string>();
      else if (key == "seed") g.seed = v.get<std::uint64_t>();
      else if (key == "corpus") g.corpus = v.get<std::string>();
      else if (key == "out") g.out = v.get<std::string>();
      else if (key == "homoglyphs") g.homoglyphs = v.get<std::string>();
      else if (key == "max-steps") g.dims.max_steps = v.get<std::size_t>();
      else if (key == "d-text") g.dims.d_text = v.get<std::size_t>();
      else if (key == "d-spk") g.dims.d_spk = v.get<std::size_t>();
      else if (key == "d-hidden") g.dims.d_hidden = v.get<std::size_t>();
      else if (key == "frames-per-unit") g.dims.frames_per_unit = v.get<std::size_t>();
      else throw sponge::ConfigError("unknown config key '" + key + "' for gen-victim");
    }
  } catch (const json::exception& e) {
    throw sponge::ConfigError(std::string("gen-victim config: ") + e.what());
  }
}

int run_gen_victim(CLI::App& cmd, GenOptions flags) {
  GenOptions g;
  if (!flags.config.empty()) apply_gen_json(g, read_config_file(flags.config));
  auto given = [&](const char* name) { return cmd.count(name) > 0; };
  if (given("--kind")) g.kind = flags.kind;
  if (given("--seed")) g.seed = flags.seed;
  if (given("--corpus")) g.corpus = flags.corpus;
  if (given("--out")) g.out = flags.out;
  if (given("--homoglyphs")) g.homoglyphs = flags.homoglyphs;
  if (given("--max-steps")) g.dims.max_steps = flags.dims.max_steps;
  if (given("--d-text")) g.dims.d_text = flags.dims.d_text;
  if (given("--d-spk")) g.dims.d_spk = flags.dims.d_spk;
  if (given("--d-hidden")) g.dims.d_hidden = flags.dims.d_hidden;
  if (given("--frames-per-unit")) g.dims.frames_per_unit = flags.dims.frames_per_unit;

  const sponge::VictimKind kind = sponge::parse_kind(g.kind);
  g.dims.validate(kind);
  if (g.out.empty()) throw sponge::ConfigError("--out is required");
  if (kind == sponge::VictimKind::autoregressive) require_file(g.corpus, "probe corpus (--corpus)");
  std::optional<sponge::HomoglyphTable> storage;
  const auto& table = homoglyph_table(
      g.homoglyphs.empty() ? std::nullopt : std::optional<fs::path>(g.homoglyphs), storage);

  if (kind == sponge::VictimKind::non_autoregressive) {
    const auto victim = sponge::generate_nar_victim(g.dims, g.seed, table);
    sponge::save_victim(victim, g.out);
    std::cout << "nar victim seed " << g.seed << " vocabulary " << victim.embedding().size()
              << " written to " << g.out << "\n";
    return kExitOk;
  }
  const auto victim = sponge::generate_ar_victim(g.dims, g.seed, table);
  const auto corpus = sponge::load_corpus(g.corpus);
  const auto probes = sponge::make_probes(victim, corpus, g.seed);
  const auto calibration = sponge::calibrate_stop_bias(victim, probes);
  const auto calibrated = victim.with_calibration(calibration);
  sponge::save_victim(calibrated, g.out);
  std::cout << "ar victim seed " << g.seed << " vocabulary " << victim.embedding().size() << "\n"
            << "calibration: b_stop " << sponge::format_number(calibration.stop_bias)
            << ", median clean stop step " << calibration.median_step << " over "
            << probes.size() << " probes, " << calibration.iterations << " bisection steps\n"
            << "written to " << g.out << "\n";
  return kExitOk;
}

// ---- attack -----------------------------------------------------------------

struct AttackFlags {
  std::string config, corpus, victim, out, methods, norm, homoglyphs;
  int iters = 0, beam = 0, candidates = 0, jobs = 0;
  double alpha = 0, eps = 0, ratio = 0;
  std::size_t max_steps = 0, limit = 0;
  std::uint64_t seed = 0;
};

int run_attack(CLI::App& cmd, const AttackFlags& f) {
  sponge::CampaignConfig cfg;
  if (!f.config.empty()) sponge::apply_config_json(cfg, read_config_file(f.config));
  auto given = [&](const char* name) { return cmd.count(name) > 0; };
  if (given("--corpus")) cfg.corpus = f.corpus;
  if (given("--victim")) cfg.victim = f.victim;
  if (given("--out")) cfg.out = f.out;
  if (given("--methods")) cfg.methods = sponge::parse_methods(f.methods);
  if (given("--iters")) cfg.attack.iterations = f.iters;
  if (given("--alpha")) cfg.attack.alpha = f.alpha;
  if (given("--eps")) cfg.attack.eps = f.eps;
  if (given("--norm")) cfg.attack.norm = sponge::parse_norm(f.norm);
  if (given("--ratio")) cfg.attack.ratio = f.ratio;
  if (given("--beam")) cfg.attack.beam = f.beam;
  if (given("--candidates")) cfg.attack.candidates_per_strategy = f.candidates;
  if (given("--max-steps")) cfg.max_steps = f.max_steps;
  if (given("--limit")) cfg.limit = f.limit;
  if (given("--jobs")) cfg.jobs = f.jobs;
  if (given("--seed")) cfg.seed = f.seed;
  if (given("--homoglyphs")) cfg.homoglyphs = f.homoglyphs;

  cfg.validate();
  require_file(cfg.corpus, "corpus (--corpus)");
  require_file(cfg.victim, "victim weight file (--victim)");
  if (cfg.out.empty()) throw sponge::ConfigError("--out is required");
  std::optional<sponge::HomoglyphTable> storage;
  const auto& table = homoglyph_table(cfg.homoglyphs, storage);

  std::unique_ptr<sponge::Victim> victim = sponge::load_victim(cfg.victim);
  if (cfg.max_steps) {
    if (auto* ar = dynamic_cast<sponge::ArVictim*>(victim.get())) {
      victim = std::make_unique<sponge::ArVictim>(ar->with_max_steps(*cfg.max_steps));
    }
  }
  const auto corpus = sponge::load_corpus(cfg.corpus);
  const auto result = sponge::run_campaign(*victim, corpus, cfg, table, &std::cerr);
  auto manifest = sponge::make_manifest(cfg, *victim, result);
  manifest["victim"]["path"] = cfg.victim.string();
  sponge::emit(cfg.out, result.outcomes, result.aggregates, manifest);

  std::cout << sponge::format_table(result.aggregates);
  std::cout << result.processed << " utterances attacked, " << result.skipped.size()
            << " skipped; results in " << cfg.out.string() << "\n";
  return kExitOk;
}

// ---- report -----------------------------------------------------------------

int run_report(const std::vector<std::string>& paths) {
  std::vector<sponge::LoadedRun> runs;
  for (const auto& p : paths) runs.push_back(sponge::load_run(p));
  std::vector<sponge::UtteranceOutcome> all;
  std::set<std::pair<std::string, std::string>> seen;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    if (i > 0) {
      sponge::check_compatible_manifests(runs[0].manifest, runs[i].manifest,
                                         runs[0].source.string(), runs[i].source.string());
    }
    for (const auto& o : runs[i].outcomes) {
      if (!seen.insert({o.utterance_id, o.method}).second) {
        throw sponge::ConfigError("outcome " + o.method + "/" + o.utterance_id +
                                  " appears in more than one input");
      }
      all.push_back(o);
    }
  }
  const auto aggregates = sponge::aggregate(all);
  std::cout << sponge::format_table(aggregates);

  if (runs.size() == 1) {
    const auto emitted = runs[0].source.parent_path() / "aggregates.csv";
    std::ifstream in(emitted, std::ios::binary);
    if (in) {
      std::ostringstream file, recomputed;
      file << in.rdbuf();
      sponge::write_aggregates_csv(recomputed, aggregates);
      if (file.str() != recomputed.str()) {
        std::cerr << "error: recomputed aggregates differ from " << emitted.string() << "\n";
        return kExitRuntime;
      }
      std::cout << "aggregates match " << emitted.string() << "\n";
    }
  }
  return kExitOk;
}

// ---- gradcheck --------------------------------------------------------------

int run_gradcheck(std::uint64_t seed) {
  const auto report = sponge::run_gradcheck_suite(seed);
  std::cout << sponge::format_gradcheck(report);
  return report.passed() ? kExitOk : kExitRuntime;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Efficiency attacks on surrogate text-to-speech models"};
  app.require_subcommand(1);

  GenOptions gen;
  auto* gen_cmd = app.add_subcommand("gen-victim", "build, calibrate and save a seeded victim");
  gen_cmd->add_option("--config", gen.config, "JSON file with the same keys as the flags");
  gen_cmd->add_option("--kind", gen.kind, "ar or nar");
  gen_cmd->add_option("--seed", gen.seed);
  gen_cmd->add_option("--corpus", gen.corpus, "probe corpus for stop-bias calibration (ar)");
  gen_cmd->add_option("--out", gen.out, "weight file to write");
  gen_cmd->add_option("--homoglyphs", gen.homoglyphs, "homoglyph table (default: builtin)");
  gen_cmd->add_option("--max-steps", gen.dims.max_steps);
  gen_cmd->add_option("--d-text", gen.dims.d_text);
  gen_cmd->add_option("--d-spk", gen.dims.d_spk);
  gen_cmd->add_option("--d-hidden", gen.dims.d_hidden);
  gen_cmd->add_option("--frames-per-unit", gen.dims.frames_per_unit);

  AttackFlags af;
  auto* attack_cmd = app.add_subcommand("attack", "run an attack campaign over a corpus");
  attack_cmd->add_option("--config", af.config, "JSON file with the same keys as the flags");
  attack_cmd->add_option("--corpus", af.corpus);
  attack_cmd->add_option("--victim", af.victim);
  attack_cmd->add_option("--out", af.out, "output directory");
  attack_cmd->add_option("--methods", af.methods,
                         "comma list of clean,spk-l2,spk-linf,spk-baseline,text,text-baseline");
  attack_cmd->add_option("--iters", af.iters);
  attack_cmd->add_option("--alpha", af.alpha);
  attack_cmd->add_option("--eps", af.eps, "default 2.0 for l2, 0.5 for linf");
  attack_cmd->add_option("--norm", af.norm, "norm of the speaker baseline (l2 or linf)");
  attack_cmd->add_option("--ratio", af.ratio);
  attack_cmd->add_option("--beam", af.beam);
  attack_cmd->add_option("--candidates", af.candidates, "text candidates per strategy");
  attack_cmd->add_option("--max-steps", af.max_steps, "override the AR decoder cap");
  attack_cmd->add_option("--limit", af.limit, "use only the first N utterances");
  attack_cmd->add_option("--jobs", af.jobs);
  attack_cmd->add_option("--seed", af.seed);
  attack_cmd->add_option("--homoglyphs", af.homoglyphs);

  std::vector<std::string> report_paths;
  auto* report_cmd = app.add_subcommand("report", "print the aggregate table of finished runs");
  report_cmd->add_option("runs", report_paths, "run directories or outcomes.jsonl files")
      ->required();

  std::uint64_t check_seed = sponge::kDefaultSeed;
  auto* check_cmd = app.add_subcommand("gradcheck", "compare tape gradients to finite differences");
  check_cmd->add_option("--seed", check_seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*gen_cmd) return run_gen_victim(*gen_cmd, gen);
    if (*attack_cmd) return run_attack(*attack_cmd, af);
    if (*report_cmd) return run_report(report_paths);
    if (*check_cmd) return run_gradcheck(check_seed);
  } catch (const sponge::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}

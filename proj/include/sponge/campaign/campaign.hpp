#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sponge/attack/config.hpp"
#include "sponge/metrics/aggregate.hpp"
#include "sponge/text/candidate.hpp"
#include "sponge/victims/victim.hpp"

namespace sponge {

inline constexpr const char* kArtifactVersion = "0.1.0";
inline constexpr std::uint64_t kDefaultSeed = 42;

struct CampaignConfig {
  std::filesystem::path corpus;
  std::filesystem::path victim;
  std::filesystem::path out;
  std::vector<std::string> methods{std::begin(kMethodLabels), std::end(kMethodLabels)};
  AttackConfig attack;
  std::optional<std::size_t> max_steps;
  std::optional<std::size_t> limit;
  int jobs = 1;
  std::uint64_t seed = kDefaultSeed;
  std::optional<std::filesystem::path> homoglyphs;

  // Throws ConfigError; checks invariants, not that paths exist.
  void validate() const;
  // Keys mirror the command-line flag names.
  nlohmann::json to_json() const;
};

// Overlays the keys present in `doc` (flag names, e.g. "iters", "max-steps")
// on `config`. Unknown keys and mistyped values throw ConfigError.
void apply_config_json(CampaignConfig& config, const nlohmann::json& doc);

// "clean,spk-l2" or a JSON list; labels are checked, duplicates rejected.
std::vector<std::string> parse_methods(const std::string& list);

struct SkippedUtterance {
  std::string id;
  std::vector<char32_t> characters;
};

struct CampaignResult {
  std::vector<UtteranceOutcome> outcomes;
  std::vector<CampaignAggregate> aggregates;
  std::vector<SkippedUtterance> skipped;
  std::size_t considered = 0;
  std::size_t processed = 0;
};

// Seed of one (utterance, method) attack run; independent of scheduling.
std::uint64_t attack_seed(std::uint64_t campaign_seed, const std::string& utterance_id,
                          const std::string& method);

// Runs every method on every encodable utterance with `config.jobs` workers.
// Outcomes come back in canonical (method, corpus) order whatever the job
// count. Skipped utterances are reported on `log`. Throws AttackError when
// nothing is left to attack.
CampaignResult run_campaign(const Victim& victim, const std::vector<Utterance>& corpus,
                            const CampaignConfig& config, const HomoglyphTable& homoglyphs,
                            std::ostream* log = nullptr);

nlohmann::json make_manifest(const CampaignConfig& config, const Victim& victim,
                             const CampaignResult& result);

// Refuses (ConfigError) to combine runs whose manifests disagree on the
// victim, seed or attack settings.
void check_compatible_manifests(const nlohmann::json& a, const nlohmann::json& b,
                                const std::string& a_name, const std::string& b_name);

}  // namespace sponge

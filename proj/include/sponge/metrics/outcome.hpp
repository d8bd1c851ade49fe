#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sponge/attack/outcome.hpp"

namespace sponge {

// Method labels, in report order.
inline constexpr const char* kMethodLabels[] = {"clean",       "spk-l2", "spk-linf",
                                                "spk-baseline", "text",   "text-baseline"};

bool is_method_label(const std::string& label);
// Index in kMethodLabels; throws ConfigError for unknown labels.
std::size_t method_rank(const std::string& label);

struct UtteranceOutcome {
  std::string utterance_id;
  std::string method;
  std::int64_t clean_frames = 0;
  std::int64_t adv_frames = 0;
  bool success = false;
  double wall_time_ms = 0.0;
  std::uint64_t mac_count = 0;
  std::optional<SpeakerPerturbation> speaker;
  std::optional<TextPerturbation> text;
};

// adv >= 1.2 * clean, evaluated exactly in integers.
bool is_success(std::int64_t clean_frames, std::int64_t adv_frames);

UtteranceOutcome make_outcome(std::string utterance_id, std::string method,
                              const AttackOutcome& attack);

}  // namespace sponge

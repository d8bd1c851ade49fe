#include "sponge/metrics/outcome.hpp"

#include <iterator>

#include "sponge/error.hpp"

namespace sponge {

bool is_method_label(const std::string& label) {
  for (const char* m : kMethodLabels) {
    if (label == m) return true;
  }
  return false;
}

std::size_t method_rank(const std::string& label) {
  for (std::size_t i = 0; i < std::size(kMethodLabels); ++i) {
    if (label == kMethodLabels[i]) return i;
  }
  throw ConfigError("unknown method '" + label +
                    "' (expected clean, spk-l2, spk-linf, spk-baseline, text, text-baseline)");
}

bool is_success(std::int64_t clean_frames, std::int64_t adv_frames) {
  return adv_frames * 5 >= clean_frames * 6;
}

UtteranceOutcome make_outcome(std::string utterance_id, std::string method,
                              const AttackOutcome& attack) {
  UtteranceOutcome o;
  o.utterance_id = std::move(utterance_id);
  o.method = std::move(method);
  o.clean_frames = attack.clean.frames;
  o.adv_frames = attack.adversarial.frames;
  o.success = is_success(o.clean_frames, o.adv_frames);
  o.wall_time_ms = attack.adversarial_time_ms;
  o.mac_count = attack.adversarial.mac_count;
  o.speaker = attack.speaker;
  o.text = attack.text;
  return o;
}

}  // namespace sponge

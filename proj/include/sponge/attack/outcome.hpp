#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sponge/attack/config.hpp"
#include "sponge/text/candidate.hpp"
#include "sponge/victims/victim.hpp"

namespace sponge {

struct SpeakerPerturbation {
  Norm norm = Norm::l2;
  double eps = 0.0;
  std::vector<double> delta;
  double l2 = 0.0;
  double linf = 0.0;
};

struct TextPerturbation {
  std::u32string original;
  std::u32string adversarial;
  std::vector<Edit> edits;
  std::size_t budget = 0;
};

struct AttackOutcome {
  VictimOutput clean;
  // Victim output on the returned adversarial input.
  VictimOutput adversarial;
  // Wall time of the forward pass that produced `adversarial`.
  double adversarial_time_ms = 0.0;
  // Best frame count seen so far, one entry per iteration.
  std::vector<std::int64_t> best_frames;
  // Attack loss at each iterate (gradient attacks only).
  std::vector<double> loss_trace;
  int iterations_run = 0;
  std::optional<SpeakerPerturbation> speaker;
  std::optional<TextPerturbation> text;
};

struct TimedOutput {
  VictimOutput output;
  double ms = 0.0;
};

// One fast-path forward pass under a monotonic clock.
TimedOutput timed_evaluate(const Victim& victim, std::span<const TokenId> text,
                           std::span<const double> speaker, double target);

}  // namespace sponge

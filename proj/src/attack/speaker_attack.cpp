#include "sponge/attack/speaker_attack.hpp"

#include <cmath>

#include "sponge/attack/projection.hpp"
#include "sponge/error.hpp"
#include "sponge/random.hpp"

namespace sponge {
namespace {

std::vector<double> shifted(std::span<const double> s, const std::vector<double>& delta) {
  std::vector<double> out(s.begin(), s.end());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += delta[i];
  return out;
}

// The AR decoder cannot run past max_steps, so a best at the cap is final.
bool at_length_cap(const Victim& victim, std::int64_t units) {
  return victim.kind() == VictimKind::autoregressive &&
         units >= static_cast<std::int64_t>(victim.dims().max_steps);
}

void finish(AttackOutcome& out, const Victim& victim, std::span<const TokenId> text,
            std::span<const double> speaker, const AttackConfig& config, Norm norm, double eps,
            std::vector<double> best_delta) {
  auto timed = timed_evaluate(victim, text, shifted(speaker, best_delta), config.target_y);
  out.adversarial = std::move(timed.output);
  out.adversarial_time_ms = timed.ms;
  SpeakerPerturbation p;
  p.norm = norm;
  p.eps = eps;
  p.l2 = vector_norm(best_delta, Norm::l2);
  p.linf = vector_norm(best_delta, Norm::linf);
  p.delta = std::move(best_delta);
  out.speaker = std::move(p);
}

}  // namespace

AttackOutcome attack_speaker(const Victim& victim, std::span<const TokenId> text,
                             std::span<const double> speaker, const AttackConfig& config,
                             Norm norm) {
  const double eps = config.eps_for(norm);
  AttackOutcome out;
  out.clean = victim.evaluate(text, speaker, config.target_y);

  std::vector<double> delta(speaker.size(), 0.0);
  std::vector<double> best_delta = delta;
  std::int64_t best_frames = out.clean.frames;
  const auto frames_per_unit = static_cast<std::int64_t>(victim.dims().frames_per_unit);

  for (int it = 0; it < config.iterations; ++it) {
    if (at_length_cap(victim, best_frames / frames_per_unit)) break;
    ForwardPass pass = victim.forward(text, shifted(speaker, delta), config.target_y);
    if (!std::isfinite(pass.output().loss)) {
      throw AttackError("attack loss became non-finite at iteration " + std::to_string(it));
    }
    out.loss_trace.push_back(pass.output().loss);
    if (pass.output().frames > best_frames) {
      best_frames = pass.output().frames;
      best_delta = delta;
    }
    pgd_step(delta, pass.speaker_gradient(), config.alpha, eps, norm);
    out.best_frames.push_back(best_frames);
    ++out.iterations_run;
  }
  if (out.iterations_run > 0) {
    // The last step's iterate has not been scored yet.
    const std::int64_t frames =
        victim.evaluate(text, shifted(speaker, delta), config.target_y).frames;
    if (frames > best_frames) {
      best_frames = frames;
      best_delta = delta;
      out.best_frames.back() = best_frames;
    }
  }
  finish(out, victim, text, speaker, config, norm, eps, std::move(best_delta));
  return out;
}

AttackOutcome baseline_speaker_gaussian(const Victim& victim, std::span<const TokenId> text,
                                        std::span<const double> speaker,
                                        const AttackConfig& config, Norm norm) {
  const double eps = config.eps_for(norm);
  AttackOutcome out;
  out.clean = victim.evaluate(text, speaker, config.target_y);

  Rng rng(config.seed);
  // Per-coordinate scale giving draws of typical norm eps before projection.
  const double sigma =
      norm == Norm::l2 ? eps / std::sqrt(static_cast<double>(speaker.size())) : eps;
  std::vector<double> best_delta(speaker.size(), 0.0);
  std::int64_t best_frames = -1;
  for (int it = 0; it < config.iterations; ++it) {
    std::vector<double> delta = rng.gaussian_vector(speaker.size());
    for (double& x : delta) x *= sigma;
    project_in_place(delta, eps, norm);
    const std::int64_t frames =
        victim.evaluate(text, shifted(speaker, delta), config.target_y).frames;
    if (frames > best_frames) {
      best_frames = frames;
      best_delta = std::move(delta);
    }
    out.best_frames.push_back(best_frames);
    ++out.iterations_run;
  }
  finish(out, victim, text, speaker, config, norm, eps, std::move(best_delta));
  return out;
}

}  // namespace sponge

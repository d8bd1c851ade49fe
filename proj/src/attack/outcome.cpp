#include "sponge/attack/outcome.hpp"

#include <chrono>

namespace sponge {

TimedOutput timed_evaluate(const Victim& victim, std::span<const TokenId> text,
                           std::span<const double> speaker, double target) {
  const auto start = std::chrono::steady_clock::now();
  VictimOutput out = victim.evaluate(text, speaker, target);
  const auto stop = std::chrono::steady_clock::now();
  return {std::move(out), std::chrono::duration<double, std::milli>(stop - start).count()};
}

}  // namespace sponge

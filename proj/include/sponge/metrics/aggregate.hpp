#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sponge/metrics/outcome.hpp"

namespace sponge {

struct CampaignAggregate {
  std::string method;
  std::size_t count = 0;
  double mean_absolute = 0.0;
  std::int64_t max_absolute = 0;
  double mean_clean = 0.0;
  std::int64_t max_clean = 0;
  double mean_incre = 0.0;
  double max_incre = 0.0;
  // Percent; unset for the clean method.
  std::optional<double> asr;
  double mean_time_ms = 0.0;
  double mean_macs = 0.0;
};

// Percent of outcomes with adv >= 1.2 * clean. Throws MetricError when empty.
double asr(std::span<const UtteranceOutcome> outcomes);

// (mean_adv / mean_clean - 1, max_adv / max_clean - 1). Throws MetricError
// when either clean value is not positive.
std::pair<double, double> increments(double mean_clean, double max_clean, double mean_adv,
                                     double max_adv);

// One aggregate per method present, in kMethodLabels order.
std::vector<CampaignAggregate> aggregate(std::span<const UtteranceOutcome> outcomes);

// Canonical order: method rank, then the order given by `utterance_order`
// (ids missing from it sort last by id).
void sort_outcomes(std::vector<UtteranceOutcome>& outcomes,
                   const std::vector<std::string>& utterance_order);

}  // namespace sponge

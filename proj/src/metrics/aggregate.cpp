#include "sponge/metrics/aggregate.hpp"

#include <algorithm>
#include <map>
#include <unordered_map>

#include "sponge/error.hpp"

namespace sponge {

double asr(std::span<const UtteranceOutcome> outcomes) {
  if (outcomes.empty()) throw MetricError("attack success rate of an empty outcome set");
  std::size_t hits = 0;
  for (const auto& o : outcomes) hits += is_success(o.clean_frames, o.adv_frames) ? 1 : 0;
  return 100.0 * static_cast<double>(hits) / static_cast<double>(outcomes.size());
}

std::pair<double, double> increments(double mean_clean, double max_clean, double mean_adv,
                                     double max_adv) {
  if (!(mean_clean > 0.0) || !(max_clean > 0.0)) {
    throw MetricError("increments need positive clean mean and max");
  }
  return {mean_adv / mean_clean - 1.0, max_adv / max_clean - 1.0};
}

std::vector<CampaignAggregate> aggregate(std::span<const UtteranceOutcome> outcomes) {
  std::map<std::size_t, std::vector<const UtteranceOutcome*>> by_method;
  for (const auto& o : outcomes) by_method[method_rank(o.method)].push_back(&o);

  std::vector<CampaignAggregate> out;
  for (const auto& [rank, group] : by_method) {
    CampaignAggregate a;
    a.method = kMethodLabels[rank];
    a.count = group.size();
    double sum_adv = 0.0, sum_clean = 0.0, sum_time = 0.0, sum_macs = 0.0;
    std::vector<UtteranceOutcome> copies;
    copies.reserve(group.size());
    for (const auto* o : group) {
      sum_adv += static_cast<double>(o->adv_frames);
      sum_clean += static_cast<double>(o->clean_frames);
      sum_time += o->wall_time_ms;
      sum_macs += static_cast<double>(o->mac_count);
      a.max_absolute = std::max(a.max_absolute, o->adv_frames);
      a.max_clean = std::max(a.max_clean, o->clean_frames);
      copies.push_back(*o);
    }
    const double n = static_cast<double>(group.size());
    a.mean_absolute = sum_adv / n;
    a.mean_clean = sum_clean / n;
    a.mean_time_ms = sum_time / n;
    a.mean_macs = sum_macs / n;
    if (a.method != "clean") {
      std::tie(a.mean_incre, a.max_incre) =
          increments(a.mean_clean, static_cast<double>(a.max_clean), a.mean_absolute,
                     static_cast<double>(a.max_absolute));
      a.asr = asr(copies);
    }
    out.push_back(std::move(a));
  }
  return out;
}

void sort_outcomes(std::vector<UtteranceOutcome>& outcomes,
                   const std::vector<std::string>& utterance_order) {
  std::unordered_map<std::string, std::size_t> position;
  for (std::size_t i = 0; i < utterance_order.size(); ++i) position.emplace(utterance_order[i], i);
  auto key = [&](const UtteranceOutcome& o) {
    auto it = position.find(o.utterance_id);
    return std::make_tuple(method_rank(o.method),
                           it == position.end() ? utterance_order.size() : it->second,
                           o.utterance_id);
  };
  std::stable_sort(outcomes.begin(), outcomes.end(),
                   [&](const UtteranceOutcome& a, const UtteranceOutcome& b) {
                     return key(a) < key(b);
                   });
}

}  // namespace sponge

#pragma once

#include <filesystem>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sponge/metrics/aggregate.hpp"
#include "sponge/report/kde.hpp"

namespace sponge {

// Shortest text that is at most 17 significant digits and parses back to the
// same double; '.' decimal point, no grouping.
std::string format_number(double value);

nlohmann::json outcome_to_json(const UtteranceOutcome& outcome);
// Throws SchemaError naming the missing or malformed field.
UtteranceOutcome outcome_from_json(const nlohmann::json& record);

// One JSON object per line. Wall times are kept out of these records so that
// reruns produce byte-identical files; they go to the timing lines instead.
void write_outcomes(std::ostream& out, const std::vector<UtteranceOutcome>& outcomes);
void write_timings(std::ostream& out, const std::vector<UtteranceOutcome>& outcomes);
std::vector<UtteranceOutcome> read_outcomes(std::istream& in, const std::string& source_name);
// Fills wall_time_ms from timing lines keyed by (id, method).
void merge_timings(std::vector<UtteranceOutcome>& outcomes, std::istream& in,
                   const std::string& source_name);

inline constexpr const char* kAggregateHeader =
    "method,mean_absolute,max_absolute,mean_incre,max_incre,asr,mean_time_ms,mean_macs";

void write_aggregates_csv(std::ostream& out, const std::vector<CampaignAggregate>& aggregates);

struct NamedCurve {
  std::string method;
  KdeCurve curve;
};
void write_kde_csv(std::ostream& out, const std::vector<NamedCurve>& curves);

enum class KdeQuantity { frames, time_ms, macs };
// Per-method curves over the given outcome quantity.
std::vector<NamedCurve> kde_by_method(const std::vector<UtteranceOutcome>& outcomes,
                                      KdeQuantity quantity);

// Writes outcomes.jsonl, timings.jsonl, aggregates.csv, kde.csv,
// kde_time_ms.csv, kde_macs.csv and manifest.json into `dir` (created if
// needed). I/O failures throw IoError naming the path.
void emit(const std::filesystem::path& dir, const std::vector<UtteranceOutcome>& outcomes,
          const std::vector<CampaignAggregate>& aggregates, const nlohmann::json& manifest);

struct LoadedRun {
  std::filesystem::path source;
  std::vector<UtteranceOutcome> outcomes;
  nlohmann::json manifest;
};

// Accepts a run directory or an outcomes.jsonl path; the manifest and timing
// lines are read from the same directory.
LoadedRun load_run(const std::filesystem::path& path);

// Human-readable table with the aggregate columns.
std::string format_table(const std::vector<CampaignAggregate>& aggregates);

}  // namespace sponge

#include "sponge/campaign/campaign.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <set>
#include <thread>

#include "sponge/attack/speaker_attack.hpp"
#include "sponge/attack/text_attack.hpp"
#include "sponge/error.hpp"
#include "sponge/random.hpp"
#include "sponge/simd/kernels.hpp"
#include "sponge/text/utf8.hpp"
#include "sponge/victims/generate.hpp"
#include "sponge/victims/weights_io.hpp"

namespace sponge {
namespace {

using nlohmann::json;

template <class T>
T typed(const json& v, const std::string& key) {
  try {
    if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw ConfigError("config key '" + key + "' must be a string");
    } else if constexpr (std::is_unsigned_v<T>) {
      // Parsed files give unsigned values, documents built in code give signed ones.
      if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
        throw ConfigError("config key '" + key + "' must be a nonnegative integer");
      }
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) throw ConfigError("config key '" + key + "' must be an integer");
    } else {
      if (!v.is_number()) throw ConfigError("config key '" + key + "' must be a number");
    }
    return v.get<T>();
  } catch (const json::exception& e) {
    throw ConfigError("config key '" + key + "': " + e.what());
  }
}

std::vector<UtteranceOutcome> attack_utterance(const Victim& victim, const Utterance& u,
                                               const CampaignConfig& config,
                                               const HomoglyphTable& homoglyphs) {
  const auto ids = victim.embedding().encode(u.chars);
  const auto speaker = utterance_speaker(config.seed, u, victim.dims().d_spk);
  std::vector<UtteranceOutcome> out;
  for (const auto& method : config.methods) {
    AttackConfig ac = config.attack;
    ac.seed = attack_seed(config.seed, u.id, method);
    AttackOutcome result;
    if (method == "clean") {
      auto timed = timed_evaluate(victim, ids, speaker, ac.target_y);
      result.clean = timed.output;
      result.adversarial = std::move(timed.output);
      result.adversarial_time_ms = timed.ms;
    } else if (method == "spk-l2") {
      result = attack_speaker(victim, ids, speaker, ac, Norm::l2);
    } else if (method == "spk-linf") {
      result = attack_speaker(victim, ids, speaker, ac, Norm::linf);
    } else if (method == "spk-baseline") {
      result = baseline_speaker_gaussian(victim, ids, speaker, ac, ac.norm);
    } else if (method == "text") {
      result = attack_text(victim, u.chars, speaker, ac, homoglyphs);
    } else if (method == "text-baseline") {
      result = baseline_text_random(victim, u.chars, speaker, ac, homoglyphs);
    } else {
      throw ConfigError("unknown method '" + method + "'");
    }
    out.push_back(make_outcome(u.id, method, result));
  }
  return out;
}

}  // namespace

void CampaignConfig::validate() const {
  if (methods.empty()) throw ConfigError("at least one method is required");
  std::set<std::string> seen;
  for (const auto& m : methods) {
    method_rank(m);
    if (!seen.insert(m).second) throw ConfigError("method '" + m + "' listed twice");
  }
  attack.validate();
  if (jobs < 1) throw ConfigError("jobs must be at least 1");
  if (max_steps && *max_steps == 0) throw ConfigError("max-steps must be at least 1");
  if (limit && *limit == 0) throw ConfigError("limit must be at least 1");
}

json CampaignConfig::to_json() const {
  json j;
  j["corpus"] = corpus.string();
  j["victim"] = victim.string();
  j["out"] = out.string();
  j["methods"] = methods;
  j["iters"] = attack.iterations;
  j["alpha"] = attack.alpha;
  j["eps"] = attack.eps ? json(*attack.eps) : json(nullptr);
  j["eps-l2"] = attack.eps_for(Norm::l2);
  j["eps-linf"] = attack.eps_for(Norm::linf);
  j["norm"] = std::string(norm_label(attack.norm));
  j["ratio"] = attack.ratio;
  j["beam"] = attack.beam;
  j["candidates"] = attack.candidates_per_strategy;
  j["target-y"] = attack.target_y;
  j["max-steps"] = max_steps ? json(*max_steps) : json(nullptr);
  j["limit"] = limit ? json(*limit) : json(nullptr);
  j["jobs"] = jobs;
  j["seed"] = seed;
  j["homoglyphs"] = homoglyphs ? json(homoglyphs->string()) : json(nullptr);
  return j;
}

std::vector<std::string> parse_methods(const std::string& list) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= list.size()) {
    const std::size_t comma = std::min(list.find(',', start), list.size());
    std::string item = list.substr(start, comma - start);
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (item.empty()) throw ConfigError("empty entry in method list '" + list + "'");
    method_rank(item);
    if (std::find(out.begin(), out.end(), item) != out.end()) {
      throw ConfigError("method '" + item + "' listed twice");
    }
    out.push_back(item);
    start = comma + 1;
  }
  return out;
}

void apply_config_json(CampaignConfig& c, const json& doc) {
  if (!doc.is_object()) throw ConfigError("config file must hold a JSON object");
  for (const auto& [key, v] : doc.items()) {
    if (v.is_null()) continue;
    if (key == "corpus") {
      c.corpus = typed<std::string>(v, key);
    } else if (key == "victim") {
      c.victim = typed<std::string>(v, key);
    } else if (key == "out") {
      c.out = typed<std::string>(v, key);
    } else if (key == "methods") {
      if (v.is_string()) {
        c.methods = parse_methods(v.get<std::string>());
      } else if (v.is_array()) {
        std::string joined;
        for (const auto& m : v) joined += (joined.empty() ? "" : ",") + typed<std::string>(m, key);
        c.methods = parse_methods(joined);
      } else {
        throw ConfigError("config key 'methods' must be a string or a list");
      }
    } else if (key == "iters") {
      c.attack.iterations = typed<int>(v, key);
    } else if (key == "alpha") {
      c.attack.alpha = typed<double>(v, key);
    } else if (key == "eps") {
      c.attack.eps = typed<double>(v, key);
    } else if (key == "norm") {
      c.attack.norm = parse_norm(typed<std::string>(v, key));
    } else if (key == "ratio") {
      c.attack.ratio = typed<double>(v, key);
    } else if (key == "beam") {
      c.attack.beam = typed<int>(v, key);
    } else if (key == "candidates") {
      c.attack.candidates_per_strategy = typed<int>(v, key);
    } else if (key == "target-y") {
      c.attack.target_y = typed<double>(v, key);
    } else if (key == "max-steps") {
      c.max_steps = typed<std::size_t>(v, key);
    } else if (key == "limit") {
      c.limit = typed<std::size_t>(v, key);
    } else if (key == "jobs") {
      c.jobs = typed<int>(v, key);
    } else if (key == "seed") {
      c.seed = typed<std::uint64_t>(v, key);
    } else if (key == "homoglyphs") {
      c.homoglyphs = typed<std::string>(v, key);
    } else if (key == "eps-l2" || key == "eps-linf") {
      // Derived values echoed by to_json; ignored on input.
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
}

std::uint64_t attack_seed(std::uint64_t campaign_seed, const std::string& utterance_id,
                          const std::string& method) {
  return derive_seed(campaign_seed, method + ":" + utterance_id);
}

CampaignResult run_campaign(const Victim& victim, const std::vector<Utterance>& corpus,
                            const CampaignConfig& config, const HomoglyphTable& homoglyphs,
                            std::ostream* log) {
  config.validate();
  CampaignResult result;
  const std::size_t considered =
      config.limit ? std::min(*config.limit, corpus.size()) : corpus.size();
  result.considered = considered;

  std::vector<const Utterance*> work;
  std::vector<std::string> order;
  for (std::size_t i = 0; i < considered; ++i) {
    const Utterance& u = corpus[i];
    auto missing = victim.embedding().unknown_characters(u.chars);
    if (!missing.empty()) {
      if (log) {
        *log << "warning: skipping utterance " << u.id << ": characters outside the vocabulary:";
        for (char32_t c : missing) *log << ' ' << utf8::codepoint_label(c);
        *log << '\n';
      }
      result.skipped.push_back({u.id, std::move(missing)});
      continue;
    }
    work.push_back(&u);
    order.push_back(u.id);
  }
  if (work.empty()) throw AttackError("no utterance left to attack after skipping");

  std::vector<std::vector<UtteranceOutcome>> slots(work.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    while (!failed.load()) {
      const std::size_t i = next.fetch_add(1);
      if (i >= work.size()) return;
      try {
        slots[i] = attack_utterance(victim, *work[i], config, homoglyphs);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        failed.store(true);
      }
    }
  };
  const std::size_t threads = std::min<std::size_t>(static_cast<std::size_t>(config.jobs), work.size());
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);

  for (auto& slot : slots) {
    for (auto& o : slot) result.outcomes.push_back(std::move(o));
  }
  sort_outcomes(result.outcomes, order);
  result.aggregates = aggregate(result.outcomes);
  result.processed = work.size();
  return result;
}

json make_manifest(const CampaignConfig& config, const Victim& victim,
                   const CampaignResult& result) {
  json skipped = json::array();
  for (const auto& s : result.skipped) {
    json chars = json::array();
    for (char32_t c : s.characters) chars.push_back(utf8::codepoint_label(c));
    skipped.push_back({{"id", s.id}, {"characters", chars}});
  }
  json m;
  m["artifact"] = "sponge";
  m["version"] = kArtifactVersion;
  m["config"] = config.to_json();
  m["seeds"] = {{"campaign", config.seed},
                {"per_attack", "derive_seed(campaign, method + \":\" + utterance id)"},
                {"speaker", "derive_seed(campaign, \"speaker:utt:\" + id) or \"speaker:ref:\" + speaker_ref"}};
  m["victim"] = {{"kind", std::string(kind_label(victim.kind()))},
                 {"seed", victim.seed()},
                 {"fingerprint", victim_fingerprint(victim)},
                 {"max_steps", victim.dims().max_steps}};
  m["text_scoring"] = "first-order decrease of the attack loss (negated replacement increment)";
  m["success_rule"] = "adv_frames >= 1.2 * clean_frames";
  m["backend"] = std::string(simd::backend_name(simd::active_backend()));
  m["utterances"] = {{"considered", result.considered},
                     {"processed", result.processed},
                     {"skipped", skipped}};
  return m;
}

void check_compatible_manifests(const json& a, const json& b, const std::string& a_name,
                                const std::string& b_name) {
  auto field = [](const json& m, const char* outer, const char* inner) -> json {
    if (!m.contains(outer) || !m[outer].contains(inner)) return nullptr;
    return m[outer][inner];
  };
  const std::pair<const char*, const char*> keys[] = {
      {"victim", "fingerprint"}, {"seeds", "campaign"}, {"config", "iters"},
      {"config", "alpha"},       {"config", "eps"},     {"config", "norm"},
      {"config", "ratio"},       {"config", "beam"},    {"config", "candidates"},
      {"config", "max-steps"},   {"config", "target-y"}};
  for (const auto& [outer, inner] : keys) {
    if (field(a, outer, inner) != field(b, outer, inner)) {
      throw ConfigError("refusing to combine runs with different " + std::string(outer) + "." +
                        inner + ": " + a_name + " has " + field(a, outer, inner).dump() + ", " +
                        b_name + " has " + field(b, outer, inner).dump());
    }
  }
}

}  // namespace sponge

#include "sponge/report/records.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "sponge/error.hpp"
#include "sponge/text/utf8.hpp"

namespace sponge {
namespace {

using nlohmann::json;

[[noreturn]] void bad_record(const std::string& where, const std::string& what) {
  throw SchemaError(where + ": " + what);
}

const json& need(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) bad_record(where, "record is not an object");
  auto it = obj.find(key);
  if (it == obj.end()) bad_record(where, std::string("missing field '") + key + "'");
  return *it;
}

EditStrategy parse_strategy(const std::string& s, const std::string& where) {
  if (s == "char") return EditStrategy::char_swap;
  if (s == "homo") return EditStrategy::homoglyph;
  bad_record(where, "unknown edit strategy '" + s + "'");
}

char32_t one_char(const json& j, const std::string& where) {
  const std::u32string s = utf8::decode(j.get<std::string>());
  if (s.size() != 1) bad_record(where, "edit characters must be single code points");
  return s[0];
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

void close_checked(std::ofstream& out, const std::filesystem::path& path) {
  out.close();
  if (!out) throw IoError("failed writing " + path.string());
}

double quantity_of(const UtteranceOutcome& o, KdeQuantity q) {
  switch (q) {
    case KdeQuantity::frames: return static_cast<double>(o.adv_frames);
    case KdeQuantity::time_ms: return o.wall_time_ms;
    case KdeQuantity::macs: return static_cast<double>(o.mac_count);
  }
  return 0.0;
}

}  // namespace

std::string format_number(double value) {
  char buf[64];
  // Shortest round-trip form first; fall back to 17 significant digits.
  auto res = std::to_chars(buf, buf + sizeof buf, value);
  if (res.ec != std::errc()) {
    res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
  }
  return std::string(buf, res.ptr);
}

json outcome_to_json(const UtteranceOutcome& o) {
  json j;
  j["id"] = o.utterance_id;
  j["method"] = o.method;
  j["clean_frames"] = o.clean_frames;
  j["adv_frames"] = o.adv_frames;
  j["success"] = o.success;
  j["mac_count"] = o.mac_count;
  if (o.speaker) {
    const auto& p = *o.speaker;
    j["perturbation"] = {{"kind", "speaker"}, {"norm", std::string(norm_label(p.norm))},
                         {"eps", p.eps},      {"l2", p.l2},
                         {"linf", p.linf},    {"delta", p.delta}};
  } else if (o.text) {
    const auto& p = *o.text;
    json edits = json::array();
    for (const auto& e : p.edits) {
      edits.push_back({{"position", e.position},
                       {"old", utf8::encode(e.old_char)},
                       {"new", utf8::encode(e.new_char)},
                       {"strategy", strategy_name(e.strategy)}});
    }
    j["perturbation"] = {{"kind", "text"},
                         {"budget", p.budget},
                         {"original_length", p.original.size()},
                         {"adversarial_length", p.adversarial.size()},
                         {"original", utf8::encode(p.original)},
                         {"adversarial", utf8::encode(p.adversarial)},
                         {"edits", std::move(edits)}};
  } else {
    j["perturbation"] = nullptr;
  }
  return j;
}

UtteranceOutcome outcome_from_json(const json& j) {
  UtteranceOutcome o;
  std::string where = "outcome record";
  try {
    const json& id = need(j, "id", where);
    o.utterance_id = id.get<std::string>();
    where = "outcome '" + o.utterance_id + "'";
    o.method = need(j, "method", where).get<std::string>();
    if (!is_method_label(o.method)) bad_record(where, "unknown method '" + o.method + "'");
    o.clean_frames = need(j, "clean_frames", where).get<std::int64_t>();
    o.adv_frames = need(j, "adv_frames", where).get<std::int64_t>();
    o.success = need(j, "success", where).get<bool>();
    o.mac_count = need(j, "mac_count", where).get<std::uint64_t>();
    const json& p = need(j, "perturbation", where);
    if (p.is_null()) return o;
    const std::string kind = need(p, "kind", where).get<std::string>();
    if (kind == "speaker") {
      SpeakerPerturbation s;
      s.norm = parse_norm(need(p, "norm", where).get<std::string>());
      s.eps = need(p, "eps", where).get<double>();
      s.l2 = need(p, "l2", where).get<double>();
      s.linf = need(p, "linf", where).get<double>();
      s.delta = need(p, "delta", where).get<std::vector<double>>();
      o.speaker = std::move(s);
    } else if (kind == "text") {
      TextPerturbation t;
      t.budget = need(p, "budget", where).get<std::size_t>();
      t.original = utf8::decode(need(p, "original", where).get<std::string>());
      t.adversarial = utf8::decode(need(p, "adversarial", where).get<std::string>());
      for (const json& e : need(p, "edits", where)) {
        Edit edit;
        edit.position = need(e, "position", where).get<std::size_t>();
        edit.old_char = one_char(need(e, "old", where), where);
        edit.new_char = one_char(need(e, "new", where), where);
        edit.strategy = parse_strategy(need(e, "strategy", where).get<std::string>(), where);
        t.edits.push_back(edit);
      }
      o.text = std::move(t);
    } else {
      bad_record(where, "unknown perturbation kind '" + kind + "'");
    }
  } catch (const json::exception& e) {
    bad_record(where, e.what());
  } catch (const ConfigError& e) {
    bad_record(where, e.what());
  }
  return o;
}

void write_outcomes(std::ostream& out, const std::vector<UtteranceOutcome>& outcomes) {
  for (const auto& o : outcomes) out << outcome_to_json(o).dump() << '\n';
}

void write_timings(std::ostream& out, const std::vector<UtteranceOutcome>& outcomes) {
  for (const auto& o : outcomes) {
    json j{{"id", o.utterance_id}, {"method", o.method}, {"wall_time_ms", o.wall_time_ms}};
    out << j.dump() << '\n';
  }
}

std::vector<UtteranceOutcome> read_outcomes(std::istream& in, const std::string& source_name) {
  std::vector<UtteranceOutcome> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw SchemaError(source_name + ":" + std::to_string(line_no) + ": " + e.what());
    }
    try {
      out.push_back(outcome_from_json(j));
    } catch (const SchemaError& e) {
      throw SchemaError(source_name + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

void merge_timings(std::vector<UtteranceOutcome>& outcomes, std::istream& in,
                   const std::string& source_name) {
  std::map<std::pair<std::string, std::string>, double> times;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const json j = json::parse(line);
      times[{j.at("id").get<std::string>(), j.at("method").get<std::string>()}] =
          j.at("wall_time_ms").get<double>();
    } catch (const json::exception& e) {
      throw SchemaError(source_name + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  for (auto& o : outcomes) {
    auto it = times.find({o.utterance_id, o.method});
    if (it != times.end()) o.wall_time_ms = it->second;
  }
}

void write_aggregates_csv(std::ostream& out, const std::vector<CampaignAggregate>& aggregates) {
  out << kAggregateHeader << '\n';
  for (const auto& a : aggregates) {
    out << a.method << ',' << format_number(a.mean_absolute) << ',' << a.max_absolute << ','
        << format_number(a.mean_incre) << ',' << format_number(a.max_incre) << ','
        << (a.asr ? format_number(*a.asr) : std::string()) << ','
        << format_number(a.mean_time_ms) << ',' << format_number(a.mean_macs) << '\n';
  }
}

void write_kde_csv(std::ostream& out, const std::vector<NamedCurve>& curves) {
  out << "method,x,density\n";
  for (const auto& c : curves) {
    for (std::size_t i = 0; i < c.curve.grid.size(); ++i) {
      out << c.method << ',' << format_number(c.curve.grid[i]) << ','
          << format_number(c.curve.density[i]) << '\n';
    }
  }
}

std::vector<NamedCurve> kde_by_method(const std::vector<UtteranceOutcome>& outcomes,
                                      KdeQuantity quantity) {
  std::map<std::size_t, std::vector<double>> values;
  for (const auto& o : outcomes) values[method_rank(o.method)].push_back(quantity_of(o, quantity));
  std::vector<NamedCurve> curves;
  for (const auto& [rank, v] : values) curves.push_back({kMethodLabels[rank], default_kde(v)});
  return curves;
}

void emit(const std::filesystem::path& dir, const std::vector<UtteranceOutcome>& outcomes,
          const std::vector<CampaignAggregate>& aggregates, const json& manifest) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());

  auto write = [&](const char* name, auto&& body) {
    const auto path = dir / name;
    auto out = open_out(path);
    body(out);
    close_checked(out, path);
  };
  write("outcomes.jsonl", [&](std::ostream& o) { write_outcomes(o, outcomes); });
  write("timings.jsonl", [&](std::ostream& o) { write_timings(o, outcomes); });
  write("aggregates.csv", [&](std::ostream& o) { write_aggregates_csv(o, aggregates); });
  write("kde.csv", [&](std::ostream& o) {
    write_kde_csv(o, kde_by_method(outcomes, KdeQuantity::frames));
  });
  write("kde_time_ms.csv", [&](std::ostream& o) {
    write_kde_csv(o, kde_by_method(outcomes, KdeQuantity::time_ms));
  });
  write("kde_macs.csv", [&](std::ostream& o) {
    write_kde_csv(o, kde_by_method(outcomes, KdeQuantity::macs));
  });
  write("manifest.json", [&](std::ostream& o) { o << manifest.dump(2) << '\n'; });
}

LoadedRun load_run(const std::filesystem::path& path) {
  LoadedRun run;
  const bool is_dir = std::filesystem::is_directory(path);
  const auto dir = is_dir ? path : path.parent_path();
  const auto outcomes_path = is_dir ? dir / "outcomes.jsonl" : path;
  run.source = outcomes_path;

  std::ifstream in(outcomes_path, std::ios::binary);
  if (!in) throw IoError("cannot open outcome file " + outcomes_path.string());
  run.outcomes = read_outcomes(in, outcomes_path.string());

  const auto timings_path = dir / "timings.jsonl";
  if (std::ifstream tin(timings_path, std::ios::binary); tin) {
    merge_timings(run.outcomes, tin, timings_path.string());
  }
  const auto manifest_path = dir / "manifest.json";
  std::ifstream min(manifest_path, std::ios::binary);
  if (!min) throw IoError("cannot open run manifest " + manifest_path.string());
  try {
    run.manifest = json::parse(min);
  } catch (const json::parse_error& e) {
    throw SchemaError(manifest_path.string() + ": " + e.what());
  }
  return run;
}

std::string format_table(const std::vector<CampaignAggregate>& aggregates) {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof line, "%-14s %6s %14s %12s %10s %10s %8s %12s %14s\n", "method", "n",
                "mean_absolute", "max_absolute", "mean_incre", "max_incre", "asr",
                "mean_time_ms", "mean_macs");
  out << line;
  for (const auto& a : aggregates) {
    char asr_text[32] = "-";
    if (a.asr) std::snprintf(asr_text, sizeof asr_text, "%.1f", *a.asr);
    std::snprintf(line, sizeof line,
                  "%-14s %6zu %14.1f %12lld %10.2f %10.2f %8s %12.3f %14.0f\n", a.method.c_str(),
                  a.count, a.mean_absolute, static_cast<long long>(a.max_absolute), a.mean_incre,
                  a.max_incre, asr_text, a.mean_time_ms, a.mean_macs);
    out << line;
  }
  return out.str();
}

}  // namespace sponge

#include "sponge/victims/weights_io.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "sponge/error.hpp"
#include "sponge/random.hpp"
#include "sponge/text/utf8.hpp"

namespace sponge {
namespace {

using nlohmann::json;

json array_entry(std::string name, const Tensor& t) {
  return {{"name", std::move(name)},
          {"shape", t.shape()},
          {"data", std::vector<double>(t.data().begin(), t.data().end())}};
}

json dims_json(const VictimDims& d) {
  return {{"d_text", d.d_text},
          {"d_spk", d.d_spk},
          {"d_hidden", d.d_hidden},
          {"frames_per_unit", d.frames_per_unit},
          {"max_steps", d.max_steps}};
}

class Reader {
 public:
  explicit Reader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(const std::string& field, const std::string& what) const {
    throw SchemaError(source_ + ": field '" + field + "' " + what);
  }

  const json& field(const json& obj, const std::string& name, const std::string& path) const {
    if (!obj.is_object()) fail(path, "is not an object");
    auto it = obj.find(name);
    if (it == obj.end()) fail(path.empty() ? name : path + "." + name, "is missing");
    return *it;
  }

  template <class T>
  T get(const json& obj, const std::string& name, const std::string& path = "") const {
    const json& v = field(obj, name, path);
    const std::string full = path.empty() ? name : path + "." + name;
    try {
      if constexpr (std::is_unsigned_v<T>) {
        if (!v.is_number_unsigned()) fail(full, "must be a nonnegative integer");
      } else if constexpr (std::is_integral_v<T>) {
        if (!v.is_number_integer()) fail(full, "must be an integer");
      } else if constexpr (std::is_floating_point_v<T>) {
        if (!v.is_number()) fail(full, "must be a number");
      } else {
        if (!v.is_string()) fail(full, "must be a string");
      }
      return v.get<T>();
    } catch (const json::exception& e) {
      fail(full, e.what());
    }
  }

 private:
  std::string source_;
};

VictimDims read_dims(const Reader& r, const json& doc) {
  const json& d = r.field(doc, "dims", "");
  VictimDims dims;
  dims.d_text = r.get<std::size_t>(d, "d_text", "dims");
  dims.d_spk = r.get<std::size_t>(d, "d_spk", "dims");
  dims.d_hidden = r.get<std::size_t>(d, "d_hidden", "dims");
  dims.frames_per_unit = r.get<std::size_t>(d, "frames_per_unit", "dims");
  dims.max_steps = r.get<std::size_t>(d, "max_steps", "dims");
  return dims;
}

std::map<std::string, Tensor> read_arrays(const Reader& r, const json& doc) {
  const json& arrays = r.field(doc, "arrays", "");
  if (!arrays.is_array()) r.fail("arrays", "must be a list");
  std::map<std::string, Tensor> out;
  for (std::size_t i = 0; i < arrays.size(); ++i) {
    const std::string path = "arrays[" + std::to_string(i) + "]";
    const auto name = r.get<std::string>(arrays[i], "name", path);
    const json& shape_j = r.field(arrays[i], "shape", path);
    const json& data_j = r.field(arrays[i], "data", path);
    if (!shape_j.is_array() || !data_j.is_array()) r.fail(name, "needs list-valued shape and data");
    Shape shape;
    for (const auto& s : shape_j) {
      if (!s.is_number_unsigned()) r.fail(name + ".shape", "must hold nonnegative integers");
      shape.push_back(s.get<std::size_t>());
    }
    std::vector<double> data;
    data.reserve(data_j.size());
    for (const auto& x : data_j) {
      if (!x.is_number()) r.fail(name + ".data", "must hold numbers");
      data.push_back(x.get<double>());
    }
    if (element_count(shape) != data.size()) {
      r.fail(name, "has shape " + shape_to_string(shape) + " but " + std::to_string(data.size()) +
                       " values");
    }
    try {
      if (!out.emplace(name, Tensor(std::move(shape), std::move(data))).second) {
        r.fail(name, "appears twice");
      }
    } catch (const NonFiniteError& e) {
      r.fail(name, e.what());
    }
  }
  return out;
}

Tensor take(const Reader& r, std::map<std::string, Tensor>& arrays, const std::string& name) {
  auto it = arrays.find(name);
  if (it == arrays.end()) r.fail("arrays." + name, "is missing");
  return it->second;
}

char32_t single_char(const Reader& r, const std::string& text, const std::string& field) {
  std::u32string decoded;
  try {
    decoded = utf8::decode(text);
  } catch (const SchemaError& e) {
    r.fail(field, e.what());
  }
  if (decoded.size() != 1) r.fail(field, "must be exactly one character");
  return decoded[0];
}

EmbeddingTable read_embedding(const Reader& r, const json& doc,
                              std::map<std::string, Tensor>& arrays) {
  const json& vocab = r.field(doc, "vocabulary", "");
  if (!vocab.is_array()) r.fail("vocabulary", "must be a list");
  std::vector<VocabEntry> entries;
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    const std::string path = "vocabulary[" + std::to_string(i) + "]";
    VocabEntry e;
    e.character = single_char(r, r.get<std::string>(vocab[i], "char", path), path + ".char");
    const json& clone = r.field(vocab[i], "clone_of", path);
    if (!clone.is_null()) {
      if (!clone.is_string()) r.fail(path + ".clone_of", "must be a string or null");
      e.clone_of = single_char(r, clone.get<std::string>(), path + ".clone_of");
    }
    entries.push_back(e);
  }
  try {
    return EmbeddingTable(std::move(entries), take(r, arrays, "embedding"));
  } catch (const ShapeError& e) {
    r.fail("arrays.embedding", e.what());
  } catch (const SchemaError& e) {
    r.fail("vocabulary", e.what());
  }
}

}  // namespace

std::string serialize_victim(const Victim& victim) {
  json doc;
  doc["format_version"] = kWeightFormatVersion;
  doc["kind"] = std::string(kind_label(victim.kind()));
  doc["seed"] = victim.seed();
  doc["dims"] = dims_json(victim.dims());
  doc["calibration"] = nullptr;

  json vocab = json::array();
  for (const auto& e : victim.embedding().entries()) {
    vocab.push_back({{"char", utf8::encode(e.character)},
                     {"clone_of", e.clone_of ? json(utf8::encode(*e.clone_of)) : json(nullptr)}});
  }
  doc["vocabulary"] = std::move(vocab);

  json arrays = json::array();
  arrays.push_back(array_entry("embedding", victim.embedding().matrix()));
  if (const auto* ar = dynamic_cast<const ArVictim*>(&victim)) {
    const auto& w = ar->weights();
    if (ar->calibration()) {
      doc["calibration"] = {{"b_stop", ar->calibration()->stop_bias},
                            {"median_step", ar->calibration()->median_step},
                            {"iterations", ar->calibration()->iterations}};
    }
    arrays.push_back(array_entry("encoder_w", w.encoder_w));
    arrays.push_back(array_entry("encoder_b", w.encoder_b));
    arrays.push_back(array_entry("init_w", w.init_w));
    arrays.push_back(array_entry("recurrent_w", w.recurrent_w));
    arrays.push_back(array_entry("context_w", w.context_w));
    arrays.push_back(array_entry("speaker_w", w.speaker_w));
    arrays.push_back(array_entry("stop_w", w.stop_w));
    arrays.push_back(array_entry("stop_b", w.stop_b));
  } else {
    const auto& w = dynamic_cast<const NarVictim&>(victim).weights();
    arrays.push_back(array_entry("hidden_w", w.hidden_w));
    arrays.push_back(array_entry("hidden_b", w.hidden_b));
    arrays.push_back(array_entry("out_w", w.out_w));
    arrays.push_back(array_entry("out_b", w.out_b));
  }
  doc["arrays"] = std::move(arrays);
  return doc.dump() + "\n";
}

void save_victim(const Victim& victim, const std::filesystem::path& path) {
  const std::string text = serialize_victim(victim);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  out.close();
  if (!out) throw IoError("failed writing " + path.string());
}

std::unique_ptr<Victim> parse_victim(std::string_view text, const std::string& source_name) {
  const Reader r(source_name);
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError(source_name + ": not a valid weight file (" + e.what() + ")");
  }
  if (!doc.is_object()) throw SchemaError(source_name + ": weight file must be a JSON object");
  const int version = r.get<int>(doc, "format_version");
  if (version != kWeightFormatVersion) {
    r.fail("format_version", "is " + std::to_string(version) + ", only " +
                                 std::to_string(kWeightFormatVersion) + " is supported");
  }
  const auto kind_text = r.get<std::string>(doc, "kind");
  if (kind_text != "ar" && kind_text != "nar") r.fail("kind", "must be \"ar\" or \"nar\"");
  const VictimKind kind = parse_kind(kind_text);
  const auto seed = r.get<std::uint64_t>(doc, "seed");
  const VictimDims dims = read_dims(r, doc);
  try {
    dims.validate(kind);
  } catch (const ConfigError& e) {
    r.fail("dims", e.what());
  }
  auto arrays = read_arrays(r, doc);
  EmbeddingTable table = read_embedding(r, doc, arrays);

  try {
    if (kind == VictimKind::autoregressive) {
      ArWeights w;
      w.encoder_w = take(r, arrays, "encoder_w");
      w.encoder_b = take(r, arrays, "encoder_b");
      w.init_w = take(r, arrays, "init_w");
      w.recurrent_w = take(r, arrays, "recurrent_w");
      w.context_w = take(r, arrays, "context_w");
      w.speaker_w = take(r, arrays, "speaker_w");
      w.stop_w = take(r, arrays, "stop_w");
      w.stop_b = take(r, arrays, "stop_b");
      std::optional<StopCalibration> calibration;
      const json& cal = r.field(doc, "calibration", "");
      if (!cal.is_null()) {
        StopCalibration c;
        c.stop_bias = r.get<double>(cal, "b_stop", "calibration");
        c.median_step = r.get<std::int64_t>(cal, "median_step", "calibration");
        c.iterations = r.get<int>(cal, "iterations", "calibration");
        if (c.stop_bias != w.stop_b[0]) {
          r.fail("calibration.b_stop", "disagrees with arrays.stop_b");
        }
        calibration = c;
      }
      return std::make_unique<ArVictim>(dims, seed, std::move(table), std::move(w), calibration);
    }
    NarWeights w;
    w.hidden_w = take(r, arrays, "hidden_w");
    w.hidden_b = take(r, arrays, "hidden_b");
    w.out_w = take(r, arrays, "out_w");
    w.out_b = take(r, arrays, "out_b");
    return std::make_unique<NarVictim>(dims, seed, std::move(table), std::move(w));
  } catch (const ShapeError& e) {
    throw SchemaError(source_name + ": " + e.what());
  }
}

std::unique_ptr<Victim> load_victim(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open weight file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_victim(buf.str(), path.string());
}

ArVictim load_ar_victim(const std::filesystem::path& path) {
  auto v = load_victim(path);
  if (auto* ar = dynamic_cast<ArVictim*>(v.get())) return std::move(*ar);
  throw SchemaError(path.string() + ": kind mismatch, file holds a " +
                    std::string(kind_label(v->kind())) + " victim, expected ar");
}

NarVictim load_nar_victim(const std::filesystem::path& path) {
  auto v = load_victim(path);
  if (auto* nar = dynamic_cast<NarVictim*>(v.get())) return std::move(*nar);
  throw SchemaError(path.string() + ": kind mismatch, file holds a " +
                    std::string(kind_label(v->kind())) + " victim, expected nar");
}

std::string victim_fingerprint(const Victim& victim) {
  const std::uint64_t h = fnv1a64(serialize_victim(victim));
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace sponge

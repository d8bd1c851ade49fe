#include "sponge/text/corpus.hpp"

#include <fstream>
#include <set>

#include <json.hpp>

#include "sponge/error.hpp"
#include "sponge/text/utf8.hpp"

namespace sponge {
namespace {

Utterance parse_record(const std::string& line, const std::string& where) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(where + ": " + e.what());
  }
  if (!doc.is_object() || !doc.contains("text") || !doc["text"].is_string()) {
    throw SchemaError(where + ": record needs a string field \"text\"");
  }
  Utterance u;
  if (!doc.contains("id")) throw SchemaError(where + ": record needs an \"id\"");
  const auto& id = doc["id"];
  if (id.is_string()) {
    u.id = id.get<std::string>();
  } else if (id.is_number_integer()) {
    u.id = std::to_string(id.get<long long>());
  } else {
    throw SchemaError(where + ": \"id\" must be a string or an integer");
  }
  u.chars = utf8::decode(doc["text"].get<std::string>());
  if (doc.contains("speaker_ref") && !doc["speaker_ref"].is_null()) {
    if (!doc["speaker_ref"].is_string()) {
      throw SchemaError(where + ": \"speaker_ref\" must be a string");
    }
    u.speaker_ref = doc["speaker_ref"].get<std::string>();
  }
  return u;
}

}  // namespace

std::vector<Utterance> parse_corpus(std::istream& in, const std::string& source_name) {
  std::vector<Utterance> out;
  std::set<std::string> ids;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    const std::string where = source_name + ":" + std::to_string(line_number);
    Utterance u;
    try {
      if (line[first] == '{') {
        u = parse_record(line, where);
      } else {
        u.id = std::to_string(line_number);
        u.chars = utf8::decode(line);
      }
    } catch (const SchemaError& e) {
      const std::string msg = e.what();
      throw SchemaError(msg.rfind(where, 0) == 0 ? msg : where + ": " + msg);
    }
    if (u.chars.empty()) throw SchemaError(where + ": empty utterance text");
    if (!ids.insert(u.id).second) throw SchemaError(where + ": duplicate utterance id " + u.id);
    out.push_back(std::move(u));
  }
  return out;
}

std::vector<Utterance> load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open corpus " + path.string());
  return parse_corpus(in, path.string());
}

}  // namespace sponge

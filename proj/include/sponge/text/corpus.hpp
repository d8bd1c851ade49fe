#pragma once

#include <filesystem>
#include <istream>
#include <string>
#include <vector>

#include "sponge/text/candidate.hpp"

namespace sponge {

// One utterance per line. A line starting with '{' is a record
// {"id": ..., "text": ..., "speaker_ref": ...}; any other line is plain text
// whose id is its 1-based line number. Blank lines are ignored but still
// counted for numbering.
std::vector<Utterance> parse_corpus(std::istream& in, const std::string& source_name);
std::vector<Utterance> load_corpus(const std::filesystem::path& path);

}  // namespace sponge

#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <string_view>

#include "sponge/victims/ar_victim.hpp"
#include "sponge/victims/nar_victim.hpp"

namespace sponge {

inline constexpr int kWeightFormatVersion = 1;

// JSON weight file:
//   {format_version, kind, seed, dims, calibration: {b_stop, median_step} | null,
//    vocabulary: [{char, clone_of}], arrays: [{name, shape, data}]}
// Doubles are written in shortest round-trip form, so save/load is bit-exact.
std::string serialize_victim(const Victim& victim);
void save_victim(const Victim& victim, const std::filesystem::path& path);

// Throw SchemaError naming the offending field; nothing is returned on failure.
std::unique_ptr<Victim> parse_victim(std::string_view text, const std::string& source_name);
std::unique_ptr<Victim> load_victim(const std::filesystem::path& path);
ArVictim load_ar_victim(const std::filesystem::path& path);
NarVictim load_nar_victim(const std::filesystem::path& path);

// FNV-1a of the serialized form, as 16 hex digits.
std::string victim_fingerprint(const Victim& victim);

}  // namespace sponge

#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "sponge/text/candidate.hpp"
#include "sponge/text/homoglyph.hpp"
#include "sponge/victims/ar_victim.hpp"
#include "sponge/victims/nar_victim.hpp"

namespace sponge {

// Printable ASCII (U+0020..U+007E) plus one cloned row for every homoglyph
// replacement outside that range. A clone copies its source letter's row and
// adds 0.01-scaled seeded noise.
EmbeddingTable build_embedding(std::uint64_t seed, std::size_t d_text,
                               const HomoglyphTable& homoglyphs);

// Seeded AR surrogate with its stop head oriented so the stop logit rises over
// time. The stop bias is left at 0; see calibrate_stop_bias.
ArVictim generate_ar_victim(const VictimDims& dims, std::uint64_t seed,
                            const HomoglyphTable& homoglyphs);

NarVictim generate_nar_victim(const VictimDims& dims, std::uint64_t seed,
                              const HomoglyphTable& homoglyphs);

// Speaker for an utterance: keyed by speaker_ref when present, by id otherwise.
std::vector<double> utterance_speaker(std::uint64_t seed, const Utterance& utterance,
                                      std::size_t dim);

// Probes from every corpus utterance the victim can encode.
std::vector<CalibrationProbe> make_probes(const Victim& victim,
                                          const std::vector<Utterance>& corpus,
                                          std::uint64_t seed);

}  // namespace sponge

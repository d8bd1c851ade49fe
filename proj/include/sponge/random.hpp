#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace sponge {

// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t basis = 0xcbf29ce484222325ULL);

// Derives an independent stream seed from a parent seed and a label such as an
// utterance id. Stable across platforms and thread schedules.
std::uint64_t derive_seed(std::uint64_t parent, std::string_view label);

// Seeded generator with platform-stable draws: the engine is std::mt19937_64
// and the transforms below are spelled out rather than taken from
// <random> distributions, whose algorithms are implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  // Standard normal via Box-Muller.
  double gaussian();
  // Uniform integer in [0, n); n must be positive.
  std::size_t index(std::size_t n);
  std::vector<double> gaussian_vector(std::size_t n);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace sponge

#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sponge/autodiff/graph.hpp"
#include "sponge/victims/embedding.hpp"

namespace sponge {

enum class VictimKind { autoregressive, non_autoregressive };

// "ar" / "nar"
std::string_view kind_label(VictimKind kind);
VictimKind parse_kind(std::string_view label);

struct VictimDims {
  std::size_t d_text = 16;
  std::size_t d_spk = 32;
  std::size_t d_hidden = 32;
  // Frames emitted per decoder step (AR) or per duration unit (NAR).
  std::size_t frames_per_unit = 256;
  // Decoder step cap; AR only.
  std::size_t max_steps = 2000;

  // Throws ConfigError naming the first bad field.
  void validate(VictimKind kind) const;
  friend bool operator==(const VictimDims&, const VictimDims&) = default;
};

struct VictimOutput {
  // len_f: output length in frames.
  std::int64_t frames = 0;
  // AR: stop step. NAR: sum of ceil(duration).
  std::int64_t units = 0;
  // AR: stop probability per generated step. NAR: duration per token.
  std::vector<double> trace;
  double loss = 0.0;
  std::uint64_t mac_count = 0;
};

// A forward pass recorded on a tape. The first gradient request runs the
// single backward pass; later requests reuse it.
class ForwardPass {
 public:
  ForwardPass(Graph graph, NodeId loss, NodeId speaker, std::vector<NodeId> tokens,
              VictimOutput output);

  const VictimOutput& output() const { return output_; }
  // d loss / d speaker embedding.
  std::vector<double> speaker_gradient();
  // d loss / d E(t_i), one vector per input position (duplicates kept apart).
  std::vector<std::vector<double>> text_gradients();

 private:
  void ensure_backward();

  Graph graph_;
  NodeId loss_;
  NodeId speaker_;
  std::vector<NodeId> tokens_;
  VictimOutput output_;
};

// Common interface of the surrogate text-to-speech victims. Immutable once
// built, so one instance can serve many threads.
class Victim {
 public:
  Victim(VictimDims dims, std::uint64_t seed, EmbeddingTable embedding);
  virtual ~Victim() = default;

  virtual VictimKind kind() const = 0;

  const VictimDims& dims() const { return dims_; }
  std::uint64_t seed() const { return seed_; }
  const EmbeddingTable& embedding() const { return embedding_; }

  // `target` is the stop-token target y (AR only; NAR ignores it).
  VictimOutput evaluate(std::span<const TokenId> text, std::span<const double> speaker,
                        double target = 0.0) const;
  ForwardPass forward(std::span<const TokenId> text, std::span<const double> speaker,
                      double target = 0.0) const;

  // Same passes fed with explicit per-position embedding vectors.
  virtual VictimOutput evaluate_embedded(const std::vector<std::vector<double>>& tokens,
                                         std::span<const double> speaker,
                                         double target) const = 0;
  virtual ForwardPass forward_embedded(const std::vector<std::vector<double>>& tokens,
                                       std::span<const double> speaker,
                                       double target) const = 0;

  // Closed-form multiply-accumulate count for `tokens` inputs and `units`
  // decoder steps (AR; NAR ignores it).
  virtual std::uint64_t mac_count(std::size_t tokens, std::size_t units) const = 0;

  std::vector<std::vector<double>> lookup(std::span<const TokenId> text) const;

 protected:
  void check_inputs(std::size_t tokens, std::span<const double> speaker) const;

 private:
  VictimDims dims_;
  std::uint64_t seed_;
  EmbeddingTable embedding_;
};

// Seeded unit-norm stand-in for a speaker x-vector.
std::vector<double> make_speaker(std::uint64_t seed, std::string_view label, std::size_t dim);

}  // namespace sponge

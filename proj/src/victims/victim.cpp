#include "sponge/victims/victim.hpp"

#include <cmath>

#include "sponge/error.hpp"
#include "sponge/random.hpp"
#include "sponge/simd/kernels.hpp"

namespace sponge {

std::string_view kind_label(VictimKind kind) {
  return kind == VictimKind::autoregressive ? "ar" : "nar";
}

VictimKind parse_kind(std::string_view label) {
  if (label == "ar") return VictimKind::autoregressive;
  if (label == "nar") return VictimKind::non_autoregressive;
  throw ConfigError("unknown victim kind '" + std::string(label) + "' (expected ar or nar)");
}

void VictimDims::validate(VictimKind kind) const {
  if (d_text < 2) throw ConfigError("d_text must be at least 2");
  if (d_spk == 0) throw ConfigError("d_spk must be positive");
  if (d_hidden == 0) throw ConfigError("d_hidden must be positive");
  if (frames_per_unit == 0) throw ConfigError("frames_per_unit must be positive");
  if (kind == VictimKind::autoregressive && max_steps == 0) {
    throw ConfigError("max_steps must be at least 1");
  }
}

ForwardPass::ForwardPass(Graph graph, NodeId loss, NodeId speaker, std::vector<NodeId> tokens,
                         VictimOutput output)
    : graph_(std::move(graph)),
      loss_(loss),
      speaker_(speaker),
      tokens_(std::move(tokens)),
      output_(std::move(output)) {}

void ForwardPass::ensure_backward() {
  if (!graph_.has_gradients()) graph_.backward(loss_);
}

std::vector<double> ForwardPass::speaker_gradient() {
  ensure_backward();
  const auto g = graph_.gradient(speaker_);
  return {g.begin(), g.end()};
}

std::vector<std::vector<double>> ForwardPass::text_gradients() {
  ensure_backward();
  std::vector<std::vector<double>> out;
  out.reserve(tokens_.size());
  for (NodeId id : tokens_) {
    const auto g = graph_.gradient(id);
    out.emplace_back(g.begin(), g.end());
  }
  return out;
}

Victim::Victim(VictimDims dims, std::uint64_t seed, EmbeddingTable embedding)
    : dims_(dims), seed_(seed), embedding_(std::move(embedding)) {
  if (embedding_.dim() != dims_.d_text) {
    throw ShapeError("embedding width " + std::to_string(embedding_.dim()) +
                     " does not match d_text " + std::to_string(dims_.d_text));
  }
}

std::vector<std::vector<double>> Victim::lookup(std::span<const TokenId> text) const {
  std::vector<std::vector<double>> rows;
  rows.reserve(text.size());
  for (TokenId id : text) {
    const auto r = embedding_.row(id);
    rows.emplace_back(r.begin(), r.end());
  }
  return rows;
}

VictimOutput Victim::evaluate(std::span<const TokenId> text, std::span<const double> speaker,
                              double target) const {
  return evaluate_embedded(lookup(text), speaker, target);
}

ForwardPass Victim::forward(std::span<const TokenId> text, std::span<const double> speaker,
                            double target) const {
  return forward_embedded(lookup(text), speaker, target);
}

void Victim::check_inputs(std::size_t tokens, std::span<const double> speaker) const {
  if (tokens == 0) throw ShapeError("victim input text is empty");
  if (speaker.size() != dims_.d_spk) {
    throw ShapeError("speaker embedding has " + std::to_string(speaker.size()) +
                     " values, victim expects " + std::to_string(dims_.d_spk));
  }
}

std::vector<double> make_speaker(std::uint64_t seed, std::string_view label, std::size_t dim) {
  Rng rng(derive_seed(seed, "speaker:" + std::string(label)));
  std::vector<double> v = rng.gaussian_vector(dim);
  const double norm = std::sqrt(simd::sum_squares(v));
  simd::scale_in_place(v, 1.0 / norm);
  return v;
}

}  // namespace sponge

#pragma once

#include "sponge/victims/victim.hpp"

namespace sponge {

// Non-autoregressive surrogate: one duration per input token,
//   d_i = softplus(w_2 . tanh(W_1 [E(t_i); s] + b_1) + b_2)
// frames = frames_per_unit * sum_i ceil(d_i), and the attack loss is -sum_i d_i.
struct NarWeights {
  Tensor hidden_w;  // d_hidden x (d_text + d_spk)
  Tensor hidden_b;  // d_hidden
  Tensor out_w;     // 1 x d_hidden
  Tensor out_b;     // 1
};

class NarVictim final : public Victim {
 public:
  NarVictim(VictimDims dims, std::uint64_t seed, EmbeddingTable embedding, NarWeights weights);

  VictimKind kind() const override { return VictimKind::non_autoregressive; }

  VictimOutput evaluate_embedded(const std::vector<std::vector<double>>& tokens,
                                 std::span<const double> speaker, double target) const override;
  ForwardPass forward_embedded(const std::vector<std::vector<double>>& tokens,
                               std::span<const double> speaker, double target) const override;
  std::uint64_t mac_count(std::size_t tokens, std::size_t units) const override;

  const NarWeights& weights() const { return weights_; }

 private:
  NarWeights weights_;
};

}  // namespace sponge

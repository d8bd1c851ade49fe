#pragma once

#include <optional>

#include "sponge/victims/victim.hpp"

namespace sponge {

// Autoregressive surrogate:
//   u_i = tanh(W_e E(t_i) + b_e),  c = mean_i u_i
//   h_0 = tanh(W_0 [c; s])
//   h_t = tanh(W_h h_{t-1} + W_c c + W_s s)
//   p_t = sigmoid(w_stop . h_t + b_stop)
// Decoding stops at the first t with p_t > 0.5, or at max_steps. The attack
// loss is the sum of BCE(p_t, y) over the generated steps.
struct ArWeights {
  Tensor encoder_w;    // d_hidden x d_text
  Tensor encoder_b;    // d_hidden
  Tensor init_w;       // d_hidden x (d_hidden + d_spk)
  Tensor recurrent_w;  // d_hidden x d_hidden
  Tensor context_w;    // d_hidden x d_hidden
  Tensor speaker_w;    // d_hidden x d_spk
  Tensor stop_w;       // 1 x d_hidden
  Tensor stop_b;       // 1
};

struct StopCalibration {
  double stop_bias = 0.0;
  std::int64_t median_step = 0;
  int iterations = 0;
};

inline constexpr double kStopThreshold = 0.5;

class ArVictim final : public Victim {
 public:
  ArVictim(VictimDims dims, std::uint64_t seed, EmbeddingTable embedding, ArWeights weights,
           std::optional<StopCalibration> calibration = std::nullopt);

  VictimKind kind() const override { return VictimKind::autoregressive; }

  VictimOutput evaluate_embedded(const std::vector<std::vector<double>>& tokens,
                                 std::span<const double> speaker, double target) const override;
  ForwardPass forward_embedded(const std::vector<std::vector<double>>& tokens,
                               std::span<const double> speaker, double target) const override;
  std::uint64_t mac_count(std::size_t tokens, std::size_t steps) const override;

  const ArWeights& weights() const { return weights_; }
  double stop_bias() const { return weights_.stop_b[0]; }
  const std::optional<StopCalibration>& calibration() const { return calibration_; }

  ArVictim with_stop_bias(double bias) const;
  ArVictim with_max_steps(std::size_t max_steps) const;
  ArVictim with_calibration(StopCalibration calibration) const;

 private:
  void validate_shapes() const;

  ArWeights weights_;
  std::optional<StopCalibration> calibration_;
};

struct CalibrationProbe {
  std::vector<TokenId> text;
  std::vector<double> speaker;
};

struct CalibrationBand {
  std::int64_t low = 20;
  std::int64_t high = 200;
};

// Lower median of the clean stop steps over the probe set.
std::int64_t median_stop_step(const ArVictim& victim, const std::vector<CalibrationProbe>& probes);

// Bisection on b_stop until the median clean stop step lies in `band`.
// Throws CalibrationError after 60 bisection steps without success.
StopCalibration calibrate_stop_bias(const ArVictim& victim,
                                    const std::vector<CalibrationProbe>& probes,
                                    CalibrationBand band = {});

}  // namespace sponge

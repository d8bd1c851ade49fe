#include "sponge/victims/ar_victim.hpp"

#include <algorithm>

#include "model_ops.hpp"
#include "sponge/error.hpp"

namespace sponge {
namespace {

template <class Ops>
struct ArRun {
  typename Ops::Value loss;
  std::vector<typename Ops::Value> token_inputs;
  typename Ops::Value speaker_input;
  std::vector<double> stop_probabilities;
  std::int64_t stop_step = 0;
};

template <class Ops>
ArRun<Ops> run_decoder(Ops& ops, const ArWeights& w, std::size_t max_steps,
                       const std::vector<std::vector<double>>& tokens,
                       std::span<const double> speaker, double target) {
  ArRun<Ops> run;
  run.speaker_input = ops.input(speaker);
  run.token_inputs.reserve(tokens.size());
  for (const auto& t : tokens) run.token_inputs.push_back(ops.input(t));

  const auto encoder_w = ops.weight(w.encoder_w);
  const auto encoder_b = ops.constant(w.encoder_b);
  typename Ops::Value pooled{};
  for (std::size_t i = 0; i < run.token_inputs.size(); ++i) {
    auto u = ops.tanh(ops.add(ops.matvec(encoder_w, run.token_inputs[i]), encoder_b));
    pooled = i == 0 ? u : ops.add(pooled, u);
  }
  const auto context = ops.scale(pooled, 1.0 / static_cast<double>(tokens.size()));

  auto hidden = ops.tanh(ops.matvec(ops.weight(w.init_w), ops.concat(context, run.speaker_input)));
  const auto drive = ops.add(ops.matvec(ops.weight(w.context_w), context),
                             ops.matvec(ops.weight(w.speaker_w), run.speaker_input));
  const auto recurrent_w = ops.weight(w.recurrent_w);
  const auto stop_w = ops.weight(w.stop_w);
  const auto stop_b = ops.constant(w.stop_b);

  run.stop_step = static_cast<std::int64_t>(max_steps);
  for (std::size_t t = 1; t <= max_steps; ++t) {
    hidden = ops.tanh(ops.add(ops.matvec(recurrent_w, hidden), drive));
    const auto p = ops.sigmoid(ops.add(ops.matvec(stop_w, hidden), stop_b));
    const auto step_loss = ops.bce(p, target);
    run.loss = t == 1 ? step_loss : ops.add(run.loss, step_loss);
    const double prob = ops.item(p);
    run.stop_probabilities.push_back(prob);
    if (prob > kStopThreshold) {
      run.stop_step = static_cast<std::int64_t>(t);
      break;
    }
  }
  return run;
}

void expect_shape(const Tensor& t, const Shape& shape, const char* name) {
  if (t.shape() != shape) {
    throw ShapeError(std::string("AR weight '") + name + "' has shape " +
                     shape_to_string(t.shape()) + ", expected " + shape_to_string(shape));
  }
}

}  // namespace

ArVictim::ArVictim(VictimDims dims, std::uint64_t seed, EmbeddingTable embedding,
                   ArWeights weights, std::optional<StopCalibration> calibration)
    : Victim(dims, seed, std::move(embedding)),
      weights_(std::move(weights)),
      calibration_(calibration) {
  dims.validate(VictimKind::autoregressive);
  validate_shapes();
}

void ArVictim::validate_shapes() const {
  const auto& d = dims();
  expect_shape(weights_.encoder_w, {d.d_hidden, d.d_text}, "encoder_w");
  expect_shape(weights_.encoder_b, {d.d_hidden}, "encoder_b");
  expect_shape(weights_.init_w, {d.d_hidden, d.d_hidden + d.d_spk}, "init_w");
  expect_shape(weights_.recurrent_w, {d.d_hidden, d.d_hidden}, "recurrent_w");
  expect_shape(weights_.context_w, {d.d_hidden, d.d_hidden}, "context_w");
  expect_shape(weights_.speaker_w, {d.d_hidden, d.d_spk}, "speaker_w");
  expect_shape(weights_.stop_w, {1, d.d_hidden}, "stop_w");
  expect_shape(weights_.stop_b, {1}, "stop_b");
}

VictimOutput ArVictim::evaluate_embedded(const std::vector<std::vector<double>>& tokens,
                                         std::span<const double> speaker, double target) const {
  check_inputs(tokens.size(), speaker);
  detail::BufferOps ops;
  auto run = run_decoder(ops, weights_, dims().max_steps, tokens, speaker, target);
  VictimOutput out;
  out.units = run.stop_step;
  out.frames = run.stop_step * static_cast<std::int64_t>(dims().frames_per_unit);
  out.trace = std::move(run.stop_probabilities);
  out.loss = ops.item(run.loss);
  out.mac_count = mac_count(tokens.size(), static_cast<std::size_t>(run.stop_step));
  return out;
}

ForwardPass ArVictim::forward_embedded(const std::vector<std::vector<double>>& tokens,
                                       std::span<const double> speaker, double target) const {
  check_inputs(tokens.size(), speaker);
  Graph graph;
  detail::TapeOps ops(graph);
  auto run = run_decoder(ops, weights_, dims().max_steps, tokens, speaker, target);
  VictimOutput out;
  out.units = run.stop_step;
  out.frames = run.stop_step * static_cast<std::int64_t>(dims().frames_per_unit);
  out.trace = std::move(run.stop_probabilities);
  out.loss = ops.item(run.loss);
  out.mac_count = mac_count(tokens.size(), static_cast<std::size_t>(run.stop_step));
  return ForwardPass(std::move(graph), run.loss, run.speaker_input, std::move(run.token_inputs),
                     std::move(out));
}

std::uint64_t ArVictim::mac_count(std::size_t tokens, std::size_t steps) const {
  const auto& d = dims();
  const std::uint64_t encoder = tokens * d.d_hidden * d.d_text;
  const std::uint64_t init = d.d_hidden * (d.d_hidden + d.d_spk);
  const std::uint64_t drive = d.d_hidden * d.d_hidden + d.d_hidden * d.d_spk;
  const std::uint64_t per_step = d.d_hidden * d.d_hidden + d.d_hidden;
  return encoder + init + drive + steps * per_step;
}

ArVictim ArVictim::with_stop_bias(double bias) const {
  ArWeights w = weights_;
  w.stop_b = Tensor::vector({bias});
  return ArVictim(dims(), seed(), embedding(), std::move(w), calibration_);
}

ArVictim ArVictim::with_max_steps(std::size_t max_steps) const {
  VictimDims d = dims();
  d.max_steps = max_steps;
  return ArVictim(d, seed(), embedding(), weights_, calibration_);
}

ArVictim ArVictim::with_calibration(StopCalibration calibration) const {
  ArVictim out = with_stop_bias(calibration.stop_bias);
  out.calibration_ = calibration;
  return out;
}

std::int64_t median_stop_step(const ArVictim& victim, const std::vector<CalibrationProbe>& probes) {
  if (probes.empty()) throw CalibrationError("calibration probe corpus is empty");
  std::vector<std::int64_t> steps;
  steps.reserve(probes.size());
  for (const auto& probe : probes) steps.push_back(victim.evaluate(probe.text, probe.speaker).units);
  const auto mid = steps.begin() + static_cast<std::ptrdiff_t>((steps.size() - 1) / 2);
  std::nth_element(steps.begin(), mid, steps.end());
  return *mid;
}

StopCalibration calibrate_stop_bias(const ArVictim& victim,
                                    const std::vector<CalibrationProbe>& probes,
                                    CalibrationBand band) {
  constexpr int kMaxBisections = 60;
  constexpr double kHalfWidth = 32.0;
  double bias = victim.stop_bias();
  double lo = bias - kHalfWidth;
  double hi = bias + kHalfWidth;
  std::int64_t median = 0;
  for (int i = 0; i <= kMaxBisections; ++i) {
    median = median_stop_step(victim.with_stop_bias(bias), probes);
    if (median >= band.low && median <= band.high) return {bias, median, i};
    if (i == kMaxBisections) break;
    // A higher bias stops earlier: too-short decodes need a lower bias.
    if (median < band.low) {
      hi = bias;
    } else {
      lo = bias;
    }
    bias = 0.5 * (lo + hi);
  }
  throw CalibrationError("median clean stop step " + std::to_string(median) +
                         " still outside [" + std::to_string(band.low) + ", " +
                         std::to_string(band.high) + "] after " +
                         std::to_string(kMaxBisections) + " bisection steps");
}

}  // namespace sponge

#include "sponge/victims/nar_victim.hpp"

#include <cmath>

#include "model_ops.hpp"
#include "sponge/error.hpp"

namespace sponge {
namespace {

template <class Ops>
struct NarRun {
  typename Ops::Value loss;
  std::vector<typename Ops::Value> token_inputs;
  typename Ops::Value speaker_input;
  std::vector<double> durations;
};

template <class Ops>
NarRun<Ops> run_durations(Ops& ops, const NarWeights& w,
                          const std::vector<std::vector<double>>& tokens,
                          std::span<const double> speaker) {
  NarRun<Ops> run;
  run.speaker_input = ops.input(speaker);
  run.token_inputs.reserve(tokens.size());
  for (const auto& t : tokens) run.token_inputs.push_back(ops.input(t));

  const auto hidden_w = ops.weight(w.hidden_w);
  const auto hidden_b = ops.constant(w.hidden_b);
  const auto out_w = ops.weight(w.out_w);
  const auto out_b = ops.constant(w.out_b);
  typename Ops::Value total{};
  for (std::size_t i = 0; i < run.token_inputs.size(); ++i) {
    const auto x = ops.concat(run.token_inputs[i], run.speaker_input);
    const auto h = ops.tanh(ops.add(ops.matvec(hidden_w, x), hidden_b));
    const auto d = ops.softplus(ops.add(ops.matvec(out_w, h), out_b));
    run.durations.push_back(ops.item(d));
    total = i == 0 ? d : ops.add(total, d);
  }
  run.loss = ops.negate(ops.sum(total));
  return run;
}

VictimOutput summarize(std::vector<double> durations, double loss, const NarVictim& victim) {
  VictimOutput out;
  std::int64_t units = 0;
  for (double d : durations) units += static_cast<std::int64_t>(std::ceil(d));
  out.units = units;
  out.frames = units * static_cast<std::int64_t>(victim.dims().frames_per_unit);
  out.mac_count = victim.mac_count(durations.size(), 0);
  out.trace = std::move(durations);
  out.loss = loss;
  return out;
}

void expect_shape(const Tensor& t, const Shape& shape, const char* name) {
  if (t.shape() != shape) {
    throw ShapeError(std::string("NAR weight '") + name + "' has shape " +
                     shape_to_string(t.shape()) + ", expected " + shape_to_string(shape));
  }
}

}  // namespace

NarVictim::NarVictim(VictimDims dims, std::uint64_t seed, EmbeddingTable embedding,
                     NarWeights weights)
    : Victim(dims, seed, std::move(embedding)), weights_(std::move(weights)) {
  dims.validate(VictimKind::non_autoregressive);
  expect_shape(weights_.hidden_w, {dims.d_hidden, dims.d_text + dims.d_spk}, "hidden_w");
  expect_shape(weights_.hidden_b, {dims.d_hidden}, "hidden_b");
  expect_shape(weights_.out_w, {1, dims.d_hidden}, "out_w");
  expect_shape(weights_.out_b, {1}, "out_b");
}

VictimOutput NarVictim::evaluate_embedded(const std::vector<std::vector<double>>& tokens,
                                          std::span<const double> speaker, double) const {
  check_inputs(tokens.size(), speaker);
  detail::BufferOps ops;
  auto run = run_durations(ops, weights_, tokens, speaker);
  return summarize(std::move(run.durations), ops.item(run.loss), *this);
}

ForwardPass NarVictim::forward_embedded(const std::vector<std::vector<double>>& tokens,
                                        std::span<const double> speaker, double) const {
  check_inputs(tokens.size(), speaker);
  Graph graph;
  detail::TapeOps ops(graph);
  auto run = run_durations(ops, weights_, tokens, speaker);
  auto out = summarize(std::move(run.durations), ops.item(run.loss), *this);
  return ForwardPass(std::move(graph), run.loss, run.speaker_input, std::move(run.token_inputs),
                     std::move(out));
}

std::uint64_t NarVictim::mac_count(std::size_t tokens, std::size_t) const {
  const auto& d = dims();
  return tokens * (d.d_hidden * (d.d_text + d.d_spk) + d.d_hidden);
}

}  // namespace sponge

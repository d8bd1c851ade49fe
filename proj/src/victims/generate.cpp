#include "sponge/victims/generate.hpp"

#include <cmath>

#include "sponge/random.hpp"
#include "sponge/simd/kernels.hpp"

namespace sponge {
namespace {

constexpr char32_t kFirstPrintable = 0x20;
constexpr char32_t kLastPrintable = 0x7e;
constexpr double kCloneNoise = 0.01;

// Leaky recurrence: W_h = rho I + small noise, drive terms scaled by (1 - rho).
// With a plain 1/sqrt(fan_in) recurrence the state settles within a handful of
// steps, so clean stop steps are either 1 or max_steps and no bias lands the
// median in the calibration band.
constexpr double kLeak = 0.98;
constexpr double kRecurrentNoise = 0.05;
constexpr double kSpeakerGain = 0.05;
constexpr double kInitGain = 0.1;

// Orientation probes.
constexpr std::size_t kProbeCount = 32;
constexpr std::size_t kProbeLength = 40;
constexpr std::size_t kProbeHorizon = 200;

Tensor gaussian_matrix(Rng& rng, std::size_t rows, std::size_t cols, double scale) {
  std::vector<double> v = rng.gaussian_vector(rows * cols);
  for (double& x : v) x *= scale;
  return Tensor::matrix(rows, cols, std::move(v));
}

Tensor gaussian_vector(Rng& rng, std::size_t n, double scale) {
  std::vector<double> v = rng.gaussian_vector(n);
  for (double& x : v) x *= scale;
  return Tensor::vector(std::move(v));
}

double inv_sqrt(std::size_t n) { return 1.0 / std::sqrt(static_cast<double>(n)); }

// Mean stop logit (without bias) at h_0 and after kProbeHorizon steps.
std::pair<double, double> logit_drift(const ArWeights& w, const EmbeddingTable& table,
                                      const VictimDims& dims, std::uint64_t seed) {
  Rng rng(derive_seed(seed, "orientation"));
  const auto& base = table.base_ids();
  const std::size_t dh = dims.d_hidden;
  double start = 0.0;
  double end = 0.0;
  for (std::size_t p = 0; p < kProbeCount; ++p) {
    std::vector<double> context(dh, 0.0);
    for (std::size_t i = 0; i < kProbeLength; ++i) {
      const auto row = table.row(base[rng.index(base.size())]);
      std::vector<double> u(dh);
      simd::matvec(w.encoder_w.data(), dh, dims.d_text, row, u);
      for (std::size_t k = 0; k < dh; ++k) context[k] += std::tanh(u[k] + w.encoder_b[k]);
    }
    for (double& c : context) c /= static_cast<double>(kProbeLength);
    std::vector<double> speaker = rng.gaussian_vector(dims.d_spk);
    simd::scale_in_place(speaker, 1.0 / std::sqrt(simd::sum_squares(speaker)));

    std::vector<double> joint = context;
    joint.insert(joint.end(), speaker.begin(), speaker.end());
    std::vector<double> h(dh), drive(dh), tmp(dh);
    simd::matvec(w.init_w.data(), dh, dh + dims.d_spk, joint, h);
    for (double& x : h) x = std::tanh(x);
    simd::matvec(w.context_w.data(), dh, dh, context, drive);
    simd::matvec(w.speaker_w.data(), dh, dims.d_spk, speaker, tmp);
    for (std::size_t k = 0; k < dh; ++k) drive[k] += tmp[k];

    start += simd::dot(w.stop_w.data(), h);
    for (std::size_t t = 0; t < kProbeHorizon; ++t) {
      simd::matvec(w.recurrent_w.data(), dh, dh, h, tmp);
      for (std::size_t k = 0; k < dh; ++k) h[k] = std::tanh(tmp[k] + drive[k]);
    }
    end += simd::dot(w.stop_w.data(), h);
  }
  return {start / kProbeCount, end / kProbeCount};
}

}  // namespace

EmbeddingTable build_embedding(std::uint64_t seed, std::size_t d_text,
                               const HomoglyphTable& homoglyphs) {
  Rng rng(derive_seed(seed, "embedding"));
  std::vector<VocabEntry> entries;
  std::vector<double> rows;
  for (char32_t c = kFirstPrintable; c <= kLastPrintable; ++c) {
    entries.push_back({c, std::nullopt});
    const auto r = rng.gaussian_vector(d_text);
    rows.insert(rows.end(), r.begin(), r.end());
  }
  for (const auto& [replacement, source] : homoglyphs.replacement_sources()) {
    if (replacement >= kFirstPrintable && replacement <= kLastPrintable) continue;
    if (source < kFirstPrintable || source > kLastPrintable) continue;
    const std::size_t src = source - kFirstPrintable;
    entries.push_back({replacement, source});
    for (std::size_t k = 0; k < d_text; ++k) {
      rows.push_back(rows[src * d_text + k] + kCloneNoise * rng.gaussian());
    }
  }
  const std::size_t n = entries.size();
  return EmbeddingTable(std::move(entries), Tensor::matrix(n, d_text, std::move(rows)));
}

ArVictim generate_ar_victim(const VictimDims& dims, std::uint64_t seed,
                            const HomoglyphTable& homoglyphs) {
  dims.validate(VictimKind::autoregressive);
  EmbeddingTable table = build_embedding(seed, dims.d_text, homoglyphs);
  Rng rng(derive_seed(seed, "ar-weights"));
  const std::size_t dh = dims.d_hidden;
  const std::size_t ds = dims.d_spk;

  ArWeights w;
  w.encoder_w = gaussian_matrix(rng, dh, dims.d_text, inv_sqrt(dims.d_text));
  w.encoder_b = gaussian_vector(rng, dh, 1.0);
  w.init_w = gaussian_matrix(rng, dh, dh + ds, kInitGain * inv_sqrt(dh + ds));
  {
    std::vector<double> wh = rng.gaussian_vector(dh * dh);
    for (double& x : wh) x *= kRecurrentNoise * inv_sqrt(dh);
    for (std::size_t i = 0; i < dh; ++i) wh[i * dh + i] += kLeak;
    w.recurrent_w = Tensor::matrix(dh, dh, std::move(wh));
  }
  w.context_w = gaussian_matrix(rng, dh, dh, (1.0 - kLeak) * inv_sqrt(dh));
  w.speaker_w = gaussian_matrix(rng, dh, ds, (1.0 - kLeak) * kSpeakerGain * inv_sqrt(ds));
  w.stop_w = gaussian_matrix(rng, 1, dh, inv_sqrt(dh));
  w.stop_b = Tensor::vector({0.0});

  const auto [start, end] = logit_drift(w, table, dims, seed);
  if (end < start) {
    std::vector<double> flipped(w.stop_w.data().begin(), w.stop_w.data().end());
    for (double& x : flipped) x = -x;
    w.stop_w = Tensor::matrix(1, dh, std::move(flipped));
  }
  return ArVictim(dims, seed, std::move(table), std::move(w));
}

NarVictim generate_nar_victim(const VictimDims& dims, std::uint64_t seed,
                              const HomoglyphTable& homoglyphs) {
  dims.validate(VictimKind::non_autoregressive);
  EmbeddingTable table = build_embedding(seed, dims.d_text, homoglyphs);
  Rng rng(derive_seed(seed, "nar-weights"));
  const std::size_t fan_in = dims.d_text + dims.d_spk;
  NarWeights w;
  w.hidden_w = gaussian_matrix(rng, dims.d_hidden, fan_in, inv_sqrt(fan_in));
  w.hidden_b = gaussian_vector(rng, dims.d_hidden, inv_sqrt(fan_in));
  w.out_w = gaussian_matrix(rng, 1, dims.d_hidden, inv_sqrt(dims.d_hidden));
  w.out_b = Tensor::vector({0.0});
  return NarVictim(dims, seed, std::move(table), std::move(w));
}

std::vector<double> utterance_speaker(std::uint64_t seed, const Utterance& utterance,
                                      std::size_t dim) {
  const std::string label =
      utterance.speaker_ref ? "ref:" + *utterance.speaker_ref : "utt:" + utterance.id;
  return make_speaker(seed, label, dim);
}

std::vector<CalibrationProbe> make_probes(const Victim& victim,
                                          const std::vector<Utterance>& corpus,
                                          std::uint64_t seed) {
  std::vector<CalibrationProbe> probes;
  for (const auto& u : corpus) {
    if (!victim.embedding().unknown_characters(u.chars).empty()) continue;
    probes.push_back({victim.embedding().encode(u.chars),
                      utterance_speaker(seed, u, victim.dims().d_spk)});
  }
  return probes;
}

}  // namespace sponge

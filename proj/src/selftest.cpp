#include "sponge/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "sponge/autodiff/gradcheck.hpp"
#include "sponge/random.hpp"
#include "sponge/text/utf8.hpp"
#include "sponge/victims/generate.hpp"

namespace sponge {
namespace {

Tensor random_matrix(Rng& rng, std::size_t rows, std::size_t cols) {
  std::vector<double> v = rng.gaussian_vector(rows * cols);
  const double s = 1.0 / std::sqrt(static_cast<double>(cols));
  for (double& x : v) x *= s;
  return Tensor::matrix(rows, cols, std::move(v));
}

// Recipe for one random graph, drawn up front so every rebuild is identical.
struct Layer {
  int op = 0;
  Tensor weight;
  double factor = 1.0;
};

struct Recipe {
  std::vector<Layer> layers;
  int root = 0;
  Tensor head;
  double target = 0.0;
};

Recipe draw_recipe(Rng& rng, std::size_t input_size) {
  Recipe r;
  std::size_t width = input_size;
  for (int k = 0; k < 3; ++k) {
    Layer layer;
    layer.op = static_cast<int>(rng.index(6));
    if (layer.op == 0 || layer.op == 4) {
      const std::size_t out = 2 + rng.index(4);
      layer.weight = random_matrix(rng, out, width);
      width = out;
    } else if (layer.op == 1) {
      layer.weight = Tensor::vector(rng.gaussian_vector(width));
    } else if (layer.op == 2) {
      layer.factor = 4.0 * rng.uniform() - 2.0;
    } else if (layer.op == 3) {
      width *= 2;
    }
    r.layers.push_back(std::move(layer));
  }
  r.root = static_cast<int>(rng.index(3));
  r.head = random_matrix(rng, 1, width);
  r.target = rng.uniform() < 0.5 ? 0.0 : 1.0;
  return r;
}

NodeId build_recipe(const Recipe& r, Graph& g, NodeId x) {
  NodeId h = x;
  for (const Layer& layer : r.layers) {
    switch (layer.op) {
      case 0: h = g.tanh(g.matvec(g.constant(layer.weight), h)); break;
      case 1: h = g.sigmoid(g.add(h, g.constant(layer.weight))); break;
      case 2: h = g.scale(g.softplus(h), layer.factor); break;
      case 3: h = g.concat(h, g.tanh(h)); break;
      case 4: h = g.tanh(g.matvec(g.constant(layer.weight), g.negate(h))); break;
      default: h = g.softplus(g.add(h, h)); break;
    }
  }
  switch (r.root) {
    case 0: return g.sum(h);
    case 1: return g.bce(g.sigmoid(g.matvec(g.constant(r.head), h)), r.target);
    default: return g.sum(g.negate(h));
  }
}

void record(GradcheckEntry& entry, const GradCheckResult& result) {
  ++entry.checks;
  entry.max_relative_error = std::max(entry.max_relative_error, result.max_relative_error);
}

void check_victim(const Victim& victim, const std::vector<TokenId>& ids,
                  const std::vector<double>& speaker, const std::string& label,
                  GradcheckReport& report) {
  GradcheckEntry spk{label + " speaker"};
  GradcheckEntry txt{label + " text"};
  ForwardPass pass = victim.forward(ids, speaker);
  const auto speaker_grad = pass.speaker_gradient();
  const auto text_grads = pass.text_gradients();

  auto speaker_loss = [&](const std::vector<double>& s) { return victim.evaluate(ids, s).loss; };
  record(spk, compare_with_central_differences(speaker_loss, speaker, speaker_grad,
                                               kGradcheckStep));

  const auto rows = victim.lookup(ids);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    auto text_loss = [&](const std::vector<double>& e) {
      auto perturbed = rows;
      perturbed[i] = e;
      return victim.evaluate_embedded(perturbed, speaker, 0.0).loss;
    };
    record(txt, compare_with_central_differences(text_loss, rows[i], text_grads[i],
                                                 kGradcheckStep));
  }
  report.entries.push_back(spk);
  report.entries.push_back(txt);
}

}  // namespace

GradcheckReport run_gradcheck_suite(std::uint64_t seed) {
  GradcheckReport report;

  GradcheckEntry graphs{"random graphs"};
  for (int i = 0; i < kRandomGraphCount; ++i) {
    Rng rng(derive_seed(seed, "graph:" + std::to_string(i)));
    const std::size_t n = 2 + rng.index(4);
    const Recipe recipe = draw_recipe(rng, n);
    const Tensor at = Tensor::vector(rng.gaussian_vector(n));
    record(graphs, grad_check([&](Graph& g, NodeId x) { return build_recipe(recipe, g, x); }, at,
                              kGradcheckStep));
  }
  report.entries.push_back(graphs);

  const auto& table = HomoglyphTable::builtin();
  const std::u32string text = utf8::decode("I HAVE A PUPPY");

  // Three decoder steps, with the bias pushed down until none of them stops.
  VictimDims ar_dims;
  ar_dims.max_steps = 3;
  ArVictim ar = generate_ar_victim(ar_dims, seed, table);
  const auto ids = ar.embedding().encode(text);
  const auto speaker = make_speaker(seed, "gradcheck", ar_dims.d_spk);
  auto stays_open = [&](const ArVictim& v) {
    const auto trace = v.evaluate(ids, speaker).trace;
    return *std::max_element(trace.begin(), trace.end()) <= 0.45;
  };
  for (double bias = -0.5; !stays_open(ar); bias -= 0.5) ar = ar.with_stop_bias(bias);
  check_victim(ar, ids, speaker, "ar", report);

  NarVictim nar = generate_nar_victim({}, seed, table);
  check_victim(nar, nar.embedding().encode(text), speaker, "nar", report);

  for (const auto& e : report.entries) {
    report.max_relative_error = std::max(report.max_relative_error, e.max_relative_error);
  }
  return report;
}

std::string format_gradcheck(const GradcheckReport& report) {
  std::string out;
  char line[160];
  for (const auto& e : report.entries) {
    std::snprintf(line, sizeof line, "%-16s checks %4zu  max_rel_err %.3e\n", e.name.c_str(),
                  e.checks, e.max_relative_error);
    out += line;
  }
  std::snprintf(line, sizeof line, "gradcheck: %s (max rel err %.3e, tolerance %.0e)\n",
                report.passed() ? "PASS" : "FAIL", report.max_relative_error,
                kGradcheckTolerance);
  out += line;
  return out;
}

}  // namespace sponge

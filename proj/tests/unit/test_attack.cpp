#include <doctest.h>

#include <cmath>

#include "sponge/attack/projection.hpp"
#include "sponge/attack/speaker_attack.hpp"
#include "sponge/attack/text_attack.hpp"
#include "sponge/error.hpp"
#include "sponge/random.hpp"
#include "sponge/text/corpus.hpp"
#include "sponge/text/utf8.hpp"
#include "sponge/victims/generate.hpp"

using namespace sponge;

namespace {

constexpr std::uint64_t kSeed = 42;

const std::vector<Utterance>& corpus() {
  static const auto c = load_corpus(SPONGE_DATA_DIR "/corpus_synthetic.txt");
  return c;
}

const NarVictim& nar() {
  static const NarVictim v = generate_nar_victim(VictimDims{}, kSeed, HomoglyphTable::builtin());
  return v;
}

// Default AR victim with a shorter decode cap so attacks stay quick.
const ArVictim& ar() {
  static const ArVictim v = [] {
    const auto raw = generate_ar_victim(VictimDims{}, kSeed, HomoglyphTable::builtin());
    const auto cal = calibrate_stop_bias(raw, make_probes(raw, corpus(), kSeed));
    return raw.with_calibration(cal).with_max_steps(300);
  }();
  return v;
}

// NAR victim over a caller-chosen vocabulary with two-dimensional rows.
NarVictim nar_over(std::u32string chars, std::vector<double> rows) {
  VictimDims d;
  d.d_text = 2;
  d.d_spk = 2;
  d.d_hidden = 3;
  Rng rng(3);
  std::vector<VocabEntry> entries;
  for (char32_t c : chars) entries.push_back({c, std::nullopt});
  NarWeights w;
  w.hidden_w = Tensor::matrix(3, 4, rng.gaussian_vector(12));
  w.hidden_b = Tensor::vector(rng.gaussian_vector(3));
  w.out_w = Tensor::matrix(1, 3, rng.gaussian_vector(3));
  w.out_b = Tensor::zeros({1});
  const std::size_t n = chars.size();
  return NarVictim(d, 3, EmbeddingTable(std::move(entries), Tensor::matrix(n, 2, std::move(rows))),
                   std::move(w));
}

std::vector<double> speaker_for(const Victim& v, const Utterance& u) {
  return utterance_speaker(kSeed, u, v.dims().d_spk);
}

AttackConfig config_with_seed(std::uint64_t seed) {
  AttackConfig c;
  c.seed = seed;
  return c;
}

}  // namespace

TEST_CASE("projection examples") {
  CHECK(project({3, 4}, 10, Norm::l2) == std::vector<double>{3, 4});
  const auto p = project({3, 4}, 1, Norm::l2);
  CHECK(p[0] == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(p[1] == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(project({3, -4}, 1, Norm::linf) == std::vector<double>{1, -1});
  CHECK_THROWS_AS(project({1}, 0.0, Norm::l2), ConfigError);
}

TEST_CASE("projection properties on random pairs") {
  Rng rng(21);
  for (Norm norm : {Norm::l2, Norm::linf}) {
    for (int trial = 0; trial < 2000; ++trial) {
      const std::size_t n = 1 + rng.index(40);
      auto delta = rng.gaussian_vector(n);
      const double scale = std::exp(4.0 * rng.gaussian());
      for (double& x : delta) x *= scale;
      const double eps = std::exp(2.0 * rng.gaussian());
      const auto out = project(delta, eps, norm);
      CHECK(vector_norm(out, norm) <= eps + 1e-9);
      if (vector_norm(delta, norm) <= eps) CHECK(out == delta);
    }
  }
}

TEST_CASE("pgd step examples") {
  std::vector<double> d{0, 0};
  pgd_step(d, std::vector<double>{0.5, -2}, 0.1, 0.05, Norm::linf);
  CHECK(d == std::vector<double>{-0.05, 0.05});

  d = {0.01, -0.02};
  pgd_step(d, std::vector<double>{0, 0}, 0.1, 0.05, Norm::linf);
  CHECK(d == std::vector<double>{0.01, -0.02});

  d = {0.04, 0};
  pgd_step(d, std::vector<double>{-1, 0}, 0.1, 0.05, Norm::l2);
  CHECK(d[0] == doctest::Approx(0.05).epsilon(1e-15));
  CHECK(d[1] == 0.0);

  d = {0, 0};
  CHECK_THROWS_AS(pgd_step(d, std::vector<double>{std::nan(""), 0}, 0.1, 1, Norm::l2),
                  AttackError);
  CHECK_THROWS_AS(pgd_step(d, std::vector<double>{1}, 0.1, 1, Norm::l2), ShapeError);
}

TEST_CASE("zero iterations returns the clean input") {
  AttackConfig c = config_with_seed(1);
  c.iterations = 0;
  const auto& u = corpus()[4];
  const auto ids = nar().embedding().encode(u.chars);
  const auto s = speaker_for(nar(), u);
  for (Norm norm : {Norm::l2, Norm::linf}) {
    const auto out = attack_speaker(nar(), ids, s, c, norm);
    CHECK(out.adversarial.frames == out.clean.frames);
    CHECK(out.adversarial.loss == out.clean.loss);
    CHECK(out.speaker->l2 == 0.0);
  }
  const auto text = attack_text(nar(), u.chars, s, c, HomoglyphTable::builtin());
  CHECK(text.text->adversarial == u.chars);
  CHECK(text.adversarial.frames == text.clean.frames);
}

TEST_CASE("zero speaker gradient leaves delta at zero") {
  VictimDims d;
  d.d_text = 2;
  d.d_spk = 3;
  d.d_hidden = 2;
  d.max_steps = 40;
  ArWeights w;
  w.encoder_w = Tensor::zeros({2, 2});
  w.encoder_b = Tensor::zeros({2});
  w.init_w = Tensor::zeros({2, 5});
  w.recurrent_w = Tensor::zeros({2, 2});
  w.context_w = Tensor::zeros({2, 2});
  w.speaker_w = Tensor::zeros({2, 3});
  w.stop_w = Tensor::zeros({1, 2});
  w.stop_b = Tensor::vector({1.0});
  const ArVictim v(d, 0, EmbeddingTable({{U'a', std::nullopt}}, Tensor::matrix(1, 2, {0, 0})), w);
  const std::vector<TokenId> ids{0, 0};
  const std::vector<double> s{0.6, 0.8, 0.0};
  const auto out = attack_speaker(v, ids, s, config_with_seed(1), Norm::l2);
  CHECK(out.iterations_run == 100);
  for (double x : out.speaker->delta) CHECK(x == 0.0);
  CHECK(out.adversarial.frames == out.clean.frames);
}

TEST_CASE("speaker PGD on the NAR victim: golden and invariants") {
  AttackConfig c = config_with_seed(7);
  c.eps = 0.5;
  const Utterance& u = corpus()[11];
  const auto ids = nar().embedding().encode(u.chars);
  const auto s = speaker_for(nar(), u);
  const auto out = attack_speaker(nar(), ids, s, c, Norm::linf);
  CHECK(out.adversarial.frames >= out.clean.frames);
  CHECK(out.adversarial.frames == 8192);  // recorded golden
  CHECK(out.speaker->linf <= 0.5 + 1e-9);
  CHECK(out.best_frames.size() == 100);
  for (std::size_t i = 1; i < out.best_frames.size(); ++i) {
    CHECK(out.best_frames[i] >= out.best_frames[i - 1]);
  }
  CHECK(out.best_frames.back() == out.adversarial.frames);
}

TEST_CASE("speaker attacks respect the budget on the AR victim") {
  for (std::size_t i = 0; i < 4; ++i) {
    const auto& u = corpus()[i];
    const auto ids = ar().embedding().encode(u.chars);
    const auto s = speaker_for(ar(), u);
    AttackConfig c = config_with_seed(i);
    c.iterations = 20;
    for (Norm norm : {Norm::l2, Norm::linf}) {
      for (const auto& out : {attack_speaker(ar(), ids, s, c, norm),
                              baseline_speaker_gaussian(ar(), ids, s, c, norm)}) {
        CHECK(vector_norm(out.speaker->delta, norm) <= c.eps_for(norm) + 1e-9);
        for (std::size_t k = 1; k < out.best_frames.size(); ++k) {
          CHECK(out.best_frames[k] >= out.best_frames[k - 1]);
        }
      }
    }
  }
}

TEST_CASE("gaussian baseline") {
  const auto& u = corpus()[2];
  const auto ids = nar().embedding().encode(u.chars);
  const auto s = speaker_for(nar(), u);
  SUBCASE("vanishing radius is the identity") {
    AttackConfig c = config_with_seed(3);
    c.eps = 1e-12;
    for (Norm norm : {Norm::l2, Norm::linf}) {
      const auto out = baseline_speaker_gaussian(nar(), ids, s, c, norm);
      CHECK(out.adversarial.frames == out.clean.frames);
    }
    const auto pgd = attack_speaker(nar(), ids, s, c, Norm::l2);
    CHECK(pgd.adversarial.frames == pgd.clean.frames);
  }
  SUBCASE("deterministic for a seed") {
    const auto a = baseline_speaker_gaussian(nar(), ids, s, config_with_seed(9), Norm::l2);
    const auto b = baseline_speaker_gaussian(nar(), ids, s, config_with_seed(9), Norm::l2);
    CHECK(a.speaker->delta == b.speaker->delta);
    CHECK(a.adversarial.frames == b.adversarial.frames);
  }
  SUBCASE("golden best over 100 draws") {
    const auto out = baseline_speaker_gaussian(nar(), ids, s, config_with_seed(9), Norm::l2);
    CHECK(out.iterations_run == 100);
    CHECK(out.adversarial.frames >= out.clean.frames);
    CHECK(out.adversarial.frames == 18688);  // recorded golden
  }
}

TEST_CASE("signed gradient steps decrease the NAR loss") {
  Rng rng(99);
  int decreased = 0;
  constexpr int kTrials = 200;
  for (int t = 0; t < kTrials; ++t) {
    const auto& u = corpus()[rng.index(corpus().size())];
    const auto ids = nar().embedding().encode(u.chars);
    const auto s = make_speaker(rng.next(), "trial", nar().dims().d_spk);
    auto pass = nar().forward(ids, s);
    const auto g = pass.speaker_gradient();
    std::vector<double> stepped = s;
    for (std::size_t i = 0; i < s.size(); ++i) {
      stepped[i] -= 1e-4 * ((g[i] > 0) - (g[i] < 0));
    }
    if (nar().evaluate(ids, stepped).loss < pass.output().loss) ++decreased;
  }
  CHECK(decreased >= 95 * kTrials / 100);
}

TEST_CASE("replacement increment") {
  CHECK(replacement_increment(std::vector<double>{0.2, -0.3}, std::vector<double>{1, 0},
                              std::vector<double>{0, 1}) == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK(replacement_increment(std::vector<double>{0.2, -0.3}, std::vector<double>{0.4, 7},
                              std::vector<double>{0.4, 7}) == 0.0);
  CHECK_THROWS_AS(replacement_increment(std::vector<double>{1}, std::vector<double>{1, 2},
                                        std::vector<double>{1, 2}),
                  ShapeError);
}

TEST_CASE("increment sign predicts the actual loss change") {
  const auto& v = nar();
  const auto& u = corpus()[5];
  const auto ids = v.embedding().encode(u.chars);
  const auto s = speaker_for(v, u);
  auto pass = v.forward(ids, s);
  const auto grads = pass.text_gradients();
  const auto tokens = v.lookup(ids);
  const double base = pass.output().loss;
  int checked = 0;
  int agree = 0;
  for (std::size_t i = 0; i < tokens.size(); i += 3) {
    for (TokenId id : v.embedding().base_ids()) {
      const auto e_new = v.embedding().row(id);
      const double inc = replacement_increment(grads[i], tokens[i], e_new);
      if (std::fabs(inc) < 1e-6) continue;
      auto moved = tokens;
      for (std::size_t j = 0; j < e_new.size(); ++j) {
        moved[i][j] += 1e-3 * (e_new[j] - tokens[i][j]);
      }
      const double change = v.evaluate_embedded(moved, s, 0.0).loss - base;
      ++checked;
      if ((change > 0) == (inc > 0)) ++agree;
    }
  }
  CHECK(checked > 100);
  CHECK(agree == checked);
}

TEST_CASE("ranking by hand-computed increments") {
  // Rows: a (1,0), b (0,1), c (1,1), d (-1,0). Gradient at the single
  // position is (0.25, -0.5), so the predicted loss decreases are
  //   b: -((-1)(0.25) + (1)(-0.5)) = 0.75
  //   c: -(( 0)(0.25) + (1)(-0.5)) = 0.5
  //   d: -((-2)(0.25) + (0)(-0.5)) = 0.5
  const auto v = nar_over(U"abcd", {1, 0, 0, 1, 1, 1, -1, 0});
  const std::vector<std::vector<double>> grads{{0.25, -0.5}};
  const auto ranked =
      rank_replacements(v, U"a", grads, EditStrategy::char_swap, HomoglyphTable::builtin());
  REQUIRE(ranked.size() == 3);
  CHECK(ranked[0].replacement == U'b');
  CHECK(ranked[0].score == 0.75);
  CHECK(ranked[1].replacement == U'c');  // tie with d broken by code point
  CHECK(ranked[2].replacement == U'd');
  CHECK(ranked[1].score == ranked[2].score);
}

TEST_CASE("zero gradients rank in tie-break order") {
  const auto v = nar_over(U"abcd", {1, 0, 0, 1, 1, 1, -1, 0});
  const std::vector<std::vector<double>> grads(3, std::vector<double>{0.0, 0.0});
  const auto ranked =
      rank_replacements(v, U"bad", grads, EditStrategy::char_swap, HomoglyphTable::builtin());
  REQUIRE(ranked.size() == 9);
  for (std::size_t k = 0; k < ranked.size(); ++k) {
    CHECK(ranked[k].score == 0.0);
    if (k > 0) {
      const auto& p = ranked[k - 1];
      const auto& q = ranked[k];
      CHECK((p.position < q.position ||
             (p.position == q.position && p.replacement < q.replacement)));
    }
  }
}

TEST_CASE("homoglyph ranking skips characters without table entries") {
  const auto& v = nar();
  const auto s = make_speaker(kSeed, "homo", v.dims().d_spk);
  const auto ranked = rank_replacements(v, U"a! ?", s, EditStrategy::homoglyph,
                                        HomoglyphTable::builtin());
  CHECK_FALSE(ranked.empty());
  for (const auto& r : ranked) {
    CHECK(r.position == 0);
    CHECK(r.strategy == EditStrategy::homoglyph);
  }
}

TEST_CASE("text attack with an empty budget returns the original") {
  const auto& u = corpus()[0];
  const auto s = speaker_for(nar(), u);
  const auto out =
      attack_text_with_budget(nar(), u.chars, s, config_with_seed(1), HomoglyphTable::builtin(), 0);
  CHECK(out.text->adversarial == u.chars);
  CHECK(out.text->edits.empty());
  CHECK(out.adversarial.frames == out.clean.frames);
}

TEST_CASE("one-character text over a two-letter vocabulary") {
  const auto v = nar_over(U"ab", {1, 0, 0, 1});
  AttackConfig c = config_with_seed(1);
  c.iterations = 5;
  const auto out = attack_text(v, U"a", std::vector<double>{0.6, 0.8}, c,
                               HomoglyphTable::builtin());
  CHECK(out.text->edits.size() <= 1);
  CHECK(out.text->adversarial.size() == 1);
  CHECK(out.iterations_run <= 2);
  const bool swapped = out.text->adversarial == U"b";
  CHECK(out.text->edits.size() == static_cast<std::size_t>(swapped));
}

TEST_CASE("text attack keeps length and budget and never loses to clean") {
  AttackConfig c = config_with_seed(5);
  c.iterations = 10;
  c.candidates_per_strategy = 20;
  for (const Victim* v : {static_cast<const Victim*>(&nar()), static_cast<const Victim*>(&ar())}) {
    for (std::size_t i = 0; i < 3; ++i) {
      const auto& u = corpus()[i * 7];
      const auto s = speaker_for(*v, u);
      const auto out = attack_text(*v, u.chars, s, c, HomoglyphTable::builtin());
      const auto& t = *out.text;
      CHECK(t.adversarial.size() == u.chars.size());
      CHECK(t.budget == replacement_budget(u.chars.size(), 0.05));
      CHECK(hamming_distance(u.chars, t.adversarial) <= t.budget);
      CHECK(apply_edits(u.chars, t.edits) == t.adversarial);
      CHECK(out.adversarial.frames >= out.clean.frames);
      for (std::size_t k = 1; k < out.best_frames.size(); ++k) {
        CHECK(out.best_frames[k] >= out.best_frames[k - 1]);
      }
    }
  }
}

TEST_CASE("homoglyph edit on the puppy sample") {
  const std::u32string text = U"I HAVE A PUPPY";
  const auto& v = nar();
  const auto s = make_speaker(kSeed, "puppy", v.dims().d_spk);
  const auto ranked = rank_replacements(v, text, s, EditStrategy::homoglyph,
                                        HomoglyphTable::builtin());
  // Only letters have table entries; 'V' at position 4 is among them.
  bool saw_v = false;
  for (const auto& r : ranked) {
    CHECK(text[r.position] != U' ');
    if (r.position == 4) {
      saw_v = true;
      const auto list = HomoglyphTable::builtin().lookup(U'V');
      CHECK(std::find(list.begin(), list.end(), r.replacement) != list.end());
    }
  }
  CHECK(saw_v);

  AttackConfig c = config_with_seed(2);
  const auto out = attack_text(v, text, s, c, HomoglyphTable::builtin());
  CHECK(out.text->budget == 1);
  CHECK(out.text->adversarial.size() == text.size());
  CHECK(hamming_distance(text, out.text->adversarial) <= 1);
  CHECK(utf8::is_valid(utf8::encode(out.text->adversarial)));
}

TEST_CASE("random text baseline") {
  const auto& v = nar();
  const std::u32string len20 = U"twenty chars exactly";
  REQUIRE(len20.size() == 20);
  std::u32string len140;
  while (len140.size() < 140) len140 += U"Seven homoglyph edits fit here. ";
  len140.resize(140);

  const auto a = random_text_candidate(v, len20, config_with_seed(4), HomoglyphTable::builtin());
  CHECK(a.edits.size() == 1);
  CHECK(hamming_distance(len20, a.chars) == 1);

  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto b =
        random_text_candidate(v, len140, config_with_seed(seed), HomoglyphTable::builtin());
    CHECK(b.edits.size() == 7);
    CHECK(hamming_distance(len140, b.chars) == 7);
    CHECK(b.chars.size() == 140);
    for (const auto& e : b.edits) {
      if (e.strategy == EditStrategy::homoglyph) {
        CHECK(HomoglyphTable::builtin().contains(e.old_char));
      }
    }
  }
  const auto again =
      random_text_candidate(v, len140, config_with_seed(4), HomoglyphTable::builtin());
  CHECK(random_text_candidate(v, len140, config_with_seed(4), HomoglyphTable::builtin()).chars ==
        again.chars);
}

TEST_CASE("attack config validation") {
  AttackConfig c;
  CHECK_NOTHROW(c.validate());
  CHECK(c.eps_for(Norm::l2) == 2.0);
  CHECK(c.eps_for(Norm::linf) == 0.5);
  c.iterations = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = AttackConfig{};
  c.ratio = 0.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = AttackConfig{};
  c.eps = -1.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = AttackConfig{};
  c.target_y = 0.5;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  CHECK(parse_norm("linf") == Norm::linf);
  CHECK_THROWS_AS(parse_norm("l1"), ConfigError);
}

#include <doctest.h>

#include <vector>

#include "sponge/error.hpp"
#include "sponge/metrics/aggregate.hpp"

using namespace sponge;

namespace {

UtteranceOutcome outcome(std::string id, std::string method, std::int64_t clean,
                         std::int64_t adv) {
  UtteranceOutcome o;
  o.utterance_id = std::move(id);
  o.method = std::move(method);
  o.clean_frames = clean;
  o.adv_frames = adv;
  o.success = is_success(clean, adv);
  return o;
}

}  // namespace

TEST_CASE("attack success rate") {
  CHECK(asr(std::vector{outcome("1", "text", 100, 121), outcome("2", "text", 100, 119)}) == 50.0);
  CHECK(asr(std::vector{outcome("1", "text", 100, 100), outcome("2", "text", 7, 7)}) == 0.0);
  CHECK_THROWS_AS(asr(std::vector<UtteranceOutcome>{}), MetricError);
}

TEST_CASE("success boundary is inclusive at 1.2x") {
  CHECK(is_success(100, 120));
  CHECK_FALSE(is_success(100, 119));
  CHECK(is_success(256 * 45, 256 * 54));
  CHECK_FALSE(is_success(256 * 45, 256 * 54 - 1));
  // 1.2 is not exact in binary; the integer rule still lands on the boundary.
  CHECK(is_success(5, 6));
  CHECK(is_success(105975, 127170));
  CHECK_FALSE(is_success(105975, 127169));
  CHECK(is_success(0, 0));
}

TEST_CASE("increments reproduce the published table arithmetic") {
  // Mean and max absolutes from the SpeechT5 / LJSpeech rows. Expected values
  // were computed independently in numpy.
  const double mean_clean = 105976, max_clean = 159124;
  SUBCASE("text baseline") {
    CHECK(increments(mean_clean, max_clean, 138409, max_clean).first ==
          doctest::Approx(0.30604099041292376).epsilon(1e-15));
  }
  SUBCASE("text attack") {
    CHECK(increments(mean_clean, max_clean, 189926, max_clean).first ==
          doctest::Approx(0.7921604891673586).epsilon(1e-15));
  }
  SUBCASE("speaker attack, l2") {
    const auto [mean_inc, max_inc] = increments(mean_clean, max_clean, 424156, 860160);
    CHECK(mean_inc == doctest::Approx(3.0023778968823134).epsilon(1e-15));
    CHECK(max_inc == doctest::Approx(4.40559563610769).epsilon(1e-15));
  }
  SUBCASE("speaker attack, linf") {
    CHECK(increments(mean_clean, max_clean, 328274, max_clean).first ==
          doctest::Approx(2.0976258775571828).epsilon(1e-15));
  }
  CHECK_THROWS_AS(increments(0, 1, 1, 1), MetricError);
  CHECK_THROWS_AS(increments(1, 0, 1, 1), MetricError);
}

TEST_CASE("aggregate per method") {
  const std::vector<UtteranceOutcome> outcomes{
      outcome("1", "clean", 100, 100),  outcome("2", "clean", 300, 300),
      outcome("1", "spk-l2", 100, 150), outcome("2", "spk-l2", 300, 330),
      outcome("1", "text", 100, 100),   outcome("2", "text", 300, 360),
  };
  const auto agg = aggregate(outcomes);
  REQUIRE(agg.size() == 3);
  CHECK(agg[0].method == "clean");
  CHECK_FALSE(agg[0].asr.has_value());
  CHECK(agg[0].mean_incre == 0.0);
  CHECK(agg[1].method == "spk-l2");
  CHECK(agg[1].mean_absolute == 240.0);
  CHECK(agg[1].max_absolute == 330);
  CHECK(agg[1].mean_incre == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(agg[1].max_incre == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(*agg[1].asr == 50.0);
  CHECK(agg[2].method == "text");
  CHECK(*agg[2].asr == 50.0);
  CHECK(aggregate(std::vector<UtteranceOutcome>{}).empty());
}

TEST_CASE("asr never drops when an adversarial count grows") {
  std::vector<UtteranceOutcome> o{outcome("1", "text", 100, 110), outcome("2", "text", 50, 70),
                                  outcome("3", "text", 80, 95)};
  double last = asr(o);
  for (int k = 0; k < 40; ++k) {
    o[k % 3].adv_frames += 1;
    const double now = asr(o);
    CHECK(now >= last);
    CHECK(now <= 100.0);
    last = now;
  }
}

TEST_CASE("canonical outcome order") {
  std::vector<UtteranceOutcome> o{outcome("b", "text", 1, 1), outcome("a", "clean", 1, 1),
                                  outcome("zz", "text", 1, 1), outcome("b", "clean", 1, 1),
                                  outcome("a", "text", 1, 1)};
  sort_outcomes(o, {"b", "a"});
  std::vector<std::string> got;
  for (const auto& x : o) got.push_back(x.method + "/" + x.utterance_id);
  CHECK(got == std::vector<std::string>{"clean/b", "clean/a", "text/b", "text/a", "text/zz"});
}

TEST_CASE("method labels") {
  CHECK(is_method_label("spk-baseline"));
  CHECK_FALSE(is_method_label("spk"));
  CHECK(method_rank("clean") == 0);
  CHECK(method_rank("text-baseline") == 5);
  CHECK_THROWS_AS(method_rank("bogus"), ConfigError);
}

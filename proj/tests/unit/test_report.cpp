#include <doctest.h>

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "sponge/error.hpp"
#include "sponge/random.hpp"
#include "sponge/report/kde.hpp"
#include "sponge/report/records.hpp"

using namespace sponge;
namespace fs = std::filesystem;

namespace {

double parse_double(const std::string& s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  REQUIRE(res.ec == std::errc());
  REQUIRE(res.ptr == s.data() + s.size());
  return v;
}

std::vector<UtteranceOutcome> sample_outcomes() {
  std::vector<UtteranceOutcome> out;
  Rng rng(8);
  for (int i = 1; i <= 6; ++i) {
    for (const char* method : {"clean", "spk-l2", "text"}) {
      UtteranceOutcome o;
      o.utterance_id = std::to_string(i);
      o.method = method;
      o.clean_frames = 256 * (20 + i);
      o.adv_frames = o.method == "clean" ? o.clean_frames : 256 * (20 + i + rng.index(10));
      o.success = is_success(o.clean_frames, o.adv_frames);
      o.wall_time_ms = 0.1 + rng.uniform();
      o.mac_count = 1000 + rng.index(5000);
      if (o.method == "spk-l2") {
        SpeakerPerturbation p;
        p.norm = Norm::l2;
        p.eps = 2.0;
        p.delta = rng.gaussian_vector(4);
        p.l2 = 0.1 * i;
        p.linf = 0.05 * i;
        o.speaker = p;
      }
      if (o.method == "text") {
        TextPerturbation t;
        t.original = U"abc";
        t.adversarial = U"аbc";
        t.edits = {{0, U'a', U'а', EditStrategy::homoglyph}};
        t.budget = 1;
        o.text = t;
      }
      out.push_back(o);
    }
  }
  return out;
}

std::string aggregates_text(const std::vector<CampaignAggregate>& a) {
  std::ostringstream s;
  write_aggregates_csv(s, a);
  return s.str();
}

}  // namespace

TEST_CASE("silverman bandwidth") {
  CHECK(silverman_bandwidth(std::vector<double>{3.0}) == 1.0);
  CHECK(silverman_bandwidth(std::vector<double>{2.0, 2.0, 2.0}) == 1.0);
  // Reference values from numpy (sample sd, linear-interpolation quartiles).
  std::vector<double> ten;
  for (int i = 1; i <= 10; ++i) ten.push_back(i);
  CHECK(std::fabs(silverman_bandwidth(ten) - 1.719286404692283) <= 1e-9);
  CHECK(std::fabs(silverman_bandwidth(std::vector<double>{0, 0, 1, 1, 1, 2, 2, 50}) -
                  0.5538979103057857) <= 1e-9);
  CHECK(quantile(ten, 0.25) == 3.25);
  CHECK(quantile(ten, 0.75) == 7.75);
}

TEST_CASE("gaussian kde spot values") {
  const std::vector<double> at_zero{0.0};
  CHECK(gaussian_kde(std::vector<double>{0.0}, at_zero, 1.0).density[0] ==
        doctest::Approx(0.3989422804014327).epsilon(1e-14));
  CHECK(gaussian_kde(std::vector<double>{-1.0, 1.0}, at_zero, 1.0).density[0] ==
        doctest::Approx(0.24197072451914337).epsilon(1e-14));
}

TEST_CASE("kde against an independent quadrature") {
  const std::vector<double> vals{3, 7, 7.5, 20, 21, 40};
  const auto curve = default_kde(vals);
  CHECK(curve.bandwidth == doctest::Approx(6.3950504059227535).epsilon(1e-12));
  CHECK(curve.grid.size() == 512);
  CHECK(curve.grid.front() == doctest::Approx(3 - 4 * curve.bandwidth).epsilon(1e-12));
  CHECK(curve.grid.back() == doctest::Approx(40 + 4 * curve.bandwidth).epsilon(1e-12));
  CHECK(trapezoid(curve.grid, curve.density) ==
        doctest::Approx(0.9999889069991152).epsilon(1e-9));
  CHECK(gaussian_kde(vals, std::vector<double>{10.0}, curve.bandwidth).density[0] ==
        doctest::Approx(0.030087631575587116).epsilon(1e-12));
  for (std::size_t i = 1; i < curve.grid.size(); ++i) CHECK(curve.grid[i] > curve.grid[i - 1]);
  for (double d : curve.density) CHECK(d >= 0.0);
}

TEST_CASE("kde mass on random samples") {
  Rng rng(17);
  for (int t = 0; t < 20; ++t) {
    const std::size_t n = 1 + rng.index(60);
    std::vector<double> v(n);
    for (double& x : v) x = 256.0 * std::floor(40 + 30 * rng.gaussian());
    const auto c = default_kde(v);
    CHECK(trapezoid(c.grid, c.density) >= 0.97);
    CHECK(trapezoid(c.grid, c.density) <= 1.0);
  }
}

TEST_CASE("kde is symmetric under mirroring") {
  Rng rng(4);
  std::vector<double> vals(15);
  for (double& x : vals) x = 5 * rng.gaussian();
  std::vector<double> mirrored;
  for (double x : vals) mirrored.push_back(-x);
  std::vector<double> grid, mgrid;
  for (int i = -50; i <= 50; ++i) grid.push_back(0.37 * i + 0.05);
  for (auto it = grid.rbegin(); it != grid.rend(); ++it) mgrid.push_back(-*it);
  const auto a = gaussian_kde(vals, grid, 1.3);
  const auto b = gaussian_kde(mirrored, mgrid, 1.3);
  const std::size_t n = grid.size();
  for (std::size_t i = 0; i < n; ++i) {
    CHECK(std::fabs(a.density[i] - b.density[n - 1 - i]) <= 1e-12);
  }
}

TEST_CASE("number formatting round trips") {
  Rng rng(3);
  for (int i = 0; i < 2000; ++i) {
    const double v = rng.gaussian() * std::pow(10.0, static_cast<int>(rng.index(40)) - 20);
    const std::string s = format_number(v);
    CHECK(parse_double(s) == v);
    CHECK(s.find(',') == std::string::npos);
  }
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(13568) == "13568");
  CHECK(parse_double(format_number(std::numeric_limits<double>::denorm_min())) ==
        std::numeric_limits<double>::denorm_min());
}

TEST_CASE("aggregates csv") {
  CHECK(aggregates_text({}) == std::string(kAggregateHeader) + "\n");
  const auto agg = aggregate(sample_outcomes());
  const auto text = aggregates_text(agg);
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  CHECK(line == kAggregateHeader);
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    std::vector<std::string> cells;
    std::stringstream ls(line);
    for (std::string c; std::getline(ls, c, ',');) cells.push_back(c);
    if (line.back() == ',') cells.push_back("");
    REQUIRE(cells.size() == 8);
    const auto& a = agg[rows - 1];
    CHECK(cells[0] == a.method);
    CHECK(parse_double(cells[1]) == a.mean_absolute);
    CHECK(parse_double(cells[3]) == a.mean_incre);
    CHECK(parse_double(cells[4]) == a.max_incre);
    if (a.asr) CHECK(parse_double(cells[5]) == *a.asr);
    CHECK(parse_double(cells[6]) == a.mean_time_ms);
    CHECK(parse_double(cells[7]) == a.mean_macs);
  }
  CHECK(rows == 3);
}

TEST_CASE("outcome records round trip") {
  const auto outcomes = sample_outcomes();
  std::ostringstream records, timings;
  write_outcomes(records, outcomes);
  write_timings(timings, outcomes);
  CHECK(records.str().find("wall_time") == std::string::npos);

  std::istringstream rin(records.str());
  auto back = read_outcomes(rin, "memory");
  REQUIRE(back.size() == outcomes.size());
  std::istringstream tin(timings.str());
  merge_timings(back, tin, "memory");
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].utterance_id == outcomes[i].utterance_id);
    CHECK(back[i].adv_frames == outcomes[i].adv_frames);
    CHECK(back[i].wall_time_ms == outcomes[i].wall_time_ms);
    CHECK(back[i].speaker.has_value() == outcomes[i].speaker.has_value());
    if (back[i].speaker) CHECK(back[i].speaker->delta == outcomes[i].speaker->delta);
    if (back[i].text) {
      CHECK(back[i].text->adversarial == outcomes[i].text->adversarial);
      CHECK(back[i].text->edits == outcomes[i].text->edits);
    }
  }
  CHECK(aggregates_text(aggregate(back)) == aggregates_text(aggregate(outcomes)));

  std::istringstream broken("{\"id\": \"1\"}\n");
  CHECK_THROWS_AS(read_outcomes(broken, "broken"), SchemaError);
}

TEST_CASE("emit and load a run directory") {
  const fs::path dir = fs::temp_directory_path() / "sponge_emit_test";
  fs::remove_all(dir);
  const auto outcomes = sample_outcomes();
  const auto agg = aggregate(outcomes);
  emit(dir, outcomes, agg, {{"artifact", "sponge"}, {"seeds", {{"campaign", 42}}}});
  for (const char* f : {"outcomes.jsonl", "timings.jsonl", "aggregates.csv", "kde.csv",
                        "kde_time_ms.csv", "kde_macs.csv", "manifest.json"}) {
    CHECK(fs::exists(dir / f));
  }
  const auto run = load_run(dir);
  CHECK(run.manifest["seeds"]["campaign"] == 42);
  CHECK(aggregates_text(aggregate(run.outcomes)) == aggregates_text(agg));

  std::ifstream kde(dir / "kde.csv");
  std::string header;
  std::getline(kde, header);
  CHECK(header == "method,x,density");

  CHECK_THROWS_AS(load_run(dir / "missing"), Error);
  const auto table = format_table(agg);
  CHECK(table.find("spk-l2") != std::string::npos);
}

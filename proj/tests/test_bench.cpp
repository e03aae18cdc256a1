#include "stodec/bench.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

using namespace stodec;
using Catch::Approx;

namespace {

BenchConfig small_config() {
  BenchConfig cfg;
  cfg.n_values = {3};
  cfg.h_values = {3.0};
  cfg.m1 = 12;
  cfg.m2 = 12;
  cfg.runs = 3;
  cfg.num_scenarios = 4;
  cfg.delta = 0.05;
  cfg.k_max = 100;
  cfg.seed_base = 0;
  return cfg;
}

}  // namespace

TEST_CASE("gap columns are reproducible, timing columns are not promised", "[bench]") {
  const BenchConfig cfg = small_config();
  const auto a = run_benchmark(cfg);
  const auto b = run_benchmark(cfg);
  REQUIRE(a.size() == 1);
  REQUIRE(b.size() == 1);
  REQUIRE(!a[0].aborted);
  REQUIRE(a[0].runs == cfg.runs);
  REQUIRE(a[0].ngap_pct == b[0].ngap_pct);
  REQUIRE(a[0].dgap_pct == b[0].dgap_pct);
  REQUIRE(a[0].resample_events == b[0].resample_events);
  REQUIRE(a[0].ngap_pct >= -1e-4);
  REQUIRE(a[0].dgap_pct >= 0.0);
}

TEST_CASE("gap columns are thread-count invariant", "[bench]") {
  BenchConfig cfg = small_config();
  cfg.threads = 1;
  const auto serial = run_benchmark(cfg);
  for (int threads : {2, 4}) {
    cfg.threads = threads;
    const auto par = run_benchmark(cfg);
    REQUIRE(par[0].ngap_pct == serial[0].ngap_pct);
    REQUIRE(par[0].dgap_pct == serial[0].dgap_pct);
  }
}

TEST_CASE("zero technology collapses both gaps", "[bench]") {
  BenchConfig cfg = small_config();
  cfg.zero_technology = true;
  const auto recs = run_benchmark(cfg);
  REQUIRE(!recs[0].aborted);
  REQUIRE(std::abs(recs[0].ngap_pct) <= 1e-4);
  REQUIRE(std::abs(recs[0].dgap_pct) <= 1e-4);
}

TEST_CASE("records follow the grid in declaration order", "[bench]") {
  BenchConfig cfg = small_config();
  cfg.n_values = {2, 3};
  cfg.h_values = {3.0, 4.0};
  cfg.runs = 1;
  cfg.seed_base = 11;
  const auto recs = run_benchmark(cfg);
  REQUIRE(recs.size() == 4);
  const Index expect_n[] = {2, 2, 3, 3};
  const double expect_h[] = {3.0, 4.0, 3.0, 4.0};
  for (size_t i = 0; i < recs.size(); ++i) {
    REQUIRE(recs[i].m1 == cfg.m1);
    REQUIRE(recs[i].m2 == cfg.m2);
    REQUIRE(recs[i].n1 == expect_n[i]);
    REQUIRE(recs[i].n2 == expect_n[i]);
    REQUIRE(recs[i].h_magnitude == expect_h[i]);
    REQUIRE(recs[i].seed_base == cfg.seed_base);
  }
}

TEST_CASE("hopeless cells abort instead of spinning", "[bench]") {
  BenchConfig cfg = small_config();
  // A grid this short can never cover the first-stage norm, even after the
  // in-run doubling retries; sharing the first stage makes every draw fail
  // the same way, so the cell gives up during warm-up.
  cfg.delta = 1e-9;
  cfg.k_max = 1;
  cfg.fixed_first_stage = true;
  std::ostringstream log;
  const auto recs = run_benchmark(cfg, &log);
  REQUIRE(recs.size() == 1);
  REQUIRE(recs[0].aborted);
  REQUIRE(recs[0].runs == 0);
  REQUIRE(std::isnan(recs[0].ngap_pct));
  REQUIRE(std::isnan(recs[0].dgap_pct));
  REQUIRE(std::isnan(recs[0].t_extensive_s));
  // The abort happened during warm-up, whose resamples are not counted.
  REQUIRE(recs[0].resample_events == 0);

  const std::string text = log.str();
  REQUIRE(text.find("# cell n1=3 h=3") != std::string::npos);
  REQUIRE(text.find("# grid too short") != std::string::npos);
  REQUIRE(text.find("# resample (run 0, seed ") != std::string::npos);
  REQUIRE(text.find("# cell aborted after 10 consecutive resamples") != std::string::npos);
}

TEST_CASE("CSV output round-trips bit for bit", "[bench]") {
  std::vector<BenchmarkRecord> recs(2);
  recs[0].m1 = 100;
  recs[0].n1 = 5;
  recs[0].m2 = 100;
  recs[0].n2 = 5;
  recs[0].h_magnitude = 2.0;
  recs[0].ngap_pct = 8.0999999999999996;
  recs[0].dgap_pct = 1.0 / 3.0;
  recs[0].t_extensive_s = 0.052341234;
  recs[0].t_decouple_s = 1e-300;
  recs[0].t_benders_s = 6.02e23;
  recs[0].runs = 50;
  recs[0].resample_events = 2;
  recs[1] = recs[0];
  recs[1].h_magnitude = 3.0;
  recs[1].aborted = true;
  recs[1].ngap_pct = recs[1].dgap_pct = std::numeric_limits<double>::quiet_NaN();
  recs[1].t_extensive_s = recs[1].t_decouple_s = recs[1].t_benders_s =
      std::numeric_limits<double>::quiet_NaN();
  recs[1].runs = 0;

  std::stringstream buf;
  write_csv(buf, recs);
  const auto back = parse_csv(buf);
  REQUIRE(back.size() == recs.size());
  for (size_t i = 0; i < recs.size(); ++i) {
    REQUIRE(back[i].m1 == recs[i].m1);
    REQUIRE(back[i].n1 == recs[i].n1);
    REQUIRE(back[i].m2 == recs[i].m2);
    REQUIRE(back[i].n2 == recs[i].n2);
    REQUIRE(back[i].h_magnitude == recs[i].h_magnitude);
    REQUIRE(back[i].runs == recs[i].runs);
    REQUIRE(back[i].resample_events == recs[i].resample_events);
    REQUIRE(back[i].aborted == recs[i].aborted);
    if (recs[i].aborted) {
      REQUIRE(std::isnan(back[i].ngap_pct));
    } else {
      REQUIRE(back[i].ngap_pct == recs[i].ngap_pct);
      REQUIRE(back[i].dgap_pct == recs[i].dgap_pct);
      REQUIRE(back[i].t_extensive_s == recs[i].t_extensive_s);
      REQUIRE(back[i].t_decouple_s == recs[i].t_decouple_s);
      REQUIRE(back[i].t_benders_s == recs[i].t_benders_s);
    }
  }
}

TEST_CASE("real numbers serialize shortest and reparse exactly", "[bench]") {
  for (double v : {0.0, 1.0, -1.0, 1.0 / 3.0, 8.1, 1e-300, 6.02e23, 0.052341234}) {
    const std::string s = detail::shortest_real(v);
    REQUIRE(detail::parse_real(s, "x") == v);
  }
  REQUIRE(detail::shortest_real(0.0) == "0");
  REQUIRE(detail::shortest_real(-0.0) == "0");
  REQUIRE(detail::shortest_real(8.1) == "8.1");
  REQUIRE(std::isnan(detail::parse_real(detail::shortest_real(
                         std::numeric_limits<double>::quiet_NaN()),
                     "x")));
}

TEST_CASE("CSV parse errors name the defect", "[bench]") {
  {
    std::stringstream buf("wrong,header\n");
    REQUIRE_THROWS_AS(parse_csv(buf), ParseError);
  }
  {
    std::stringstream buf;
    buf << kBenchCsvHeader << "\n100,5,100,5,2,1,1,1\n";
    try {
      parse_csv(buf);
      FAIL("expected ParseError");
    } catch (const ParseError& err) {
      REQUIRE(std::string(err.what()).find("line 2") != std::string::npos);
      REQUIRE(std::string(err.what()).find("8 fields") != std::string::npos);
    }
  }
  {
    std::stringstream buf;
    buf << kBenchCsvHeader << "\n100,5,100,5,2,abc,1,1,1,1,50,0\n";
    try {
      parse_csv(buf);
      FAIL("expected ParseError");
    } catch (const ParseError& err) {
      REQUIRE(std::string(err.what()).find("Ngap") != std::string::npos);
    }
  }
  {
    std::stringstream buf("");
    REQUIRE_THROWS_AS(parse_csv(buf), ParseError);
  }
}

TEST_CASE("table output labels aborted cells and footnotes timing", "[bench]") {
  std::vector<BenchmarkRecord> recs(1);
  recs[0].m1 = 100;
  recs[0].n1 = 5;
  recs[0].m2 = 100;
  recs[0].n2 = 5;
  recs[0].h_magnitude = 2.0;
  recs[0].aborted = true;
  std::ostringstream out;
  write_table(out, recs);
  REQUIRE(out.str().find("aborted after repeated assumption violations") != std::string::npos);
  REQUIRE(out.str().find("wall-clock") != std::string::npos);
}

TEST_CASE("benchmark configuration is validated", "[bench]") {
  BenchConfig cfg = small_config();
  cfg.runs = 0;
  REQUIRE_THROWS_AS(run_benchmark(cfg), std::invalid_argument);
  cfg = small_config();
  cfg.n_values.clear();
  REQUIRE_THROWS_AS(run_benchmark(cfg), std::invalid_argument);
  cfg = small_config();
  cfg.h_values.clear();
  REQUIRE_THROWS_AS(run_benchmark(cfg), std::invalid_argument);
}

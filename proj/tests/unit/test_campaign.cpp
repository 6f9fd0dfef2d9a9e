#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "ristrack/campaign.hpp"

using namespace ristrack;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("ristrack_test_" + name);
  fs::remove_all(p);
  return p;
}

LoadedConfig tiny(const fs::path& out, int parallel = 1) {
  LoadedConfig c = parse_config(R"({
    "scenario": {
      "ris": [
        {"rows": 6, "cols": 2, "spacing_wavelengths": 0.5, "position_m": [0, 15, 3]},
        {"rows": 6, "cols": 2, "spacing_wavelengths": 0.5, "position_m": [5, 0, 3]}],
      "timescale": {"episode_steps": 12, "steps_per_ris_update": 6},
      "optimizer": {"n_bcd": 3, "n_samples": 30, "pi_samples": 10}
    },
    "campaign": {"policies": ["OPT-AO", "FOCUS", "bOPT-AO"], "runs": 3, "seed": 77, "cdf_points": 11,
                 "rate_bins": 5}
  })");
  c.campaign.out = out.string();
  c.campaign.parallel = parallel;
  refresh_resolved(c);
  return c;
}

}  // namespace

TEST_CASE("splitmix64 reference outputs and run seeds") {
  std::uint64_t s = 0;
  CHECK(splitmix64(s) == 0xE220A8397B1DCDAFull);
  CHECK(splitmix64(s) == 0x6E789E6AA1B965F4ull);
  std::uint64_t m = 1234;
  const std::uint64_t first = splitmix64(m), second = splitmix64(m);
  CHECK(run_seed(1234, 0) == first);
  CHECK(run_seed(1234, 1) == second);
  CHECK(run_seed(1234, 1) != run_seed(1235, 1));
}

TEST_CASE("campaign artifacts are byte-identical across repeats and worker counts") {
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  const CampaignResult ra = run_campaign(tiny(a, 1));
  const CampaignResult rb = run_campaign(tiny(b, 2));
  CHECK(ra.successful_runs == 9);
  for (const char* pol : {"OPT-AO", "FOCUS", "bOPT-AO"}) {
    for (const char* f : {"stats.csv", "cdf.csv", "peb.csv", "rate_hist.csv", "trace.csv", "trajectory.csv"}) {
      CAPTURE(pol);
      CAPTURE(f);
      REQUIRE(fs::exists(a / pol / f));
      CHECK(slurp(a / pol / f) == slurp(b / pol / f));
    }
  }
  CHECK(slurp(a / "summary.csv") == slurp(b / "summary.csv"));
  const auto manifest = nlohmann::json::parse(slurp(a / "manifest.json"));
  CHECK(manifest["master_seed"] == 77);
  CHECK(manifest["runs"].size() == 3);
  CHECK(manifest["runs"][2]["seed"] == run_seed(77, 2));
  CHECK(manifest["config_hash"] == config_hash(tiny(a).resolved));
  CHECK(manifest["failures"].empty());
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("two policies give two stats files and summary rows") {
  const fs::path out = scratch("two");
  LoadedConfig c = tiny(out);
  c.campaign.policies = {Policy::kOptAo, Policy::kFocus};
  c.campaign.runs = 1;
  refresh_resolved(c);
  const CampaignResult r = run_campaign(c);
  CHECK(r.policies.size() == 2);
  CHECK(fs::exists(out / "OPT-AO" / "stats.csv"));
  CHECK(fs::exists(out / "FOCUS" / "stats.csv"));
  CHECK_FALSE(fs::exists(out / "bOPT-AO"));
  std::istringstream sum(slurp(out / "summary.csv"));
  std::string line;
  int rows = 0;
  while (std::getline(sum, line)) ++rows;
  CHECK(rows == 3);
  fs::remove_all(out);
}

TEST_CASE("the manifest alone reproduces a single run") {
  const fs::path out = scratch("replay");
  CampaignOptions keep;
  keep.keep_traces = true;
  const CampaignResult full = run_campaign(tiny(out), keep);
  LoadedConfig again = load_config((out / "manifest.json").string());
  again.campaign.out = (out / "single").string();
  refresh_resolved(again);
  CampaignOptions one = keep;
  one.only_run = 2;
  const CampaignResult single = run_campaign(again, one);
  REQUIRE(single.outcomes.size() == 3);
  for (std::size_t p = 0; p < 3; ++p) {
    const auto& ref = full.outcomes[p * 3 + 2];
    const auto& got = single.outcomes[p];
    CHECK(got.run == 2);
    REQUIRE(got.trace.steps.size() == ref.trace.steps.size());
    for (std::size_t t = 0; t < ref.trace.steps.size(); ++t) CHECK(got.trace.steps[t].error == ref.trace.steps[t].error);
  }
  fs::remove_all(out);
}

TEST_CASE("failing runs are logged; zero successes is an error") {
  const fs::path out = scratch("fail");
  LoadedConfig c = tiny(out);
  c.scenario.bs.n_rows = 2;
  c.scenario.bs.n_cols = 2;
  c.campaign.runs = 1;
  c.campaign.policies = {Policy::kFocus};
  refresh_resolved(c);
  std::ostringstream log;
  CampaignOptions opt;
  opt.log = &log;
  try {
    run_campaign(c, opt);
    FAIL("expected failure");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("bd-infeasible") != std::string::npos);
  }
  CHECK(log.str().find("failed") != std::string::npos);
  const auto manifest = nlohmann::json::parse(slurp(out / "manifest.json"));
  CHECK(manifest["failures"].size() == 1);
  fs::remove_all(out);
}

TEST_CASE("sweeps and power maps write their tables") {
  const fs::path out = scratch("sweep");
  LoadedConfig c = tiny(out);
  c.campaign.runs = 1;
  c.campaign.policies = {Policy::kFocus};
  c.campaign.sweep = SweepSpec{"ris_period_s", {0.09, 0.18}};
  refresh_resolved(c);
  const auto results = run_sweep(c);
  CHECK(results.size() == 2);
  CHECK(fs::exists(out / "ris_period_s=0.09" / "FOCUS" / "cdf.csv"));
  const std::string table = slurp(out / "sweep.csv");
  CHECK(table.find("ris_period_s,0.18,FOCUS") != std::string::npos);

  LoadedConfig m = tiny(out / "maps");
  m.campaign.policies = {Policy::kOptAo, Policy::kFocus};
  m.campaign.map = MapSpec{GridSpec{10.0, 20.0, 3, 5.0, 25.0, 4, 1.0}, -1};
  refresh_resolved(m);
  run_power_maps(m);
  const std::string map = slurp(out / "maps" / "FOCUS" / "powermap.csv");
  CHECK(map.rfind("x,y,dBW,watts\n", 0) == 0);
  CHECK(std::count(map.begin(), map.end(), '\n') == 13);
  fs::remove_all(out);
}

TEST_CASE("sweep parameters") {
  Scenario s = default_scenario();
  set_sweep_parameter(s, "ris_period_s", 1.5);
  CHECK(s.timescale.steps_per_ris_update == 50);
  set_sweep_parameter(s, "rice_ris", 100.0);
  CHECK(s.rf.rice_ris == 100.0);
  set_sweep_parameter(s, "orientation_error_std_deg", 2.0);
  CHECK(s.ue.orientation_error_std_deg == 2.0);
  CHECK_THROWS_AS(set_sweep_parameter(s, "carrier", 1.0), Error);
}

TEST_CASE("paired bootstrap") {
  const std::vector<double> a{1.0, 2.0, 3.0, 4.0}, b{0.5, 1.5, 2.5, 3.5};
  const BootstrapInterval ci = paired_bootstrap(a, b, 2000, 0.95, 1);
  CHECK(ci.mean == doctest::Approx(0.5));
  CHECK(ci.lo == doctest::Approx(0.5));
  CHECK(ci.hi == doctest::Approx(0.5));
  std::vector<double> x, y;
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int i = 0; i < 400; ++i) {
    x.push_back(n(rng));
    y.push_back(x.back() + 0.3 + 0.1 * n(rng));
  }
  const BootstrapInterval d = paired_bootstrap(y, x, 4000, 0.95, 3);
  CHECK(d.lo < 0.3);
  CHECK(d.hi > 0.3);
  CHECK(d.hi - d.lo < 0.05);
  CHECK_THROWS_AS(paired_bootstrap(a, {1.0}, 10, 0.95, 1), Error);
}

TEST_CASE("steady-state ratio") {
  PolicySummary s;
  s.step_rmse = {10.0, 2.0, 2.0};
  s.step_peb = {1.0, 1.0, 1.0};
  CHECK(steady_state_ratio(s, 1) == doctest::Approx(2.0));
}

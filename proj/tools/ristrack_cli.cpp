// ristrack: campaign driver for the RIS-aided tracking simulator.
//
//   ristrack run   --config configs/desk.json --out out/desk
//   ristrack sweep --config configs/desk.json --param ris_period_s --values 0.5,1,3
//   ristrack map   --config configs/fig3.json
//   ristrack peb   --config configs/default.json --policies OPT-AO
//
// A manifest.json written by `run` is itself a valid --config; with
// --run-index it reproduces a single trace.

#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ristrack/campaign.hpp"
#include "ristrack/format.hpp"

using namespace ristrack;

namespace {

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> runs;
  std::vector<std::string> policies;
  std::optional<int> parallel;
  int run_index = -1;
  bool quiet = false;
};

void add_common(CLI::App* app, CommonFlags& f) {
  app->add_option("--config", f.config, "JSON config or campaign manifest")->check(CLI::ExistingFile);
  app->add_option("--seed", f.seed, "master seed");
  app->add_option("--out", f.out, "output directory");
  app->add_option("--runs", f.runs, "Monte Carlo runs per policy")->check(CLI::PositiveNumber);
  app->add_option("--policies", f.policies, "comma-separated policy list (OPT, OPT-AO, bOPT, bOPT-AO, FOCUS, bFOCUS)")
      ->delimiter(',');
  app->add_option("--parallel", f.parallel, "worker threads")->check(CLI::PositiveNumber);
  app->add_option("--run-index", f.run_index, "simulate this run index alone")->check(CLI::NonNegativeNumber);
  app->add_flag("-q,--quiet", f.quiet, "no progress output");
}

LoadedConfig resolve(const CommonFlags& f) {
  LoadedConfig cfg = f.config.empty() ? parse_config("{}", "<defaults>") : load_config(f.config);
  auto& c = cfg.campaign;
  if (f.seed) c.seed = *f.seed;
  if (f.out) c.out = *f.out;
  if (f.runs) c.runs = *f.runs;
  if (f.parallel) c.parallel = *f.parallel;
  if (!f.policies.empty()) {
    c.policies.clear();
    for (const auto& p : f.policies) c.policies.push_back(parse_policy(p));
  }
  if (f.run_index >= c.runs) {
    throw Error(ErrorKind::kInvalidConfig, "--run-index " + std::to_string(f.run_index) +
                                               " is outside the " + std::to_string(c.runs) + " configured runs");
  }
  refresh_resolved(cfg);
  return cfg;
}

CampaignOptions options_for(const CommonFlags& f) {
  CampaignOptions o;
  o.log = f.quiet ? nullptr : &std::cerr;
  o.only_run = f.run_index;
  return o;
}

void print_summary(const CampaignResult& r) {
  write_summary_header(std::cout);
  for (const auto& s : r.policies) write_summary_row(std::cout, s);
}

std::vector<double> parse_values(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item == "inf") {
      out.push_back(std::numeric_limits<double>::infinity());
    } else {
      std::size_t used = 0;
      const double v = std::stod(item, &used);
      if (used != item.size()) throw Error(ErrorKind::kInvalidConfig, "bad sweep value '" + item + "'");
      out.push_back(v);
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RIS-aided near-field UE tracking simulator"};
  app.require_subcommand(1);

  CommonFlags run_f, sweep_f, map_f, peb_f;
  auto* run = app.add_subcommand("run", "Monte Carlo campaign over the configured policies");
  add_common(run, run_f);

  auto* sweep = app.add_subcommand("sweep", "one campaign per value of a scenario parameter");
  add_common(sweep, sweep_f);
  std::string param, values;
  sweep->add_option("--param", param, "dt_s | steps_per_ris_update | ris_period_s | rice_ris | orientation_error_std_deg");
  sweep->add_option("--values", values, "comma-separated values");

  auto* map = app.add_subcommand("map", "received-power maps of the t = 0 profiles");
  add_common(map, map_f);

  auto* peb = app.add_subcommand("peb", "RMSE against the posterior bound per step");
  add_common(peb, peb_f);
  int skip = 10;
  peb->add_option("--skip", skip, "initial steps excluded from the steady-state ratio");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      LoadedConfig cfg = resolve(run_f);
      const CampaignResult r = run_campaign(cfg, options_for(run_f));
      print_summary(r);
    } else if (sweep->parsed()) {
      LoadedConfig cfg = resolve(sweep_f);
      if (!param.empty() || !values.empty()) {
        if (param.empty() || values.empty()) {
          throw Error(ErrorKind::kInvalidConfig, "--param and --values go together");
        }
        cfg.campaign.sweep = SweepSpec{param, parse_values(values)};
        refresh_resolved(cfg);
      }
      const auto results = run_sweep(cfg, options_for(sweep_f));
      std::cout << "wrote " << results.size() << " sweep points under " << cfg.campaign.out << '\n';
    } else if (map->parsed()) {
      LoadedConfig cfg = resolve(map_f);
      run_power_maps(cfg, options_for(map_f));
    } else if (peb->parsed()) {
      LoadedConfig cfg = resolve(peb_f);
      cfg.campaign.record_peb = true;
      refresh_resolved(cfg);
      const CampaignResult r = run_campaign(cfg, options_for(peb_f));
      std::cout << "policy,steady_rmse_over_peb\n";
      for (const auto& s : r.policies) {
        std::cout << to_string(s.policy) << ',' << format_double(steady_state_ratio(s, skip)) << '\n';
      }
    }
  } catch (const Error& e) {
    std::cerr << "ristrack: " << e.what() << '\n';
    return e.kind() == ErrorKind::kInvalidConfig || e.kind() == ErrorKind::kParse ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "ristrack: " << e.what() << '\n';
    return 1;
  }
  return EXIT_SUCCESS;
}

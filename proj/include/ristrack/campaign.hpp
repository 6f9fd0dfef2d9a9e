#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ristrack/config.hpp"

namespace ristrack {

// splitmix64 step: advances `state` and returns the mixed output.
std::uint64_t splitmix64(std::uint64_t& state);

// Seed of run r: the (r+1)-th splitmix64 output of a generator started at
// the master seed. Every policy uses the same run seeds.
std::uint64_t run_seed(std::uint64_t master_seed, int run);

struct RunOutcome {
  Policy policy = Policy::kOptAo;
  int run = 0;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  EpisodeTrace trace;
};

struct PolicySummary {
  Policy policy = Policy::kOptAo;
  int runs_ok = 0;
  int runs_failed = 0;
  int diverged = 0;
  ErrorStats stats;
  std::vector<double> run_mean_errors;  // per successful run, run order
  double mean_rate = 0.0;
  double rms_peb = 0.0;
  std::vector<double> step_rmse;  // across runs, per step
  std::vector<double> step_peb;   // root-mean-square across runs, per step
};

struct CampaignResult {
  std::vector<PolicySummary> policies;
  std::vector<RunOutcome> outcomes;  // policy-major, run order
  int successful_runs = 0;
  nlohmann::json manifest;
};

struct CampaignOptions {
  bool write = true;          // write artifacts under campaign.out
  bool keep_traces = false;   // keep full traces in CampaignResult::outcomes
  std::ostream* log = nullptr;
  int only_run = -1;          // >= 0: simulate that run index alone
};

// Runs every (policy, run) pair and writes:
//   manifest.json, summary.csv, and per policy <out>/<POLICY>/
//   stats.csv, cdf.csv, peb.csv, rate_hist.csv, trace.csv, trajectory.csv
// Per-run failures are logged and skipped.
CampaignResult run_campaign(const LoadedConfig& config, const CampaignOptions& options = {});

// One campaign per sweep value under <out>/<parameter>=<value>/, plus
// <out>/sweep.csv with one row per (value, policy).
std::vector<CampaignResult> run_sweep(const LoadedConfig& config, const CampaignOptions& options = {});

// Profiles each policy would apply at t = 0 from the configured initial
// state, rendered as received-power maps in <out>/<POLICY>/powermap.csv.
void run_power_maps(const LoadedConfig& config, const CampaignOptions& options = {});

// Sets one sweepable parameter on a scenario.
void set_sweep_parameter(Scenario& scenario, const std::string& parameter, double value);

// Steady-state RMSE / PEB over steps after `skip`.
double steady_state_ratio(const PolicySummary& summary, int skip);

// Percentile-bootstrap interval of mean(a - b) over paired entries.
struct BootstrapInterval {
  double mean = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};
BootstrapInterval paired_bootstrap(const std::vector<double>& a, const std::vector<double>& b,
                                   int resamples, double confidence, std::uint64_t seed);

void write_summary_header(std::ostream& os);
void write_summary_row(std::ostream& os, const PolicySummary& s);

}  // namespace ristrack

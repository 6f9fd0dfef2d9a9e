#include "ristrack/campaign.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "ristrack/format.hpp"

namespace ristrack {

namespace fs = std::filesystem;
using nlohmann::json;

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::uint64_t run_seed(std::uint64_t master_seed, int run) {
  std::uint64_t state = master_seed + static_cast<std::uint64_t>(run) * 0x9E3779B97F4A7C15ull;
  return splitmix64(state);
}

namespace {

std::ofstream open_out(const fs::path& path) {
  fs::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorKind::kIo, "cannot write '" + path.string() + "'");
  return os;
}

void log_line(const CampaignOptions& opt, std::mutex& mu, const std::string& msg) {
  if (!opt.log) return;
  std::lock_guard<std::mutex> lock(mu);
  *opt.log << msg << '\n';
}

PolicySummary summarize(Policy policy, const std::vector<const RunOutcome*>& runs, int cdf_points) {
  PolicySummary s;
  s.policy = policy;
  std::vector<EpisodeTrace> ok;
  std::size_t steps = 0;
  for (const RunOutcome* r : runs) {
    if (!r->ok) {
      ++s.runs_failed;
      continue;
    }
    ++s.runs_ok;
    if (r->trace.diverged) ++s.diverged;
    ok.push_back(r->trace);
    steps = std::max(steps, r->trace.steps.size());
  }
  if (ok.empty()) return s;
  s.stats = error_stats(ok, cdf_points);
  double rate = 0.0, peb2 = 0.0;
  std::size_t n = 0;
  s.step_rmse.assign(steps, 0.0);
  s.step_peb.assign(steps, 0.0);
  std::vector<int> counts(steps, 0);
  for (const auto& tr : ok) {
    double run_sum = 0.0;
    for (std::size_t t = 0; t < tr.steps.size(); ++t) {
      const auto& st = tr.steps[t];
      run_sum += st.error;
      rate += st.rate;
      peb2 += st.peb * st.peb;
      s.step_rmse[t] += st.error * st.error;
      s.step_peb[t] += st.peb * st.peb;
      ++counts[t];
      ++n;
    }
    s.run_mean_errors.push_back(tr.steps.empty() ? 0.0 : run_sum / tr.steps.size());
  }
  for (std::size_t t = 0; t < steps; ++t) {
    s.step_rmse[t] = std::sqrt(s.step_rmse[t] / counts[t]);
    s.step_peb[t] = std::sqrt(s.step_peb[t] / counts[t]);
  }
  s.mean_rate = n ? rate / n : 0.0;
  s.rms_peb = n ? std::sqrt(peb2 / n) : 0.0;
  return s;
}

void write_rate_hist(std::ostream& os, const std::vector<const RunOutcome*>& runs, int bins) {
  std::vector<double> rates;
  for (const RunOutcome* r : runs) {
    if (!r->ok) continue;
    for (const auto& st : r->trace.steps) rates.push_back(st.rate);
  }
  os << "rate_low,rate_high,count\n";
  if (rates.empty()) return;
  const auto [mn, mx] = std::minmax_element(rates.begin(), rates.end());
  const double lo = *mn;
  const double width = *mx > lo ? (*mx - lo) / bins : 1.0;
  std::vector<long> count(bins, 0);
  for (double r : rates) {
    int b = static_cast<int>((r - lo) / width);
    count[std::clamp(b, 0, bins - 1)]++;
  }
  for (int b = 0; b < bins; ++b) {
    os << format_double(lo + b * width) << ',' << format_double(lo + (b + 1) * width) << ','
       << count[b] << '\n';
  }
}

void write_trajectory(std::ostream& os, const EpisodeTrace& tr) {
  os << "step,x,y,z,x_hat,y_hat,z_hat,error,received_power_w\n";
  for (const auto& st : tr.steps) {
    os << st.step;
    for (int i = 0; i < 3; ++i) os << ',' << format_double(st.truth(i));
    for (int i = 0; i < 3; ++i) os << ',' << format_double(st.estimate(i));
    os << ',' << format_double(st.error) << ',' << format_double(st.ris_power.sum()) << '\n';
  }
}

std::string value_label(double v) {
  return std::isinf(v) ? std::string("inf") : format_double(v);
}

}  // namespace

void write_summary_header(std::ostream& os) {
  os << "policy,runs_ok,runs_failed,diverged,samples,mean_m,rmse_m,q90_m,q99_m,mean_rate_bps_hz,"
        "rms_peb_m\n";
}

void write_summary_row(std::ostream& os, const PolicySummary& s) {
  os << to_string(s.policy) << ',' << s.runs_ok << ',' << s.runs_failed << ',' << s.diverged << ','
     << s.stats.sorted.size() << ',' << format_double(s.stats.mean) << ','
     << format_double(s.stats.rmse) << ',' << format_double(s.stats.q90) << ','
     << format_double(s.stats.q99) << ',' << format_double(s.mean_rate) << ','
     << format_double(s.rms_peb) << '\n';
}

CampaignResult run_campaign(const LoadedConfig& config, const CampaignOptions& options) {
  const Scenario& sc = config.scenario;
  const CampaignConfig& cc = config.campaign;
  const ChannelModel model(sc);

  std::vector<int> run_ids;
  if (options.only_run >= 0) {
    run_ids.push_back(options.only_run);
  } else {
    for (int r = 0; r < cc.runs; ++r) run_ids.push_back(r);
  }
  const int n_runs = static_cast<int>(run_ids.size());
  const int n_jobs = n_runs * static_cast<int>(cc.policies.size());

  CampaignResult result;
  result.outcomes.resize(n_jobs);
  for (int j = 0; j < n_jobs; ++j) {
    auto& o = result.outcomes[j];
    o.policy = cc.policies[j / n_runs];
    o.run = run_ids[j % n_runs];
    o.seed = run_seed(cc.seed, o.run);
  }

  std::atomic<int> next{0};
  std::mutex log_mu;
  EpisodeOptions ep;
  ep.record_rate = cc.record_rate;
  ep.record_peb = cc.record_peb;
  auto worker = [&]() {
    for (int j = next++; j < n_jobs; j = next++) {
      auto& o = result.outcomes[j];
      try {
        Rng rng(o.seed);
        o.trace = run_episode(model, o.policy, rng, ep);
        o.ok = true;
      } catch (const std::exception& e) {
        o.ok = false;
        o.error = e.what();
        log_line(options, log_mu,
                 std::string("run ") + std::to_string(o.run) + " (" + to_string(o.policy) +
                     ") failed: " + e.what());
      }
    }
  };
  const int threads = std::max(1, std::min(cc.parallel, n_jobs));
  std::vector<std::thread> pool;
  for (int i = 1; i < threads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  for (std::size_t p = 0; p < cc.policies.size(); ++p) {
    std::vector<const RunOutcome*> runs;
    for (int r = 0; r < n_runs; ++r) runs.push_back(&result.outcomes[p * n_runs + r]);
    result.policies.push_back(summarize(cc.policies[p], runs, cc.cdf_points));
    result.successful_runs += result.policies.back().runs_ok;
  }

  json manifest;
  manifest["tool"] = "ristrack";
  manifest["config_hash"] = config_hash(config.resolved);
  manifest["master_seed"] = cc.seed;
  manifest["seed_rule"] =
      "run r uses the (r+1)-th splitmix64 output of a generator seeded with master_seed, shared by "
      "every policy; the first two draws of that seed feed the environment and algorithm streams";
  manifest["runs"] = json::array();
  for (int r : run_ids) manifest["runs"].push_back({{"run", r}, {"seed", run_seed(cc.seed, r)}});
  manifest["failures"] = json::array();
  for (const auto& o : result.outcomes) {
    if (!o.ok) {
      manifest["failures"].push_back({{"policy", to_string(o.policy)}, {"run", o.run}, {"error", o.error}});
    }
  }
  manifest["successful_runs"] = result.successful_runs;
  manifest["config"] = config.resolved;
  result.manifest = manifest;

  if (options.write) {
    const fs::path out(cc.out);
    {
      auto os = open_out(out / "manifest.json");
      os << manifest.dump(2) << '\n';
    }
    {
      auto os = open_out(out / "summary.csv");
      write_summary_header(os);
      for (const auto& s : result.policies) write_summary_row(os, s);
    }
    for (std::size_t p = 0; p < cc.policies.size(); ++p) {
      const PolicySummary& s = result.policies[p];
      const fs::path dir = out / to_string(s.policy);
      std::vector<const RunOutcome*> runs;
      for (int r = 0; r < n_runs; ++r) runs.push_back(&result.outcomes[p * n_runs + r]);
      {
        auto os = open_out(dir / "stats.csv");
        write_summary_header(os);
        write_summary_row(os, s);
      }
      {
        auto os = open_out(dir / "cdf.csv");
        write_cdf_csv(os, s.stats);
      }
      if (cc.record_peb) {
        auto os = open_out(dir / "peb.csv");
        write_peb_csv(os, s.step_rmse, s.step_peb);
      }
      if (cc.record_rate) {
        auto os = open_out(dir / "rate_hist.csv");
        write_rate_hist(os, runs, cc.rate_bins);
      }
      if (cc.write_traces) {
        auto os = open_out(dir / "trace.csv");
        write_trace_header(os, sc.num_ris());
        for (const RunOutcome* r : runs) {
          if (r->ok) write_trace_rows(os, r->trace, r->run);
        }
        const auto first = std::find_if(runs.begin(), runs.end(), [](const RunOutcome* r) { return r->ok; });
        if (first != runs.end()) {
          auto tj = open_out(dir / "trajectory.csv");
          write_trajectory(tj, (*first)->trace);
        }
      }
    }
  }

  if (!options.keep_traces) {
    for (auto& o : result.outcomes) o.trace = EpisodeTrace{};
  }
  if (result.successful_runs == 0) {
    std::string first;
    for (const auto& o : result.outcomes) {
      if (!o.ok) {
        first = o.error;
        break;
      }
    }
    throw Error(ErrorKind::kNumericDegenerate, "campaign produced no successful run (first failure: " + first + ")");
  }
  return result;
}

void set_sweep_parameter(Scenario& sc, const std::string& parameter, double value) {
  if (parameter == "dt_s") {
    sc.timescale.dt_s = value;
  } else if (parameter == "steps_per_ris_update") {
    sc.timescale.steps_per_ris_update = static_cast<int>(std::lround(value));
  } else if (parameter == "ris_period_s") {
    sc.timescale.steps_per_ris_update = static_cast<int>(std::lround(value / sc.timescale.dt_s));
  } else if (parameter == "rice_ris") {
    sc.rf.rice_ris = value;
  } else if (parameter == "orientation_error_std_deg") {
    sc.ue.orientation_error_std_deg = value;
  } else {
    throw Error(ErrorKind::kInvalidConfig, "unknown sweep parameter '" + parameter + "'");
  }
  validate(sc);
}

std::vector<CampaignResult> run_sweep(const LoadedConfig& config, const CampaignOptions& options) {
  if (!config.campaign.sweep) throw Error(ErrorKind::kInvalidConfig, "no sweep section in the config");
  const SweepSpec& sw = *config.campaign.sweep;
  std::vector<CampaignResult> results;
  std::ostringstream table;
  table << "parameter,value,";
  write_summary_header(table);
  for (double v : sw.values) {
    LoadedConfig point = config;
    set_sweep_parameter(point.scenario, sw.parameter, v);
    point.campaign.sweep.reset();
    point.campaign.out = (fs::path(config.campaign.out) / (sw.parameter + "=" + value_label(v))).string();
    refresh_resolved(point);
    if (options.log) *options.log << "sweep " << sw.parameter << " = " << value_label(v) << '\n';
    results.push_back(run_campaign(point, options));
    for (const auto& s : results.back().policies) {
      table << sw.parameter << ',' << value_label(v) << ',';
      write_summary_row(table, s);
    }
  }
  if (options.write) {
    auto os = open_out(fs::path(config.campaign.out) / "sweep.csv");
    os << table.str();
  }
  return results;
}

void run_power_maps(const LoadedConfig& config, const CampaignOptions& options) {
  Scenario sc = config.scenario;
  sc.timescale.episode_steps = 1;
  const ChannelModel model(sc);
  MapSpec spec;
  if (config.campaign.map) {
    spec = *config.campaign.map;
  } else {
    spec.grid = GridSpec{sc.workspace.x_min, sc.workspace.x_max, 41,
                         sc.workspace.y_min, sc.workspace.y_max, 61, sc.workspace.z};
  }
  const double beta2 = sc.rf.pilot_power_w / sc.num_ris();
  for (Policy p : config.campaign.policies) {
    Rng rng(run_seed(config.campaign.seed, 0));
    EpisodeOptions ep;
    ep.record_peb = false;
    ep.record_rate = false;
    const EpisodeTrace tr = run_episode(model, p, rng, ep);
    const RisUpdateRecord& u = tr.updates.front();
    PowerMap total;
    for (int k = 0; k < sc.num_ris(); ++k) {
      if (spec.ris >= 0 && k != spec.ris) continue;
      PowerMap m = power_map(spec.grid, model, k, u.profiles[k], u.beams[k], beta2);
      if (total.watts.empty()) {
        total = std::move(m);
      } else {
        for (std::size_t i = 0; i < total.watts.size(); ++i) total.watts[i] += m.watts[i];
      }
    }
    if (options.write) {
      auto os = open_out(fs::path(config.campaign.out) / to_string(p) / "powermap.csv");
      write_powermap_csv(os, total);
    }
    if (options.log) *options.log << "power map written for " << to_string(p) << '\n';
  }
}

double steady_state_ratio(const PolicySummary& s, int skip) {
  double num = 0.0, den = 0.0;
  for (std::size_t t = std::max(0, skip); t < s.step_rmse.size(); ++t) {
    num += s.step_rmse[t] * s.step_rmse[t];
    den += s.step_peb[t] * s.step_peb[t];
  }
  return den > 0.0 ? std::sqrt(num / den) : std::numeric_limits<double>::quiet_NaN();
}

BootstrapInterval paired_bootstrap(const std::vector<double>& a, const std::vector<double>& b,
                                   int resamples, double confidence, std::uint64_t seed) {
  if (a.size() != b.size() || a.empty()) {
    throw Error(ErrorKind::kInvalidConfig, "paired bootstrap needs two equal non-empty samples");
  }
  const std::size_t n = a.size();
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = a[i] - b[i];
  BootstrapInterval out;
  for (double x : d) out.mean += x;
  out.mean /= n;
  Rng rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::vector<double> means(resamples);
  for (int r = 0; r < resamples; ++r) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += d[pick(rng)];
    means[r] = s / n;
  }
  std::sort(means.begin(), means.end());
  const double tail = 0.5 * (1.0 - confidence);
  out.lo = quantile_sorted(means, tail);
  out.hi = quantile_sorted(means, 1.0 - tail);
  return out;
}

}  // namespace ristrack

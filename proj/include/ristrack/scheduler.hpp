#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ristrack/metrics.hpp"
#include "ristrack/power_allocator.hpp"
#include "ristrack/precoding.hpp"
#include "ristrack/ris_optimizer.hpp"
#include "ristrack/tracker.hpp"

namespace ristrack {

enum class Policy { kOpt, kOptAo, kBetaOpt, kBetaOptAo, kFocus, kBetaFocus, kExternal };

const char* to_string(Policy policy);
// Accepts OPT, OPT-AO, bOPT / betaOPT, bOPT-AO, FOCUS, bFOCUS, EXTERNAL-PROFILE
// (case-insensitive). Throws kInvalidConfig otherwise.
Policy parse_policy(const std::string& name);
bool allocates_power(Policy policy);

// Equal-weight mixture of the position marginals after q = 1..n_r prediction
// steps from (m, Sigma).
UncertaintyDensity build_uncertainty_gmm(const TrackState& state, const MotionModel& model,
                                         int n_r);

struct StepRecord {
  int step = 0;          // 1-based: state after the step-th measurement
  Vec6 truth = Vec6::Zero();
  Vec6 estimate = Vec6::Zero();
  Vec6 sigma_diag = Vec6::Zero();
  double error = 0.0;    // |p_hat - p|
  VecX ris_power;        // |useful term|^2 per antenna, per RIS (W)
  VecX beta;             // sqrt(W)
  VecX r_blocks;         // R~ value per RIS
  double rate = 0.0;     // bits/s/Hz
  double peb = 0.0;
  bool measurement_used = true;
};

struct RisUpdateRecord {
  int step = 0;  // profiles applied from this step on
  std::vector<CVec> profiles;
  std::vector<CVec> beams;  // unit BS beams the profiles were designed for
  std::vector<double> mean_inverse_power;
  std::vector<std::vector<double>> half_steps;
};

struct EpisodeTrace {
  Policy policy = Policy::kOptAo;
  std::vector<StepRecord> steps;
  std::vector<RisUpdateRecord> updates;
  bool diverged = false;

  std::vector<double> errors() const;
};

// Supplies RIS profiles for the EXTERNAL-PROFILE policy at every RIS update.
using ExternalProfileFn = std::function<std::vector<CVec>(
    int step, const UncertaintyDensity& density, const std::vector<CVec>& beams)>;

struct EpisodeOptions {
  ExternalProfileFn external;
  std::optional<Vec6> initial_state;  // overrides the scenario's initial state
  bool record_rate = true;
  bool record_peb = true;
};

EpisodeTrace run_episode(const ChannelModel& model, Policy policy, Rng& rng,
                         const EpisodeOptions& options = {});

// Initial truth drawn per the scenario (uniform in the workspace with a random
// heading, or the fixed state).
Vec6 draw_initial_state(const Scenario& scenario, Rng& rng);

// Pool step errors of several traces.
ErrorStats error_stats(const std::vector<EpisodeTrace>& traces, int grid_points = 201);

void write_trace_header(std::ostream& os, int num_ris);
void write_trace_rows(std::ostream& os, const EpisodeTrace& trace, int run);

}  // namespace ristrack

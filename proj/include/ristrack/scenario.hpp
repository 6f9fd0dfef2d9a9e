#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "ristrack/geometry.hpp"

namespace ristrack {

// Link-level RF parameters for one narrowband subcarrier.
struct RfConfig {
  double carrier_hz = 28e9;
  double subcarrier_bandwidth_hz = 120e3;
  double noise_density_dbm_hz = -174.0;
  double noise_figure_db = 7.0;
  double total_tx_power_w = 0.19952623149688797;  // 23 dBm
  double pilot_power_w = 0.06e-3;                  // per-subcarrier pilot share
  int pilot_length = 100;
  double rice_direct = 0.0;  // kappa_h
  double rice_ris = 5.0;     // kappa_b; +inf means pure LOS

  double wavelength() const { return kSpeedOfLight / carrier_hz; }
  double wavenumber() const { return 2.0 * kPi / wavelength(); }
};

struct MotionConfig {
  Vec3 accel_variance = Vec3(0.5, 0.5, 0.0);  // m^2/s^3
};

struct TimescaleConfig {
  double dt_s = 0.03;
  int steps_per_ris_update = 100;  // N_r; 0 disables re-optimisation after t = 0
  int episode_steps = 400;

  double ris_period_s() const { return dt_s * steps_per_ris_update; }
};

// Noise numerator used by the observation-noise estimate: the pre-projection
// sigma^2 (verbatim model) or the post-projection floor sigma^2 / L.
enum class NoiseNumerator { kPreProjection, kPostProjection };

enum class JacobianMode { kExact, kNormalizedAmplitude };

// Noise covariance fed to the posterior bound: the physical post-projection
// phase noise (sigma^2 / L over the noiseless received power at the true
// position) or the same estimate the filter uses.
enum class PebNoise { kPhysical, kFilterEstimate };

struct TrackerConfig {
  double alpha = 0.5;
  NoiseNumerator noise_numerator = NoiseNumerator::kPostProjection;
  JacobianMode jacobian = JacobianMode::kExact;
  PebNoise peb_noise = PebNoise::kPhysical;
};

// Profile in place before the first RIS optimisation of an episode.
enum class InitialProfile { kFocus, kUnit };

struct OptimizerConfig {
  int n_bcd = 20;
  int n_samples = 500;
  double m_factor = 100.0;        // M
  double early_stop_rel = 1e-6;
  int ao_sweeps = 1;              // element sweeps per BCD iteration
  int pgd_max_iter = 5000;
  double pgd_tol = 1e-8;
  int pi_samples = 100;           // per-step draws for the power-allocation weights
  InitialProfile initial_profile = InitialProfile::kFocus;  // focus at m_0, or all ones
};

struct PowerConfig {
  double beta_floor_ratio = 1e-6;  // floor as a fraction of sqrt(P_tx / K)
};

enum class OrientationErrorMode { kPerStep, kPerEpisode };

// Region the UE starts in and moves through; z is held fixed.
struct Workspace {
  double x_min = 10.0, x_max = 30.0;
  double y_min = 0.0, y_max = 30.0;
  double z = 1.0;
  bool reflect = false;  // truth trajectory bounces off the boundary when set

  double diameter() const { return std::hypot(x_max - x_min, y_max - y_min); }
};

struct InitialState {
  bool random = true;            // draw position uniformly in the workspace
  Vec3 position = Vec3(3.0, 15.0, 1.0);
  Vec3 velocity = Vec3(0.0, 1.0, 0.0);
  double speed_mps = 1.0;        // random heading with this speed when random
};

struct Scenario {
  RfConfig rf;
  RadiationPattern pattern;
  ArraySpec bs;
  std::vector<ArraySpec> ris;
  ArraySpec ue;  // layout only; reference_position is replaced by the UE position
  MotionConfig motion;
  TimescaleConfig timescale;
  TrackerConfig tracker;
  OptimizerConfig optimizer;
  PowerConfig power;
  Workspace workspace;
  InitialState initial;
  OrientationErrorMode orientation_mode = OrientationErrorMode::kPerStep;

  int num_ris() const { return static_cast<int>(ris.size()); }
  int n_tx() const { return bs.size(); }
  int n_rx() const { return ue.size(); }
};

// Default indoor scenario: BS 16x2 URA at [30,15,2], three 80x5 RISs on the
// YZ plane, 4-element horizontal ULA at the UE.
Scenario default_scenario();

// Throws kInvalidConfig listing every violated invariant.
void validate(const Scenario& scenario);

}  // namespace ristrack

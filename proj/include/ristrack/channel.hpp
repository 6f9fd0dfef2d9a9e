#pragma once

#include <random>
#include <vector>

#include "ristrack/scenario.hpp"

namespace ristrack {

using Rng = std::mt19937_64;

// sigma^2 in watts from noise density (dBm/Hz), noise figure (dB) and bandwidth.
double noise_power(double noise_density_dbm_hz, double noise_figure_db, double bandwidth_hz);

inline double noise_power(const RfConfig& rf) {
  return noise_power(rf.noise_density_dbm_hz, rf.noise_figure_db, rf.subcarrier_bandwidth_hz);
}

// Circularly-symmetric complex Gaussian with E|z|^2 = variance.
cd complex_gaussian(Rng& rng, double variance);

// Distance |base + offset - target| and exp(-j k0 d), with the distance and
// phase reduction carried out in extended precision so that phases of large
// k0 d stay accurate to about 1e-15 rad.
struct LosHop {
  double distance;
  cd phasor;
};
LosHop los_hop(const Vec3& base, const Vec3& offset, const Vec3& target, double k0);

// LOS / scattered weights sqrt(k/(k+1)) and sqrt(1/(k+1)); k = +inf is pure LOS.
double rice_los_weight(double kappa);
double rice_nlos_weight(double kappa);

// One realisation of every link for a single UE placement and fading draw.
struct ChannelSet {
  CMat H;                     // N_RX x N_TX direct link
  std::vector<CMat> G;        // per RIS, P x N_TX (deterministic LOS)
  std::vector<CMat> B;        // per RIS, N_RX x P (Rician)
  std::vector<CMat> B_los;    // per RIS, LOS part of B including the Rice weight
  std::vector<MatX> rho_bs;   // per RIS, |LOS amplitude| of G, P x N_TX
  std::vector<MatX> rho_ue;   // per RIS, LOS amplitude of B (without Rice weight), N_RX x P
  double gamma = 0.0;         // direct-link amplitude

  int num_ris() const { return static_cast<int>(G.size()); }
};

// Caches array layouts and the static BS-RIS channels of a scenario.
class ChannelModel {
 public:
  explicit ChannelModel(Scenario scenario);

  const Scenario& scenario() const { return scenario_; }
  int num_ris() const { return scenario_.num_ris(); }
  double wavelength() const { return lambda_; }

  const std::vector<Vec3>& bs_elements() const { return bs_elements_; }
  const std::vector<Vec3>& ris_elements(int k) const { return ris_elements_[k]; }
  const Vec3& ris_normal(int k) const { return ris_normals_[k]; }
  const CMat& bs_ris(int k) const { return G_[k]; }
  const MatX& bs_ris_amplitude(int k) const { return rho_bs_[k]; }

  // UE element positions centred on `position`, optionally yawed by `yaw_error`.
  std::vector<Vec3> ue_elements(const Vec3& position, double yaw_error = 0.0) const;

  // LOS amplitude rho_{k,r,p} (Rice weight excluded), N_RX x P.
  MatX ris_ue_amplitude(int k, const std::vector<Vec3>& ue, const Vec3& ue_center) const;

  // Deterministic part of B_k including sqrt(kappa_b/(kappa_b+1)).
  CMat ris_ue_los(int k, const std::vector<Vec3>& ue, const Vec3& ue_center) const;

  // Single LOS row (one UE antenna) of B_k, Rice weight included.
  CRow ris_ue_los_row(int k, const Vec3& antenna, const Vec3& ue_center) const;

  CMat ris_ue(int k, const std::vector<Vec3>& ue, const Vec3& ue_center, Rng& rng) const;
  CMat direct(const std::vector<Vec3>& ue, const Vec3& ue_center, Rng& rng) const;

  ChannelSet realize(const Vec3& ue_position, double yaw_error, Rng& rng) const;

 private:
  Scenario scenario_;
  double lambda_;
  std::vector<Vec3> bs_elements_;
  std::vector<std::vector<Vec3>> ris_elements_;
  std::vector<Vec3> ris_normals_;
  std::vector<CMat> G_;
  std::vector<MatX> rho_bs_;
};

CMat bs_ris_channel(const Scenario& scenario, int k);
CMat ris_ue_channel(const Scenario& scenario, int k, const Vec3& ue_position, Rng& rng);
CMat direct_channel(const Scenario& scenario, const Vec3& ue_position, Rng& rng);

}  // namespace ristrack

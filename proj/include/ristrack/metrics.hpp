#pragma once

#include <iosfwd>
#include <vector>

#include "ristrack/tracker.hpp"

namespace ristrack {

struct ErrorStats {
  std::vector<double> sorted;  // ascending
  double mean = 0.0;
  double rmse = 0.0;
  double q90 = 0.0;
  double q99 = 0.0;
  std::vector<double> thresholds;
  std::vector<double> ccdf;  // fraction of errors strictly above each threshold
};

// Linear-interpolation quantile of ascending data (numpy's default rule).
double quantile_sorted(const std::vector<double>& sorted, double q);

// CCDF on `grid_points` thresholds evenly spaced over [0, max error].
ErrorStats error_stats(std::vector<double> errors, int grid_points = 201);

// Waterfilling over the eigenmodes of H_eq: max sum log2(1 + p_i s_i^2 / sigma^2)
// s.t. sum p_i = P_tx. Returns bits/s/Hz.
double achievable_rate(const CMat& H_eq, double noise_var, double p_tx);

// Water-filled powers for channel gains s_i^2 / sigma^2.
VecX waterfill(const VecX& gains, double p_tx);

// Posterior bound recursion in covariance form C = Phi^-1; directions with
// zero prior uncertainty (z, vz) stay exactly known:
//   C_pred = T C T^T + P,  C = C_pred - C_pred J^T (J C_pred J^T + R)^-1 J C_pred.
class PebRecursion {
 public:
  PebRecursion(const MotionModel& model, const Mat6& C0);

  // One prediction plus measurement step; returns the new PEB.
  double update(const MatX& J, const VecX& R);
  double predict_only();

  const Mat6& covariance() const { return C_; }
  // Pseudo-inverse with eigenvalues below tol * max treated as zero.
  Mat6 information(double tol = 1e-12) const;
  double peb() const;

 private:
  MotionModel model_;
  Mat6 C_;
};

std::vector<double> posterior_peb(const MotionModel& model, const Mat6& C0,
                                  const std::vector<MatX>& J, const std::vector<VecX>& R);

struct GridSpec {
  double x_min = 0.0, x_max = 1.0;
  int nx = 2;
  double y_min = 0.0, y_max = 1.0;
  int ny = 2;
  double z = 1.0;
};

struct PowerMap {
  GridSpec grid;
  std::vector<double> x, y;  // per point
  std::vector<double> watts;
};

// P0(p, c) * tx_power over the grid for RIS k with beam v0.
PowerMap power_map(const GridSpec& grid, const ChannelModel& model, int k, const CVec& c,
                   const CVec& v0, double tx_power = 1.0);

void write_cdf_csv(std::ostream& os, const ErrorStats& stats);
void write_powermap_csv(std::ostream& os, const PowerMap& map);
void write_peb_csv(std::ostream& os, const std::vector<double>& rmse,
                   const std::vector<double>& peb);

}  // namespace ristrack

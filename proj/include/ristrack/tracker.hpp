#pragma once

#include <vector>

#include "ristrack/channel.hpp"

namespace ristrack {

// Constant-velocity model driven by white acceleration noise. State order is
// [x y z vx vy vz].
struct MotionModel {
  double dt = 0.0;
  Vec3 accel_variance = Vec3::Zero();
  Mat6 T = Mat6::Identity();
  Mat6 P = Mat6::Zero();
};

MotionModel make_motion_model(double dt, const Vec3& accel_variance);

struct TrackState {
  Vec6 m = Vec6::Zero();
  Mat6 Sigma = Mat6::Zero();

  Vec3 position() const { return m.head<3>(); }
  Vec3 velocity() const { return m.tail<3>(); }
};

TrackState predict(const TrackState& state, const MotionModel& model);

// Number of disjoint antenna pairs per RIS, floor(N_RX / 2).
inline int phase_pairs(int n_rx) { return n_rx / 2; }

// Observation layout: entry k*Z + r holds Re(rho_{k,r}) and KZ + k*Z + r holds
// Im(rho_{k,r}). index_sets()[k] lists the 2Z entries that belong to RIS k.
std::vector<std::vector<int>> observation_index_sets(int num_ris, int n_rx);

struct Observation {
  VecX o;
  std::vector<std::vector<int>> index_sets;
  VecX R;  // diagonal of the noise covariance estimate
};

// Phase-gradient vector from the projected pilots y_k. Throws
// kNumericDegenerate on a zero sample.
VecX build_observation(const std::vector<CVec>& y);

// Expected observation h(p) and its Jacobian with respect to the 6-state.
// `beams` are the transmit vectors f_k (any positive scaling gives the same h).
struct Linearization {
  VecX h;
  MatX J;                   // 2KZ x 6, velocity columns zero
  std::vector<bool> valid;  // per RIS; false when no useful signal reaches the UE
};

// Throws kNumericDegenerate on a RIS without useful signal unless
// `tolerate_degenerate`, in which case that RIS is flagged invalid and its
// rows are left at zero.
Linearization linearize(const ChannelModel& model, const Vec3& position,
                        const std::vector<CVec>& profiles, const std::vector<CVec>& beams,
                        JacobianMode mode = JacobianMode::kExact, bool with_jacobian = true,
                        bool tolerate_degenerate = false);

VecX observation_fn(const ChannelModel& model, const Vec3& position,
                    const std::vector<CVec>& profiles, const std::vector<CVec>& beams);

MatX jacobian(const ChannelModel& model, const Vec3& position, const std::vector<CVec>& profiles,
              const std::vector<CVec>& beams, JacobianMode mode = JacobianMode::kExact);

// Noiseless useful amplitudes a_{k,r} of the LOS cascade at `position`.
std::vector<CVec> useful_amplitudes(const ChannelModel& model, const Vec3& position,
                                    const std::vector<CVec>& profiles,
                                    const std::vector<CVec>& beams);

// Diagonal R~: sigma_num^2 (1 + alpha) / (|y_k|^2 / N_RX) on the entries of
// RIS k, where sigma_num^2 is sigma^2 or sigma^2 / L.
VecX noise_cov_estimate(const std::vector<CVec>& y, double alpha, double noise_var, int pilot_length,
                        int n_rx, NoiseNumerator numerator = NoiseNumerator::kPreProjection);

// Kalman gain Sigma J^T S^-1 with S = J Sigma J^T + diag(R). Throws
// kSingularInnovation when S is not positive definite.
MatX kalman_gain(const Mat6& Sigma, const MatX& J, const VecX& R);

TrackState ekf_update(const TrackState& prior, const VecX& o, const VecX& h, const MatX& J,
                      const VecX& R);

}  // namespace ristrack

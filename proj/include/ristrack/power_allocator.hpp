#pragma once

#include <vector>

#include "ristrack/ris_optimizer.hpp"

namespace ristrack {

// Equal-power-normalised noise estimate: block k of R~ scaled by
// beta_k^2 / (P_tx / K).
VecX breve_R(const std::vector<double>& y_power, const VecX& beta_prev, double p_tx, double alpha,
             double noise_var, int n_rx, int pilot_length = 1,
             NoiseNumerator numerator = NoiseNumerator::kPreProjection);

// Sigma J^T (J Sigma J^T + diag(R))^-1; throws kSingularMatrix.
MatX fixed_kalman_gain(const Mat6& Sigma_pred, const MatX& J, const VecX& R_breve);

// xi_k = noise_num (1 + alpha) sum_{n in I_k} |u_n|^2, u_n column n of K~.
VecX xi_weights(const MatX& K_tilde, double alpha, double noise_num,
                const std::vector<std::vector<int>>& index_sets);

// pi_k from fresh samples of `density` with the profile frozen.
double pi_value(const ChannelModel& model, int k, const CVec& c, const CVec& v0,
                const UncertaintyDensity& density, int n_samples, Rng& rng,
                double m_factor = 100.0);

struct AllocationResult {
  VecX beta;  // sqrt(W)
  double lambda = 0.0;
  VecX xi, pi, gamma;
};

// beta_k^2 = sqrt(gamma_k) P_tx / sum sqrt(gamma). Throws kInvalidConfig on a
// non-positive or non-finite gamma. A positive `floor_ratio` clamps beta_k
// from below at floor_ratio * sqrt(P_tx / K) and rescales the rest.
AllocationResult allocate_power(const VecX& gamma, double p_tx, double floor_ratio = 0.0);

// Objective sum gamma_k / beta_k^2.
double allocation_objective(const VecX& gamma, const VecX& beta);

}  // namespace ristrack

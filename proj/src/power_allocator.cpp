#include "ristrack/power_allocator.hpp"

#include <cmath>
#include <string>

#include "ristrack/tracker.hpp"

namespace ristrack {

VecX breve_R(const std::vector<double>& y_power, const VecX& beta_prev, double p_tx, double alpha,
             double noise_var, int n_rx, int pilot_length, NoiseNumerator numerator) {
  const int K = static_cast<int>(y_power.size());
  if (beta_prev.size() != K) throw Error(ErrorKind::kInvalidConfig, "beta and power sizes differ");
  const double num = (numerator == NoiseNumerator::kPostProjection ? noise_var / pilot_length
                                                                   : noise_var) *
                     (1.0 + alpha);
  const auto sets = observation_index_sets(K, n_rx);
  VecX R(2 * K * phase_pairs(n_rx));
  for (int k = 0; k < K; ++k) {
    const double power = y_power[k] / n_rx;
    if (!(power > 0.0)) {
      throw Error(ErrorKind::kNumericDegenerate, "zero received power at RIS " + std::to_string(k));
    }
    const double scale = beta_prev(k) * beta_prev(k) / (p_tx / K);
    for (int idx : sets[k]) R(idx) = scale * num / power;
  }
  return R;
}

MatX fixed_kalman_gain(const Mat6& Sigma_pred, const MatX& J, const VecX& R_breve) {
  MatX S = J * Sigma_pred * J.transpose();
  S.diagonal() += R_breve;
  Eigen::LDLT<MatX> ldlt(S);
  if (ldlt.info() != Eigen::Success || !S.allFinite() || ldlt.isNegative() ||
      (ldlt.vectorD().array() <= 0.0).any()) {
    throw Error(ErrorKind::kSingularMatrix, "J Sigma J^T + R is singular");
  }
  return ldlt.solve(J * Sigma_pred).transpose();
}

VecX xi_weights(const MatX& K_tilde, double alpha, double noise_num,
                const std::vector<std::vector<int>>& index_sets) {
  VecX xi = VecX::Zero(static_cast<Eigen::Index>(index_sets.size()));
  for (std::size_t k = 0; k < index_sets.size(); ++k) {
    for (int n : index_sets[k]) xi(k) += K_tilde.col(n).squaredNorm();
    xi(k) *= noise_num * (1.0 + alpha);
  }
  return xi;
}

double pi_value(const ChannelModel& model, int k, const CVec& c, const CVec& v0,
                const UncertaintyDensity& density, int n_samples, Rng& rng, double m_factor) {
  const auto samples = sample_uncertainty(density, n_samples, rng);
  const CMat Ht = effective_rows(model, k, samples, model.bs_ris(k) * v0);
  return mean_inverse_power(Ht, c, m_factor);
}

AllocationResult allocate_power(const VecX& gamma, double p_tx, double floor_ratio) {
  if (!(p_tx > 0.0)) throw Error(ErrorKind::kInvalidConfig, "P_tx must be > 0");
  const Eigen::Index K = gamma.size();
  if (K == 0) throw Error(ErrorKind::kInvalidConfig, "no RIS to allocate power to");
  for (Eigen::Index k = 0; k < K; ++k) {
    if (!(gamma(k) > 0.0) || !std::isfinite(gamma(k))) {
      throw Error(ErrorKind::kInvalidConfig,
                  "gamma_" + std::to_string(k) + " must be positive and finite");
    }
  }
  AllocationResult res;
  res.gamma = gamma;
  const VecX root = gamma.cwiseSqrt();
  const double sum = root.sum();
  VecX b2 = root * (p_tx / sum);
  res.lambda = sum * sum / (p_tx * p_tx);

  if (floor_ratio > 0.0) {
    const double floor2 = floor_ratio * floor_ratio * p_tx / K;
    // Pin starved entries at the floor and share the rest in proportion to sqrt(gamma).
    Eigen::Array<bool, Eigen::Dynamic, 1> pinned = Eigen::Array<bool, Eigen::Dynamic, 1>::Constant(K, false);
    for (int pass = 0; pass < K; ++pass) {
      bool changed = false;
      double free_root = 0.0;
      int n_pinned = 0;
      for (Eigen::Index k = 0; k < K; ++k) {
        if (pinned(k)) ++n_pinned; else free_root += root(k);
      }
      const double budget = p_tx - n_pinned * floor2;
      for (Eigen::Index k = 0; k < K; ++k) {
        b2(k) = pinned(k) ? floor2 : root(k) * budget / free_root;
        if (!pinned(k) && b2(k) < floor2) {
          pinned(k) = true;
          changed = true;
        }
      }
      if (!changed) break;
    }
  }
  // Renormalise so the budget holds with equality to rounding.
  b2 *= p_tx / b2.sum();
  res.beta = b2.cwiseSqrt();
  return res;
}

double allocation_objective(const VecX& gamma, const VecX& beta) {
  return (gamma.array() / beta.array().square()).sum();
}

}  // namespace ristrack

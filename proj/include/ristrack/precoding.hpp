#pragma once

#include <vector>

#include "ristrack/channel.hpp"

namespace ristrack {

// Orthogonal unit-modulus pilot sequences. Row k of Q is q_k^H, so
// Q q_k = L e_k.
struct PilotBook {
  CMat Q;  // K x L
  int length = 0;

  CVec sequence(int k) const { return Q.row(k).adjoint(); }
};

// DFT rows; throws kInvalidConfig when L < K.
PilotBook build_pilots(int num_ris, int length);

// Relative singular-value threshold used for every rank decision.
inline constexpr double kRankTolerance = 1e-10;

// Stacked interference matrix [G_l (l != k); H] seen by RIS k.
CMat interference_matrix(const ChannelSet& channels, int k);

// Orthonormal basis of the null space of the interference matrix of RIS k.
// Throws kBdInfeasible when that null space is empty.
CMat bd_nullspace(const ChannelSet& channels, int k);

// Two-stage form used inside the tracking loop: the null space of the static
// BS-RIS channels G_l (l != k) is computed once, then restricted to the null
// space of the current direct channel H. Same subspace as bd_nullspace.
std::vector<CMat> static_nullspaces(const std::vector<CMat>& G);
CMat restrict_nullspace(const CMat& basis, const CMat& H, int k = -1);

// Unit-norm beamformer steering the dominant right singular direction of
// G_k restricted to the null-space basis.
CVec bd_beamformer(const CMat& G_k, const CMat& null_basis);

// Both steps for every RIS.
std::vector<CVec> bd_precoders(const ChannelSet& channels);

struct PrecoderSet {
  std::vector<CVec> directions;  // v_k^(0), unit norm
  VecX beta;                     // sqrt(watts) per RIS

  int size() const { return static_cast<int>(directions.size()); }
  CVec column(int k) const { return beta(k) * directions[k]; }
  CMat matrix() const;  // F = [f_1 ... f_K]
};

// Throws kPowerBudget when sum(beta^2) exceeds the budget.
PrecoderSet assemble_precoders(std::vector<CVec> directions, const VecX& beta,
                               double power_budget);

// Useful term z_k = B_k diag(c_k) G_k f_k (uses the realised B_k).
CVec useful_signal(const ChannelSet& channels, const std::vector<CVec>& profiles,
                   const PrecoderSet& precoders, int k);

// Synthesise Y = H X + sum_k B_k C_k G_k X + N and project on every pilot:
// y_k = Y q_k / L.
std::vector<CVec> simulate_received_pilots(const ChannelSet& channels,
                                           const std::vector<CVec>& profiles,
                                           const PrecoderSet& precoders,
                                           const PilotBook& pilots, double noise_var, Rng& rng);

// Equivalent of simulate_received_pilots without forming the L-symbol frame:
// y_k = (H + sum_m B_m C_m G_m) f_k + n_k, n_k ~ CN(0, sigma^2 / L I).
// Same distribution as the full frame for orthogonal rows of energy L.
std::vector<CVec> simulate_projected_pilots(const ChannelSet& channels,
                                            const std::vector<CVec>& profiles,
                                            const PrecoderSet& precoders, int pilot_length,
                                            double noise_var, Rng& rng);

// sum_k B_k C_k G_k, the RIS part alone.
CMat cascaded_channel(const ChannelSet& channels, const std::vector<CVec>& profiles);

// H + sum_k B_k C_k G_k.
CMat equivalent_channel(const ChannelSet& channels, const std::vector<CVec>& profiles);

}  // namespace ristrack

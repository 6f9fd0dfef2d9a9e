#include "ristrack/precoding.hpp"

#include <cmath>
#include <string>

namespace ristrack {

PilotBook build_pilots(int num_ris, int length) {
  if (num_ris < 1 || length < num_ris) {
    throw Error(ErrorKind::kInvalidConfig, "pilot length " + std::to_string(length) +
                                               " is shorter than the number of RISs " +
                                               std::to_string(num_ris));
  }
  PilotBook book;
  book.length = length;
  book.Q.resize(num_ris, length);
  for (int k = 0; k < num_ris; ++k) {
    for (int l = 0; l < length; ++l) {
      // Reduce k*l mod L first so the phase stays exact for small cases.
      const long idx = (static_cast<long>(k) * l) % length;
      const double phase = 2.0 * kPi * static_cast<double>(idx) / length;
      cd v = std::exp(kJ * phase);
      if (2 * idx == length) v = -1.0;
      if (idx == 0) v = 1.0;
      book.Q(k, l) = v;
    }
  }
  return book;
}

CMat interference_matrix(const ChannelSet& channels, int k) {
  const int K = channels.num_ris();
  Eigen::Index rows = channels.H.rows();
  for (int l = 0; l < K; ++l) {
    if (l != k) rows += channels.G[l].rows();
  }
  CMat out(rows, channels.H.cols());
  Eigen::Index r0 = 0;
  for (int l = 0; l < K; ++l) {
    if (l == k) continue;
    out.middleRows(r0, channels.G[l].rows()) = channels.G[l];
    r0 += channels.G[l].rows();
  }
  out.middleRows(r0, channels.H.rows()) = channels.H;
  return out;
}

namespace {

// Orthonormal basis of null(M), throwing kBdInfeasible when it is empty.
CMat nullspace_of(const CMat& M, int k) {
  const Eigen::Index n = M.cols();
  if (M.rows() == 0 || M.norm() == 0.0) return CMat::Identity(n, n);
  Eigen::JacobiSVD<CMat> svd(M, Eigen::ComputeFullV);
  const VecX& sv = svd.singularValues();
  const double thresh = kRankTolerance * sv(0);
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > thresh) ++rank;
  }
  if (rank >= n) {
    throw Error(ErrorKind::kBdInfeasible,
                "interference matrix of RIS " + std::to_string(k) + " has full column rank " +
                    std::to_string(rank) + "; no null space left in " + std::to_string(n) +
                    " dimensions");
  }
  return svd.matrixV().rightCols(n - rank);
}

}  // namespace

CMat bd_nullspace(const ChannelSet& channels, int k) {
  return nullspace_of(interference_matrix(channels, k), k);
}

std::vector<CMat> static_nullspaces(const std::vector<CMat>& G) {
  std::vector<CMat> out;
  const int K = static_cast<int>(G.size());
  for (int k = 0; k < K; ++k) {
    Eigen::Index rows = 0;
    for (int l = 0; l < K; ++l) {
      if (l != k) rows += G[l].rows();
    }
    CMat M(rows, G[k].cols());
    Eigen::Index r0 = 0;
    for (int l = 0; l < K; ++l) {
      if (l == k) continue;
      M.middleRows(r0, G[l].rows()) = G[l];
      r0 += G[l].rows();
    }
    out.push_back(nullspace_of(M, k));
  }
  return out;
}

CMat restrict_nullspace(const CMat& basis, const CMat& H, int k) {
  if (H.rows() == 0) return basis;
  return basis * nullspace_of(H * basis, k);
}

CVec bd_beamformer(const CMat& G_k, const CMat& null_basis) {
  const CMat Gbar = G_k * null_basis;
  if (Gbar.norm() == 0.0) {
    throw Error(ErrorKind::kDegenerateChannel, "effective BS-RIS channel is zero");
  }
  Eigen::JacobiSVD<CMat> svd(Gbar, Eigen::ComputeThinV);
  const CVec v = null_basis * svd.matrixV().col(0);
  const double n = v.norm();
  if (n == 0.0) throw Error(ErrorKind::kDegenerateChannel, "beamformer has zero norm");
  return v / n;
}

std::vector<CVec> bd_precoders(const ChannelSet& channels) {
  std::vector<CVec> out;
  out.reserve(channels.G.size());
  for (int k = 0; k < channels.num_ris(); ++k) {
    out.push_back(bd_beamformer(channels.G[k], bd_nullspace(channels, k)));
  }
  return out;
}

CMat PrecoderSet::matrix() const {
  if (directions.empty()) return {};
  CMat F(directions.front().size(), size());
  for (int k = 0; k < size(); ++k) F.col(k) = column(k);
  return F;
}

PrecoderSet assemble_precoders(std::vector<CVec> directions, const VecX& beta,
                               double power_budget) {
  if (static_cast<Eigen::Index>(directions.size()) != beta.size()) {
    throw Error(ErrorKind::kInvalidConfig, "precoder and power vectors differ in length");
  }
  const double used = beta.squaredNorm();
  if (used > power_budget * (1.0 + 1e-12)) {
    throw Error(ErrorKind::kPowerBudget, "allocated power " + std::to_string(used) +
                                             " W exceeds budget " + std::to_string(power_budget) +
                                             " W");
  }
  PrecoderSet set;
  set.directions = std::move(directions);
  set.beta = beta;
  return set;
}

CVec useful_signal(const ChannelSet& channels, const std::vector<CVec>& profiles,
                   const PrecoderSet& precoders, int k) {
  return channels.B[k] * (profiles[k].asDiagonal() * (channels.G[k] * precoders.column(k)));
}

std::vector<CVec> simulate_received_pilots(const ChannelSet& channels,
                                           const std::vector<CVec>& profiles,
                                           const PrecoderSet& precoders,
                                           const PilotBook& pilots, double noise_var, Rng& rng) {
  const int K = channels.num_ris();
  const CMat X = precoders.matrix() * pilots.Q;  // N_TX x L
  CMat Y = channels.H * X;
  for (int k = 0; k < K; ++k) {
    Y += channels.B[k] * (profiles[k].asDiagonal() * (channels.G[k] * X));
  }
  if (noise_var > 0.0) {
    for (Eigen::Index l = 0; l < Y.cols(); ++l) {
      for (Eigen::Index r = 0; r < Y.rows(); ++r) Y(r, l) += complex_gaussian(rng, noise_var);
    }
  }
  std::vector<CVec> y;
  y.reserve(K);
  for (int k = 0; k < K; ++k) y.push_back(Y * pilots.sequence(k) / static_cast<double>(pilots.length));
  return y;
}

CMat cascaded_channel(const ChannelSet& channels, const std::vector<CVec>& profiles) {
  CMat Hc = CMat::Zero(channels.H.rows(), channels.H.cols());
  for (int k = 0; k < channels.num_ris(); ++k) {
    Hc += (channels.B[k] * profiles[k].asDiagonal()) * channels.G[k];
  }
  return Hc;
}

CMat equivalent_channel(const ChannelSet& channels, const std::vector<CVec>& profiles) {
  return channels.H + cascaded_channel(channels, profiles);
}

std::vector<CVec> simulate_projected_pilots(const ChannelSet& channels,
                                            const std::vector<CVec>& profiles,
                                            const PrecoderSet& precoders, int pilot_length,
                                            double noise_var, Rng& rng) {
  const CMat Heq = equivalent_channel(channels, profiles);
  const double var = noise_var / pilot_length;
  std::vector<CVec> y;
  y.reserve(precoders.size());
  for (int k = 0; k < precoders.size(); ++k) {
    CVec yk = Heq * precoders.column(k);
    if (var > 0.0) {
      for (Eigen::Index r = 0; r < yk.size(); ++r) yk(r) += complex_gaussian(rng, var);
    }
    y.push_back(std::move(yk));
  }
  return y;
}

}  // namespace ristrack

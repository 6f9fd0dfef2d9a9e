#include "ristrack/tracker.hpp"

#include <cmath>
#include <string>

namespace ristrack {

MotionModel make_motion_model(double dt, const Vec3& accel_variance) {
  if (!(dt > 0.0)) throw Error(ErrorKind::kInvalidConfig, "dt must be > 0");
  MotionModel mm;
  mm.dt = dt;
  mm.accel_variance = accel_variance;
  mm.T.setIdentity();
  mm.T.topRightCorner<3, 3>() = dt * Mat3::Identity();
  const Mat3 Pa = accel_variance.asDiagonal();
  mm.P.topLeftCorner<3, 3>() = dt * dt * dt / 3.0 * Pa;
  mm.P.topRightCorner<3, 3>() = dt * dt / 2.0 * Pa;
  mm.P.bottomLeftCorner<3, 3>() = dt * dt / 2.0 * Pa;
  mm.P.bottomRightCorner<3, 3>() = dt * Pa;
  return mm;
}

TrackState predict(const TrackState& s, const MotionModel& mm) {
  TrackState out;
  out.m = mm.T * s.m;
  out.Sigma = mm.T * s.Sigma * mm.T.transpose() + mm.P;
  return out;
}

std::vector<std::vector<int>> observation_index_sets(int num_ris, int n_rx) {
  const int Z = phase_pairs(n_rx);
  std::vector<std::vector<int>> sets(num_ris);
  for (int k = 0; k < num_ris; ++k) {
    for (int r = 0; r < Z; ++r) sets[k].push_back(k * Z + r);
    for (int r = 0; r < Z; ++r) sets[k].push_back(num_ris * Z + k * Z + r);
  }
  return sets;
}

VecX build_observation(const std::vector<CVec>& y) {
  const int K = static_cast<int>(y.size());
  if (K == 0) return {};
  const int n_rx = static_cast<int>(y.front().size());
  if (n_rx < 2) throw Error(ErrorKind::kInvalidConfig, "phase gradients need N_RX >= 2");
  const int Z = phase_pairs(n_rx);
  VecX o(2 * K * Z);
  for (int k = 0; k < K; ++k) {
    for (int r = 0; r < Z; ++r) {
      const cd y0 = y[k](2 * r);
      const cd y1 = y[k](2 * r + 1);
      if (std::abs(y0) == 0.0 || std::abs(y1) == 0.0) {
        throw Error(ErrorKind::kNumericDegenerate,
                    "zero received sample at RIS " + std::to_string(k));
      }
      const cd rho = (y1 / std::abs(y1)) * std::conj(y0 / std::abs(y0));
      o(k * Z + r) = rho.real();
      o(K * Z + k * Z + r) = rho.imag();
    }
  }
  return o;
}

namespace {

using CVec3 = Eigen::Vector3cd;

// a_r and da_r/dp for every UE antenna of RIS k. The 1/d_center factor is a
// real scale common to all antennas, so its derivative never reaches the
// normalised phase and is left out of da.
void cascade(const ChannelModel& model, int k, const std::vector<Vec3>& offsets, const Vec3& center,
             const CVec& w, bool with_jacobian, bool phase_only, CVec& a,
             std::vector<CVec3>& da) {
  const Scenario& sc = model.scenario();
  const auto& cells = model.ris_elements(k);
  const Vec3& n = model.ris_normal(k);
  const double k0 = 2.0 * kPi / model.wavelength();
  const double q = sc.pattern.exponent;
  const double d_center = (center - sc.ris[k].reference_position).norm();
  if (d_center == 0.0) throw Error(ErrorKind::kDegenerateGeometry, "UE at RIS centre");
  const double scale = rice_los_weight(sc.rf.rice_ris) * model.wavelength() / (4.0 * kPi) /
                       d_center * std::sqrt(sc.pattern.rx_gain * sc.pattern.cell_gain);

  const int n_rx = static_cast<int>(offsets.size());
  a = CVec::Zero(n_rx);
  da.assign(n_rx, CVec3::Zero());
  for (int r = 0; r < n_rx; ++r) {
    cd acc = 0.0;
    CVec3 dacc = CVec3::Zero();
    for (std::size_t p = 0; p < cells.size(); ++p) {
      if (w(p) == 0.0) continue;
      const LosHop hop = los_hop(center, offsets[r], cells[p], k0);
      const double d = hop.distance;
      const Vec3 e = (center + offsets[r] - cells[p]) / d;
      const double cos_t = n.dot(e);
      if (cos_t <= 0.0) continue;
      const double sF = std::pow(cos_t, 0.5 * q);
      const cd term = w(p) * hop.phasor;
      acc += sF * term;
      if (with_jacobian) {
        const cd phase_part = -kJ * (k0 * sF) * term;
        if (phase_only || q == 0.0) {
          dacc += phase_part * e.cast<cd>();
        } else {
          const Vec3 dsF = 0.5 * q * std::pow(cos_t, 0.5 * q - 1.0) * (n - cos_t * e) / d;
          dacc += term * dsF.cast<cd>() + phase_part * e.cast<cd>();
        }
      }
    }
    a(r) = scale * acc;
    da[r] = scale * dacc;
  }
}

}  // namespace

std::vector<CVec> useful_amplitudes(const ChannelModel& model, const Vec3& position,
                                    const std::vector<CVec>& profiles,
                                    const std::vector<CVec>& beams) {
  const auto offsets = model.ue_elements(Vec3::Zero());
  std::vector<CVec> out;
  std::vector<CVec3> unused;
  for (int k = 0; k < model.num_ris(); ++k) {
    const CVec w = profiles[k].cwiseProduct(model.bs_ris(k) * beams[k]);
    CVec a;
    cascade(model, k, offsets, position, w, false, false, a, unused);
    out.push_back(std::move(a));
  }
  return out;
}

Linearization linearize(const ChannelModel& model, const Vec3& position,
                        const std::vector<CVec>& profiles, const std::vector<CVec>& beams,
                        JacobianMode mode, bool with_jacobian, bool tolerate_degenerate) {
  const int K = model.num_ris();
  if (static_cast<int>(profiles.size()) != K || static_cast<int>(beams.size()) != K) {
    throw Error(ErrorKind::kInvalidConfig, "profile/beam count does not match the RIS count");
  }
  const auto offsets = model.ue_elements(Vec3::Zero());
  const int n_rx = static_cast<int>(offsets.size());
  const int Z = phase_pairs(n_rx);
  Linearization lin;
  lin.h = VecX::Zero(2 * K * Z);
  lin.valid.assign(K, true);
  if (with_jacobian) lin.J = MatX::Zero(2 * K * Z, 6);

  const bool phase_only = mode == JacobianMode::kNormalizedAmplitude;
  CVec a;
  std::vector<CVec3> da;
  for (int k = 0; k < K; ++k) {
    const CVec w = profiles[k].cwiseProduct(model.bs_ris(k) * beams[k]);
    cascade(model, k, offsets, position, w, with_jacobian, phase_only, a, da);
    if ((a.array() == cd(0.0)).any()) {
      if (!tolerate_degenerate) {
        throw Error(ErrorKind::kNumericDegenerate,
                    "zero useful signal at RIS " + std::to_string(k));
      }
      lin.valid[k] = false;
      continue;
    }
    for (int r = 0; r < Z; ++r) {
      const int i0 = 2 * r, i1 = 2 * r + 1;
      const double m0 = std::abs(a(i0)), m1 = std::abs(a(i1));
      const cd ab0 = a(i0) / m0, ab1 = a(i1) / m1;
      const cd rho = ab1 * std::conj(ab0);
      const int re = k * Z + r, im = K * Z + k * Z + r;
      lin.h(re) = rho.real();
      lin.h(im) = rho.imag();
      if (!with_jacobian) continue;
      for (int c = 0; c < 3; ++c) {
        cd dab0, dab1;
        if (phase_only) {
          dab0 = da[i0](c) / m0;
          dab1 = da[i1](c) / m1;
        } else {
          dab0 = kJ * (std::imag(std::conj(ab0) * da[i0](c)) / m0) * ab0;
          dab1 = kJ * (std::imag(std::conj(ab1) * da[i1](c)) / m1) * ab1;
        }
        const cd drho = dab1 * std::conj(ab0) + ab1 * std::conj(dab0);
        lin.J(re, c) = drho.real();
        lin.J(im, c) = drho.imag();
      }
    }
  }
  return lin;
}

VecX observation_fn(const ChannelModel& model, const Vec3& position,
                    const std::vector<CVec>& profiles, const std::vector<CVec>& beams) {
  return linearize(model, position, profiles, beams, JacobianMode::kExact, false).h;
}

MatX jacobian(const ChannelModel& model, const Vec3& position, const std::vector<CVec>& profiles,
              const std::vector<CVec>& beams, JacobianMode mode) {
  return linearize(model, position, profiles, beams, mode, true).J;
}

VecX noise_cov_estimate(const std::vector<CVec>& y, double alpha, double noise_var, int pilot_length,
                        int n_rx, NoiseNumerator numerator) {
  const int K = static_cast<int>(y.size());
  const int Z = phase_pairs(n_rx);
  const double num = (numerator == NoiseNumerator::kPostProjection ? noise_var / pilot_length
                                                                   : noise_var) *
                     (1.0 + alpha);
  VecX R(2 * K * Z);
  const auto sets = observation_index_sets(K, n_rx);
  for (int k = 0; k < K; ++k) {
    const double power = y[k].squaredNorm() / n_rx;
    if (!(power > 0.0)) {
      throw Error(ErrorKind::kNumericDegenerate,
                  "zero received power at RIS " + std::to_string(k));
    }
    for (int idx : sets[k]) R(idx) = num / power;
  }
  return R;
}

MatX kalman_gain(const Mat6& Sigma, const MatX& J, const VecX& R) {
  MatX S = J * Sigma * J.transpose();
  S.diagonal() += R;
  Eigen::LLT<MatX> llt(S);
  if (llt.info() != Eigen::Success || !S.allFinite()) {
    throw Error(ErrorKind::kSingularInnovation, "innovation covariance is not positive definite");
  }
  // S symmetric: K^T = S^-1 J Sigma.
  return llt.solve(J * Sigma).transpose();
}

TrackState ekf_update(const TrackState& prior, const VecX& o, const VecX& h, const MatX& J,
                      const VecX& R) {
  if (o.size() != h.size() || J.rows() != o.size() || R.size() != o.size() || J.cols() != 6) {
    throw Error(ErrorKind::kInvalidConfig, "observation dimensions are inconsistent");
  }
  MatX S = J * prior.Sigma * J.transpose();
  S.diagonal() += R;
  Eigen::LLT<MatX> llt(S);
  if (llt.info() != Eigen::Success || !S.allFinite()) {
    throw Error(ErrorKind::kSingularInnovation, "innovation covariance is not positive definite");
  }
  const MatX Kg = llt.solve(J * prior.Sigma).transpose();
  TrackState post;
  post.m = prior.m + Kg * (o - h);
  post.Sigma = prior.Sigma - Kg * S * Kg.transpose();
  post.Sigma = 0.5 * (post.Sigma + post.Sigma.transpose()).eval();
  return post;
}

}  // namespace ristrack

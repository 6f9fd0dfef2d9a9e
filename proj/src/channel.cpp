#include "ristrack/channel.hpp"

#include <cmath>
#include <limits>

namespace ristrack {

double noise_power(double noise_density_dbm_hz, double noise_figure_db, double bandwidth_hz) {
  if (!(bandwidth_hz > 0.0)) {
    throw Error(ErrorKind::kInvalidConfig, "bandwidth must be > 0");
  }
  const double dbm = noise_density_dbm_hz + noise_figure_db + 10.0 * std::log10(bandwidth_hz);
  return std::pow(10.0, (dbm - 30.0) / 10.0);
}

cd complex_gaussian(Rng& rng, double variance) {
  std::normal_distribution<double> n(0.0, 1.0);
  const double s = std::sqrt(0.5 * variance);
  const double re = n(rng);
  const double im = n(rng);
  return {s * re, s * im};
}

LosHop los_hop(const Vec3& base, const Vec3& offset, const Vec3& target, double k0) {
  long double sq = 0.0L;
  for (int i = 0; i < 3; ++i) {
    const long double c = static_cast<long double>(base(i)) + static_cast<long double>(offset(i)) -
                          static_cast<long double>(target(i));
    sq += c * c;
  }
  const long double d = std::sqrt(sq);
  constexpr long double two_pi = 6.283185307179586476925286766559L;
  const long double phase = std::fmod(static_cast<long double>(k0) * d, two_pi);
  return {static_cast<double>(d), std::exp(-kJ * static_cast<double>(phase))};
}

double rice_los_weight(double kappa) {
  if (std::isinf(kappa)) return 1.0;
  return std::sqrt(kappa / (kappa + 1.0));
}

double rice_nlos_weight(double kappa) {
  if (std::isinf(kappa)) return 0.0;
  return std::sqrt(1.0 / (kappa + 1.0));
}

ChannelModel::ChannelModel(Scenario scenario) : scenario_(std::move(scenario)) {
  validate(scenario_);
  lambda_ = scenario_.rf.wavelength();
  const double k0 = 2.0 * kPi / lambda_;
  const auto& pat = scenario_.pattern;
  bs_elements_ = element_positions(scenario_.bs);
  const Vec3& p_tx = scenario_.bs.reference_position;
  const int n_tx = static_cast<int>(bs_elements_.size());

  for (const auto& spec : scenario_.ris) {
    auto cells = element_positions(spec);
    const Vec3 normal = spec.normal().normalized();
    const double d_center = (spec.reference_position - p_tx).norm();
    const int P = static_cast<int>(cells.size());
    CMat G(P, n_tx);
    MatX rho(P, n_tx);
    for (int p = 0; p < P; ++p) {
      for (int i = 0; i < n_tx; ++i) {
        const double theta = off_broadside_angle(cells[p], normal, bs_elements_[i]);
        const double F = radiation_pattern(theta, pat);
        const double amp =
            lambda_ / (4.0 * kPi) * std::sqrt(pat.tx_gain * pat.cell_gain * F) / d_center;
        rho(p, i) = amp;
        G(p, i) = amp * los_hop(cells[p], Vec3::Zero(), bs_elements_[i], k0).phasor;
      }
    }
    ris_elements_.push_back(std::move(cells));
    ris_normals_.push_back(normal);
    G_.push_back(std::move(G));
    rho_bs_.push_back(std::move(rho));
  }
}

std::vector<Vec3> ChannelModel::ue_elements(const Vec3& position, double yaw_error) const {
  ArraySpec spec = scenario_.ue;
  spec.reference_position = position;
  if (yaw_error != 0.0) spec = rotated_about_z(spec, yaw_error);
  return element_positions(spec);
}

MatX ChannelModel::ris_ue_amplitude(int k, const std::vector<Vec3>& ue,
                                    const Vec3& ue_center) const {
  const auto& cells = ris_elements_[k];
  const auto& pat = scenario_.pattern;
  const double d_center = (ue_center - scenario_.ris[k].reference_position).norm();
  if (d_center == 0.0) throw Error(ErrorKind::kDegenerateGeometry, "UE at RIS centre");
  const double scale = lambda_ / (4.0 * kPi) / d_center;
  MatX rho(ue.size(), cells.size());
  for (std::size_t r = 0; r < ue.size(); ++r) {
    for (std::size_t p = 0; p < cells.size(); ++p) {
      const double theta = off_broadside_angle(cells[p], ris_normals_[k], ue[r]);
      const double F = radiation_pattern(theta, pat);
      rho(r, p) = scale * std::sqrt(pat.rx_gain * pat.cell_gain * F);
    }
  }
  return rho;
}

CRow ChannelModel::ris_ue_los_row(int k, const Vec3& antenna, const Vec3& ue_center) const {
  const auto& cells = ris_elements_[k];
  const auto& pat = scenario_.pattern;
  const double k0 = 2.0 * kPi / lambda_;
  const double d_center = (ue_center - scenario_.ris[k].reference_position).norm();
  if (d_center == 0.0) throw Error(ErrorKind::kDegenerateGeometry, "UE at RIS centre");
  const double scale =
      rice_los_weight(scenario_.rf.rice_ris) * lambda_ / (4.0 * kPi) / d_center *
      std::sqrt(pat.rx_gain * pat.cell_gain);
  const Vec3& n = ris_normals_[k];
  CRow row(cells.size());
  for (std::size_t p = 0; p < cells.size(); ++p) {
    const LosHop hop = los_hop(antenna, Vec3::Zero(), cells[p], k0);
    const double cos_t = n.dot(antenna - cells[p]) / hop.distance;
    const double F = cos_t > 0.0 ? std::pow(cos_t, pat.exponent) : 0.0;
    row(p) = scale * std::sqrt(F) * hop.phasor;
  }
  return row;
}

CMat ChannelModel::ris_ue_los(int k, const std::vector<Vec3>& ue, const Vec3& ue_center) const {
  CMat out(ue.size(), ris_elements_[k].size());
  for (std::size_t r = 0; r < ue.size(); ++r) out.row(r) = ris_ue_los_row(k, ue[r], ue_center);
  return out;
}

CMat ChannelModel::ris_ue(int k, const std::vector<Vec3>& ue, const Vec3& ue_center,
                          Rng& rng) const {
  CMat B = ris_ue_los(k, ue, ue_center);
  const double w = rice_nlos_weight(scenario_.rf.rice_ris);
  if (w == 0.0) return B;
  const MatX rho = ris_ue_amplitude(k, ue, ue_center);
  for (Eigen::Index r = 0; r < B.rows(); ++r) {
    for (Eigen::Index p = 0; p < B.cols(); ++p) {
      B(r, p) += w * complex_gaussian(rng, rho(r, p) * rho(r, p));
    }
  }
  return B;
}

CMat ChannelModel::direct(const std::vector<Vec3>& ue, const Vec3& ue_center, Rng& rng) const {
  const auto& pat = scenario_.pattern;
  const double k0 = 2.0 * kPi / lambda_;
  const double d_center = (ue_center - scenario_.bs.reference_position).norm();
  const double gamma =
      lambda_ / (4.0 * kPi) * std::sqrt(pat.tx_gain * pat.rx_gain) / d_center;
  const double w_los = rice_los_weight(scenario_.rf.rice_direct);
  const double w_nlos = rice_nlos_weight(scenario_.rf.rice_direct);
  CMat H(ue.size(), bs_elements_.size());
  for (std::size_t r = 0; r < ue.size(); ++r) {
    for (std::size_t i = 0; i < bs_elements_.size(); ++i) {
      cd h = w_los * gamma * los_hop(ue[r], Vec3::Zero(), bs_elements_[i], k0).phasor;
      if (w_nlos != 0.0) h += w_nlos * complex_gaussian(rng, gamma * gamma);
      H(r, i) = h;
    }
  }
  return H;
}

ChannelSet ChannelModel::realize(const Vec3& ue_position, double yaw_error, Rng& rng) const {
  const auto ue = ue_elements(ue_position, yaw_error);
  ChannelSet cs;
  const auto& pat = scenario_.pattern;
  cs.gamma = lambda_ / (4.0 * kPi) * std::sqrt(pat.tx_gain * pat.rx_gain) /
             (ue_position - scenario_.bs.reference_position).norm();
  cs.H = direct(ue, ue_position, rng);
  for (int k = 0; k < num_ris(); ++k) {
    cs.G.push_back(G_[k]);
    cs.rho_bs.push_back(rho_bs_[k]);
    cs.rho_ue.push_back(ris_ue_amplitude(k, ue, ue_position));
    cs.B_los.push_back(ris_ue_los(k, ue, ue_position));
    cs.B.push_back(ris_ue(k, ue, ue_position, rng));
  }
  return cs;
}

CMat bs_ris_channel(const Scenario& scenario, int k) {
  return ChannelModel(scenario).bs_ris(k);
}

CMat ris_ue_channel(const Scenario& scenario, int k, const Vec3& ue_position, Rng& rng) {
  const ChannelModel model(scenario);
  return model.ris_ue(k, model.ue_elements(ue_position), ue_position, rng);
}

CMat direct_channel(const Scenario& scenario, const Vec3& ue_position, Rng& rng) {
  const ChannelModel model(scenario);
  return model.direct(model.ue_elements(ue_position), ue_position, rng);
}

}  // namespace ristrack

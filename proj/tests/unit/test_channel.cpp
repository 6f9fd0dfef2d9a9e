#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "ristrack/channel.hpp"

using namespace ristrack;

TEST_CASE("thermal noise power over one subcarrier") {
  // -174 dBm/Hz + 7 dB over 120 kHz: 10^(-19.7) W/Hz * 1.2e5 Hz
  const double expected = std::pow(10.0, -19.7) * 1.2e5;
  CHECK(noise_power(-174.0, 7.0, 120e3) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(noise_power(-174.0, 7.0, 120e3) == doctest::Approx(2.394e-15).epsilon(1e-3));
  CHECK_THROWS_AS(noise_power(-174.0, 7.0, 0.0), Error);
}

TEST_CASE("default RF parameters") {
  const Scenario s = default_scenario();
  CHECK(s.rf.carrier_hz == 28e9);
  CHECK(s.rf.subcarrier_bandwidth_hz == 120e3);
  CHECK(s.rf.noise_figure_db == 7.0);
  CHECK(s.rf.rice_ris == 5.0);
  CHECK(s.tracker.alpha == 0.5);
  CHECK(s.rf.pilot_power_w == doctest::Approx(0.06e-3));
  CHECK(10.0 * std::log10(s.rf.total_tx_power_w * 1e3) == doctest::Approx(23.0));
  CHECK(s.rf.wavelength() == doctest::Approx(0.0107068).epsilon(1e-5));
}

TEST_CASE("Rice weights split unit power") {
  for (double k : {0.0, 0.5, 2.0, 5.0, 100.0}) {
    const double a = rice_los_weight(k), b = rice_nlos_weight(k);
    CHECK(a * a + b * b == doctest::Approx(1.0));
    CHECK(a * a / (b * b + 1e-300) == doctest::Approx(k == 0.0 ? 0.0 : k));
  }
  const double inf = std::numeric_limits<double>::infinity();
  CHECK(rice_los_weight(inf) == 1.0);
  CHECK(rice_nlos_weight(inf) == 0.0);
}

TEST_CASE("complex Gaussian draws are circular with the requested power") {
  Rng rng(3);
  const int n = 200000;
  double p = 0.0, re2 = 0.0, reim = 0.0;
  cd mean = 0.0;
  for (int i = 0; i < n; ++i) {
    const cd z = complex_gaussian(rng, 4.0);
    p += std::norm(z);
    re2 += z.real() * z.real();
    reim += z.real() * z.imag();
    mean += z;
  }
  CHECK(p / n == doctest::Approx(4.0).epsilon(0.01));
  CHECK(re2 / n == doctest::Approx(2.0).epsilon(0.015));
  CHECK(std::abs(reim / n) < 0.03);
  CHECK(std::abs(mean / double(n)) < 0.02);
}

TEST_CASE("LOS hop phase agrees with a direct evaluation") {
  const double k0 = 2.0 * kPi / 0.0107;
  const Vec3 a(0.1, 0.2, 0.3), t(12.0, -3.0, 1.5);
  const LosHop h = los_hop(a, Vec3::Zero(), t, k0);
  const double d = (a - t).norm();
  CHECK(h.distance == doctest::Approx(d).epsilon(1e-15));
  CHECK(std::abs(h.phasor - std::exp(-kJ * (k0 * d))) < 1e-9);
  CHECK(std::abs(h.phasor) == doctest::Approx(1.0));
  // offset enters as base + offset
  const LosHop h2 = los_hop(Vec3::Zero(), a, t, k0);
  CHECK(std::abs(h2.phasor - h.phasor) < 1e-12);
}

TEST_CASE("BS-RIS channel is the far-amplitude spherical-wave model") {
  const Scenario s = testing::small_scenario(4, 2, 1);
  const ChannelModel m(s);
  const CMat& G = m.bs_ris(0);
  REQUIRE(G.rows() == 8);
  REQUIRE(G.cols() == s.n_tx());
  const double lambda = s.rf.wavelength();
  const double d0 = (s.ris[0].reference_position - s.bs.reference_position).norm();
  const auto cells = m.ris_elements(0);
  const auto bs = m.bs_elements();
  for (int p = 0; p < G.rows(); ++p) {
    for (int i = 0; i < G.cols(); ++i) {
      const Vec3 d = bs[i] - cells[p];
      const double cos_t = d.normalized().dot(Vec3::UnitX());
      const double amp = lambda / (4 * kPi * d0) * std::sqrt(cos_t);
      const cd expected = amp * std::exp(-kJ * (2 * kPi / lambda * d.norm()));
      CHECK(std::abs(G(p, i) - expected) < 1e-9 * amp);
    }
  }
}

TEST_CASE("RIS-UE channel: pure LOS is deterministic, Rician power splits by kappa") {
  Scenario s = testing::small_scenario(4, 2, 1);
  s.rf.rice_ris = std::numeric_limits<double>::infinity();
  const Vec3 ue(15.0, 12.0, 1.0);
  Rng r1(1), r2(2);
  const CMat a = ris_ue_channel(s, 0, ue, r1), b = ris_ue_channel(s, 0, ue, r2);
  CHECK((a - b).norm() == 0.0);

  s.rf.rice_ris = 3.0;
  const ChannelModel m(s);
  const auto ant = m.ue_elements(ue);
  const CMat los = m.ris_ue_los(0, ant, ue);
  const MatX rho = m.ris_ue_amplitude(0, ant, ue);
  Rng rng(5);
  double scatter = 0.0;
  const int n = 4000;
  for (int t = 0; t < n; ++t) scatter += (m.ris_ue(0, ant, ue, rng) - los).squaredNorm();
  CHECK(scatter / n == doctest::Approx(rho.squaredNorm() / 4.0).epsilon(0.02));
  CHECK(los.squaredNorm() == doctest::Approx(0.75 * rho.squaredNorm()).epsilon(0.02));
}

TEST_CASE("UE behind a RIS receives nothing from it") {
  const Scenario s = testing::small_scenario(4, 2, 1);
  const ChannelModel m(s);
  const Vec3 behind(-2.0, 15.0, 1.0);
  const CMat los = m.ris_ue_los(0, m.ue_elements(behind), behind);
  CHECK(los.norm() == 0.0);
}

TEST_CASE("direct channel: Rayleigh by default with the free-space power") {
  const Scenario s = testing::small_scenario(4, 2, 1);
  const ChannelModel m(s);
  const Vec3 ue(20.0, 15.0, 1.0);
  Rng rng(9);
  double pw = 0.0;
  const int n = 2000;
  ChannelSet cs;
  for (int t = 0; t < n; ++t) {
    cs = m.realize(ue, 0.0, rng);
    pw += cs.H.squaredNorm();
  }
  const double expected = cs.gamma * cs.gamma * cs.H.size();
  CHECK(pw / n == doctest::Approx(expected).epsilon(0.03));
  CHECK(cs.gamma == doctest::Approx(s.rf.wavelength() / (4 * kPi * (ue - s.bs.reference_position).norm())));
}

TEST_CASE("realize: shapes and static G") {
  const Scenario s = testing::small_scenario(4, 2, 3);
  const ChannelModel m(s);
  Rng rng(1);
  const ChannelSet cs = m.realize(Vec3(18.0, 10.0, 1.0), 0.01, rng);
  CHECK(cs.num_ris() == 3);
  CHECK(cs.H.rows() == 4);
  CHECK(cs.H.cols() == 32);
  for (int k = 0; k < 3; ++k) {
    CHECK(cs.G[k].rows() == 8);
    CHECK(cs.B[k].rows() == 4);
    CHECK(cs.B[k].cols() == 8);
    CHECK((cs.G[k] - m.bs_ris(k)).norm() == 0.0);
  }
}

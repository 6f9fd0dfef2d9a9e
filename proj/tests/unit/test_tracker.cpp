#include <doctest.h>

#include "helpers.hpp"
#include "ristrack/precoding.hpp"
#include "ristrack/tracker.hpp"

using namespace ristrack;

TEST_CASE("constant-velocity model matrices") {
  const MotionModel mm = make_motion_model(0.1, Vec3(0.5, 0.5, 0.0));
  CHECK(mm.T(0, 3) == doctest::Approx(0.1));
  CHECK(mm.T(2, 5) == doctest::Approx(0.1));
  CHECK(mm.T(3, 0) == 0.0);
  CHECK(mm.P(0, 0) == doctest::Approx(0.5 * 1e-3 / 3.0));
  CHECK(mm.P(0, 3) == doctest::Approx(0.5 * 1e-2 / 2.0));
  CHECK(mm.P(3, 3) == doctest::Approx(0.05));
  CHECK(mm.P.row(2).norm() == 0.0);
  CHECK(mm.P.row(5).norm() == 0.0);
  Eigen::SelfAdjointEigenSolver<Mat6> eig(mm.P);
  CHECK(eig.eigenvalues().minCoeff() > -1e-15);
  CHECK_THROWS_AS(make_motion_model(0.0, Vec3::Ones()), Error);
}

TEST_CASE("prediction propagates mean and covariance") {
  const MotionModel mm = make_motion_model(0.5, Vec3(1.0, 2.0, 0.0));
  TrackState s;
  s.m << 1, 2, 3, 0.4, -0.2, 0;
  s.Sigma = Mat6::Identity() * 0.01;
  const TrackState p = predict(s, mm);
  CHECK(p.m(0) == doctest::Approx(1.2));
  CHECK(p.m(1) == doctest::Approx(1.9));
  CHECK((p.Sigma - (mm.T * s.Sigma * mm.T.transpose() + mm.P)).norm() < 1e-15);
}

TEST_CASE("observation layout: real parts first, then imaginary parts") {
  const auto sets = observation_index_sets(3, 4);
  REQUIRE(sets.size() == 3);
  CHECK(sets[1] == std::vector<int>{2, 3, 8, 9});
  std::vector<CVec> y;
  for (int k = 0; k < 3; ++k) {
    CVec v(4);
    v << std::polar(2.0, 0.1), std::polar(0.5, 0.1 + 0.3 * (k + 1)), std::polar(1.0, -1.0),
        std::polar(3.0, -1.0 - 0.2);
    y.push_back(v);
  }
  const VecX o = build_observation(y);
  REQUIRE(o.size() == 12);
  for (int k = 0; k < 3; ++k) {
    CHECK(o(2 * k) == doctest::Approx(std::cos(0.3 * (k + 1))));
    CHECK(o(6 + 2 * k) == doctest::Approx(std::sin(0.3 * (k + 1))));
    CHECK(o(2 * k + 1) == doctest::Approx(std::cos(-0.2)));
    CHECK(o(6 + 2 * k + 1) == doctest::Approx(std::sin(-0.2)));
  }
  y[2](3) = 0.0;
  CHECK_THROWS_AS(build_observation(y), Error);
}

namespace {

struct Setup {
  Scenario s;
  ChannelModel model;
  ChannelSet cs;
  std::vector<CVec> beams, prof;
  Setup(double kappa, std::uint64_t seed)
      : s([&] {
          Scenario x = testing::small_scenario(8, 3, 3);
          x.rf.rice_ris = kappa;
          return x;
        }()),
        model(s) {
    Rng rng(seed);
    cs = model.realize(Vec3(17.0, 13.0, 1.0), 0.0, rng);
    beams = bd_precoders(cs);
    std::mt19937_64 r(seed);
    for (int k = 0; k < 3; ++k) prof.push_back(testing::random_phases(24, r));
  }
};

}  // namespace

TEST_CASE("expected observation equals the noiseless pilot observation under pure LOS") {
  Setup st(std::numeric_limits<double>::infinity(), 3);
  const VecX h = observation_fn(st.model, Vec3(17.0, 13.0, 1.0), st.prof, st.beams);
  const PrecoderSet pre = assemble_precoders(st.beams, VecX::Constant(3, 1e-3), 1.0);
  Rng rng(0);
  const auto y = simulate_projected_pilots(st.cs, st.prof, pre, 100, 0.0, rng);
  CHECK((build_observation(y) - h).norm() < 1e-8);
}

TEST_CASE("Jacobian agrees with central differences") {
  Setup st(5.0, 4);
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> ux(11.0, 29.0), uy(1.0, 29.0);
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    const Vec3 p(ux(rng), uy(rng), 1.0);
    const MatX J = jacobian(st.model, p, st.prof, st.beams);
    CHECK(J.rightCols(3).norm() == 0.0);
    for (int c = 0; c < 3; ++c) {
      Vec3 e = Vec3::Zero();
      e(c) = 1e-6;
      const VecX fd = (observation_fn(st.model, p + e, st.prof, st.beams) -
                       observation_fn(st.model, p - e, st.prof, st.beams)) /
                      2e-6;
      worst = std::max(worst, (J.col(c) - fd).norm() / fd.norm());
    }
  }
  CHECK(worst < 1e-4);
}

TEST_CASE("observation is invariant to the transmit scaling") {
  Setup st(5.0, 5);
  const Vec3 p(20.0, 20.0, 1.0);
  std::vector<CVec> scaled = st.beams;
  for (auto& b : scaled) b *= cd(3.0, -2.0);
  CHECK((observation_fn(st.model, p, st.prof, st.beams) - observation_fn(st.model, p, st.prof, scaled)).norm() <
        1e-12);
}

TEST_CASE("noise covariance estimate") {
  std::vector<CVec> y{CVec::Constant(4, cd(2.0, 0.0)), CVec::Constant(4, cd(0.0, 1.0))};
  const VecX pre = noise_cov_estimate(y, 0.5, 3.0, 10, 4, NoiseNumerator::kPreProjection);
  const VecX post = noise_cov_estimate(y, 0.5, 3.0, 10, 4, NoiseNumerator::kPostProjection);
  const auto sets = observation_index_sets(2, 4);
  for (int i : sets[0]) {
    CHECK(pre(i) == doctest::Approx(3.0 * 1.5 / 4.0));
    CHECK(post(i) == doctest::Approx(0.3 * 1.5 / 4.0));
  }
  for (int i : sets[1]) CHECK(pre(i) == doctest::Approx(4.5));
  y[1].setZero();
  CHECK_THROWS_AS(noise_cov_estimate(y, 0.5, 3.0, 10, 4), Error);
}

TEST_CASE("EKF update matches the information-form oracle") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int t = 0; t < 20; ++t) {
    TrackState prior;
    for (int i = 0; i < 6; ++i) prior.m(i) = n(rng);
    MatX A = MatX::Random(6, 6);
    prior.Sigma = A * A.transpose() + 0.1 * Mat6::Identity();
    MatX J = MatX::Random(4, 6);
    VecX R = VecX::Random(4).cwiseAbs() + VecX::Constant(4, 0.1);
    VecX o = VecX::Random(4), h = VecX::Random(4);
    const TrackState post = ekf_update(prior, o, h, J, R);
    const MatX Rinv = R.cwiseInverse().asDiagonal();
    const MatX info = prior.Sigma.inverse() + J.transpose() * Rinv * J;
    const MatX Sigma = info.inverse();
    const VecX m = prior.m + Sigma * J.transpose() * Rinv * (o - h);
    CHECK((post.Sigma - Sigma).norm() < 1e-9 * Sigma.norm());
    CHECK((post.m - m).norm() < 1e-9 * (1.0 + m.norm()));
    const MatX K = kalman_gain(prior.Sigma, J, R);
    CHECK((K - Sigma * J.transpose() * Rinv).norm() < 1e-9 * K.norm());
  }
}

TEST_CASE("EKF rejects a singular innovation and inconsistent sizes") {
  TrackState prior;
  prior.Sigma.setZero();
  const MatX J = MatX::Zero(2, 6);
  try {
    ekf_update(prior, VecX::Zero(2), VecX::Zero(2), J, VecX::Zero(2));
    FAIL("expected singular innovation");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kSingularInnovation);
  }
  CHECK_THROWS_AS(ekf_update(prior, VecX::Zero(3), VecX::Zero(2), J, VecX::Ones(2)), Error);
}

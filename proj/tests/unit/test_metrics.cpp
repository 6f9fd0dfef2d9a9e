#include <doctest.h>

#include <sstream>

#include "helpers.hpp"
#include "ristrack/format.hpp"
#include "ristrack/metrics.hpp"
#include "ristrack/precoding.hpp"
#include "ristrack/ris_optimizer.hpp"

using namespace ristrack;

TEST_CASE("quantiles use linear interpolation between order statistics") {
  const std::vector<double> v{1.0, 2.0, 3.0, 4.0, 10.0};
  // numpy.quantile(v, [0, .5, .9, .99, 1]) -> 1, 3, 7.6, 9.76, 10
  CHECK(quantile_sorted(v, 0.0) == 1.0);
  CHECK(quantile_sorted(v, 0.5) == doctest::Approx(3.0));
  CHECK(quantile_sorted(v, 0.9) == doctest::Approx(7.6));
  CHECK(quantile_sorted(v, 0.99) == doctest::Approx(9.76));
  CHECK(quantile_sorted(v, 1.0) == 10.0);
}

TEST_CASE("error statistics and complementary CDF") {
  const ErrorStats st = error_stats({3.0, 1.0, 2.0, 2.0}, 5);
  CHECK(st.mean == doctest::Approx(2.0));
  CHECK(st.rmse == doctest::Approx(std::sqrt(18.0 / 4.0)));
  CHECK(st.sorted.front() == 1.0);
  REQUIRE(st.thresholds.size() == 5);
  CHECK(st.thresholds.back() == 3.0);
  CHECK(st.ccdf[0] == 1.0);   // threshold 0
  CHECK(st.ccdf[2] == 0.75);  // threshold 1.5
  CHECK(st.ccdf[4] == 0.0);   // threshold 3
  for (std::size_t i = 1; i < st.ccdf.size(); ++i) CHECK(st.ccdf[i] <= st.ccdf[i - 1]);
  const ErrorStats zero = error_stats({0.0, 0.0});
  CHECK(zero.thresholds.size() == 1);
  CHECK(zero.ccdf[0] == 0.0);
  CHECK_THROWS_AS(error_stats({}), Error);
}

TEST_CASE("waterfilling") {
  VecX g(3);
  g << 4.0, 1.0, 0.01;
  const VecX p = waterfill(g, 1.0);
  // mu = (1 + 1/4 + 1) / 2 = 1.125 -> p = {0.875, 0.125, 0}
  CHECK(p(0) == doctest::Approx(0.875));
  CHECK(p(1) == doctest::Approx(0.125));
  CHECK(p(2) == 0.0);
  CHECK(p.sum() == doctest::Approx(1.0));
}

TEST_CASE("achievable rate") {
  CMat H = CMat::Zero(2, 2);
  CHECK(achievable_rate(H, 1.0, 1.0) == 0.0);
  H(0, 0) = 2.0;
  CHECK(achievable_rate(H, 1.0, 3.0) == doctest::Approx(std::log2(1.0 + 12.0)));
  // two equal modes split the power evenly
  H(1, 1) = 2.0;
  CHECK(achievable_rate(H, 1.0, 2.0) == doctest::Approx(2.0 * std::log2(5.0)));
  // rate is invariant to unitary rotations of H
  std::mt19937_64 rng(4);
  const CMat M = testing::random_complex(3, 3, rng);
  const CMat U = Eigen::HouseholderQR<CMat>(testing::random_complex(3, 3, rng)).householderQ();
  CHECK(achievable_rate(U * M, 0.5, 1.0) == doctest::Approx(achievable_rate(M, 0.5, 1.0)));
}

TEST_CASE("posterior bound recursion matches the information-form recursion") {
  const MotionModel mm = make_motion_model(0.1, Vec3(0.5, 0.5, 0.5));
  const Mat6 C0 = mm.P + Mat6::Identity() * 1e-3;
  PebRecursion rec(mm, C0);
  Mat6 info = C0.inverse();
  std::mt19937_64 rng(5);
  for (int t = 0; t < 20; ++t) {
    MatX J = MatX::Zero(4, 6);
    J.leftCols(3) = MatX::Random(4, 3);
    const VecX R = VecX::Random(4).cwiseAbs() + VecX::Constant(4, 0.05);
    const double peb = rec.update(J, R);
    // information form: (T Phi^-1 T^T + P)^-1 + J^T R^-1 J
    const Mat6 pred = (mm.T * info.inverse() * mm.T.transpose() + mm.P).inverse();
    info = pred + J.transpose() * R.cwiseInverse().asDiagonal() * J;
    const Mat6 C = info.inverse();
    CHECK(peb == doctest::Approx(std::sqrt(C.topLeftCorner<3, 3>().trace())).epsilon(1e-8));
  }
  const double before = rec.peb();
  CHECK(rec.predict_only() > before);
}

TEST_CASE("power map equals P0 times the transmit power") {
  const Scenario s = testing::small_scenario(4, 2, 1);
  const ChannelModel m(s);
  Rng rng(1);
  const ChannelSet cs = m.realize(Vec3(15.0, 15.0, 1.0), 0.0, rng);
  const auto beams = bd_precoders(cs);
  const CVec c = focus_profile(m, 0, Vec3(15.0, 15.0, 1.0), beams[0]);
  GridSpec g{10.0, 20.0, 3, 10.0, 20.0, 2, 1.0};
  const PowerMap map = power_map(g, m, 0, c, beams[0], 2e-3);
  REQUIRE(map.watts.size() == 6);
  CHECK(map.x[1] == 15.0);
  CHECK(map.y[3] == 20.0);
  const CRow h = effective_row(m, 0, Vec3(15.0, 20.0, 1.0), m.bs_ris(0) * beams[0]);
  CHECK(map.watts[4] == doctest::Approx(2e-3 * received_power(h, c)));
  std::ostringstream os;
  write_powermap_csv(os, map);
  CHECK(os.str().rfind("x,y,dBW,watts\n", 0) == 0);
}

TEST_CASE("CSV writers and shortest round-trip formatting") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1e-17) == "1e-17");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
  std::ostringstream cdf, peb;
  write_cdf_csv(cdf, error_stats({1.0}, 2));
  CHECK(cdf.str() == "threshold,ccdf\n0,1\n1,0\n");
  write_peb_csv(peb, {0.5, 0.25}, {0.4, 0.2});
  CHECK(peb.str() == "step,rmse,peb\n0,0.5,0.4\n1,0.25,0.2\n");
}

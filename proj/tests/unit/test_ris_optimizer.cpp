#include <doctest.h>

#include "helpers.hpp"
#include "ristrack/precoding.hpp"
#include "ristrack/ris_optimizer.hpp"

using namespace ristrack;

namespace {

CVec random_disk(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  CVec c(n);
  for (int i = 0; i < n; ++i) c(i) = std::polar(std::sqrt(u(rng)), 2.0 * kPi * u(rng));
  return c;
}

// Random instance in sample form: A = Ht^H diag(d) Ht / n, s = w^T Ht / n.
struct Instance {
  CMat A;
  CRow s;
};

Instance random_instance(int n, int P, std::mt19937_64& rng) {
  const CMat Ht = testing::random_complex(n, P, rng);
  const CVec w = testing::random_complex(n, 1, rng);
  Instance in;
  in.A = Ht.adjoint() * (w.cwiseAbs2().asDiagonal() * Ht) / double(n);
  in.A = 0.5 * (in.A + in.A.adjoint()).eval();
  in.s = (w.transpose() * Ht) / double(n);
  return in;
}

}  // namespace

TEST_CASE("optimal auxiliary variable turns the surrogate into mean 1/(P0 + delta)") {
  std::mt19937_64 rng(1);
  BcdWorkspace ws;
  ws.Ht = testing::random_complex(40, 6, rng);
  const CVec c = testing::random_phases(6, rng);
  bcd_update_w(ws, c);
  const VecX p0 = (ws.Ht * c).cwiseAbs2();
  CHECK(ws.delta == doctest::Approx(p0.minCoeff() / 100.0));
  const double expected = (p0.array() + ws.delta).inverse().mean();
  CHECK(surrogate(ws, c) == doctest::Approx(expected).epsilon(1e-12));
  for (int j = 0; j < 40; ++j) {
    CHECK(upsilon(ws.Ht.row(j), c, ws.w(j), ws.delta) == doctest::Approx(ws.delta / (p0(j) + ws.delta)));
  }
}

TEST_CASE("sample surrogate equals the quadratic plus constants") {
  std::mt19937_64 rng(2);
  BcdWorkspace ws;
  ws.Ht = testing::random_complex(30, 5, rng);
  bcd_update_w(ws, testing::random_phases(5, rng));
  accumulate_A_s(ws);
  for (int t = 0; t < 10; ++t) {
    const CVec c = random_disk(5, rng);
    const double lhs = surrogate(ws, c) * ws.delta;
    const double rhs = 1.0 + quadratic_objective(ws.A, ws.s, c) + ws.delta * ws.w.cwiseAbs2().mean();
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
}

TEST_CASE("delta never decreases across w-updates") {
  std::mt19937_64 rng(3);
  BcdWorkspace ws;
  ws.Ht = testing::random_complex(30, 5, rng);
  double prev = 0.0;
  for (int t = 0; t < 20; ++t) {
    bcd_update_w(ws, random_disk(5, rng));
    CHECK(ws.delta >= prev);
    prev = ws.delta;
  }
  BcdWorkspace zero;
  zero.Ht = CMat::Zero(3, 2);
  CHECK_THROWS_AS(bcd_update_w(zero, CVec::Ones(2)), Error);
}

TEST_CASE("element update is the exact minimiser over the unit disk") {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 200; ++t) {
    const Instance in = random_instance(12, 4, rng);
    CVec c = random_disk(4, rng);
    const int p = t % 4;
    CVec best = c;
    best(p) = ao_element_update(in.A, in.s, c, p);
    CHECK(std::abs(best(p)) <= 1.0 + 1e-12);
    const double fb = quadratic_objective(in.A, in.s, best);
    for (int r = 0; r < 50; ++r) {
      CVec other = c;
      other(p) = random_disk(1, rng)(0);
      CHECK(quadratic_objective(in.A, in.s, other) >= fb - 1e-12 * (1.0 + std::abs(fb)));
    }
  }
}

TEST_CASE("AO sweeps never increase the quadratic") {
  std::mt19937_64 rng(5);
  const Instance in = random_instance(20, 6, rng);
  CVec c = random_disk(6, rng);
  double f = quadratic_objective(in.A, in.s, c);
  for (int t = 0; t < 30; ++t) {
    ao_sweep(in.A, in.s, c);
    const double fn = quadratic_objective(in.A, in.s, c);
    CHECK(fn <= f + 1e-12 * std::abs(f));
    f = fn;
  }
}

TEST_CASE("projected gradient finds the interior minimiser when it is feasible") {
  std::mt19937_64 rng(6);
  const CMat M = testing::random_complex(5, 5, rng);
  const CMat A = M.adjoint() * M + 5.0 * CMat::Identity(5, 5);
  const CVec target = 0.3 * random_disk(5, rng);
  const CRow s = (A * target).adjoint();
  const QpResult r = solve_quadratic_opt(A, s, CVec(), 20000, 1e-9);
  CHECK(r.converged);
  CHECK((r.c - target).norm() < 1e-8);
}

TEST_CASE("projected gradient satisfies the KKT conditions on the boundary") {
  std::mt19937_64 rng(7);
  const Instance in = random_instance(30, 6, rng);
  const CRow s = 50.0 * in.s;  // pushes the optimum to the boundary
  const QpResult r = solve_quadratic_opt(in.A, s, CVec(), 20000, 1e-8);
  REQUIRE(r.converged);
  const CVec g = in.A * r.c - s.adjoint();
  for (int p = 0; p < 6; ++p) {
    const double m = std::abs(r.c(p));
    if (m < 1.0 - 1e-6) {
      CHECK(std::abs(g(p)) < 1e-6);
    } else {
      // gradient points inward along -c_p: g_p = -mu c_p with mu >= 0
      const cd ratio = g(p) / r.c(p);
      CHECK(ratio.real() <= 1e-6);
      CHECK(std::abs(ratio.imag()) < 1e-5);
    }
  }
  // no random feasible point does better
  for (int t = 0; t < 200; ++t) {
    CHECK(quadratic_objective(in.A, s, random_disk(6, rng)) >= r.objective - 1e-9);
  }
}

TEST_CASE("unit-disk projection") {
  CVec c(3);
  c << cd(3.0, 4.0), cd(0.1, 0.2), cd(0.0, -1.0);
  const CVec p = project_unit_disk(c);
  CHECK(std::abs(p(0) - cd(0.6, 0.8)) < 1e-15);
  CHECK(p(1) == c(1));
  CHECK(p(2) == c(2));
}

TEST_CASE("focusing profile maximises the received power at its target") {
  std::mt19937_64 rng(8);
  const CRow h = testing::random_complex(1, 16, rng);
  const CVec c = focus_profile(h);
  CHECK(received_power(h, c) == doctest::Approx(std::pow(h.cwiseAbs().sum(), 2)));
  for (int t = 0; t < 100; ++t) CHECK(received_power(h, testing::random_phases(16, rng)) <= received_power(h, c));
}

TEST_CASE("mean inverse power with the delta floor") {
  CMat Ht(3, 1);
  Ht << 1.0, 2.0, 0.0;
  const CVec c = CVec::Ones(1);
  // P0 = {1, 4, 0}; delta = 1 / 100 floors the zero
  CHECK(mean_inverse_power(Ht, c, 100.0) == doctest::Approx((1.0 + 0.25 + 100.0) / 3.0));
  CHECK_THROWS_AS(mean_inverse_power(CMat::Zero(2, 2), CVec::Ones(2)), Error);
}

TEST_CASE("uncertainty sampling reproduces the mixture moments") {
  UncertaintyDensity d;
  Mat3 cov = Mat3::Zero();
  cov(0, 0) = 0.04;
  cov(1, 1) = 0.01;
  d.components.push_back({Vec3(1.0, 2.0, 1.0), cov});
  d.components.push_back({Vec3(3.0, 2.0, 1.0), cov});
  CHECK(d.weight() == 0.5);
  CHECK((d.mean() - Vec3(2.0, 2.0, 1.0)).norm() < 1e-15);
  Rng rng(9);
  const auto s = sample_uncertainty(d, 40000, rng);
  Vec3 m = Vec3::Zero();
  for (const auto& p : s) m += p;
  m /= double(s.size());
  CHECK(m(0) == doctest::Approx(2.0).epsilon(0.01));
  double vy = 0.0, vx = 0.0;
  for (const auto& p : s) {
    vy += (p(1) - 2.0) * (p(1) - 2.0);
    vx += (p(0) - m(0)) * (p(0) - m(0));
  }
  CHECK(vy / s.size() == doctest::Approx(0.01).epsilon(0.03));
  CHECK(vx / s.size() == doctest::Approx(1.0 + 0.04).epsilon(0.03));
  for (const auto& p : s) CHECK(p(2) == 1.0);
  CHECK_THROWS_AS(sample_uncertainty(UncertaintyDensity{}, 3, rng), Error);
}

TEST_CASE("BCD on a small RIS: monotone surrogate, both modes improve on the start") {
  Scenario sc = testing::small_scenario(8, 2, 3);
  sc.optimizer.n_samples = 80;
  sc.optimizer.n_bcd = 15;
  const ChannelModel model(sc);
  Rng rng(10);
  const ChannelSet cs = model.realize(Vec3(20.0, 15.0, 1.0), 0.0, rng);
  const auto beams = bd_precoders(cs);
  UncertaintyDensity d;
  Mat3 cov = Mat3::Identity() * 0.2;
  cov(2, 2) = 0.0;
  d.components.push_back({Vec3(20.0, 15.0, 1.0), cov});
  CMat Ht;
  const CVec c0 = CVec::Ones(16);
  optimize_ris(d, model, 0, beams[0], RisMode::kOptAo, sc.optimizer, rng, c0, &Ht);
  const double start = mean_inverse_power(Ht, c0);
  for (RisMode mode : {RisMode::kOpt, RisMode::kOptAo}) {
    const auto r = optimize_ris(Ht, c0, mode, sc.optimizer);
    for (std::size_t i = 1; i < r.half_steps.size(); ++i) {
      CHECK(r.half_steps[i] <= r.half_steps[i - 1] * (1.0 + 1e-9));
    }
    CHECK(r.mean_inverse_power < start);
    CHECK(r.c.cwiseAbs().maxCoeff() <= 1.0 + 1e-12);
  }
  const auto none = optimize_ris(Ht, c0, RisMode::kOptAo, [&] {
    OptimizerConfig z = sc.optimizer;
    z.n_bcd = 0;
    return z;
  }());
  CHECK(none.c == c0);
}

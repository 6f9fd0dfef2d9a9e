#include "ristrack/ris_optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "ristrack/format.hpp"

namespace ristrack {

Vec3 UncertaintyDensity::mean() const {
  Vec3 m = Vec3::Zero();
  for (const auto& c : components) m += c.mean;
  return components.empty() ? m : Vec3(m / static_cast<double>(components.size()));
}

UncertaintyDensity point_density(const Vec3& p) {
  UncertaintyDensity d;
  d.components.push_back({p, Mat3::Zero()});
  return d;
}

std::vector<Vec3> sample_uncertainty(const UncertaintyDensity& density, int n, Rng& rng) {
  if (density.components.empty()) {
    throw Error(ErrorKind::kInvalidConfig, "uncertainty density has no components");
  }
  if (n < 1) throw Error(ErrorKind::kInvalidConfig, "sample count must be >= 1");
  std::vector<Mat3> roots;
  roots.reserve(density.components.size());
  for (const auto& comp : density.components) {
    Eigen::SelfAdjointEigenSolver<Mat3> es(0.5 * (comp.cov + comp.cov.transpose()));
    const Vec3 ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    roots.push_back(es.eigenvectors() * ev.asDiagonal());
  }
  std::uniform_int_distribution<int> pick(0, static_cast<int>(density.components.size()) - 1);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Vec3> out;
  out.reserve(n);
  for (int j = 0; j < n; ++j) {
    const int q = pick(rng);
    Vec3 z;
    for (int i = 0; i < 3; ++i) z(i) = normal(rng);
    out.push_back(density.components[q].mean + roots[q] * z);
  }
  return out;
}

CRow effective_row(const ChannelModel& model, int k, const Vec3& p, const CVec& g) {
  const Vec3 antenna = model.ue_elements(p).front();
  return model.ris_ue_los_row(k, antenna, p).cwiseProduct(g.transpose());
}

CMat effective_rows(const ChannelModel& model, int k, const std::vector<Vec3>& samples,
                    const CVec& g) {
  CMat Ht(samples.size(), g.size());
  for (std::size_t j = 0; j < samples.size(); ++j) Ht.row(j) = effective_row(model, k, samples[j], g);
  return Ht;
}

double received_power(const CRow& h_tilde, const CVec& c) {
  return std::norm((h_tilde * c)(0));
}

void bcd_update_w(BcdWorkspace& ws, const CVec& c) {
  const CVec u = ws.Ht * c;
  ws.p0 = u.cwiseAbs2();
  const double pmin = ws.p0.size() ? ws.p0.minCoeff() : 0.0;
  const double pmax = ws.p0.size() ? ws.p0.maxCoeff() : 0.0;
  if (!(pmax > 0.0)) {
    throw Error(ErrorKind::kNumericDegenerate, "received power is zero at every sample");
  }
  double candidate = pmin / ws.m_factor;
  if (!(candidate > 0.0)) {
    // Some samples see no power at all; fall back to the smallest positive one.
    double pos_min = pmax;
    for (Eigen::Index j = 0; j < ws.p0.size(); ++j) {
      if (ws.p0(j) > 0.0) pos_min = std::min(pos_min, ws.p0(j));
    }
    candidate = pos_min / ws.m_factor;
  }
  ws.delta = std::max(ws.delta, candidate);
  ws.w.resize(u.size());
  for (Eigen::Index j = 0; j < u.size(); ++j) ws.w(j) = std::conj(u(j)) / (ws.p0(j) + ws.delta);
}

void accumulate_A_s(BcdWorkspace& ws) {
  const double n = static_cast<double>(ws.samples());
  const VecX d = ws.w.cwiseAbs2() / n;
  ws.A = ws.Ht.adjoint() * (d.asDiagonal() * ws.Ht);
  ws.A = 0.5 * (ws.A + ws.A.adjoint()).eval();
  ws.s = (ws.w.transpose() * ws.Ht) / n;
}

double upsilon(const CRow& h_tilde, const CVec& c, cd w, double delta) {
  const cd u = (h_tilde * c)(0);
  return 1.0 + std::norm(w) * std::norm(u) - 2.0 * std::real(w * u) + delta * std::norm(w);
}

double surrogate(const BcdWorkspace& ws, const CVec& c) {
  const CVec u = ws.Ht * c;
  double acc = 0.0;
  for (Eigen::Index j = 0; j < u.size(); ++j) {
    acc += std::norm(1.0 - ws.w(j) * u(j)) + ws.delta * std::norm(ws.w(j));
  }
  return acc / static_cast<double>(u.size()) / ws.delta;
}

double quadratic_objective(const CMat& A, const CRow& s, const CVec& c) {
  return std::real(c.dot(A * c)) - 2.0 * std::real((s * c)(0));
}

CVec project_unit_disk(const CVec& c) {
  CVec out = c;
  for (Eigen::Index p = 0; p < out.size(); ++p) {
    const double m = std::abs(out(p));
    if (m > 1.0) out(p) /= m;
  }
  return out;
}

namespace {

// Accelerated projected gradient for c^H A c - 2 Re(s c) where `apply`
// evaluates A c.
template <class Apply>
QpResult projected_gradient(const Apply& apply, const CRow& s, const CVec& c0, int max_iter,
                            double tol) {
  const Eigen::Index P = s.size();
  const CVec sh = s.adjoint();
  auto objective = [&](const CVec& c, const CVec& Ac) {
    return std::real(c.dot(Ac)) - 2.0 * std::real((s * c)(0));
  };

  // Power iteration for the largest eigenvalue of A.
  CVec v = CVec::Ones(P) / std::sqrt(static_cast<double>(P));
  double L = 0.0;
  for (int it = 0; it < 50; ++it) {
    const CVec Av = apply(v);
    const double nv = Av.norm();
    if (nv == 0.0) break;
    L = nv;
    v = Av / nv;
  }
  L = L > 0.0 ? 1.05 * L : 1.0;

  QpResult res;
  CVec x = c0.size() == P ? project_unit_disk(c0) : CVec::Zero(P);
  CVec Ax = apply(x);
  double fx = objective(x, Ax);
  res.c = x;
  res.objective = fx;
  CVec y = x, Ay = Ax;
  double t = 1.0;
  for (int it = 1; it <= max_iter; ++it) {
    const double fy = objective(y, Ay);
    const CVec gy = Ay - sh;
    CVec xn, Axn;
    double fxn = 0.0;
    for (int bt = 0; bt < 60; ++bt) {
      xn = project_unit_disk(y - gy / L);
      Axn = apply(xn);
      fxn = objective(xn, Axn);
      const CVec dlt = xn - y;
      const double model = fy + 2.0 * std::real(dlt.dot(gy)) + L * dlt.squaredNorm();
      if (fxn <= model + 1e-15 * (std::abs(fy) + 1.0)) break;
      L *= 2.0;
    }
    res.iterations = it;
    if (fxn > fx) {
      // Momentum overshoot: restart from the last accepted iterate.
      y = x;
      Ay = Ax;
      t = 1.0;
      continue;
    }
    const double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    const CVec yn = xn + ((t - 1.0) / tn) * (xn - x);
    x = xn;
    Ax = Axn;
    fx = fxn;
    t = tn;
    y = yn;
    Ay = apply(y);

    const CVec g = Ax - sh;
    res.stationarity = (x - project_unit_disk(x - g / L)).norm();
    if (fx < res.objective) {
      res.objective = fx;
      res.c = x;
    }
    if (res.stationarity <= tol) {
      res.converged = true;
      res.objective = fx;
      res.c = x;
      break;
    }
  }
  return res;
}

cd closed_form(cd Y, double App, cd current) {
  const double mY = std::abs(Y);
  if (App > 0.0 && mY < App) return Y / App;
  if (mY > 0.0) return Y / mY;
  return current;
}

// Sample-form quadratic: A = Ht^H diag(d) Ht, s = w^T Ht / n.
struct SampleQuadratic {
  const CMat& Ht;
  VecX d;
  CRow s;

  CVec apply(const CVec& c) const { return Ht.adjoint() * (d.asDiagonal() * (Ht * c)); }
};

void ao_sweep_samples(const SampleQuadratic& q, CVec& c) {
  const CMat Hd = q.d.asDiagonal() * q.Ht;
  CVec u = q.Ht * c;
  for (Eigen::Index p = 0; p < c.size(); ++p) {
    const double App = std::real(q.Ht.col(p).dot(Hd.col(p)));
    const cd Ac_p = Hd.col(p).dot(u);
    const cd V = Ac_p - App * c(p);
    const cd Y = std::conj(q.s(p)) - V;
    const cd cn = closed_form(Y, App, c(p));
    const cd dc = cn - c(p);
    if (dc != 0.0) {
      u += q.Ht.col(p) * dc;
      c(p) = cn;
    }
  }
}

}  // namespace

QpResult solve_quadratic_opt(const CMat& A, const CRow& s, const CVec& c0, int max_iter,
                             double tol) {
  if (A.rows() != A.cols() || A.rows() != s.size()) {
    throw Error(ErrorKind::kInvalidConfig, "A and s dimensions disagree");
  }
  return projected_gradient([&](const CVec& c) -> CVec { return A * c; }, s, c0, max_iter, tol);
}

cd ao_element_update(const CMat& A, const CRow& s, const CVec& c, int p) {
  const cd V = (A.row(p) * c)(0) - A(p, p) * c(p);
  const cd Y = std::conj(s(p)) - V;
  return closed_form(Y, std::real(A(p, p)), c(p));
}

void ao_sweep(const CMat& A, const CRow& s, CVec& c) {
  for (Eigen::Index p = 0; p < c.size(); ++p) c(p) = ao_element_update(A, s, c, static_cast<int>(p));
}

double mean_inverse_power(const CMat& Ht, const CVec& c, double m_factor) {
  const VecX p0 = (Ht * c).cwiseAbs2();
  double pos_min = std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < p0.size(); ++j) {
    if (p0(j) > 0.0) pos_min = std::min(pos_min, p0(j));
  }
  if (!std::isfinite(pos_min)) {
    throw Error(ErrorKind::kNumericDegenerate, "received power is zero at every sample");
  }
  const double delta = pos_min / m_factor;
  double acc = 0.0;
  for (Eigen::Index j = 0; j < p0.size(); ++j) acc += 1.0 / std::max(p0(j), delta);
  return acc / static_cast<double>(p0.size());
}

RisOptimizationResult optimize_ris(const CMat& Ht, const CVec& c_init, RisMode mode,
                                   const OptimizerConfig& cfg) {
  RisOptimizationResult res;
  CVec c = project_unit_disk(c_init);
  if (cfg.n_bcd <= 0) {
    res.c = c_init;
    res.mean_inverse_power = mean_inverse_power(Ht, c_init, cfg.m_factor);
    return res;
  }
  BcdWorkspace ws;
  ws.Ht = Ht;
  ws.m_factor = cfg.m_factor;
  const double n = static_cast<double>(Ht.rows());
  double prev = std::numeric_limits<double>::quiet_NaN();
  for (int q = 0; q < cfg.n_bcd; ++q) {
    bcd_update_w(ws, c);
    res.half_steps.push_back(surrogate(ws, c));

    SampleQuadratic quad{ws.Ht, ws.w.cwiseAbs2() / n, (ws.w.transpose() * ws.Ht) / n};
    if (mode == RisMode::kOptAo) {
      for (int sweep = 0; sweep < std::max(1, cfg.ao_sweeps); ++sweep) ao_sweep_samples(quad, c);
    } else {
      const QpResult qp = projected_gradient([&](const CVec& x) -> CVec { return quad.apply(x); },
                                             quad.s, c, cfg.pgd_max_iter, cfg.pgd_tol);
      c = qp.c;
      res.inner_converged = res.inner_converged && qp.converged;
    }
    const double val = surrogate(ws, c);
    res.half_steps.push_back(val);
    res.iterations = q + 1;
    if (std::isfinite(prev) && std::abs(prev - val) <= cfg.early_stop_rel * std::abs(prev)) break;
    prev = val;
  }
  res.c = c;
  res.delta = ws.delta;
  res.mean_inverse_power = mean_inverse_power(Ht, c, cfg.m_factor);
  return res;
}

RisOptimizationResult optimize_ris(const UncertaintyDensity& density, const ChannelModel& model,
                                   int k, const CVec& v0, RisMode mode, const OptimizerConfig& cfg,
                                   Rng& rng, const CVec& c_init, CMat* samples_out) {
  const auto samples = sample_uncertainty(density, cfg.n_samples, rng);
  const CVec g = model.bs_ris(k) * v0;
  CMat Ht = effective_rows(model, k, samples, g);
  auto res = optimize_ris(Ht, c_init, mode, cfg);
  if (samples_out) *samples_out = std::move(Ht);
  return res;
}

CVec focus_profile(const CRow& h_tilde) {
  CVec c(h_tilde.size());
  for (Eigen::Index p = 0; p < h_tilde.size(); ++p) {
    c(p) = h_tilde(p) == 0.0 ? cd(1.0) : std::exp(-kJ * std::arg(h_tilde(p)));
  }
  return c;
}

CVec focus_profile(const ChannelModel& model, int k, const Vec3& p_est, const CVec& v0) {
  return focus_profile(effective_row(model, k, p_est, model.bs_ris(k) * v0));
}

void write_convergence_csv(std::ostream& os, const RisOptimizationResult& result) {
  os << "iteration,surrogate\n";
  for (std::size_t i = 0; i < result.half_steps.size(); ++i) {
    os << i << ',' << format_double(result.half_steps[i]) << '\n';
  }
}

}  // namespace ristrack

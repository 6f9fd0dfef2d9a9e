#pragma once

#include <iosfwd>
#include <vector>

#include "ristrack/channel.hpp"

namespace ristrack {

struct GaussianComponent {
  Vec3 mean = Vec3::Zero();
  Mat3 cov = Mat3::Zero();
};

// Equal-weight Gaussian mixture over the UE position.
struct UncertaintyDensity {
  std::vector<GaussianComponent> components;

  double weight() const { return components.empty() ? 0.0 : 1.0 / components.size(); }
  Vec3 mean() const;
};

UncertaintyDensity point_density(const Vec3& p);

// Component drawn uniformly, then a Gaussian draw (covariance may be singular).
std::vector<Vec3> sample_uncertainty(const UncertaintyDensity& density, int n, Rng& rng);

// g = G_k v and h~(p) = b(p) diag(g), with b(p) the LOS row of the first UE
// antenna of an array centred on p.
CRow effective_row(const ChannelModel& model, int k, const Vec3& p, const CVec& g);
CMat effective_rows(const ChannelModel& model, int k, const std::vector<Vec3>& samples,
                    const CVec& g);

// P0 = |h~ c|^2.
double received_power(const CRow& h_tilde, const CVec& c);

struct BcdWorkspace {
  CMat Ht;          // n x P, row j = h~(p_j)
  double m_factor = 100.0;
  VecX p0;          // P0(p_j, c) at the last w-update
  CVec w;           // w(p_j)
  double delta = 0.0;
  CMat A;           // filled by accumulate_A_s
  CRow s;

  int samples() const { return static_cast<int>(Ht.rows()); }
};

// delta = max(previous delta, min_j P0 / M) (previous = 0 on the first call),
// w_j = c^H h~_j^H / (P0_j + delta). Throws kNumericDegenerate if every P0 is 0.
void bcd_update_w(BcdWorkspace& ws, const CVec& c);

void accumulate_A_s(BcdWorkspace& ws);

// Upsilon(p, c, w) = 1 + |w|^2 P0 - 2 Re(w h~ c) + delta |w|^2.
double upsilon(const CRow& h_tilde, const CVec& c, cd w, double delta);

// Sample mean of Upsilon with the workspace's w and delta, divided by delta.
double surrogate(const BcdWorkspace& ws, const CVec& c);

// c^H A c - 2 Re(s c).
double quadratic_objective(const CMat& A, const CRow& s, const CVec& c);

CVec project_unit_disk(const CVec& c);

struct QpResult {
  CVec c;
  double objective = 0.0;
  double stationarity = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Minimises c^H A c - 2 Re(s c) over |c_p| <= 1 by accelerated projected
// gradient, starting from c0 (zero when empty).
QpResult solve_quadratic_opt(const CMat& A, const CRow& s, const CVec& c0 = CVec(),
                             int max_iter = 5000, double tol = 1e-8);

// Closed-form minimiser over c_p alone.
cd ao_element_update(const CMat& A, const CRow& s, const CVec& c, int p);

// One ascending-index sweep of ao_element_update, in place.
void ao_sweep(const CMat& A, const CRow& s, CVec& c);

enum class RisMode { kOpt, kOptAo };

struct RisOptimizationResult {
  CVec c;
  std::vector<double> half_steps;  // normalised surrogate after each w- and c-step
  double mean_inverse_power = 0.0; // sample mean of 1/P0 at the returned c
  double delta = 0.0;
  int iterations = 0;
  bool inner_converged = true;     // OPT only
};

// BCD on a fixed sample set. n_bcd = 0 returns c_init unchanged.
RisOptimizationResult optimize_ris(const CMat& Ht, const CVec& c_init, RisMode mode,
                                   const OptimizerConfig& cfg);

// Draws cfg.n_samples positions from `density` and optimises RIS k.
RisOptimizationResult optimize_ris(const UncertaintyDensity& density, const ChannelModel& model,
                                   int k, const CVec& v0, RisMode mode, const OptimizerConfig& cfg,
                                   Rng& rng, const CVec& c_init, CMat* samples_out = nullptr);

// Sample mean of 1/max(P0, delta) with delta = min positive P0 / M.
double mean_inverse_power(const CMat& Ht, const CVec& c, double m_factor = 100.0);

// Phase conjugation of h~ at p_est (unit moduli).
CVec focus_profile(const CRow& h_tilde);
CVec focus_profile(const ChannelModel& model, int k, const Vec3& p_est, const CVec& v0);

// iteration,surrogate rows.
void write_convergence_csv(std::ostream& os, const RisOptimizationResult& result);

}  // namespace ristrack

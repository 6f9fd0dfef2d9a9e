#include "ristrack/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

#include "ristrack/format.hpp"
#include "ristrack/ris_optimizer.hpp"

namespace ristrack {

double quantile_sorted(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return 0.0;
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

ErrorStats error_stats(std::vector<double> errors, int grid_points) {
  if (errors.empty()) throw Error(ErrorKind::kInvalidConfig, "no errors to summarise");
  ErrorStats st;
  std::sort(errors.begin(), errors.end());
  st.sorted = std::move(errors);
  const double n = static_cast<double>(st.sorted.size());
  st.mean = std::accumulate(st.sorted.begin(), st.sorted.end(), 0.0) / n;
  double sq = 0.0;
  for (double e : st.sorted) sq += e * e;
  st.rmse = std::sqrt(sq / n);
  st.q90 = quantile_sorted(st.sorted, 0.9);
  st.q99 = quantile_sorted(st.sorted, 0.99);

  const double emax = st.sorted.back();
  const int m = emax > 0.0 ? std::max(grid_points, 2) : 1;
  for (int i = 0; i < m; ++i) {
    const double thr = m == 1 ? 0.0 : emax * i / (m - 1);
    const auto above = st.sorted.end() - std::upper_bound(st.sorted.begin(), st.sorted.end(), thr);
    st.thresholds.push_back(thr);
    st.ccdf.push_back(static_cast<double>(above) / n);
  }
  return st;
}

VecX waterfill(const VecX& gains, double p_tx) {
  const Eigen::Index n = gains.size();
  VecX p = VecX::Zero(n);
  std::vector<Eigen::Index> order;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (gains(i) > 0.0) order.push_back(i);
  }
  if (order.empty() || !(p_tx > 0.0)) return p;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return gains(a) > gains(b); });
  // Drop the weakest mode until every active mode sits below the water level.
  for (std::size_t m = order.size(); m >= 1; --m) {
    double inv_sum = 0.0;
    for (std::size_t i = 0; i < m; ++i) inv_sum += 1.0 / gains(order[i]);
    const double mu = (p_tx + inv_sum) / static_cast<double>(m);
    if (mu > 1.0 / gains(order[m - 1])) {
      for (std::size_t i = 0; i < m; ++i) p(order[i]) = mu - 1.0 / gains(order[i]);
      return p;
    }
  }
  return p;
}

double achievable_rate(const CMat& H_eq, double noise_var, double p_tx) {
  if (H_eq.size() == 0 || H_eq.norm() == 0.0) return 0.0;
  Eigen::JacobiSVD<CMat> svd(H_eq);
  const VecX gains = svd.singularValues().array().square() / noise_var;
  const VecX p = waterfill(gains, p_tx);
  double rate = 0.0;
  for (Eigen::Index i = 0; i < gains.size(); ++i) rate += std::log2(1.0 + p(i) * gains(i));
  return rate;
}

PebRecursion::PebRecursion(const MotionModel& model, const Mat6& C0) : model_(model), C_(C0) {}

double PebRecursion::predict_only() {
  C_ = model_.T * C_ * model_.T.transpose() + model_.P;
  return peb();
}

double PebRecursion::update(const MatX& J, const VecX& R) {
  const Mat6 Cp = model_.T * C_ * model_.T.transpose() + model_.P;
  if (J.rows() == 0) {
    C_ = Cp;
    return peb();
  }
  MatX S = J * Cp * J.transpose();
  S.diagonal() += R;
  Eigen::LLT<MatX> llt(S);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorKind::kSingularMatrix, "bound innovation matrix is not positive definite");
  }
  const MatX JC = J * Cp;
  C_ = Cp - JC.transpose() * llt.solve(JC);
  C_ = 0.5 * (C_ + C_.transpose()).eval();
  return peb();
}

Mat6 PebRecursion::information(double tol) const {
  Eigen::SelfAdjointEigenSolver<Mat6> es(C_);
  const auto& ev = es.eigenvalues();
  const double cut = tol * std::max(ev.cwiseAbs().maxCoeff(), 0.0);
  Vec6 inv = Vec6::Zero();
  for (int i = 0; i < 6; ++i) {
    if (ev(i) > cut && ev(i) > 0.0) inv(i) = 1.0 / ev(i);
  }
  return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
}

double PebRecursion::peb() const {
  return std::sqrt(std::max(C_.topLeftCorner<3, 3>().trace(), 0.0));
}

std::vector<double> posterior_peb(const MotionModel& model, const Mat6& C0,
                                  const std::vector<MatX>& J, const std::vector<VecX>& R) {
  PebRecursion rec(model, C0);
  std::vector<double> out;
  out.reserve(J.size());
  for (std::size_t t = 0; t < J.size(); ++t) out.push_back(rec.update(J[t], R[t]));
  return out;
}

PowerMap power_map(const GridSpec& grid, const ChannelModel& model, int k, const CVec& c,
                   const CVec& v0, double tx_power) {
  if (grid.nx < 1 || grid.ny < 1) throw Error(ErrorKind::kInvalidConfig, "empty power-map grid");
  PowerMap map;
  map.grid = grid;
  const CVec g = model.bs_ris(k) * v0;
  for (int iy = 0; iy < grid.ny; ++iy) {
    const double y =
        grid.ny == 1 ? grid.y_min : grid.y_min + (grid.y_max - grid.y_min) * iy / (grid.ny - 1);
    for (int ix = 0; ix < grid.nx; ++ix) {
      const double x =
          grid.nx == 1 ? grid.x_min : grid.x_min + (grid.x_max - grid.x_min) * ix / (grid.nx - 1);
      map.x.push_back(x);
      map.y.push_back(y);
      map.watts.push_back(tx_power *
                          received_power(effective_row(model, k, Vec3(x, y, grid.z), g), c));
    }
  }
  return map;
}

void write_cdf_csv(std::ostream& os, const ErrorStats& stats) {
  os << "threshold,ccdf\n";
  for (std::size_t i = 0; i < stats.thresholds.size(); ++i) {
    os << format_double(stats.thresholds[i]) << ',' << format_double(stats.ccdf[i]) << '\n';
  }
}

void write_powermap_csv(std::ostream& os, const PowerMap& map) {
  os << "x,y,dBW,watts\n";
  for (std::size_t i = 0; i < map.watts.size(); ++i) {
    const double dbw = map.watts[i] > 0.0 ? 10.0 * std::log10(map.watts[i])
                                          : -std::numeric_limits<double>::infinity();
    os << format_double(map.x[i]) << ',' << format_double(map.y[i]) << ',' << format_double(dbw)
       << ',' << format_double(map.watts[i]) << '\n';
  }
}

void write_peb_csv(std::ostream& os, const std::vector<double>& rmse,
                   const std::vector<double>& peb) {
  os << "step,rmse,peb\n";
  for (std::size_t t = 0; t < rmse.size() && t < peb.size(); ++t) {
    os << t << ',' << format_double(rmse[t]) << ',' << format_double(peb[t]) << '\n';
  }
}

}  // namespace ristrack

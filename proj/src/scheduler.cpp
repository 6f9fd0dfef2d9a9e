#include "ristrack/scheduler.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <ostream>

#include "ristrack/format.hpp"

namespace ristrack {

const char* to_string(Policy policy) {
  switch (policy) {
    case Policy::kOpt: return "OPT";
    case Policy::kOptAo: return "OPT-AO";
    case Policy::kBetaOpt: return "bOPT";
    case Policy::kBetaOptAo: return "bOPT-AO";
    case Policy::kFocus: return "FOCUS";
    case Policy::kBetaFocus: return "bFOCUS";
    case Policy::kExternal: return "EXTERNAL-PROFILE";
  }
  return "?";
}

Policy parse_policy(const std::string& name) {
  std::string n;
  for (char ch : name) n += static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
  for (const std::string prefix : {"BETA", "\xCE\x92", "\xCE\xB2"}) {  // BETA, Greek B / b in UTF-8
    if (n.rfind(prefix, 0) == 0) n = "B" + n.substr(prefix.size());
  }
  if (n == "OPT") return Policy::kOpt;
  if (n == "OPT-AO" || n == "OPTAO") return Policy::kOptAo;
  if (n == "BOPT") return Policy::kBetaOpt;
  if (n == "BOPT-AO" || n == "BOPTAO") return Policy::kBetaOptAo;
  if (n == "FOCUS") return Policy::kFocus;
  if (n == "BFOCUS") return Policy::kBetaFocus;
  if (n == "EXTERNAL-PROFILE" || n == "EXTERNAL") return Policy::kExternal;
  throw Error(ErrorKind::kInvalidConfig, "unknown policy '" + name + "'");
}

bool allocates_power(Policy p) {
  return p == Policy::kBetaOpt || p == Policy::kBetaOptAo || p == Policy::kBetaFocus;
}

UncertaintyDensity build_uncertainty_gmm(const TrackState& state, const MotionModel& model,
                                         int n_r) {
  if (n_r < 1) throw Error(ErrorKind::kInvalidConfig, "N_r must be >= 1");
  UncertaintyDensity d;
  TrackState s = state;
  for (int q = 1; q <= n_r; ++q) {
    s = predict(s, model);
    d.components.push_back({s.m.head<3>(), s.Sigma.topLeftCorner<3, 3>()});
  }
  return d;
}

std::vector<double> EpisodeTrace::errors() const {
  std::vector<double> e;
  e.reserve(steps.size());
  for (const auto& s : steps) e.push_back(s.error);
  return e;
}

ErrorStats error_stats(const std::vector<EpisodeTrace>& traces, int grid_points) {
  std::vector<double> all;
  for (const auto& t : traces) {
    const auto e = t.errors();
    all.insert(all.end(), e.begin(), e.end());
  }
  return error_stats(std::move(all), grid_points);
}

Vec6 draw_initial_state(const Scenario& sc, Rng& rng) {
  Vec6 s = Vec6::Zero();
  if (!sc.initial.random) {
    s.head<3>() = sc.initial.position;
    s.tail<3>() = sc.initial.velocity;
    return s;
  }
  const auto& ws = sc.workspace;
  std::uniform_real_distribution<double> ux(ws.x_min, ws.x_max), uy(ws.y_min, ws.y_max),
      uh(-kPi, kPi);
  s(0) = ux(rng);
  s(1) = uy(rng);
  s(2) = ws.z;
  const double heading = uh(rng);
  s(3) = sc.initial.speed_mps * std::cos(heading);
  s(4) = sc.initial.speed_mps * std::sin(heading);
  return s;
}

namespace {

void reflect_axis(double& x, double& v, double lo, double hi) {
  for (int i = 0; i < 8 && (x < lo || x > hi); ++i) {
    if (x < lo) {
      x = 2.0 * lo - x;
      v = -v;
    } else if (x > hi) {
      x = 2.0 * hi - x;
      v = -v;
    }
  }
  x = std::clamp(x, lo, hi);
}

std::vector<int> valid_rows(const std::vector<std::vector<int>>& sets,
                            const std::vector<bool>& valid) {
  std::vector<int> rows;
  for (std::size_t k = 0; k < sets.size(); ++k) {
    if (valid[k]) rows.insert(rows.end(), sets[k].begin(), sets[k].end());
  }
  std::sort(rows.begin(), rows.end());
  return rows;
}

VecX take(const VecX& v, const std::vector<int>& rows) {
  VecX out(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) out(i) = v(rows[i]);
  return out;
}

MatX take_rows(const MatX& M, const std::vector<int>& rows) {
  MatX out(rows.size(), M.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(i) = M.row(rows[i]);
  return out;
}

// Index sets re-expressed in the compacted row numbering.
std::vector<std::vector<int>> compact_sets(const std::vector<std::vector<int>>& sets,
                                           const std::vector<int>& rows) {
  std::vector<std::vector<int>> out(sets.size());
  for (std::size_t k = 0; k < sets.size(); ++k) {
    for (int idx : sets[k]) {
      const auto it = std::lower_bound(rows.begin(), rows.end(), idx);
      if (it != rows.end() && *it == idx) out[k].push_back(static_cast<int>(it - rows.begin()));
    }
  }
  return out;
}

}  // namespace

EpisodeTrace run_episode(const ChannelModel& model, Policy policy, Rng& rng,
                         const EpisodeOptions& options) {
  const Scenario& sc = model.scenario();
  const int K = sc.num_ris();
  const int n_rx = sc.n_rx();
  const int L = sc.rf.pilot_length;
  const double sigma2 = noise_power(sc.rf);
  const double p_tx = sc.rf.pilot_power_w;
  const double alpha = sc.tracker.alpha;
  const double noise_num =
      sc.tracker.noise_numerator == NoiseNumerator::kPostProjection ? sigma2 / L : sigma2;
  const int n_r = sc.timescale.steps_per_ris_update;
  const int horizon = n_r > 0 ? n_r : sc.timescale.episode_steps;
  const MotionModel mm = make_motion_model(sc.timescale.dt_s, sc.motion.accel_variance);
  const auto sets = observation_index_sets(K, n_rx);
  if (policy == Policy::kExternal && !options.external) {
    throw Error(ErrorKind::kInvalidConfig, "EXTERNAL-PROFILE needs an external profile source");
  }
  // Truth, fading and pilot noise come from `env`; optimiser sampling from
  // `algo`, so every policy sees the same trajectory for a given seed.
  Rng env(rng());
  Rng algo(rng());

  Eigen::SelfAdjointEigenSolver<Mat6> pes(mm.P);
  const Mat6 p_root = pes.eigenvectors() * pes.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
  std::normal_distribution<double> normal(0.0, 1.0);
  const double yaw_std = sc.ue.orientation_error_std_deg * kPi / 180.0;
  auto draw_yaw = [&]() { return yaw_std > 0.0 ? yaw_std * normal(env) : 0.0; };

  EpisodeTrace trace;
  trace.policy = policy;
  Vec6 truth = options.initial_state ? *options.initial_state : draw_initial_state(sc, env);
  TrackState state;
  state.m = truth;
  state.Sigma = mm.P;
  PebRecursion peb(mm, mm.P);

  const double episode_yaw = sc.orientation_mode == OrientationErrorMode::kPerEpisode ? draw_yaw() : 0.0;
  auto current_yaw = [&]() {
    return sc.orientation_mode == OrientationErrorMode::kPerEpisode ? episode_yaw : draw_yaw();
  };

  std::vector<CMat> static_null;
  {
    std::vector<CMat> G;
    for (int k = 0; k < K; ++k) G.push_back(model.bs_ris(k));
    static_null = static_nullspaces(G);
  }
  auto bd_beams = [&](const ChannelSet& cs) {
    std::vector<CVec> v;
    for (int k = 0; k < K; ++k) {
      v.push_back(bd_beamformer(cs.G[k], restrict_nullspace(static_null[k], cs.H, k)));
    }
    return v;
  };

  ChannelSet cs = model.realize(truth.head<3>(), current_yaw(), env);
  std::vector<CVec> beams = bd_beams(cs);
  std::vector<CVec> profiles;
  for (int k = 0; k < K; ++k) {
    profiles.push_back(sc.optimizer.initial_profile == InitialProfile::kFocus
                           ? focus_profile(model, k, state.position(), beams[k])
                           : CVec::Ones(sc.ris[k].size()));
  }
  const VecX beta_uniform = VecX::Constant(K, std::sqrt(p_tx / K));
  VecX beta = beta_uniform;
  std::vector<double> prev_power;

  const double diameter = sc.workspace.diameter();
  for (int t = 0; t < sc.timescale.episode_steps; ++t) {
    if (t == 0 || (n_r > 0 && t % n_r == 0)) {
      const UncertaintyDensity density = build_uncertainty_gmm(state, mm, horizon);
      RisUpdateRecord rec;
      rec.step = t;
      if (policy == Policy::kExternal) {
        auto ext = options.external(t, density, beams);
        if (static_cast<int>(ext.size()) != K) {
          throw Error(ErrorKind::kInvalidConfig, "external profile source returned wrong count");
        }
        for (int k = 0; k < K; ++k) {
          if (ext[k].size() != profiles[k].size()) {
            throw Error(ErrorKind::kInvalidConfig, "external profile has wrong length");
          }
          profiles[k] = project_unit_disk(ext[k]);
        }
      } else {
        for (int k = 0; k < K; ++k) {
          if (policy == Policy::kFocus || policy == Policy::kBetaFocus) {
            profiles[k] = focus_profile(model, k, state.position(), beams[k]);
          } else {
            const RisMode mode = (policy == Policy::kOpt || policy == Policy::kBetaOpt)
                                     ? RisMode::kOpt
                                     : RisMode::kOptAo;
            try {
              auto res = optimize_ris(density, model, k, beams[k], mode, sc.optimizer, algo, profiles[k]);
              profiles[k] = res.c;
              rec.mean_inverse_power.push_back(res.mean_inverse_power);
              rec.half_steps.push_back(std::move(res.half_steps));
            } catch (const Error& e) {
              // every sample outside the RIS's reach: keep the profile in place
              if (e.kind() != ErrorKind::kNumericDegenerate) throw;
              rec.mean_inverse_power.push_back(std::numeric_limits<double>::infinity());
              rec.half_steps.emplace_back();
            }
          }
        }
      }
      rec.profiles = profiles;
      rec.beams = beams;
      trace.updates.push_back(std::move(rec));
    }

    const TrackState prior = predict(state, mm);

    // Truth motion.
    Vec6 z;
    for (int i = 0; i < 6; ++i) z(i) = normal(env);
    truth = mm.T * truth + p_root * z;
    if (sc.workspace.reflect) {
      reflect_axis(truth(0), truth(3), sc.workspace.x_min, sc.workspace.x_max);
      reflect_axis(truth(1), truth(4), sc.workspace.y_min, sc.workspace.y_max);
    }

    cs = model.realize(truth.head<3>(), current_yaw(), env);
    beams = bd_beams(cs);

    const Linearization lin = linearize(model, prior.position(), profiles, beams,
                                        sc.tracker.jacobian, true, true);
    const std::vector<int> rows = valid_rows(sets, lin.valid);
    const MatX J = take_rows(lin.J, rows);

    if (allocates_power(policy) && !prev_power.empty() && !rows.empty()) {
      const VecX Rb = take(breve_R(prev_power, beta, p_tx, alpha, sigma2, n_rx, L,
                                   sc.tracker.noise_numerator),
                           rows);
      const MatX Kt = fixed_kalman_gain(prior.Sigma, J, Rb);
      const VecX xi = xi_weights(Kt, alpha, noise_num, compact_sets(sets, rows));
      UncertaintyDensity next;
      next.components.push_back({prior.position(), prior.Sigma.topLeftCorner<3, 3>()});
      VecX gamma(K);
      for (int k = 0; k < K; ++k) {
        double pi = 0.0;
        try {
          pi = pi_value(model, k, profiles[k], beams[k], next, sc.optimizer.pi_samples, algo,
                        sc.optimizer.m_factor);
        } catch (const Error& e) {
          if (e.kind() != ErrorKind::kNumericDegenerate) throw;
        }
        gamma(k) = xi(k) * pi;
      }
      const double gmax = gamma.maxCoeff();
      if (gmax > 0.0 && std::isfinite(gmax)) {
        for (int k = 0; k < K; ++k) {
          if (!(gamma(k) > 0.0) || !std::isfinite(gamma(k))) gamma(k) = 1e-12 * gmax;
        }
        beta = allocate_power(gamma, p_tx, sc.power.beta_floor_ratio).beta;
      } else {
        beta = beta_uniform;
      }
    } else {
      beta = beta_uniform;
    }

    const PrecoderSet pre = assemble_precoders(beams, beta, p_tx);
    const auto y = simulate_projected_pilots(cs, profiles, pre, L, sigma2, env);

    StepRecord rec;
    rec.step = t + 1;
    rec.beta = beta;
    rec.r_blocks = VecX::Zero(K);
    rec.ris_power = VecX::Zero(K);
    for (int k = 0; k < K; ++k) rec.ris_power(k) = useful_signal(cs, profiles, pre, k).squaredNorm() / n_rx;

    prev_power.assign(K, 0.0);
    for (int k = 0; k < K; ++k) prev_power[k] = y[k].squaredNorm();

    state = prior;
    rec.measurement_used = false;
    if (!rows.empty()) {
      try {
        const VecX o = build_observation(y);
        const VecX R = noise_cov_estimate(y, alpha, sigma2, L, n_rx, sc.tracker.noise_numerator);
        for (int k = 0; k < K; ++k) rec.r_blocks(k) = R(sets[k].front());
        state = ekf_update(prior, take(o, rows), take(lin.h, rows), J, take(R, rows));
        rec.measurement_used = true;
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::kNumericDegenerate && e.kind() != ErrorKind::kSingularInnovation) {
          throw;
        }
      }
    }

    if (options.record_peb) {
      std::vector<CVec> f;
      for (int k = 0; k < K; ++k) f.push_back(pre.column(k));
      const Linearization lt = linearize(model, truth.head<3>(), profiles, f,
                                         JacobianMode::kExact, true, true);
      const std::vector<int> trows = valid_rows(sets, lt.valid);
      VecX Rp(2 * K * phase_pairs(n_rx));
      if (sc.tracker.peb_noise == PebNoise::kPhysical) {
        const auto a = useful_amplitudes(model, truth.head<3>(), profiles, f);
        for (int k = 0; k < K; ++k) {
          const double pw = a[k].squaredNorm() / n_rx;
          for (int idx : sets[k]) Rp(idx) = pw > 0.0 ? (sigma2 / L) / pw : 1.0;
        }
      } else {
        Rp = noise_cov_estimate(y, alpha, sigma2, L, n_rx, sc.tracker.noise_numerator);
      }
      rec.peb = peb.update(take_rows(lt.J, trows), take(Rp, trows));
    }
    if (options.record_rate) {
      rec.rate = achievable_rate(cascaded_channel(cs, profiles), sigma2, p_tx);
    }

    rec.truth = truth;
    rec.estimate = state.m;
    rec.sigma_diag = state.Sigma.diagonal();
    rec.error = (state.position() - truth.head<3>()).norm();
    if (!std::isfinite(rec.error) || rec.error > diameter) trace.diverged = true;
    trace.steps.push_back(std::move(rec));
  }
  return trace;
}

void write_trace_header(std::ostream& os, int num_ris) {
  os << "run,step,x,y,z,vx,vy,vz,x_hat,y_hat,z_hat,vx_hat,vy_hat,vz_hat,var_x,var_y,var_z,error,rate,peb";
  for (int k = 0; k < num_ris; ++k) os << ",power_" << k << ",beta_" << k << ",r_" << k;
  os << '\n';
}

void write_trace_rows(std::ostream& os, const EpisodeTrace& trace, int run) {
  for (const auto& s : trace.steps) {
    os << run << ',' << s.step;
    for (int i = 0; i < 6; ++i) os << ',' << format_double(s.truth(i));
    for (int i = 0; i < 6; ++i) os << ',' << format_double(s.estimate(i));
    for (int i = 0; i < 3; ++i) os << ',' << format_double(s.sigma_diag(i));
    os << ',' << format_double(s.error) << ',' << format_double(s.rate) << ','
       << format_double(s.peb);
    for (Eigen::Index k = 0; k < s.beta.size(); ++k) {
      os << ',' << format_double(s.ris_power(k)) << ',' << format_double(s.beta(k)) << ','
         << format_double(s.r_blocks(k));
    }
    os << '\n';
  }
}

}  // namespace ristrack

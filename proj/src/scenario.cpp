#include "ristrack/scenario.hpp"

#include <sstream>
#include <string>
#include <vector>

namespace ristrack {

Scenario default_scenario() {
  Scenario s;
  const double half_lambda = 0.5 * s.rf.wavelength();

  s.bs.kind = ArrayKind::kUra;
  s.bs.n_rows = 16;
  s.bs.n_cols = 2;
  s.bs.element_spacing = half_lambda;
  s.bs.reference_position = Vec3(30.0, 15.0, 2.0);
  s.bs.row_axis = -Vec3::UnitY();  // broadside towards -x
  s.bs.col_axis = Vec3::UnitZ();

  for (const Vec3& center : {Vec3(0.0, 15.0, 3.0), Vec3(5.0, 0.0, 3.0), Vec3(10.0, 30.0, 3.0)}) {
    ArraySpec ris;
    ris.kind = ArrayKind::kUra;
    ris.n_rows = 80;
    ris.n_cols = 5;
    ris.element_spacing = half_lambda;
    ris.reference_position = center;
    ris.row_axis = Vec3::UnitY();  // broadside towards +x
    ris.col_axis = Vec3::UnitZ();
    s.ris.push_back(ris);
  }

  s.ue.kind = ArrayKind::kUla;
  s.ue.n_rows = 4;
  s.ue.n_cols = 1;
  s.ue.element_spacing = half_lambda;
  s.ue.row_axis = Vec3::UnitY();
  s.ue.col_axis = Vec3::UnitZ();

  s.timescale.dt_s = 0.03;
  s.timescale.steps_per_ris_update = 100;
  s.timescale.episode_steps = 400;  // 12 s
  return s;
}

void validate(const Scenario& s) {
  std::vector<std::string> problems;
  auto check = [&](bool ok, const std::string& msg) {
    if (!ok) problems.push_back(msg);
  };
  auto check_array = [&](const ArraySpec& a, const std::string& name) {
    try {
      validate(a);
    } catch (const Error& e) {
      problems.push_back(name + ": " + e.what());
    }
  };

  check(s.rf.carrier_hz > 0.0, "carrier frequency must be > 0");
  check(s.rf.subcarrier_bandwidth_hz > 0.0, "subcarrier bandwidth must be > 0");
  check(s.rf.pilot_power_w > 0.0, "pilot power must be > 0");
  check(s.rf.total_tx_power_w > 0.0, "total transmit power must be > 0");
  check(s.rf.rice_direct >= 0.0, "direct-link Rice factor must be >= 0");
  check(s.rf.rice_ris >= 0.0, "RIS-UE Rice factor must be >= 0");
  check(s.rf.pilot_length >= static_cast<int>(s.ris.size()),
        "pilot length must be >= number of RISs");
  check(!s.ris.empty(), "at least one RIS is required");
  check(s.pattern.exponent >= 0.0, "radiation exponent q must be >= 0");
  check(s.pattern.cell_gain > 0.0 && s.pattern.tx_gain > 0.0 && s.pattern.rx_gain > 0.0,
        "antenna and cell gains must be > 0");
  check_array(s.bs, "bs");
  check_array(s.ue, "ue");
  for (std::size_t k = 0; k < s.ris.size(); ++k) check_array(s.ris[k], "ris[" + std::to_string(k) + "]");
  check(s.ue.size() >= 2, "UE needs at least two antennas");
  check(s.timescale.dt_s > 0.0, "dt must be > 0");
  check(s.timescale.steps_per_ris_update >= 0, "N_r must be >= 0 (0 = never re-optimise)");
  check(s.timescale.episode_steps >= 1, "episode must have at least one step");
  check((s.motion.accel_variance.array() >= 0.0).all(), "acceleration variances must be >= 0");
  check(s.tracker.alpha >= 0.0, "alpha must be >= 0");
  check(s.optimizer.n_bcd >= 0, "n_bcd must be >= 0");
  check(s.optimizer.n_samples >= 1, "n_samples must be >= 1");
  check(s.optimizer.m_factor > 1.0, "M must be > 1");
  check(s.optimizer.pi_samples >= 1, "pi_samples must be >= 1");
  check(s.ue.orientation_error_std_deg >= 0.0, "orientation error std must be >= 0");
  check(s.workspace.x_max > s.workspace.x_min && s.workspace.y_max > s.workspace.y_min,
        "workspace bounds must be increasing");

  if (!problems.empty()) {
    std::ostringstream os;
    os << problems.size() << " invalid setting(s):";
    for (const auto& p : problems) os << "\n  - " << p;
    throw Error(ErrorKind::kInvalidConfig, os.str());
  }
}

}  // namespace ristrack

#include "ristrack/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

namespace ristrack {

using nlohmann::json;

namespace {

// Walks one JSON object, remembering which keys were consumed so that typos
// can be reported as unknown keys.
class Reader {
 public:
  Reader(const json* node, std::string path, std::vector<std::string>& problems)
      : node_(node), path_(std::move(path)), problems_(&problems) {
    if (node_ && !node_->is_object()) {
      problem("expected an object");
      node_ = nullptr;
    }
  }

  bool present() const { return node_ != nullptr; }
  bool has(const std::string& key) const { return node_ && node_->contains(key); }

  template <class T, class Convert>
  bool read(const std::string& key, T& out, Convert convert, const char* expected) {
    if (!node_) return false;
    const auto it = node_->find(key);
    if (it == node_->end()) return false;
    seen_.insert(key);
    if (!convert(*it, out)) {
      problems_->push_back(where(key) + ": expected " + expected);
      return false;
    }
    return true;
  }

  bool number(const std::string& key, double& out) {
    return read(key, out, [](const json& j, double& o) {
      if (!j.is_number()) return false;
      o = j.get<double>();
      return true;
    }, "a number");
  }

  // Number or the strings "inf" / "infinity".
  bool extended_number(const std::string& key, double& out) {
    return read(key, out, [](const json& j, double& o) {
      if (j.is_number()) {
        o = j.get<double>();
        return true;
      }
      if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "inf" || s == "infinity") {
          o = std::numeric_limits<double>::infinity();
          return true;
        }
      }
      return false;
    }, "a number or \"inf\"");
  }

  bool integer(const std::string& key, int& out) {
    return read(key, out, [](const json& j, int& o) {
      if (!j.is_number_integer()) return false;
      const auto v = j.get<long long>();
      if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) return false;
      o = static_cast<int>(v);
      return true;
    }, "an integer");
  }

  bool u64(const std::string& key, std::uint64_t& out) {
    return read(key, out, [](const json& j, std::uint64_t& o) {
      if (j.is_number_unsigned()) {
        o = j.get<std::uint64_t>();
        return true;
      }
      if (j.is_number_integer() && j.get<long long>() >= 0) {
        o = static_cast<std::uint64_t>(j.get<long long>());
        return true;
      }
      return false;
    }, "a non-negative integer");
  }

  bool boolean(const std::string& key, bool& out) {
    return read(key, out, [](const json& j, bool& o) {
      if (!j.is_boolean()) return false;
      o = j.get<bool>();
      return true;
    }, "true or false");
  }

  bool string(const std::string& key, std::string& out) {
    return read(key, out, [](const json& j, std::string& o) {
      if (!j.is_string()) return false;
      o = j.get<std::string>();
      return true;
    }, "a string");
  }

  bool vec3(const std::string& key, Vec3& out) {
    return read(key, out, [](const json& j, Vec3& o) {
      if (!j.is_array() || j.size() != 3) return false;
      for (int i = 0; i < 3; ++i) {
        if (!j[i].is_number()) return false;
        o(i) = j[i].get<double>();
      }
      return true;
    }, "an array of 3 numbers");
  }

  bool range(const std::string& key, double& lo, double& hi) {
    std::pair<double, double> r{lo, hi};
    const bool ok = read(key, r, [](const json& j, std::pair<double, double>& o) {
      if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) return false;
      o = {j[0].get<double>(), j[1].get<double>()};
      return true;
    }, "an array [min, max]");
    if (ok) std::tie(lo, hi) = r;
    return ok;
  }

  template <class E>
  bool choice(const std::string& key, E& out, const std::map<std::string, E>& options) {
    std::string expected = "one of";
    for (const auto& [name, value] : options) expected += " \"" + name + "\"";
    return read(key, out, [&](const json& j, E& o) {
      if (!j.is_string()) return false;
      const auto it = options.find(j.get<std::string>());
      if (it == options.end()) return false;
      o = it->second;
      return true;
    }, expected.c_str());
  }

  Reader child(const std::string& key) {
    if (!node_) return Reader(nullptr, where(key), *problems_);
    const auto it = node_->find(key);
    if (it == node_->end()) return Reader(nullptr, where(key), *problems_);
    seen_.insert(key);
    return Reader(&*it, where(key), *problems_);
  }

  const json* raw(const std::string& key) {
    if (!node_) return nullptr;
    const auto it = node_->find(key);
    if (it == node_->end()) return nullptr;
    seen_.insert(key);
    return &*it;
  }

  void require(const std::string& key) {
    if (!has(key)) problems_->push_back("missing required key '" + where(key) + "'");
  }

  void exclusive(const std::string& a, const std::string& b) {
    if (has(a) && has(b)) problem("give either '" + a + "' or '" + b + "', not both");
  }

  void problem(const std::string& msg) { problems_->push_back(path_ + ": " + msg); }

  void finish() {
    if (!node_) return;
    for (const auto& [key, value] : node_->items()) {
      if (!seen_.count(key)) problems_->push_back("unknown key '" + where(key) + "'");
    }
  }

  std::string where(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  std::vector<std::string>& problems() { return *problems_; }

 private:
  const json* node_;
  std::string path_;
  std::vector<std::string>* problems_;
  std::set<std::string> seen_;
};

const std::map<std::string, ArrayKind> kArrayKinds{{"ula", ArrayKind::kUla}, {"ura", ArrayKind::kUra}};
const std::map<std::string, NoiseNumerator> kNumerators{
    {"pre_projection", NoiseNumerator::kPreProjection},
    {"post_projection", NoiseNumerator::kPostProjection}};
const std::map<std::string, JacobianMode> kJacobians{
    {"exact", JacobianMode::kExact}, {"normalized_amplitude", JacobianMode::kNormalizedAmplitude}};
const std::map<std::string, PebNoise> kPebNoise{{"physical", PebNoise::kPhysical},
                                                {"filter_estimate", PebNoise::kFilterEstimate}};
const std::map<std::string, InitialProfile> kInitialProfiles{{"focus", InitialProfile::kFocus},
                                                             {"unit", InitialProfile::kUnit}};
const std::map<std::string, OrientationErrorMode> kOrientationModes{
    {"per_step", OrientationErrorMode::kPerStep}, {"per_episode", OrientationErrorMode::kPerEpisode}};

template <class E>
std::string name_of(const std::map<std::string, E>& options, E value) {
  for (const auto& [name, v] : options) {
    if (v == value) return name;
  }
  return "?";
}

void read_array(Reader r, ArraySpec& a, double wavelength, bool position_required) {
  if (!r.present()) return;
  r.choice("kind", a.kind, kArrayKinds);
  r.integer("rows", a.n_rows);
  r.integer("cols", a.n_cols);
  r.exclusive("spacing_m", "spacing_wavelengths");
  double spacing_wl = 0.0;
  r.number("spacing_m", a.element_spacing);
  if (r.number("spacing_wavelengths", spacing_wl)) a.element_spacing = spacing_wl * wavelength;
  if (position_required) r.require("position_m");
  r.vec3("position_m", a.reference_position);
  r.vec3("row_axis", a.row_axis);
  r.vec3("col_axis", a.col_axis);
  r.number("orientation_error_std_deg", a.orientation_error_std_deg);
  r.finish();
}

json array_json(const ArraySpec& a, bool with_position) {
  json j{{"kind", name_of(kArrayKinds, a.kind)},
         {"rows", a.n_rows},
         {"cols", a.n_cols},
         {"spacing_m", a.element_spacing},
         {"row_axis", {a.row_axis(0), a.row_axis(1), a.row_axis(2)}},
         {"col_axis", {a.col_axis(0), a.col_axis(1), a.col_axis(2)}},
         {"orientation_error_std_deg", a.orientation_error_std_deg}};
  if (with_position) {
    j["position_m"] = {a.reference_position(0), a.reference_position(1), a.reference_position(2)};
  }
  return j;
}

json vec_json(const Vec3& v) { return {v(0), v(1), v(2)}; }

json finite_or_inf(double v) { return std::isinf(v) ? json("inf") : json(v); }

void read_scenario(Reader r, Scenario& s) {
  if (!r.present()) return;
  {
    Reader rf = r.child("rf");
    double v = 0.0;
    rf.exclusive("carrier_hz", "carrier_ghz");
    rf.number("carrier_hz", s.rf.carrier_hz);
    if (rf.number("carrier_ghz", v)) s.rf.carrier_hz = v * 1e9;
    rf.exclusive("subcarrier_bandwidth_hz", "subcarrier_bandwidth_khz");
    rf.number("subcarrier_bandwidth_hz", s.rf.subcarrier_bandwidth_hz);
    if (rf.number("subcarrier_bandwidth_khz", v)) s.rf.subcarrier_bandwidth_hz = v * 1e3;
    rf.number("noise_density_dbm_hz", s.rf.noise_density_dbm_hz);
    rf.number("noise_figure_db", s.rf.noise_figure_db);
    rf.exclusive("total_tx_power_w", "total_tx_power_dbm");
    rf.number("total_tx_power_w", s.rf.total_tx_power_w);
    if (rf.number("total_tx_power_dbm", v)) s.rf.total_tx_power_w = std::pow(10.0, (v - 30.0) / 10.0);
    rf.exclusive("pilot_power_w", "pilot_power_mw");
    rf.number("pilot_power_w", s.rf.pilot_power_w);
    if (rf.number("pilot_power_mw", v)) s.rf.pilot_power_w = v * 1e-3;
    rf.integer("pilot_length", s.rf.pilot_length);
    rf.extended_number("rice_direct", s.rf.rice_direct);
    rf.extended_number("rice_ris", s.rf.rice_ris);
    rf.finish();
  }
  {
    Reader p = r.child("pattern");
    p.number("q", s.pattern.exponent);
    p.number("cell_gain_linear", s.pattern.cell_gain);
    p.number("tx_gain_linear", s.pattern.tx_gain);
    p.number("rx_gain_linear", s.pattern.rx_gain);
    p.finish();
  }
  const double wl = s.rf.wavelength();
  read_array(r.child("bs"), s.bs, wl, false);
  if (const json* ris = r.raw("ris")) {
    if (!ris->is_array() || ris->empty()) {
      r.problem("'ris' must be a non-empty array");
    } else {
      const ArraySpec tmpl = s.ris.empty() ? ArraySpec{} : s.ris.front();
      s.ris.assign(ris->size(), tmpl);
      for (std::size_t k = 0; k < ris->size(); ++k) {
        read_array(Reader(&(*ris)[k], r.where("ris[" + std::to_string(k) + "]"), r.problems()),
                   s.ris[k], wl, true);
      }
    }
  }
  read_array(r.child("ue"), s.ue, wl, false);
  {
    Reader m = r.child("motion");
    m.vec3("accel_variance_m2_s3", s.motion.accel_variance);
    m.finish();
  }
  {
    Reader t = r.child("timescale");
    t.number("dt_s", s.timescale.dt_s);
    t.integer("steps_per_ris_update", s.timescale.steps_per_ris_update);
    t.integer("episode_steps", s.timescale.episode_steps);
    t.finish();
  }
  {
    Reader t = r.child("tracker");
    t.number("alpha", s.tracker.alpha);
    t.choice("noise_numerator", s.tracker.noise_numerator, kNumerators);
    t.choice("jacobian", s.tracker.jacobian, kJacobians);
    t.choice("peb_noise", s.tracker.peb_noise, kPebNoise);
    t.finish();
  }
  {
    Reader o = r.child("optimizer");
    o.integer("n_bcd", s.optimizer.n_bcd);
    o.integer("n_samples", s.optimizer.n_samples);
    o.number("m_factor", s.optimizer.m_factor);
    o.number("early_stop_rel", s.optimizer.early_stop_rel);
    o.integer("ao_sweeps", s.optimizer.ao_sweeps);
    o.integer("pgd_max_iter", s.optimizer.pgd_max_iter);
    o.number("pgd_tol", s.optimizer.pgd_tol);
    o.integer("pi_samples", s.optimizer.pi_samples);
    o.choice("initial_profile", s.optimizer.initial_profile, kInitialProfiles);
    o.finish();
  }
  {
    Reader p = r.child("power");
    p.number("beta_floor_ratio", s.power.beta_floor_ratio);
    p.finish();
  }
  {
    Reader w = r.child("workspace");
    w.range("x_m", s.workspace.x_min, s.workspace.x_max);
    w.range("y_m", s.workspace.y_min, s.workspace.y_max);
    w.number("z_m", s.workspace.z);
    w.boolean("reflect", s.workspace.reflect);
    w.finish();
  }
  {
    Reader i = r.child("initial");
    i.boolean("random", s.initial.random);
    i.vec3("position_m", s.initial.position);
    i.vec3("velocity_mps", s.initial.velocity);
    i.number("speed_mps", s.initial.speed_mps);
    i.finish();
  }
  r.choice("orientation_error_mode", s.orientation_mode, kOrientationModes);
  r.finish();
}

void read_overrides(Reader r, Overrides& o) {
  if (!r.present()) return;
  auto opt_num = [&](const char* key, std::optional<double>& out) {
    double v = 0.0;
    if (r.extended_number(key, v)) out = v;
  };
  auto opt_int = [&](const char* key, std::optional<int>& out) {
    int v = 0;
    if (r.integer(key, v)) out = v;
  };
  opt_num("dt_s", o.dt_s);
  opt_int("steps_per_ris_update", o.steps_per_ris_update);
  opt_num("rice_ris", o.rice_ris);
  opt_num("orientation_error_std_deg", o.orientation_error_std_deg);
  opt_int("ris_rows", o.ris_rows);
  opt_int("ris_cols", o.ris_cols);
  opt_int("episode_steps", o.episode_steps);
  r.finish();
}

void read_campaign(Reader r, CampaignConfig& c) {
  if (!r.present()) return;
  if (const json* pol = r.raw("policies")) {
    if (!pol->is_array()) {
      r.problem("'policies' must be an array of names");
    } else {
      c.policies.clear();
      for (const auto& p : *pol) {
        if (!p.is_string()) {
          r.problem("policy names must be strings");
          continue;
        }
        try {
          c.policies.push_back(parse_policy(p.get<std::string>()));
        } catch (const Error& e) {
          r.problem(e.what());
        }
      }
    }
  }
  r.integer("runs", c.runs);
  r.u64("seed", c.seed);
  r.string("out", c.out);
  r.integer("parallel", c.parallel);
  r.boolean("record_rate", c.record_rate);
  r.boolean("record_peb", c.record_peb);
  r.boolean("write_traces", c.write_traces);
  r.integer("cdf_points", c.cdf_points);
  r.integer("rate_bins", c.rate_bins);
  {
    Reader m = r.child("map");
    if (m.present()) {
      MapSpec spec;
      m.range("x_m", spec.grid.x_min, spec.grid.x_max);
      m.integer("nx", spec.grid.nx);
      m.range("y_m", spec.grid.y_min, spec.grid.y_max);
      m.integer("ny", spec.grid.ny);
      m.number("z_m", spec.grid.z);
      m.integer("ris", spec.ris);
      m.finish();
      c.map = spec;
    }
  }
  {
    Reader s = r.child("sweep");
    if (s.present()) {
      SweepSpec spec;
      s.require("parameter");
      s.require("values");
      s.string("parameter", spec.parameter);
      if (const json* vals = s.raw("values")) {
        if (!vals->is_array() || vals->empty()) {
          s.problem("'values' must be a non-empty array of numbers");
        } else {
          for (const auto& v : *vals) {
            if (v.is_number()) {
              spec.values.push_back(v.get<double>());
            } else if (v.is_string() && (v == "inf" || v == "infinity")) {
              spec.values.push_back(std::numeric_limits<double>::infinity());
            } else {
              s.problem("'values' entries must be numbers");
            }
          }
        }
      }
      s.finish();
      c.sweep = spec;
    }
  }
  r.finish();
}

void check_campaign(const CampaignConfig& c, const Scenario& s, std::vector<std::string>& problems) {
  auto check = [&](bool ok, const std::string& msg) {
    if (!ok) problems.push_back(msg);
  };
  check(c.runs >= 1, "campaign.runs must be >= 1");
  check(!c.policies.empty(), "campaign.policies must not be empty");
  check(c.parallel >= 1, "campaign.parallel must be >= 1");
  check(c.cdf_points >= 2, "campaign.cdf_points must be >= 2");
  check(c.rate_bins >= 1, "campaign.rate_bins must be >= 1");
  check(!c.out.empty(), "campaign.out must not be empty");
  for (Policy p : c.policies) {
    check(p != Policy::kExternal, "EXTERNAL-PROFILE is library-only and cannot run from a config");
  }
  if (c.map) {
    check(c.map->grid.nx >= 1 && c.map->grid.ny >= 1, "campaign.map grid needs nx, ny >= 1");
    check(c.map->ris >= -1 && c.map->ris < s.num_ris(), "campaign.map.ris out of range");
  }
  if (c.sweep) {
    static const std::set<std::string> known{"dt_s", "steps_per_ris_update", "ris_period_s",
                                             "rice_ris", "orientation_error_std_deg"};
    check(known.count(c.sweep->parameter) == 1,
          "campaign.sweep.parameter must be one of dt_s, steps_per_ris_update, ris_period_s, "
          "rice_ris, orientation_error_std_deg");
  }
}

[[noreturn]] void throw_problems(const std::vector<std::string>& problems) {
  std::ostringstream os;
  os << problems.size() << " problem(s) in configuration:";
  for (const auto& p : problems) os << "\n  - " << p;
  throw Error(ErrorKind::kInvalidConfig, os.str());
}

}  // namespace

void apply_overrides(Scenario& s, const Overrides& o) {
  if (o.dt_s) s.timescale.dt_s = *o.dt_s;
  if (o.steps_per_ris_update) s.timescale.steps_per_ris_update = *o.steps_per_ris_update;
  if (o.rice_ris) s.rf.rice_ris = *o.rice_ris;
  if (o.orientation_error_std_deg) s.ue.orientation_error_std_deg = *o.orientation_error_std_deg;
  if (o.episode_steps) s.timescale.episode_steps = *o.episode_steps;
  for (auto& r : s.ris) {
    if (o.ris_rows) r.n_rows = *o.ris_rows;
    if (o.ris_cols) r.n_cols = *o.ris_cols;
  }
}

LoadedConfig from_json(const json& input) {
  const json& doc = input.contains("config") && input.contains("runs") ? input.at("config") : input;
  std::vector<std::string> problems;
  LoadedConfig out;
  out.scenario = default_scenario();
  Reader root(&doc, "", problems);
  root.string("scenario_path", out.campaign.scenario_path);
  read_scenario(root.child("scenario"), out.scenario);
  read_campaign(root.child("campaign"), out.campaign);
  read_overrides(root.child("overrides"), out.campaign.overrides);
  root.finish();
  apply_overrides(out.scenario, out.campaign.overrides);
  try {
    validate(out.scenario);
  } catch (const Error& e) {
    // validate() lists its findings one per line after a header
    std::istringstream is(e.what());
    std::string line;
    std::getline(is, line);
    while (std::getline(is, line)) {
      const auto pos = line.find("- ");
      problems.push_back(pos == std::string::npos ? line : line.substr(pos + 2));
    }
  }
  check_campaign(out.campaign, out.scenario, problems);
  if (!problems.empty()) throw_problems(problems);
  refresh_resolved(out);
  return out;
}

void refresh_resolved(LoadedConfig& config) {
  // overrides are already folded into the scenario
  CampaignConfig folded = config.campaign;
  folded.overrides = Overrides{};
  config.resolved = to_json(config.scenario, folded);
}

LoadedConfig parse_config(const std::string& text, const std::string& origin) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    const std::size_t end = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
    for (std::size_t i = 0; i < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::string msg = e.what();
    const auto pos = msg.find("syntax error");
    if (pos != std::string::npos) msg = msg.substr(pos);
    throw Error(ErrorKind::kParse, origin + ":" + std::to_string(line) + ":" + std::to_string(col) +
                                       ": " + msg);
  }
  return from_json(doc);
}

LoadedConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open config '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  LoadedConfig cfg = parse_config(ss.str(), path);
  if (cfg.campaign.scenario_path.empty()) {
    cfg.campaign.scenario_path = path;
    refresh_resolved(cfg);
  }
  return cfg;
}

json to_json(const Scenario& s, const CampaignConfig& c) {
  json sc;
  sc["rf"] = {{"carrier_hz", s.rf.carrier_hz},
              {"subcarrier_bandwidth_hz", s.rf.subcarrier_bandwidth_hz},
              {"noise_density_dbm_hz", s.rf.noise_density_dbm_hz},
              {"noise_figure_db", s.rf.noise_figure_db},
              {"total_tx_power_w", s.rf.total_tx_power_w},
              {"pilot_power_w", s.rf.pilot_power_w},
              {"pilot_length", s.rf.pilot_length},
              {"rice_direct", finite_or_inf(s.rf.rice_direct)},
              {"rice_ris", finite_or_inf(s.rf.rice_ris)}};
  sc["pattern"] = {{"q", s.pattern.exponent},
                   {"cell_gain_linear", s.pattern.cell_gain},
                   {"tx_gain_linear", s.pattern.tx_gain},
                   {"rx_gain_linear", s.pattern.rx_gain}};
  sc["bs"] = array_json(s.bs, true);
  sc["ris"] = json::array();
  for (const auto& r : s.ris) sc["ris"].push_back(array_json(r, true));
  sc["ue"] = array_json(s.ue, false);
  sc["motion"] = {{"accel_variance_m2_s3", vec_json(s.motion.accel_variance)}};
  sc["timescale"] = {{"dt_s", s.timescale.dt_s},
                     {"steps_per_ris_update", s.timescale.steps_per_ris_update},
                     {"episode_steps", s.timescale.episode_steps}};
  sc["tracker"] = {{"alpha", s.tracker.alpha},
                   {"noise_numerator", name_of(kNumerators, s.tracker.noise_numerator)},
                   {"jacobian", name_of(kJacobians, s.tracker.jacobian)},
                   {"peb_noise", name_of(kPebNoise, s.tracker.peb_noise)}};
  sc["optimizer"] = {{"n_bcd", s.optimizer.n_bcd},
                     {"n_samples", s.optimizer.n_samples},
                     {"m_factor", s.optimizer.m_factor},
                     {"early_stop_rel", s.optimizer.early_stop_rel},
                     {"ao_sweeps", s.optimizer.ao_sweeps},
                     {"pgd_max_iter", s.optimizer.pgd_max_iter},
                     {"pgd_tol", s.optimizer.pgd_tol},
                     {"pi_samples", s.optimizer.pi_samples},
                     {"initial_profile", name_of(kInitialProfiles, s.optimizer.initial_profile)}};
  sc["power"] = {{"beta_floor_ratio", s.power.beta_floor_ratio}};
  sc["workspace"] = {{"x_m", {s.workspace.x_min, s.workspace.x_max}},
                     {"y_m", {s.workspace.y_min, s.workspace.y_max}},
                     {"z_m", s.workspace.z},
                     {"reflect", s.workspace.reflect}};
  sc["initial"] = {{"random", s.initial.random},
                   {"position_m", vec_json(s.initial.position)},
                   {"velocity_mps", vec_json(s.initial.velocity)},
                   {"speed_mps", s.initial.speed_mps}};
  sc["orientation_error_mode"] = name_of(kOrientationModes, s.orientation_mode);

  json camp;
  camp["policies"] = json::array();
  for (Policy p : c.policies) camp["policies"].push_back(to_string(p));
  camp["runs"] = c.runs;
  camp["seed"] = c.seed;
  camp["out"] = c.out;
  camp["parallel"] = c.parallel;
  camp["record_rate"] = c.record_rate;
  camp["record_peb"] = c.record_peb;
  camp["write_traces"] = c.write_traces;
  camp["cdf_points"] = c.cdf_points;
  camp["rate_bins"] = c.rate_bins;
  if (c.map) {
    const auto& g = c.map->grid;
    camp["map"] = {{"x_m", {g.x_min, g.x_max}}, {"nx", g.nx}, {"y_m", {g.y_min, g.y_max}},
                   {"ny", g.ny},                {"z_m", g.z}, {"ris", c.map->ris}};
  }
  if (c.sweep) {
    json vals = json::array();
    for (double v : c.sweep->values) vals.push_back(finite_or_inf(v));
    camp["sweep"] = {{"parameter", c.sweep->parameter}, {"values", vals}};
  }

  json doc{{"scenario", sc}, {"campaign", camp}};
  json ov = json::object();
  const Overrides& o = c.overrides;
  if (o.dt_s) ov["dt_s"] = *o.dt_s;
  if (o.steps_per_ris_update) ov["steps_per_ris_update"] = *o.steps_per_ris_update;
  if (o.rice_ris) ov["rice_ris"] = finite_or_inf(*o.rice_ris);
  if (o.orientation_error_std_deg) ov["orientation_error_std_deg"] = *o.orientation_error_std_deg;
  if (o.ris_rows) ov["ris_rows"] = *o.ris_rows;
  if (o.ris_cols) ov["ris_cols"] = *o.ris_cols;
  if (o.episode_steps) ov["episode_steps"] = *o.episode_steps;
  if (!ov.empty()) doc["overrides"] = ov;
  return doc;
}

std::string config_hash(const json& resolved) {
  // output location and worker count do not change results
  json keyed = resolved;
  if (keyed.contains("campaign")) {
    keyed["campaign"].erase("out");
    keyed["campaign"].erase("parallel");
  }
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : keyed.dump()) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  static const char* hex = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, h >>= 4) out[i] = hex[h & 0xF];
  return out;
}

}  // namespace ristrack

#include "spindrift/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace spindrift {

TrajectoryState SimulationConfig::initial_state() const {
  TrajectoryState st;
  st.t = 0.0;
  const double c = std::cos(phi0), s = std::sin(phi0);
  st.x = Vec3(rho0 * c, rho0 * s, z0);
  st.v = Vec3(drho0 * c - rho0 * s * dphi0, drho0 * s + rho0 * c * dphi0, dz0);
  st.gamma = 1.0 / std::sqrt(1.0 - st.v.squaredNorm());
  return st;
}

SpinSettings SimulationConfig::spin_settings(int sign) const {
  SpinSettings s;
  s.enabled = sign != 0;
  s.sign = sign;
  s.convention = convention;
  s.chi = chi;
  return s;
}

namespace {

struct RawEntry {
  std::string value;
  int line;
  bool used = false;
};

using RawMap = std::map<std::string, RawEntry>;

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

RawMap tokenize(const std::string& text) {
  RawMap out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) +
                        ": expected 'key = value', got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty() || val.empty())
      throw ConfigError("line " + std::to_string(lineno) +
                        ": empty key or value");
    if (out.count(key))
      throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" +
                        key + "'");
    out[key] = {val, lineno};
  }
  return out;
}

class Reader {
 public:
  explicit Reader(RawMap& m) : m_(m) {}

  double num(const std::string& key, double fallback) {
    auto it = m_.find(key);
    if (it == m_.end()) return fallback;
    it->second.used = true;
    try {
      std::size_t pos = 0;
      const double v = std::stod(it->second.value, &pos);
      if (pos != it->second.value.size()) throw std::invalid_argument("trail");
      return v;
    } catch (const std::exception&) {
      throw ConfigError("line " + std::to_string(it->second.line) + ": key '" +
                        key + "' expects a number, got '" + it->second.value +
                        "'");
    }
  }

  int integer(const std::string& key, int fallback) {
    const double v = num(key, fallback);
    if (v != std::floor(v))
      throw ConfigError("key '" + key + "' expects an integer");
    return static_cast<int>(v);
  }

  bool boolean(const std::string& key, bool fallback) {
    auto it = m_.find(key);
    if (it == m_.end()) return fallback;
    it->second.used = true;
    const std::string& v = it->second.value;
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError("line " + std::to_string(it->second.line) + ": key '" +
                      key + "' expects a boolean, got '" + v + "'");
  }

  std::string str(const std::string& key, const std::string& fallback) {
    auto it = m_.find(key);
    if (it == m_.end()) return fallback;
    it->second.used = true;
    return it->second.value;
  }

  void check_all_used() const {
    for (const auto& [k, e] : m_)
      if (!e.used)
        throw ConfigError("line " + std::to_string(e.line) +
                          ": unknown key '" + k + "'");
  }

 private:
  RawMap& m_;
};

SimulationConfig build(RawMap raw) {
  Reader r(raw);
  SimulationConfig c;

  const std::string model = r.str("field.model", "bessel");
  if (model == "bessel")
    c.field.kind = FieldModel::Kind::bessel;
  else if (model == "crossed")
    c.field.kind = FieldModel::Kind::crossed;
  else if (model == "static_magnet")
    c.field.kind = FieldModel::Kind::static_magnet;
  else if (model == "none")
    c.field.kind = FieldModel::Kind::none;
  else
    throw ConfigError("key 'field.model': unknown model '" + model + "'");

  c.field.bessel.m_z = r.integer("field.m_z", 0);
  c.field.bessel.kperp = r.num("field.kperp", 0.04);
  c.field.bessel.amp_te = r.num("field.amp_te", 0.0);
  c.field.bessel.amp_tm = r.num("field.amp_tm", 0.0);
  c.field.bessel.phase_te = r.num("field.phase_te", 0.0);
  c.field.bessel.phase_tm = r.num("field.phase_tm", 0.0);
  c.field.b0 = r.num("field.b0", 0.0);
  c.field.gradient = r.num("field.gradient", 0.0);

  c.chi = r.num("chi", 0.0);
  if (c.chi < 0.0) throw ConfigError("key 'chi' must be >= 0");

  const std::string sm = r.str("spin.mode", "off");
  if (sm == "off")
    c.spin_mode = SpinMode::off;
  else if (sm == "plus")
    c.spin_mode = SpinMode::plus;
  else if (sm == "minus")
    c.spin_mode = SpinMode::minus;
  else if (sm == "both")
    c.spin_mode = SpinMode::both;
  else
    throw ConfigError("key 'spin.mode': expected off|plus|minus|both, got '" +
                      sm + "'");

  const std::string conv = r.str("spin.convention", "fig2");
  if (conv == "fig2")
    c.convention = SpinConvention::fig2;
  else if (conv == "strict")
    c.convention = SpinConvention::strict;
  else
    throw ConfigError("key 'spin.convention': expected fig2|strict, got '" +
                      conv + "'");

  c.rho0 = r.num("initial.rho", 0.0);
  c.phi0 = r.num("initial.phi", 0.0);
  c.z0 = r.num("initial.z", 0.0);
  c.drho0 = r.num("initial.drho", 0.0);
  c.dphi0 = r.num("initial.dphi", 0.0);
  c.dz0 = r.num("initial.dz", 0.0);

  c.t_end = r.num("time.end", 100.0);
  c.sample_interval = r.num("time.sample_interval", 1.0);
  if (c.sample_interval <= 0.0)
    throw ConfigError("key 'time.sample_interval' must be > 0");

  c.integrator.abs_tol = r.num("integrator.abs_tol", 1e-10);
  c.integrator.rel_tol = r.num("integrator.rel_tol", 1e-10);
  c.integrator.max_step = r.num("integrator.max_step", 1.0);
  c.integrator.initial_step = r.num("integrator.initial_step", 1e-3);
  if (c.integrator.abs_tol <= 0.0 || c.integrator.rel_tol <= 0.0)
    throw ConfigError("integrator tolerances must be > 0");
  c.integrator.sample_interval = c.sample_interval;

  c.sc_enabled = r.boolean("selfconsistent.enabled", false);
  c.sc.max_iters = r.integer("selfconsistent.max_iters", 1);
  c.sc.deviation_threshold = r.num("selfconsistent.threshold", 0.01);
  c.sc.regularize = r.boolean("selfconsistent.regularize", true);

  c.output_dir = r.str("output.dir", "out");
  c.output_prefix = r.str("output.prefix", "run");
  c.write_svg = r.boolean("output.svg", true);

  c.fieldmap_extent = r.num("fieldmap.extent", 60.0);
  c.fieldmap_n = r.integer("fieldmap.n", 201);
  if (c.fieldmap_n < 2) throw ConfigError("key 'fieldmap.n' must be >= 2");

  r.check_all_used();

  // cross-field validation
  const TrajectoryState st = c.initial_state();
  if (st.v.squaredNorm() >= 1.0)
    throw ConfigError(
        "initial velocity: |v| >= 1 (keys initial.drho/initial.dphi/"
        "initial.dz)");
  return c;
}

}  // namespace

SimulationConfig parse_config(const std::string& text) {
  return build(tokenize(text));
}

SimulationConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string override_config_text(const std::string& text,
                                 const std::string& key,
                                 const std::string& value) {
  std::istringstream in(text);
  std::ostringstream out;
  std::string line;
  bool replaced = false;
  while (std::getline(in, line)) {
    std::string stripped = line;
    const auto hash = stripped.find('#');
    if (hash != std::string::npos) stripped = stripped.substr(0, hash);
    const auto eq = stripped.find('=');
    if (eq != std::string::npos && trim(stripped.substr(0, eq)) == key) {
      out << key << " = " << value << "\n";
      replaced = true;
    } else {
      out << line << "\n";
    }
  }
  if (!replaced) out << key << " = " << value << "\n";
  return out.str();
}

}  // namespace spindrift

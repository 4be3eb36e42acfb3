#pragma once

// Flat, typed key-value configuration with dotted sections, e.g.
//
//   field.model = bessel
//   field.m_z = 1
//   chi = 0.024263
//   spin.mode = both
//
// '#' starts a comment.  Unknown keys and malformed lines are errors with
// line diagnostics (CLI exit code 2).

#include <map>
#include <stdexcept>
#include <string>

#include "spindrift/dynamics.hpp"
#include "spindrift/selfconsistent.hpp"

namespace spindrift {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class SpinMode { off, plus, minus, both };

struct SimulationConfig {
  FieldModel field;
  double chi = 0.0;
  SpinMode spin_mode = SpinMode::off;
  SpinConvention convention = SpinConvention::fig2;
  // initial conditions, cylindrical (units c/w and c)
  double rho0 = 0.0, phi0 = 0.0, z0 = 0.0;
  double drho0 = 0.0, dphi0 = 0.0, dz0 = 0.0;
  double t_end = 100.0;
  double sample_interval = 1.0;
  IntegratorOptions integrator;
  bool sc_enabled = false;
  SelfConsistentOptions sc;
  std::string output_dir = "out";
  std::string output_prefix = "run";
  bool write_svg = true;
  double fieldmap_extent = 60.0;  // half-width of the map, units c/w
  int fieldmap_n = 201;

  TrajectoryState initial_state() const;
  SpinSettings spin_settings(int sign) const;
};

// Parses a config file; throws ConfigError with "line N: ..." diagnostics.
SimulationConfig load_config(const std::string& path);
SimulationConfig parse_config(const std::string& text);

// Returns `text` with `key` rebound to `value` (replacing an existing
// assignment or appending a new line); sweep support.
std::string override_config_text(const std::string& text,
                                 const std::string& key,
                                 const std::string& value);

}  // namespace spindrift

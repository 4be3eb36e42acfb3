#pragma once

// Validation suites shared by the `validate` CLI subcommand and the
// acceptance test binary.  Each check carries its measured value and the
// pinned threshold so reports are machine-readable.

#include <string>
#include <vector>

#include "spindrift/config.hpp"

namespace spindrift {

struct CheckResult {
  std::string name;
  double measured = 0.0;
  double threshold = 0.0;
  // pass condition: measured <= threshold (default) or >= when flipped
  bool greater_is_pass = false;
  bool pass = false;
  std::string note;
};

struct SuiteResult {
  std::string suite;
  std::vector<CheckResult> checks;
  bool pass = true;
  double wall_seconds = 0.0;
};

// Suites: specfun, fields, eigen, basis, crossed, fig2, conservation,
// gradient, deltam, selfconsistent, ftensor, fieldmap.
std::vector<std::string> validation_suite_names();
SuiteResult run_validation_suite(const std::string& name);

// The desk-scale Stern-Gerlach configuration: m_z = 1 TE beam,
// kperp = 0.04, eps = 0.005, chi for a 0.1 nm beam, caption initial
// conditions.
SimulationConfig fig2_config();

}  // namespace spindrift

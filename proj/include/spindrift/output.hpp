#pragma once

// Trajectory CSV / summary JSON / SVG emitters.  CSV is UTF-8, comma
// separated, '.' decimal, with a schema-versioned header; identical inputs
// produce byte-identical files.

#include <string>
#include <vector>

#include "spindrift/config.hpp"
#include "spindrift/dynamics.hpp"

namespace spindrift {

struct TrajectoryRecord {
  double t, x, y, z, rho, phi;
  double vx, vy, vz, gamma;
  double mass_ratio;
  double lambda2_re, lambda2_im;
  double l_conserved, p_conserved;
  double s_real, s_imag;
};

// Derived per-sample records; phi is unwrapped continuously.
std::vector<TrajectoryRecord> make_records(const Trajectory& traj,
                                           const FieldModel& model,
                                           const SpinSettings& spin);

void write_trajectory_csv(const std::string& path,
                          const std::vector<TrajectoryRecord>& records);

// Simple SVG emitters: multi-series line plot and square heatmap.
struct Series {
  std::string label;
  std::string color = "#000000";
  std::vector<double> x, y;
};

void write_line_svg(const std::string& path, const std::string& title,
                    const std::string& xlabel, const std::string& ylabel,
                    const std::vector<Series>& series);

void write_heatmap_svg(const std::string& path, const std::string& title,
                       const std::vector<double>& values, int nx, int ny,
                       double x0, double x1, double y0, double y1);

std::string format_double(double v);  // shortest round-trip decimal

}  // namespace spindrift

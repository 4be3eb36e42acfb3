#pragma once

// Lab-time integration of the spin-corrected relativistic equations of
// motion,
//   dv/dt = (1/(m_r g)) [E + v x B - v (v.E)] - (1/(m_r g^2)) [grad m_r + v dt m_r]
// with m_r = m_eff/m from the selected spin branch (m_r = 1, zero gradient
// when spin is off).  Embedded Dormand-Prince 5(4) with cubic-Hermite dense
// output; the real/imaginary effective actions are accumulated by Simpson
// quadrature on the dense output.  A proper-time formulation of the same
// dynamics serves as a cross-check integrator.

#include <functional>
#include <string>
#include <vector>

#include "spindrift/fields.hpp"
#include "spindrift/invariants.hpp"
#include "spindrift/types.hpp"

namespace spindrift {

struct TrajectoryState {
  double t = 0.0;
  Vec3 x = Vec3::Zero();
  Vec3 v = Vec3::Zero();  // dx/dt, units of c
  double gamma = 1.0;
  double s_real = 0.0;  // accumulated S_eff, units hbar (0 when chi = 0)
  double s_imag = 0.0;  // accumulated s_eff, units hbar; non-increasing
  int branch_sign = 0;  // +1 / -1, 0 for spinless
};

struct SpinSettings {
  bool enabled = false;
  int sign = +1;
  SpinConvention convention = SpinConvention::fig2;
  double chi = 0.0;
};

struct IntegratorOptions {
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  double initial_step = 1e-3;
  double max_step = 1.0;
  double sample_interval = 1.0;
  // Emit every accepted step endpoint instead of the uniform grid (exact
  // solution states, no dense-output interpolation).
  bool sample_at_steps = false;
};

struct IntegrationDiagnostics {
  bool completed = false;
  std::string message;
  long steps_accepted = 0;
  long steps_rejected = 0;
  double max_gamma_error = 0.0;
  bool near_null_encountered = false;
};

struct Trajectory {
  std::vector<TrajectoryState> samples;
  IntegrationDiagnostics diag;
};

// Acceleration at a given state.  spin_on = false forces the Lorentz-only
// (Rubinow-Keller) limit.  Throws on |v| >= 1.
Vec3 acceleration(const Vec3& v, const FieldSample& f, const EigenMode& mode,
                  bool spin_on);

// Extra force channel used by the self-consistency iteration: additional
// (E, B) pair and additive corrections to (ell, l), all evaluated at a
// spacetime point.  Zero-initialized members leave the base dynamics
// bit-identical.
struct DynamicsCorrection {
  Vec3 e_extra = Vec3::Zero();
  Vec3 b_extra = Vec3::Zero();
  double d_ell = 0.0;
  double d_little_l = 0.0;
  Vec4 d_grad_mass = Vec4::Zero();
};
using CorrectionFn =
    std::function<DynamicsCorrection(double t, const Vec3& x)>;

struct IntegrateArgs {
  FieldModel model;
  SpinSettings spin;
  IntegratorOptions opts;
  double t_end = 0.0;
  CorrectionFn correction;  // optional
};

Trajectory integrate(const IntegrateArgs& args, const TrajectoryState& initial);

// Proper-time formulation (momentum state, mass shell enforced
// algebraically); samples are emitted at the same lab times for comparison.
Trajectory integrate_proper_time(const IntegrateArgs& args,
                                 const TrajectoryState& initial);

struct ConservedPair {
  double l = 0.0;  // generalized angular momentum
  double p = 0.0;  // generalized longitudinal momentum
};

// Constants of motion for the Bessel-type models (and their canonical
// reductions for the static magnet), evaluated with the radiation-gauge
// vector potential.
ConservedPair conserved_quantities(const TrajectoryState& st,
                                   const FieldModel& model, double mass_ratio);

struct DeBroglieCheck {
  double ratio = 0.0;  // lambda_dB / (2 pi L)
  bool flagged = false;
};

// hbar/(|eta| L) with L = min(1/kperp, 1/kz); throws for v = 0.
DeBroglieCheck debroglie_check(const TrajectoryState& st,
                               const FieldModel& model, double chi,
                               double mass_ratio);

// Effective-mass mode at a trajectory point (branch sign 0 = spinless).
EigenMode mode_at(const FieldModel& model, const SpinSettings& spin, double t,
                  const Vec3& x);

}  // namespace spindrift

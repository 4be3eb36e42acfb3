#pragma once

// Self-consistency machinery: the neglected correction terms P_mu and Q of
// the exact coupled scalar equations, the effective electromagnetic tensor
// with its tanh regularization, the iteration loop that re-runs
// trajectories with the corrected momenta and mass scalars, the approximate
// Pauli wavefunction, and an audit of every term dropped by the
// semiclassical approximation.

#include <vector>

#include "spindrift/dynamics.hpp"
#include "spindrift/spinors.hpp"

namespace spindrift {

struct CorrectionSample {
  // P_mu^{(j)}/d_j as a covariant 4-vector of log-derivative type
  // (units w/c); multiply by i*chi for the momentum correction in mc units.
  CVec4 p_vec = CVec4::Zero();
  // Split of p_vec: the pure-gauge log-derivative part and the
  // [1 - e^{-i dS}]-weighted part whose 1/lambda divergence is killed when
  // the two branch actions coincide on a null surface.
  CVec4 p_gauge = CVec4::Zero();
  CVec4 p_nongauge = CVec4::Zero();
  // Q^{(j)}/d_j (units (w/c)^2).
  Complex q_scalar{0.0, 0.0};
  // Closed-form effective tensor (dimensionless, see effective_tensor).
  Eigen::Matrix4d f_eff = Eigen::Matrix4d::Zero();
  bool singular = false;
};

// delta_s = S^{(i_j)} - S^{(j)} in units of hbar (complex; the imaginary
// part carries the damping difference).  d-ratio fixed by d_1 N_2 + d_2 N_1
// = 0.  Set with_f_eff for TE models to fill the tensor.
CorrectionSample correction_terms(const FieldModel& model,
                                  const SpacetimePoint& pt, int j,
                                  Complex delta_s, bool regularize,
                                  bool with_f_eff);

// (q/hbar c) F^{(j:j)}_{mu nu} for a pure TE Bessel mode:
//   2 (1 - kz^2) Re[ (d_mu phi_-)(d_nu Gz/lam) - (d_nu phi_-)(d_mu Gz/lam) ]
// optionally multiplied by tanh((|lam|/amp)^4) applied to the assembled
// divergent combination.  Throws for amp_tm != 0.
Eigen::Matrix4d effective_tensor(const BesselBeamParams& p,
                                 const SpacetimePoint& pt, bool regularize);

// The same tensor from the non-gauge part of the derivative projections,
// antisymmetrized numerically: Re[i antisym d(Xi_j^† d psi_j)].
// Proportional to the closed form with ratio -1/(4 (1 - kz^2)).
Eigen::Matrix4d effective_tensor_from_projections(const BesselBeamParams& p,
                                                  const SpacetimePoint& pt,
                                                  int j, double fd_step);

struct SelfConsistentOptions {
  int max_iters = 1;
  double deviation_threshold = 0.01;  // units c/w
  bool regularize = true;
  bool zero_corrections = false;  // diagnostic: force all corrections to 0
};

struct IterationReport {
  int iterations = 0;
  std::vector<double> deviations;  // max positional deviation per pass
  bool converged = false;
  std::string message;
  Trajectory base;
  Trajectory corrected;
};

IterationReport iterate(const FieldModel& model, const SpinSettings& spin,
                        const IntegratorOptions& opts, double t_end,
                        const TrajectoryState& initial,
                        const SelfConsistentOptions& sc);

// Complex actions S = S_re + i*S_im (units hbar) accumulated along the given
// trajectory's path for an arbitrary branch sign (trapezoid over samples).
std::vector<Complex> branch_actions_along(const Trajectory& traj,
                                          const FieldModel& model,
                                          const SpinSettings& branch);

struct PauliSample {
  double t = 0.0;
  Vec3 x = Vec3::Zero();
  CVec4 psi_p = CVec4::Zero();  // (phi_P ; phi_P) up to overall N_P
  Complex y_plus{0.0, 0.0};     // e^{-i S1} + e^{-i S2}
  Complex y_minus{0.0, 0.0};    // e^{-i S1} - e^{-i S2}
};

// Pauli wavefunction along a trajectory from the two branch actions
// (units hbar, aligned with traj.samples).  The 1/lambda ratios carry the
// tanh regularization.
std::vector<PauliSample> assemble_pauli(const Trajectory& traj,
                                        const std::vector<Complex>& s1,
                                        const std::vector<Complex>& s2,
                                        const FieldModel& model);

struct ResidualSample {
  double t = 0.0;
  double hj_residual = 0.0;    // |pi.pi - 1 - (ell + i l)|
  double spin_term = 0.0;      // |(chi/2) lambda|
  double p_term = 0.0;         // |2 chi pi.P|
  double q_term = 0.0;         // |chi^2 Q|
  double uncertainty = 0.0;    // chi |eta| k_max estimate of |chi d.pi|
  double superposition = 0.0;  // |2 (d^mu e^{-i dS}) (Xi_j d_mu psi_i)| est.
  double scale = 1.0;          // normalization max(1, |pi.pi|)
};

std::vector<ResidualSample> residual_audit(const Trajectory& traj,
                                           const FieldModel& model,
                                           const SpinSettings& spin);

}  // namespace spindrift

#pragma once

// Analytic electromagnetic field models.  Every model returns the real
// fields E, B together with their first spatial and temporal derivatives,
// so downstream consumers (effective-mass gradients, Maxwell checks) never
// need finite differences on the implementation path.
//
// Vector Bessel beams follow the phasor convention: the physical fields
// are the real parts of the complex mode profiles, with the transverse
// structure carried by J_{m-1}, J_m, J_{m+1} on the e+, e-, e_z frame and
// the common phase Theta = kz*z + m*phi - t (dimensionless units).

#include "spindrift/types.hpp"

namespace spindrift {

struct BesselBeamParams {
  int m_z = 0;            // vortex order
  double kperp = 0.1;     // transverse wavenumber, units w/c
  double amp_te = 0.0;    // TE amplitude, units m*c*w/q (epsilon = e0/w)
  double amp_tm = 0.0;    // TM amplitude
  double phase_te = 0.0;  // theta_TE
  double phase_tm = 0.0;  // theta_TM

  // kz from the dispersion relation kperp^2 + kz^2 = 1 (paraxial sign).
  double kz() const;
  double amp_scale() const;  // max(amp_te, amp_tm), for tolerances
};

struct FieldSample {
  Vec3 e = Vec3::Zero();
  Vec3 b = Vec3::Zero();
  Mat3 grad_e = Mat3::Zero();  // grad_e(i,j) = d E_i / d x_j
  Mat3 grad_b = Mat3::Zero();
  Vec3 dt_e = Vec3::Zero();    // d E / d t
  Vec3 dt_b = Vec3::Zero();
};

struct VectorPotential {
  double a0 = 0.0;  // scalar potential (radiation gauge: 0)
  Vec3 a = Vec3::Zero();
};

FieldSample sample_bessel(const BesselBeamParams& p, const SpacetimePoint& x);

// Solenoidal magnet: E = 0, B = (-g x/2, -g y/2, b0 + g z).
FieldSample sample_static_magnet(double b0, double gradient,
                                 const SpacetimePoint& x);

// Equal-amplitude, equal-phase TE+TM superposition of the same order:
// satisfies both crossed-field conditions E.B = 0 and |B|^2 = |E|^2.
FieldSample sample_crossed(const BesselBeamParams& p, const SpacetimePoint& x);
BesselBeamParams crossed_params(const BesselBeamParams& p);

// Radiation gauge A0 = 0, A = Re[-i E_complex] for the monochromatic
// models; closed-form static gauge for the magnet.
VectorPotential vector_potential(const BesselBeamParams& p,
                                 const SpacetimePoint& x);
VectorPotential vector_potential_static_magnet(double b0, double gradient,
                                               const SpacetimePoint& x);

// Runtime-selectable model for the integrator and CLI.
struct FieldModel {
  enum class Kind { none, bessel, crossed, static_magnet };
  Kind kind = Kind::none;
  BesselBeamParams bessel;
  double b0 = 0.0;
  double gradient = 0.0;

  FieldSample sample(const SpacetimePoint& x) const;
  VectorPotential potential(const SpacetimePoint& x) const;
  double amp_scale() const;
  bool is_bessel_like() const {
    return kind == Kind::bessel || kind == Kind::crossed;
  }
  // Beam parameters actually in effect (crossed returns the completed
  // TE+TM pair).
  BesselBeamParams effective_bessel() const;
};

}  // namespace spindrift

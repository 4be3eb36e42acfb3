#pragma once

// Complex eigenvalue structure of the spin-field coupling and the scalar
// quantities derived from it: the relativistic invariants, the four
// eigenvalues +-sqrt(G-+ . G-+) with G-+ = B -+ iE, the split
// mu_B*lambda = ell + i*l (in units of m c^2: (chi/2)*lambda_hat), the
// effective mass ratio m_eff/m, the damping scale DeltaM/m, and the
// spacetime gradient of the mass ratio.

#include <array>

#include "spindrift/fields.hpp"
#include "spindrift/types.hpp"

namespace spindrift {

struct GVectors {
  CVec3 g_plus;   // B + iE
  CVec3 g_minus;  // B - iE
};

GVectors g_vectors(const FieldSample& f);

// Relativistic invariants: Delta^2_BE = B.B - E.E and E.B.
struct Invariants {
  double delta2_be = 0.0;
  double e_dot_b = 0.0;
};

Invariants field_invariants(const FieldSample& f);

// Principal root of G.G with an imaginary part that is pure round-off
// (|Im| < 1e-9 |G.G|) snapped to zero first: E.B = 0 fields put lambda^2 on
// the negative real axis, and without the snap the branch of the root
// flips with the noise sign.
Complex stable_lambda(const CVec3& g);

// The four eigenvalues ordered {+lam-, -lam-, +lam+, -lam+}; partner pairs
// are (0,1) and (2,3).  The square roots use the principal branch; pass a
// previous quartet to keep each branch continuous along a trajectory.
std::array<Complex, 4> eigenvalues(const FieldSample& f);
std::array<Complex, 4> eigenvalues(const FieldSample& f,
                                   const std::array<Complex, 4>& previous);

enum class SpinConvention {
  fig2,    // ell = sign * mu_B sqrt(|Delta^2|), l = 0 everywhere
  strict,  // ell from Delta^2 >= 0 regions, l from Delta^2 < 0 regions
};

struct EigenMode {
  int branch = 1;                 // 1..4 over {+lam-, -lam-, +lam+, -lam+}
  Complex lambda{0.0, 0.0};       // dimensionless eigenvalue
  double ell = 0.0;               // Re(mu_B lambda), units m c^2
  double little_l = 0.0;          // Im(mu_B lambda), units m c^2
  double mass_ratio = 1.0;        // m_eff / m
  double delta_m = 0.0;           // DeltaM / m
  Vec4 grad_mass = Vec4::Zero();  // d(m_eff/m)/dx^mu, mu = (t,x,y,z)
  bool near_null = false;         // |lambda| under the null-surface threshold
};

int partner_branch(int branch);

// Effective-mass scalars from ell_hat = ell/mc^2, l_hat = l/mc^2:
//   m_eff^2 c^2 = [m^2c^2 + m ell + sqrt((m^2c^2 + m ell)^2 + m^2 l^2)]/2
//   DeltaM^2c^2 = [-(m^2c^2 + m ell) + sqrt(...)]/2 >= 0
// Throws if 1 + ell_hat < 0 with l = 0 (pair-creation regime).
EigenMode effective_mass(Complex lambda, double chi);

// ell and l for the E.B = 0 field class under the selected convention.
// Throws std::invalid_argument when |E.B| is not negligible.
struct BranchEll {
  double ell = 0.0;
  double little_l = 0.0;
};
BranchEll spin_branch_ell(const FieldSample& f, int sign, SpinConvention conv,
                          double chi, double amp_scale);

// Exact chain-rule gradient of the mass ratio through d(ell), d(l).
// `sign` and `conv` select the branch as in spin_branch_ell.  The result is
// flagged near_null (and the 1/|lambda| pieces suppressed) when
// |lambda| < null_threshold.
struct MassGradient {
  Vec4 grad = Vec4::Zero();  // d(m_eff/m)/dx^mu
  bool near_null = false;
};
MassGradient mass_gradient(const FieldSample& f, int sign, SpinConvention conv,
                           double chi, double amp_scale);

// Small-field approximation of the gradient:
//   d(m_eff c^2) ~ (1/2)[d ell + (l / 2 m c^2) d l]
Vec4 mass_gradient_small_field(const FieldSample& f, int sign,
                               SpinConvention conv, double chi,
                               double amp_scale);

// 4-gradients of Delta^2 and E.B from the sample derivatives,
// mu = (t, x, y, z).
Vec4 grad_delta2(const FieldSample& f);
Vec4 grad_e_dot_b(const FieldSample& f);

// Full EigenMode for a trajectory evaluation point.
EigenMode branch_mode(const FieldSample& f, int sign, SpinConvention conv,
                      double chi, double amp_scale);

// |lambda| threshold below which 1/lambda quantities are flagged.
inline double null_threshold(double amp_scale) { return 1e-9 * amp_scale; }

}  // namespace spindrift

#pragma once

// Spinor algebra on top of the field eigenvalue structure: gamma matrices,
// the explicit 4x4 spin-field matrix, Bloch-parametrized eigenbases, the
// zero-eigenvalue set, the null-surface-compatible basis, biorthogonal dual
// projectors, closed-form derivative projections, and the first-order Dirac
// assembly from Pauli-level terms.

#include <array>

#include "spindrift/fields.hpp"
#include "spindrift/invariants.hpp"
#include "spindrift/types.hpp"

namespace spindrift {

// Dirac representation: gamma0 = diag(1,1,-1,-1), gamma^i off-diagonal
// with -sigma_i upper right.  Signature (1,-1,-1,-1).
CMat4 gamma_matrix(int mu);
CMat4 sigma_munu(int mu, int nu);  // (i/2) [gamma^mu, gamma^nu]
double metric_diag(int mu);

CMat2 pauli_dot(const CVec3& v);  // sigma . v for complex v

// The explicit matrix with diagonal blocks sigma.B and off-diagonal blocks
// -i sigma.E; its spectrum is {+-sqrt(G-.G-), +-sqrt(G+.G+)}.
CMat4 sigma_f_matrix(const FieldSample& f);

struct BlochSpinorPair {
  double theta_b = 0.0;
  double phi_b = 0.0;
  CVec2 alpha;  // (e^{-i phi/2} cos(theta/2), e^{i phi/2} sin(theta/2))
  CVec2 beta;   // orthogonal partner
  Vec3 n;       // alpha^† sigma alpha
  CVec3 g;      // alpha^† sigma beta
};

BlochSpinorPair make_bloch(double theta_b, double phi_b);

struct Bispinor {
  CVec4 c = CVec4::Zero();
  int eigen_index = 1;    // j = 1..4
  int partner_index = 2;  // i_j
  double normalization = 0.0;  // N_j (pre-normalization 4-norm)
  Complex lambda{0.0, 0.0};    // eigenvalue under sigma_f_matrix
};

struct DualProjector {
  CVec4 xi = CVec4::Zero();
  int index = 1;
};

// lambda = 0 spinor quartet for crossed fields.  Each member satisfies
// sigma_f_matrix * psi = 0 and the pairs {1,2} and {3,4} are orthonormal.
// The matrix is defective at lambda = 0 (each sigma.G block is nilpotent,
// the null space is two-dimensional), so the quartet is not linearly
// independent: members 3,4 overlap 1,2 with total weight one.
// Throws on zero field.
std::array<Bispinor, 4> zero_lambda_basis(const FieldSample& f,
                                          const BlochSpinorPair& bloch);

struct EigenBasisResult {
  std::array<Bispinor, 4> psi;
  BlochSpinorPair bloch;        // possibly rotated by the fallback
  bool fallback_applied = false;
};

// Appendix-style eigenbasis for lambda != 0:
//   psi_1 ~ ((lam- - sigma.G-) a ; same),  psi_2 ~ ((lam- + sigma.G-) b ; same)
//   psi_3 ~ ((lam+ - sigma.G+) a ; -same), psi_4 ~ ((lam+ + sigma.G+) b ; -same)
// When the Bloch vector is degenerate with a branch (|lam -+ n.G| below
// 1e-8 * amp) the Bloch pair is rotated by pi/2 about the coordinate axis
// giving the best margin and the set rebuilt.
EigenBasisResult eigen_basis(const FieldSample& f, const BlochSpinorPair& bloch,
                             double amp_scale);

// Closed-form normalization squares and pair overlaps for the eigen basis
// (the re-derived forms; used as the oracle against direct norms).
std::array<double, 4> eigen_basis_norm2_closed(const FieldSample& f,
                                               const BlochSpinorPair& bloch);
Complex pair_overlap_closed(const FieldSample& f, const BlochSpinorPair& bloch,
                            int which_pair /* 0 -> psi1†psi2, 1 -> psi3†psi4 */,
                            const std::array<double, 4>& norms);

// Null-surface-compatible basis: component ratios chosen so the lambda
// prefactor factors out of the spinor, keeping psi finite across lambda -> 0.
// Pivot falls back from G_- to G_+ (then to the sigma_z eigenvectors) when
// the leading component vanishes.
struct NullSafeBasis {
  std::array<Bispinor, 4> psi;
  // Bloch angles of the alpha spinor used for each pair (j=1,2 share one,
  // j=3,4 the other).
  double theta_b[2] = {0.0, 0.0};
  double phi_b[2] = {0.0, 0.0};
  int pivot[2] = {0, 0};  // 0: ratio against G_-, 1: against G_+, 2: axial
};

NullSafeBasis null_safe_basis(const FieldSample& f);

// cos(theta_B) of the null-safe alpha for the pair built on G^(j):
// (|G_-|^2 - |G_z|^2) / (|G_-|^2 + |G_z|^2), evaluated from the field.
double null_safe_cos_theta_closed(const FieldSample& f, int pair /*0 or 1*/);

std::array<DualProjector, 4> dual_projectors(const std::array<Bispinor, 4>& b);

// Closed-form projections of the bispinor 4-gradient onto the dual basis:
//   d_mu psi_j = c_jj[mu] psi_j + c_ij[mu] psi_{i_j}
// for the null-safe construction.  Diverges ~ 1/lambda at null surfaces;
// flagged (and zeroed) below the threshold.
struct DerivativeProjection {
  CVec4 c_jj = CVec4::Zero();  // Xi_j^† d_mu psi_j, mu = (t,x,y,z)
  CVec4 c_ij = CVec4::Zero();  // Xi_{i_j}^† d_mu psi_j
  bool singular = false;
};

DerivativeProjection derivative_projections(const FieldSample& f, int j,
                                            double amp_scale);

// Maxwell source combination [d_0 -+ sigma.grad] sigma.G^-+; identically
// 4*pi*i*(rho -+ sigma.J/c) scaled, hence ~0 in source-free regions.
std::array<CMat2, 2> maxwell_source_term(const FieldSample& f);

// One Pauli-level term entering the Dirac assembly.
struct PauliTerm {
  Complex phase_s{0.0, 0.0};  // S^{(j)} in units of hbar
  Complex d{1.0, 0.0};
  CVec4 psi = CVec4::Zero();
  CVec4 pi = CVec4::Zero();             // covariant pi_mu, units m c
  std::array<CVec4, 4> dpsi{};          // d_mu psi, mu = (t,x,y,z)
};

// Psi_D = sum_j e^{-i S_j} [gamma^mu pi_mu + 1 + i chi gamma^mu d_mu] d_j psi_j
// in units of m c, with the Maxwell source contribution dropped.
CVec4 assemble_dirac_bispinor(const std::vector<PauliTerm>& terms, double chi);

}  // namespace spindrift

#include "spindrift/spinors.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace spindrift {

namespace {

const CMat2 kSigma[3] = {
    (CMat2() << 0, 1, 1, 0).finished(),
    (CMat2() << 0, -I, I, 0).finished(),
    (CMat2() << 1, 0, 0, -1).finished(),
};

CMat4 from_blocks(const CMat2& tl, const CMat2& tr, const CMat2& bl,
                  const CMat2& br) {
  CMat4 m;
  m.block<2, 2>(0, 0) = tl;
  m.block<2, 2>(0, 2) = tr;
  m.block<2, 2>(2, 0) = bl;
  m.block<2, 2>(2, 2) = br;
  return m;
}

const CMat2 kI2 = CMat2::Identity();
const CMat2 kZ2 = CMat2::Zero();

}  // namespace

double metric_diag(int mu) { return mu == 0 ? 1.0 : -1.0; }

CMat4 gamma_matrix(int mu) {
  if (mu == 0) return from_blocks(kI2, kZ2, kZ2, -kI2);
  if (mu >= 1 && mu <= 3)
    return from_blocks(kZ2, -kSigma[mu - 1], kSigma[mu - 1], kZ2);
  throw std::invalid_argument("gamma_matrix: mu must be 0..3");
}

CMat4 sigma_munu(int mu, int nu) {
  const CMat4 a = gamma_matrix(mu), b = gamma_matrix(nu);
  return 0.5 * I * (a * b - b * a);
}

CMat2 pauli_dot(const CVec3& v) {
  return v[0] * kSigma[0] + v[1] * kSigma[1] + v[2] * kSigma[2];
}

CMat4 sigma_f_matrix(const FieldSample& f) {
  const CMat2 sb = pauli_dot(f.b.cast<Complex>());
  const CMat2 se = pauli_dot(f.e.cast<Complex>());
  return from_blocks(sb, -I * se, -I * se, sb);
}

BlochSpinorPair make_bloch(double theta_b, double phi_b) {
  BlochSpinorPair p;
  p.theta_b = theta_b;
  p.phi_b = phi_b;
  const Complex em = std::exp(-0.5 * I * phi_b);
  const Complex ep = std::exp(0.5 * I * phi_b);
  const double c = std::cos(0.5 * theta_b), s = std::sin(0.5 * theta_b);
  p.alpha << em * c, ep * s;
  p.beta << -em * s, ep * c;
  for (int k = 0; k < 3; ++k) {
    p.n[k] = (p.alpha.adjoint() * kSigma[k] * p.alpha)(0, 0).real();
    p.g[k] = (p.alpha.adjoint() * kSigma[k] * p.beta)(0, 0);
  }
  return p;
}

std::array<Bispinor, 4> zero_lambda_basis(const FieldSample& f,
                                          const BlochSpinorPair& bloch) {
  const double n2 = f.b.squaredNorm() + f.e.squaredNorm();
  if (n2 <= 0.0)
    throw std::domain_error("zero_lambda_basis: zero field");
  const double n = std::sqrt(n2);
  const CMat2 sb = pauli_dot(f.b.cast<Complex>());
  const CMat2 mise = -I * pauli_dot(f.e.cast<Complex>());
  std::array<Bispinor, 4> out;
  const CVec2 spin[2] = {bloch.alpha, bloch.beta};
  for (int k = 0; k < 4; ++k) {
    const CVec2 s = spin[k % 2];
    CVec2 up, lo;
    if (k < 2) {
      up = sb * s;
      lo = mise * s;
    } else {
      up = mise * s;
      lo = sb * s;
    }
    Bispinor b;
    b.c << up[0], up[1], lo[0], lo[1];
    b.c /= n;
    b.eigen_index = k + 1;
    b.partner_index = partner_branch(k + 1);
    b.normalization = n;
    b.lambda = 0.0;
    out[k] = b;
  }
  return out;
}

namespace {

Complex cdot(const CVec3& a, const CVec3& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];  // no conjugation
}

Complex principal_lambda(const CVec3& g) { return stable_lambda(g); }

Bispinor make_bispinor(const CVec2& block, int j, Complex lambda,
                       double sblock) {
  Bispinor b;
  const double nrm = std::sqrt(2.0 * block.squaredNorm());
  if (nrm == 0.0)
    throw std::runtime_error("bispinor construction degenerated to zero");
  b.c << block[0], block[1], sblock * block[0], sblock * block[1];
  b.c /= nrm;
  b.eigen_index = j;
  b.partner_index = partner_branch(j);
  b.normalization = nrm;
  b.lambda = lambda;
  return b;
}

}  // namespace

EigenBasisResult eigen_basis(const FieldSample& f,
                             const BlochSpinorPair& bloch_in,
                             double amp_scale) {
  const GVectors g = g_vectors(f);
  const Complex lm = principal_lambda(g.g_minus);
  const Complex lp = principal_lambda(g.g_plus);
  const double tiny = std::max(1e-12 * amp_scale, 1e-300);
  if (std::abs(lm) < tiny || std::abs(lp) < tiny)
    throw std::domain_error("eigen_basis: lambda = 0; use null_safe_basis");

  auto margin = [&](const Vec3& n) {
    const CVec3 nc = n.cast<Complex>();
    return std::min(std::abs(lm - cdot(nc, g.g_minus)),
                    std::abs(lp - cdot(nc, g.g_plus)));
  };

  EigenBasisResult r;
  r.bloch = bloch_in;
  if (margin(bloch_in.n) < 1e-8 * amp_scale) {
    // Rotate the Bloch vector by pi/2 about the coordinate axis that
    // maximizes the margin and rebuild.
    double best = -1.0;
    Vec3 best_n = bloch_in.n;
    for (int axis = 0; axis < 3; ++axis) {
      const Vec3 n2 =
          Eigen::AngleAxisd(M_PI / 2, Vec3::Unit(axis)) * bloch_in.n;
      if (margin(n2) > best) {
        best = margin(n2);
        best_n = n2;
      }
    }
    r.bloch = make_bloch(std::acos(std::clamp(best_n[2], -1.0, 1.0)),
                         std::atan2(best_n[1], best_n[0]));
    r.fallback_applied = true;
    if (margin(r.bloch.n) < 1e-8 * amp_scale)
      throw std::runtime_error("eigen_basis: degenerate after Bloch fallback");
  }

  const CMat2 sgm = pauli_dot(g.g_minus);
  const CMat2 sgp = pauli_dot(g.g_plus);
  const CVec2 a = r.bloch.alpha, b = r.bloch.beta;
  // Actual eigenvalues: (lam - sigma.G) projects onto the -lam eigenvector.
  r.psi[0] = make_bispinor((lm * kI2 - sgm) * a, 1, -lm, +1.0);
  r.psi[1] = make_bispinor((lm * kI2 + sgm) * b, 2, +lm, +1.0);
  r.psi[2] = make_bispinor((lp * kI2 - sgp) * a, 3, -lp, -1.0);
  r.psi[3] = make_bispinor((lp * kI2 + sgp) * b, 4, +lp, -1.0);
  return r;
}

std::array<double, 4> eigen_basis_norm2_closed(const FieldSample& f,
                                               const BlochSpinorPair& bloch) {
  const GVectors g = g_vectors(f);
  const Complex lm = principal_lambda(g.g_minus);
  const Complex lp = principal_lambda(g.g_plus);
  const Vec3 n = bloch.n;
  const Vec3 exb = f.e.cross(f.b);
  const double den = f.b.squaredNorm() + f.e.squaredNorm();
  const double pm = n.dot(f.b * lm.real() - f.e * lm.imag());
  const double pp = n.dot(f.b * lp.real() + f.e * lp.imag());
  const double s = n.dot(exb);
  return {
      2.0 * (std::norm(lm) - 2.0 * pm + den - 2.0 * s),
      2.0 * (std::norm(lm) - 2.0 * pm + den + 2.0 * s),
      2.0 * (std::norm(lp) - 2.0 * pp + den + 2.0 * s),
      2.0 * (std::norm(lp) - 2.0 * pp + den - 2.0 * s),
  };
}

Complex pair_overlap_closed(const FieldSample& f, const BlochSpinorPair& bloch,
                            int which_pair,
                            const std::array<double, 4>& norms) {
  const GVectors g = g_vectors(f);
  const Vec3 exb = f.e.cross(f.b);
  if (which_pair == 0) {
    const Complex lm = principal_lambda(g.g_minus);
    const CVec3 v = -2.0 * I * (f.b * lm.imag() + f.e * lm.real()).cast<Complex>() +
                    2.0 * exb.cast<Complex>();
    return 2.0 * cdot(bloch.g, v) / std::sqrt(norms[0] * norms[1]);
  }
  const Complex lp = principal_lambda(g.g_plus);
  const CVec3 v = -2.0 * I * (f.b * lp.imag() - f.e * lp.real()).cast<Complex>() -
                  2.0 * exb.cast<Complex>();
  return 2.0 * cdot(bloch.g, v) / std::sqrt(norms[2] * norms[3]);
}

namespace {

// Shared construction context for the null-safe basis and its derivative
// projections.
struct PairContext {
  CVec3 g_base;      // G^- (pair 0) or G^+ (pair 1)
  Complex lambda;    // principal root of g_base . g_base
  int pivot = 0;     // 0: normalize first component, 1: second, 2: axial
  Complex rho[2];    // component ratio for (j, i_j) in construction order
  double theta_b = 0.0, phi_b = 0.0;
};

PairContext pair_context(const GVectors& g, int pair) {
  PairContext c;
  c.g_base = (pair == 0) ? g.g_minus : g.g_plus;
  c.lambda = principal_lambda(c.g_base);
  const Complex gm = c.g_base[0] - I * c.g_base[1];
  const Complex gp = c.g_base[0] + I * c.g_base[1];
  const Complex gz = c.g_base[2];
  const double perp = std::max(std::abs(gm), std::abs(gp));
  const double scale = std::max({perp, std::abs(gz), 1e-300});
  if (perp < 1e-14 * scale) {
    c.pivot = 2;
  } else if (std::abs(gm) >= std::abs(gp)) {
    c.pivot = 0;
  } else {
    c.pivot = 1;
  }
  // Member k = 0 uses +g_base, k = 1 uses -g_base; same lambda root.
  for (int k = 0; k < 2; ++k) {
    const double sg = (k == 0) ? 1.0 : -1.0;
    if (c.pivot == 0)
      c.rho[k] = -(c.lambda + sg * gz) / (sg * gm);
    else if (c.pivot == 1)
      c.rho[k] = (sg * gz - c.lambda) / (sg * gp);
  }
  // Bloch angles implied by the alpha spinor of this pair.
  Complex a1{1.0, 0.0}, a2{0.0, 0.0};
  if (c.pivot == 0) {
    a2 = -gz / gm;
  } else if (c.pivot == 1) {
    a1 = gz / gp;
    a2 = 1.0;
  }
  c.theta_b = 2.0 * std::atan2(std::abs(a2), std::abs(a1));
  c.phi_b = (std::abs(a1) > 0.0 && std::abs(a2) > 0.0)
                ? std::arg(a2) - std::arg(a1)
                : 0.0;
  return c;
}

// 2-spinor block of psi_j from the context; unit 4-norm after doubling.
// The overall factor e^{i arg lambda} is the residual phase of the
// lambda/|lambda| ratio; at lambda = 0 exactly it is fixed to 1 (trajectory
// code re-anchors the branch, which fixes the approach direction).
CVec2 null_safe_block(const PairContext& c, int member) {
  if (c.pivot == 2) {
    // Axial field: sigma.G = Gz sigma_z; pick the better-conditioned
    // eigencolumn deterministically.
    const double sg = (member == 0) ? 1.0 : -1.0;
    const Complex gz = sg * c.g_base[2];
    CVec2 u;
    if (std::abs(c.lambda + gz) >= std::abs(c.lambda - gz))
      u << 0.0, 1.0;
    else
      u << 1.0, 0.0;
    return u / std::sqrt(2.0);
  }
  const Complex phase = (std::abs(c.lambda) > 0.0)
                            ? c.lambda / std::abs(c.lambda)
                            : Complex(1.0, 0.0);
  const Complex rho = c.rho[member];
  CVec2 u;
  if (c.pivot == 0)
    u << 1.0, rho;
  else
    u << rho, 1.0;
  return phase * u / std::sqrt(2.0 * (1.0 + std::norm(rho)));
}

}  // namespace

NullSafeBasis null_safe_basis(const FieldSample& f) {
  const GVectors g = g_vectors(f);
  NullSafeBasis out;
  for (int pair = 0; pair < 2; ++pair) {
    const PairContext c = pair_context(g, pair);
    out.theta_b[pair] = c.theta_b;
    out.phi_b[pair] = c.phi_b;
    out.pivot[pair] = c.pivot;
    const double sblock = (pair == 0) ? +1.0 : -1.0;
    for (int member = 0; member < 2; ++member) {
      const int j = 2 * pair + member + 1;
      const CVec2 u = null_safe_block(c, member);
      Bispinor b;
      b.c << u[0], u[1], sblock * u[0], sblock * u[1];
      b.eigen_index = j;
      b.partner_index = partner_branch(j);
      // N_j of the (a1 lambda)(1, rho) pre-normalization form.
      const double a1mag = std::cos(0.5 * c.theta_b);
      const double amag = (c.pivot == 1) ? std::sin(0.5 * c.theta_b) : a1mag;
      b.normalization =
          std::sqrt(2.0 * (1.0 + std::norm(c.rho[member]))) *
          std::abs(c.lambda) * ((c.pivot == 2) ? 1.0 : amag);
      b.lambda = (member == 0) ? -c.lambda : c.lambda;
      out.psi[j - 1] = b;
    }
  }
  return out;
}

double null_safe_cos_theta_closed(const FieldSample& f, int pair) {
  const GVectors g = g_vectors(f);
  const PairContext c = pair_context(g, pair);
  const Complex gm = c.g_base[0] - I * c.g_base[1];
  const Complex gp = c.g_base[0] + I * c.g_base[1];
  const Complex gz = c.g_base[2];
  if (c.pivot == 0)
    return (std::norm(gm) - std::norm(gz)) / (std::norm(gm) + std::norm(gz));
  if (c.pivot == 1)
    return (std::norm(gz) - std::norm(gp)) / (std::norm(gz) + std::norm(gp));
  return 1.0;
}

std::array<DualProjector, 4> dual_projectors(const std::array<Bispinor, 4>& b) {
  std::array<DualProjector, 4> out;
  for (int j = 0; j < 4; ++j) {
    const int ij = b[j].partner_index - 1;
    const Complex o = b[ij].c.dot(b[j].c);  // psi_{i_j}^† psi_j
    const double o2 = std::norm(o);
    if (o2 >= 1.0 - 1e-12)
      throw std::runtime_error(
          "dual_projectors: partner overlap has unit modulus (linearly "
          "dependent pair)");
    out[j].xi = (b[j].c - o * b[ij].c) / (1.0 - o2);
    out[j].index = b[j].eigen_index;
  }
  return out;
}

namespace {

// 4-gradients (t,x,y,z) of the complex combinations entering the
// projections, assembled from the sample derivatives.
struct GDerivs {
  CVec4 gm, gp, gz;  // d_mu of G_-; G_+; G_z of the base vector
  CVec4 lam;         // d_mu lambda
};

GDerivs g_derivs(const FieldSample& f, const CVec3& g_base, Complex lambda,
                 int pair) {
  // base = B -+ iE: pair 0 -> -, pair 1 -> +.
  const Complex s = (pair == 0) ? -I : I;
  GDerivs d;
  CVec3 dg[4];
  dg[0] = f.dt_b.cast<Complex>() + s * f.dt_e.cast<Complex>();
  for (int k = 0; k < 3; ++k)
    dg[k + 1] = f.grad_b.col(k).cast<Complex>() + s * f.grad_e.col(k).cast<Complex>();
  for (int mu = 0; mu < 4; ++mu) {
    d.gm[mu] = dg[mu][0] - I * dg[mu][1];
    d.gp[mu] = dg[mu][0] + I * dg[mu][1];
    d.gz[mu] = dg[mu][2];
    d.lam[mu] = cdot(g_base, dg[mu]) / lambda;
  }
  return d;
}

}  // namespace

DerivativeProjection derivative_projections(const FieldSample& f, int j,
                                            double amp_scale) {
  if (j < 1 || j > 4)
    throw std::invalid_argument("derivative_projections: j must be 1..4");
  const GVectors g = g_vectors(f);
  const int pair = (j <= 2) ? 0 : 1;
  const PairContext c = pair_context(g, pair);
  DerivativeProjection out;
  if (std::abs(c.lambda) < null_threshold(std::max(amp_scale, 1e-300)) ||
      c.pivot == 2) {
    out.singular = true;
    return out;
  }
  const GDerivs d = g_derivs(f, c.g_base, c.lambda, pair);

  const int member = (j - 1) % 2;
  const double sg = (member == 0) ? 1.0 : -1.0;  // G^(j) = sg * base
  const Complex gz = sg * c.g_base[2];
  const Complex gm = sg * (c.g_base[0] - I * c.g_base[1]);
  const Complex gp = sg * (c.g_base[0] + I * c.g_base[1]);
  const Complex rho_j = c.rho[member];
  const Complex rho_i = c.rho[1 - member];

  for (int mu = 0; mu < 4; ++mu) {
    const Complex dgz = sg * d.gz[mu], dgm = sg * d.gm[mu],
                  dgp = sg * d.gp[mu], dlam = d.lam[mu];
    Complex drho;
    if (c.pivot == 0)
      drho = -((dlam + dgz) * gm - (c.lambda + gz) * dgm) / (gm * gm);
    else
      drho = ((dgz - dlam) * gp - (gz - c.lambda) * dgp) / (gp * gp);
    // d Log kappa with the a1-real phase convention:
    //   kappa = e^{i arg lambda} / sqrt(2 (1 + |rho|^2)).
    const double dlog_mag =
        -(rho_j.real() * drho.real() + rho_j.imag() * drho.imag()) /
        (1.0 + std::norm(rho_j));
    const Complex dlogkappa = dlog_mag + I * (dlam / c.lambda).imag();
    out.c_jj[mu] = dlogkappa + drho / (rho_j - rho_i);
    const Complex kappa_ratio =
        std::sqrt((1.0 + std::norm(rho_i)) / (1.0 + std::norm(rho_j)));
    out.c_ij[mu] = kappa_ratio * drho / (rho_i - rho_j);
  }
  return out;
}

std::array<CMat2, 2> maxwell_source_term(const FieldSample& f) {
  // [d0 -+ sigma.grad] sigma.G^+- with
  // (sigma.grad)(sigma.G) = (div G) I + i sigma.(curl G).
  std::array<CMat2, 2> out;  // [0]: G^+, [1]: G^-
  for (int pair = 0; pair < 2; ++pair) {
    const Complex s = (pair == 0) ? I : -I;
    const CVec3 dtg =
        f.dt_b.cast<Complex>() + s * f.dt_e.cast<Complex>();
    Eigen::Matrix3cd gradg;
    for (int k = 0; k < 3; ++k)
      gradg.col(k) =
          f.grad_b.col(k).cast<Complex>() + s * f.grad_e.col(k).cast<Complex>();
    const Complex divg = gradg(0, 0) + gradg(1, 1) + gradg(2, 2);
    CVec3 curlg;
    curlg[0] = gradg(2, 1) - gradg(1, 2);
    curlg[1] = gradg(0, 2) - gradg(2, 0);
    curlg[2] = gradg(1, 0) - gradg(0, 1);
    const double sign = (pair == 0) ? -1.0 : 1.0;
    out[pair] = pauli_dot(dtg) + sign * (divg * kI2 + I * pauli_dot(curlg));
  }
  return out;
}

CVec4 assemble_dirac_bispinor(const std::vector<PauliTerm>& terms, double chi) {
  CVec4 out = CVec4::Zero();
  const CMat4 id = CMat4::Identity();
  CMat4 gam[4];
  for (int mu = 0; mu < 4; ++mu) gam[mu] = gamma_matrix(mu);
  for (const auto& t : terms) {
    CMat4 op = id;
    for (int mu = 0; mu < 4; ++mu) op += gam[mu] * t.pi[mu];
    CVec4 v = op * (t.d * t.psi);
    for (int mu = 0; mu < 4; ++mu)
      v += I * chi * (gam[mu] * (t.d * t.dpsi[mu]));
    out += std::exp(-I * t.phase_s) * v;
  }
  return out;
}

}  // namespace spindrift

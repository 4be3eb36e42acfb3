#include "spindrift/invariants.hpp"

#include <cmath>
#include <stdexcept>

namespace spindrift {

GVectors g_vectors(const FieldSample& f) {
  GVectors g;
  g.g_plus = f.b.cast<Complex>() + I * f.e.cast<Complex>();
  g.g_minus = f.b.cast<Complex>() - I * f.e.cast<Complex>();
  return g;
}

Invariants field_invariants(const FieldSample& f) {
  return {f.b.squaredNorm() - f.e.squaredNorm(), f.e.dot(f.b)};
}

namespace {

Complex stable_sqrt(Complex w) {
  if (std::abs(w.imag()) < 1e-9 * std::abs(w)) w.imag(0.0);
  return std::sqrt(w);
}

}  // namespace

Complex stable_lambda(const CVec3& g) {
  return stable_sqrt(g[0] * g[0] + g[1] * g[1] + g[2] * g[2]);
}

std::array<Complex, 4> eigenvalues(const FieldSample& f) {
  const Invariants inv = field_invariants(f);
  // lam-^2 = G-.G- = Delta^2 - 2i E.B ; lam+^2 = Delta^2 + 2i E.B
  const Complex lm = stable_sqrt(Complex(inv.delta2_be, -2.0 * inv.e_dot_b));
  const Complex lp = stable_sqrt(Complex(inv.delta2_be, 2.0 * inv.e_dot_b));
  return {lm, -lm, lp, -lp};
}

std::array<Complex, 4> eigenvalues(const FieldSample& f,
                                   const std::array<Complex, 4>& previous) {
  std::array<Complex, 4> raw = eigenvalues(f);
  std::array<Complex, 4> out = raw;
  // Re-anchor each +- pair so the branch stays continuous.
  for (int base = 0; base < 4; base += 2) {
    if (std::abs(raw[base] - previous[base]) >
        std::abs(-raw[base] - previous[base])) {
      out[base] = -raw[base];
      out[base + 1] = raw[base];
    }
  }
  return out;
}

int partner_branch(int branch) {
  switch (branch) {
    case 1: return 2;
    case 2: return 1;
    case 3: return 4;
    case 4: return 3;
  }
  throw std::invalid_argument("partner_branch: branch must be 1..4");
}

EigenMode effective_mass(Complex lambda, double chi) {
  if (chi < 0.0) throw std::invalid_argument("effective_mass: chi < 0");
  EigenMode m;
  m.lambda = lambda;
  m.ell = 0.5 * chi * lambda.real();
  m.little_l = 0.5 * chi * lambda.imag();
  const double one_ell = 1.0 + m.ell;
  if (m.little_l == 0.0 && one_ell < 0.0)
    throw std::domain_error(
        "effective_mass: 1 + ell/mc^2 < 0 with l = 0 (pair-creation regime)");
  const double root = std::sqrt(one_ell * one_ell + m.little_l * m.little_l);
  m.mass_ratio = std::sqrt(0.5 * (one_ell + root));
  m.delta_m = std::sqrt(std::max(0.0, 0.5 * (root - one_ell)));
  return m;
}

namespace {

void require_crossfield_class(const FieldSample& f, double amp_scale) {
  const double scale = std::max(amp_scale * amp_scale, 1e-300);
  if (std::abs(f.e.dot(f.b)) > 1e-9 * scale)
    throw std::invalid_argument(
        "spin_branch_ell: field has E.B != 0; branch conventions apply to "
        "the degenerate class only");
}

}  // namespace

BranchEll spin_branch_ell(const FieldSample& f, int sign, SpinConvention conv,
                          double chi, double amp_scale) {
  require_crossfield_class(f, amp_scale);
  const double d2 = field_invariants(f).delta2_be;
  BranchEll r;
  if (conv == SpinConvention::fig2) {
    r.ell = sign * 0.5 * chi * std::sqrt(std::abs(d2));
  } else {
    if (d2 >= 0.0)
      r.ell = sign * 0.5 * chi * std::sqrt(d2);
    else
      r.little_l = sign * 0.5 * chi * std::sqrt(-d2);
  }
  return r;
}

Vec4 grad_delta2(const FieldSample& f) {
  Vec4 g;
  g[0] = 2.0 * (f.b.dot(f.dt_b) - f.e.dot(f.dt_e));
  const Vec3 gs = 2.0 * (f.grad_b.transpose() * f.b - f.grad_e.transpose() * f.e);
  g.tail<3>() = gs;
  return g;
}

Vec4 grad_e_dot_b(const FieldSample& f) {
  Vec4 g;
  g[0] = f.dt_e.dot(f.b) + f.e.dot(f.dt_b);
  g.tail<3>() = f.grad_e.transpose() * f.b + f.grad_b.transpose() * f.e;
  return g;
}

namespace {

// Gradients of (ell_hat, l_hat) for the degenerate-class conventions.
// The 1/sqrt(|Delta^2|) pieces are suppressed (and flagged) inside the
// numerical null band; the band is far below the |lambda| > 1e-3*amp
// domain of the gradient oracle and keeps round-off of Delta^2 from being
// amplified in exactly-crossed fields.
struct EllGrad {
  double ell = 0.0, little_l = 0.0;
  Vec4 d_ell = Vec4::Zero();
  Vec4 d_little = Vec4::Zero();
  bool near_null = false;
};

EllGrad ell_gradients(const FieldSample& f, int sign, SpinConvention conv,
                      double chi, double amp_scale) {
  const double d2 = field_invariants(f).delta2_be;
  EllGrad r;
  const double band = std::max(1e-12 * amp_scale * amp_scale, 1e-300);
  r.near_null = std::abs(d2) < band;
  if (r.near_null) return r;  // lambda indistinguishable from 0 at round-off
  const Vec4 dd2 = grad_delta2(f);
  const double root = std::sqrt(std::abs(d2));
  const double q = 0.25 * chi / root;
  if (conv == SpinConvention::fig2) {
    r.ell = sign * 0.5 * chi * root;
    r.d_ell = sign * q * ((d2 >= 0.0) ? 1.0 : -1.0) * dd2;
  } else {
    if (d2 >= 0.0) {
      r.ell = sign * 0.5 * chi * root;
      r.d_ell = sign * q * dd2;
    } else {
      r.little_l = sign * 0.5 * chi * root;
      r.d_little = -sign * q * dd2;
    }
  }
  return r;
}

}  // namespace

MassGradient mass_gradient(const FieldSample& f, int sign, SpinConvention conv,
                           double chi, double amp_scale) {
  const EllGrad eg = ell_gradients(f, sign, conv, chi, amp_scale);
  const double one_ell = 1.0 + eg.ell;
  const double root = std::sqrt(one_ell * one_ell + eg.little_l * eg.little_l);
  const double mr = std::sqrt(0.5 * (one_ell + root));
  MassGradient g;
  g.near_null = eg.near_null;
  g.grad = (mr * eg.d_ell + (eg.little_l / (2.0 * mr)) * eg.d_little) /
           (2.0 * root);
  return g;
}

Vec4 mass_gradient_small_field(const FieldSample& f, int sign,
                               SpinConvention conv, double chi,
                               double amp_scale) {
  const EllGrad eg = ell_gradients(f, sign, conv, chi, amp_scale);
  return 0.5 * (eg.d_ell + 0.5 * eg.little_l * eg.d_little);
}

EigenMode branch_mode(const FieldSample& f, int sign, SpinConvention conv,
                      double chi, double amp_scale) {
  require_crossfield_class(f, amp_scale);
  // Inside the round-off null band (ell, l) are clamped to zero together
  // with the gradient, so exactly-crossed fields reproduce the spinless
  // dynamics bit for bit.
  const EllGrad eg = ell_gradients(f, sign, conv, chi, amp_scale);
  const Complex lam = (chi > 0.0)
                          ? Complex(2.0 * eg.ell / chi, 2.0 * eg.little_l / chi)
                          : Complex(0.0, 0.0);
  EigenMode m = effective_mass(lam, chi);
  m.ell = eg.ell;
  m.little_l = eg.little_l;
  m.branch = (sign >= 0) ? 1 : 2;
  const double one_ell = 1.0 + eg.ell;
  const double root = std::sqrt(one_ell * one_ell + eg.little_l * eg.little_l);
  m.grad_mass =
      (m.mass_ratio * eg.d_ell + (eg.little_l / (2.0 * m.mass_ratio)) * eg.d_little) /
      (2.0 * root);
  m.near_null = eg.near_null ||
                std::abs(lam) < null_threshold(std::max(amp_scale, 1e-300));
  return m;
}

}  // namespace spindrift

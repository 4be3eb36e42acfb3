#include "spindrift/fields.hpp"

#include <cmath>
#include <stdexcept>

#include "spindrift/specfun.hpp"

namespace spindrift {

double BesselBeamParams::kz() const {
  if (!(kperp > 0.0) || kperp > 1.0)
    throw std::invalid_argument("BesselBeamParams: kperp must be in (0,1]");
  return std::sqrt(1.0 - kperp * kperp);
}

double BesselBeamParams::amp_scale() const {
  return std::max(std::abs(amp_te), std::abs(amp_tm));
}

namespace {

// Scalar cylinder harmonics W_n = J_n(kperp*rho) e^{i n phi} and their
// Cartesian gradients via
//   (d_x + i d_y) W_n = -kperp W_{n+1},   (d_x - i d_y) W_n = kperp W_{n-1}.
struct Harmonics {
  // W_{m-2} .. W_{m+2} indexed by offset+2
  Complex w[5];
  Complex at(int offset) const { return w[offset + 2]; }
};

Harmonics harmonics(int m, double kperp, double x, double y) {
  Harmonics h;
  const double rho = std::hypot(x, y);
  if (rho == 0.0) {
    for (int o = -2; o <= 2; ++o) h.w[o + 2] = (m + o == 0) ? 1.0 : 0.0;
    return h;
  }
  const double phi = std::atan2(y, x);
  for (int o = -2; o <= 2; ++o) {
    const int n = m + o;
    h.w[o + 2] = bessel_j(n, kperp * rho) * std::exp(I * (double(n) * phi));
  }
  return h;
}

struct ModeCoeffs {
  Complex cp, cm, cz;  // e+, e-, e_z profile coefficients
};

// Complex transverse/longitudinal coefficients of one field.  The magnetic
// profile is the TE/TM duality image (ete -> -etm, etm -> ete) of the
// nominal mode amplitudes; Faraday's law with the e^{i(kz z + m phi - t)}
// phasor then fixes the electric profile to the opposite overall sign of
// the nominal one.  The sign is global, so all quadratic invariants and
// the longitudinal magnetic component keep their nominal values.
ModeCoeffs profile_coeffs(Complex te_slot, Complex tm_slot, double kperp,
                          double kz) {
  ModeCoeffs c;
  c.cp = (te_slot + I * kz * tm_slot) / (2.0 * kperp);
  c.cm = (te_slot - I * kz * tm_slot) / (2.0 * kperp);
  c.cz = tm_slot;
  return c;
}

ModeCoeffs e_coeffs(const BesselBeamParams& p) {
  const Complex ete = p.amp_te * std::exp(I * p.phase_te);
  const Complex etm = p.amp_tm * std::exp(I * p.phase_tm);
  return profile_coeffs(-ete, -etm, p.kperp, p.kz());
}

ModeCoeffs b_coeffs(const BesselBeamParams& p) {
  const Complex ete = p.amp_te * std::exp(I * p.phase_te);
  const Complex etm = p.amp_tm * std::exp(I * p.phase_tm);
  return profile_coeffs(-etm, ete, p.kperp, p.kz());
}

// Complex field vector and all first derivatives for one set of mode
// coefficients, including the propagation phase P = e^{i(kz z - t)}.
struct ComplexField {
  CVec3 v;
  Eigen::Matrix3cd grad;  // grad(i,j) = d v_i / d x_j
  CVec3 dt;
};

ComplexField assemble(const ModeCoeffs& c, const Harmonics& h, double kperp,
                      double kz, double z, double t) {
  const Complex phase = std::exp(I * (kz * z - t));
  ComplexField f;
  // components in terms of W: vx = cp W_{m-1} + cm W_{m+1},
  // vy = i (cp W_{m-1} - cm W_{m+1}), vz = cz W_m  (all times phase).
  const Complex wm1 = h.at(-1), wp1 = h.at(+1), w0 = h.at(0);
  f.v[0] = (c.cp * wm1 + c.cm * wp1) * phase;
  f.v[1] = I * (c.cp * wm1 - c.cm * wp1) * phase;
  f.v[2] = c.cz * w0 * phase;

  // d_x W_n = (kperp/2)(W_{n-1} - W_{n+1}); d_y W_n = (i kperp/2)(W_{n-1} + W_{n+1})
  const Complex dxm1 = 0.5 * kperp * (h.at(-2) - h.at(0));
  const Complex dym1 = 0.5 * I * kperp * (h.at(-2) + h.at(0));
  const Complex dxp1 = 0.5 * kperp * (h.at(0) - h.at(+2));
  const Complex dyp1 = 0.5 * I * kperp * (h.at(0) + h.at(+2));
  const Complex dx0 = 0.5 * kperp * (h.at(-1) - h.at(+1));
  const Complex dy0 = 0.5 * I * kperp * (h.at(-1) + h.at(+1));

  f.grad(0, 0) = (c.cp * dxm1 + c.cm * dxp1) * phase;
  f.grad(0, 1) = (c.cp * dym1 + c.cm * dyp1) * phase;
  f.grad(1, 0) = I * (c.cp * dxm1 - c.cm * dxp1) * phase;
  f.grad(1, 1) = I * (c.cp * dym1 - c.cm * dyp1) * phase;
  f.grad(2, 0) = c.cz * dx0 * phase;
  f.grad(2, 1) = c.cz * dy0 * phase;
  for (int i = 0; i < 3; ++i) f.grad(i, 2) = I * kz * f.v[i];
  f.dt = -I * f.v;
  return f;
}

void complex_bessel_eb(const BesselBeamParams& p, const SpacetimePoint& x,
                       ComplexField& e, ComplexField& b) {
  const Harmonics h = harmonics(p.m_z, p.kperp, x.x[0], x.x[1]);
  e = assemble(e_coeffs(p), h, p.kperp, p.kz(), x.x[2], x.t);
  b = assemble(b_coeffs(p), h, p.kperp, p.kz(), x.x[2], x.t);
}

}  // namespace

FieldSample sample_bessel(const BesselBeamParams& p, const SpacetimePoint& x) {
  ComplexField ec, bc;
  complex_bessel_eb(p, x, ec, bc);
  FieldSample s;
  s.e = ec.v.real();
  s.b = bc.v.real();
  s.grad_e = ec.grad.real();
  s.grad_b = bc.grad.real();
  s.dt_e = ec.dt.real();
  s.dt_b = bc.dt.real();
  return s;
}

FieldSample sample_static_magnet(double b0, double gradient,
                                 const SpacetimePoint& x) {
  FieldSample s;
  s.b = Vec3(-0.5 * gradient * x.x[0], -0.5 * gradient * x.x[1],
             b0 + gradient * x.x[2]);
  s.grad_b << -0.5 * gradient, 0, 0,
               0, -0.5 * gradient, 0,
               0, 0, gradient;
  return s;
}

BesselBeamParams crossed_params(const BesselBeamParams& p) {
  BesselBeamParams q = p;
  const double amp = (p.amp_te != 0.0) ? p.amp_te : p.amp_tm;
  const double ph = (p.amp_te != 0.0) ? p.phase_te : p.phase_tm;
  q.amp_te = amp;
  q.amp_tm = amp;
  q.phase_te = ph;
  q.phase_tm = ph;
  return q;
}

FieldSample sample_crossed(const BesselBeamParams& p, const SpacetimePoint& x) {
  return sample_bessel(crossed_params(p), x);
}

VectorPotential vector_potential(const BesselBeamParams& p,
                                 const SpacetimePoint& x) {
  // Monochromatic e^{-it} convention: A = Re[-i E_c] = Im[E_c].
  ComplexField ec, bc;
  complex_bessel_eb(p, x, ec, bc);
  VectorPotential a;
  a.a = ec.v.imag();
  return a;
}

VectorPotential vector_potential_static_magnet(double b0, double gradient,
                                               const SpacetimePoint& x) {
  VectorPotential a;
  const double bz = b0 + gradient * x.x[2];
  a.a = Vec3(-0.5 * x.x[1] * bz, 0.5 * x.x[0] * bz, 0.0);
  return a;
}

FieldSample FieldModel::sample(const SpacetimePoint& x) const {
  switch (kind) {
    case Kind::none: return FieldSample{};
    case Kind::bessel: return sample_bessel(bessel, x);
    case Kind::crossed: return sample_crossed(bessel, x);
    case Kind::static_magnet: return sample_static_magnet(b0, gradient, x);
  }
  return FieldSample{};
}

VectorPotential FieldModel::potential(const SpacetimePoint& x) const {
  switch (kind) {
    case Kind::none: return VectorPotential{};
    case Kind::bessel: return vector_potential(bessel, x);
    case Kind::crossed: return vector_potential(crossed_params(bessel), x);
    case Kind::static_magnet:
      return vector_potential_static_magnet(b0, gradient, x);
  }
  return VectorPotential{};
}

double FieldModel::amp_scale() const {
  switch (kind) {
    case Kind::none: return 0.0;
    case Kind::bessel: return bessel.amp_scale();
    case Kind::crossed: return crossed_params(bessel).amp_scale();
    case Kind::static_magnet: return std::abs(b0) + std::abs(gradient);
  }
  return 0.0;
}

BesselBeamParams FieldModel::effective_bessel() const {
  if (kind == Kind::crossed) return crossed_params(bessel);
  return bessel;
}

}  // namespace spindrift

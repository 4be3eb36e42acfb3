#include "spindrift/selfconsistent.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace spindrift {

namespace {

constexpr double kFdStep = 1e-4;

Complex cdot3(const CVec3& a, const CVec3& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

// G^- components and the pair eigenvalue for a TE-type evaluation.
struct GzLam {
  Complex gz, gm, lam;
};

GzLam gz_lam(const FieldSample& f) {
  const GVectors g = g_vectors(f);
  GzLam r;
  r.gz = g.g_minus[2];
  r.gm = g.g_minus[0] - I * g.g_minus[1];
  r.lam = stable_lambda(g.g_minus);
  return r;
}

DerivativeProjection projections_at(const FieldModel& model,
                                    const SpacetimePoint& pt, int j) {
  return derivative_projections(model.sample(pt), j, model.amp_scale());
}

}  // namespace

CorrectionSample correction_terms(const FieldModel& model,
                                  const SpacetimePoint& pt, int j,
                                  Complex delta_s, bool regularize,
                                  bool with_f_eff) {
  CorrectionSample out;
  const int ij = partner_branch(j);
  const DerivativeProjection pj = projections_at(model, pt, j);
  const DerivativeProjection pi = projections_at(model, pt, ij);
  if (pj.singular || pi.singular) {
    out.singular = true;
    return out;
  }
  // d_{i_j}/d_j = -N_{i_j}/N_j; the ratio of the (ed)-style normalizations
  // equals the kappa ratio of the null-safe construction.
  const FieldSample f = model.sample(pt);
  const NullSafeBasis basis = null_safe_basis(f);
  const double nj = basis.psi[j - 1].normalization;
  const double ni = basis.psi[ij - 1].normalization;
  const Complex d_ratio = -ni / nj;
  const Complex phase = std::exp(-I * delta_s);

  // P_mu/d_j = Xi_j d_mu psi_j + (d_i/d_j) e^{-i dS} Xi_j d_mu psi_{i_j}
  // regrouped as [gauge log-derivative] + [1 - e^{-i dS}] [1/lambda part]:
  // the d_ratio makes c_jj + d_ratio c_ij a pure gradient.
  out.p_vec = pj.c_jj + d_ratio * phase * pi.c_ij;
  out.p_gauge = pj.c_jj + d_ratio * pi.c_ij;
  out.p_nongauge = (phase - 1.0) * d_ratio * pi.c_ij;

  // Q/d_j = Xi_j d^mu d_mu psi_j + (d_i/d_j) e^{-i dS} Xi_j d^mu d_mu psi_i
  // with  Xi_j d^2 psi_j = d.c_jj + c_jj.c_jj + c_ij.c_ji
  //       Xi_j d^2 psi_i = d.c_ji + c_ii.c_ji + c_ji.c_jj
  // where c_ji = Xi_j d psi_{i_j} (the partner's off-diagonal).
  CVec4 div_jj = CVec4::Zero(), div_ji = CVec4::Zero();
  for (int mu = 0; mu < 4; ++mu) {
    SpacetimePoint pp = pt, pm = pt;
    if (mu == 0) {
      pp.t += kFdStep;
      pm.t -= kFdStep;
    } else {
      pp.x[mu - 1] += kFdStep;
      pm.x[mu - 1] -= kFdStep;
    }
    const DerivativeProjection jp = projections_at(model, pp, j);
    const DerivativeProjection jm = projections_at(model, pm, j);
    const DerivativeProjection ip = projections_at(model, pp, ij);
    const DerivativeProjection im = projections_at(model, pm, ij);
    if (jp.singular || jm.singular || ip.singular || im.singular) {
      out.singular = true;
      return out;
    }
    div_jj[mu] = (jp.c_jj[mu] - jm.c_jj[mu]) / (2.0 * kFdStep);
    div_ji[mu] = (ip.c_ij[mu] - im.c_ij[mu]) / (2.0 * kFdStep);
  }
  const Complex ddot_jj = div_jj[0] - div_jj[1] - div_jj[2] - div_jj[3];
  const Complex ddot_ji = div_ji[0] - div_ji[1] - div_ji[2] - div_ji[3];
  const Complex q_own = ddot_jj + minkowski_dot<Complex>(pj.c_jj, pj.c_jj) +
                        minkowski_dot<Complex>(pj.c_ij, pi.c_ij);
  const Complex q_partner = ddot_ji + minkowski_dot<Complex>(pi.c_jj, pi.c_ij) +
                            minkowski_dot<Complex>(pi.c_ij, pj.c_jj);
  out.q_scalar = q_own + d_ratio * phase * q_partner;

  if (with_f_eff && model.is_bessel_like())
    out.f_eff = effective_tensor(model.effective_bessel(), pt, regularize);
  return out;
}

namespace {

// 4-gradients of phi_- = arg(G^-_-) and Gz/lam for the closed-form tensor.
struct TensorScalars {
  Vec4 dphi;
  CVec4 dgzl;
  Complex lam;
};

TensorScalars tensor_scalars(const BesselBeamParams& p,
                             const SpacetimePoint& pt) {
  const FieldSample f = sample_bessel(p, pt);
  const GVectors g = g_vectors(f);
  const GzLam s = gz_lam(f);
  TensorScalars out;
  out.lam = s.lam;
  CVec3 dg[4];
  dg[0] = f.dt_b.cast<Complex>() - I * f.dt_e.cast<Complex>();
  for (int k = 0; k < 3; ++k)
    dg[k + 1] =
        f.grad_b.col(k).cast<Complex>() - I * f.grad_e.col(k).cast<Complex>();
  for (int mu = 0; mu < 4; ++mu) {
    const Complex dgm = dg[mu][0] - I * dg[mu][1];
    const Complex dgz = dg[mu][2];
    const Complex dlam = cdot3(g.g_minus, dg[mu]) / s.lam;
    out.dphi[mu] = (dgm / s.gm).imag();
    out.dgzl[mu] = dgz / s.lam - s.gz * dlam / (s.lam * s.lam);
  }
  return out;
}

}  // namespace

Eigen::Matrix4d effective_tensor(const BesselBeamParams& p,
                                 const SpacetimePoint& pt, bool regularize) {
  if (p.amp_tm != 0.0)
    throw std::invalid_argument(
        "effective_tensor: closed form applies to pure TE modes only");
  const TensorScalars s = tensor_scalars(p, pt);
  const double kz = p.kz();
  const double pre = 2.0 * (1.0 - kz * kz);
  Eigen::Matrix4d out = Eigen::Matrix4d::Zero();
  for (int mu = 0; mu < 4; ++mu)
    for (int nu = mu + 1; nu < 4; ++nu) {
      const Complex w =
          pre * (s.dphi[mu] * s.dgzl[nu] - s.dphi[nu] * s.dgzl[mu]);
      out(mu, nu) = w.real();
      out(nu, mu) = -w.real();
    }
  if (regularize) {
    const double x = std::abs(s.lam) / std::max(p.amp_te, 1e-300);
    out *= std::tanh(x * x * x * x);
  }
  return out;
}

Eigen::Matrix4d effective_tensor_from_projections(const BesselBeamParams& p,
                                                  const SpacetimePoint& pt,
                                                  int j, double fd_step) {
  // The gauge (log-derivative) part of c_jj is a pure 4-gradient, so it
  // drops out of the antisymmetrized derivative; the full c_jj can be
  // differentiated directly.
  FieldModel model;
  model.kind = FieldModel::Kind::bessel;
  model.bessel = p;
  auto nongauge = [&](const SpacetimePoint& q) -> CVec4 {
    const DerivativeProjection dp =
        derivative_projections(model.sample(q), j, model.amp_scale());
    if (dp.singular)
      throw std::runtime_error("effective_tensor_from_projections: null band");
    return dp.c_jj;
  };
  Eigen::Matrix4d out = Eigen::Matrix4d::Zero();
  // Re[i (d_nu c_mu - d_mu c_nu)] via central differences.
  CVec4 dc[4];
  for (int nu = 0; nu < 4; ++nu) {
    SpacetimePoint pp = pt, pm = pt;
    if (nu == 0) {
      pp.t += fd_step;
      pm.t -= fd_step;
    } else {
      pp.x[nu - 1] += fd_step;
      pm.x[nu - 1] -= fd_step;
    }
    dc[nu] = (nongauge(pp) - nongauge(pm)) / (2.0 * fd_step);
  }
  for (int mu = 0; mu < 4; ++mu)
    for (int nu = 0; nu < 4; ++nu)
      out(mu, nu) = (I * (dc[nu][mu] - dc[mu][nu])).real();
  return out;
}

std::vector<Complex> branch_actions_along(const Trajectory& traj,
                                          const FieldModel& model,
                                          const SpinSettings& branch) {
  std::vector<Complex> s(traj.samples.size(), Complex(0.0, 0.0));
  if (traj.samples.empty()) return s;
  auto integrand = [&](const TrajectoryState& st) -> Complex {
    const EigenMode m = mode_at(model, branch, st.t, st.x);
    const double mr = (m.branch != 0) ? m.mass_ratio : 1.0;
    const double dm = (m.branch != 0) ? m.delta_m : 0.0;
    const Vec3 a = model.potential({st.t, st.x}).a;
    return Complex(mr / st.gamma + st.v.dot(a), -dm / st.gamma);
  };
  Complex acc(0.0, 0.0);
  Complex prev = integrand(traj.samples.front());
  for (std::size_t k = 1; k < traj.samples.size(); ++k) {
    const Complex cur = integrand(traj.samples[k]);
    const double dt = traj.samples[k].t - traj.samples[k - 1].t;
    acc += 0.5 * dt * (prev + cur);
    s[k] = (branch.chi > 0.0) ? acc / branch.chi : Complex(0.0, 0.0);
    prev = cur;
  }
  return s;
}

namespace {

// Linear interpolation of a complex series sampled at uniform times.
Complex interp_series(const std::vector<double>& ts,
                      const std::vector<Complex>& vs, double t) {
  if (ts.empty()) return {0.0, 0.0};
  if (t <= ts.front()) return vs.front();
  if (t >= ts.back()) return vs.back();
  const auto it = std::upper_bound(ts.begin(), ts.end(), t);
  const std::size_t hi = it - ts.begin();
  const double w = (t - ts[hi - 1]) / (ts[hi] - ts[hi - 1]);
  return (1.0 - w) * vs[hi - 1] + w * vs[hi];
}

}  // namespace

IterationReport iterate(const FieldModel& model, const SpinSettings& spin,
                        const IntegratorOptions& opts, double t_end,
                        const TrajectoryState& initial,
                        const SelfConsistentOptions& sc) {
  IterationReport rep;
  IntegrateArgs base_args{model, spin, opts, t_end, nullptr};
  rep.base = integrate(base_args, initial);
  if (!rep.base.diag.completed) {
    rep.message = "base run failed: " + rep.base.diag.message;
    return rep;
  }

  const int j = (spin.sign >= 0) ? 1 : 2;
  Trajectory current = rep.base;

  for (int pass = 0; pass < sc.max_iters; ++pass) {
    // Actions of both branches along the current path, and the sample grid.
    SpinSettings partner = spin;
    partner.sign = -spin.sign;
    const std::vector<Complex> s_own =
        branch_actions_along(current, model, spin);
    const std::vector<Complex> s_partner =
        branch_actions_along(current, model, partner);
    std::vector<double> ts(current.samples.size());
    std::vector<Complex> ds(current.samples.size());
    for (std::size_t k = 0; k < current.samples.size(); ++k) {
      ts[k] = current.samples[k].t;
      ds[k] = s_partner[k] - s_own[k];
    }

    const double chi = spin.chi;
    CorrectionFn corr = [&, ts, ds](double t, const Vec3& x) {
      DynamicsCorrection c;
      if (sc.zero_corrections || chi <= 0.0) return c;
      const Complex delta_s = interp_series(ts, ds, t);
      bool stencil_ok = true;
      auto p_field = [&](const SpacetimePoint& q) -> CVec4 {
        const CorrectionSample cs =
            correction_terms(model, q, j, delta_s, sc.regularize, false);
        if (cs.singular) {
          stencil_ok = false;
          return CVec4::Zero();
        }
        // momentum shift Re(i chi P_mu), covariant components
        CVec4 a;
        for (int mu = 0; mu < 4; ++mu)
          a[mu] = (I * chi * cs.p_vec[mu]).real();
        return a;
      };
      // F_add_{mu nu} = -(d_mu Aeff_nu - d_nu Aeff_mu) by central FD.
      CVec4 d_aeff[4];
      const SpacetimePoint pt{t, x};
      for (int mu = 0; mu < 4; ++mu) {
        SpacetimePoint pp = pt, pm = pt;
        if (mu == 0) {
          pp.t += kFdStep;
          pm.t -= kFdStep;
        } else {
          pp.x[mu - 1] += kFdStep;
          pm.x[mu - 1] -= kFdStep;
        }
        d_aeff[mu] = (p_field(pp) - p_field(pm)) / (2.0 * kFdStep);
      }
      if (!stencil_ok) return DynamicsCorrection{};  // inside the null band
      Eigen::Matrix4d f_add;
      for (int mu = 0; mu < 4; ++mu)
        for (int nu = 0; nu < 4; ++nu)
          f_add(mu, nu) = -(d_aeff[mu][nu] - d_aeff[nu][mu]).real();
      for (int i = 0; i < 3; ++i) c.e_extra[i] = f_add(0, i + 1);
      c.b_extra[0] = -f_add(2, 3);
      c.b_extra[1] = -f_add(3, 1);
      c.b_extra[2] = -f_add(1, 2);
      // mu_B lambda shift from (Sj2): + chi^2 (Q - P.P) added to ell + i l.
      const CorrectionSample cs =
          correction_terms(model, pt, j, delta_s, sc.regularize, false);
      if (!cs.singular) {
        const Complex dml =
            chi * chi *
            (cs.q_scalar - minkowski_dot<Complex>(cs.p_vec, cs.p_vec));
        c.d_ell = dml.real();
        c.d_little_l = dml.imag();
        // The gradient of this O(chi^2) scalar is far below the effective
        // field force; left out of d_grad_mass.
      }
      return c;
    };

    IntegrateArgs corr_args{model, spin, opts, t_end, corr};
    Trajectory corrected = integrate(corr_args, initial);
    if (!corrected.diag.completed) {
      rep.message = "corrected run failed: " + corrected.diag.message;
      rep.corrected = corrected;
      return rep;
    }
    double dev = 0.0;
    const std::size_t n =
        std::min(corrected.samples.size(), current.samples.size());
    for (std::size_t k = 0; k < n; ++k)
      dev = std::max(dev, (corrected.samples[k].x - current.samples[k].x).norm());
    rep.deviations.push_back(dev);
    rep.iterations = pass + 1;
    rep.corrected = corrected;
    if (dev < sc.deviation_threshold) {
      rep.converged = true;
      return rep;
    }
    current = corrected;
  }
  rep.message = "did not converge within max_iters";
  return rep;
}

std::vector<PauliSample> assemble_pauli(const Trajectory& traj,
                                        const std::vector<Complex>& s1,
                                        const std::vector<Complex>& s2,
                                        const FieldModel& model) {
  if (s1.size() != traj.samples.size() || s2.size() != traj.samples.size())
    throw std::invalid_argument("assemble_pauli: action series misaligned");
  const double amp = std::max(model.amp_scale(), 1e-300);
  std::vector<PauliSample> out(traj.samples.size());
  for (std::size_t k = 0; k < traj.samples.size(); ++k) {
    const TrajectoryState& st = traj.samples[k];
    const FieldSample f = model.sample({st.t, st.x});
    const GzLam s = gz_lam(f);
    PauliSample ps;
    ps.t = st.t;
    ps.x = st.x;
    ps.y_plus = std::exp(-I * s1[k]) + std::exp(-I * s2[k]);
    ps.y_minus = std::exp(-I * s1[k]) - std::exp(-I * s2[k]);
    const double xr = std::abs(s.lam) / amp;
    const double reg = std::tanh(xr * xr * xr * xr);
    const Complex gm_over_lam =
        (std::abs(s.lam) > 0.0) ? (s.gm / s.lam) * reg : Complex(0.0, 0.0);
    const Complex gz_over_lam =
        (std::abs(s.lam) > 0.0) ? (s.gz / s.lam) * reg : Complex(0.0, 0.0);
    CVec2 phi;
    phi[0] = ps.y_minus * gm_over_lam;
    phi[1] = -ps.y_plus - ps.y_minus * gz_over_lam;
    ps.psi_p << phi[0], phi[1], phi[0], phi[1];
    out[k] = ps;
  }
  return out;
}

std::vector<ResidualSample> residual_audit(const Trajectory& traj,
                                           const FieldModel& model,
                                           const SpinSettings& spin) {
  std::vector<ResidualSample> out;
  out.reserve(traj.samples.size());
  const double chi = spin.chi;
  double kmax = 1.0;
  if (model.is_bessel_like()) {
    const BesselBeamParams p = model.effective_bessel();
    kmax = std::max(p.kperp, p.kz());
  }
  SpinSettings partner = spin;
  partner.sign = -spin.sign;
  const std::vector<Complex> s_own = branch_actions_along(traj, model, spin);
  const std::vector<Complex> s_par = branch_actions_along(traj, model, partner);

  for (std::size_t k = 0; k < traj.samples.size(); ++k) {
    const TrajectoryState& st = traj.samples[k];
    const EigenMode m = mode_at(model, spin, st.t, st.x);
    const EigenMode mp = mode_at(model, partner, st.t, st.x);
    ResidualSample r;
    r.t = st.t;
    const double mr = (m.branch != 0) ? m.mass_ratio : 1.0;
    // eta_mu = m_r * xdot_mu, zeta_mu = xdot_mu * l/(2 m_r); pi = eta + i zeta
    const double g = st.gamma;
    const Vec4 xdot(g, g * st.v[0], g * st.v[1], g * st.v[2]);
    const Vec4 eta = mr * xdot;
    const double kappa = (m.branch != 0) ? m.little_l / (2.0 * mr) : 0.0;
    const Vec4 zeta = kappa * xdot;
    const Complex pipi = Complex(minkowski_dot<double>(eta, eta) -
                                     minkowski_dot<double>(zeta, zeta),
                                 2.0 * minkowski_dot<double>(eta, zeta));
    const Complex mul(m.ell, m.little_l);
    r.hj_residual = std::abs(pipi - 1.0 - mul);
    r.spin_term = std::abs(mul);
    r.scale = std::max(1.0, std::abs(pipi));
    r.uncertainty = chi * eta.norm() * kmax;

    if (chi > 0.0 && m.branch != 0) {
      const int j = (spin.sign >= 0) ? 1 : 2;
      const Complex ds = s_par[k] - s_own[k];
      const CorrectionSample cs =
          correction_terms(model, {st.t, st.x}, j, ds, true, false);
      if (!cs.singular) {
        CVec4 pic;
        for (int mu = 0; mu < 4; ++mu) pic[mu] = Complex(eta[mu], zeta[mu]);
        r.p_term = 2.0 * chi * std::abs(minkowski_dot<Complex>(pic, cs.p_vec));
        r.q_term = chi * chi * std::abs(cs.q_scalar);
        // superposition channel: 2 |d^mu e^{-i dS}| |Xi_j d_mu psi_i| with
        // d_mu dS ~ (mu_i - mu_j) xdot_mu.
        const double dmu = (mp.mass_ratio - m.mass_ratio);
        const DerivativeProjection pp = derivative_projections(
            model.sample({st.t, st.x}), partner_branch(j), model.amp_scale());
        if (!pp.singular) {
          CVec4 dds;
          for (int mu = 0; mu < 4; ++mu) dds[mu] = dmu * xdot[mu] / chi;
          r.superposition =
              2.0 * chi *
              std::abs(minkowski_dot<Complex>(dds, pp.c_ij)) *
              std::abs(std::exp(-I * ds));
        }
      }
    }
    out.push_back(r);
  }
  return out;
}

}  // namespace spindrift

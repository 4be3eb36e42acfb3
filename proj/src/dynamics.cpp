#include "spindrift/dynamics.hpp"

#include <cmath>
#include <stdexcept>

namespace spindrift {

EigenMode mode_at(const FieldModel& model, const SpinSettings& spin, double t,
                  const Vec3& x) {
  if (!spin.enabled || spin.sign == 0 || spin.chi == 0.0) {
    EigenMode m;
    m.branch = 0;
    return m;
  }
  const FieldSample f = model.sample({t, x});
  return branch_mode(f, spin.sign, spin.convention, spin.chi,
                     model.amp_scale());
}

Vec3 acceleration(const Vec3& v, const FieldSample& f, const EigenMode& mode,
                  bool spin_on) {
  const double v2 = v.squaredNorm();
  if (v2 >= 1.0)
    throw std::domain_error("acceleration: |v| >= 1");
  const double gamma = 1.0 / std::sqrt(1.0 - v2);
  const double mr = spin_on ? mode.mass_ratio : 1.0;
  Vec3 a = (f.e + v.cross(f.b) - v * v.dot(f.e)) / (mr * gamma);
  if (spin_on) {
    const Vec3 grad = mode.grad_mass.tail<3>();
    const double dt_m = mode.grad_mass[0];
    a -= (grad + v * dt_m) / (mr * gamma * gamma);
  }
  return a;
}

namespace {

// ----------------------------------------------------------------------
// Embedded Dormand-Prince 5(4), FSAL, cubic Hermite dense output.

template <int N>
using StateVec = Eigen::Matrix<double, N, 1>;

template <int N>
struct StepRecord {
  double t0, t1;
  StateVec<N> y0, y1, f0, f1;
};

template <int N>
StateVec<N> hermite(const StepRecord<N>& s, double t) {
  const double h = s.t1 - s.t0;
  const double th = (t - s.t0) / h;
  const double t2 = th * th, t3 = t2 * th;
  return (2 * t3 - 3 * t2 + 1) * s.y0 + ((t3 - 2 * t2 + th) * h) * s.f0 +
         (-2 * t3 + 3 * t2) * s.y1 + ((t3 - t2) * h) * s.f1;
}

struct OdeResult {
  bool completed = false;
  std::string message;
  long accepted = 0;
  long rejected = 0;
};

// rhs returns false to abort (non-finite or invalid state); on_step returns
// false to request a clean stop after an accepted step.
template <int N>
OdeResult rk45(const std::function<bool(double, const StateVec<N>&,
                                        StateVec<N>&)>& rhs,
               StateVec<N> y, double t0, double t1,
               const IntegratorOptions& opts,
               const std::function<bool(const StepRecord<N>&)>& on_step) {
  static const double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static const double a21 = 1.0 / 5;
  static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                      a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                      a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                      a65 = -5103.0 / 18656;
  static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                      b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static const double e1 = 35.0 / 384 - 5179.0 / 57600,
                      e3 = 500.0 / 1113 - 7571.0 / 16695,
                      e4 = 125.0 / 192 - 393.0 / 640,
                      e5 = -2187.0 / 6784 + 92097.0 / 339200,
                      e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

  OdeResult res;
  const double dir = (t1 >= t0) ? 1.0 : -1.0;
  const double span = std::max(std::abs(t1 - t0), 1e-300);
  double t = t0;
  double h = dir * std::min(opts.initial_step, opts.max_step);
  StateVec<N> k1, k2, k3, k4, k5, k6, k7, ynew, yerr;
  if (!rhs(t, y, k1)) {
    res.message = "right-hand side failed at the initial state";
    return res;
  }
  const long max_steps = 50000000L;
  while (dir * (t1 - t) > 0) {
    if (res.accepted + res.rejected > max_steps) {
      res.message = "step budget exhausted";
      return res;
    }
    if (std::abs(h) > opts.max_step) h = dir * opts.max_step;
    if (dir * (t + h - t1) > 0) h = t1 - t;
    if (std::abs(h) < 1e-14 * std::max(1.0, std::abs(t))) {
      res.message = "step size underflow at t = " + std::to_string(t);
      return res;
    }
    bool ok = rhs(t + c2 * h, y + h * (a21 * k1), k2);
    ok = ok && rhs(t + c3 * h, y + h * (a31 * k1 + a32 * k2), k3);
    ok = ok && rhs(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3), k4);
    ok = ok && rhs(t + c5 * h,
                   y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4), k5);
    ok = ok && rhs(t + h,
                   y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 +
                            a65 * k5),
                   k6);
    if (ok) {
      ynew = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
      ok = rhs(t + h, ynew, k7);
    }
    if (!ok) {
      res.message = "right-hand side failed (non-finite or invalid state) "
                    "near t = " + std::to_string(t);
      return res;
    }
    yerr = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    double err = 0.0;
    for (int i = 0; i < N; ++i) {
      const double sc =
          opts.abs_tol +
          opts.rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
      err += (yerr[i] / sc) * (yerr[i] / sc);
    }
    err = std::sqrt(err / N);
    if (err <= 1.0 || std::abs(h) <= 1e-13 * span) {
      StepRecord<N> rec{t, t + h, y, ynew, k1, k7};
      t += h;
      y = ynew;
      k1 = k7;  // FSAL
      ++res.accepted;
      if (!on_step(rec)) {
        res.completed = true;
        return res;
      }
    } else {
      ++res.rejected;
    }
    h *= std::clamp(0.9 * std::pow(std::max(err, 1e-10), -0.2), 0.2, 5.0);
  }
  res.completed = true;
  return res;
}

// ----------------------------------------------------------------------

struct ActionIntegrands {
  double s_real;  // dS/dt or dS/dtau in units m c^2 / w
  double s_imag;
};

struct DynContext {
  const FieldModel* model;
  SpinSettings spin;
  CorrectionFn correction;
  mutable bool near_null = false;

  bool spin_active() const {
    return spin.enabled && spin.sign != 0 && spin.chi > 0.0;
  }

  EigenMode mode(double t, const Vec3& x, const FieldSample& f) const {
    EigenMode m;
    if (spin_active()) {
      m = branch_mode(f, spin.sign, spin.convention, spin.chi,
                      model->amp_scale());
      if (correction) {
        const DynamicsCorrection c = correction(t, x);
        const double ell = m.ell + c.d_ell;
        const double ll = m.little_l + c.d_little_l;
        const double one_ell = 1.0 + ell;
        const double root = std::sqrt(one_ell * one_ell + ll * ll);
        m.ell = ell;
        m.little_l = ll;
        m.mass_ratio = std::sqrt(0.5 * (one_ell + root));
        m.delta_m = std::sqrt(std::max(0.0, 0.5 * (root - one_ell)));
        m.grad_mass += c.d_grad_mass;
      }
      if (m.near_null) near_null = true;
    } else {
      m.branch = 0;
    }
    return m;
  }

  FieldSample sample(double t, const Vec3& x) const {
    FieldSample f = model->sample({t, x});
    if (correction) {
      const DynamicsCorrection c = correction(t, x);
      f.e += c.e_extra;
      f.b += c.b_extra;
    }
    return f;
  }
};

}  // namespace

Trajectory integrate(const IntegrateArgs& args, const TrajectoryState& initial) {
  using Y = StateVec<6>;
  DynContext ctx{&args.model, args.spin, args.correction};

  auto rhs = [&](double t, const Y& y, Y& dydt) -> bool {
    const Vec3 x = y.head<3>();
    const Vec3 v = y.tail<3>();
    if (!y.allFinite() || v.squaredNorm() >= 1.0) return false;
    const FieldSample f = ctx.sample(t, x);
    const EigenMode m = ctx.mode(t, x, f);
    dydt.head<3>() = v;
    dydt.tail<3>() = acceleration(v, f, m, m.branch != 0);
    return dydt.allFinite();
  };

  Trajectory traj;
  Y y;
  y << initial.x, initial.v;

  const double chi = args.spin.chi;
  const int branch_sign = ctx.spin_active() ? args.spin.sign : 0;
  double s_real_raw = 0.0, s_imag_raw = 0.0;  // units m c^2 / w

  auto integrand = [&](double t, const Y& yy) -> ActionIntegrands {
    const Vec3 x = yy.head<3>();
    const Vec3 v = yy.tail<3>();
    const double gamma = 1.0 / std::sqrt(1.0 - v.squaredNorm());
    EigenMode m;
    if (ctx.spin_active())
      m = ctx.mode(t, x, ctx.sample(t, x));
    const Vec3 a = args.model.potential({t, x}).a;
    return {m.mass_ratio / gamma + v.dot(a), -m.delta_m / gamma};
  };

  auto simpson = [&](const StepRecord<6>& rec, double ta, double tb,
                     double& dre, double& dim) {
    const ActionIntegrands fa = integrand(ta, hermite(rec, ta));
    const ActionIntegrands fm =
        integrand(0.5 * (ta + tb), hermite(rec, 0.5 * (ta + tb)));
    const ActionIntegrands fb = integrand(tb, hermite(rec, tb));
    const double w = (tb - ta) / 6.0;
    dre = w * (fa.s_real + 4.0 * fm.s_real + fb.s_real);
    dim = w * (fa.s_imag + 4.0 * fm.s_imag + fb.s_imag);
  };

  auto emit = [&](double t, const Y& yy, double sre, double sim) {
    TrajectoryState st;
    st.t = t;
    st.x = yy.head<3>();
    st.v = yy.tail<3>();
    st.gamma = 1.0 / std::sqrt(1.0 - st.v.squaredNorm());
    st.s_real = (chi > 0.0) ? sre / chi : 0.0;
    st.s_imag = (chi > 0.0) ? sim / chi : 0.0;
    st.branch_sign = branch_sign;
    traj.samples.push_back(st);
  };

  emit(initial.t, y, 0.0, 0.0);
  const double dir = (args.t_end >= initial.t) ? 1.0 : -1.0;
  double next_sample = initial.t + dir * args.opts.sample_interval;

  auto on_step = [&](const StepRecord<6>& rec) -> bool {
    if (!args.opts.sample_at_steps) {
      while (dir * (rec.t1 - next_sample) >= 0 &&
             dir * (next_sample - rec.t0) > 0) {
        double dre, dim;
        simpson(rec, rec.t0, next_sample, dre, dim);
        emit(next_sample, hermite(rec, next_sample), s_real_raw + dre,
             s_imag_raw + dim);
        next_sample += dir * args.opts.sample_interval;
      }
    }
    double dre, dim;
    simpson(rec, rec.t0, rec.t1, dre, dim);
    s_real_raw += dre;
    s_imag_raw += dim;
    if (args.opts.sample_at_steps ||
        (rec.t1 == args.t_end &&
         std::abs(traj.samples.back().t - args.t_end) > 0)) {
      emit(rec.t1, rec.y1, s_real_raw, s_imag_raw);
    }
    return true;
  };

  const OdeResult r = rk45<6>(rhs, y, initial.t, args.t_end, args.opts, on_step);
  traj.diag.completed = r.completed;
  traj.diag.message = r.message;
  traj.diag.steps_accepted = r.accepted;
  traj.diag.steps_rejected = r.rejected;
  // gamma is derived from v in this formulation; the falsifiable mass-shell
  // drift lives in integrate_proper_time's diagnostics.
  traj.diag.max_gamma_error = 0.0;
  traj.diag.near_null_encountered = ctx.near_null;
  return traj;
}

Trajectory integrate_proper_time(const IntegrateArgs& args,
                                 const TrajectoryState& initial) {
  // State (t, x, eta0, eta) in proper time; eta0 = m_r*gamma is carried
  // redundantly so |eta0^2 - |eta|^2 - m_r^2| measures the integrator's
  // violation of gamma-consistency.
  using Z = StateVec<8>;
  DynContext ctx{&args.model, args.spin, args.correction};

  auto mass_at = [&](double t, const Vec3& x, EigenMode& m) {
    m = ctx.mode(t, x, ctx.sample(t, x));
    return (m.branch != 0) ? m.mass_ratio : 1.0;
  };

  auto rhs = [&](double, const Z& z, Z& dz) -> bool {
    if (!z.allFinite()) return false;
    const double t = z[0];
    const Vec3 x = z.segment<3>(1);
    const double eta0 = z[4];
    const Vec3 eta = z.tail<3>();
    if (eta0 <= 0.0) return false;
    const FieldSample f = ctx.sample(t, x);
    EigenMode m;
    const double mr = mass_at(t, x, m);
    const double gamma = eta0 / mr;
    const Vec3 v = eta / eta0;
    dz[0] = gamma;
    dz.segment<3>(1) = eta / mr;
    dz[4] = gamma * f.e.dot(v) + m.grad_mass[0];
    Vec3 force = gamma * (f.e + v.cross(f.b));
    if (m.branch != 0) force -= m.grad_mass.tail<3>();
    dz.tail<3>() = force;
    return dz.allFinite();
  };

  Trajectory traj;
  Z z;
  const double g0 = 1.0 / std::sqrt(1.0 - initial.v.squaredNorm());
  EigenMode m0;
  const double mr0 = mass_at(initial.t, initial.x, m0);
  z << initial.t, initial.x, mr0 * g0, mr0 * g0 * initial.v;

  const double chi = args.spin.chi;
  const int branch_sign = ctx.spin_active() ? args.spin.sign : 0;
  double s_real_raw = 0.0, s_imag_raw = 0.0;
  double max_shell_err = 0.0;

  auto emit = [&](const Z& zz, double sre, double sim) {
    TrajectoryState st;
    st.t = zz[0];
    st.x = zz.segment<3>(1);
    EigenMode m;
    const double mr = mass_at(st.t, st.x, m);
    st.gamma = zz[4] / mr;
    st.v = zz.tail<3>() / zz[4];
    st.s_real = (chi > 0.0) ? sre / chi : 0.0;
    st.s_imag = (chi > 0.0) ? sim / chi : 0.0;
    st.branch_sign = branch_sign;
    traj.samples.push_back(st);
  };

  auto dtau_actions = [&](const Z& zz) -> ActionIntegrands {
    const double t = zz[0];
    const Vec3 x = zz.segment<3>(1);
    EigenMode m;
    const double mr = mass_at(t, x, m);
    const Vec3 v = zz.tail<3>() / zz[4];
    const double gamma = zz[4] / mr;
    const Vec3 a = args.model.potential({t, x}).a;
    return {mr + gamma * v.dot(a), -m.delta_m};
  };

  emit(z, 0.0, 0.0);
  double next_sample = initial.t + args.opts.sample_interval;
  const double tau_max = 2.0 * std::abs(args.t_end - initial.t) + 10.0;
  bool reached_end = false;

  auto add_simpson = [&](const StepRecord<8>& rec, double ta, double tb,
                         double base_re, double base_im, double& out_re,
                         double& out_im) {
    const ActionIntegrands ia = dtau_actions(hermite(rec, ta));
    const ActionIntegrands im = dtau_actions(hermite(rec, 0.5 * (ta + tb)));
    const ActionIntegrands ib = dtau_actions(hermite(rec, tb));
    const double w = (tb - ta) / 6.0;
    out_re = base_re + w * (ia.s_real + 4 * im.s_real + ib.s_real);
    out_im = base_im + w * (ia.s_imag + 4 * im.s_imag + ib.s_imag);
  };

  // Find tau with t(tau) = target on the dense output by bisection.
  auto tau_at_time = [&](const StepRecord<8>& rec, double target) {
    double lo = rec.t0, hi = rec.t1;
    for (int it = 0; it < 80; ++it) {
      const double mid = 0.5 * (lo + hi);
      (hermite(rec, mid)[0] < target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  };

  auto on_step = [&](const StepRecord<8>& rec) -> bool {
    {
      EigenMode m;
      const double mr = mass_at(rec.y1[0], rec.y1.segment<3>(1), m);
      const double shell = rec.y1[4] * rec.y1[4] -
                           rec.y1.tail<3>().squaredNorm() - mr * mr;
      max_shell_err = std::max(max_shell_err, std::abs(shell));
    }
    while (rec.y1[0] >= next_sample && next_sample > rec.y0[0] &&
           next_sample < args.t_end) {
      const double tau_s = tau_at_time(rec, next_sample);
      double sre, sim;
      add_simpson(rec, rec.t0, tau_s, s_real_raw, s_imag_raw, sre, sim);
      emit(hermite(rec, tau_s), sre, sim);
      next_sample += args.opts.sample_interval;
    }
    if (rec.y1[0] >= args.t_end) {
      const double tau_s = tau_at_time(rec, args.t_end);
      double sre, sim;
      add_simpson(rec, rec.t0, tau_s, s_real_raw, s_imag_raw, sre, sim);
      emit(hermite(rec, tau_s), sre, sim);
      reached_end = true;
      return false;
    }
    add_simpson(rec, rec.t0, rec.t1, s_real_raw, s_imag_raw, s_real_raw,
                s_imag_raw);
    return true;
  };

  const OdeResult r = rk45<8>(rhs, z, 0.0, tau_max, args.opts, on_step);
  traj.diag.completed = reached_end;
  traj.diag.message = reached_end ? "" : r.message;
  traj.diag.steps_accepted = r.accepted;
  traj.diag.steps_rejected = r.rejected;
  traj.diag.max_gamma_error = max_shell_err;
  traj.diag.near_null_encountered = ctx.near_null;
  return traj;
}

ConservedPair conserved_quantities(const TrajectoryState& st,
                                   const FieldModel& model,
                                   double mass_ratio) {
  ConservedPair c;
  const double gm = st.gamma * mass_ratio;
  const Vec3 a = model.potential({st.t, st.x}).a;
  double m_z = 0.0, kz = 0.0;
  if (model.is_bessel_like()) {
    m_z = model.effective_bessel().m_z;
    kz = model.effective_bessel().kz();
  }
  c.l = gm * (st.x[0] * st.v[1] - st.x[1] * st.v[0] - m_z) +
        (st.x[0] * a[1] - st.x[1] * a[0]);
  c.p = gm * (st.v[2] - kz) + a[2];
  return c;
}

DeBroglieCheck debroglie_check(const TrajectoryState& st,
                               const FieldModel& model, double chi,
                               double mass_ratio) {
  const double speed = st.v.norm();
  if (speed <= 0.0)
    throw std::domain_error("debroglie_check: undefined ratio for v = 0");
  double length = 1.0;
  if (model.is_bessel_like()) {
    const BesselBeamParams p = model.effective_bessel();
    length = std::min(1.0 / p.kperp, 1.0 / p.kz());
  }
  DeBroglieCheck out;
  out.ratio = chi / (mass_ratio * st.gamma * speed * length);
  out.flagged = out.ratio >= 0.3;
  return out;
}

}  // namespace spindrift

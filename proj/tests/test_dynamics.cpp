#include <doctest.h>

#include <cmath>

#include "spindrift/dynamics.hpp"
#include "spindrift/validate.hpp"

using namespace spindrift;

namespace {

FieldModel magnet(double b0, double gradient = 0.0) {
  FieldModel m;
  m.kind = FieldModel::Kind::static_magnet;
  m.b0 = b0;
  m.gradient = gradient;
  return m;
}

TrajectoryState state(const Vec3& x, const Vec3& v) {
  TrajectoryState st;
  st.x = x;
  st.v = v;
  st.gamma = 1.0 / std::sqrt(1.0 - v.squaredNorm());
  return st;
}

}  // namespace

TEST_CASE("zero field gives a straight line") {
  FieldModel none;
  IntegratorOptions opts;
  opts.sample_interval = 5.0;
  IntegrateArgs args{none, SpinSettings{}, opts, 50.0, nullptr};
  const Trajectory t = integrate(args, state(Vec3::Zero(), Vec3(0.1, 0, 0)));
  REQUIRE(t.diag.completed);
  for (const auto& s : t.samples) {
    CHECK((s.x - Vec3(0.1 * s.t, 0, 0)).norm() < 1e-12);
    CHECK(s.v == Vec3(0.1, 0, 0));
  }
}

TEST_CASE("acceleration edge cases") {
  EigenMode mode;
  CHECK(acceleration(Vec3(0.1, 0, 0), FieldSample{}, mode, false).norm() ==
        0.0);
  CHECK_THROWS_AS(acceleration(Vec3(1.0, 0, 0), FieldSample{}, mode, false),
                  std::domain_error);
}

TEST_CASE("cyclotron orbit matches the analytic solution") {
  const double b0 = 0.5, v0 = 0.3;
  const double gamma = 1.0 / std::sqrt(1.0 - v0 * v0);
  const double radius = v0 * gamma / b0;
  IntegratorOptions opts;
  opts.abs_tol = 1e-12;
  opts.rel_tol = 1e-12;
  opts.sample_interval = 0.25;
  IntegrateArgs args{magnet(b0), SpinSettings{}, opts, 150.0, nullptr};
  const Trajectory t = integrate(args, state(Vec3::Zero(), Vec3(v0, 0, 0)));
  REQUIRE(t.diag.completed);
  double dmax = 0.0, gdev = 0.0, ldev = 0.0;
  double l0 = 0.0;
  bool first = true;
  for (const auto& s : t.samples) {
    dmax = std::max(dmax, s.x.head<2>().norm());
    gdev = std::max(gdev, std::abs(s.gamma - gamma));
    const ConservedPair cp = conserved_quantities(s, args.model, 1.0);
    if (first) {
      l0 = cp.l;
      first = false;
    }
    ldev = std::max(ldev, std::abs(cp.l - l0));
  }
  CHECK(dmax == doctest::Approx(2.0 * radius).epsilon(1e-7));
  CHECK(gdev < 1e-10);  // magnetic forces do no work
  CHECK(ldev < 1e-10);  // canonical angular momentum
}

TEST_CASE("tolerance halving shrinks the final-position change") {
  SimulationConfig cfg = fig2_config();
  cfg.t_end = 120.0;
  auto run = [&](double tol) {
    IntegratorOptions opts = cfg.integrator;
    opts.abs_tol = tol;
    opts.rel_tol = tol;
    opts.sample_interval = cfg.t_end;
    IntegrateArgs args{cfg.field, cfg.spin_settings(+1), opts, cfg.t_end,
                       nullptr};
    return integrate(args, cfg.initial_state()).samples.back().x;
  };
  const Vec3 coarse = run(1e-7);
  const Vec3 mid = run(5e-8);
  const Vec3 fine = run(1e-12);
  const double dc = (coarse - fine).norm();
  const double dm = (mid - fine).norm();
  CHECK(dm < dc);          // error decreases with tolerance
  CHECK(dc < 1e-7);        // change below the coarser tolerance
}

TEST_CASE("time reversal returns to the initial state") {
  SimulationConfig cfg = fig2_config();
  IntegratorOptions opts = cfg.integrator;
  opts.abs_tol = 1e-12;
  opts.rel_tol = 1e-12;
  opts.sample_interval = 10.0;
  const double T = 40.0;
  IntegrateArgs fwd{cfg.field, cfg.spin_settings(+1), opts, T, nullptr};
  const TrajectoryState start = cfg.initial_state();
  const Trajectory f = integrate(fwd, start);
  REQUIRE(f.diag.completed);
  TrajectoryState turn = f.samples.back();
  IntegrateArgs bwd{cfg.field, cfg.spin_settings(+1), opts, 0.0, nullptr};
  const Trajectory b = integrate(bwd, turn);
  REQUIRE(b.diag.completed);
  CHECK((b.samples.back().x - start.x).norm() < 1e-9);
  CHECK((b.samples.back().v - start.v).norm() < 1e-9);
}

TEST_CASE("proper-time formulation agrees with the lab-time one") {
  SimulationConfig cfg = fig2_config();
  IntegrateArgs args{cfg.field, cfg.spin_settings(+1), cfg.integrator, 350.0,
                     nullptr};
  const Trajectory lab = integrate(args, cfg.initial_state());
  const Trajectory pro = integrate_proper_time(args, cfg.initial_state());
  REQUIRE(lab.diag.completed);
  REQUIRE(pro.diag.completed);
  CHECK(std::abs(lab.samples.back().t - pro.samples.back().t) < 1e-9);
  CHECK((lab.samples.back().x - pro.samples.back().x).norm() < 1e-6);
  CHECK(pro.diag.max_gamma_error < 1e-9);
}

TEST_CASE("gamma consistency and action monotonicity") {
  SimulationConfig cfg = fig2_config();
  cfg.convention = SpinConvention::strict;  // imaginary lambda -> damping
  IntegrateArgs args{cfg.field, cfg.spin_settings(+1), cfg.integrator, 200.0,
                     nullptr};
  const Trajectory t = integrate(args, cfg.initial_state());
  REQUIRE(t.diag.completed);
  double prev = 0.0;
  bool damping_seen = false;
  for (const auto& s : t.samples) {
    CHECK(std::abs(s.gamma - 1.0 / std::sqrt(1.0 - s.v.squaredNorm())) == 0.0);
    CHECK(s.s_imag <= prev + 1e-15);
    if (s.s_imag < prev) damping_seen = true;
    prev = s.s_imag;
  }
  CHECK(damping_seen);  // Delta^2 < 0 inside the core: DeltaM > 0
}

TEST_CASE("spinless mode equals spin mode at chi = 0") {
  SimulationConfig cfg = fig2_config();
  cfg.t_end = 150.0;
  SpinSettings on = cfg.spin_settings(+1);
  on.chi = 0.0;
  IntegrateArgs a{cfg.field, on, cfg.integrator, cfg.t_end, nullptr};
  IntegrateArgs b{cfg.field, cfg.spin_settings(0), cfg.integrator, cfg.t_end,
                  nullptr};
  const Trajectory ta = integrate(a, cfg.initial_state());
  const Trajectory tb = integrate(b, cfg.initial_state());
  REQUIRE(ta.samples.size() == tb.samples.size());
  for (std::size_t k = 0; k < ta.samples.size(); ++k) {
    CHECK((ta.samples[k].x - tb.samples[k].x).norm() == 0.0);
    CHECK((ta.samples[k].v - tb.samples[k].v).norm() == 0.0);
  }
}

TEST_CASE("crossed fields: spin branch identical to spinless") {
  SimulationConfig cfg = fig2_config();
  cfg.field.kind = FieldModel::Kind::crossed;
  cfg.t_end = 400.0;
  IntegrateArgs on{cfg.field, cfg.spin_settings(+1), cfg.integrator, cfg.t_end,
                   nullptr};
  IntegrateArgs off{cfg.field, cfg.spin_settings(0), cfg.integrator, cfg.t_end,
                    nullptr};
  const Trajectory a = integrate(on, cfg.initial_state());
  const Trajectory b = integrate(off, cfg.initial_state());
  REQUIRE(a.diag.completed);
  REQUIRE(a.samples.size() == b.samples.size());
  for (std::size_t k = 0; k < a.samples.size(); ++k)
    CHECK((a.samples[k].x - b.samples[k].x).norm() == 0.0);
  CHECK(a.diag.near_null_encountered);  // lambda = 0 everywhere
}

TEST_CASE("integration aborts cleanly on runaway states") {
  IntegratorOptions opts;
  opts.sample_interval = 1.0;
  IntegrateArgs args{magnet(1e200), SpinSettings{}, opts, 10.0, nullptr};
  const Trajectory t = integrate(args, state(Vec3::Zero(), Vec3(0.5, 0, 0)));
  CHECK_FALSE(t.diag.completed);
  CHECK_FALSE(t.diag.message.empty());
  CHECK(t.samples.size() >= 1);  // partial output with the initial state
}

TEST_CASE("de Broglie validity ratio") {
  SimulationConfig cfg = fig2_config();
  // paper-scale electron: gamma v ~ 0.39 gives a ratio well under one
  TrajectoryState fast = state(Vec3(1, 0, 0), Vec3(0.36, 0, 0));
  const DeBroglieCheck db = debroglie_check(fast, cfg.field, cfg.chi, 1.0);
  CHECK(db.ratio < 0.1);
  CHECK_FALSE(db.flagged);
  // chi -> 0 at fixed velocity
  CHECK(debroglie_check(fast, cfg.field, 0.0, 1.0).ratio == 0.0);
  // slow electron in a hard-focused field: ratio near or above 1
  FieldModel focused = cfg.field;
  focused.bessel.kperp = 0.9;
  TrajectoryState slow = state(Vec3::Zero(), Vec3(1.5e-4, 0, 0));
  const DeBroglieCheck dbs = debroglie_check(slow, focused, cfg.chi, 1.0);
  CHECK(dbs.ratio > 1.0);
  CHECK(dbs.flagged);
  CHECK_THROWS_AS(debroglie_check(state(Vec3::Zero(), Vec3::Zero()), cfg.field,
                                  cfg.chi, 1.0),
                  std::domain_error);
}

TEST_CASE("trajectory CSV samples carry monotone time") {
  SimulationConfig cfg = fig2_config();
  cfg.t_end = 30.0;
  IntegrateArgs args{cfg.field, cfg.spin_settings(0), cfg.integrator, cfg.t_end,
                     nullptr};
  const Trajectory t = integrate(args, cfg.initial_state());
  for (std::size_t k = 1; k < t.samples.size(); ++k)
    CHECK(t.samples[k].t > t.samples[k - 1].t);
  CHECK(t.samples.back().t == doctest::Approx(30.0).epsilon(1e-12));
}

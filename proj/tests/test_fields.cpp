#include <doctest.h>

#include <cmath>
#include <random>

#include "spindrift/fields.hpp"
#include "spindrift/invariants.hpp"
#include "spindrift/oracles.hpp"
#include "spindrift/specfun.hpp"

using namespace spindrift;

namespace {

BesselBeamParams te_params(int m_z, double amp) {
  BesselBeamParams p;
  p.m_z = m_z;
  p.kperp = 0.04;
  p.amp_te = amp;
  return p;
}

SpacetimePoint random_point(std::mt19937& rng, double extent) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  return {4.0 * (u(rng) + 1.0), Vec3(extent * u(rng), extent * u(rng), 8.0 * u(rng))};
}

}  // namespace

TEST_CASE("pure TE mode has no longitudinal electric field") {
  const BesselBeamParams p = te_params(1, 0.7);
  std::mt19937 rng(2u);
  for (int i = 0; i < 50; ++i) {
    const FieldSample f = sample_bessel(p, random_point(rng, 60.0));
    CHECK(std::abs(f.e[2]) < 1e-15);
  }
}

TEST_CASE("TE on-axis longitudinal magnetic component") {
  // duality puts the TE amplitude in B_z: amp * J_0(0) at Theta = 0
  const BesselBeamParams p = te_params(0, 0.42);
  const FieldSample f = sample_bessel(p, {0.0, Vec3::Zero()});
  CHECK(f.b[2] == doctest::Approx(0.42).epsilon(1e-12));
}

TEST_CASE("m_z = 1 transverse components on axis") {
  // e- carries J_2(0) = 0, e+ carries J_0(0); E_c = (cp W0 e+ + cm W2 e-)
  const BesselBeamParams p = te_params(1, 0.6);
  const FieldSample f = sample_bessel(p, {0.0, Vec3::Zero()});
  // e+ = (1, i): at Theta = 0 the real part is (Re cp, -Im cp) with
  // |cp| = amp/(2 kperp); the e- contribution vanishes.
  const double expected = 0.6 / (2.0 * p.kperp);
  CHECK(std::hypot(f.e[0], f.e[1]) == doctest::Approx(expected).epsilon(1e-12));
  // cross-check the J_2(0) = 0 statement via the e- projection:
  // E_x - i E_y of the complex profile ~ cm J2 = 0; for the real field at
  // Theta=0 this collapses to |E| = |cp| exactly (already asserted).
}

TEST_CASE("static magnet examples") {
  const FieldSample uniform = sample_static_magnet(0.7, 0.0, {0.0, Vec3(3, -2, 5)});
  CHECK(uniform.b == Vec3(0, 0, 0.7));
  CHECK(uniform.e.norm() == 0.0);

  const FieldSample grad = sample_static_magnet(0.7, 0.1, {0.0, Vec3(0, 0, 1)});
  CHECK(grad.b[2] == doctest::Approx(0.8).epsilon(1e-15));
  // divergence-free by construction
  CHECK(std::abs(grad.grad_b(0, 0) + grad.grad_b(1, 1) + grad.grad_b(2, 2)) <
        1e-15);
}

TEST_CASE("crossed superposition satisfies both crossed-field conditions") {
  BesselBeamParams p = te_params(1, 0.005);
  std::mt19937 rng(3u);
  const double amp2 = 2.0 * 0.005 * 0.005;  // scale guard only
  for (int i = 0; i < 300; ++i) {
    const FieldSample f = sample_crossed(p, random_point(rng, 80.0));
    const Invariants inv = field_invariants(f);
    CHECK(std::abs(inv.delta2_be) < 1e-12 * amp2 / (p.kperp * p.kperp));
    CHECK(std::abs(inv.e_dot_b) < 1e-12 * amp2 / (p.kperp * p.kperp));
  }
  p.amp_te = 0.0;
  const FieldSample zero = sample_crossed(p, {1.0, Vec3(3, 4, 5)});
  CHECK(zero.e.norm() == 0.0);
  CHECK(zero.b.norm() == 0.0);
}

TEST_CASE("pure TE and TM modes have E.B = 0 pointwise") {
  std::mt19937 rng(4u);
  BesselBeamParams te = te_params(2, 0.8);
  BesselBeamParams tm;
  tm.m_z = 1;
  tm.kperp = 0.04;
  tm.amp_tm = 0.8;
  for (int i = 0; i < 100; ++i) {
    const SpacetimePoint pt = random_point(rng, 70.0);
    CHECK(std::abs(field_invariants(sample_bessel(te, pt)).e_dot_b) <
          1e-12 * 0.8 * 0.8 / (0.04 * 0.04));
    CHECK(std::abs(field_invariants(sample_bessel(tm, pt)).e_dot_b) <
          1e-12 * 0.8 * 0.8 / (0.04 * 0.04));
  }
}

TEST_CASE("Maxwell residuals and analytic derivatives (property)") {
  std::mt19937 rng(5u);
  FieldModel m;
  m.kind = FieldModel::Kind::bessel;
  m.bessel = te_params(1, 0.7);
  m.bessel.amp_tm = 0.3;
  m.bessel.phase_tm = 0.8;
  for (int i = 0; i < 40; ++i) {
    const SpacetimePoint pt = random_point(rng, 60.0);
    const auto r = oracle::maxwell_residuals(m, pt, 1e-4);
    const double amp = m.amp_scale();
    CHECK(r.div_e / amp < 1e-6);
    CHECK(r.div_b / amp < 1e-6);
    CHECK(r.faraday / amp < 1e-6);
    CHECK(r.ampere / amp < 1e-6);
    CHECK(oracle::derivative_mismatch(m, pt, 1e-4) < 1e-6);
  }
}

TEST_CASE("vector potential consistency and zero amplitude") {
  BesselBeamParams p = te_params(1, 0.0);
  CHECK(vector_potential(p, {0.3, Vec3(1, 2, 3)}).a.norm() == 0.0);

  FieldModel m;
  m.kind = FieldModel::Kind::bessel;
  m.bessel = te_params(1, 0.5);
  std::mt19937 rng(6u);
  const double h = 1e-4;
  for (int i = 0; i < 60; ++i) {
    const SpacetimePoint pt = random_point(rng, 50.0);
    const FieldSample f = m.sample(pt);
    auto a_at = [&](double dt, const Vec3& dx) -> Vec3 {
      return m.potential({pt.t + dt, pt.x + dx}).a;
    };
    const Vec3 dta = (a_at(h, Vec3::Zero()) - a_at(-h, Vec3::Zero())) / (2 * h);
    const Vec3 ax = (a_at(0, h * Vec3::UnitX()) - a_at(0, -h * Vec3::UnitX())) / (2 * h);
    const Vec3 ay = (a_at(0, h * Vec3::UnitY()) - a_at(0, -h * Vec3::UnitY())) / (2 * h);
    const Vec3 az = (a_at(0, h * Vec3::UnitZ()) - a_at(0, -h * Vec3::UnitZ())) / (2 * h);
    const Vec3 curl(ay[2] - az[1], az[0] - ax[2], ax[1] - ay[0]);
    CHECK((f.e + dta).norm() / m.amp_scale() < 1e-6);
    CHECK((f.b - curl).norm() / m.amp_scale() < 1e-6);
  }
}

TEST_CASE("static magnet potential reproduces the field") {
  FieldModel m;
  m.kind = FieldModel::Kind::static_magnet;
  m.b0 = 0.4;
  m.gradient = 0.05;
  const SpacetimePoint pt{0.0, Vec3(1.2, -0.7, 2.0)};
  const double h = 1e-5;
  auto a_at = [&](const Vec3& dx) -> Vec3 { return m.potential({0.0, pt.x + dx}).a; };
  const Vec3 ax = (a_at(h * Vec3::UnitX()) - a_at(-h * Vec3::UnitX())) / (2 * h);
  const Vec3 ay = (a_at(h * Vec3::UnitY()) - a_at(-h * Vec3::UnitY())) / (2 * h);
  const Vec3 az = (a_at(h * Vec3::UnitZ()) - a_at(-h * Vec3::UnitZ())) / (2 * h);
  const Vec3 curl(ay[2] - az[1], az[0] - ax[2], ax[1] - ay[0]);
  CHECK((m.sample(pt).b - curl).norm() < 1e-8);
}

TEST_CASE("kperp validation") {
  BesselBeamParams p = te_params(0, 0.1);
  p.kperp = 0.0;
  CHECK_THROWS_AS(p.kz(), std::invalid_argument);
  p.kperp = 1.5;
  CHECK_THROWS_AS(p.kz(), std::invalid_argument);
}

#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>

#include "spindrift/invariants.hpp"
#include "spindrift/oracles.hpp"
#include "spindrift/spinors.hpp"

using namespace spindrift;

namespace {

FieldSample eb_sample(const Vec3& e, const Vec3& b) {
  FieldSample f;
  f.e = e;
  f.b = b;
  return f;
}

FieldModel te_model(int m_z, double amp) {
  FieldModel m;
  m.kind = FieldModel::Kind::bessel;
  m.bessel.m_z = m_z;
  m.bessel.kperp = 0.04;
  m.bessel.amp_te = amp;
  return m;
}

}  // namespace

TEST_CASE("field invariants basic values") {
  const Invariants a = field_invariants(eb_sample(Vec3::Zero(), Vec3(0, 0, 0.7)));
  CHECK(a.delta2_be == doctest::Approx(0.49).epsilon(1e-15));
  CHECK(a.e_dot_b == 0.0);

  // TE mode with m_z = 1 on axis: Delta^2 = -amp^2/4
  const FieldModel m = te_model(1, 0.6);
  const Invariants c = field_invariants(m.sample({0.0, Vec3::Zero()}));
  CHECK(c.delta2_be == doctest::Approx(-0.09).epsilon(1e-12));
}

TEST_CASE("eigenvalues match spectrum shape for pure fields") {
  const auto magnetic = eigenvalues(eb_sample(Vec3::Zero(), Vec3(0, 0, 0.7)));
  CHECK(std::abs(magnetic[0] - Complex(0.7, 0)) < 1e-15);
  CHECK(std::abs(magnetic[1] + Complex(0.7, 0)) < 1e-15);
  CHECK(std::abs(magnetic[2] - Complex(0.7, 0)) < 1e-15);

  const auto electric = eigenvalues(eb_sample(Vec3(0.3, 0, 0), Vec3::Zero()));
  CHECK(std::abs(electric[0] - Complex(0, 0.3)) < 1e-15);
  CHECK(std::abs(electric[1] + Complex(0, 0.3)) < 1e-15);
}

TEST_CASE("eigenvalue pairing and oracle match (property)") {
  std::mt19937 rng(7u);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 300; ++i) {
    FieldSample f;
    for (int k = 0; k < 3; ++k) {
      f.e[k] = u(rng);
      f.b[k] = u(rng);
    }
    const auto lam = eigenvalues(f);
    CHECK(lam[0] == -lam[1]);
    CHECK(lam[2] == -lam[3]);
    Eigen::ComplexEigenSolver<CMat4> solver(sigma_f_matrix(f));
    std::array<bool, 4> used{};
    for (const Complex& c : lam) {
      int best = -1;
      double bd = 1e300;
      for (int k = 0; k < 4; ++k) {
        if (used[k]) continue;
        const double d = std::abs(c - solver.eigenvalues()[k]);
        if (d < bd) {
          bd = d;
          best = k;
        }
      }
      used[best] = true;
      CHECK(bd / std::max(std::abs(c), 1e-6) < 1e-10);
    }
  }
}

TEST_CASE("degenerate class: two-fold degeneracy when E.B = 0") {
  const auto lam = eigenvalues(eb_sample(Vec3(0.3, 0, 0), Vec3(0, 0.5, 0)));
  CHECK(std::abs(std::abs(lam[0]) - std::abs(lam[2])) < 1e-14);
}

TEST_CASE("branch continuity re-anchoring") {
  FieldSample f = eb_sample(Vec3(0.1, 0, 0), Vec3(0, 0, 0.5));
  auto prev = eigenvalues(f);
  prev = {-prev[0], prev[0], -prev[2], prev[2]};  // flipped branch
  const auto cur = eigenvalues(f, prev);
  CHECK(std::abs(cur[0] - prev[0]) < std::abs(-cur[0] - prev[0]));
}

TEST_CASE("effective mass values") {
  const EigenMode trivial = effective_mass(Complex(0, 0), 0.1);
  CHECK(trivial.mass_ratio == 1.0);
  CHECK(trivial.delta_m == 0.0);

  // l = 0, ell = mu_B b0: m_eff^2 c^2 = m^2 c^2 + m ell (Barut form)
  const double chi = 0.05, b0 = 0.8;
  const EigenMode barut = effective_mass(Complex(b0, 0.0), chi);
  const double ell_hat = 0.5 * chi * b0;
  CHECK(barut.mass_ratio ==
        doctest::Approx(std::sqrt(1.0 + ell_hat)).epsilon(1e-14));
  CHECK(barut.delta_m == 0.0);

  // ell = 0, l != 0: m_eff > m
  const EigenMode imag = effective_mass(Complex(0.0, 0.9), chi);
  const double l_hat = 0.5 * chi * 0.9;
  CHECK(imag.mass_ratio ==
        doctest::Approx(std::sqrt(0.5 * (1.0 + std::sqrt(1.0 + l_hat * l_hat))))
            .epsilon(1e-14));
  CHECK(imag.mass_ratio > 1.0);
  CHECK(imag.delta_m > 0.0);
}

TEST_CASE("pair-creation regime rejected") {
  // 1 + ell/mc^2 < 0 with l = 0
  CHECK_THROWS_AS(effective_mass(Complex(-3.0, 0.0), 1.0), std::domain_error);
}

TEST_CASE("delta M properties") {
  std::mt19937 rng(8u);
  std::uniform_real_distribution<double> u(0.01, 3.0);
  for (int i = 0; i < 200; ++i) {
    const double v = u(rng);
    CHECK(effective_mass(Complex(v, 0), 0.02).delta_m == 0.0);
    CHECK(effective_mass(Complex(-v * 0.5, 0), 0.02).delta_m == 0.0);
    CHECK(effective_mass(Complex(0, v), 0.02).delta_m ==
          effective_mass(Complex(0, -v), 0.02).delta_m);
  }
}

TEST_CASE("spin_branch_ell conventions") {
  const double chi = 0.1;
  const FieldSample mag = eb_sample(Vec3::Zero(), Vec3(0, 0, 0.7));
  const BranchEll a = spin_branch_ell(mag, +1, SpinConvention::fig2, chi, 0.7);
  CHECK(a.ell == doctest::Approx(0.5 * chi * 0.7).epsilon(1e-15));
  CHECK(a.little_l == 0.0);
  const BranchEll as = spin_branch_ell(mag, +1, SpinConvention::strict, chi, 0.7);
  CHECK(as.ell == a.ell);

  const FieldSample ele = eb_sample(Vec3(0.4, 0, 0), Vec3::Zero());
  const BranchEll b = spin_branch_ell(ele, -1, SpinConvention::fig2, chi, 0.4);
  CHECK(b.ell == doctest::Approx(-0.5 * chi * 0.4).epsilon(1e-15));
  CHECK(b.little_l == 0.0);
  const BranchEll bs = spin_branch_ell(ele, +1, SpinConvention::strict, chi, 0.4);
  CHECK(bs.ell == 0.0);
  CHECK(bs.little_l == doctest::Approx(0.5 * chi * 0.4).epsilon(1e-15));
}

TEST_CASE("spin_branch_ell rejects non-degenerate fields") {
  const FieldSample f = eb_sample(Vec3(0.3, 0, 0), Vec3(0.5, 0, 0));  // E.B != 0
  CHECK_THROWS_AS(spin_branch_ell(f, +1, SpinConvention::fig2, 0.1, 0.5),
                  std::invalid_argument);
}

TEST_CASE("mass gradient: uniform field and chi scaling") {
  FieldModel m;
  m.kind = FieldModel::Kind::static_magnet;
  m.b0 = 0.6;
  const FieldSample f = m.sample({0.0, Vec3(1, 2, 3)});
  const MassGradient g =
      mass_gradient(f, +1, SpinConvention::fig2, 0.1, m.amp_scale());
  CHECK(g.grad.norm() == 0.0);

  // chi -> 0 gives zero gradient
  const FieldModel te = te_model(1, 0.5);
  const FieldSample tf = te.sample({0.2, Vec3(8, -5, 1)});
  CHECK(mass_gradient(tf, +1, SpinConvention::fig2, 0.0, 0.5).grad.norm() ==
        0.0);
}

TEST_CASE("mass gradient matches finite differences (property)") {
  const FieldModel te = te_model(1, 0.5);
  const double chi = 0.1;
  std::mt19937 rng(9u);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int accepted = 0;
  while (accepted < 40) {
    const SpacetimePoint pt{3.0 * (u(rng) + 1.0),
                            Vec3(55.0 * u(rng), 55.0 * u(rng), 6.0 * u(rng))};
    const FieldSample f = te.sample(pt);
    const Invariants inv = field_invariants(f);
    if (std::sqrt(std::abs(inv.delta2_be)) < 1e-3 * 0.5) continue;
    ++accepted;
    const double len =
        std::abs(inv.delta2_be) / std::max(grad_delta2(f).norm(), 1e-30);
    const double h = std::min(1e-3, len / 200.0);
    for (int sign : {+1, -1}) {
      const MassGradient mg =
          mass_gradient(f, sign, SpinConvention::fig2, chi, 0.5);
      const Vec4 fd = oracle::mass_ratio_gradient_fd(
          te, pt, sign, SpinConvention::fig2, chi, h);
      CHECK((mg.grad - fd).norm() / std::max(fd.norm(), 1e-30) < 1e-6);
    }
  }
}

TEST_CASE("small-field gradient approximation shrinks quadratically") {
  const FieldModel te = te_model(1, 0.5);
  const FieldSample f = te.sample({0.3, Vec3(7.0, -3.0, 0.4)});
  auto disc = [&](double chi) {
    const Vec4 full = mass_gradient(f, +1, SpinConvention::fig2, chi, 0.5).grad;
    const Vec4 approx =
        mass_gradient_small_field(f, +1, SpinConvention::fig2, chi, 0.5);
    return (full - approx).norm();
  };
  const double ratio = disc(0.05) / disc(0.1);
  CHECK(ratio > 0.2);
  CHECK(ratio < 0.3);
}

TEST_CASE("strict convention gradient in the imaginary region") {
  // near the beam core Delta^2 < 0: strict puts the weight in little_l
  const FieldModel te = te_model(1, 0.5);
  const SpacetimePoint pt{0.1, Vec3(4.0, 2.0, 0.3)};
  const FieldSample f = te.sample(pt);
  REQUIRE(field_invariants(f).delta2_be < 0.0);
  const BranchEll be = spin_branch_ell(f, +1, SpinConvention::strict, 0.1, 0.5);
  CHECK(be.ell == 0.0);
  CHECK(be.little_l > 0.0);
  const Vec4 fd = oracle::mass_ratio_gradient_fd(te, pt, +1,
                                                 SpinConvention::strict, 0.1,
                                                 1e-4);
  const MassGradient mg = mass_gradient(f, +1, SpinConvention::strict, 0.1, 0.5);
  CHECK((mg.grad - fd).norm() / std::max(fd.norm(), 1e-30) < 1e-6);
}

#include "spindrift/oracles.hpp"

#include <cmath>
#include <stdexcept>

#include "spindrift/invariants.hpp"

namespace spindrift {
namespace oracle {

double bessel_j_series(int m, double x) {
  if (m < 0 || m > 64 || std::abs(x) > 50.0)
    throw std::domain_error("bessel_j_series: outside validated domain");
  const __float128 t = static_cast<__float128>(x) * x / 4;
  __float128 prefix = 1;
  for (int i = 1; i <= m; ++i) prefix *= static_cast<__float128>(x) / (2 * i);
  __float128 term = prefix;
  __float128 sum = term;
  for (int k = 1; k < 400; ++k) {
    term *= -t / (static_cast<__float128>(k) * (m + k));
    sum += term;
    const double mag = static_cast<double>(term < 0 ? -term : term);
    if (mag < 1e-40 * (std::abs(static_cast<double>(sum)) + 1e-300)) break;
  }
  return static_cast<double>(sum);
}

MaxwellResiduals maxwell_residuals(const FieldModel& model,
                                   const SpacetimePoint& pt, double h) {
  FieldSample sp[3][2], st[2];
  for (int k = 0; k < 3; ++k)
    for (int s = 0; s < 2; ++s) {
      SpacetimePoint q = pt;
      q.x[k] += (s == 0 ? h : -h);
      sp[k][s] = model.sample(q);
    }
  for (int s = 0; s < 2; ++s) {
    SpacetimePoint q = pt;
    q.t += (s == 0 ? h : -h);
    st[s] = model.sample(q);
  }
  auto d = [&](int k, auto&& get) -> Vec3 {
    return (get(sp[k][0]) - get(sp[k][1])) / (2 * h);
  };
  auto dt = [&](auto&& get) -> Vec3 {
    return (get(st[0]) - get(st[1])) / (2 * h);
  };

  auto ex = [](const FieldSample& f) { return f.e; };
  auto bx = [](const FieldSample& f) { return f.b; };
  const Vec3 dex = d(0, ex), dey = d(1, ex), dez = d(2, ex);
  const Vec3 dbx = d(0, bx), dby = d(1, bx), dbz = d(2, bx);
  const Vec3 dte = dt(ex), dtb = dt(bx);

  MaxwellResiduals r;
  r.div_e = std::abs(dex[0] + dey[1] + dez[2]);
  r.div_b = std::abs(dbx[0] + dby[1] + dbz[2]);
  const Vec3 curl_e(dey[2] - dez[1], dez[0] - dex[2], dex[1] - dey[0]);
  const Vec3 curl_b(dby[2] - dbz[1], dbz[0] - dbx[2], dbx[1] - dby[0]);
  r.faraday = (curl_e + dtb).norm();
  r.ampere = (curl_b - dte).norm();
  return r;
}

double derivative_mismatch(const FieldModel& model, const SpacetimePoint& pt,
                           double h) {
  const FieldSample f = model.sample(pt);
  double scale = std::max({f.e.norm(), f.b.norm(), model.amp_scale(), 1e-30});
  double worst = 0.0;
  for (int k = 0; k < 3; ++k) {
    SpacetimePoint qp = pt, qm = pt;
    qp.x[k] += h;
    qm.x[k] -= h;
    const FieldSample fp = model.sample(qp), fm = model.sample(qm);
    const Vec3 de = (fp.e - fm.e) / (2 * h);
    const Vec3 db = (fp.b - fm.b) / (2 * h);
    worst = std::max(worst, (de - f.grad_e.col(k)).norm() / scale);
    worst = std::max(worst, (db - f.grad_b.col(k)).norm() / scale);
  }
  SpacetimePoint qp = pt, qm = pt;
  qp.t += h;
  qm.t -= h;
  const FieldSample fp = model.sample(qp), fm = model.sample(qm);
  worst = std::max(worst, ((fp.e - fm.e) / (2 * h) - f.dt_e).norm() / scale);
  worst = std::max(worst, ((fp.b - fm.b) / (2 * h) - f.dt_b).norm() / scale);
  return worst;
}

Vec4 mass_ratio_gradient_fd(const FieldModel& model, const SpacetimePoint& pt,
                            int sign, SpinConvention conv, double chi,
                            double h) {
  auto mass = [&](const SpacetimePoint& q) {
    const FieldSample f = model.sample(q);
    const BranchEll be = spin_branch_ell(f, sign, conv, chi, model.amp_scale());
    const double one_ell = 1.0 + be.ell;
    const double root =
        std::sqrt(one_ell * one_ell + be.little_l * be.little_l);
    return std::sqrt(0.5 * (one_ell + root));
  };
  // 4th-order central stencil to keep truncation below the 1e-6 target.
  auto shift = [&](int mu, double d) {
    SpacetimePoint q = pt;
    if (mu == 0)
      q.t += d;
    else
      q.x[mu - 1] += d;
    return q;
  };
  Vec4 g;
  for (int mu = 0; mu < 4; ++mu) {
    g[mu] = (-mass(shift(mu, 2 * h)) + 8 * mass(shift(mu, h)) -
             8 * mass(shift(mu, -h)) + mass(shift(mu, -2 * h))) /
            (12 * h);
  }
  return g;
}

}  // namespace oracle
}  // namespace spindrift

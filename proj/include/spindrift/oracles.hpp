#pragma once

// Independent numerical oracles used only by validation suites and tests.
// Nothing here is called from the implementation modules: the Bessel oracle
// is a quad-precision ascending series (immune to the double-precision
// cancellation that forces the implementation to switch algorithms), and
// the finite-difference helpers probe field models from the outside.

#include "spindrift/fields.hpp"
#include "spindrift/invariants.hpp"

namespace spindrift {
namespace oracle {

// J_m(x) by the ascending power series summed in __float128 to machine
// convergence; valid to ~1e-13 absolute for |x| <= 50, m <= 64.
double bessel_j_series(int m, double x);

// Central finite differences of the sampled fields (step h).
struct MaxwellResiduals {
  double div_e, div_b;
  double faraday;  // |curl E + dB/dt|
  double ampere;   // |curl B - dE/dt|
};

MaxwellResiduals maxwell_residuals(const FieldModel& model,
                                   const SpacetimePoint& pt, double h);

// Max relative mismatch between the analytic derivatives stored in a
// FieldSample and central finite differences of the field values.
double derivative_mismatch(const FieldModel& model, const SpacetimePoint& pt,
                           double h);

// Finite-difference 4-gradient of the effective mass ratio for a branch.
Vec4 mass_ratio_gradient_fd(const FieldModel& model, const SpacetimePoint& pt,
                            int sign, SpinConvention conv, double chi,
                            double h);

}  // namespace oracle
}  // namespace spindrift

#pragma once

// First-kind Bessel functions J_m for integer order, self-contained so the
// core has no special-function dependency.  Ascending power series for
// small argument, downward (Miller) recurrence with sum-rule normalization
// otherwise; the switch point is documented in specfun.cpp.

namespace spindrift {

// Largest |order| accepted by bessel_j / bessel_j_derivative.
inline constexpr int kMaxBesselOrder = 64;

// J_m(x).  Accurate to ~1e-13 absolute for |x| <= 50.
// Throws std::domain_error for |m| > kMaxBesselOrder or non-finite x.
double bessel_j(int m, double x);

// J_m'(x) = (J_{m-1}(x) - J_{m+1}(x)) / 2.
double bessel_j_derivative(int m, double x);

}  // namespace spindrift

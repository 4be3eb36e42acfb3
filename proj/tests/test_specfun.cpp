#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "spindrift/oracles.hpp"
#include "spindrift/specfun.hpp"

using namespace spindrift;

TEST_CASE("bessel_j fixed values") {
  CHECK(bessel_j(0, 0.0) == 1.0);
  CHECK(bessel_j(1, 0.0) == 0.0);
  CHECK(bessel_j(7, 0.0) == 0.0);
  // J_1(1) against the independent series oracle
  CHECK(std::abs(bessel_j(1, 1.0) - oracle::bessel_j_series(1, 1.0)) < 1e-14);
}

TEST_CASE("bessel_j derivative identities") {
  CHECK(bessel_j_derivative(0, 0.0) == 0.0);       // J0' = -J1
  CHECK(bessel_j_derivative(1, 0.0) == 0.5);       // (J0 - J2)/2 at 0
  // derivative vs central finite difference of bessel_j
  const double h = 1e-6;
  const double fd = (bessel_j(2, 3.0 + h) - bessel_j(2, 3.0 - h)) / (2 * h);
  CHECK(std::abs(bessel_j_derivative(2, 3.0) - fd) < 1e-8);
}

TEST_CASE("bessel_j oracle agreement across the supported order range") {
  double worst = 0.0;
  for (int m = 0; m <= 64; m += (m < 14 ? 1 : 5))
    for (int i = 0; i < 120; ++i) {
      const double x = 50.0 * (i + 0.5) / 120.0;
      worst = std::max(worst,
                       std::abs(bessel_j(m, x) - oracle::bessel_j_series(m, x)));
    }
  CHECK(worst < 1e-12);
}

TEST_CASE("bessel_j recurrence and reflection properties") {
  std::mt19937 rng(1u);
  std::uniform_real_distribution<double> ux(0.1, 50.0);
  std::uniform_int_distribution<int> um(1, 12);
  for (int i = 0; i < 500; ++i) {
    const double x = ux(rng);
    const int m = um(rng);
    const double res = bessel_j(m - 1, x) + bessel_j(m + 1, x) -
                       (2.0 * m / x) * bessel_j(m, x);
    CHECK(std::abs(res) < 1e-10);
    const double sign = (m & 1) ? -1.0 : 1.0;
    CHECK(bessel_j(-m, x) == sign * bessel_j(m, x));
    CHECK(bessel_j(m, -x) == sign * bessel_j(m, x));
  }
}

TEST_CASE("bessel_j domain errors") {
  CHECK_THROWS_AS(bessel_j(65, 1.0), std::domain_error);
  CHECK_THROWS_AS(bessel_j(-65, 1.0), std::domain_error);
  CHECK_THROWS_AS(bessel_j(0, std::nan("")), std::domain_error);
}

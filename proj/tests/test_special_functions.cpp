#include "doctest.h"

#include <cmath>
#include <complex>
#include <vector>

#include "btlab/special_functions.hpp"

using namespace btlab;

namespace {

// Interval-bisection oracle for the m-th negative zero of Ai, independent of
// the Newton iteration inside airy_zero. Brackets from the McMahon estimate
// widened by one tenth, 80 halvings end well below 1e-12.
double bisect_airy_zero(int m) {
  const double guess = std::pow(3.0 * M_PI * (4 * m - 1) / 8.0, 2.0 / 3.0);
  double lo = guess - 0.1, hi = guess + 0.1;
  double flo = airy_ai(-lo);
  while (airy_ai(-hi) * flo > 0.0) {  // widen until the sign changes
    lo -= 0.05;
    hi += 0.05;
    flo = airy_ai(-lo);
  }
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fmid = airy_ai(-mid);
    if (fmid == 0.0) return mid;
    if (fmid * flo > 0.0) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_SUITE("special_functions") {
  TEST_CASE("airy values at pinned points") {
    // Ai(0) = 3^{-2/3}/Gamma(2/3), Ai'(0) = -3^{-1/3}/Gamma(1/3)
    CHECK(airy_ai(0.0) == doctest::Approx(0.35502805388781723926).epsilon(1e-13));
    CHECK(airy_ai_prime(0.0) == doctest::Approx(-0.25881940379280679841).epsilon(1e-13));
    CHECK(airy_ai(1.0) == doctest::Approx(0.13529241631288141552).epsilon(1e-13));
    CHECK(airy_ai(-1.0) == doctest::Approx(0.53556088329235211880).epsilon(1e-13));
    CHECK(airy_ai(5.0) == doctest::Approx(1.0834442813607441735e-4).epsilon(1e-12));
    CHECK(airy_ai(-5.0) == doctest::Approx(0.35076100902411431978).epsilon(1e-12));
    CHECK(airy_ai(10.0) == doctest::Approx(1.1047532552898685934e-10).epsilon(1e-10));
  }

  TEST_CASE("derivative consistent with central differences") {
    for (double x : {-9.3, -4.0, -1.2, 0.3, 2.0, 5.5}) {
      const double e = 1e-5;
      const double fd = (airy_ai(x + e) - airy_ai(x - e)) / (2.0 * e);
      CHECK(airy_ai_prime(x) == doctest::Approx(fd).epsilon(5e-8));
    }
  }

  TEST_CASE("first zeros match the bisection oracle to 1e-10") {
    const double z1 = airy_zero(1);
    const double z2 = airy_zero(2);
    CHECK(std::abs(z1 - bisect_airy_zero(1)) < 1e-10);
    CHECK(std::abs(z2 - bisect_airy_zero(2)) < 1e-10);
    CHECK(z1 == doctest::Approx(2.33810741045976704).epsilon(1e-12));
    CHECK(z2 == doctest::Approx(4.08794944413097062).epsilon(1e-12));
  }

  TEST_CASE("zeros are roots, ascending, and well separated") {
    const std::vector<double> zs = airy_zeros(10);
    REQUIRE(zs.size() == 10);
    for (std::size_t i = 0; i < zs.size(); ++i) {
      CHECK(std::abs(airy_ai(-zs[i])) <= 1e-10);
      CHECK(zs[i] == doctest::Approx(airy_zero(static_cast<int>(i) + 1)));
      if (i > 0) CHECK(zs[i] > zs[i - 1] + 0.5);
    }
    // slope at the first zero, used by quasimode normalization downstream
    CHECK(airy_ai_prime(-airy_zero(1)) == doctest::Approx(0.70121082272131542668).epsilon(1e-11));
  }

  TEST_CASE("airy_zero rejects out-of-range indices") {
    CHECK_THROWS_AS(airy_zero(0), std::invalid_argument);
    CHECK_THROWS_AS(airy_zero(51), std::invalid_argument);
  }

  TEST_CASE("hermite ground state and first excited state") {
    const double c = std::pow(M_PI, -0.25);
    for (double x : {-2.0, -0.7, 0.0, 0.4, 1.9}) {
      CHECK(hermite_fn(1, x) == doctest::Approx(c * std::exp(-x * x / 2)).epsilon(1e-13));
      CHECK(hermite_fn(2, x) ==
            doctest::Approx(c * std::sqrt(2.0) * x * std::exp(-x * x / 2)).epsilon(1e-13));
    }
  }

  TEST_CASE("hermite functions are orthonormal under trapezoidal quadrature") {
    const double a = 12.0, dx = 1e-2;
    const int n_pts = static_cast<int>(2 * a / dx) + 1;
    for (int n = 1; n <= 4; ++n)
      for (int m = n; m <= 4; ++m) {
        double acc = 0.0;
        for (int i = 0; i < n_pts; ++i) {
          const double x = -a + i * dx;
          const double w = (i == 0 || i == n_pts - 1) ? 0.5 : 1.0;
          acc += w * hermite_fn(n, x) * hermite_fn(m, x) * dx;
        }
        CHECK(acc == doctest::Approx(n == m ? 1.0 : 0.0).epsilon(1e-10).scale(1.0));
      }
  }

  TEST_CASE("hermite eigen-equation -f'' + x^2 f = (2n-1) f") {
    const double e = 1e-4;
    for (int n : {1, 2, 3, 5}) {
      for (double x : {-1.3, 0.2, 0.9}) {
        const double fpp =
            (hermite_fn(n, x + e) - 2 * hermite_fn(n, x) + hermite_fn(n, x - e)) / (e * e);
        const double lhs = -fpp + x * x * hermite_fn(n, x);
        CHECK(lhs == doctest::Approx((2 * n - 1) * hermite_fn(n, x)).epsilon(1e-6).scale(1.0));
      }
    }
  }

  TEST_CASE("complex hermite extension matches the real line and scales entire") {
    using cd = std::complex<double>;
    for (int n : {1, 2, 4}) {
      CHECK(std::abs(hermite_fn(n, cd(0.8, 0.0)) - hermite_fn(n, 0.8)) < 1e-14);
      // Cauchy-Riemann check via small complex step
      const cd z(0.5, 0.3), e(1e-6, 0.0), ie(0.0, 1e-6);
      const cd dx = (hermite_fn(n, z + e) - hermite_fn(n, z - e)) / (2.0 * e);
      const cd dy = (hermite_fn(n, z + ie) - hermite_fn(n, z - ie)) / (2.0 * ie);
      CHECK(std::abs(dx - dy) < 1e-7);
    }
  }
}

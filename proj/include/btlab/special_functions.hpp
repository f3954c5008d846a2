#pragma once

#include <complex>
#include <vector>

namespace btlab {

/// Airy function Ai on the real line.
///
/// Maclaurin series with extended-precision accumulation on (-7.5, 6.0),
/// Poincare asymptotics outside. Absolute error below 1e-12 on [-12, 12];
/// the two branches agree to ~1e-12 at the switch points.
double airy_ai(double x);

/// Derivative Ai'(x), same branch structure and accuracy as airy_ai.
double airy_ai_prime(double x);

/// m-th zero of Ai on the negative axis, returned as z_m > 0 with
/// Ai(-z_m) = 0 and z_1 < z_2 < ... (z_1 ~= 2.33811). Newton from the
/// McMahon seed (3 pi (4m - 1)/8)^{2/3}, polished to 1e-10. m in [1, 50].
double airy_zero(int m);

/// First m_max Airy zeros, ascending.
std::vector<double> airy_zeros(int m_max);

/// n-th L2-normalized Hermite function (n >= 1), the eigenfunction of
/// -d^2/dx^2 + x^2 with eigenvalue 2n - 1. f_1(x) = pi^{-1/4} e^{-x^2/2}.
double hermite_fn(int n, double x);

/// Entire extension of hermite_fn to complex argument.
std::complex<double> hermite_fn(int n, std::complex<double> z);

} // namespace btlab

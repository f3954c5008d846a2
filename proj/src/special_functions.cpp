#include "btlab/special_functions.hpp"

#include <cmath>
#include <mutex>
#include <stdexcept>

namespace btlab {

namespace {

// Ai(0) = 3^{-2/3}/Gamma(2/3), Ai'(0) = -3^{-1/3}/Gamma(1/3).
constexpr long double kC1 = 0.35502805388781723926L;
constexpr long double kC2 = 0.25881940379280679841L;

// Maclaurin series of Ai and Ai'. Terms alternate slowly for x < 0, so the
// partial sums suffer cancellation up to ~e^{|x|^{3/2}}; long double
// accumulation keeps the rounding floor near 1e-14 out to x = -7.5.
void airy_series(double x, double& ai, double& aip) {
  const long double x3 = static_cast<long double>(x) * x * x;

  long double f = 1.0L, tf = 1.0L;       // sum_k x^{3k} prod
  long double g = x, tg = x;             // sum_k x^{3k+1} prod
  long double fp = 0.5L * x * x, tfp = fp;
  long double gp = 1.0L, tgp = 1.0L;
  for (int k = 0; k < 60; ++k) {
    tf *= x3 / ((3 * k + 2) * (3 * k + 3));
    tg *= x3 / ((3 * k + 3) * (3 * k + 4));
    tfp *= x3 / ((3 * k + 3) * (3 * k + 5));
    tgp *= x3 / ((3 * k + 1) * (3 * k + 3));
    f += tf;
    g += tg;
    fp += tfp;
    gp += tgp;
    if (std::abs(static_cast<double>(tf)) < 1e-25 &&
        std::abs(static_cast<double>(tg)) < 1e-25) {
      break;
    }
  }
  ai = static_cast<double>(kC1 * f - kC2 * g);
  aip = static_cast<double>(kC1 * fp - kC2 * gp);
}

// u_k / v_k coefficients of the Airy asymptotic expansions,
// u_{k+1} = u_k (6k+1)(6k+5) / (72(k+1)), v_k = -u_k (6k+1)/(6k-1).
constexpr int kAsymTerms = 42;

struct AsymTables {
  double u[kAsymTerms];
  double v[kAsymTerms];
  AsymTables() {
    u[0] = 1.0;
    v[0] = 1.0;
    for (int k = 0; k + 1 < kAsymTerms; ++k) {
      u[k + 1] = u[k] * (6.0 * k + 1.0) * (6.0 * k + 5.0) / (72.0 * (k + 1.0));
      v[k + 1] = -u[k + 1] * (6.0 * (k + 1) + 1.0) / (6.0 * (k + 1) - 1.0);
    }
  }
};

const AsymTables& asym() {
  static const AsymTables t;
  return t;
}

// Exponentially decaying branch, x >= 6.
void airy_asym_pos(double x, double& ai, double& aip) {
  const AsymTables& t = asym();
  const double zeta = (2.0 / 3.0) * x * std::sqrt(x);
  double su = 0.0, sv = 0.0, pw = 1.0;
  double prev = std::abs(t.u[0]);
  for (int k = 0; k < kAsymTerms; ++k) {
    const double term = t.u[k] * pw;
    if (k > 1 && std::abs(term) > prev) break;  // past optimal truncation
    prev = std::abs(term);
    su += (k % 2 == 0 ? term : -term);
    sv += (k % 2 == 0 ? t.v[k] * pw : -t.v[k] * pw);
    pw /= zeta;
  }
  const double pre = std::exp(-zeta) / (2.0 * std::sqrt(M_PI));
  ai = pre * su / std::pow(x, 0.25);
  aip = -pre * sv * std::pow(x, 0.25);
}

// Oscillatory branch, x <= -7.5.
void airy_asym_neg(double x, double& ai, double& aip) {
  const AsymTables& t = asym();
  const double z = -x;
  const double zeta = (2.0 / 3.0) * z * std::sqrt(z);
  const double zeta2 = zeta * zeta;

  double se_u = 0.0, so_u = 0.0, se_v = 0.0, so_v = 0.0;
  double pw = 1.0;  // zeta^{-2k}
  for (int k = 0; 2 * k + 1 < kAsymTerms; ++k) {
    const double even = (k % 2 == 0 ? 1.0 : -1.0) * pw;
    se_u += even * t.u[2 * k];
    se_v += even * t.v[2 * k];
    const double odd = even / zeta;
    so_u += odd * t.u[2 * k + 1];
    so_v += odd * t.v[2 * k + 1];
    pw /= zeta2;
    if (t.u[2 * k] * pw > 1e30) break;  // far past optimal truncation
  }
  const double c = std::cos(zeta - 0.25 * M_PI);
  const double s = std::sin(zeta - 0.25 * M_PI);
  const double q = std::pow(z, 0.25);
  ai = (c * se_u + s * so_u) / (std::sqrt(M_PI) * q);
  aip = (s * se_v - c * so_v) * q / std::sqrt(M_PI);
}

void airy_both(double x, double& ai, double& aip) {
  if (x >= 6.0) {
    airy_asym_pos(x, ai, aip);
  } else if (x <= -7.5) {
    airy_asym_neg(x, ai, aip);
  } else {
    airy_series(x, ai, aip);
  }
}

}  // namespace

double airy_ai(double x) {
  double ai, aip;
  airy_both(x, ai, aip);
  return ai;
}

double airy_ai_prime(double x) {
  double ai, aip;
  airy_both(x, ai, aip);
  return aip;
}

double airy_zero(int m) {
  if (m < 1 || m > 50) {
    throw std::invalid_argument("airy_zero: m must be in [1, 50]");
  }
  static std::vector<double> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  if (static_cast<int>(cache.size()) >= m) return cache[m - 1];

  for (int j = static_cast<int>(cache.size()) + 1; j <= m; ++j) {
    const double t = 3.0 * M_PI * (4.0 * j - 1.0) / 8.0;
    double z = std::pow(t, 2.0 / 3.0);  // McMahon seed, off by O(z^{-2})
    // Newton on Ai(-z); the seed lands well inside the basin for every j.
    for (int it = 0; it < 60; ++it) {
      double ai, aip;
      airy_both(-z, ai, aip);
      const double step = ai / aip;  // dAi(-z)/dz = -Ai'(-z)
      z += step;
      if (std::abs(step) < 1e-13) break;
    }
    cache.push_back(z);
  }
  return cache[m - 1];
}

std::vector<double> airy_zeros(int m_max) {
  std::vector<double> out;
  out.reserve(m_max);
  for (int m = 1; m <= m_max; ++m) out.push_back(airy_zero(m));
  return out;
}

namespace {

// Normalized three-term recurrence  f_{k+1} = x sqrt(2/k) f_k - sqrt((k-1)/k) f_{k-1},
// seeded with the Gaussian ground state; forward-stable for the n range used here.
template <typename T>
T hermite_fn_impl(int n, T x) {
  if (n < 1 || n > 200) {
    throw std::invalid_argument("hermite_fn: n must be in [1, 200]");
  }
  const T ground = std::exp(-x * x / 2.0) / std::pow(M_PI, 0.25);
  if (n == 1) return ground;
  T fm1 = ground;
  T f = x * std::sqrt(2.0) * ground;
  for (int k = 2; k < n; ++k) {
    const T fnext = x * std::sqrt(2.0 / k) * f - std::sqrt((k - 1.0) / k) * fm1;
    fm1 = f;
    f = fnext;
  }
  return f;
}

}  // namespace

double hermite_fn(int n, double x) { return hermite_fn_impl<double>(n, x); }

std::complex<double> hermite_fn(int n, std::complex<double> z) {
  return hermite_fn_impl<std::complex<double>>(n, z);
}

} // namespace btlab

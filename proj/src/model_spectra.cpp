#include "btlab/model_spectra.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "btlab/special_functions.hpp"

namespace btlab {

namespace {

using cd = std::complex<double>;

void check_common(const ModelParams& p) {
  if (!(p.h > 0.0)) throw std::invalid_argument("ModelParams: h must be positive");
  if (p.alpha < 0.0 || p.alpha > M_PI) {
    throw std::invalid_argument("ModelParams: alpha must lie in [0, pi]");
  }
}

cd polar1(double phase) { return {std::cos(phase), std::sin(phase)}; }

}  // namespace

cd mu_n(const ModelParams& p, int m, int n) {
  check_common(p);
  if (m < 1 || n < 1) throw std::invalid_argument("mu_n: m, n must be >= 1");
  if (!(p.kappa0 > 0.0)) throw std::invalid_argument("mu_n: kappa0 must be positive");
  const double h23 = std::pow(p.h, 2.0 / 3.0);
  return airy_zero(m) * h23 * polar1(2.0 * p.alpha / 3.0) +
         (2.0 * n - 1.0) * p.h * polar1(0.5 * p.alpha) * std::sqrt(0.5 * p.kappa0);
}

cd mirrored_mu_n(const ModelParams& p, int m, int n) {
  check_common(p);
  if (m < 1 || n < 1) throw std::invalid_argument("mirrored_mu_n: m, n must be >= 1");
  if (!(p.kappa1 > 0.0)) throw std::invalid_argument("mirrored_mu_n: kappa1 must be positive");
  if (!(p.alpha > 2.0 * M_PI / 5.0)) {
    throw std::invalid_argument("mirrored_mu_n: alpha must exceed 2 pi/5");
  }
  const double at = M_PI - p.alpha;
  const double h23 = std::pow(p.h, 2.0 / 3.0);
  return polar1(p.alpha) * p.x1_max + airy_zero(m) * h23 * polar1(-2.0 * at / 3.0) +
         (2.0 * n - 1.0) * p.h * polar1(-0.5 * at) * std::sqrt(0.5 * p.kappa1);
}

cd mirrored_mu_n(const ModelParams& p, int n) { return mirrored_mu_n(p, 1, n); }

double lower_bound(const ModelParams& p) {
  check_common(p);
  if (!(p.alpha < M_PI / 2.0)) {
    throw std::invalid_argument("lower_bound: alpha must be below pi/2 (use halfplane_bound)");
  }
  return airy_zero(1) * std::pow(p.h, 2.0 / 3.0) * std::cos(2.0 * p.alpha / 3.0);
}

bool admissible_pair(double alpha, double beta) {
  return beta - 2.0 * alpha / 3.0 > -M_PI / 2.0 && beta + 2.0 * alpha / 3.0 < M_PI / 2.0 &&
         std::abs(alpha - beta) < M_PI / 2.0;
}

double admissible_beta(double alpha) {
  if (alpha < 0.0 || alpha >= 3.0 * M_PI / 5.0) {
    throw std::invalid_argument("admissible_beta: alpha must lie in [0, 3 pi/5)");
  }
  const double beta = (alpha < M_PI / 2.0) ? 0.0 : M_PI / 10.0;
  if (!admissible_pair(alpha, beta)) {
    // The two witnesses cover all of [0, 3 pi/5); reaching here means a bug.
    throw std::logic_error("admissible_beta: witness failed the admissibility inequalities");
  }
  return beta;
}

HalfPlane halfplane_bound(const ModelParams& p, double beta) {
  check_common(p);
  if (!admissible_pair(p.alpha, beta)) {
    throw std::invalid_argument("halfplane_bound: (alpha, beta) not admissible");
  }
  HalfPlane hp;
  hp.normal = polar1(beta);
  hp.offset = airy_zero(1) * std::pow(p.h, 2.0 / 3.0) * std::cos(2.0 * p.alpha / 3.0 - beta);
  return hp;
}

double lattice_distance(double R, double kappa0) {
  const double step = std::sqrt(0.5 * kappa0);
  double best = std::abs(R - step);
  for (int n = 2; (2 * n - 3) * step < R + 2.0 * step; ++n) {
    best = std::min(best, std::abs(R - (2.0 * n - 1.0) * step));
  }
  return best;
}

int lattice_count(double R, double kappa0) {
  if (!(kappa0 > 0.0)) throw std::invalid_argument("lattice_count: kappa0 must be positive");
  if (!(R > 0.0)) throw std::invalid_argument("lattice_count: R must be positive");
  if (lattice_distance(R, kappa0) < 1e-9) {
    throw std::invalid_argument("lattice_count: R collides with the excluded lattice");
  }
  const double step = std::sqrt(0.5 * kappa0);
  int count = 0;
  for (int n = 1; (2 * n - 1) * step < R; ++n) ++count;
  return count;
}

std::vector<ModeLabel> model_spectrum(const ModelParams& p, int m_max, int n_max) {
  std::vector<ModeLabel> out;
  out.reserve(static_cast<size_t>(m_max) * n_max);
  for (int m = 1; m <= m_max; ++m) {
    for (int n = 1; n <= n_max; ++n) {
      out.push_back({m, n, mu_n(p, m, n)});
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const ModeLabel& a, const ModeLabel& b) {
    return a.value.real() < b.value.real();
  });
  return out;
}

} // namespace btlab

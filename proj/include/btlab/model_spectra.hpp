#pragma once

#include <complex>
#include <vector>

namespace btlab {

/// Scalar data of the localized spectral problem: semiclassical h, potential
/// phase alpha, curvature at the left extremal point (kappa0), and for the
/// mirrored network the curvature at the right extremal point (kappa1) and
/// its abscissa x1_max.
struct ModelParams {
  double h = 0.05;
  double alpha = 0.0;
  double kappa0 = 1.0;
  double kappa1 = 1.0;
  double x1_max = 2.0;
};

/// mu_{m,n}(h, alpha) = z_m h^{2/3} e^{2 i alpha/3} + (2n-1) h e^{i alpha/2} sqrt(kappa0/2).
std::complex<double> mu_n(const ModelParams& p, int m, int n);

/// Eigenvalue ladder attached to the right extremal point, with
/// alpha~ = pi - alpha:
///   e^{i alpha} x1_max + z_1... generalized to
///   e^{i alpha} x1_max + z_m h^{2/3} e^{-2 i alpha~/3} + (2n-1) h e^{-i alpha~/2} sqrt(kappa1/2).
std::complex<double> mirrored_mu_n(const ModelParams& p, int n);
std::complex<double> mirrored_mu_n(const ModelParams& p, int m, int n);

/// Leading term of the spectral lower bound, z_1 h^{2/3} cos(2 alpha/3).
/// Only valid for alpha in [0, pi/2); beyond it use halfplane_bound.
double lower_bound(const ModelParams& p);

/// Rotated half-plane bound: every eigenvalue satisfies
///   cos(beta) Re lambda + sin(beta) Im lambda >= offset - C h^{4/3}
/// with offset = z_1 h^{2/3} cos(2 alpha/3 - beta).
struct HalfPlane {
  std::complex<double> normal;  // e^{i beta}
  double offset = 0.0;
};
HalfPlane halfplane_bound(const ModelParams& p, double beta);

/// Admissibility region of (alpha, beta):
///   beta - 2 alpha/3 > -pi/2,  beta + 2 alpha/3 < pi/2,  |alpha - beta| < pi/2.
bool admissible_pair(double alpha, double beta);

/// Witness beta for a given alpha: 0 below pi/2, pi/10 on [pi/2, 3 pi/5).
/// Rejects alpha >= 3 pi/5 (the admissible set is empty beyond it).
double admissible_beta(double alpha);

/// N(R) = #{n >= 1 : (2n-1) sqrt(kappa0/2) < R}. Rejects R within 1e-9 of
/// the excluded lattice (2N-1) sqrt(kappa0/2).
int lattice_count(double R, double kappa0);

/// Distance from R to the lattice (2N-1) sqrt(kappa0/2).
double lattice_distance(double R, double kappa0);

/// All mu_{m,n} with m <= m_max, n <= n_max, sorted by ascending real part.
struct ModeLabel {
  int m = 1;
  int n = 1;
  std::complex<double> value;
};
std::vector<ModeLabel> model_spectrum(const ModelParams& p, int m_max, int n_max);

} // namespace btlab

#pragma once

#include <complex>
#include <iosfwd>
#include <vector>

#include "btlab/assembly.hpp"
#include "btlab/model_spectra.hpp"

namespace btlab {

enum class CutoffKind {
  none,           // no taper; rely on the Dirichlet walls alone
  scaled,         // plateau/support follow h^{1/3-eta} in s and h^{2/3-eta} in u
  wall_fraction,  // s as in `scaled`, u tapers between fixed fractions of delta
};

struct CutoffSpec {
  CutoffKind kind = CutoffKind::wall_fraction;
  double eta = 0.1;
  double s_plateau = 1.8;  // units of h^{1/3-eta}
  double s_support = 2.7;
  double u_plateau = 1.8;  // units of h^{2/3-eta}, `scaled` only
  double u_support = 2.7;
  double u_lo = 0.60;  // fractions of delta, `wall_fraction` only
  double u_hi = 0.95;
};

/// Smooth transition, identically 0 for t <= 0 and 1 for t >= 1.
double ramp01(double t);

/// 1 on |x| <= plateau, 0 on |x| >= support, smooth in between.
double plateau_cut(double x, double plateau, double support);

/// Tensor comparison mode Ai(u/h^{2/3} - z_m) f_n(c s) with the complex-rotated
/// Hermite argument c = h^{-1/2} e^{i alpha/4} (kappa0/2)^{1/4}, each factor
/// L2-normalized analytically, sampled on a grid and then renormalized to
/// discrete norm 1. raw_norm keeps the pre-renormalization discrete norm, which
/// tends to 1 under refinement.
struct QuasimodeField {
  std::vector<std::complex<double>> values;
  int m = 1, n = 1;
  ModelParams params;
  double raw_norm = 0.0;
  int n_s = 0, n_u = 0;
  double ds = 0.0, du = 0.0;
  bool u_fastest = true;
  double s_origin = 0.0;  // s_of(i) = s_origin + (i+1) ds

  int index(int i_s, int i_u) const { return u_fastest ? i_s * n_u + i_u : i_u * n_s + i_s; }
  double s_of(int i_s) const { return s_origin + (i_s + 1) * ds; }
  double u_of(int i_u) const { return (i_u + 1) * du; }
};

/// Sampled on the model box grid, no cutoff. Rejects grids with fewer than
/// 8 nodes per localization scale (h^{1/2} in s, h^{2/3} in u).
QuasimodeField build_quasimode(const ModelParams& params, int m, int n, const ModelAssembly& grid);

/// Sampled on the truncated tube grid and tapered by the cutoff. Rejects
/// under-resolved grids and cutoffs whose support leaves the tube.
QuasimodeField build_tube_quasimode(const ModelParams& params, int m, int n,
                                    const TubeAssembly& tube, const CutoffSpec& cut = {});

/// ||(A - mu) psi|| / ||psi|| on the model grid; pure discretization error,
/// second order under refinement.
double model_residual(const QuasimodeField& psi, const ModelAssembly& grid,
                      std::complex<double> mu);
double model_residual(const QuasimodeField& psi, const ModelAssembly& grid, int m, int n);

struct TubeResidualReport {
  double r = 0.0;
  double r_over_h12 = 0.0;  // r / h^{1.2}
  double r_over_h14 = 0.0;  // r / h^{1.4}
  std::complex<double> mu;
  double cut_norm = 0.0;  // discrete norm of the tapered mode before renormalization
};

/// Residual of the tapered comparison mode against the assembled tube operator
/// at the tensor eigenvalue mu_{m,n}.
TubeResidualReport tube_residual(const ModelParams& params, const TubeAssembly& tube, int m,
                                 int n, const CutoffSpec& cut = {});

/// Columns s,u,re,im one node per line, for plotting localization.
void dump_quasimode_csv(const QuasimodeField& psi, std::ostream& os);

}  // namespace btlab

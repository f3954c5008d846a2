#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "btlab/banded.hpp"
#include "btlab/geometry.hpp"
#include "btlab/model_spectra.hpp"

namespace btlab {

/// Rectangular grid with an inside mask for the Cartesian discretization.
/// Nodes sit at (x0 + i dx, y0 + j dy), i < nx, j < ny. For interior nodes
/// whose axis neighbor falls outside, the fractional arm length toward the
/// boundary (in grid units, in (0, 1]) is recorded per direction.
struct GridSpec2D {
  int nx = 0, ny = 0;
  double x0 = 0.0, y0 = 0.0, dx = 0.0, dy = 0.0;

  std::vector<std::uint8_t> inside;                  // nx * ny, node-major in i
  std::vector<double> arm_w, arm_e, arm_s, arm_n;    // arm fractions per node
  std::vector<int> unknown;                          // node -> unknown index or -1
  int n_unknowns = 0;
  int merged_nodes = 0;      // interior hits closer than 1e-3 grid units to the wall

  int node(int i, int j) const { return i * ny + j; }
  double x_of(int i) const { return x0 + i * dx; }
  double y_of(int j) const { return y0 + j * dy; }
};

/// Build the mask and boundary arms for the interior of a closed curve. The
/// bounding box is padded by half a cell so no node lies exactly on the
/// boundary. Rejects grids whose interior contains isolated nodes.
GridSpec2D make_domain_grid(const CurveTable& table, int nx, int ny);

/// Full-rectangle mask (Dirichlet on the rectangle edges); used by the
/// separable oracles.
GridSpec2D make_rect_grid(double x0, double x1, double y0, double y1, int nx, int ny);

struct CartesianAssembly {
  BandedComplexMatrix matrix;
  GridSpec2D grid;
};

/// Dirichlet discretization of -h^2 Laplace + e^{i alpha} x1 on the masked
/// grid: 5-point stencil inside, Shortley-Weller unequal arms at cut nodes,
/// unknowns ordered lexicographically with the shorter grid direction fastest
/// (bandwidth = min(nx, ny)). x1_override, when set, replaces the potential's
/// x1 by an arbitrary function of position (oracle hook).
CartesianAssembly assemble_cartesian(const CurveTable& table, const ModelParams& params,
                                     GridSpec2D grid,
                                     const std::function<double(double, double)>& x1_override = {});

/// Complex-scaling profile of the tube coordinate map J_theta(u) = u e^{theta chi(u)}.
enum class ChiProfile {
  constant_one,   // chi == 1: uniform scaling of the whole tube
  ramp,           // chi == 1 near u=0, C^1-ramped to 0 by u = 0.95 delta, |chi'| <= 1.25/delta
};

struct TubeGridSpec {
  double s0 = 0.0;       // s in [-s0, s0], Dirichlet at both ends
  double delta = 0.0;    // u in (0, delta), Dirichlet at both ends
  int n_s = 0, n_u = 0;  // interior node counts
  std::complex<double> theta;   // default -i alpha/3 supplied by the caller
  ChiProfile chi = ChiProfile::constant_one;
};

struct TubeAssembly {
  BandedComplexMatrix matrix;
  TubeGridSpec spec;
  double ds = 0.0, du = 0.0;
  bool u_fastest = true;
  int index(int i_s, int i_u) const {
    return u_fastest ? i_s * spec.n_u + i_u : i_u * spec.n_s + i_s;
  }
  double s_of(int i_s) const { return -spec.s0 + (i_s + 1) * ds; }
  double u_of(int i_u) const { return (i_u + 1) * du; }
};

/// Complex-scaled operator on the truncated tube,
///   h D_s m^{-2} h D_s + h D_u (J')^{-2} h D_u + e^{i alpha} (gamma1(s) - J(u) n1(s)) + h^2 V,
/// divergence-form central differences with coefficients at half nodes, and V
/// computed from X = m^{-1/2} (J')^{-1/2} by 4th-order finite differences.
/// The boundary flux term that the exact computation leaves at u = delta is
/// dropped (Dirichlet truncation annihilates it). Rejects theta outside the
/// admissible rectangle and grids where Re (J'^{-2}) loses positivity.
TubeAssembly assemble_scaled_tube(const CurveTable& table, const ModelParams& params,
                                  const TubeGridSpec& spec);

struct ModelAssembly {
  BandedComplexMatrix matrix;
  double S = 0.0, U = 0.0;
  int n_s = 0, n_u = 0;
  double ds = 0.0, du = 0.0;
  bool u_fastest = true;
  bool box_ok = true;       // tails below 1e-12 at the box walls
  std::string note;
  int index(int i_s, int i_u) const { return u_fastest ? i_s * n_u + i_u : i_u * n_s + i_s; }
  double s_of(int i_s) const { return -S + (i_s + 1) * ds; }
  double u_of(int i_u) const { return (i_u + 1) * du; }
};

/// Tensorized model operator on [-S, S] x [0, U], Dirichlet on all sides:
///   e^{2 i alpha/3} (h^2 D_u^2 + u) + h^2 D_s^2 + e^{i alpha} kappa0 s^2 / 2.
ModelAssembly assemble_model(const ModelParams& params, double S, double U, int n_s, int n_u);

/// Tail magnitudes used for the box-size warning: the Airy factor at u = U
/// and the rotated Hermite factor at s = S (mode (m_max, n_max)).
double model_box_tail(const ModelParams& params, double S, double U, int m_max, int n_max);

/// Pick (S, U) so the mode tails at the walls drop below 1e-12 for all
/// m <= m_max, n <= n_max.
void default_model_box(const ModelParams& params, int m_max, int n_max, double& S, double& U);

} // namespace btlab

#include "btlab/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "btlab/special_functions.hpp"

namespace btlab {

namespace {

using cd = std::complex<double>;

constexpr double kMergeArm = 1e-3;

std::vector<Vec2> boundary_polyline(const CurveTable& table, int m) {
  std::vector<Vec2> p(m);
  for (int k = 0; k < m; ++k) {
    p[k] = table.gamma_at(-table.L + 2.0 * table.L * k / m);
  }
  return p;
}

bool point_inside(const std::vector<Vec2>& poly, double x, double y) {
  // even-odd crossing rule with the half-open convention on the edge y-range
  bool in = false;
  const int m = static_cast<int>(poly.size());
  for (int k = 0; k < m; ++k) {
    const Vec2 a = poly[k], b = poly[(k + 1) % m];
    if ((a.y > y) != (b.y > y)) {
      const double xc = a.x + (y - a.y) / (b.y - a.y) * (b.x - a.x);
      if (xc > x) in = !in;
    }
  }
  return in;
}

// Fraction along the axis segment p -> q (length 1 in grid units) of the
// first boundary crossing; 1.0 when the polyline is never hit.
double crossing_fraction(const std::vector<Vec2>& poly, Vec2 p, Vec2 q) {
  const int m = static_cast<int>(poly.size());
  const double lox = std::min(p.x, q.x), hix = std::max(p.x, q.x);
  const double loy = std::min(p.y, q.y), hiy = std::max(p.y, q.y);
  double best = 1.0;
  for (int k = 0; k < m; ++k) {
    const Vec2 a = poly[k], b = poly[(k + 1) % m];
    if (std::max(a.x, b.x) < lox || std::min(a.x, b.x) > hix ||
        std::max(a.y, b.y) < loy || std::min(a.y, b.y) > hiy) {
      continue;
    }
    const double rx = q.x - p.x, ry = q.y - p.y;
    const double sx = b.x - a.x, sy = b.y - a.y;
    const double den = rx * sy - ry * sx;
    if (den == 0.0) continue;
    const double t = ((a.x - p.x) * sy - (a.y - p.y) * sx) / den;
    const double w = ((a.x - p.x) * ry - (a.y - p.y) * rx) / den;
    if (t >= 0.0 && t <= 1.0 && w >= -1e-12 && w <= 1.0 + 1e-12) best = std::min(best, t);
  }
  return best;
}

}  // namespace

GridSpec2D make_rect_grid(double x0, double x1, double y0, double y1, int nx, int ny) {
  if (nx < 3 || ny < 3) throw std::invalid_argument("make_rect_grid: need nx, ny >= 3");
  GridSpec2D g;
  g.nx = nx;
  g.ny = ny;
  g.x0 = x0;
  g.y0 = y0;
  g.dx = (x1 - x0) / (nx + 1);
  g.dy = (y1 - y0) / (ny + 1);
  g.x0 = x0 + g.dx;  // interior nodes only; the rectangle edge is the wall
  g.y0 = y0 + g.dy;
  const int nn = nx * ny;
  g.inside.assign(nn, 1);
  g.arm_w.assign(nn, 1.0);
  g.arm_e.assign(nn, 1.0);
  g.arm_s.assign(nn, 1.0);
  g.arm_n.assign(nn, 1.0);
  g.unknown.assign(nn, -1);
  int next = 0;
  if (ny <= nx) {
    for (int i = 0; i < nx; ++i)
      for (int j = 0; j < ny; ++j) g.unknown[g.node(i, j)] = next++;
  } else {
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) g.unknown[g.node(i, j)] = next++;
  }
  g.n_unknowns = next;
  return g;
}

GridSpec2D make_domain_grid(const CurveTable& table, int nx, int ny) {
  if (nx < 8 || ny < 8) throw std::invalid_argument("make_domain_grid: need nx, ny >= 8");
  if (static_cast<long long>(nx) * ny > 1000000LL) {
    throw std::invalid_argument("make_domain_grid: nx * ny exceeds 1e6 nodes");
  }
  const auto poly = boundary_polyline(table, 4096);
  double xmin = poly[0].x, xmax = xmin, ymin = poly[0].y, ymax = ymin;
  for (const Vec2& p : poly) {
    xmin = std::min(xmin, p.x);
    xmax = std::max(xmax, p.x);
    ymin = std::min(ymin, p.y);
    ymax = std::max(ymax, p.y);
  }

  GridSpec2D g;
  g.nx = nx;
  g.ny = ny;
  // pad by half a nominal cell so no node lands exactly on the boundary
  const double padx = 0.5 * (xmax - xmin) / nx, pady = 0.5 * (ymax - ymin) / ny;
  g.x0 = xmin - padx;
  g.y0 = ymin - pady;
  g.dx = (xmax - xmin + 2.0 * padx) / (nx - 1);
  g.dy = (ymax - ymin + 2.0 * pady) / (ny - 1);

  const int nn = nx * ny;
  g.inside.assign(nn, 0);
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j < ny; ++j) {
      if (point_inside(poly, g.x_of(i), g.y_of(j))) g.inside[g.node(i, j)] = 1;
    }
  }

  g.arm_w.assign(nn, 1.0);
  g.arm_e.assign(nn, 1.0);
  g.arm_s.assign(nn, 1.0);
  g.arm_n.assign(nn, 1.0);

  // Compute cut arms; nodes that sit closer than kMergeArm grid units to the
  // wall are folded into the boundary and everything is recomputed (a merge
  // can expose new cut arms on its neighbors).
  for (bool again = true; again;) {
    again = false;
    for (int i = 0; i < nx && !again; ++i) {
      for (int j = 0; j < ny && !again; ++j) {
        const int id = g.node(i, j);
        if (!g.inside[id]) continue;
        const Vec2 p{g.x_of(i), g.y_of(j)};
        auto arm = [&](int ni, int nj, double& slot) {
          if (ni >= 0 && ni < nx && nj >= 0 && nj < ny && g.inside[g.node(ni, nj)]) {
            slot = 1.0;
            return;
          }
          slot = crossing_fraction(poly, p, {g.x_of(ni), g.y_of(nj)});
        };
        arm(i - 1, j, g.arm_w[id]);
        arm(i + 1, j, g.arm_e[id]);
        arm(i, j - 1, g.arm_s[id]);
        arm(i, j + 1, g.arm_n[id]);
        const double amin = std::min(std::min(g.arm_w[id], g.arm_e[id]),
                                     std::min(g.arm_s[id], g.arm_n[id]));
        if (amin < kMergeArm) {
          g.inside[id] = 0;
          ++g.merged_nodes;
          again = true;
        }
      }
    }
  }

  // isolated interior nodes make the stencil meaningless
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j < ny; ++j) {
      const int id = g.node(i, j);
      if (!g.inside[id]) continue;
      const bool alone =
          !(i > 0 && g.inside[g.node(i - 1, j)]) && !(i + 1 < nx && g.inside[g.node(i + 1, j)]) &&
          !(j > 0 && g.inside[g.node(i, j - 1)]) && !(j + 1 < ny && g.inside[g.node(i, j + 1)]);
      if (alone) {
        throw std::invalid_argument("make_domain_grid: isolated interior node; refine the grid");
      }
    }
  }

  g.unknown.assign(nn, -1);
  int next = 0;
  if (ny <= nx) {
    for (int i = 0; i < nx; ++i)
      for (int j = 0; j < ny; ++j)
        if (g.inside[g.node(i, j)]) g.unknown[g.node(i, j)] = next++;
  } else {
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i)
        if (g.inside[g.node(i, j)]) g.unknown[g.node(i, j)] = next++;
  }
  g.n_unknowns = next;
  if (g.n_unknowns == 0) throw std::invalid_argument("make_domain_grid: empty interior");
  return g;
}

CartesianAssembly assemble_cartesian(const CurveTable& table, const ModelParams& params,
                                     GridSpec2D grid,
                                     const std::function<double(double, double)>& x1_override) {
  (void)table;
  if (!(params.h > 0.0)) throw std::invalid_argument("assemble_cartesian: h must be positive");
  const cd phase{std::cos(params.alpha), std::sin(params.alpha)};
  const double h2 = params.h * params.h;

  BandedComplexMatrix A(grid.n_unknowns);
  for (int i = 0; i < grid.nx; ++i) {
    for (int j = 0; j < grid.ny; ++j) {
      const int id = grid.node(i, j);
      const int row = grid.unknown[id];
      if (row < 0) continue;
      const double rw = grid.arm_w[id], re = grid.arm_e[id];
      const double rs = grid.arm_s[id], rn = grid.arm_n[id];

      const double x = grid.x_of(i), y = grid.y_of(j);
      const double x1 = x1_override ? x1_override(x, y) : x;
      cd diag = phase * x1;
      diag += h2 * 2.0 / (grid.dx * grid.dx * rw * re);
      diag += h2 * 2.0 / (grid.dy * grid.dy * rs * rn);
      A.add(row, row, diag);

      auto couple = [&](int ni, int nj, double rho, double opp, double dd) {
        if (ni < 0 || ni >= grid.nx || nj < 0 || nj >= grid.ny) return;
        const int col = grid.unknown[grid.node(ni, nj)];
        if (col < 0) return;  // Dirichlet value 0, row eliminated
        A.add(row, col, -h2 * 2.0 / (dd * dd * rho * (rho + opp)));
      };
      couple(i - 1, j, rw, re, grid.dx);
      couple(i + 1, j, re, rw, grid.dx);
      couple(i, j - 1, rs, rn, grid.dy);
      couple(i, j + 1, rn, rs, grid.dy);
    }
  }
  return {std::move(A), std::move(grid)};
}

namespace {

// chi ramp: 1 on [0, a], C^1 trapezoid-blend descent to 0 on [a, b] with
// max |chi'| = 1/((1-c)(b-a)); a = 0.05 delta, b = 0.95 delta, c = 0.1 keeps
// |chi'| <= 1.235/delta.
struct ChiRamp {
  double a = 0.0, w = 1.0;
  static constexpr double c = 0.1;

  double value(double u) const {
    const double t = (u - a) / w;
    if (t <= 0.0) return 1.0;
    if (t >= 1.0) return 0.0;
    const double p = 1.0 / (1.0 - c);
    if (t < c) return 1.0 - p * t * t / (2.0 * c);
    if (t <= 1.0 - c) return 1.0 - p * (t - 0.5 * c);
    const double r = 1.0 - t;
    return p * r * r / (2.0 * c);
  }
  double slope(double u) const {
    const double t = (u - a) / w;
    if (t <= 0.0 || t >= 1.0) return 0.0;
    const double p = 1.0 / (1.0 - c);
    double d;
    if (t < c) {
      d = -p * t / c;
    } else if (t <= 1.0 - c) {
      d = -p;
    } else {
      d = -p * (1.0 - t) / c;
    }
    return d / w;
  }
};

struct TubeCoefficients {
  cd theta;
  ChiProfile profile;
  ChiRamp ramp;

  double chi(double u) const { return profile == ChiProfile::constant_one ? 1.0 : ramp.value(u); }
  double chi_p(double u) const { return profile == ChiProfile::constant_one ? 0.0 : ramp.slope(u); }

  cd J(double u) const { return u * std::exp(theta * chi(u)); }
  cd Jp(double u) const {
    return std::exp(theta * chi(u)) * (1.0 + theta * u * chi_p(u));
  }
};

}  // namespace

TubeAssembly assemble_scaled_tube(const CurveTable& table, const ModelParams& params,
                                  const TubeGridSpec& spec) {
  if (!(params.h > 0.0)) throw std::invalid_argument("assemble_scaled_tube: h must be positive");
  if (!(spec.delta > 0.0) || spec.delta > table.delta_max) {
    throw std::invalid_argument("assemble_scaled_tube: delta must lie in (0, delta_max]");
  }
  if (!(spec.s0 > 0.0) || spec.s0 > table.L) {
    throw std::invalid_argument("assemble_scaled_tube: s0 must lie in (0, L]");
  }
  if (spec.n_s < 8 || spec.n_u < 8) {
    throw std::invalid_argument("assemble_scaled_tube: need at least 8 interior nodes per axis");
  }
  // Admissible scaling rectangle: resolvent-set and sectoriality arguments
  // need Re theta in (-0.5, 0.05) and Im theta in (-pi/4, 0.05).
  if (!(spec.theta.real() > -0.5 && spec.theta.real() < 0.05)) {
    throw std::invalid_argument(
        "assemble_scaled_tube: Re(theta) outside (-0.5, 0.05) violates the scaling rectangle");
  }
  if (!(spec.theta.imag() > -M_PI / 4.0 && spec.theta.imag() < 0.05)) {
    throw std::invalid_argument(
        "assemble_scaled_tube: Im(theta) outside (-pi/4, 0.05) violates the scaling rectangle");
  }

  TubeCoefficients co;
  co.theta = spec.theta;
  co.profile = spec.chi;
  co.ramp = {0.05 * spec.delta, 0.9 * spec.delta};

  TubeAssembly out;
  out.spec = spec;
  out.ds = 2.0 * spec.s0 / (spec.n_s + 1);
  out.du = spec.delta / (spec.n_u + 1);
  out.u_fastest = spec.n_u <= spec.n_s;

  const cd phase{std::cos(params.alpha), std::sin(params.alpha)};
  const double h2 = params.h * params.h;

  auto m_of = [&](double s, double u) { return 1.0 - co.J(u) * table.kappa_at(s); };
  auto a_of = [&](double s, double u) {  // m^-2, the s-direction coefficient
    const cd m = m_of(s, u);
    return 1.0 / (m * m);
  };
  auto b_of = [&](double u) {  // (J')^-2, the u-direction coefficient
    const cd jp = co.Jp(u);
    return 1.0 / (jp * jp);
  };
  auto X_of = [&](double s, double u) {  // m^-1/2 (J')^-1/2
    return 1.0 / std::sqrt(m_of(s, u) * co.Jp(u));
  };
  // metric coefficients of the unconjugated divergence form; the conjugation
  // potential is V = sum_dir [c (dX)^2 - d(c X dX)] with these c's, not with
  // the flux coefficients a, b of the conjugated operator
  auto cs_of = [&](double s, double u) { return co.Jp(u) / m_of(s, u); };
  auto cu_of = [&](double s, double u) { return m_of(s, u) / co.Jp(u); };

  // positivity of the scaled metric on the grid (and a sliver beyond, where
  // the 4th-order stencils of V reach)
  for (int j = 0; j <= spec.n_u + 1; ++j) {
    const double u = j * out.du;
    if (!(b_of(u).real() > 0.0)) {
      throw std::invalid_argument(
          "assemble_scaled_tube: Re((J')^-2) <= 0 at u = " + std::to_string(u));
    }
  }
  for (int i = 0; i <= spec.n_s + 1; ++i) {
    for (int j = 0; j <= spec.n_u + 1; ++j) {
      const double s = -spec.s0 + i * out.ds, u = j * out.du;
      if (std::abs(m_of(s, u)) < 0.02) {
        throw std::invalid_argument("assemble_scaled_tube: m_theta degenerates inside the tube");
      }
    }
  }

  // All the stencil evaluations of V land on the integer lattice extended by
  // 4 nodes per side (the nested 4th-order first derivatives reach that far),
  // so X and the coefficients are tabulated there once.
  const int pad = 4;
  const int NI = spec.n_s + 2 * pad, NJ = spec.n_u + 2 * pad;
  auto gx = [&](int i, int j) { return (i + pad) * NJ + (j + pad); };  // i,j grid-relative
  std::vector<cd> Xg(static_cast<size_t>(NI) * NJ), Csg(Xg.size()), Cug(Xg.size());
  for (int i = -pad; i < spec.n_s + pad; ++i) {
    const double s = -spec.s0 + (i + 1) * out.ds;
    for (int j = -pad; j < spec.n_u + pad; ++j) {
      const double u = (j + 1) * out.du;
      Xg[gx(i, j)] = X_of(s, u);
      Csg[gx(i, j)] = cs_of(s, u);
      Cug[gx(i, j)] = cu_of(s, u);
    }
  }
  auto dXs = [&](int i, int j) {
    return (-Xg[gx(i + 2, j)] + 8.0 * Xg[gx(i + 1, j)] - 8.0 * Xg[gx(i - 1, j)] +
            Xg[gx(i - 2, j)]) /
           (12.0 * out.ds);
  };
  auto dXu = [&](int i, int j) {
    return (-Xg[gx(i, j + 2)] + 8.0 * Xg[gx(i, j + 1)] - 8.0 * Xg[gx(i, j - 1)] +
            Xg[gx(i, j - 2)]) /
           (12.0 * out.du);
  };
  // flux terms m^-2 X dX/ds and (J')^-2 X dX/du on the +-2 extension
  const int pad2 = 2;
  const int MI = spec.n_s + 2 * pad2, MJ = spec.n_u + 2 * pad2;
  auto fx = [&](int i, int j) { return (i + pad2) * MJ + (j + pad2); };
  std::vector<cd> Gs(static_cast<size_t>(MI) * MJ), Gu(Gs.size());
  for (int i = -pad2; i < spec.n_s + pad2; ++i) {
    for (int j = -pad2; j < spec.n_u + pad2; ++j) {
      Gs[fx(i, j)] = Csg[gx(i, j)] * Xg[gx(i, j)] * dXs(i, j);
      Gu[fx(i, j)] = Cug[gx(i, j)] * Xg[gx(i, j)] * dXu(i, j);
    }
  }
  auto V_at = [&](int i, int j) {
    const cd xs = dXs(i, j), xu = dXu(i, j);
    const cd dgs = (-Gs[fx(i + 2, j)] + 8.0 * Gs[fx(i + 1, j)] - 8.0 * Gs[fx(i - 1, j)] +
                    Gs[fx(i - 2, j)]) /
                   (12.0 * out.ds);
    const cd dgu = (-Gu[fx(i, j + 2)] + 8.0 * Gu[fx(i, j + 1)] - 8.0 * Gu[fx(i, j - 1)] +
                    Gu[fx(i, j - 2)]) /
                   (12.0 * out.du);
    return Csg[gx(i, j)] * xs * xs + Cug[gx(i, j)] * xu * xu - dgs - dgu;
  };

  BandedComplexMatrix A(spec.n_s * spec.n_u);
  const double cs = h2 / (out.ds * out.ds), cu = h2 / (out.du * out.du);
  std::vector<cd> bhalf(spec.n_u + 1);
  for (int j = 0; j <= spec.n_u; ++j) bhalf[j] = b_of((j + 0.5) * out.du);
  for (int i = 0; i < spec.n_s; ++i) {
    const double s = out.s_of(i);
    for (int j = 0; j < spec.n_u; ++j) {
      const double u = out.u_of(j);
      const int row = out.index(i, j);

      const cd aw = a_of(s - 0.5 * out.ds, u), ae = a_of(s + 0.5 * out.ds, u);
      const cd bs = bhalf[j], bn = bhalf[j + 1];

      cd diag = cs * (aw + ae) + cu * (bs + bn);
      diag += phase * (table.gamma1_at(s) - co.J(u) * table.normal1_at(s));
      diag += h2 * V_at(i, j);
      A.add(row, row, diag);
      if (i > 0) A.add(row, out.index(i - 1, j), -cs * aw);
      if (i + 1 < spec.n_s) A.add(row, out.index(i + 1, j), -cs * ae);
      if (j > 0) A.add(row, out.index(i, j - 1), -cu * bs);
      if (j + 1 < spec.n_u) A.add(row, out.index(i, j + 1), -cu * bn);
    }
  }
  out.matrix = std::move(A);
  return out;
}

double model_box_tail(const ModelParams& params, double S, double U, int m_max, int n_max) {
  const double h23 = std::pow(params.h, 2.0 / 3.0);
  const double airy_tail = std::abs(airy_ai(U / h23 - airy_zero(m_max)));
  const cd c = std::polar(std::pow(0.5 * params.kappa0, 0.25) / std::sqrt(params.h),
                          0.25 * params.alpha);
  const double herm_tail = std::abs(hermite_fn(n_max, c * S));
  return std::max(airy_tail, herm_tail);
}

void default_model_box(const ModelParams& params, int m_max, int n_max, double& S, double& U) {
  const double h23 = std::pow(params.h, 2.0 / 3.0);
  U = (airy_zero(m_max) + 12.0) * h23;
  const double re_c2 = std::cos(0.5 * params.alpha) * std::sqrt(0.5 * params.kappa0) / params.h;
  if (!(re_c2 > 0.0)) {
    throw std::invalid_argument("default_model_box: rotated Gaussian does not decay (alpha >= pi)");
  }
  S = std::sqrt((2.0 * n_max + 1.0) / re_c2);
  for (int it = 0; it < 200 && model_box_tail(params, S, U, m_max, n_max) > 1e-12; ++it) {
    S *= 1.08;
  }
}

ModelAssembly assemble_model(const ModelParams& params, double S, double U, int n_s, int n_u) {
  if (!(params.h > 0.0)) throw std::invalid_argument("assemble_model: h must be positive");
  if (!(S > 0.0) || !(U > 0.0)) throw std::invalid_argument("assemble_model: box must be positive");
  if (n_s < 8 || n_u < 8) {
    throw std::invalid_argument("assemble_model: need at least 8 interior nodes per axis");
  }
  ModelAssembly out;
  out.S = S;
  out.U = U;
  out.n_s = n_s;
  out.n_u = n_u;
  out.ds = 2.0 * S / (n_s + 1);
  out.du = U / (n_u + 1);
  out.u_fastest = n_u <= n_s;

  const double tail = model_box_tail(params, S, U, 1, 1);
  out.box_ok = tail <= 1e-12;
  if (!out.box_ok) {
    out.note = "box tails reach " + std::to_string(tail) + " at the walls";
  }

  const cd e23{std::cos(2.0 * params.alpha / 3.0), std::sin(2.0 * params.alpha / 3.0)};
  const cd e1{std::cos(params.alpha), std::sin(params.alpha)};
  const double h2 = params.h * params.h;
  const double cs = h2 / (out.ds * out.ds), cu = h2 / (out.du * out.du);

  BandedComplexMatrix A(n_s * n_u);
  for (int i = 0; i < n_s; ++i) {
    const double s = out.s_of(i);
    for (int j = 0; j < n_u; ++j) {
      const double u = out.u_of(j);
      const int row = out.index(i, j);
      const cd diag = e23 * (2.0 * cu + u) + 2.0 * cs + e1 * (0.5 * params.kappa0 * s * s);
      A.add(row, row, diag);
      if (i > 0) A.add(row, out.index(i - 1, j), -cs);
      if (i + 1 < n_s) A.add(row, out.index(i + 1, j), -cs);
      if (j > 0) A.add(row, out.index(i, j - 1), -cu * e23);
      if (j + 1 < n_u) A.add(row, out.index(i, j + 1), -cu * e23);
    }
  }
  out.matrix = std::move(A);
  return out;
}

} // namespace btlab

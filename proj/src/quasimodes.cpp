#include "btlab/quasimodes.hpp"

#include <cmath>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "btlab/special_functions.hpp"

namespace btlab {
namespace {

using cd = std::complex<double>;

// L2 norm of f_n(c s) over the real line, composite Simpson on the even
// integrand. Needs Re(c^2) > 0, i.e. alpha < pi for the rotated argument.
double hermite_factor_norm(int n, cd c) {
  const double decay = (c * c).real();
  if (decay <= 0.0) throw std::invalid_argument("quasimode: Hermite factor does not decay");
  const double half_width = (6.0 + 3.0 * std::sqrt(2.0 * n + 1.0)) / std::sqrt(decay);
  const int segments = 4096;
  const double step = half_width / segments;
  double acc = 0.0;
  for (int k = 0; k <= segments; ++k) {
    const double s = k * step;
    const double w = (k == 0 || k == segments) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
    acc += w * std::norm(hermite_fn(n, c * s));
  }
  acc *= step / 3.0;
  return std::sqrt(2.0 * acc);  // even integrand
}

struct FactorSet {
  double hm23 = 0.0;       // h^{-2/3}
  double zm = 0.0;         // Airy zero
  double airy_scale = 0.0;  // 1 / (h^{1/3} |Ai'(-z_m)|)
  cd c;                    // Hermite argument scale
  double herm_scale = 0.0;
  int n = 1;

  cd eval(double s, double u) const {
    const double a = airy_scale * airy_ai(u * hm23 - zm);
    const cd f = herm_scale * hermite_fn(n, c * s);
    return a * f;
  }
};

FactorSet make_factors(const ModelParams& p, int m, int n) {
  if (m < 1 || n < 1) throw std::invalid_argument("quasimode: labels m, n start at 1");
  FactorSet fs;
  fs.hm23 = std::pow(p.h, -2.0 / 3.0);
  fs.zm = airy_zero(m);
  fs.airy_scale = 1.0 / (std::cbrt(p.h) * std::abs(airy_ai_prime(-fs.zm)));
  fs.c = std::pow(p.kappa0 / 2.0, 0.25) / std::sqrt(p.h) *
         cd(std::cos(p.alpha / 4.0), std::sin(p.alpha / 4.0));
  fs.herm_scale = 1.0 / hermite_factor_norm(n, fs.c);
  fs.n = n;
  return fs;
}

void require_resolved(const ModelParams& p, double ds, double du) {
  const double need_ds = std::sqrt(p.h) / 8.0, need_du = std::pow(p.h, 2.0 / 3.0) / 8.0;
  if (ds <= need_ds && du <= need_du) return;
  std::ostringstream msg;
  msg << "quasimode: grid does not resolve the localization scales; need ds <= " << need_ds
      << " (have " << ds << ") and du <= " << need_du << " (have " << du << ")";
  throw std::invalid_argument(msg.str());
}

double renormalize(QuasimodeField& q) {
  double s2 = 0.0;
  for (const cd& v : q.values) s2 += std::norm(v);
  const double nrm = std::sqrt(s2 * q.ds * q.du);
  if (nrm < 1e-300) throw std::runtime_error("quasimode: field vanished on the grid");
  for (cd& v : q.values) v /= nrm;
  return nrm;
}

}  // namespace

double ramp01(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / t), b = std::exp(-1.0 / (1.0 - t));
  return a / (a + b);
}

double plateau_cut(double x, double plateau, double support) {
  const double ax = std::abs(x);
  if (ax <= plateau) return 1.0;
  if (ax >= support) return 0.0;
  return ramp01((support - ax) / (support - plateau));
}

QuasimodeField build_quasimode(const ModelParams& params, int m, int n,
                               const ModelAssembly& grid) {
  require_resolved(params, grid.ds, grid.du);
  const FactorSet fs = make_factors(params, m, n);
  QuasimodeField q;
  q.m = m;
  q.n = n;
  q.params = params;
  q.n_s = grid.n_s;
  q.n_u = grid.n_u;
  q.ds = grid.ds;
  q.du = grid.du;
  q.u_fastest = grid.u_fastest;
  q.s_origin = -grid.S;
  q.values.assign(static_cast<std::size_t>(grid.n_s) * grid.n_u, cd(0.0, 0.0));
  for (int i = 0; i < grid.n_s; ++i)
    for (int j = 0; j < grid.n_u; ++j)
      q.values[q.index(i, j)] = fs.eval(q.s_of(i), q.u_of(j));
  q.raw_norm = renormalize(q);
  return q;
}

QuasimodeField build_tube_quasimode(const ModelParams& params, int m, int n,
                                    const TubeAssembly& tube, const CutoffSpec& cut) {
  const double ds = tube.ds, du = tube.du;
  require_resolved(params, ds, du);
  if (cut.eta <= 0.0 || cut.eta >= 1.0 / 3.0)
    throw std::invalid_argument("quasimode: cutoff eta must lie in (0, 1/3)");

  const double s0 = tube.spec.s0, delta = tube.spec.delta;
  double sp = 0.0, ss = 0.0, up = 0.0, us = 0.0;
  if (cut.kind != CutoffKind::none) {
    const double s_unit = std::pow(params.h, 1.0 / 3.0 - cut.eta);
    sp = cut.s_plateau * s_unit;
    ss = cut.s_support * s_unit;
    if (!(sp > 0.0 && ss > sp)) throw std::invalid_argument("quasimode: bad s cutoff widths");
    if (ss > s0) {
      std::ostringstream msg;
      msg << "quasimode: s cutoff support " << ss << " exceeds tube half-length " << s0;
      throw std::invalid_argument(msg.str());
    }
    if (cut.kind == CutoffKind::scaled) {
      const double u_unit = std::pow(params.h, 2.0 / 3.0 - cut.eta);
      up = cut.u_plateau * u_unit;
      us = cut.u_support * u_unit;
    } else {
      up = cut.u_lo * delta;
      us = cut.u_hi * delta;
    }
    if (!(up > 0.0 && us > up)) throw std::invalid_argument("quasimode: bad u cutoff widths");
    if (us > delta) {
      std::ostringstream msg;
      msg << "quasimode: u cutoff support " << us << " exceeds tube depth " << delta;
      throw std::invalid_argument(msg.str());
    }
  }

  const FactorSet fs = make_factors(params, m, n);
  QuasimodeField q;
  q.m = m;
  q.n = n;
  q.params = params;
  q.n_s = tube.spec.n_s;
  q.n_u = tube.spec.n_u;
  q.ds = ds;
  q.du = du;
  q.u_fastest = tube.u_fastest;
  q.s_origin = -s0;
  q.values.assign(static_cast<std::size_t>(q.n_s) * q.n_u, cd(0.0, 0.0));
  for (int i = 0; i < q.n_s; ++i) {
    const double s = q.s_of(i);
    const double cs = cut.kind == CutoffKind::none ? 1.0 : plateau_cut(s, sp, ss);
    if (cs == 0.0) continue;
    for (int j = 0; j < q.n_u; ++j) {
      const double u = q.u_of(j);
      const double cu = cut.kind == CutoffKind::none ? 1.0 : plateau_cut(u, up, us);
      if (cu == 0.0) continue;
      q.values[q.index(i, j)] = cs * cu * fs.eval(s, u);
    }
  }
  q.raw_norm = renormalize(q);
  return q;
}

double model_residual(const QuasimodeField& psi, const ModelAssembly& grid, cd mu) {
  if (psi.values.size() != static_cast<std::size_t>(grid.matrix.dim()))
    throw std::invalid_argument("model_residual: field does not match the grid");
  std::vector<cd> y = grid.matrix.matvec(psi.values);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    num += std::norm(y[i] - mu * psi.values[i]);
    den += std::norm(psi.values[i]);
  }
  return std::sqrt(num / den);
}

double model_residual(const QuasimodeField& psi, const ModelAssembly& grid, int m, int n) {
  return model_residual(psi, grid, mu_n(psi.params, m, n));
}

TubeResidualReport tube_residual(const ModelParams& params, const TubeAssembly& tube, int m,
                                 int n, const CutoffSpec& cut) {
  const QuasimodeField psi = build_tube_quasimode(params, m, n, tube, cut);
  TubeResidualReport rep;
  rep.mu = mu_n(params, m, n);
  rep.cut_norm = psi.raw_norm;
  std::vector<cd> y = tube.matrix.matvec(psi.values);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    num += std::norm(y[i] - rep.mu * psi.values[i]);
    den += std::norm(psi.values[i]);
  }
  rep.r = std::sqrt(num / den);
  rep.r_over_h12 = rep.r / std::pow(params.h, 1.2);
  rep.r_over_h14 = rep.r / std::pow(params.h, 1.4);
  return rep;
}

void dump_quasimode_csv(const QuasimodeField& psi, std::ostream& os) {
  os << "s,u,re,im\n";
  for (int i = 0; i < psi.n_s; ++i)
    for (int j = 0; j < psi.n_u; ++j) {
      const cd v = psi.values[psi.index(i, j)];
      os << psi.s_of(i) << ',' << psi.u_of(j) << ',' << v.real() << ',' << v.imag() << '\n';
    }
}

}  // namespace btlab

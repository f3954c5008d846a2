#include "doctest.h"

#include <cmath>
#include <complex>
#include <sstream>
#include <vector>

#include "btlab/assembly.hpp"
#include "btlab/geometry.hpp"
#include "btlab/quasimodes.hpp"

using namespace btlab;
using cd = std::complex<double>;

namespace {

const CurveTable& disk_table() {
  static const CurveTable tb =
      arclength_reparametrize(ParametricCurve::shifted_disk(1.0, {1.0, 0.0}));
  return tb;
}

ModelParams base_params(double h, double alpha) {
  ModelParams p;
  p.h = h;
  p.alpha = alpha;
  p.kappa0 = 1.0;
  return p;
}

double discrete_norm(const QuasimodeField& psi, double ds, double du) {
  double acc = 0.0;
  for (cd v : psi.values) acc += std::norm(v);
  return std::sqrt(acc * ds * du);
}

cd discrete_inner(const QuasimodeField& a, const QuasimodeField& b, double ds, double du) {
  cd acc = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) acc += std::conj(a.values[i]) * b.values[i];
  return acc * ds * du;
}

}  // namespace

TEST_SUITE("quasimodes") {
  TEST_CASE("cutoff primitives are flat, monotone, and smooth at the joins") {
    CHECK(ramp01(-0.2) == 0.0);
    CHECK(ramp01(0.0) == 0.0);
    CHECK(ramp01(1.0) == 1.0);
    CHECK(ramp01(1.4) == 1.0);
    CHECK(ramp01(0.5) == doctest::Approx(0.5));  // odd symmetry about the midpoint
    double prev = 0.0;
    for (double t = 0.0; t <= 1.0; t += 0.01) {
      const double v = ramp01(t);
      CHECK(v >= prev - 1e-15);
      prev = v;
    }
    // C^1 at the endpoints: one-sided slopes vanish
    CHECK(std::abs(ramp01(1e-4) / 1e-4) < 0.05);
    CHECK(std::abs((1.0 - ramp01(1.0 - 1e-4)) / 1e-4) < 0.05);
    CHECK(plateau_cut(0.3, 1.0, 2.0) == 1.0);
    CHECK(plateau_cut(-0.99, 1.0, 2.0) == 1.0);
    CHECK(plateau_cut(2.01, 1.0, 2.0) == 0.0);
    CHECK(plateau_cut(-3.0, 1.0, 2.0) == 0.0);
    CHECK(plateau_cut(1.5, 1.0, 2.0) == doctest::Approx(0.5));
  }

  TEST_CASE("model quasimodes are unit norm and near orthogonal") {
    ModelParams p = base_params(0.05, M_PI / 4.0);
    double S = 0.0, U = 0.0;
    default_model_box(p, 1, 2, S, U);
    const ModelAssembly ma = assemble_model(p, S, U, 176, 120);
    const QuasimodeField f11 = build_quasimode(p, 1, 1, ma);
    const QuasimodeField f12 = build_quasimode(p, 1, 2, ma);
    CHECK(discrete_norm(f11, ma.ds, ma.du) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(f11.raw_norm == doctest::Approx(1.0).epsilon(1e-3));
    // the two rotated Hermite factors are orthogonal in the bilinear sense;
    // discretely this survives at grid accuracy
    CHECK(std::abs(discrete_inner(f11, f12, ma.ds, ma.du)) < 1e-3);
  }

  TEST_CASE("model residual is small and quarters under refinement") {
    ModelParams p = base_params(0.05, 0.3 * M_PI);
    double S = 0.0, U = 0.0;
    default_model_box(p, 1, 2, S, U);
    std::vector<double> errs;
    for (int mult : {1, 2}) {
      const ModelAssembly ma = assemble_model(p, S, U, 172 * mult, 118 * mult);
      const QuasimodeField f = build_quasimode(p, 1, 1, ma);
      errs.push_back(model_residual(f, ma, 1, 1));
    }
    CHECK(errs[0] < 1e-3);
    CHECK(errs[0] / errs[1] > 3.3);
    CHECK(errs[0] / errs[1] < 4.7);
  }

  TEST_CASE("off-eigenvalue residual jumps to the detuning scale") {
    ModelParams p = base_params(0.05, 0.0);
    double S = 0.0, U = 0.0;
    default_model_box(p, 1, 1, S, U);
    const ModelAssembly ma = assemble_model(p, S, U, 148, 118);
    const QuasimodeField f = build_quasimode(p, 1, 1, ma);
    const cd mu = mu_n(p, 1, 1);
    const double on = model_residual(f, ma, mu);
    const double off = model_residual(f, ma, mu + cd(p.h, 0.0));
    // (A - mu - h) psi = (A - mu) psi - h psi, so the detuned residual is h up
    // to the on-eigenvalue residual
    CHECK(off == doctest::Approx(p.h).epsilon(0.05));
    CHECK(off > 20.0 * on);
  }

  TEST_CASE("tube quasimode residual tracks the tapered model") {
    ModelParams p = base_params(0.05, 0.3 * M_PI);
    p.kappa0 = 1.0;
    TubeGridSpec spec;
    spec.s0 = std::min(disk_table().L, 10.0 * std::pow(p.h, 0.45));
    spec.delta = disk_table().delta_max;
    spec.n_s = static_cast<int>(2.0 * spec.s0 / (std::sqrt(p.h) / 12.0));
    spec.n_u = static_cast<int>(spec.delta / (std::pow(p.h, 2.0 / 3.0) / 12.0));
    spec.theta = cd(0.0, -p.alpha / 3.0);
    const TubeAssembly ta = assemble_scaled_tube(disk_table(), p, spec);
    const TubeResidualReport rep = tube_residual(p, ta, 1, 1);
    CHECK(rep.r > 0.0);
    CHECK(rep.r < 0.15);  // measured well below the crude h^{1/2} scale
    CHECK(rep.r_over_h12 == doctest::Approx(rep.r / std::pow(p.h, 1.2)));
    CHECK(rep.r_over_h14 == doctest::Approx(rep.r / std::pow(p.h, 1.4)));
    CHECK(std::abs(rep.mu - mu_n(p, 1, 1)) < 1e-15);
    CHECK(rep.cut_norm > 0.5);
    CHECK(rep.cut_norm < 1.5);
  }

  TEST_CASE("taper kinds agree where the cut is inactive") {
    ModelParams p = base_params(0.06, 0.0);
    TubeGridSpec spec;
    spec.s0 = 1.6;
    spec.delta = disk_table().delta_max;
    spec.n_s = 160;
    spec.n_u = 120;
    spec.theta = cd(0.0, 0.0);
    const TubeAssembly ta = assemble_scaled_tube(disk_table(), p, spec);
    CutoffSpec none;
    none.kind = CutoffKind::none;
    const QuasimodeField a = build_tube_quasimode(p, 1, 1, ta, none);
    const QuasimodeField b = build_tube_quasimode(p, 1, 1, ta, CutoffSpec{});
    // where the taper is 1 the two fields differ only by the global
    // renormalization, so their pointwise ratio is constant
    const int i_s = spec.n_s / 2;
    const cd r1 = b.values[b.index(i_s, 1)] / a.values[a.index(i_s, 1)];
    const cd r2 = b.values[b.index(i_s - 7, 4)] / a.values[a.index(i_s - 7, 4)];
    CHECK(std::abs(r1 - r2) < 1e-9 * std::abs(r1));
    CHECK(std::abs(r1) > 1.0);  // the taper sheds mass, the rescale compensates
  }

  TEST_CASE("under-resolved grids are rejected with the scale named") {
    ModelParams p = base_params(0.01, 0.0);  // tiny h, coarse grid
    double S = 0.0, U = 0.0;
    default_model_box(p, 1, 1, S, U);
    const ModelAssembly ma = assemble_model(p, S, U, 40, 30);
    CHECK_THROWS_AS(build_quasimode(p, 1, 1, ma), std::invalid_argument);
  }

  TEST_CASE("csv dump carries one node per line") {
    ModelParams p = base_params(0.08, 0.0);
    double S = 0.0, U = 0.0;
    default_model_box(p, 1, 1, S, U);
    const ModelAssembly ma = assemble_model(p, S, U, 144, 116);
    const QuasimodeField f = build_quasimode(p, 1, 1, ma);
    std::ostringstream os;
    dump_quasimode_csv(f, os);
    std::istringstream in(os.str());
    std::string line;
    int n_lines = 0;
    while (std::getline(in, line)) ++n_lines;
    CHECK(n_lines == 144 * 116 + 1);  // header plus one row per node
  }
}

// Command-line front end: geometry inspection, closed-form model values,
// localized solves, h-sweeps, verification batteries, projector ranks, and
// figure-data emission. Exit codes: 0 success, 1 verification gate failed,
// 2 configuration error, 3 solver failure or non-convergence.

#include <complex>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "btlab/config.hpp"
#include "btlab/harness.hpp"
#include "btlab/model_spectra.hpp"
#include "btlab/special_functions.hpp"

namespace {

using btlab::RunConfig;
using cd = std::complex<double>;

constexpr int kExitOk = 0;
constexpr int kExitAssert = 1;
constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;

struct CliState {
  std::string config_path;
  std::string preset;
  std::vector<double> alphas;
  std::vector<double> hs;
  double R = -1.0;
  std::string out;
  long long seed = -1;
  double grid_scale = -1.0;

  // model-only knobs
  double model_alpha = 0.0;
  double model_h = 0.0;
  double model_kappa0 = 0.0;
  int m_max = 2;
  int n_max = 3;

  // riesz-only knobs
  std::vector<int> riesz_n{};
};

void add_common(CLI::App* sub, CliState& st) {
  sub->set_help_flag("--help", "print help");  // keep -h free for the step size
  sub->add_option("--config", st.config_path, "JSON config file");
  sub->add_option("--preset", st.preset, "domain preset (disk, ellipse)");
  sub->add_option("--alpha", st.alphas, "argument(s) of the complex potential, in [0, pi)");
  sub->add_option("--h", st.hs, "semiclassical parameter(s), strictly decreasing");
  sub->add_option("--R", st.R, "count-disk radius in units of h (default 2.5*sqrt(kappa0/2))");
  sub->add_option("--out", st.out, "output directory or file");
  sub->add_option("--seed", st.seed, "probe seed for projector ranks");
  sub->add_option("--grid-scale", st.grid_scale, "nodes per natural length scale");
}

RunConfig resolve(const CliState& st) {
  RunConfig cfg;
  if (!st.config_path.empty()) cfg = btlab::load_config(st.config_path);
  else cfg.domain.preset = "disk";
  if (!st.preset.empty()) {
    cfg.domain = btlab::DomainConfig{};
    cfg.domain.preset = st.preset;
  }
  if (!st.alphas.empty()) cfg.alpha_list = st.alphas;
  if (!st.hs.empty()) cfg.h_list = st.hs;
  if (st.R > 0.0) cfg.R = st.R;
  if (!st.out.empty()) cfg.out = st.out;
  if (st.seed >= 0) cfg.seed = static_cast<unsigned long long>(st.seed);
  if (st.grid_scale > 0.0) cfg.sweep.grid_scale = st.grid_scale;
  cfg.sweep.seed = cfg.seed;
  btlab::validate_config(cfg);
  return cfg;
}

std::ostream& open_sink(const std::string& out, std::ofstream& file) {
  if (out.empty()) return std::cout;
  file.open(out);
  if (!file) throw btlab::ConfigError("out: cannot write '" + out + "'");
  return file;
}

int cmd_geometry(const CliState& st) {
  const RunConfig cfg = resolve(st);
  const btlab::DomainSetup dom = btlab::make_domain(cfg.domain);
  nlohmann::ordered_json j;
  j["id"] = dom.id;
  j["half_perimeter"] = dom.table.L;
  j["delta_max"] = dom.table.delta_max;
  j["speed_err"] = dom.table.speed_err;
  j["a0"] = {dom.ext.a0.x, dom.ext.a0.y};
  j["a1"] = {dom.ext.a1.x, dom.ext.a1.y};
  j["x1_min"] = dom.ext.x1_min;
  j["x1_max"] = dom.ext.x1_max;
  j["kappa0"] = dom.ext.kappa0;
  j["kappa1"] = dom.ext.kappa1;
  j["assumption_min"] = dom.ext.assumption_min;
  j["assumption_max"] = dom.ext.assumption_max;
  std::ofstream file;
  open_sink(st.out, file) << j.dump(2) << '\n';
  return kExitOk;
}

int cmd_model(const CliState& st) {
  if (!(st.model_h > 0.0)) throw btlab::ConfigError("h: must be positive");
  if (!(st.model_alpha >= 0.0 && st.model_alpha < M_PI))
    throw btlab::ConfigError("alpha: must lie in [0, pi)");
  if (!(st.model_kappa0 > 0.0)) throw btlab::ConfigError("kappa0: must be positive");
  btlab::ModelParams p;
  p.h = st.model_h;
  p.alpha = st.model_alpha;
  p.kappa0 = st.model_kappa0;
  std::ofstream file;
  std::ostream& os = open_sink(st.out, file);
  os << std::setprecision(17) << "m,n,re,im\n";
  for (int m = 1; m <= st.m_max; ++m)
    for (int n = 1; n <= st.n_max; ++n) {
      const cd mu = btlab::mu_n(p, m, n);
      os << m << ',' << n << ',' << mu.real() << ',' << mu.imag() << '\n';
    }
  return kExitOk;
}

int cmd_solve(const CliState& st) {
  const RunConfig cfg = resolve(st);
  const btlab::DomainSetup dom = btlab::make_domain(cfg.domain);
  const double alpha = cfg.alpha_list.empty() ? 0.0 : cfg.alpha_list.front();
  std::ofstream file;
  std::ostream& os = open_sink(st.out, file);
  os << std::setprecision(17) << "h,re,im,residual,richardson_err,converged\n";
  int n_rows = 0, n_conv = 0;
  bool leading_ok = true;
  for (double h : cfg.h_list) {
    const btlab::TubeSolve ts = btlab::solve_near_min(dom, alpha, h, cfg.sweep);
    leading_ok = leading_ok && !ts.spec_fine.ritz.empty() && ts.spec_fine.ritz.front().converged;
    for (const btlab::RitzPair& p : ts.spec_fine.ritz) {
      cd near = p.value;
      double dist = -1.0;
      for (const btlab::RitzPair& q : ts.spec_base.ritz) {
        const double d = std::abs(q.value - p.value);
        if (dist < 0.0 || d < dist) {
          dist = d;
          near = q.value;
        }
      }
      os << h << ',' << p.value.real() << ',' << p.value.imag() << ',' << p.residual << ','
         << btlab::richardson_error(p.value, near, cfg.sweep.refine) << ','
         << (p.converged ? 1 : 0) << '\n';
      ++n_rows;
      if (p.converged) ++n_conv;
    }
  }
  // trailing Krylov noise is tolerated; a failed leading pair is not
  return (leading_ok && 2 * n_conv >= n_rows) ? kExitOk : kExitSolver;
}

// Shared battery for sweep/verify/emit: theorem sweep and lower-bound
// diagnostics per alpha, plus the half-plane and two-network checks in the
// alpha windows where they apply.
btlab::RunOutputs run_battery(const RunConfig& cfg, const btlab::DomainSetup& dom,
                              bool with_halfplane, bool with_twonet) {
  btlab::RunOutputs out;
  out.seed = cfg.seed;
  const double R = btlab::resolve_radius(cfg.R, dom);
  for (double alpha : cfg.alpha_list) {
    btlab::AsymptoticReport rep = btlab::verify_theorem1(dom, alpha, R, cfg.h_list, cfg.sweep);
    out.lower.push_back(btlab::lower_bound_diagnostics(rep));
    out.sweeps.push_back(std::move(rep));
    if (with_halfplane && alpha >= M_PI / 2.0)
      out.half.push_back(btlab::verify_halfplane(dom, alpha, cfg.h_list, cfg.sweep));
    if (with_twonet && alpha > 2.0 * M_PI / 5.0 && alpha < 3.0 * M_PI / 5.0 &&
        dom.ext.assumption_max) {
      const double h_mid = cfg.h_list[cfg.h_list.size() / 2];
      out.twonet.push_back(btlab::verify_two_networks(dom, alpha, h_mid, cfg.sweep));
    }
  }
  return out;
}

bool outputs_converged(const btlab::RunOutputs& out) {
  bool ok = true;
  for (const btlab::AsymptoticReport& rep : out.sweeps) ok = ok && rep.all_converged;
  for (const btlab::HalfPlaneReport& hp : out.half)
    for (const btlab::AsymptoticReport& rep : hp.networks) ok = ok && rep.all_converged;
  for (const btlab::TwoNetworkReport& tn : out.twonet) ok = ok && tn.all_converged;
  return ok;
}

int cmd_sweep(const CliState& st) {
  const RunConfig cfg = resolve(st);
  const btlab::DomainSetup dom = btlab::make_domain(cfg.domain);
  const btlab::RunOutputs out = run_battery(cfg, dom, false, false);
  btlab::emit_figures(out, cfg.out);
  for (const btlab::AsymptoticReport& rep : out.sweeps)
    std::cout << "sweep " << rep.domain_id << " alpha=" << rep.alpha
              << " count_ok=" << rep.counts_ok << " trend_ok=" << rep.trend_ok
              << " converged=" << rep.all_converged << '\n';
  return outputs_converged(out) ? kExitOk : kExitSolver;
}

int cmd_verify(const CliState& st) {
  const RunConfig cfg = resolve(st);
  for (double a : cfg.alpha_list)
    if (!(a < 3.0 * M_PI / 5.0))
      throw btlab::ConfigError("alpha_list: verify supports alpha in [0, 3 pi/5)");
  const btlab::DomainSetup dom = btlab::make_domain(cfg.domain);
  const btlab::RunOutputs out = run_battery(cfg, dom, true, true);
  btlab::emit_figures(out, cfg.out);

  bool pass = true;
  auto line = [&](const std::string& what, double alpha, bool ok) {
    std::cout << (ok ? "[PASS] " : "[FAIL] ") << what << " alpha=" << alpha << '\n';
    pass = pass && ok;
  };
  for (const btlab::AsymptoticReport& rep : out.sweeps)
    line("eigenvalue-asymptotics " + rep.domain_id, rep.alpha, rep.passed);
  for (const btlab::LowerBoundReport& lb : out.lower)
    line("lower-bound " + lb.domain_id, lb.alpha, lb.passed);
  for (const btlab::HalfPlaneReport& hp : out.half)
    line("half-plane " + hp.domain_id, hp.alpha, hp.passed);
  for (const btlab::TwoNetworkReport& tn : out.twonet)
    line("two-networks " + tn.domain_id, tn.alpha, tn.mirrored_leftmost == (tn.alpha > M_PI / 2.0) || tn.alpha == M_PI / 2.0);

  if (!outputs_converged(out)) return kExitSolver;
  return pass ? kExitOk : kExitAssert;
}

int cmd_riesz(const CliState& st) {
  const RunConfig cfg = resolve(st);
  const btlab::DomainSetup dom = btlab::make_domain(cfg.domain);
  const double alpha = cfg.alpha_list.empty() ? 0.0 : cfg.alpha_list.front();
  const double h = cfg.h_list.front();
  const btlab::TubeSolve ts = btlab::solve_near_min(dom, alpha, h, cfg.sweep);
  if (!ts.spec_base.all_converged) return kExitSolver;

  std::vector<cd> hint;
  for (const btlab::RitzPair& p : ts.spec_base.ritz) hint.push_back(p.value);
  const double radius = std::pow(h, 1.5 - 2.0 * cfg.sweep.eta);
  std::vector<int> ns = st.riesz_n.empty() ? std::vector<int>{1, 2} : st.riesz_n;

  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (int n : ns) {
    const cd mu = btlab::mu_n(ts.params, 1, n);
    nlohmann::ordered_json j;
    j["n"] = n;
    j["center"] = {mu.real(), mu.imag()};
    j["radius"] = radius;
    try {
      const btlab::RieszRankReport rr = btlab::riesz_rank(
          ts.base.matrix, mu, radius, cfg.sweep.n_quadrature, cfg.sweep.n_probes,
          cfg.sweep.seed, &hint);
      j["rank"] = rr.rank;
      j["doubling_stable"] = rr.doubling_stable;
      j["singular_values"] = rr.singular_values;
    } catch (const std::runtime_error& e) {
      j["rank"] = -1;
      j["error"] = e.what();
    }
    arr.push_back(std::move(j));
  }
  std::ofstream file;
  open_sink(st.out, file) << arr.dump(2) << '\n';
  return kExitOk;
}

int cmd_emit(const CliState& st) {
  const RunConfig cfg = resolve(st);
  const btlab::DomainSetup dom = btlab::make_domain(cfg.domain);
  const btlab::RunOutputs out = run_battery(cfg, dom, true, true);
  btlab::emit_figures(out, cfg.out);
  std::cout << "wrote " << cfg.out << "/eigenvalues.csv and " << cfg.out << "/report.json\n";
  return outputs_converged(out) ? kExitOk : kExitSolver;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"semiclassical Bloch-Torrey spectral laboratory"};
  app.set_help_flag("--help", "print help");
  app.require_subcommand(1);
  CliState st;

  CLI::App* geometry = app.add_subcommand("geometry", "inspect a domain");
  add_common(geometry, st);

  CLI::App* model = app.add_subcommand("model", "closed-form localized eigenvalues");
  model->set_help_flag("--help", "print help");
  model->add_option("--alpha", st.model_alpha, "argument of the complex potential")->required();
  model->add_option("--h", st.model_h, "semiclassical parameter")->required();
  model->add_option("--kappa0", st.model_kappa0, "curvature at the left extremum")->required();
  model->add_option("--m-max", st.m_max, "largest Airy index");
  model->add_option("--n-max", st.n_max, "largest transverse index");
  model->add_option("--out", st.out, "output file");

  CLI::App* solve = app.add_subcommand("solve", "localized solve near the left extremum");
  add_common(solve, st);

  CLI::App* sweep = app.add_subcommand("sweep", "h-sweep with trend diagnostics");
  add_common(sweep, st);

  CLI::App* verify = app.add_subcommand("verify", "full verification battery");
  add_common(verify, st);

  CLI::App* riesz = app.add_subcommand("riesz", "projector ranks on the mode circles");
  add_common(riesz, st);
  riesz->add_option("--n", st.riesz_n, "transverse indices to test");

  CLI::App* emit = app.add_subcommand("emit", "write figure data (CSV + JSON)");
  add_common(emit, st);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (geometry->parsed()) return cmd_geometry(st);
    if (model->parsed()) return cmd_model(st);
    if (solve->parsed()) return cmd_solve(st);
    if (sweep->parsed()) return cmd_sweep(st);
    if (verify->parsed()) return cmd_verify(st);
    if (riesz->parsed()) return cmd_riesz(st);
    if (emit->parsed()) return cmd_emit(st);
  } catch (const btlab::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::runtime_error& e) {
    std::cerr << "solver error: " << e.what() << '\n';
    return kExitSolver;
  }
  return kExitOk;
}

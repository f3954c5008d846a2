#include "btlab/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "json.hpp"

namespace btlab {
namespace {

using nlohmann::json;

void reject_unknown(const json& j, const std::string& scope,
                    const std::set<std::string>& allowed) {
  for (const auto& item : j.items())
    if (allowed.count(item.key()) == 0)
      throw ConfigError(scope + ": unknown key '" + item.key() + "'");
}

double need_number(const json& j, const std::string& key) {
  if (!j.at(key).is_number()) throw ConfigError(key + ": expected a number");
  return j.at(key).get<double>();
}

std::vector<double> number_list(const json& j, const std::string& key) {
  if (!j.at(key).is_array()) throw ConfigError(key + ": expected an array of numbers");
  std::vector<double> out;
  for (const json& v : j.at(key)) {
    if (!v.is_number()) throw ConfigError(key + ": expected an array of numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

DomainConfig parse_domain(const json& j) {
  DomainConfig dc;
  reject_unknown(j, "domain",
                 {"preset", "kind", "radius", "a", "b", "r0", "cos", "sin", "shift"});
  if (j.contains("preset")) {
    dc.preset = j.at("preset").get<std::string>();
    return dc;
  }
  if (!j.contains("kind")) throw ConfigError("domain: needs 'preset' or 'kind'");
  dc.kind = j.at("kind").get<std::string>();
  if (j.contains("radius")) dc.radius = need_number(j, "radius");
  if (j.contains("a")) dc.a = need_number(j, "a");
  if (j.contains("b")) dc.b = need_number(j, "b");
  if (j.contains("r0")) dc.r0 = need_number(j, "r0");
  if (j.contains("cos")) dc.cos_coef = number_list(j, "cos");
  if (j.contains("sin")) dc.sin_coef = number_list(j, "sin");
  if (j.contains("shift")) {
    const std::vector<double> sh = number_list(j, "shift");
    if (sh.size() != 2) throw ConfigError("domain.shift: expected [x, y]");
    dc.shift_x = sh[0];
    dc.shift_y = sh[1];
  }
  return dc;
}

}  // namespace

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  reject_unknown(j, "config",
                 {"domain", "alpha_list", "h_list", "R", "out", "seed", "grid_scale", "refine",
                  "tol", "count", "n_trend", "eta", "n_quadrature", "n_probes", "threads",
                  "with_riesz", "with_quasimode"});

  RunConfig cfg;
  if (j.contains("domain")) cfg.domain = parse_domain(j.at("domain"));
  else cfg.domain.preset = "disk";
  if (j.contains("alpha_list")) cfg.alpha_list = number_list(j, "alpha_list");
  if (j.contains("h_list")) cfg.h_list = number_list(j, "h_list");
  if (j.contains("R")) cfg.R = need_number(j, "R");
  if (j.contains("out")) cfg.out = j.at("out").get<std::string>();
  if (j.contains("seed")) cfg.seed = j.at("seed").get<unsigned long long>();
  if (j.contains("grid_scale")) cfg.sweep.grid_scale = need_number(j, "grid_scale");
  if (j.contains("refine")) cfg.sweep.refine = need_number(j, "refine");
  if (j.contains("tol")) cfg.sweep.tol = need_number(j, "tol");
  if (j.contains("count")) cfg.sweep.count = j.at("count").get<int>();
  if (j.contains("n_trend")) cfg.sweep.n_trend = j.at("n_trend").get<int>();
  if (j.contains("eta")) cfg.sweep.eta = need_number(j, "eta");
  if (j.contains("n_quadrature")) cfg.sweep.n_quadrature = j.at("n_quadrature").get<int>();
  if (j.contains("n_probes")) cfg.sweep.n_probes = j.at("n_probes").get<int>();
  if (j.contains("threads")) cfg.sweep.threads = j.at("threads").get<int>();
  if (j.contains("with_riesz")) cfg.sweep.with_riesz = j.at("with_riesz").get<bool>();
  if (j.contains("with_quasimode")) cfg.sweep.with_quasimode = j.at("with_quasimode").get<bool>();
  cfg.sweep.seed = cfg.seed;
  return cfg;
}

void validate_config(const RunConfig& cfg) {
  for (double a : cfg.alpha_list)
    if (!(a >= 0.0 && a < M_PI))
      throw ConfigError("alpha_list: entries must lie in [0, pi)");
  if (cfg.h_list.empty()) throw ConfigError("h_list: must not be empty");
  for (double h : cfg.h_list)
    if (!(h > 0.0)) throw ConfigError("h_list: entries must be positive");
  for (std::size_t i = 1; i < cfg.h_list.size(); ++i)
    if (cfg.h_list[i] >= cfg.h_list[i - 1])
      throw ConfigError("h_list: entries must decrease strictly");
  if (!(cfg.R >= 0.0)) throw ConfigError("R: must be positive (or 0 for the curvature default)");
  if (!(cfg.sweep.grid_scale >= 4.0)) throw ConfigError("grid_scale: must be at least 4");
  if (!(cfg.sweep.refine > 1.0)) throw ConfigError("refine: must exceed 1");
  if (!(cfg.sweep.tol > 0.0)) throw ConfigError("tol: must be positive");
  if (cfg.sweep.count < 1 || cfg.sweep.count > 20)
    throw ConfigError("count: must lie in 1..20");
  if (cfg.sweep.n_trend < 1 || cfg.sweep.n_trend > cfg.sweep.count)
    throw ConfigError("n_trend: must lie in 1..count");
  if (!(cfg.sweep.eta > 0.0 && cfg.sweep.eta < 1.0 / 3.0))
    throw ConfigError("eta: must lie in (0, 1/3)");
  if (cfg.sweep.n_quadrature < 4 || cfg.sweep.n_quadrature % 2 != 0)
    throw ConfigError("n_quadrature: must be even and at least 4");
  if (cfg.sweep.n_probes < 1) throw ConfigError("n_probes: must be positive");
  if (cfg.sweep.threads < 0) throw ConfigError("threads: must be nonnegative");
}

DomainSetup make_domain(const DomainConfig& dc) {
  if (!dc.preset.empty()) return make_preset(dc.preset);
  const Vec2 shift{dc.shift_x, dc.shift_y};
  if (dc.kind == "disk")
    return setup_domain(ParametricCurve::shifted_disk(dc.radius, shift), "disk");
  if (dc.kind == "ellipse")
    return setup_domain(ParametricCurve::ellipse(dc.a, dc.b, shift), "ellipse");
  if (dc.kind == "fourier")
    return setup_domain(ParametricCurve::fourier_circle(dc.r0, dc.cos_coef, dc.sin_coef, shift),
                        "fourier");
  throw ConfigError("domain.kind: unknown kind '" + dc.kind + "'");
}

}  // namespace btlab

#pragma once
// Run configuration: a JSON file and/or command-line flags resolve into the
// domain, the (alpha, h) battery, and the solver knobs. Validation failures
// throw ConfigError naming the offending key.

#include <stdexcept>
#include <string>
#include <vector>

#include "btlab/harness.hpp"

namespace btlab {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DomainConfig {
  std::string preset;   // "disk" | "ellipse"; wins over kind when nonempty
  std::string kind;     // "disk" | "ellipse" | "fourier"
  double radius = 1.0;  // disk
  double a = 1.5, b = 1.0;                  // ellipse semi-axes
  double r0 = 1.0;                          // fourier base radius
  std::vector<double> cos_coef, sin_coef;   // fourier perturbation
  double shift_x = 0.0, shift_y = 0.0;
};

struct RunConfig {
  DomainConfig domain;                      // defaults to the disk preset
  std::vector<double> alpha_list{0.0};
  std::vector<double> h_list{0.1, 0.07, 0.05, 0.035, 0.025};
  double R = 0.0;  // count-disk radius in units of h; 0 = 2.5*sqrt(kappa0/2)
  std::string out = "out";
  unsigned long long seed = 42;
  SweepOptions sweep;
};

/// Parse a JSON config file. Unknown keys are rejected.
RunConfig load_config(const std::string& path);

/// Range checks shared by file- and flag-sourced configs.
void validate_config(const RunConfig& cfg);

/// Build the configured domain (preset or explicit curve).
DomainSetup make_domain(const DomainConfig& dc);

} // namespace btlab

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vefs/constitutive.hpp"
#include "vefs/scaling.hpp"

namespace vefs {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Run configuration, parsed from a sectioned key=value file. Exactly one of
// the [physical] / [params] blocks selects the parameter route.
struct RunConfig {
  std::string scenario = "equilibrium";

  // [domain]
  double Lx = 1.0;
  double amplitude = 0.0;  // zeta amplitude
  double wavelength = 1.0; // zeta wavelength (one period by default)
  double depth = 1.0;      // uniform bottom depth b
  int nx = 16;
  int nz = 8;

  // [params] (dimensionless) or [physical]
  std::optional<DimensionlessParams> dimensionless;
  std::optional<PhysicalParams> physical;

  // [law]
  ConstitutiveLaw law;

  // [time]
  double T = 0.1;
  int n_steps = 10;
  int n_windows = 1;

  // [tolerances]
  double tol = 1e-9;
  double lin_tol = 1e-10;
  double compat_tol = 1e-8;

  // [ladder]
  std::vector<double> T_ladder = {0.4, 0.2, 0.1, 0.05};
  double r_index = 0.25;
  double eps_prime = 0.1;

  // [output]
  std::string out_dir = "out";
  bool write_snapshots = true;
  bool emit_plot_script = true;

  // [flags]
  bool auto_halve = false;
  bool spectral_derivatives = true;
  bool run_lemma_checks = false;
  bool stub_sigma = false;
  unsigned long seed = 12345;

  DimensionlessParams params() const; // resolves the parameter route
  void validate() const;
};

RunConfig parse_config_file(const std::string &path);
RunConfig parse_config_text(const std::string &text, const std::string &origin);

// Applies one "section.key=value" (or "key=value" for uniquely named keys)
// override.
void apply_override(RunConfig &cfg, const std::string &assignment);

// All defaults materialized, suitable for byte-identical reruns.
std::string resolved_config_text(const RunConfig &cfg);

} // namespace vefs

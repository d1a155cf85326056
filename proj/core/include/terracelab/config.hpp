#pragma once

#include <optional>
#include <string>

#include "terracelab/nonlinearity.hpp"
#include "terracelab/pde.hpp"
#include "terracelab/toml.hpp"

namespace terracelab {

// Every tolerance named in the module contracts, overridable from the
// [tolerances] config table.
struct Tolerances {
  // periodic ODE machinery
  double ode_tol = 1e-10;
  double fp_tol = 1e-9;
  double merge_tol = 1e-6;
  double delta_probe = 1e-3;
  int n_probe = 50;
  int n_basin = 50;
  double basin_tol = 1e-4;
  double degenerate_tol = 1e-4;
  // nonlinearity
  double h_u = 1e-6;
  // front analysis
  double level_tol = 1e-8;
  double eps_z_rel = 1e-9;
  double profile_tol = 1e-4;
  double flat_tol_rel = 1e-3;
  double window = 40.0;
  double burn_in_frac = 0.3;
  // terrace
  double speed_zero_tol = 5e-3;
  double residual_pass_rel = 5e-3;
  double shift_conv_tol_rel = 1e-3;
  double tail_tol_rel = 1e-3;
  // certification
  double cert_tol_rel = 1e-6;
  int stencil_refine = 4;
  int eps_iters = 20;
  double lip_safety = 1.5;
};

struct IcConfig {
  std::string kind = "heaviside";  // heaviside | sandwich | front-like
  double a = 0.0;                  // heaviside jump
  double a_minus = -5.0;
  double a_plus = 5.0;
  std::string shape = "ramp";      // ramp | ramp-bump (sandwich kinds)
  double bump_amplitude = 0.0;
  double bump_width = 2.0;
  double left_level = -1.0;        // front-like tail levels
  double right_level = 0.0;
  unsigned seed = 0;
};

struct AnalysisConfig {
  std::vector<double> levels;
  bool terrace = false;
  bool residual = false;
  bool certification = false;
  bool zero_number = false;
  bool steepness = false;
  bool exp_rate = false;
  bool sandwich = false;
  int suite_cases = 0;  // randomized pair count for the suites
};

struct ScenarioConfig {
  int schema_version = 1;
  std::string name = "scenario";
  NonlinearitySpec spec = NonlinearitySpec::kpp();
  Grid grid{-50.0, 50.0, 2001};
  IcConfig ic;
  double dt = 5e-3;
  double t_end = 10.0;
  int snapshot_stride = 0;
  bool moving_window = false;
  AnalysisConfig analysis;
  Tolerances tol;
  std::string out_dir = "out";
  unsigned seed = 1;

  Field build_ic(std::vector<std::string>* warnings = nullptr,
                 bool strict = false) const;
};

/// Parses and validates a config document.  Unknown keys are rejected, the
/// schema key is mandatory, dt must divide the period, and tracked levels
/// must lie inside (0, p(0)).
ScenarioConfig parse_config(const std::string& toml_text);

/// Order-independent hash of the parsed key/value pairs (FNV-1a over the
/// canonical sorted representation).
std::string config_hash(const std::string& toml_text);

}  // namespace terracelab

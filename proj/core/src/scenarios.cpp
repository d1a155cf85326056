#include "terracelab/scenarios.hpp"

#include <map>
#include <stdexcept>

namespace terracelab {

namespace {

// Quintic tuned so the half-problem speeds are ordered (lower front faster
// than the upper one) and the intermediate platform at 0.5 shows up in
// Heaviside runs.
constexpr const char* kQuinticTerraceParams =
    "kappa = 16.0\n"
    "theta1 = 0.12\n"
    "q = 0.5\n"
    "theta2 = 0.76\n";

// Same family with the asymmetry swapped: the upper front would be faster,
// the speed ordering fails, and the minimal terrace is a single wave.
constexpr const char* kQuinticMergedParams =
    "kappa = 16.0\n"
    "theta1 = 0.3\n"
    "q = 0.5\n"
    "theta2 = 0.62\n";

const std::map<std::string, std::string>& registry() {
  static const std::map<std::string, std::string> reg = {
      {"bistable-speed",
       "schema_version = 1\n"
       "name = \"bistable-speed\"\n"
       "[nonlinearity]\n"
       "family = \"bistable-cubic\"\n"
       "period_T = 1.0\n"
       "[nonlinearity.params]\n"
       "a = 0.25\n"
       "[grid]\n"
       "xmin = -150.0\n"
       "xmax = 250.0\n"
       "n_x = 8001\n"
       "[ic]\n"
       "kind = \"heaviside\"\n"
       "a = 0.0\n"
       "[run]\n"
       "dt = 0.005\n"
       "t_end = 200.0\n"
       "[analysis]\n"
       "levels = [0.5]\n"
       "terrace = true\n"
       "residual = true\n"},

      {"balanced-bistable",
       "schema_version = 1\n"
       "name = \"balanced-bistable\"\n"
       "[nonlinearity]\n"
       "family = \"bistable-cubic\"\n"
       "period_T = 1.0\n"
       "[nonlinearity.params]\n"
       "a = 0.5\n"
       "[grid]\n"
       "xmin = -60.0\n"
       "xmax = 60.0\n"
       "n_x = 2401\n"
       "[ic]\n"
       "kind = \"heaviside\"\n"
       "a = 0.0\n"
       "[run]\n"
       "dt = 0.005\n"
       "t_end = 80.0\n"
       "[analysis]\n"
       "levels = [0.5]\n"
       "terrace = true\n"},

      {"quintic-terrace",
       "schema_version = 1\n"
       "name = \"quintic-terrace\"\n"
       "[nonlinearity]\n"
       "family = \"multistable-quintic\"\n"
       "period_T = 1.0\n"
       "[nonlinearity.params]\n" +
           std::string(kQuinticTerraceParams) +
           // Half-problem speeds ~0.10 (upper) and ~0.37 (lower): at t=180
           // the fronts are ~48 apart, clear of the 30-unit profile window.
           "[grid]\n"
           "xmin = -80.0\n"
           "xmax = 160.0\n"
           "n_x = 4801\n"
           "[ic]\n"
           "kind = \"heaviside\"\n"
           "a = 0.0\n"
           "[run]\n"
           "dt = 0.005\n"
           "t_end = 180.0\n"
           "[analysis]\n"
           "levels = [0.25, 0.75]\n"
           "terrace = true\n"
           "residual = true\n"
           "[tolerances]\n"
           "window = 30.0\n"},

      {"quintic-merged",
       "schema_version = 1\n"
       "name = \"quintic-merged\"\n"
       "[nonlinearity]\n"
       "family = \"multistable-quintic\"\n"
       "period_T = 1.0\n"
       "[nonlinearity.params]\n" +
           std::string(kQuinticMergedParams) +
           "[grid]\n"
           "xmin = -80.0\n"
           "xmax = 140.0\n"
           "n_x = 4401\n"
           "[ic]\n"
           "kind = \"heaviside\"\n"
           "a = 0.0\n"
           "[run]\n"
           "dt = 0.005\n"
           "t_end = 100.0\n"
           "[analysis]\n"
           "levels = [0.5]\n"
           "terrace = true\n"},

      // Domain width keeps every front >= 50 units from the boundaries, so
      // truncation boundary layers stay far below the sign-change deadband.
      {"zero-number-suite",
       "schema_version = 1\n"
       "name = \"zero-number-suite\"\n"
       "seed = 2024\n"
       "[nonlinearity]\n"
       "family = \"bistable-cubic\"\n"
       "period_T = 1.0\n"
       "[nonlinearity.params]\n"
       "a = 0.3\n"
       "[grid]\n"
       "xmin = -60.0\n"
       "xmax = 60.0\n"
       "n_x = 2401\n"
       "[ic]\n"
       "kind = \"sandwich\"\n"
       "a_minus = -4.0\n"
       "a_plus = 4.0\n"
       "shape = \"ramp-bump\"\n"
       "bump_amplitude = 0.35\n"
       "[run]\n"
       "dt = 0.01\n"
       "t_end = 8.0\n"
       "[analysis]\n"
       "zero_number = true\n"
       "suite_cases = 50\n"},

      {"steepness-suite",
       "schema_version = 1\n"
       "name = \"steepness-suite\"\n"
       "seed = 7\n"
       "[nonlinearity]\n"
       "family = \"bistable-cubic\"\n"
       "period_T = 1.0\n"
       "[nonlinearity.params]\n"
       "a = 0.3\n"
       "[grid]\n"
       "xmin = -20.0\n"
       "xmax = 20.0\n"
       "n_x = 801\n"
       "[ic]\n"
       "kind = \"heaviside\"\n"
       "a = 0.0\n"
       "[run]\n"
       "dt = 0.01\n"
       "t_end = 6.0\n"
       "[analysis]\n"
       "steepness = true\n"
       "suite_cases = 25\n"},

      {"tpp-bistable-h3",
       "schema_version = 1\n"
       "name = \"tpp-bistable-h3\"\n"
       "[nonlinearity]\n"
       "family = \"time-periodic-product\"\n"
       "inner_family = \"bistable-cubic\"\n"
       "period_T = 1.0\n"
       "[nonlinearity.params]\n"
       "a = 0.3\n"
       "rho = 0.5\n"
       "[grid]\n"
       "xmin = -70.0\n"
       "xmax = 90.0\n"
       "n_x = 3201\n"
       "[ic]\n"
       "kind = \"front-like\"\n"
       "a_minus = -6.0\n"
       "a_plus = 6.0\n"
       "left_level = 0.9\n"
       "right_level = 0.05\n"
       "bump_amplitude = 0.3\n"
       "bump_width = 2.0\n"
       "[run]\n"
       "dt = 0.005\n"
       "t_end = 60.0\n"
       "snapshot_stride = 20\n"
       "[analysis]\n"
       "levels = [0.65]\n"
       "terrace = true\n"
       "exp_rate = true\n"
       "sandwich = true\n"},

      {"kpp-negative-control",
       "schema_version = 1\n"
       "name = \"kpp-negative-control\"\n"
       "[nonlinearity]\n"
       "family = \"kpp\"\n"
       "period_T = 1.0\n"
       "[grid]\n"
       "xmin = -30.0\n"
       "xmax = 50.0\n"
       "n_x = 1601\n"
       "[ic]\n"
       "kind = \"heaviside\"\n"
       "a = 0.0\n"
       "[run]\n"
       "dt = 0.01\n"
       "t_end = 20.0\n"
       "[analysis]\n"
       "levels = [0.5]\n"
       "exp_rate = true\n"
       "sandwich = true\n"}};
  return reg;
}

}  // namespace

std::vector<std::string> scenario_names() {
  std::vector<std::string> names;
  for (const auto& [k, v] : registry()) {
    (void)v;
    names.push_back(k);
  }
  return names;
}

bool has_scenario(const std::string& name) { return registry().count(name) > 0; }

std::string scenario_toml(const std::string& name) {
  auto it = registry().find(name);
  if (it == registry().end())
    throw std::invalid_argument("unknown scenario: " + name);
  return it->second;
}

}  // namespace terracelab

#include "terracelab/config.hpp"

#include <algorithm>
#include <set>

namespace terracelab {

Field ScenarioConfig::build_ic(std::vector<std::string>* warnings,
                               bool strict) const {
  const double p0 = ic.kind == "heaviside" || ic.kind == "sandwich"
                        ? 1.0
                        : std::max(ic.left_level, 1.0);
  if (ic.kind == "heaviside") return heaviside_ic(grid, ic.a, 1.0, strict, warnings);
  SandwichParams sp;
  sp.bump_amplitude = ic.bump_amplitude;
  sp.bump_width = ic.bump_width;
  sp.seed = ic.seed != 0 ? ic.seed : seed;
  if (ic.kind == "sandwich") {
    sp.shape = ic.shape == "ramp-bump" ? SandwichShape::ramp_bump
                                       : SandwichShape::ramp;
    return sandwich_ic(grid, ic.a_minus, ic.a_plus, 1.0, sp);
  }
  if (ic.kind == "front-like") {
    sp.shape = SandwichShape::general_h3;
    sp.left_level = ic.left_level;
    sp.right_level = ic.right_level;
    return sandwich_ic(grid, ic.a_minus, ic.a_plus, p0, sp);
  }
  throw std::invalid_argument("unknown ic.kind: " + ic.kind);
}

namespace {

class KeyReader {
 public:
  explicit KeyReader(const TomlTable& t) : table_(t) {}

  bool has(const std::string& key) {
    seen_.insert(key);
    return table_.count(key) > 0;
  }
  const TomlValue& get(const std::string& key) {
    seen_.insert(key);
    auto it = table_.find(key);
    if (it == table_.end())
      throw std::invalid_argument("config: missing required key '" + key + "'");
    return it->second;
  }
  double number(const std::string& key, std::optional<double> def = {}) {
    if (!has(key)) {
      if (def) return *def;
      throw std::invalid_argument("config: missing required key '" + key + "'");
    }
    return table_.at(key).as_number();
  }
  long long integer(const std::string& key, std::optional<long long> def = {}) {
    if (!has(key)) {
      if (def) return *def;
      throw std::invalid_argument("config: missing required key '" + key + "'");
    }
    const TomlValue& v = table_.at(key);
    if (v.type != TomlValue::Type::integer)
      throw std::invalid_argument("config: key '" + key + "' must be an integer");
    return v.i;
  }
  std::string str(const std::string& key, std::optional<std::string> def = {}) {
    if (!has(key)) {
      if (def) return *def;
      throw std::invalid_argument("config: missing required key '" + key + "'");
    }
    const TomlValue& v = table_.at(key);
    if (v.type != TomlValue::Type::string)
      throw std::invalid_argument("config: key '" + key + "' must be a string");
    return v.s;
  }
  bool boolean(const std::string& key, bool def) {
    if (!has(key)) return def;
    const TomlValue& v = table_.at(key);
    if (v.type != TomlValue::Type::boolean)
      throw std::invalid_argument("config: key '" + key + "' must be a bool");
    return v.b;
  }
  std::vector<double> number_array(const std::string& key) {
    if (!has(key)) return {};
    const TomlValue& v = table_.at(key);
    if (v.type != TomlValue::Type::array)
      throw std::invalid_argument("config: key '" + key + "' must be an array");
    std::vector<double> out;
    for (const auto& e : v.arr) out.push_back(e.as_number());
    return out;
  }
  /// All keys under `prefix.` collected as a name -> number map.
  std::map<std::string, double> number_table(const std::string& prefix) {
    std::map<std::string, double> out;
    for (const auto& [k, v] : table_) {
      if (k.rfind(prefix + ".", 0) == 0) {
        seen_.insert(k);
        out[k.substr(prefix.size() + 1)] = v.as_number();
      }
    }
    return out;
  }
  void reject_unknown() const {
    for (const auto& [k, v] : table_) {
      (void)v;
      if (!seen_.count(k))
        throw std::invalid_argument("config: unknown key '" + k + "'");
    }
  }

 private:
  const TomlTable& table_;
  std::set<std::string> seen_;
};

}  // namespace

ScenarioConfig parse_config(const std::string& toml_text) {
  const TomlTable table = toml_parse(toml_text);
  KeyReader r(table);
  ScenarioConfig cfg;

  cfg.schema_version = static_cast<int>(r.integer("schema_version"));
  if (cfg.schema_version != 1)
    throw std::invalid_argument("config: unsupported schema_version " +
                                std::to_string(cfg.schema_version));
  cfg.name = r.str("name", std::string("scenario"));
  cfg.seed = static_cast<unsigned>(r.integer("seed", 1));
  cfg.out_dir = r.str("output.dir", std::string("out"));

  // Nonlinearity.
  const std::string fam_name = r.str("nonlinearity.family");
  const double period = r.number("nonlinearity.period_T", 1.0);
  auto params = r.number_table("nonlinearity.params");
  const Family fam = family_from_name(fam_name);
  if (fam == Family::time_periodic_product) {
    const std::string inner = r.str("nonlinearity.inner_family");
    const double rho = params.at("rho");
    params.erase("rho");
    cfg.spec = NonlinearitySpec::time_periodic(
        NonlinearitySpec::from_params(family_from_name(inner), params, period),
        rho, period);
  } else {
    cfg.spec = NonlinearitySpec::from_params(fam, params, period);
  }
  if (r.str("nonlinearity.du_mode", std::string("analytic")) ==
      "finite-difference")
    cfg.spec.set_du_mode(DuMode::finite_difference,
                         r.number("tolerances.h_u", 1e-6));

  // Grid.
  cfg.grid = Grid(r.number("grid.xmin"), r.number("grid.xmax"),
                  static_cast<int>(r.integer("grid.n_x")));

  // Initial condition.
  cfg.ic.kind = r.str("ic.kind", std::string("heaviside"));
  cfg.ic.a = r.number("ic.a", 0.0);
  cfg.ic.a_minus = r.number("ic.a_minus", -5.0);
  cfg.ic.a_plus = r.number("ic.a_plus", 5.0);
  cfg.ic.shape = r.str("ic.shape", std::string("ramp"));
  cfg.ic.bump_amplitude = r.number("ic.bump_amplitude", 0.0);
  cfg.ic.bump_width = r.number("ic.bump_width", 2.0);
  cfg.ic.left_level = r.number("ic.left_level", -1.0);
  cfg.ic.right_level = r.number("ic.right_level", 0.0);
  cfg.ic.seed = static_cast<unsigned>(r.integer("ic.seed", 0));
  if (cfg.ic.kind == "heaviside") {
    // (H1): nothing further.
  } else if (cfg.ic.kind == "sandwich") {
    if (cfg.ic.a_minus >= cfg.ic.a_plus)
      throw std::invalid_argument("config: sandwich ic needs a_minus < a_plus");
    if (cfg.ic.shape != "ramp" && cfg.ic.shape != "ramp-bump")
      throw std::invalid_argument("config: sandwich ic shape must be ramp or ramp-bump");
  } else if (cfg.ic.kind == "front-like") {
    if (cfg.ic.left_level < 0 || cfg.ic.a_minus >= cfg.ic.a_plus)
      throw std::invalid_argument(
          "config: front-like ic needs tail levels and a_minus < a_plus");
  } else {
    throw std::invalid_argument("config: unknown ic.kind '" + cfg.ic.kind + "'");
  }

  // Run.
  cfg.dt = r.number("run.dt");
  cfg.t_end = r.number("run.t_end");
  cfg.snapshot_stride = static_cast<int>(r.integer("run.snapshot_stride", 0));
  cfg.moving_window = r.boolean("run.moving_window", false);
  const double T = cfg.spec.period();
  const long spp = std::lround(T / cfg.dt);
  if (spp < 1 || std::abs(spp * cfg.dt - T) > 1e-9 * std::max(1.0, T))
    throw std::invalid_argument("config: run.dt must divide nonlinearity.period_T");

  // Analysis.
  cfg.analysis.levels = r.number_array("analysis.levels");
  cfg.analysis.terrace = r.boolean("analysis.terrace", false);
  cfg.analysis.residual = r.boolean("analysis.residual", false);
  cfg.analysis.certification = r.boolean("analysis.certification", false);
  cfg.analysis.zero_number = r.boolean("analysis.zero_number", false);
  cfg.analysis.steepness = r.boolean("analysis.steepness", false);
  cfg.analysis.exp_rate = r.boolean("analysis.exp_rate", false);
  cfg.analysis.sandwich = r.boolean("analysis.sandwich", false);
  cfg.analysis.suite_cases =
      static_cast<int>(r.integer("analysis.suite_cases", 0));
  const double p_hint = cfg.spec.family() == Family::combustion
                            ? cfg.spec.params().at("p")
                            : 1.0;
  for (double lvl : cfg.analysis.levels)
    if (!(lvl > 0.0 && lvl < p_hint))
      throw std::invalid_argument("config: analysis level " +
                                  std::to_string(lvl) +
                                  " outside (0, p(0))");

  // Tolerances (all optional, defaults from the module contracts).
  Tolerances& t = cfg.tol;
  t.ode_tol = r.number("tolerances.ode_tol", t.ode_tol);
  t.fp_tol = r.number("tolerances.fp_tol", t.fp_tol);
  t.merge_tol = r.number("tolerances.merge_tol", t.merge_tol);
  t.delta_probe = r.number("tolerances.delta_probe", t.delta_probe);
  t.n_probe = static_cast<int>(r.integer("tolerances.n_probe", t.n_probe));
  t.n_basin = static_cast<int>(r.integer("tolerances.n_basin", t.n_basin));
  t.basin_tol = r.number("tolerances.basin_tol", t.basin_tol);
  t.degenerate_tol = r.number("tolerances.degenerate_tol", t.degenerate_tol);
  t.h_u = r.number("tolerances.h_u", t.h_u);
  t.level_tol = r.number("tolerances.level_tol", t.level_tol);
  t.eps_z_rel = r.number("tolerances.eps_z_rel", t.eps_z_rel);
  t.profile_tol = r.number("tolerances.profile_tol", t.profile_tol);
  t.flat_tol_rel = r.number("tolerances.flat_tol_rel", t.flat_tol_rel);
  t.window = r.number("tolerances.window", t.window);
  t.burn_in_frac = r.number("tolerances.burn_in_frac", t.burn_in_frac);
  t.speed_zero_tol = r.number("tolerances.speed_zero_tol", t.speed_zero_tol);
  t.residual_pass_rel =
      r.number("tolerances.residual_pass_rel", t.residual_pass_rel);
  t.shift_conv_tol_rel =
      r.number("tolerances.shift_conv_tol_rel", t.shift_conv_tol_rel);
  t.tail_tol_rel = r.number("tolerances.tail_tol_rel", t.tail_tol_rel);
  t.cert_tol_rel = r.number("tolerances.cert_tol_rel", t.cert_tol_rel);
  t.stencil_refine =
      static_cast<int>(r.integer("tolerances.stencil_refine", t.stencil_refine));
  t.eps_iters = static_cast<int>(r.integer("tolerances.eps_iters", t.eps_iters));
  t.lip_safety = r.number("tolerances.lip_safety", t.lip_safety);

  r.reject_unknown();
  return cfg;
}

std::string config_hash(const std::string& toml_text) {
  const TomlTable table = toml_parse(toml_text);
  // std::map iterates in key order, so the digest is independent of the
  // original key ordering in the document.
  uint64_t h = 1469598103934665603ull;  // FNV-1a 64
  auto mix = [&h](const std::string& s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 1099511628211ull;
    }
  };
  for (const auto& [k, v] : table) {
    mix(k);
    mix("=");
    mix(v.repr());
    mix(";");
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace terracelab

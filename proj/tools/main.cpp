#include <CLI11.hpp>

#include <filesystem>
#include <future>
#include <iostream>

#include "terracelab/pipeline.hpp"

namespace fs = std::filesystem;
using namespace terracelab;

namespace {

struct CommonOpts {
  std::string config_path;
  std::string scenario;
  std::string out_dir = "out";
  int jobs = 1;
  bool strict = false;
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool needs_config) {
  auto* cfg = cmd->add_option("--config", opts.config_path,
                              "TOML scenario configuration file");
  auto* sc = cmd->add_option("--scenario", opts.scenario,
                             "built-in scenario name (see `terracelab list`)");
  if (needs_config) {
    cfg->excludes(sc);
    sc->excludes(cfg);
  }
  cmd->add_option("--out", opts.out_dir, "output directory");
  cmd->add_option("--jobs", opts.jobs, "parallel scenarios for --scenario all");
  cmd->add_flag("--strict", opts.strict,
                "escalate configuration warnings to errors");
}

struct LoadedConfig {
  ScenarioConfig cfg;
  std::string text;
};

LoadedConfig load_config(const CommonOpts& opts) {
  LoadedConfig lc;
  if (!opts.scenario.empty()) {
    lc.text = scenario_toml(opts.scenario);
  } else if (!opts.config_path.empty()) {
    lc.text = read_text_file(opts.config_path);
  } else {
    throw std::invalid_argument("either --config or --scenario is required");
  }
  lc.cfg = parse_config(lc.text);
  if (opts.strict) {
    std::vector<std::string> warnings;
    lc.cfg.build_ic(&warnings, true);
  }
  return lc;
}

int run_one(const std::string& verb, const CommonOpts& opts,
            const LoadedConfig& lc, const fs::path& out, std::ostream& log) {
  if (verb == "ode") return cmd_ode(lc.cfg, lc.text, out, log);
  if (verb == "simulate") return cmd_simulate(lc.cfg, lc.text, out, log);
  if (verb == "terrace") return cmd_terrace(lc.cfg, lc.text, out, log);
  if (verb == "verify") return cmd_verify(lc.cfg, lc.text, out, log);
  (void)opts;
  throw std::logic_error("bad verb");
}

// `--scenario all` fans out over the registry, bounded by --jobs; output is
// collected per scenario and printed in registry order.
int run_all(const std::string& verb, const CommonOpts& opts) {
  const std::vector<std::string> names = scenario_names();
  std::vector<std::future<std::pair<int, std::string>>> futs;
  const int jobs = std::max(1, opts.jobs);
  std::vector<std::pair<int, std::string>> results(names.size());
  size_t next = 0;
  while (next < names.size()) {
    const size_t batch = std::min<size_t>(jobs, names.size() - next);
    futs.clear();
    for (size_t b = 0; b < batch; ++b) {
      const std::string name = names[next + b];
      futs.push_back(std::async(std::launch::async, [&, name] {
        std::ostringstream log;
        int rc = 1;
        try {
          CommonOpts o = opts;
          o.scenario = name;
          const LoadedConfig lc = load_config(o);
          rc = run_one(verb, o, lc, fs::path(opts.out_dir) / name, log);
        } catch (const std::exception& e) {
          log << "error: " << e.what() << "\n";
        }
        return std::make_pair(rc, log.str());
      }));
    }
    for (size_t b = 0; b < batch; ++b) results[next + b] = futs[b].get();
    next += batch;
  }
  int rc = 0;
  for (size_t i = 0; i < names.size(); ++i) {
    std::cout << "=== " << names[i] << " ===\n" << results[i].second;
    rc = std::max(rc, results[i].first);
  }
  return rc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"terracelab: reaction-diffusion front and terrace laboratory"};
  app.require_subcommand(1);

  CommonOpts ode_o, sim_o, ter_o, ver_o;
  auto* ode_cmd = app.add_subcommand("ode", "periodic ODE solutions and stability");
  add_common(ode_cmd, ode_o, true);
  auto* sim_cmd = app.add_subcommand("simulate", "run the PDE and export snapshots");
  add_common(sim_cmd, sim_o, true);
  bool columnar = false;
  sim_cmd->add_flag("--columnar", columnar, "also write the binary columnar dump");
  auto* ter_cmd = app.add_subcommand("terrace", "extract the minimal terrace");
  add_common(ter_cmd, ter_o, true);
  auto* ver_cmd = app.add_subcommand("verify", "run the requested invariant checks");
  add_common(ver_cmd, ver_o, true);

  std::string report_dir = "out";
  auto* rep_cmd = app.add_subcommand("report", "verify a manifest and summarize");
  rep_cmd->add_option("--out", report_dir, "directory holding manifest.json");

  auto* list_cmd = app.add_subcommand("list", "list built-in scenarios");

  CLI11_PARSE(app, argc, argv);

  try {
    if (list_cmd->parsed()) {
      for (const auto& n : scenario_names()) std::cout << n << "\n";
      return 0;
    }
    if (rep_cmd->parsed()) return cmd_report(report_dir, std::cout);

    const std::string verb = ode_cmd->parsed()   ? "ode"
                             : sim_cmd->parsed() ? "simulate"
                             : ter_cmd->parsed() ? "terrace"
                                                 : "verify";
    CommonOpts& opts = ode_cmd->parsed()   ? ode_o
                       : sim_cmd->parsed() ? sim_o
                       : ter_cmd->parsed() ? ter_o
                                           : ver_o;
    if (opts.scenario == "all") return run_all(verb, opts);
    const LoadedConfig lc = load_config(opts);
    if (verb == "simulate")
      return cmd_simulate(lc.cfg, lc.text, opts.out_dir, std::cout, columnar);
    return run_one(verb, opts, lc, opts.out_dir, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

#include "terracelab/pipeline.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <random>
#include <sstream>

namespace terracelab {

using json = nlohmann::json;

OdePeriodicParams ode_params_from(const Tolerances& t) {
  OdePeriodicParams p;
  p.ode_tol = t.ode_tol;
  p.fp_tol = t.fp_tol;
  p.merge_tol = t.merge_tol;
  p.delta_probe = t.delta_probe;
  p.n_probe = t.n_probe;
  p.n_basin = t.n_basin;
  p.basin_tol = t.basin_tol;
  p.degenerate_tol = t.degenerate_tol;
  return p;
}

TerraceParams terrace_params_from(const Tolerances& t) {
  TerraceParams p;
  p.speed_zero_tol = t.speed_zero_tol;
  p.residual_pass_rel = t.residual_pass_rel;
  p.shift_conv_tol_rel = t.shift_conv_tol_rel;
  p.tail_tol_rel = t.tail_tol_rel;
  p.window = t.window;
  p.merge_tol = t.merge_tol;
  p.fa.level_tol = t.level_tol;
  p.fa.eps_z_rel = t.eps_z_rel;
  p.fa.profile_tol = t.profile_tol;
  p.fa.flat_tol_rel = t.flat_tol_rel;
  p.fa.window = t.window;
  p.fa.burn_in_frac = t.burn_in_frac;
  return p;
}

SupersubParams supersub_params_from(const Tolerances& t, double run_dt) {
  SupersubParams p;
  p.cert_tol_rel = t.cert_tol_rel;
  p.stencil_refine = t.stencil_refine;
  p.stencil_dt = run_dt;
  p.eps_iters = t.eps_iters;
  p.ode_tol = t.ode_tol;
  p.lipschitz_safety = t.lip_safety;
  return p;
}

OdeAnalysis analyze_ode(const ScenarioConfig& cfg) {
  OdeAnalysis out;
  const OdePeriodicParams params = ode_params_from(cfg.tol);
  const double p_hint = cfg.spec.family() == Family::combustion
                            ? cfg.spec.params().at("p")
                            : 1.0;
  out.ladder =
      find_periodic_solutions(cfg.spec, 0.0, 1.2 * p_hint, 64, params);
  require(!out.ladder.empty(), "no periodic solutions found in [0, 1.2p]");
  for (const auto& q : out.ladder)
    out.records.push_back(classify_stability(cfg.spec, q, &out.ladder, params));
  return out;
}

Trajectory run_base_simulation(const ScenarioConfig& cfg) {
  const Field ic = cfg.build_ic();
  SimulateOptions opts;
  opts.snapshot_stride = cfg.snapshot_stride;
  opts.moving_window = cfg.moving_window;
  return simulate(cfg.spec, cfg.grid, ic, BcPolicy::track_reaction, cfg.dt,
                  cfg.t_end, opts);
}

TerracePipelineResult terrace_pipeline(const ScenarioConfig& cfg,
                                       const OdeAnalysis& ode,
                                       const Trajectory& traj) {
  TerracePipelineResult out;
  const TerraceParams tp = terrace_params_from(cfg.tol);
  out.terrace = extract_terrace(traj, ode.ladder, tp);
  out.shifts = fit_shift_functions(traj, out.terrace, tp);

  // Residual series at period snapshots, with per-snapshot fitted shifts.
  const int burn = static_cast<int>(
      std::ceil(cfg.tol.burn_in_frac * traj.periods()));
  for (int k = burn; k < traj.periods(); ++k) {
    const Field& f = traj.at_period(k);
    std::vector<double> shifts_k;
    bool have_all = true;
    for (const auto& st : out.shifts) {
      double eta = 0.0;
      bool found = false;
      for (size_t j = 0; j < st.t.size(); ++j) {
        if (std::abs(st.t[j] - f.t) < 1e-9) {
          eta = st.eta[j];
          found = true;
          break;
        }
      }
      if (!found) have_all = false;
      shifts_k.push_back(eta);
    }
    if (!have_all) continue;
    out.residual_series.emplace_back(
        f.t, terrace_residual(f, out.terrace, shifts_k, tp));
  }
  return out;
}

namespace {

std::string outcome_line(const CheckResult& c) {
  std::ostringstream os;
  os << "CHECK " << c.name << ": ";
  if (c.outcome == "pass")
    os << "PASS";
  else if (c.outcome == "fail")
    os << "FAIL";
  else
    os << "HYPOTHESES-UNMET";
  os << " value=" << c.value << " threshold=" << c.threshold;
  if (!c.detail.empty()) os << " (" << c.detail << ")";
  return os.str();
}

CheckResult make_check(const std::string& name, bool pass, double value,
                       double threshold, const std::string& detail = "") {
  CheckResult c;
  c.name = name;
  c.outcome = pass ? "pass" : "fail";
  c.value = value;
  c.threshold = threshold;
  c.detail = detail;
  return c;
}

CheckResult make_unmet(const std::string& name, const std::string& detail) {
  CheckResult c;
  c.name = name;
  c.outcome = "hypotheses-unmet";
  c.detail = detail;
  return c;
}

// Assumption gate for the multistable (exponential-rate / sandwich) pipeline:
// 0 and the top platform must be linearly stable.
bool multistable_hypotheses(const OdeAnalysis& ode, const Tolerances& tol,
                            std::string* why) {
  const StabilityRecord& bottom = ode.records.front();
  const StabilityRecord& top = ode.records.back();
  if (!(bottom.mu > tol.degenerate_tol)) {
    *why = "0 is not linearly stable (mu=" + std::to_string(bottom.mu) + ")";
    return false;
  }
  if (!(top.mu > tol.degenerate_tol)) {
    *why = "top platform is not linearly stable (mu=" +
           std::to_string(top.mu) + ")";
    return false;
  }
  return true;
}

// Randomized monotone fronts for the steepness suite.
Field random_monotone_front(const Grid& g, double p0, double center,
                            double width, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Field f(g, 0.0);
  const double w = width * (0.5 + u(rng));
  for (int i = 0; i < g.n_x; ++i) {
    const double x = g.x(i);
    f.values[i] = p0 * 0.5 * (1.0 - std::tanh((x - center) / w));
  }
  return f;
}

}  // namespace

std::vector<StabilityRecord> platform_records(const Terrace& terrace,
                                              const OdeAnalysis& ode) {
  std::vector<StabilityRecord> recs;
  for (const auto& p : terrace.platforms) {
    int idx = 0;
    double best = 1e300;
    for (size_t i = 0; i < ode.ladder.size(); ++i) {
      const double d = std::abs(ode.ladder[i].value_at0() - p.value_at0());
      if (d < best) {
        best = d;
        idx = static_cast<int>(i);
      }
    }
    recs.push_back(ode.records[idx]);
  }
  return recs;
}

std::vector<std::pair<int, WaveProfile>> make_minimality_candidates(
    const Terrace& terrace) {
  std::vector<std::pair<int, WaveProfile>> candidates;
  for (int i = 0; i < terrace.n_waves(); ++i) {
    WaveProfile shifted = terrace.waves[i];
    shifted.xi0 += 7 * shifted.dxi;
    candidates.emplace_back(i, shifted);
    WaveProfile flattened = terrace.waves[i];
    for (auto& row : flattened.rows) {
      std::vector<double> sm = row;
      const int w = 20;
      for (int j = 0; j < static_cast<int>(row.size()); ++j) {
        double acc = 0.0;
        int cnt = 0;
        for (int l = -w; l <= w; ++l) {
          const int jj = j + l;
          if (jj < 0 || jj >= static_cast<int>(row.size())) continue;
          acc += row[jj];
          ++cnt;
        }
        sm[j] = acc / cnt;
      }
      row = std::move(sm);
    }
    candidates.emplace_back(i, flattened);
  }
  return candidates;
}

VerifyOutcome run_verify_checks(const ScenarioConfig& cfg, std::ostream& log) {
  VerifyOutcome out;
  auto push = [&](CheckResult c) {
    log << outcome_line(c) << "\n";
    out.checks.push_back(std::move(c));
  };

  const OdeAnalysis ode = analyze_ode(cfg);
  const double p0 = ode.p0();
  const Tolerances& tol = cfg.tol;
  const TerraceParams tp = terrace_params_from(tol);

  const bool needs_run = !cfg.analysis.levels.empty() || cfg.analysis.terrace ||
                         cfg.analysis.residual || cfg.analysis.exp_rate ||
                         cfg.analysis.sandwich;
  std::optional<Trajectory> traj;
  if (needs_run) traj = run_base_simulation(cfg);

  // Per-level speeds plus the spreading bracket consistency.
  std::vector<SpeedEstimate> level_speeds;
  if (!cfg.analysis.levels.empty()) {
    const int burn =
        static_cast<int>(std::ceil(tol.burn_in_frac * traj->periods()));
    const auto tracks = track_levels(*traj, cfg.analysis.levels, tp.fa);
    for (size_t ti = 0; ti < tracks.size(); ++ti) {
      const auto& tr = tracks[ti];
      out.artifacts.emplace_back(
          "track_" + std::to_string(ti) + ".csv",
          level_track_to_csv(tr, cfg.spec.period()));
      try {
        const SpeedEstimate est =
            estimate_speed(tr, cfg.spec.period(), burn);
        level_speeds.push_back(est);
        push(make_check("level-speed[" + std::to_string(tr.alpha) + "]",
                        !est.increment_disagrees, est.c, 0.0,
                        "stderr=" + std::to_string(est.stderr_c)));
      } catch (const std::exception& e) {
        push(make_check("level-speed[" + std::to_string(tr.alpha) + "]",
                        false, 0.0, 0.0, e.what()));
      }
    }
    if (cfg.ic.kind == "heaviside") {
      try {
        const SpreadingBracket br =
            spreading_bracket(*traj, 0.01 * p0, tp.fa);
        bool all_inside = true;
        for (const auto& est : level_speeds)
          all_inside = all_inside &&
                       est.c >= br.c_lower - 3 * br.stderr_lower - 3 * est.stderr_c &&
                       est.c <= br.c_upper + 3 * br.stderr_upper + 3 * est.stderr_c;
        push(make_check("spreading-bracket", all_inside, br.c_lower, br.c_upper,
                        "level speeds inside [c_lower-3s, c_upper+3s]"));
      } catch (const std::exception& e) {
        push(make_check("spreading-bracket", false, 0.0, 0.0, e.what()));
      }
    }
  }

  // The rate checks only make sense in the multistable regime; gate them
  // before any terrace extraction is attempted on their behalf.
  std::string unmet_reason;
  const bool hypotheses_ok =
      multistable_hypotheses(ode, tol, &unmet_reason);

  std::optional<TerracePipelineResult> terr;
  const bool wants_terrace = cfg.analysis.terrace || cfg.analysis.residual ||
                             (cfg.analysis.exp_rate && hypotheses_ok);
  if (wants_terrace) {
    try {
      terr = terrace_pipeline(cfg, ode, *traj);
    } catch (const std::exception& e) {
      push(make_check("terrace-extraction", false, 0.0, 0.0, e.what()));
    }
  }
  if (terr) {
    const Terrace& T = terr->terrace;
    push(make_check("terrace-waves", T.n_waves() >= 1,
                    static_cast<double>(T.n_waves()), 1.0));
    bool ordered = true;
    for (int i = 0; i + 1 < T.n_waves(); ++i)
      ordered = ordered &&
                T.waves[i].c <= T.waves[i + 1].c +
                                    3 * (T.waves[i].stderr_c +
                                         T.waves[i + 1].stderr_c);
    push(make_check("terrace-speed-ordering", ordered,
                    T.n_waves() ? T.waves.front().c : 0.0, 0.0));

    // Structure clauses need stability records in platform order (top-down).
    const StructureReport sr =
        check_terrace_structure(T, platform_records(T, ode), false, tp);
    push(make_check("terrace-structure", sr.all_pass(),
                    static_cast<double>(sr.clauses.size()), 0.0));

    const MinimalityReport mr =
        check_minimality(T, make_minimality_candidates(T), 1e-6);
    push(make_check("terrace-minimality", mr.all_pass,
                    static_cast<double>(mr.entries.size()), 0.0));

    // Drift sublinearity |eta(t_end)| / t_end.
    for (const auto& st : terr->shifts) {
      if (st.eta.size() < 2) continue;
      const double ratio = std::abs(st.eta.back()) / std::max(st.t.back(), 1.0);
      push(make_check(
          "eta-sublinear[" + std::to_string(st.wave_index) + "]",
          ratio < 0.02, ratio, 0.02,
          st.eta_bar ? "eta_bar=" + std::to_string(*st.eta_bar) : "drifting"));
      out.artifacts.emplace_back(
          "shift_" + std::to_string(st.wave_index) + ".csv",
          shift_track_to_csv(st));
    }
    // Separation under equal speeds: eta_{i+1} - eta_i must widen when the
    // speeds coincide within tolerance.
    for (int i = 0; i + 1 < T.n_waves(); ++i) {
      if (std::abs(T.waves[i].c - T.waves[i + 1].c) >= tp.speed_zero_tol)
        continue;
      const auto& s1 = terr->shifts[i];
      const auto& s2 = terr->shifts[i + 1];
      const size_t n = std::min(s1.eta.size(), s2.eta.size());
      if (n < 8) continue;
      const size_t start = n - n / 4;
      double first = s2.eta[start] - s1.eta[start];
      double last = s2.eta[n - 1] - s1.eta[n - 1];
      push(make_check("eta-separation[" + std::to_string(i) + "]",
                      last > first, last - first, 0.0,
                      "gap growth over the tail"));
    }
  }

  if (cfg.analysis.residual && terr) {
    const auto& rs = terr->residual_series;
    require(!rs.empty(), "residual series empty");
    {
      std::ostringstream csv;
      csv << "t,residual\r\n";
      for (const auto& [t, r] : rs)
        csv << format_double(t) << "," << format_double(r) << "\r\n";
      out.artifacts.emplace_back("residual.csv", csv.str());
    }
    const double pass_level = tol.residual_pass_rel * p0;
    push(make_check("residual-final", rs.back().second < pass_level,
                    rs.back().second, pass_level));
    // Slack covers profile-interpolation noise at the residual floor; it
    // sits three orders below the passing threshold.
    const size_t q = rs.size() - rs.size() / 4;
    bool monotone = true;
    for (size_t j = std::max<size_t>(q, 1); j < rs.size(); ++j)
      monotone = monotone && rs[j].second <= rs[j - 1].second + 1e-6 * p0;
    push(make_check("residual-monotone-tail", monotone, rs.back().second,
                    rs[q > 0 ? q - 1 : 0].second,
                    "last quarter of snapshots non-increasing"));
  }

  if (cfg.analysis.exp_rate) {
    if (!hypotheses_ok) {
      push(make_unmet("exponential-rate", unmet_reason));
    } else if (!terr) {
      push(make_check("exponential-rate", false, 0.0, 0.0,
                      "terrace extraction failed"));
    } else {
      const RateFit fit = exponential_rate(terr->residual_series,
                                           tol.burn_in_frac);
      push(make_check("exponential-rate", fit.nu > 0 && fit.r2 >= 0.95, fit.nu,
                      0.0,
                      "r2=" + std::to_string(fit.r2) +
                          (fit.floored ? ", floored" : "")));
    }
  }

  if (cfg.analysis.sandwich) {
    if (!hypotheses_ok) {
      push(make_unmet("sandwich-fit", unmet_reason));
    } else {
      const double offset = std::max(10.0, 3.0 * cfg.ic.bump_width);
      const double a_plus = cfg.ic.a_plus + offset;
      const double a_minus = cfg.ic.a_minus - offset;
      const Field hat_plus_ic = heaviside_ic(cfg.grid, a_plus, p0);
      const Field hat_minus_ic = heaviside_ic(cfg.grid, a_minus, p0);
      SimulateOptions so;
      so.snapshot_stride = cfg.snapshot_stride;
      const Trajectory hat_plus =
          simulate(cfg.spec, cfg.grid, hat_plus_ic, BcPolicy::track_reaction,
                   cfg.dt, cfg.t_end, so);
      const Trajectory hat_minus =
          simulate(cfg.spec, cfg.grid, hat_minus_ic, BcPolicy::track_reaction,
                   cfg.dt, cfg.t_end, so);
      const SandwichFit fit = sandwich_fit(*traj, hat_plus, hat_minus);
      const bool pass = !fit.fit_failed &&
                        (fit.trapped_exactly || fit.beta0_hat > 0);
      push(make_check("sandwich-fit", pass, fit.beta0_hat, 0.0,
                      fit.trapped_exactly ? "violations identically zero"
                                          : "K0=" + std::to_string(fit.K0_hat)));
    }
  }

  if (cfg.analysis.zero_number) {
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const int cases = std::max(1, cfg.analysis.suite_cases);
    int violations = 0;
    int series_count = 0;
    for (int case_i = 0; case_i < cases; ++case_i) {
      SandwichParams sp1, sp2;
      sp1.shape = SandwichShape::ramp_bump;
      sp1.bump_amplitude = 0.2 + 0.4 * unif(rng);
      sp1.bump_width = 1.0 + 2.0 * unif(rng);
      sp1.seed = cfg.seed + 1000 + 2 * case_i;
      sp2 = sp1;
      sp2.bump_amplitude = 0.2 + 0.4 * unif(rng);
      sp2.bump_width = 1.0 + 2.0 * unif(rng);
      sp2.seed = cfg.seed + 1000 + 2 * case_i + 1;
      const Field ic1 =
          sandwich_ic(cfg.grid, cfg.ic.a_minus, cfg.ic.a_plus, p0, sp1);
      const Field ic2 =
          sandwich_ic(cfg.grid, cfg.ic.a_minus, cfg.ic.a_plus, p0, sp2);
      const Trajectory t1 = simulate(cfg.spec, cfg.grid, ic1,
                                     BcPolicy::track_reaction, cfg.dt,
                                     cfg.t_end, {});
      const Trajectory t2 = simulate(cfg.spec, cfg.grid, ic2,
                                     BcPolicy::track_reaction, cfg.dt,
                                     cfg.t_end, {});
      const double shift =
          std::floor(unif(rng) * 41.0 - 20.0) * cfg.grid.dx();
      const int lag = static_cast<int>(unif(rng) * 3.0);
      const ZeroNumberSeries zs =
          zero_number_series(t1, t2, shift, lag, tp.fa);
      ++series_count;
      for (size_t j = 1; j < zs.z.size(); ++j)
        if (zs.z[j] > zs.z[j - 1]) ++violations;
      if (case_i < 3)
        out.artifacts.emplace_back(
            "zero_number_" + std::to_string(case_i) + ".csv",
            zero_number_to_csv(zs));
    }
    push(make_check("zero-number-monotone", violations == 0,
                    static_cast<double>(violations), 0.0,
                    std::to_string(series_count) + " randomized series"));
  }

  if (cfg.analysis.steepness) {
    std::mt19937_64 rng(cfg.seed + 99);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const int cases = std::max(1, cfg.analysis.suite_cases);
    int violations = 0;
    for (int case_i = 0; case_i < cases; ++case_i) {
      // v1 distinctly steeper than v2 at t=0.
      std::mt19937_64 local(cfg.seed + 7000 + case_i);
      const double c1 = -4.0 + 8.0 * unif(rng);
      const double c2 = -4.0 + 8.0 * unif(rng);
      Field v1 = random_monotone_front(cfg.grid, p0, c1, 0.4, local);
      Field v2 = random_monotone_front(cfg.grid, p0, c2, 3.0, local);
      if (is_steeper(v1, v2, 1e-9) != Steepness::steeper) {
        --case_i;  // regenerate: the draw was not strictly ordered
        continue;
      }
      const Trajectory t1 = simulate(cfg.spec, cfg.grid, v1,
                                     BcPolicy::track_reaction, cfg.dt,
                                     cfg.t_end, {});
      const Trajectory t2 = simulate(cfg.spec, cfg.grid, v2,
                                     BcPolicy::track_reaction, cfg.dt,
                                     cfg.t_end, {});
      for (size_t s = 0; s < t1.snapshots.size(); ++s) {
        const Steepness v =
            is_steeper(t1.snapshots[s], t2.snapshots[s], 1e-6);
        if (v != Steepness::steeper && v != Steepness::mutually) ++violations;
      }
    }
    push(make_check("steepness-preservation", violations == 0,
                    static_cast<double>(violations), 0.0,
                    std::to_string(cases) + " randomized pairs"));
  }

  return out;
}

// ---------------------------------------------------------------------------
// CLI subcommand implementations.

int cmd_ode(const ScenarioConfig& cfg, const std::string& cfg_text,
            const std::filesystem::path& out_dir, std::ostream& log) {
  RunManifest manifest = make_manifest(config_hash(cfg_text));
  try {
    const OdeAnalysis ode = analyze_ode(cfg);
    json j = json::array();
    for (size_t i = 0; i < ode.ladder.size(); ++i) {
      const auto& q = ode.ladder[i];
      const auto& r = ode.records[i];
      log << "q(0)=" << q.value_at0()
          << (q.kind == SolutionKind::interval_of_equilibria
                  ? " (plateau [" + std::to_string(q.band_lo) + ", " +
                        std::to_string(q.band_hi) + "])"
                  : "")
          << "  mu=" << r.mu << "  floquet=" << r.floquet
          << "  stable_above=" << to_string(r.stable_above)
          << "  stable_below=" << to_string(r.stable_below) << "\n";
      json e = json::parse(q.to_json());
      e["mu"] = r.mu;
      e["floquet"] = r.floquet;
      e["stable_above"] = to_string(r.stable_above);
      e["stable_below"] = to_string(r.stable_below);
      e["isolated_above"] = to_string(r.isolated_above);
      e["isolated_below"] = to_string(r.isolated_below);
      j.push_back(e);
      const std::string csv_name =
          "solution_" + std::to_string(i) + ".csv";
      write_text_file(out_dir / csv_name, q.to_csv());
      manifest.record_file(out_dir, csv_name);
    }
    write_text_file(out_dir / "ode.json", j.dump(2));
    manifest.record_file(out_dir, "ode.json");
    write_manifest(manifest, out_dir);
    return 0;
  } catch (const OdeDivergence& e) {
    log << "error: " << e.what() << "\n";
    return 2;
  }
}

int cmd_simulate(const ScenarioConfig& cfg, const std::string& cfg_text,
                 const std::filesystem::path& out_dir, std::ostream& log,
                 bool columnar) {
  RunManifest manifest = make_manifest(config_hash(cfg_text));
  try {
    const Trajectory traj = run_base_simulation(cfg);
    const auto files = write_trajectory_csv(traj, out_dir, "snapshot");
    for (const auto& f : files) manifest.record_file(out_dir, f);
    if (columnar) {
      write_trajectory_columnar(traj, out_dir / "trajectory.trl");
      manifest.record_file(out_dir, "trajectory.trl");
    }
    log << "snapshots=" << traj.snapshots.size()
        << " periods=" << traj.periods() << "\n";
    write_manifest(manifest, out_dir);
    return 0;
  } catch (const BlowUpError& e) {
    log << "error: " << e.what() << "\n";
    manifest.checks.push_back(make_check("simulate", false, e.time, 0.0,
                                         "blow-up, partial outputs"));
    write_manifest(manifest, out_dir);
    return 2;
  }
}

namespace {

std::filesystem::path cache_dir_from_env() {
  const char* env = std::getenv("TERRACE_LAB_CACHE");
  return env ? std::filesystem::path(env) : std::filesystem::path();
}

json wave_to_json_full(const WaveProfile& w) {
  json jw;
  jw["c"] = w.c;
  jw["stderr_c"] = w.stderr_c;
  jw["period_T"] = w.period_T;
  jw["anchor"] = w.anchor_level;
  jw["autonomous"] = w.autonomous;
  jw["xi0"] = w.xi0;
  jw["dxi"] = w.dxi;
  jw["n_xi"] = w.n_xi;
  jw["taus"] = w.taus;
  jw["rows"] = w.rows;
  jw["upper"] = json::parse(w.upper.to_json());
  jw["lower"] = json::parse(w.lower.to_json());
  return jw;
}

PeriodicSolution solution_from_json(const json& j) {
  PeriodicSolution p;
  p.period_T = j.at("period_T").get<double>();
  p.t = j.at("t").get<std::vector<double>>();
  p.q = j.at("q").get<std::vector<double>>();
  if (j.at("kind") == "interval-of-equilibria") {
    p.kind = SolutionKind::interval_of_equilibria;
    p.band_lo = j.at("band")[0].get<double>();
    p.band_hi = j.at("band")[1].get<double>();
  }
  return p;
}

WaveProfile wave_from_json_full(const json& jw) {
  WaveProfile w;
  w.c = jw.at("c").get<double>();
  w.stderr_c = jw.at("stderr_c").get<double>();
  w.period_T = jw.at("period_T").get<double>();
  w.anchor_level = jw.at("anchor").get<double>();
  w.autonomous = jw.at("autonomous").get<bool>();
  w.xi0 = jw.at("xi0").get<double>();
  w.dxi = jw.at("dxi").get<double>();
  w.n_xi = jw.at("n_xi").get<int>();
  w.taus = jw.at("taus").get<std::vector<double>>();
  w.rows = jw.at("rows").get<std::vector<std::vector<double>>>();
  w.upper = solution_from_json(jw.at("upper"));
  w.lower = solution_from_json(jw.at("lower"));
  return w;
}

}  // namespace

int cmd_terrace(const ScenarioConfig& cfg, const std::string& cfg_text,
                const std::filesystem::path& out_dir, std::ostream& log) {
  RunManifest manifest = make_manifest(config_hash(cfg_text));
  const std::filesystem::path cache = cache_dir_from_env();
  const std::filesystem::path cached_file =
      cache.empty() ? std::filesystem::path()
                    : cache / (manifest.config_hash + "_terrace.json");

  try {
    const OdeAnalysis ode = analyze_ode(cfg);
    Terrace terrace;
    bool from_cache = false;
    if (!cached_file.empty() && std::filesystem::exists(cached_file)) {
      const json j = json::parse(read_text_file(cached_file));
      for (const auto& jp : j.at("platforms"))
        terrace.platforms.push_back(solution_from_json(jp));
      for (const auto& jw : j.at("waves"))
        terrace.waves.push_back(wave_from_json_full(jw));
      from_cache = true;
      log << "terrace loaded from cache\n";
    } else {
      const Trajectory traj = run_base_simulation(cfg);
      TerracePipelineResult res = terrace_pipeline(cfg, ode, traj);
      terrace = std::move(res.terrace);
    }

    json full;
    full["platforms"] = json::array();
    for (const auto& p : terrace.platforms)
      full["platforms"].push_back(json::parse(p.to_json()));
    full["waves"] = json::array();
    std::vector<std::string> refs;
    for (int i = 0; i < terrace.n_waves(); ++i) {
      full["waves"].push_back(wave_to_json_full(terrace.waves[i]));
      const std::string ref = "wave_" + std::to_string(i) + ".trl";
      write_wave_profile_columnar(terrace.waves[i], out_dir / ref);
      manifest.record_file(out_dir, ref);
      refs.push_back(ref);
    }
    write_text_file(out_dir / "terrace_full.json", full.dump());
    manifest.record_file(out_dir, "terrace_full.json");
    write_text_file(out_dir / "terrace.json", terrace_to_json(terrace, refs));
    manifest.record_file(out_dir, "terrace.json");

    // Structure and minimality reports, human-readable plus machine JSON.
    {
      const TerraceParams tp = terrace_params_from(cfg.tol);
      const StructureReport sr = check_terrace_structure(
          terrace, platform_records(terrace, ode), false, tp);
      const MinimalityReport mr =
          check_minimality(terrace, make_minimality_candidates(terrace), 1e-6);
      json rep;
      rep["structure"] = json::array();
      for (const auto& cl : sr.clauses) {
        log << "structure wave " << cl.wave_index + 1 << " [" << cl.clause
            << "]: " << (cl.pass ? "pass" : "fail") << " (" << cl.detail
            << ")\n";
        rep["structure"].push_back({{"wave", cl.wave_index},
                                    {"clause", cl.clause},
                                    {"pass", cl.pass},
                                    {"detail", cl.detail}});
      }
      rep["structure_pass"] = sr.all_pass();
      rep["minimality"] = json::array();
      for (const auto& e : mr.entries)
        rep["minimality"].push_back({{"wave", e.wave_index},
                                     {"candidate", e.candidate_index},
                                     {"row", e.row},
                                     {"verdict", to_string(e.verdict)},
                                     {"pass", e.pass}});
      rep["minimality_pass"] = mr.all_pass;
      log << "minimality: " << (mr.all_pass ? "pass" : "fail") << "\n";
      write_text_file(out_dir / "terrace_report.json", rep.dump(2));
      manifest.record_file(out_dir, "terrace_report.json");
      manifest.checks.push_back(make_check("terrace-structure", sr.all_pass(),
                                           sr.clauses.size(), 0.0));
      manifest.checks.push_back(
          make_check("terrace-minimality", mr.all_pass, mr.entries.size(), 0.0));
    }

    if (!cached_file.empty() && !from_cache) {
      std::filesystem::create_directories(cache);
      write_text_file(cached_file, full.dump());
    }

    log << "terrace: " << terrace.n_waves() << " wave(s), platforms";
    for (const auto& p : terrace.platforms) log << " " << p.value_at0();
    log << "\n";
    for (int i = 0; i < terrace.n_waves(); ++i)
      log << "  wave " << i + 1 << ": c=" << terrace.waves[i].c
          << " +- " << terrace.waves[i].stderr_c << "\n";
    write_manifest(manifest, out_dir);
    return 0;
  } catch (const PartialTerraceError& e) {
    log << "error: " << e.what() << "\n";
    json progress;
    progress["waves_found"] = e.progress.n_waves();
    progress["log"] = e.progress.log;
    write_text_file(out_dir / "terrace_progress.json", progress.dump(2));
    manifest.record_file(out_dir, "terrace_progress.json");
    write_manifest(manifest, out_dir);
    return 3;
  }
}

int cmd_verify(const ScenarioConfig& cfg, const std::string& cfg_text,
               const std::filesystem::path& out_dir, std::ostream& log) {
  RunManifest manifest = make_manifest(config_hash(cfg_text));
  const VerifyOutcome outcome = run_verify_checks(cfg, log);
  manifest.checks = outcome.checks;
  for (const auto& [name, content] : outcome.artifacts) {
    write_text_file(out_dir / name, content);
    manifest.record_file(out_dir, name);
  }
  json j = json::array();
  for (const auto& c : outcome.checks)
    j.push_back({{"name", c.name},
                 {"outcome", c.outcome},
                 {"value", c.value},
                 {"threshold", c.threshold},
                 {"detail", c.detail}});
  write_text_file(out_dir / "verify.json", j.dump(2));
  manifest.record_file(out_dir, "verify.json");
  write_manifest(manifest, out_dir);
  if (outcome.any_failed()) {
    log << "verify: FAILURES\n";
    for (const auto& c : outcome.checks)
      if (c.failed()) log << "  failed: " << c.name << "\n";
    return 1;
  }
  log << "verify: all checks passed\n";
  return 0;
}

int cmd_report(const std::filesystem::path& out_dir, std::ostream& log) {
  try {
    const ManifestVerification v = verify_manifest(out_dir);
    const RunManifest m =
        RunManifest::from_json(read_text_file(out_dir / "manifest.json"));
    log << "manifest: config_hash=" << m.config_hash
        << " code_version=" << m.code_version << " created=" << m.created_at
        << "\n";
    log << "files listed: " << m.files.size() << "\n";
    for (const auto& c : m.checks) log << outcome_line(c) << "\n";
    for (const auto& f : v.missing) log << "MISSING: " << f << "\n";
    for (const auto& f : v.size_mismatch) log << "SIZE-MISMATCH: " << f << "\n";
    if (!v.ok) return 1;
    log << "manifest: all files present\n";
    return 0;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace terracelab

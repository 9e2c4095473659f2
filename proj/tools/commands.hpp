#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "charflow/charflow.hpp"

namespace charflow::cli {

enum ExitCode : int { kPass = 0, kGateFailure = 1, kConfigError = 2, kPreBreaking = 3 };

struct Context {
  std::string config_path;
  std::filesystem::path out_dir = "run";
  bool quiet = false;

  void say(const std::string& msg) const {
    if (!quiet) std::cout << msg << '\n';
  }
};

/// A named pass/fail check recorded in the report and echoed on failure.
struct Gates {
  std::vector<std::pair<std::string, bool>> items;

  void add(const std::string& name, bool ok) { items.emplace_back(name, ok); }

  bool all() const {
    return std::all_of(items.begin(), items.end(), [](const auto& g) { return g.second; });
  }

  void record(Report& rep) const {
    for (const auto& [name, ok] : items) rep.add("gate." + name, ok);
  }

  int finish(const Context& ctx) const {
    int code = kPass;
    for (const auto& [name, ok] : items)
      if (!ok) {
        std::cerr << "gate failed: " << name << '\n';
        code = kGateFailure;
      }
    if (code == kPass) ctx.say("all gates passed");
    return code;
  }
};

inline InitialDatum datum_for(const RunConfig& cfg) {
  InitialDatum d = make_scenario(cfg.scenario);
  d.validate(cfg.tol.decay_tol);
  return d;
}

inline UniformGrid output_grid(const InitialDatum& d, std::size_t n) {
  return UniformGrid::spanning(d.x.front(), d.x.back(), n);
}

inline std::string indexed(const char* stem, std::size_t k) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_%03zu.csv", stem, k);
  return buf;
}

/// Integrates the configured scenario, writes energy.csv, snapshot_NNN.csv,
/// field_NNN.csv and report.txt, and applies the run gates.
inline int simulate(const Context& ctx) {
  const RunConfig cfg = load_config(ctx.config_path);
  const FluxModel model = builtin_model(cfg.model);
  const InitialDatum datum = datum_for(cfg);
  std::filesystem::create_directories(ctx.out_dir);

  Report rep;
  rep.add("command", std::string("simulate"));
  rep.add("model", model.name());
  rep.add("grid.n_Z", cfg.n_Z);
  Gates gates;

  const CharState initial = to_characteristic(datum, cfg.n_Z);
  RunTrace trace;
  try {
    trace = run(initial, model, cfg.run_options());
  } catch (const EnergyDriftExceeded& e) {
    rep.add("aborted", std::string(e.what()));
    gates.add("energy_drift", false);
    gates.record(rep);
    rep.write((ctx.out_dir / "report.txt").string());
    std::cerr << e.what() << '\n';
    return gates.finish(ctx);
  }
  write_energy_csv(trace, (ctx.out_dir / "energy.csv").string());

  double min_v = std::numeric_limits<double>::infinity();
  for (const auto& r : trace.steps) min_v = std::min(min_v, r.min_v);
  const double E0 = trace.E0();
  rep.add("dt", trace.dt);
  rep.add("steps", trace.steps.size() - 1);
  rep.add("E0", E0);
  rep.add("max_drift", trace.max_drift);
  rep.add("min_v", min_v);
  rep.add("breaking_events", trace.breaking_events.size());
  if (!trace.breaking_events.empty()) rep.add("first_breaking_T", trace.breaking_events.front().T);
  rep.add("theta_fraction", theta_sampler(trace));
  rep.add("breaking_time_fraction", breaking_time_fraction(trace));

  gates.add("energy_drift", trace.max_drift <= cfg.tol.energy_drift_tol);
  gates.add("v_positive", min_v > 0.0);

  const UniformGrid xg = output_grid(datum, cfg.output_n_x);
  bool monotone = true, below_char = true;
  double holder = 0.0;
  for (std::size_t k = 0; k < trace.snapshots.size(); ++k) {
    const CharState& s = trace.snapshots[k];
    write_snapshot_csv(s, (ctx.out_dir / indexed("snapshot", k)).string());
    const std::string key = "snapshot." + std::to_string(k);
    rep.add(key + ".T", s.T);
    const double Ec = energy_char(s);
    rep.add(key + ".E_char", Ec);
    try {
      const PhysicalField f = to_physical(s, xg, cfg.tol.eps_cos);
      write_field_csv(f, (ctx.out_dir / indexed("field", k)).string());
      const auto est = energy_physical_estimate(f);
      const double h = holder_check(f, E0);
      rep.add(key + ".E_phys", est.value);
      rep.add(key + ".E_phys_lower_bound", est.lower_bound);
      rep.add(key + ".holder_ratio", h);
      holder = std::max(holder, h);
      if (est.value > Ec * (1.0 + 1e-3) + 1e-12) below_char = false;
    } catch (const NonMonotoneX& e) {
      rep.add(key + ".error", std::string(e.what()));
      monotone = false;
    }
  }
  gates.add("x_monotone", monotone);
  gates.add("E_phys_le_E_char", below_char);
  gates.add("holder", holder <= 1.01);
  gates.record(rep);
  rep.write((ctx.out_dir / "report.txt").string());
  ctx.say("max relative energy drift " + fmt_real(trace.max_drift) + ", " +
          std::to_string(trace.breaking_events.size()) + " breaking step(s)");
  return gates.finish(ctx);
}

/// Characteristic pipeline against the classical solver at each snapshot time
/// (T_end when none are configured). BreakingApproached exits with code 3.
inline int compare(const Context& ctx) {
  const RunConfig cfg = load_config(ctx.config_path);
  const FluxModel model = builtin_model(cfg.model);
  const InitialDatum datum = datum_for(cfg);
  std::filesystem::create_directories(ctx.out_dir);

  std::vector<double> times = cfg.snapshot_times;
  if (times.empty()) times.push_back(cfg.T_end);
  std::sort(times.begin(), times.end());

  RunOptions opts = cfg.run_options();
  opts.snapshot_times = times;
  opts.abort_on_drift = false;
  const RunTrace trace = run(to_characteristic(datum, cfg.n_Z), model, opts);

  ClassicalOptions copts;
  copts.n_x = cfg.compare_n_x ? cfg.compare_n_x : cfg.n_Z;
  const double cdt = cfg.compare_dt ? *cfg.compare_dt : classical_auto_dt(classical_initial(datum, copts.n_x), model);

  Report rep;
  rep.add("command", std::string("compare"));
  rep.add("model", model.name());
  rep.add("grid.n_Z", cfg.n_Z);
  rep.add("classical.n_x", copts.n_x);
  auto table = detail::open_out((ctx.out_dir / "compare.csv").string());
  table << "t,max_abs_diff,classical_drift\n";
  double worst = 0.0;
  try {
    for (std::size_t k = 0; k < times.size(); ++k) {
      const ClassicalRun ref = classical_run(datum, model, times[k], cdt, copts);
      const PhysicalField f = to_physical(trace.snapshots[k], ref.state.x, cfg.tol.eps_cos);
      double diff = 0.0;
      for (std::size_t i = 0; i < f.u.size(); ++i) diff = std::max(diff, std::abs(f.u[i] - ref.state.u[i]));
      worst = std::max(worst, diff);
      table << fmt_real(times[k]) << ',' << fmt_real(diff) << ',' << fmt_real(ref.drift) << '\n';
      rep.add("t." + std::to_string(k), times[k]);
      rep.add("max_abs_diff." + std::to_string(k), diff);
    }
  } catch (const BreakingApproached& e) {
    rep.add("error", std::string(e.what()));
    rep.write((ctx.out_dir / "report.txt").string());
    std::cerr << e.what() << '\n';
    return kPreBreaking;
  }
  rep.add("max_abs_diff", worst);
  Gates gates;
  gates.add("compare_tolerance", worst <= cfg.compare_tolerance);
  gates.record(rep);
  rep.write((ctx.out_dir / "report.txt").string());
  ctx.say("max |u_char - u_classical| = " + fmt_real(worst));
  return gates.finish(ctx);
}

/// Checks the config and the initial datum, then the T = 0 identities and the
/// agreement of the two energy quadratures. Nothing is integrated.
inline int validate(const Context& ctx) {
  const RunConfig cfg = load_config(ctx.config_path);
  const FluxModel model = builtin_model(cfg.model);
  const InitialDatum datum = datum_for(cfg);
  const CharState s = to_characteristic(datum, cfg.n_Z);
  const IdentityResiduals r = identity_suite(s, model, cfg.tol.eps_cos);
  const double Ec = energy_char(s);
  const PhysicalField f = to_physical(s, output_grid(datum, cfg.output_n_x), cfg.tol.eps_cos);
  const double Ep = energy_physical(f);

  Report rep;
  rep.add("command", std::string("validate"));
  rep.add("model", model.name());
  rep.add("identity.u_Z", r.u_Z);
  rep.add("identity.P_Z", r.P_Z);
  rep.add("identity.x_Z", r.x_Z);
  rep.add("E_char", Ec);
  rep.add("E_phys", Ep);
  Gates gates;
  const double h = s.Z.step;
  gates.add("identities", r.max() <= std::max(1e-12, 10.0 * h));
  gates.add("energy_quadratures", std::abs(Ec - Ep) <= 1e-3 * std::max(1.0, Ec));
  gates.record(rep);
  std::filesystem::create_directories(ctx.out_dir);
  rep.write((ctx.out_dir / "report.txt").string());
  ctx.say("config and initial datum valid; E = " + fmt_real(Ec));
  return gates.finish(ctx);
}

/// energy.svg from energy.csv and profiles.svg from every field_NNN.csv.
inline int emit_plots(const Context& ctx, const std::filesystem::path& run_dir) {
  if (!std::filesystem::is_directory(run_dir)) throw ConfigError("run directory '" + run_dir.string() + "' not found");
  const auto energy_path = run_dir / "energy.csv";
  if (std::filesystem::exists(energy_path)) {
    const CsvTable t = read_csv(energy_path.string());
    write_svg_plot((run_dir / "energy.svg").string(), "Energy", "T", "E", {{"E(T)", t.values("T"), t.values("E")}});
  }
  std::vector<std::filesystem::path> fields;
  for (const auto& entry : std::filesystem::directory_iterator(run_dir)) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("field_", 0) == 0 && entry.path().extension() == ".csv") fields.push_back(entry.path());
  }
  std::sort(fields.begin(), fields.end());
  std::vector<Series> profiles;
  for (const auto& p : fields) {
    const CsvTable t = read_csv(p.string());
    std::string label = p.stem().string();
    if (const auto at = t.comment.find("t="); at != std::string::npos) label = t.comment.substr(at);
    profiles.push_back({label, t.values("x"), t.values("u")});
  }
  if (!profiles.empty()) write_svg_plot((run_dir / "profiles.svg").string(), "u(t, x)", "x", "u", profiles);
  ctx.say("plots written to " + run_dir.string());
  return kPass;
}

}  // namespace charflow::cli

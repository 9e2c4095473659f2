// End-to-end acceptance checks. Each criterion prints one PASS/FAIL line.
//
//   charflow_acceptance                 run every criterion
//   charflow_acceptance --criterion 3   run one (repeatable)

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "charflow/charflow.hpp"
#include "oracles.hpp"

using namespace charflow;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += (ok ? "" : "FAILED ") + what;
  }
};

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

CharState initial(const std::string& text, std::size_t n) {
  return to_characteristic(make_scenario(parse_scenario(text)), n);
}

const UniformGrid& output_grid() {
  static const UniformGrid g = UniformGrid::spanning(-30.0, 30.0, 65537);
  return g;
}

// Vertex of the parabola through the three samples around the maximum.
double crest_position(const PhysicalField& f) {
  const auto it = std::max_element(f.u.begin(), f.u.end());
  const std::size_t i = static_cast<std::size_t>(it - f.u.begin());
  const double a = f.u[i - 1], b = f.u[i], c = f.u[i + 1];
  return f.x[i] + 0.5 * f.x.step * (a - c) / (a - 2 * b + c);
}

// Snapshot reconstructed onto the output grid, or the reason it could not be.
struct Field {
  double T = 0.0;
  std::optional<PhysicalField> f;
  std::string error;
};

std::vector<Field> reconstruct_all(const std::vector<CharState>& snaps, const UniformGrid& grid) {
  std::vector<Field> out;
  for (const auto& s : snaps) {
    Field fd;
    fd.T = s.T;
    try {
      fd.f = to_physical(s, grid);
    } catch (const std::exception& e) {
      fd.error = e.what();
    }
    out.push_back(std::move(fd));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Shared runs, computed at most once per process.

struct CollisionRun {
  double T_star = 0.0;
  RunTrace trace;
  double seconds = 0.0;
  std::string error;
  std::vector<Field> fields;
};

const std::vector<double> kCollisionFractions = {0.0, 0.25, 0.5, 0.75, 1.0, 1.25, 1.5};

CollisionRun collision_run(const FluxModel& model, std::size_t n = 4096) {
  CollisionRun r;
  const auto t0 = Clock::now();
  const CharState s = initial("antipeakon_pair(1, 5)", n);
  const auto T_star = find_breaking_time(s, model, 20.0);
  if (!T_star) {
    r.error = "no breaking detected before T = 20";
    return r;
  }
  r.T_star = *T_star;
  RunOptions o;
  o.T_end = 1.5 * r.T_star;
  o.abort_on_drift = false;
  for (double c : kCollisionFractions) o.snapshot_times.push_back(c * r.T_star);
  try {
    r.trace = run(s, model, o);
  } catch (const std::exception& e) {
    r.error = e.what();
  }
  r.seconds = seconds_since(t0);
  return r;
}

const CollisionRun& ch_collision() {
  static const CollisionRun r = [] {
    CollisionRun c = collision_run(camassa_holm());
    c.fields = reconstruct_all(c.trace.snapshots, output_grid());
    return c;
  }();
  return r;
}

struct PeakonRun {
  RunTrace trace;
  std::vector<Field> fields;
};

const PeakonRun& peakon_run() {
  static const PeakonRun r = [] {
    PeakonRun p;
    RunOptions o;
    o.T_end = 1.0;
    o.snapshot_times = {0.0, 0.25, 0.5, 0.75, 1.0};
    o.abort_on_drift = false;
    p.trace = run(initial("peakon(1, 0)", 4096), camassa_holm(), o);
    p.fields = reconstruct_all(p.trace.snapshots, output_grid());
    return p;
  }();
  return r;
}

struct CompareResult {
  std::size_t n = 0;
  double diff = 0.0;
  PhysicalField field;
};

CompareResult compare_gaussian(std::size_t n) {
  const InitialDatum d = make_scenario(parse_scenario("gaussian(1, 1)"));
  const FluxModel m = camassa_holm();
  RunOptions o;
  o.T_end = 0.5;
  o.snapshot_times = {0.5};
  const RunTrace tr = run(to_characteristic(d, n), m, o);
  const ClassicalState c0 = classical_initial(d, n);
  const ClassicalRun ref = classical_run(d, m, 0.5, classical_auto_dt(c0, m), {n});
  CompareResult r;
  r.n = n;
  r.field = to_physical(tr.snapshots.back(), ref.state.x);
  for (std::size_t i = 0; i < n; ++i) r.diff = std::max(r.diff, std::abs(r.field.u[i] - ref.state.u[i]));
  return r;
}

const std::vector<CompareResult>& gaussian_comparison() {
  static const std::vector<CompareResult> r = {compare_gaussian(1024), compare_gaussian(2048), compare_gaussian(4096)};
  return r;
}

double identity_order(const IdentityResiduals& a, const IdentityResiduals& b) {
  return std::min({observed_order(a.u_Z, b.u_Z), observed_order(a.P_Z, b.P_Z), observed_order(a.x_Z, b.x_Z)});
}

// ---------------------------------------------------------------------------

Outcome criterion1() {
  Outcome o;
  std::mt19937_64 rng(20240601);
  const auto t0 = Clock::now();
  double worst_P = 0.0, worst_Px = 0.0;
  for (int k = 0; k < 20; ++k) {
    const CharState s = oracle::random_state(200, rng);
    const KernelResult fast = source_terms(s, camassa_holm());
    const KernelResult slow = oracle::direct_source_terms(s, camassa_holm());
    for (std::size_t i = 0; i < s.size(); ++i) {
      worst_P = std::max(worst_P, std::abs(fast.P[i] - slow.P[i]));
      worst_Px = std::max(worst_Px, std::abs(fast.Px[i] - slow.Px[i]));
    }
  }
  const double secs = seconds_since(t0);
  o.require(worst_P <= 1e-12, "max|dP| = " + num(worst_P));
  o.require(worst_Px <= 1e-12, "max|dPx| = " + num(worst_Px));
  o.require(secs < 5.0, "time " + num(secs) + " s");
  return o;
}

Outcome criterion2() {
  Outcome o;
  const CharState s0 = initial("zero", 512);
  RunOptions opts;
  opts.T_end = 1.0;
  opts.dt = 1e-2;
  opts.snapshot_times = {1.0};
  const CharState s = run(s0, camassa_holm(), opts).snapshots.back();
  double worst = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i)
    worst = std::max({worst, std::abs(s.u[i] - s0.u[i]), std::abs(s.w[i] - s0.w[i]), std::abs(s.v[i] - s0.v[i]),
                      std::abs(s.x[i] - s0.x[i])});
  o.require(worst <= 1e-14, "max field change " + num(worst));
  o.require(s.T == 1.0, "T = " + num(s.T));
  return o;
}

Outcome criterion3() {
  Outcome o;
  const CollisionRun& r = ch_collision();
  o.require(r.error.empty(), r.error.empty() ? "run completed" : "run failed: " + r.error);
  if (!r.error.empty()) return o;
  double min_v = INFINITY;
  for (const auto& s : r.trace.steps) min_v = std::min(min_v, s.min_v);
  o.require(!r.trace.breaking_events.empty(), "T* = " + num(r.T_star) + ", " +
                                                  std::to_string(r.trace.breaking_events.size()) + " breaking events");
  o.require(r.trace.max_drift <= 1e-6, "max drift " + num(r.trace.max_drift));
  o.require(min_v > 0.0, "min v " + num(min_v));
  o.require(r.seconds < 120.0, "time " + num(r.seconds) + " s");
  return o;
}

Outcome criterion4() {
  Outcome o;
  const auto t0 = Clock::now();
  const auto& c = gaussian_comparison();
  const double secs = seconds_since(t0);
  o.require(c[1].diff <= 5e-3, "diff at N=2048 " + num(c[1].diff));
  const double p1 = observed_order(c[0].diff, c[1].diff), p2 = observed_order(c[1].diff, c[2].diff);
  o.require(p1 >= 1.8, "order 1024/2048 " + num(p1));
  o.require(p2 >= 1.8, "order 2048/4096 " + num(p2));
  o.require(secs < 120.0, "time " + num(secs) + " s");
  return o;
}

Outcome criterion5() {
  Outcome o;
  const FluxModel m = camassa_holm();
  const double p0 = identity_order(identity_suite(initial("peakon(1, 0)", 2048), m),
                                   identity_suite(initial("peakon(1, 0)", 4096), m));
  o.require(p0 >= 1.9, "peakon order " + num(p0));

  const CollisionRun& fine = ch_collision();
  if (!fine.error.empty()) {
    o.require(false, "collision run failed: " + fine.error);
    return o;
  }
  // Mid-run snapshot (0.75 T*) at N = 2048 against the shared N = 4096 run.
  const CharState s0 = initial("antipeakon_pair(1, 5)", 2048);
  RunOptions opts;
  opts.T_end = 0.75 * fine.T_star;
  opts.snapshot_times = {opts.T_end};
  opts.abort_on_drift = false;
  const CharState coarse = run(s0, m, opts).snapshots.back();
  const CharState& mid = fine.trace.snapshots[3];
  const auto a = identity_suite(coarse, m), b = identity_suite(mid, m);
  const double p1 = identity_order(a, b);
  o.require(p1 >= 1.9, "mid-run order " + num(p1) + " (masked " + std::to_string(b.masked) + ")");
  return o;
}

Outcome criterion6() {
  Outcome o;
  const PeakonRun& p = peakon_run();
  for (const auto& fd : p.fields)
    if (!fd.f) {
      o.require(false, "reconstruction at t=" + num(fd.T) + ": " + fd.error);
      return o;
    }
  double worst = 0.0;
  for (std::size_t k = 1; k < p.fields.size(); ++k) {
    const double speed =
        (crest_position(*p.fields[k].f) - crest_position(*p.fields[k - 1].f)) / (p.fields[k].T - p.fields[k - 1].T);
    worst = std::max(worst, std::abs(speed - 1.0));
  }
  o.require(worst <= 0.02, "max |speed - 1| " + num(worst));
  o.require(p.trace.max_drift <= 1e-5, "max drift " + num(p.trace.max_drift));
  return o;
}

Outcome criterion7() {
  Outcome o;
  double worst = 0.0;
  std::size_t checked = 0, missing = 0;
  const auto check = [&](const PhysicalField& f, double E0) {
    worst = std::max(worst, holder_check(f, E0));
    ++checked;
  };
  const auto check_all = [&](const std::vector<Field>& fields, double E0) {
    for (const auto& fd : fields)
      if (fd.f)
        check(*fd.f, E0);
      else
        ++missing;
  };
  const CollisionRun& c = ch_collision();
  check_all(c.fields, c.trace.E0());
  if (!c.error.empty()) ++missing;
  for (const auto& g : gaussian_comparison()) check(g.field, 2.0 * std::sqrt(std::numbers::pi / 2.0));
  {
    const CharState s = initial("peakon(1, 0)", 4096);
    check(to_physical(s, output_grid()), energy_char(s));
  }
  const PeakonRun& p = peakon_run();
  check_all(p.fields, p.trace.E0());
  o.require(worst <= 1.01, "max ratio " + num(worst) + " over " + std::to_string(checked) + " snapshots");
  o.require(missing == 0, std::to_string(missing) + " snapshots could not be reconstructed");
  return o;
}

Outcome criterion8() {
  Outcome o;
  const CollisionRun& c = ch_collision();
  if (!c.error.empty()) {
    o.require(false, "collision run failed: " + c.error);
    return o;
  }
  const double E0 = c.trace.E0();
  const double window = c.trace.dt;
  const auto near_breaking = [&](double T) {
    for (const auto& ev : c.trace.breaking_events)
      if (std::abs(ev.T - T) <= window) return true;
    return false;
  };
  double worst_outside = 0.0;
  std::string failures;
  for (std::size_t k = 0; k < c.fields.size(); ++k) {
    const Field& fd = c.fields[k];
    const bool at_star = kCollisionFractions[k] == 1.0;
    if (!fd.f) {
      failures += " t=" + num(fd.T) + " unreconstructable;";
      continue;
    }
    const double Ep = energy_physical(*fd.f);
    if (at_star) {
      o.require(Ep < E0, "E_phys(T*) / E0 = " + num(Ep / E0));
    } else if (!near_breaking(fd.T)) {
      const double rel = std::abs(Ep - E0) / E0;
      worst_outside = std::max(worst_outside, rel);
      if (rel > 1e-3) failures += " t=" + num(fd.T) + " rel " + num(rel) + ";";
    }
  }
  o.require(worst_outside <= 1e-3 && failures.empty(),
            "max |E_phys - E0|/E0 away from breaking " + num(worst_outside) + (failures.empty() ? "" : " [" + failures + " ]"));
  return o;
}

Outcome criterion9() {
  Outcome o;
  const CollisionRun& c = ch_collision();
  double worst = 0.0;
  std::size_t missing = c.error.empty() ? 0 : 1;
  for (const auto& fd : c.fields)
    if (fd.f)
      worst = std::max(worst, antisymmetry_error(*fd.f));
    else
      ++missing;
  o.require(worst <= 1e-6, "max |u(x) + u(-x)| " + num(worst));
  o.require(missing == 0, std::to_string(missing) + " snapshots could not be reconstructed");
  return o;
}

std::string trace_bytes(const RunTrace& t) {
  const auto dir = std::filesystem::temp_directory_path() / "charflow_acceptance";
  std::filesystem::create_directories(dir);
  std::string bytes;
  const auto slurp = [](const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  write_energy_csv(t, (dir / "energy.csv").string());
  bytes += slurp(dir / "energy.csv");
  for (const auto& s : t.snapshots) {
    write_snapshot_csv(s, (dir / "snapshot.csv").string());
    bytes += slurp(dir / "snapshot.csv");
  }
  return bytes;
}

Outcome criterion10() {
  Outcome o;
  for (double k : {0.8, 1.0, 1.2}) {
    const CollisionRun r = collision_run(rod(k));
    if (!r.error.empty()) {
      o.require(false, "rod(" + num(k) + "): " + r.error);
      continue;
    }
    o.require(r.trace.max_drift <= 1e-5, "rod(" + num(k) + ") drift " + num(r.trace.max_drift));
    if (k == 1.0) {
      const CollisionRun& ch = ch_collision();
      o.require(ch.error.empty() && trace_bytes(r.trace) == trace_bytes(ch.trace), "rod(1) output identical to camassa_holm");
    }
  }
  return o;
}

Outcome criterion11() {
  Outcome o;
  struct Tuple {
    double mu, v_minus, Ebar;
  };
  const Tuple tuples[] = {{0.0, 1.0, 0.0}, {1.0, 0.5, 2.0}, {0.3, 2.0, 1.5}, {2.5, 0.25, 10.0}, {1e-3, 1e3, 7.0}};
  std::size_t exact = 0;
  for (const auto& t : tuples) {
    const KernelBounds b = kernel_bound_report(t.mu, t.v_minus, t.Ebar);
    const double lambda = 2.0 * t.mu * t.mu + 4.0 / t.v_minus;
    const double gamma = 4.0 * (t.Ebar + 1.0) / t.v_minus;
    if (b.lambda_l1 == lambda && b.gamma_l1 == gamma) ++exact;
  }
  o.require(exact == 5, std::to_string(exact) + "/5 tuples exact");
  return o;
}

const std::map<int, std::pair<const char*, std::function<Outcome()>>>& criteria() {
  static const std::map<int, std::pair<const char*, std::function<Outcome()>>> table = {
      {1, {"kernel scan matches direct quadrature", criterion1}},
      {2, {"zero state is a fixed point", criterion2}},
      {3, {"energy conserved through peakon-antipeakon collision", criterion3}},
      {4, {"agreement with classical solver before breaking", criterion4}},
      {5, {"identity residuals converge at second order", criterion5}},
      {6, {"single peakon translates at unit speed", criterion6}},
      {7, {"Holder bound on reconstructed fields", criterion7}},
      {8, {"physical energy equals E0 away from breaking", criterion8}},
      {9, {"collision fields stay antisymmetric", criterion9}},
      {10, {"rod family conserves energy, rod(1) equals CH", criterion10}},
      {11, {"kernel bound formulas", criterion11}},
  };
  return table;
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
      selected.insert(std::atoi(argv[++i]));
    } else {
      std::fprintf(stderr, "usage: %s [--criterion N]...\n", argv[0]);
      return 2;
    }
  }
  if (selected.empty())
    for (const auto& [id, _] : criteria()) selected.insert(id);

  int failed = 0;
  for (int id : selected) {
    const auto it = criteria().find(id);
    if (it == criteria().end()) {
      std::fprintf(stderr, "unknown criterion %d\n", id);
      return 2;
    }
    const auto t0 = Clock::now();
    Outcome out;
    try {
      out = it->second.second();
    } catch (const std::exception& e) {
      out.require(false, std::string("exception: ") + e.what());
    }
    std::printf("[%s] criterion %2d: %s (%s) [%.1f s]\n", out.pass ? "PASS" : "FAIL", id, it->second.first,
                out.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
    if (!out.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}

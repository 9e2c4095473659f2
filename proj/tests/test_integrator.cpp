#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "charflow/char_transform.hpp"
#include "charflow/integrator.hpp"
#include "charflow/scenarios.hpp"

using namespace charflow;

namespace {

CharState initial(const std::string& text, std::size_t n) {
  return to_characteristic(make_scenario(parse_scenario(text)), n);
}

double max_diff(const CharState& a, const CharState& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    m = std::max({m, std::abs(a.u[i] - b.u[i]), std::abs(a.w[i] - b.w[i]), std::abs(a.v[i] - b.v[i]),
                  std::abs(a.x[i] - b.x[i])});
  return m;
}

CharState run_to(const CharState& s0, double T, double dt) {
  RunOptions o;
  o.T_end = T;
  o.dt = dt;
  o.snapshot_times = {T};
  o.abort_on_drift = false;
  return run(s0, camassa_holm(), o).snapshots.back();
}

}  // namespace

TEST(StepRk4, ZeroStateIsExactFixedPoint) {
  const CharState s = CharState::zero(UniformGrid::spanning(-20.0, 20.0, 256));
  const CharState t = step_rk4(s, 0.37, camassa_holm());
  EXPECT_EQ(t.u, s.u);
  EXPECT_EQ(t.w, s.w);
  EXPECT_EQ(t.v, s.v);
  EXPECT_EQ(t.x, s.x);
  EXPECT_DOUBLE_EQ(t.T, 0.37);
}

TEST(StepRk4, ForwardThenBackwardReturns) {
  const CharState s = initial("peakon(1, 0)", 1024);
  const FluxModel m = camassa_holm();
  const CharState back = step_rk4(step_rk4(s, 1e-3, m), -1e-3, m);
  EXPECT_LE(max_diff(s, back), 1e-10);
  EXPECT_NEAR(back.T, 0.0, 1e-18);
}

TEST(StepRk4, FourthOrderInTime) {
  const CharState s = initial("gaussian(1, 1)", 512);
  const CharState a = run_to(s, 0.1, 0.05), b = run_to(s, 0.1, 0.025), c = run_to(s, 0.1, 0.0125);
  const double ratio = max_diff(a, b) / max_diff(b, c);
  EXPECT_GE(ratio, 12.0);
  EXPECT_LE(ratio, 20.0);
}

TEST(StepRk4, RejectsZeroStep) {
  EXPECT_THROW(step_rk4(CharState::zero(UniformGrid::spanning(0, 1, 16)), 0.0, camassa_holm()), std::invalid_argument);
}

TEST(Run, ZeroScenario) {
  RunOptions o;
  o.T_end = 1.0;
  const RunTrace t = run(initial("zero", 256), camassa_holm(), o);
  for (const auto& r : t.steps) EXPECT_EQ(r.E, 0.0);
  EXPECT_TRUE(t.breaking_events.empty());
  EXPECT_EQ(t.max_drift, 0.0);
}

TEST(Run, SnapshotsLandExactlyOnRequestedTimes) {
  RunOptions o;
  o.T_end = 0.5;
  o.dt = 0.03;
  o.snapshot_times = {0.5, 0.0, 0.1, 0.25};
  o.abort_on_drift = false;
  const RunTrace t = run(initial("gaussian(1, 1)", 256), camassa_holm(), o);
  ASSERT_EQ(t.snapshots.size(), 4u);
  EXPECT_EQ(t.snapshots[0].T, 0.0);
  EXPECT_EQ(t.snapshots[1].T, 0.1);
  EXPECT_EQ(t.snapshots[2].T, 0.25);
  EXPECT_EQ(t.snapshots[3].T, 0.5);
  EXPECT_EQ(t.steps.back().T, 0.5);
}

TEST(Run, AbortsWhenDriftExceedsTolerance) {
  RunOptions o;
  o.T_end = 1.0;
  o.tol.energy_drift_tol = 1e-300;
  EXPECT_THROW(run(initial("antipeakon_pair(1, 5)", 256), camassa_holm(), o), EnergyDriftExceeded);
}

TEST(Run, RejectsBadOptions) {
  const CharState s = initial("zero", 64);
  RunOptions o;
  o.T_end = 0.0;
  EXPECT_THROW(run(s, camassa_holm(), o), std::invalid_argument);
  o.T_end = 1.0;
  o.snapshot_times = {2.0};
  EXPECT_THROW(run(s, camassa_holm(), o), std::invalid_argument);
}

TEST(AutoDt, Formula) {
  const CharState s = initial("peakon(2, 0)", 513);
  double umax = 0.0;
  for (double u : s.u) umax = std::max(umax, std::abs(u));
  EXPECT_NEAR(umax, 2.0, 1e-12);
  EXPECT_DOUBLE_EQ(auto_dt(s, camassa_holm()), std::min(0.5 * s.Z.step, 1e-2) / (1.0 + umax));
}

TEST(Run, PeakonAntipeakonBreaksAndContinues) {
  const CharState s = initial("antipeakon_pair(1, 5)", 1024);
  RunOptions o;
  o.T_end = 7.0;
  o.abort_on_drift = false;
  const RunTrace t = run(s, camassa_holm(), o);
  ASSERT_FALSE(t.breaking_events.empty());
  EXPECT_NEAR(t.breaking_events.front().T, std::acosh(std::exp(5.0)), 0.1);
  double E_max_u2 = 0.0;
  for (const auto& r : t.steps) {
    EXPECT_GT(r.min_v, 0.0);
    EXPECT_TRUE(std::isfinite(r.max_v));
    E_max_u2 = std::max(E_max_u2, r.max_u2);
  }
  EXPECT_LE(E_max_u2, t.E0() * (1.0 + o.tol.energy_drift_tol));
}

TEST(Run, RateBoundsAreRefinementStable) {
  RunOptions o;
  o.T_end = 2.0;
  o.abort_on_drift = false;
  double dw[2], vr[2];
  const std::size_t sizes[] = {512, 1024};
  for (int k = 0; k < 2; ++k) {
    const RunTrace t = run(initial("gaussian(1, 1)", sizes[k]), camassa_holm(), o);
    dw[k] = vr[k] = 0.0;
    for (const auto& r : t.steps) {
      dw[k] = std::max(dw[k], r.max_abs_dw);
      vr[k] = std::max(vr[k], r.v_rate);
      // |log v| <= C T with C the largest v-rate seen so far
      EXPECT_LE(std::abs(std::log(r.min_v)), vr[k] * r.T + 1e-12);
    }
  }
  EXPECT_NEAR(dw[1] / dw[0], 1.0, 0.1);
}

TEST(FindBreakingTime, NoneForSmoothShortRun) {
  EXPECT_FALSE(find_breaking_time(initial("gaussian(0.1, 1)", 256), camassa_holm(), 0.5).has_value());
}

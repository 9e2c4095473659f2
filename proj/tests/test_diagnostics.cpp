#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "charflow/char_transform.hpp"
#include "charflow/diagnostics.hpp"
#include "charflow/scenarios.hpp"
#include "oracles.hpp"

using namespace charflow;

namespace {

CharState initial(const std::string& text, std::size_t n) {
  return to_characteristic(make_scenario(parse_scenario(text)), n);
}

// C^1 bump in space-time, zero outside |x| < 4 and t > 0.4.
TestFunction bump() {
  auto phi = [](double r) { return r < 1 ? std::pow(1 - r * r, 2) : 0.0; };
  auto dphi = [](double r) { return r < 1 ? -4 * r * (1 - r * r) : 0.0; };
  TestFunction tf;
  tf.psi = [=](double t, double x) { return phi(x / 4) * phi(t / 0.4); };
  tf.psi_t = [=](double t, double x) { return phi(x / 4) * dphi(t / 0.4) / 0.4; };
  tf.psi_x = [=](double t, double x) { return dphi(x / 4) / 4 * phi(t / 0.4); };
  return tf;
}

double weak_residual(std::size_t n, double dT) {
  RunOptions o;
  o.T_end = 0.4;
  o.dt = dT;
  o.abort_on_drift = false;
  for (int k = 0; k * dT <= 0.4 + 1e-12; ++k) o.snapshot_times.push_back(std::min(k * dT, 0.4));
  const RunTrace tr = run(initial("gaussian(1, 1)", n), camassa_holm(), o);
  return std::abs(weak_form_residual(tr.snapshots, camassa_holm(), bump()));
}

}  // namespace

TEST(IdentitySuite, ZeroState) {
  const auto r = identity_suite(CharState::zero(UniformGrid::spanning(-5.0, 5.0, 64)), camassa_holm());
  EXPECT_LE(r.max(), 1e-13);
}

TEST(IdentitySuite, PeakonIsSecondOrder) {
  const FluxModel m = camassa_holm();
  const auto a = identity_suite(initial("peakon(1, 0)", 2048), m);
  const auto b = identity_suite(initial("peakon(1, 0)", 4096), m);
  for (auto [ra, rb] : {std::pair{a.u_Z, b.u_Z}, std::pair{a.P_Z, b.P_Z}, std::pair{a.x_Z, b.x_Z}}) {
    EXPECT_GE(ra / rb, 3.2) << ra << " " << rb;
    EXPECT_LE(ra / rb, 4.8) << ra << " " << rb;
  }
  EXPECT_GT(a.masked, 0u);
}

TEST(ThetaSampler, EmptyAndSmoothRuns) {
  EXPECT_EQ(theta_sampler(RunTrace{}), 0.0);
  RunOptions o;
  o.T_end = 1.0;
  o.abort_on_drift = false;
  const RunTrace zero = run(initial("zero", 128), camassa_holm(), o);
  EXPECT_EQ(theta_sampler(zero), 0.0);
  EXPECT_EQ(breaking_time_fraction(zero), 0.0);
  o.T_end = 0.5;
  const RunTrace smooth = run(initial("gaussian(1, 1)", 256), camassa_holm(), o);
  EXPECT_EQ(theta_sampler(smooth), 0.0);
}

TEST(ThetaSampler, CountsWideBreakingSteps) {
  RunTrace t;
  for (std::size_t cells : {0, 3, 11, 40}) {
    StepRecord r;
    r.T = static_cast<double>(t.steps.size());
    r.breaking_cells = cells;
    t.steps.push_back(r);
  }
  EXPECT_DOUBLE_EQ(theta_sampler(t), 0.5);
  EXPECT_DOUBLE_EQ(breaking_time_fraction(t), 1.0);
}

TEST(EnergyReport, DriftAndSeries) {
  EXPECT_NEAR(relative_drift(1.1, 1.0), 0.1, 1e-15);
  EXPECT_EQ(relative_drift(0.0, 0.0), 0.0);
  RunOptions o;
  o.T_end = 0.5;
  o.snapshot_times = {0.0, 0.5};
  const RunTrace tr = run(initial("gaussian(1, 1)", 1024), camassa_holm(), o);
  const EnergyReport rep = energy_report(tr, UniformGrid::spanning(-30.0, 30.0, 8001));
  ASSERT_EQ(rep.series.size(), 2u);
  EXPECT_EQ(rep.theta_fraction, 0.0);
  EXPECT_LE(rep.max_drift, 1e-6);
  for (const auto& e : rep.series) {
    EXPECT_NEAR(e.E_phys, rep.E0, 1e-3 * rep.E0);
    EXPECT_LE(e.E_phys, e.E_char * (1 + 1e-3));
    EXPECT_FALSE(e.E_phys_lower_bound);
  }
}

TEST(Antisymmetry, OddDatumAtStart) {
  const CharState s = initial("antipeakon_pair(1, 5)", 2048);
  const PhysicalField f = to_physical(s, UniformGrid::spanning(-30.0, 30.0, 6001));
  EXPECT_LE(antisymmetry_error(f), 1e-14);
  EXPECT_THROW(antisymmetry_error(to_physical(s, UniformGrid::spanning(-30.0, 29.0, 11))), std::invalid_argument);
}

TEST(WeakForm, ResidualShrinksUnderRefinement) {
  const double coarse = weak_residual(256, 0.02);
  const double fine = weak_residual(512, 0.01);
  EXPECT_LT(fine, coarse);
  EXPECT_LT(fine, 1e-2);
}

TEST(Report, KeyValueLinesInInsertionOrder) {
  Report r;
  r.add("zeta", 0.1);
  r.add("alpha", std::size_t{3});
  r.add("flag", true);
  r.add("name", std::string("x"));
  const auto path = std::filesystem::temp_directory_path() / "charflow_report_test.txt";
  r.write(path.string());
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  EXPECT_EQ(ss.str(), "zeta = 0.10000000000000001\nalpha = 3\nflag = true\nname = x\n");
  std::filesystem::remove(path);
}

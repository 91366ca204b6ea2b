#include <gtest/gtest.h>

#include <cmath>

#include "rhsym/checks.hpp"

using namespace rhsym;

namespace {

OdeState decay(double, const OdeState& y) { return {-y[0]}; }
OdeState oscillator(double, const OdeState& y) { return {y[1], -y[0]}; }

SolverConfig until(double t_end) {
  SolverConfig c;
  c.t_end = t_end;
  return c;
}

}  // namespace

TEST(Integrate, ExponentialDecay) {
  const Trajectory tr = integrate(decay, 0, {1.0}, until(1));
  EXPECT_EQ(tr.reason, Termination::ReachedEnd);
  EXPECT_DOUBLE_EQ(tr.s.back(), 1.0);
  EXPECT_NEAR(tr.z.back()[0], std::exp(-1.0), 1e-8);
  EXPECT_NEAR(tr.z.back()[0], 0.3678794, 5e-8);
}

TEST(Integrate, OscillatorEnergyDrift) {
  const double T = 2 * M_PI;
  const Trajectory tr = integrate(oscillator, 0, {1.0, 0.0}, until(10 * T));
  double worst = 0;
  for (const auto& z : tr.z) worst = std::max(worst, std::abs(0.5 * (z[0] * z[0] + z[1] * z[1]) - 0.5));
  EXPECT_LT(worst, 1e-6);
  EXPECT_NEAR(tr.z.back()[0], 1.0, 1e-6);
}

TEST(Integrate, DenseSamples) {
  const std::vector<double> at = {0.1, 0.25, 0.5, 0.9, 1.0};
  const Trajectory tr = integrate(decay, 0, {1.0}, until(1), {}, at);
  ASSERT_EQ(tr.s.size(), at.size() + 1);
  for (std::size_t i = 0; i < at.size(); ++i) {
    EXPECT_DOUBLE_EQ(tr.s[i + 1], at[i]);
    EXPECT_NEAR(tr.z[i + 1][0], std::exp(-at[i]), 1e-8);
  }
}

TEST(Integrate, Deterministic) {
  const Trajectory a = integrate(oscillator, 0, {1.0, 0.5}, until(20));
  const Trajectory b = integrate(oscillator, 0, {1.0, 0.5}, until(20));
  EXPECT_EQ(a.s, b.s);
  EXPECT_EQ(a.z, b.z);
  EXPECT_EQ(a.steps, b.steps);
}

TEST(Integrate, EventBracket) {
  EventSpec ev;
  ev.delta = 1e-6;
  ev.guards.push_back({"half", [](double, const OdeState& z) { return 0.5 - z[0]; }});
  auto grow = [](double, const OdeState&) { return OdeState{1.0}; };
  const Trajectory tr = integrate(grow, 0, {0.0}, until(2), ev);
  EXPECT_EQ(tr.reason, Termination::Event);
  ASSERT_EQ(tr.events.size(), 1u);
  const EventHit& h = tr.events[0];
  EXPECT_EQ(h.name, "half");
  EXPECT_LE(h.hi - h.lo, ev.delta);
  EXPECT_GT(h.g_lo, 0);
  EXPECT_LE(h.g_hi, 0);
  EXPECT_TRUE(h.lo <= 0.5 && 0.5 <= h.hi);
  EXPECT_TRUE(tr.fired("half"));
}

TEST(Integrate, NonTerminalEventsAreRecorded) {
  EventSpec ev;
  ev.guards.push_back({"pass", [](double, const OdeState& z) { return 0.25 - z[0]; }, false});
  ev.guards.push_back({"stop", [](double, const OdeState& z) { return 0.75 - z[0]; }});
  auto grow = [](double, const OdeState&) { return OdeState{1.0}; };
  const Trajectory tr = integrate(grow, 0, {0.0}, until(2), ev);
  ASSERT_EQ(tr.events.size(), 2u);
  EXPECT_EQ(tr.events[0].name, "pass");
  EXPECT_EQ(tr.events[1].name, "stop");
  EXPECT_NEAR(tr.s.back(), 0.75, 1e-6);
}

TEST(Integrate, SingularityEndsInStepFailure) {
  auto blow = [](double, const OdeState& y) { return OdeState{y[0] * y[0]}; };
  const Trajectory tr = integrate(blow, 0, {1.0}, until(2));
  EXPECT_EQ(tr.reason, Termination::StepFailure);
  EXPECT_FALSE(tr.failure.empty());
  EXPECT_NEAR(tr.s.back(), 1.0, 1e-3);
}

TEST(Integrate, InvalidConfig) {
  SolverConfig c;
  c.rtol = -1;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  EXPECT_THROW(integrate(decay, 0, {1.0}, c), std::invalid_argument);
}

TEST(Integrate, ConvergenceOrder) {
  const double order = convergence_order(decay, 0, {1.0}, 1, [](double s) { return OdeState{std::exp(-s)}; });
  EXPECT_GE(order, 3.9);
}

TEST(Integrate, CaseOneSelfConvergence) {
  EXPECT_LT(case1_self_convergence(1e-8), 10);
}

TEST(Integrate, TighterToleranceNeverWorseOnCaseFour) {
  FluidParams p = FluidParams::for_theory(Theory::Eckart);
  p.k = 1;
  p.kappa = 1;
  double prev = std::numeric_limits<double>::infinity();
  for (double rtol : {1e-5, 1e-6, 1e-7, 1e-8, 1e-9}) {
    const Case4Comparison c = compare_case4(p, rtol);
    ASSERT_TRUE(c.failure.empty()) << c.failure;
    EXPECT_LE(c.quadrature_error, prev) << "rtol " << rtol;
    prev = c.quadrature_error;
  }
  EXPECT_LT(prev, 1e-6);
}

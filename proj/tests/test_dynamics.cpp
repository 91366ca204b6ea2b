#include <gtest/gtest.h>

#include <cmath>

#include "rhsym/dynamics.hpp"

using namespace rhsym;

namespace {

std::shared_ptr<const ReducedSystem> system_for(int c, Theory th) {
  return std::make_shared<const ReducedSystem>(reduced_system(c, th));
}

double integral_at(const Expr& e, const Row& r) {
  NumericEnv env;
  env.set(sym::psi(), r.psi);
  env.set(sym::n(), r.n);
  env.set(sym::rho(), r.rho);
  env.set(sym::q(), r.q);
  return env.eval(to_ratfunc(e));
}

}  // namespace

TEST(Dynamics, HomogeneousFirstIntegralsConserved) {
  RunConfig cfg;
  cfg.solver.rtol = 1e-11;
  cfg.solver.atol = 1e-13;
  cfg.samples = 200;
  for (Theory th : {Theory::Eckart, Theory::IsraelStewart}) {
    const auto rs = system_for(1, th);
    const rhsym::Run run = run_system(rs, 0.5, cfg);
    const auto rows = run.rows();
    ASSERT_GT(rows.size(), 10u);
    for (const auto& [name, e] : rs->first_integrals) {
      const double i0 = integral_at(e, rows.front());
      double worst = 0;
      for (const Row& r : rows) worst = std::max(worst, std::abs(integral_at(e, r) - i0) / std::max(1.0, std::abs(i0)));
      EXPECT_LT(worst, 1e-8) << theory_name(th) << " " << name;
    }
  }
}

TEST(Dynamics, EckartHomogeneousBlowsUp) {
  RunConfig cfg;
  cfg.samples = 200;
  const rhsym::Run run = run_case(1, Theory::Eckart, FluidParams::for_theory(Theory::Eckart), 0.5, cfg);
  EXPECT_EQ(classify(run), Behaviour::BlowingUp);
  EXPECT_TRUE(run.traj.fired("v->1"));
  const auto rows = run.rows();
  for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_GE(rows[i].v, rows[i - 1].v);
  EXPECT_NEAR(rows.back().q / rows.back().rho, -2.0 / 3.0, 1e-2);
  EXPECT_GT(rows.back().v, 0.97);
}

TEST(Dynamics, InitialRowIsTheRequestedState) {
  RunConfig cfg;
  cfg.samples = 10;
  cfg.initial.rho0 = 2.5;
  const rhsym::Run run = run_case(2, Theory::IsraelStewart, FluidParams::for_theory(Theory::IsraelStewart), 0.3, cfg);
  const Row r = run.rows().front();
  EXPECT_NEAR(r.v, 0.3, 1e-15);
  EXPECT_DOUBLE_EQ(r.rho, 2.5);
  EXPECT_DOUBLE_EQ(r.n, 1.0);
  EXPECT_DOUBLE_EQ(r.q, -2.0);
  EXPECT_DOUBLE_EQ(r.indep, 0.0);
}

TEST(Dynamics, IsraelStewartHomogeneousSlowStartDecays) {
  RunConfig cfg;
  cfg.samples = 200;
  const rhsym::Run run = run_case(1, Theory::IsraelStewart, FluidParams::for_theory(Theory::IsraelStewart), 0.3, cfg);
  EXPECT_EQ(classify(run), Behaviour::Decaying);
}

TEST(Dynamics, EckartHomogeneousHasNoCriticalVelocity) {
  EXPECT_THROW(find_critical(1, Theory::Eckart, FluidParams::for_theory(Theory::Eckart), 0.1, 0.9, 1e-2),
               NoBracket);
}

TEST(Dynamics, IsraelStewartHomogeneousCriticalVelocity) {
  const CriticalResult c =
      find_critical(1, Theory::IsraelStewart, FluidParams::for_theory(Theory::IsraelStewart), 0.5, 0.9, 1e-3);
  EXPECT_LE(c.hi - c.lo, 1e-3);
  EXPECT_GT(c.estimate(), 0.5);
  EXPECT_LT(c.estimate(), 0.9);
  EXPECT_FALSE(c.below.blew_up());
  EXPECT_TRUE(c.above.blew_up());
}

TEST(Dynamics, EckartStationaryCriticalVelocity) {
  const CriticalResult c =
      find_critical(2, Theory::Eckart, FluidParams::for_theory(Theory::Eckart), 0.5, 0.9, 1e-3);
  EXPECT_NEAR(c.estimate(), 0.77, 0.01);
}

TEST(Dynamics, SimilarityCaseSlowStartDecays) {
  RunConfig cfg;
  cfg.samples = 200;
  const rhsym::Run run = run_case(3, Theory::Eckart, FluidParams::for_theory(Theory::Eckart), 0.5, cfg);
  EXPECT_EQ(classify(run), Behaviour::Decaying) << "events: " << run.traj.events.size();
}

TEST(Dynamics, ClassifierEdgeCases) {
  rhsym::Run empty;
  EXPECT_EQ(classify(empty), Behaviour::Inconclusive);

  rhsym::Run flat;
  flat.traj.s = {0, 1, 2, 3, 4, 5};
  for (double v : {0.5, 0.4, 0.3, 0.2, 0.1, 0.05}) flat.traj.z.push_back({std::atanh(v), 1, 1, 0});
  EXPECT_EQ(classify(flat), Behaviour::Decaying);
  flat.traj.z.back()[0] = std::atanh(0.3);
  EXPECT_EQ(classify(flat), Behaviour::Inconclusive);

  rhsym::Run singular = flat;
  singular.traj.events.push_back({"singular", 0, 0, 0, 0});
  EXPECT_EQ(classify(singular), Behaviour::Inconclusive);
  singular.traj.events.push_back({"v->-1", 0, 0, 0, 0});
  EXPECT_EQ(classify(singular), Behaviour::BlowingUp);
}

TEST(Dynamics, InvalidRequests) {
  const auto rs = system_for(1, Theory::Eckart);
  EXPECT_THROW(run_system(rs, 0.99), std::invalid_argument);
  EXPECT_THROW(run_system(rs, 1.0), std::invalid_argument);
  RunConfig cfg;
  cfg.guard = 1.5;
  EXPECT_THROW(run_system(rs, 0.5, cfg), std::invalid_argument);
  EXPECT_THROW(find_critical(rs, 0.9, 0.1, 1e-3), std::invalid_argument);
}

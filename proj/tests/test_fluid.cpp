#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "rhsym/reduction.hpp"

using namespace rhsym;

namespace {

std::array<Symbol, 8> all_jets() {
  const auto tj = time_jets(), xj = space_jets();
  return {tj[0], tj[1], tj[2], tj[3], xj[0], xj[1], xj[2], xj[3]};
}

Subst jets_to_zero() {
  Subst s;
  for (Symbol j : all_jets()) s.emplace(j.id(), RatFunc());
  return s;
}

// x -> -x, psi -> -psi: q flips with the spatial frame, x-derivatives of
// scalars flip, t-derivatives of psi and q flip.
Subst reflection() {
  const auto tj = time_jets(), xj = space_jets();
  auto neg = [](Symbol s) { return to_ratfunc(-Expr(s)); };
  Subst s;
  s.emplace(sym::psi().id(), neg(sym::psi()));
  s.emplace(sym::q().id(), neg(sym::q()));
  s.emplace(tj[0].id(), neg(tj[0]));
  s.emplace(tj[3].id(), neg(tj[3]));
  s.emplace(xj[1].id(), neg(xj[1]));
  s.emplace(xj[2].id(), neg(xj[2]));
  return s;
}

}  // namespace

TEST(BuildSystem, EquilibriumIsASolution) {
  for (Theory th : {Theory::Eckart, Theory::IsraelStewart}) {
    const PDESystem sys = build_system(th);
    Subst eq = jets_to_zero();
    eq.emplace(sym::psi().id(), RatFunc());
    eq.emplace(sym::q().id(), RatFunc());
    for (const RatFunc& r : sys.normal) EXPECT_TRUE(substitute(r, eq).is_zero());
    const auto num = residual_at(sys, FluidState{0, 1.3, 2.1, 0}, Jets{});
    for (double v : num) EXPECT_EQ(v, 0.0);
  }
}

TEST(BuildSystem, HeatFluxSourceAtRest) {
  const PDESystem sys = build_system(Theory::Eckart);
  Subst s = jets_to_zero();
  s.emplace(sym::psi().id(), RatFunc());
  const Expr n = sym::n(), rho = sym::rho(), q = sym::q();
  const Expr k = sym::parameter("k"), kappa = sym::parameter("kappa");
  EXPECT_TRUE(equal(substitute(sys.normal[3], s), to_ratfunc(3 * n * k * q / (kappa * rho))));
  for (int i = 0; i < 3; ++i) EXPECT_TRUE(substitute(sys.normal[i], s).is_zero());
}

TEST(BuildSystem, RelaxationCoefficient) {
  FluidParams p;
  p.lambda = make_rational(1, 3);
  const PDESystem sys = build_system(p);
  const Symbol qt = time_jets()[3], qx = space_jets()[3];
  const Expr psi = sym::psi(), rho = sym::rho();
  const Expr beta = Expr(p.lambda) * rat(15, 4) / rho;
  EXPECT_TRUE(equal(diff(sys.normal[3], qx.id()), to_ratfunc(beta * sinh(psi))));
  EXPECT_TRUE(equal(diff(sys.normal[3], qt.id()), to_ratfunc(-beta * cosh(psi))));
}

TEST(BuildSystem, LambdaLinearity) {
  const Expr psi = sym::psi(), rho = sym::rho();
  const Expr qt = time_jets()[3], qx = space_jets()[3];
  FluidParams p0, p1;
  p1.lambda = make_rational(2, 5);
  const RatFunc d = build_system(p1).normal[3] - build_system(p0).normal[3];
  const Expr expect = Expr(p1.lambda) * rat(15, 4) / rho * (sinh(psi) * qx - cosh(psi) * qt);
  EXPECT_TRUE(equal(d, to_ratfunc(expect)));
}

TEST(BuildSystem, AffineInJets) {
  for (Theory th : {Theory::Eckart, Theory::IsraelStewart}) {
    const PDESystem sys = build_system(th);
    const auto jets = all_jets();
    for (const RatFunc& r : sys.normal) {
      for (Symbol a : jets) {
        const RatFunc da = diff(r, a.id());
        for (Symbol b : jets) EXPECT_TRUE(diff(da, b.id()).is_zero());
      }
    }
  }
}

TEST(BuildSystem, ReflectionParity) {
  for (Theory th : {Theory::Eckart, Theory::IsraelStewart}) {
    const PDESystem sys = build_system(th);
    const Subst r = reflection();
    EXPECT_TRUE(equal(substitute(sys.normal[0], r), sys.normal[0]));
    EXPECT_TRUE(equal(substitute(sys.normal[1], r), sys.normal[1]));
    EXPECT_TRUE(equal(substitute(sys.normal[2], r), -sys.normal[2]));
    EXPECT_TRUE(equal(substitute(sys.normal[3], r), -sys.normal[3]));
  }
}

TEST(TimeForm, ParticleConservationAtRest) {
  const PDESystem sys = build_system(Theory::Eckart);
  Subst s;
  s.emplace(sym::psi().id(), RatFunc());
  const Expr n = sym::n(), nt = time_jets()[1], px = space_jets()[0];
  EXPECT_TRUE(equal(substitute(sys.normal[0], s), to_ratfunc(-nt + n * px)));
}

TEST(TimeForm, HeatFluxNotDynamicalWithoutRelaxation) {
  const PDESystem sys = build_system(Theory::Eckart);
  Subst s;
  s.emplace(sym::psi().id(), RatFunc());
  EXPECT_TRUE(diff(substitute(sys.normal[3], s), time_jets()[3].id()).is_zero());
}

TEST(TimeForm, DeterminantNonzeroWithRelaxation) {
  const TimeForm tf = quasilinear_time_form(build_system(Theory::IsraelStewart));
  Subst s;
  s.emplace(sym::psi().id(), RatFunc());
  const RatFunc d = substitute(RatFunc(tf.det), s);
  EXPECT_FALSE(d.is_zero());
  // Each time derivative is affine in the x-jets.
  for (int i = 0; i < 4; ++i) {
    for (Symbol a : space_jets()) {
      for (Symbol b : space_jets()) EXPECT_TRUE(diff(diff(tf.value(i), a.id()), b.id()).is_zero());
    }
  }
}

TEST(TimeForm, SolvesTheSystem) {
  const PDESystem sys = build_system(Theory::IsraelStewart);
  const TimeForm tf = quasilinear_time_form(sys);
  Subst s;
  for (int i = 0; i < 4; ++i) s.emplace(tf.jets[i].id(), tf.value(i));
  for (const RatFunc& r : sys.normal) EXPECT_TRUE(substitute(r, s).is_zero());
}

TEST(ResidualAt, DomainAndGenericity) {
  const PDESystem sys = build_system(Theory::IsraelStewart);
  EXPECT_THROW(residual_at(sys, FluidState{0, 0, 1, 0}, Jets{}), std::domain_error);
  EXPECT_THROW(residual_at(sys, FluidState{0, 1, -1, 0}, Jets{}), std::domain_error);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1, 1);
  const FluidState st{u(rng), 1 + std::abs(u(rng)), 1 + std::abs(u(rng)), u(rng)};
  const Jets j{u(rng), u(rng), u(rng), u(rng), u(rng), u(rng), u(rng), u(rng)};
  const auto r = residual_at(sys, st, j);
  for (double v : r) EXPECT_NE(v, 0.0);
}

TEST(ClosedFormCase4, ReferencePoints) {
  FluidParams p = FluidParams::for_theory(Theory::Eckart);
  p.k = 1;
  p.kappa = 1;
  // S = 1: tanh(y - C2) never reaches 1, so v -> 0 and n -> N0 only as y grows.
  const auto far = closed_form_case4(p, 1, 0, 3, 40);
  EXPECT_NEAR(far.v, 0, 1e-12);
  EXPECT_NEAR(far.state.n, p.N0, 1e-12);
  // S = 2: S tanh(S (y - C2)) = 1 at y = atanh(1/2)/2.
  const auto one = closed_form_case4(p, 4, 0, 3, std::atanh(0.5) / 2);
  EXPECT_NEAR(one.v, 0, 1e-12);
  EXPECT_THROW(closed_form_case4(p, 1, 0, 3, 0), std::domain_error);
  EXPECT_THROW(closed_form_case4(p, -1, 0, 3, 1), std::domain_error);
}

TEST(ClosedFormCase4, StateSatisfiesResiduals) {
  FluidParams p = FluidParams::for_theory(Theory::Eckart);
  p.k = 1;
  p.kappa = 1;
  const PDESystem sys = build_system(p);
  const double C1 = 4, C2 = 0, rho0 = 3;
  double worst = 0;
  for (double y : {0.2, 0.5, 1.0, 2.0}) {
    const auto pt = closed_form_case4(p, C1, C2, rho0, y);
    const auto r = residual_at(sys, pt.state, closed_form_case4_jets(p, C1, C2, rho0, y));
    for (double v : r) worst = std::max(worst, std::abs(v));
  }
  // Central differences limit the attainable level to about 1e-9.
  EXPECT_LT(worst, 1e-6);
}

TEST(Params, ParseAndValidate) {
  std::istringstream in("# comment\nk = 2\nkappa = 1/2\nlambda = 1\nN0 = 1.5\n");
  const FluidParams p = parse_params(in);
  EXPECT_EQ(*p.k, 2);
  EXPECT_EQ(*p.kappa, make_rational(1, 2));
  EXPECT_EQ(p.lambda, 1);
  EXPECT_DOUBLE_EQ(p.N0, 1.5);
  std::istringstream bad("k = -1\n");
  EXPECT_THROW(parse_params(bad), std::invalid_argument);
  std::istringstream unknown("mu = 1\n");
  EXPECT_THROW(parse_params(unknown), std::invalid_argument);
}

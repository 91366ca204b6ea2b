#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "rhsym/liealg.hpp"
#include "rhsym/reduction.hpp"

using namespace rhsym;

namespace {

bool all_zero(const std::array<RatFunc, 4>& r) {
  for (const RatFunc& e : r) {
    if (!e.is_zero()) return false;
  }
  return true;
}

VectorField random_field(std::mt19937_64& rng, int degree) {
  std::uniform_int_distribution<long> c(-4, 4);
  const Ansatz an(degree);
  RVector coef(an.size());
  for (auto& v : coef) v = Rational(c(rng));
  return an.field(coef);
}

std::string describe(const std::vector<VectorField>& fs) {
  std::string out;
  for (const auto& f : fs) out += "  " + to_string(f) + "\n";
  return out;
}

}  // namespace

TEST(Prolongation, DilationCoefficients) {
  const ProlongedField p = prolong1(fields::dilation());
  const Expr psi_x = space_jets()[0], n_t = time_jets()[1];
  EXPECT_TRUE(equal(p.jet.at(space_jets()[0].id()), to_ratfunc(-psi_x)));
  EXPECT_TRUE(equal(p.jet.at(time_jets()[1].id()), to_ratfunc(-2 * n_t)));
}

TEST(Prolongation, TranslationHasNoJetPart) {
  const ProlongedField p = prolong1(fields::dt());
  ASSERT_EQ(p.jet.size(), 8u);
  for (const auto& [j, c] : p.jet) EXPECT_TRUE(c.is_zero()) << atom_info(j).name;
}

TEST(Prolongation, Linear) {
  std::mt19937_64 rng(41);
  std::uniform_int_distribution<long> c(-5, 5);
  for (int i = 0; i < 10; ++i) {
    const VectorField v = random_field(rng, 1), w = random_field(rng, 1);
    const Rational a(c(rng)), b(c(rng));
    const ProlongedField pv = prolong1(v), pw = prolong1(w);
    const ProlongedField ps = prolong1(v.scaled(RatFunc(a)) + w.scaled(RatFunc(b)));
    for (const auto& [j, coef] : ps.jet) {
      EXPECT_TRUE(equal(coef, RatFunc(a) * pv.jet.at(j) + RatFunc(b) * pw.jet.at(j)));
    }
  }
}

TEST(Prolongation, SecondOrderTermsCancel) {
  std::mt19937_64 rng(43);
  for (int i = 0; i < 10; ++i) {
    for (const RatFunc& d : second_order_defect(random_field(rng, 2))) EXPECT_TRUE(d.is_zero());
  }
}

TEST(VerifySymmetry, ScalingOfRhoAndQ) {
  EXPECT_TRUE(all_zero(verify_symmetry(fields::scaling_rho_q(), build_system(Theory::Eckart))));
  EXPECT_TRUE(all_zero(verify_symmetry(fields::scaling_rho_q(), build_system(Theory::IsraelStewart))));
}

TEST(VerifySymmetry, PureRapidityShiftIsNot) {
  EXPECT_FALSE(all_zero(verify_symmetry(fields::boost_psi(), build_system(Theory::Eckart))));
}

TEST(VerifySymmetry, LorentzBoost) {
  EXPECT_TRUE(is_symmetry(fields::boost(), build_system(Theory::Eckart)));
  EXPECT_TRUE(is_symmetry(fields::boost(), build_system(Theory::IsraelStewart)));
}

TEST(VerifySymmetry, DilationExcludedWithRelaxation) {
  EXPECT_TRUE(is_symmetry(fields::dilation(), build_system(Theory::Eckart)));
  EXPECT_FALSE(is_symmetry(fields::dilation(), build_system(Theory::IsraelStewart)));
}

TEST(DeterminingEquations, ConstantAnsatzGivesTranslations) {
  const Ansatz an(0);
  for (Theory th : {Theory::Eckart, Theory::IsraelStewart}) {
    const auto found = solve_determining(build_system(th), an);
    EXPECT_TRUE(same_span(found, {fields::dt(), fields::dx()}, an)) << describe(found);
  }
}

TEST(DeterminingEquations, AffineAnsatzShape) {
  const Ansatz an(1);
  EXPECT_EQ(an.size(), 42u);
  FluidParams p = FluidParams::for_theory(Theory::Eckart);
  p.k = 1;
  p.kappa = 2;
  const DeterminingSystem ds = determining_equations(build_system(p), an);
  EXPECT_EQ(ds.unknowns, 42u);
  EXPECT_EQ(ds.rows.size(), ds.labels.size());
  EXPECT_GT(ds.rows.size(), 42u);
}

TEST(SolveDetermining, EckartBasis) {
  const Ansatz an(1);
  const auto found = solve_determining(build_system(Theory::Eckart), an);
  EXPECT_EQ(found.size(), 4u) << describe(found);
  EXPECT_TRUE(same_span(found, literature_basis(Theory::Eckart), an)) << describe(found);
}

TEST(SolveDetermining, IsraelStewartBasis) {
  const Ansatz an(1);
  const auto found = solve_determining(build_system(Theory::IsraelStewart), an);
  EXPECT_EQ(found.size(), 3u) << describe(found);
  EXPECT_TRUE(same_span(found, literature_basis(Theory::IsraelStewart), an)) << describe(found);
}

TEST(SolveDetermining, FoundFieldsAreSymmetriesAndClose) {
  const Ansatz an(1);
  for (Theory th : {Theory::Eckart, Theory::IsraelStewart}) {
    const PDESystem sys = build_system(th);
    const auto found = solve_determining(sys, an);
    const std::vector<VectorField> expected = {fields::dt(), fields::dx(), fields::scaling_rho_q(),
                                               fields::dilation(), fields::boost()};
    EXPECT_TRUE(same_span(found, expected, an)) << describe(found);
    for (const auto& v : found) EXPECT_TRUE(is_symmetry(v, sys)) << to_string(v);
    for (const auto& v : found) {
      for (const auto& w : found) EXPECT_TRUE(coordinates(found, commutator(v, w)).has_value());
    }
  }
}

// A spatially homogeneous solution point with its time jets, pushed along the
// exact flow of a scaling generator, still satisfies the residuals.
TEST(SymmetryFlow, MapsSolutionsToSolutions) {
  FluidParams p = FluidParams::for_theory(Theory::IsraelStewart);
  p.k = 1;
  p.kappa = 2;
  const ReducedSystem rs = reduced_system(1, Theory::IsraelStewart, p);
  const PDESystem sys = build_system(rs.params);
  const NumericSystem ns(rs);
  const std::vector<double> z = {0.4, 1.2, 2.5, -0.7};
  const auto f = ns(rs.orientation * 0.0, z);
  const double o = rs.orientation;
  const FluidState st{z[0], z[1], z[2], z[3]};
  Jets j;
  j.psi_t = o * f[0];
  j.n_t = o * f[1];
  j.rho_t = o * f[2];
  j.q_t = o * f[3];
  for (double r : residual_at(sys, st, j)) ASSERT_LT(std::abs(r), 1e-12);

  const double eps = 1e-3, g = std::exp(eps);
  FluidState s1 = st;
  Jets j1 = j;
  s1.rho *= g;
  s1.q *= g;
  j1.rho_t *= g;
  j1.q_t *= g;
  for (double r : residual_at(sys, s1, j1)) EXPECT_LT(std::abs(r), 1e-6);

  // t -> g t, x -> g x, n -> n / g.
  FluidState s2 = st;
  Jets j2 = j;
  s2.n /= g;
  j2.n_t /= g * g;
  j2.psi_t /= g;
  j2.rho_t /= g;
  j2.q_t /= g;
  for (double r : residual_at(sys, s2, j2)) EXPECT_LT(std::abs(r), 1e-6);
}

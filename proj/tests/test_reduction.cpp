#include <gtest/gtest.h>

#include <random>

#include "rhsym/reduction.hpp"

using namespace rhsym;

namespace {

const Expr half = rat(1, 2);

// sinh <-> cosh on expressions linear in them: the exp(-psi) part changes sign.
Poly swap_hyperbolics(const Poly& p) {
  const AtomId em = detail::exp_atom_of(Poly() - Poly::symbol(sym::psi()));
  std::vector<Poly::Term> out;
  for (const auto& [m, c] : p.terms) {
    bool neg = false;
    for (auto [a, e] : m) neg = neg || (a == em && e % 2 != 0);
    out.emplace_back(m, neg ? Rational(-c) : c);
  }
  return Poly::from_terms(std::move(out));
}

Subst swap_directions() {
  const auto tj = time_jets(), xj = space_jets();
  Subst s;
  for (int i = 0; i < 4; ++i) {
    s.emplace(tj[i].id(), RatFunc(Poly::symbol(xj[i])));
    s.emplace(xj[i].id(), RatFunc(Poly::symbol(tj[i])));
  }
  return s;
}

}  // namespace

TEST(Invariants, CaseFiveGenerator) {
  const Expr a = sym::parameter("a");
  const VectorField g = catalog_invariants(5, a).generator;
  const Expr n = sym::n(), x = sym::x(), rho = sym::rho(), t = sym::t();
  EXPECT_TRUE(is_zero(verify_invariant(g, n * x)));
  EXPECT_TRUE(equivalent(verify_invariant(g, rho * pow(t, a)), 2 * a * rho * pow(t, a)));
  EXPECT_TRUE(is_zero(verify_invariant(g, rho * pow(t, -a))));
}

TEST(Invariants, CatalogMembersAreAnnihilated) {
  for (int c = 1; c <= 6; ++c) {
    for (const Expr& a : {half, Expr(sym::parameter("a"))}) {
      const InvariantSet s = catalog_invariants(c, a);
      for (const auto& [name, e] : s.invariants) {
        EXPECT_TRUE(is_zero(verify_invariant(s.generator, e))) << "case " << c << " " << name;
      }
    }
  }
  EXPECT_THROW(catalog_invariants(7), std::invalid_argument);
}

TEST(Invariants, FunctionallyIndependent) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.5, 2.0);
  for (int c = 1; c <= 6; ++c) {
    const InvariantSet s = catalog_invariants(c, half);
    for (int i = 0; i < 5; ++i) {
      const std::array<double, 6> pt = {u(rng), u(rng), u(rng), u(rng), u(rng), u(rng)};
      EXPECT_EQ(jacobian_rank(s, pt), s.invariants.size()) << "case " << c;
      EXPECT_EQ(s.invariants.size(), 5u);
    }
  }
}

TEST(Invariants, OfConcreteGenerators) {
  const Expr t = sym::t(), x = sym::x(), n = sym::n(), q = sym::q(), rho = sym::rho();
  auto has = [](const InvariantSet& s, const Expr& e) {
    for (const auto& [name, f] : s.invariants) {
      if (equivalent(f, e)) return true;
    }
    return false;
  };
  const InvariantSet d = invariants_of(fields::dilation());
  EXPECT_TRUE(equivalent(d.similarity, x / t));
  EXPECT_TRUE(has(d, n * t));
  EXPECT_TRUE(has(d, Expr(sym::psi())) && has(d, rho) && has(d, q));

  const InvariantSet tr = invariants_of(fields::dt() + fields::dx().scaled(RatFunc(Rational(3))));
  EXPECT_TRUE(equivalent(tr.similarity, x - 3 * t));

  const InvariantSet sc = invariants_of(fields::scaling_rho_q());
  EXPECT_FALSE(sc.indep.has_value());
  EXPECT_TRUE(has(sc, q / rho) && has(sc, t) && has(sc, x));

  EXPECT_THROW(invariants_of(fields::boost()), std::invalid_argument);
}

TEST(ReducedSystem, CatalogIsSound) {
  const std::vector<std::pair<int, Theory>> all = {{1, Theory::Eckart}, {2, Theory::Eckart},
                                                   {3, Theory::Eckart}, {4, Theory::Eckart},
                                                   {5, Theory::Eckart}, {6, Theory::Eckart},
                                                   {1, Theory::IsraelStewart}, {2, Theory::IsraelStewart}};
  for (auto [c, th] : all) {
    const ReductionCheck r = symbolic_check_reduction(c, th);
    EXPECT_TRUE(r.zero) << "case " << c << " " << theory_name(th);
    for (const auto& [name, ok] : r.integrals) EXPECT_TRUE(ok) << "case " << c << " " << name;
  }
}

TEST(ReducedSystem, OtherFamilyParameters) {
  for (int c : {4, 5, 6}) {
    for (Rational a : {make_rational(2, 3), make_rational(-3, 4)}) {
      EXPECT_TRUE(symbolic_check_reduction(reduced_system(c, Theory::Eckart, FluidParams::for_theory(Theory::Eckart), a)).zero)
          << "case " << c << " a = " << a;
    }
  }
}

TEST(ReducedSystem, CaseThreeRelation) {
  const ReducedSystem rs = reduced_system(3, Theory::Eckart);
  ASSERT_EQ(rs.relations.size(), 1u);
  const Expr psi = sym::psi(), y = sym::y(), N0 = sym::parameter("N0");
  EXPECT_TRUE(equivalent(rs.relations[0].second, N0 / (sinh(psi) + y * cosh(psi))));
}

TEST(ReducedSystem, CaseFourCharacteristic) {
  const ReducedSystem rs = reduced_system(4, Theory::Eckart);
  EXPECT_EQ(rs.a, -1);
  ASSERT_EQ(rs.states.size(), 3u);
  EXPECT_TRUE(rs.rhs[1].is_zero());  // rho_y = 0
  const Expr psi = sym::psi(), N0 = sym::parameter("N0");
  // N0 exp(psi) = N0 sqrt((1 + v)/(1 - v)) with v = tanh(psi).
  EXPECT_TRUE(equivalent(rs.ansatz[1], N0 * exp(psi)));
  EXPECT_TRUE(equivalent(pow(exp(psi), 2), (1 + tanh(psi)) / (1 - tanh(psi))));
}

TEST(ReducedSystem, StationaryIsTimeExchangeOfHomogeneous) {
  for (Theory th : {Theory::Eckart, Theory::IsraelStewart}) {
    const PDESystem sys = build_system(th);
    for (int i = 0; i < 3; ++i) {
      ASSERT_TRUE(sys.normal[i].is_poly());
      const RatFunc swapped = substitute(sys.normal[i], swap_directions());
      EXPECT_TRUE(equal(RatFunc(swap_hyperbolics(swapped.num)), -sys.normal[i])) << "equation " << i + 1;
    }
    const ReducedSystem r1 = reduced_system(1, th), r2 = reduced_system(2, th);
    for (int i = 0; i < 3; ++i) {
      // Rows agree up to an overall sign fixed by normalization.
      int sign = 0;
      for (std::size_t j = 0; j < 4; ++j) {
        const Poly a = swap_hyperbolics(r1.mass[i][j]), b = r2.mass[i][j];
        if (a.is_zero() && b.is_zero()) continue;
        if (sign == 0) sign = (a + b).is_zero() ? -1 : 1;
        EXPECT_TRUE((sign > 0 ? a - b : a + b).is_zero()) << "row " << i + 1 << " column " << j + 1;
      }
      EXPECT_NE(sign, 0);
      EXPECT_TRUE(r1.force[i].is_zero());
      EXPECT_TRUE(r2.force[i].is_zero());
    }
  }
}

TEST(ReducedSystem, UnsupportedCombinations) {
  try {
    reduced_system(3, Theory::IsraelStewart);
    FAIL();
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("much more complicated"), std::string::npos);
  }
  try {
    reduced_system(4, Theory::IsraelStewart);
    FAIL();
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("complex velocity"), std::string::npos);
  }
  EXPECT_THROW(reduced_system(5, Theory::IsraelStewart), std::invalid_argument);
  EXPECT_THROW(reduced_system(7, Theory::Eckart), std::invalid_argument);
  EXPECT_THROW(reduced_system(0, Theory::Eckart), std::invalid_argument);
}

TEST(LiteratureForms, NotInvariantUnderTheirGenerators) {
  for (int c : {4, 5, 6}) {
    const LiteratureCheck lc = literature_variant_check(c, make_rational(1, 2));
    EXPECT_FALSE(lc.annihilated) << "case " << c;
    // Each form is invariant under a sibling generator, so the reduction still closes.
    EXPECT_TRUE(lc.reduction_consistent) << "case " << c;
  }
  EXPECT_THROW(literature_variant_check(3, 1), std::invalid_argument);
}

TEST(Numeric, RightHandSideMatchesSymbolic) {
  FluidParams p = FluidParams::for_theory(Theory::IsraelStewart);
  p.k = 1;
  p.kappa = 3;
  const ReducedSystem rs = reduced_system(2, Theory::IsraelStewart, p);
  const NumericSystem ns(rs);
  const std::vector<double> z = {0.2, 1.1, 2.0, -0.4};
  const auto f = ns(0.0, z);
  NumericEnv env;
  for (std::size_t i = 0; i < 4; ++i) env.set(rs.states[i], z[i]);
  env.set(rs.indep, 0.0);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(f[i], env.eval(rs.rhs[i]), 1e-12 * (1 + std::abs(f[i])));
}

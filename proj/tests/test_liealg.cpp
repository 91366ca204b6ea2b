#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "rhsym/liealg.hpp"

using namespace rhsym;

namespace {

RVector unit(std::size_t n, std::size_t i) {
  RVector v(n, Rational(0));
  v[i] = 1;
  return v;
}

// [e1, e2] = e3, [e2, e3] = e1, [e3, e1] = e2.
LieAlgebra rotation_algebra() {
  LieAlgebra alg;
  alg.basis = {VectorField::unit(0), VectorField::unit(1), VectorField::unit(2)};
  alg.names = default_names(3);
  alg.c.assign(3, std::vector<RVector>(3, RVector(3, Rational(0))));
  auto set = [&](int i, int j, int k) {
    alg.c[i][j][k] = 1;
    alg.c[j][i][k] = -1;
  };
  set(0, 1, 2);
  set(1, 2, 0);
  set(2, 0, 1);
  return alg;
}

std::vector<double> to_double(const RVector& v) {
  std::vector<double> out;
  for (const auto& r : v) out.push_back(r.get_d());
  return out;
}

bool same_expr(const std::vector<Expr>& got, const std::vector<Expr>& want) {
  if (got.size() != want.size()) return false;
  for (std::size_t i = 0; i < got.size(); ++i) {
    if (!equivalent(got[i], want[i])) return false;
  }
  return true;
}

}  // namespace

TEST(Commutator, Examples) {
  const auto b = table_basis(Theory::Eckart);
  EXPECT_EQ(commutator(b[0], b[2]), b[0]);
  EXPECT_TRUE(commutator(b[0], b[1]).is_zero());
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<long> c(-3, 3);
  const Ansatz an(1);
  for (int i = 0; i < 5; ++i) {
    RVector co(an.size());
    for (auto& v : co) v = Rational(c(rng));
    const VectorField v = an.field(co);
    EXPECT_TRUE(commutator(v, v).is_zero());
  }
}

TEST(StructureConstants, EckartTable) {
  const LieAlgebra alg = structure_constants(table_basis(Theory::Eckart));
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) {
      RVector want(4, Rational(0));
      if (i < 2 && j == 2) want[i] = 1;
      if (i == 2 && j < 2) want[j] = -1;
      EXPECT_EQ(alg.c[i][j], want) << "[V" << i + 1 << ", V" << j + 1 << "]";
    }
  }
}

TEST(StructureConstants, IsraelStewartSubtable) {
  const LieAlgebra e = structure_constants(table_basis(Theory::Eckart));
  const LieAlgebra s = structure_constants(table_basis(Theory::IsraelStewart));
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      for (std::size_t k = 0; k < 3; ++k) EXPECT_EQ(s.c[i][j][k], e.c[i][j][k]);
    }
  }
}

TEST(StructureConstants, AbelianAndNonClosed) {
  const LieAlgebra alg = structure_constants({fields::dt(), fields::dx()});
  for (const auto& row : alg.c) {
    for (const auto& v : row) EXPECT_EQ(v, RVector(2, Rational(0)));
  }
  // [dt, x d/dpsi] = d/dpsi is outside the span.
  VectorField w;
  w.coef[2] = RatFunc(Poly::symbol(sym::t()));
  EXPECT_THROW(structure_constants({fields::dt(), w}), std::domain_error);
}

TEST(StructureConstants, Jacobi) {
  for (Theory th : {Theory::Eckart, Theory::IsraelStewart}) {
    EXPECT_TRUE(satisfies_jacobi(structure_constants(table_basis(th))));
  }
  EXPECT_TRUE(satisfies_jacobi(rotation_algebra()));
}

TEST(Solvability, Examples) {
  for (Theory th : {Theory::Eckart, Theory::IsraelStewart}) {
    const LieAlgebra alg = structure_constants(table_basis(th));
    const Solvability s = is_solvable(alg);
    EXPECT_TRUE(s.solvable);
    EXPECT_EQ(s.witness.size(), alg.dim());
    EXPECT_TRUE(check_solvable_witness(alg, s.witness));
  }
  EXPECT_FALSE(is_solvable(rotation_algebra()).solvable);
}

TEST(Adjoint, ClosedForms) {
  const LieAlgebra alg = structure_constants(table_basis(Theory::Eckart));
  const Expr eps = sym::parameter("eps");
  const auto a = adjoint_action_symbolic(alg, 2, unit(4, 0));
  ASSERT_TRUE(a);
  EXPECT_TRUE(same_expr(*a, {exp(eps), 0, 0, 0}));
  const auto b = adjoint_action_symbolic(alg, 0, unit(4, 2));
  ASSERT_TRUE(b);
  EXPECT_TRUE(same_expr(*b, {-eps, 0, 1, 0}));
  const auto c = adjoint_action_symbolic(alg, 3, unit(4, 0));
  ASSERT_TRUE(c);
  EXPECT_TRUE(same_expr(*c, {1, 0, 0, 0}));
  const LieAlgebra is = structure_constants(table_basis(Theory::IsraelStewart));
  const auto d = adjoint_action_symbolic(is, 2, unit(3, 1));
  ASSERT_TRUE(d);
  EXPECT_TRUE(same_expr(*d, {0, exp(eps), 0}));
}

TEST(Adjoint, Composition) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  const LieAlgebra eck = structure_constants(table_basis(Theory::Eckart));
  const LieAlgebra rot = rotation_algebra();
  for (int trial = 0; trial < 50; ++trial) {
    const double e1 = u(rng), e2 = u(rng);
    for (const LieAlgebra* alg : {&eck, &rot}) {
      std::vector<double> w(alg->dim());
      for (double& x : w) x = u(rng);
      for (std::size_t i = 0; i < alg->dim(); ++i) {
        const auto two = adjoint_action(*alg, e1, i, adjoint_action(*alg, e2, i, w));
        const auto one = adjoint_action(*alg, e1 + e2, i, w);
        for (std::size_t k = 0; k < w.size(); ++k) EXPECT_NEAR(two[k], one[k], 1e-12);
      }
    }
  }
}

TEST(Adjoint, NumericPathMatchesClosedForm) {
  const LieAlgebra alg = structure_constants(table_basis(Theory::Eckart));
  const std::vector<double> w = {0.3, -1.1, 0.7, 2.0};
  for (std::size_t i = 0; i < 4; ++i) {
    const auto a = adjoint_action(alg, 0.8, i, w);
    const auto b = adjoint_action(alg, 0.8, i, w, true);
    for (std::size_t k = 0; k < 4; ++k) EXPECT_NEAR(a[k], b[k], 1e-12);
  }
}

TEST(NormalForm, Examples) {
  const Rational a = make_rational(3, 7);
  const NormalForm f = normalize_element({1, a, 0, 0});
  EXPECT_EQ(f.form, "dt + a*dx");
  EXPECT_EQ(f.a, a);
  EXPECT_EQ(f.literature_entry, 4);

  const NormalForm d = normalize_element({0, 0, 0, 1});
  EXPECT_EQ(d.form, "D + a*S");
  EXPECT_EQ(d.a, 0);
  EXPECT_EQ(d.literature_entry, 3);

  // dt commutes with S and D only rescales it, so the dt term survives.
  const NormalForm s = normalize_element({1, a, 1, 0});
  EXPECT_EQ(s.form, "S + dt + a*dx");
  EXPECT_EQ(s.coords, (RVector{1, a, 1, 0}));
  EXPECT_EQ(s.literature_entry, 6);

  EXPECT_THROW(normalize_element({0, 0, 0, 0}), std::invalid_argument);
  EXPECT_THROW(normalize_element({1, 0}), std::invalid_argument);
}

TEST(NormalForm, CoverageAndIdempotence) {
  std::mt19937_64 rng(1000);
  std::uniform_int_distribution<long> num(-6, 6), den(1, 5), zero(0, 3);
  for (Theory th : {Theory::Eckart, Theory::IsraelStewart}) {
    const auto basis = th == Theory::Eckart ? literature_basis(th) : table_basis(th);
    const LieAlgebra alg = structure_constants(basis);
    const auto canon = minimal_optimal_list(th);
    for (int trial = 0; trial < 1000; ++trial) {
      RVector w(alg.dim());
      bool nonzero = false;
      for (auto& x : w) {
        x = zero(rng) == 0 ? Rational(0) : make_rational(num(rng), den(rng));
        nonzero = nonzero || !is_zero(x);
      }
      if (!nonzero) continue;
      const NormalForm nf = normalize_element(w);
      EXPECT_NE(std::find(canon.begin(), canon.end(), nf.form), canon.end()) << nf.form;
      const auto img = apply_word(alg, nf.word, to_double(w));
      const auto want = to_double(nf.coords);
      for (std::size_t k = 0; k < w.size(); ++k) EXPECT_NEAR(img[k], want[k], 1e-9);
      const NormalForm again = normalize_element(nf.coords);
      EXPECT_EQ(again.coords, nf.coords);
      EXPECT_EQ(again.form, nf.form);
    }
  }
}

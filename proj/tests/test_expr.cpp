#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "rhsym/linalg.hpp"

using namespace rhsym;

namespace {

Expr S(Symbol s) { return Expr(s); }

// Random expressions over a few symbols; denominators stay positive for
// positive symbol values.
class RandomExpr {
 public:
  explicit RandomExpr(std::uint64_t seed) : rng_(seed) {}

  Expr operator()(int depth) {
    std::uniform_int_distribution<int> pick(0, depth > 0 ? 7 : 1);
    switch (pick(rng_)) {
      case 0:
        return leaf();
      case 1:
        return Expr(rat(small(), 1 + std::abs(small())));
      case 2:
        return (*this)(depth - 1) + (*this)(depth - 1);
      case 3:
      case 4:
        return (*this)(depth - 1) * (*this)(depth - 1);
      case 5:
        return (*this)(depth - 1) / denominator();
      case 6: {
        const Expr a = S(sym::psi()) * rat(1 + std::abs(small()) % 2);
        return std::uniform_int_distribution<int>(0, 2)(rng_) == 0 ? sinh(a) : cosh(a);
      }
      default:
        return pow((*this)(depth - 1), 2);
    }
  }

 private:
  Expr leaf() {
    static const Symbol pool[] = {sym::psi(), sym::n(), sym::rho(), sym::q(), sym::t(), sym::x()};
    return S(pool[std::uniform_int_distribution<int>(0, 5)(rng_)]);
  }
  Expr denominator() {
    switch (std::uniform_int_distribution<int>(0, 2)(rng_)) {
      case 0:
        return S(sym::rho());
      case 1:
        return S(sym::n());
      default:
        return 1 + S(sym::t()) * S(sym::t());
    }
  }
  long small() { return std::uniform_int_distribution<long>(-3, 3)(rng_); }

  std::mt19937_64 rng_;
};

NumericEnv random_env(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.3, 1.7);
  NumericEnv env;
  for (Symbol s : {sym::psi(), sym::n(), sym::rho(), sym::q(), sym::t(), sym::x()}) env.set(s, u(rng));
  return env;
}

}  // namespace

TEST(Differentiate, Examples) {
  const Expr psi = sym::psi(), t = sym::t(), n = sym::n(), rho = sym::rho(), q = sym::q();
  const Expr k = sym::parameter("k"), kappa = sym::parameter("kappa");
  const Expr c1 = sym::parameter("c1"), c4 = sym::parameter("c4");
  EXPECT_TRUE(equivalent(differentiate(sinh(psi), sym::psi()), cosh(psi)));
  EXPECT_TRUE(equivalent(differentiate(c1 + t * c4, sym::t()), c4));
  EXPECT_TRUE(equivalent(differentiate(3 * n * k * q / (kappa * rho), sym::rho()),
                         -3 * n * k * q / (kappa * pow(rho, 2))));
  EXPECT_TRUE(is_zero(differentiate(Expr(7), sym::psi())));
}

TEST(TotalDerivative, ChainRule) {
  const Expr x = sym::x(), psi = sym::psi(), n = sym::n(), rho = sym::rho(), q = sym::q();
  const Symbol X = sym::x();
  const Expr phi = x * psi * n + pow(rho, 2) * q + sinh(psi) * x;
  Expr expect = differentiate(phi, X);
  for (Symbol u : {sym::psi(), sym::n(), sym::rho(), sym::q()}) {
    expect += differentiate(phi, u) * Expr(sym::jet(u, X));
  }
  EXPECT_TRUE(equivalent(total_derivative(phi, X), expect));
  EXPECT_TRUE(equivalent(total_derivative(x, X), Expr(1)));
  EXPECT_TRUE(equivalent(total_derivative(psi, sym::t()), Expr(sym::jet(sym::psi(), sym::t()))));
}

TEST(TotalDerivative, IntroducesSecondOrderJets) {
  const Symbol psi_x = sym::jet(sym::psi(), sym::x());
  const Expr d = total_derivative(Expr(psi_x), sym::t());
  EXPECT_EQ(to_string(d), "psi_tx");
}

TEST(TotalDerivative, DirectionsCommute) {
  RandomExpr gen(11);
  for (int i = 0; i < 40; ++i) {
    Expr e = gen(3);
    e += Expr(sym::jet(sym::n(), sym::x())) * e + pow(Expr(sym::jet(sym::q(), sym::t())), 2);
    const Expr xt = total_derivative(total_derivative(e, sym::t()), sym::x());
    const Expr tx = total_derivative(total_derivative(e, sym::x()), sym::t());
    EXPECT_TRUE(is_zero(xt - tx)) << to_string(e);
  }
}

TEST(Normalize, HyperbolicIdentities) {
  const Expr psi = sym::psi(), rho = sym::rho();
  EXPECT_TRUE(is_zero(pow(cosh(psi), 2) - pow(sinh(psi), 2) - 1));
  EXPECT_TRUE(is_zero(2 * sinh(psi) * cosh(psi) - sinh(2 * psi)));
  const Expr p = sym::parameter("p");
  EXPECT_TRUE(equivalent(substitute(p + rho, {{sym::parameter("p"), rho / 3}}), rat(4, 3) * rho));
}

TEST(Normalize, Idempotent) {
  RandomExpr gen(7);
  for (int i = 0; i < 200; ++i) {
    const Expr once = normalize(gen(4));
    EXPECT_TRUE(normalize(once) == once) << to_string(once);
  }
}

TEST(Normalize, NumericCrossCheck) {
  RandomExpr gen(3);
  std::mt19937_64 rng(5);
  for (int i = 0; i < 100; ++i) {
    const Expr e = gen(4);
    const Expr nf = normalize(e);
    const NumericEnv env = random_env(rng);
    const double a = evaluate(e, env), b = evaluate(nf, env);
    EXPECT_NEAR(a, b, 1e-12 * std::max(1.0, std::abs(a))) << to_string(e);
  }
}

TEST(Differentiate, LinearityAndLeibniz) {
  RandomExpr gen(19);
  for (int i = 0; i < 100; ++i) {
    const Expr a = gen(3), b = gen(3);
    for (Symbol s : {sym::psi(), sym::rho(), sym::t()}) {
      EXPECT_TRUE(is_zero(differentiate(a * b, s) - a * differentiate(b, s) - b * differentiate(a, s)));
      EXPECT_TRUE(is_zero(differentiate(2 * a - b, s) - 2 * differentiate(a, s) + differentiate(b, s)));
    }
  }
}

TEST(Substitute, Examples) {
  const Expr n = sym::n(), rho = sym::rho(), q = sym::q(), psi = sym::psi();
  const Expr k = sym::parameter("k"), kappa = sym::parameter("kappa");
  const Symbol T = sym::parameter("T");
  EXPECT_TRUE(equivalent(substitute(q / (kappa * Expr(T)), {{T, rho / (3 * n * k)}}), 3 * n * k * q / (kappa * rho)));
  EXPECT_TRUE(equivalent(substitute(cosh(psi), {{sym::psi(), Expr(0)}}), Expr(1)));
  EXPECT_THROW(substitute(1 / rho, {{sym::rho(), Expr(0)}}), std::domain_error);
}

TEST(Substitute, Simultaneous) {
  const Expr n = sym::n(), rho = sym::rho();
  const Expr swapped = substitute(n - 2 * rho, {{sym::n(), rho}, {sym::rho(), n}});
  EXPECT_TRUE(equivalent(swapped, rho - 2 * n));
}

TEST(Collect, Examples) {
  const Expr A = sym::parameter("A"), B = sym::parameter("B");
  const Symbol px = sym::jet(sym::psi(), sym::x()), nx = sym::jet(sym::n(), sym::x());
  const auto m = collect(A * Expr(px) + B * Expr(nx) * Expr(px), {px, nx});
  ASSERT_EQ(m.size(), 2u);
  for (const auto& [mono, coef] : m) {
    if (mono == Expr(px)) {
      EXPECT_TRUE(equivalent(coef, A));
    } else {
      EXPECT_TRUE(equivalent(mono, Expr(px) * Expr(nx)));
      EXPECT_TRUE(equivalent(coef, B));
    }
  }
  EXPECT_TRUE(collect(Expr(0), {px}).empty());
  // Monomial denominators are Laurent monomials; anything else is rejected.
  const auto inv = collect(A / Expr(px), {px});
  ASSERT_EQ(inv.size(), 1u);
  EXPECT_TRUE(equivalent(inv[0].first, 1 / Expr(px)));
  EXPECT_THROW(collect(A / (Expr(px) + 1), {px}), std::invalid_argument);
}

TEST(Collect, ReExpansion) {
  RandomExpr gen(23);
  const std::vector<Symbol> basis = {sym::q(), sym::t()};
  for (int i = 0; i < 100; ++i) {
    const Expr e = gen(4);
    if (depends_on(to_ratfunc(e).den, sym::t().id())) continue;
    Expr sum = 0;
    for (const auto& [mono, coef] : collect(e, basis)) {
      for (Symbol s : basis) EXPECT_TRUE(is_zero(differentiate(coef, s)));
      sum += mono * coef;
    }
    EXPECT_TRUE(equivalent(sum, e)) << to_string(e);
  }
}

TEST(Nullspace, Examples) {
  const Symbol c1 = sym::unknown(1), c2 = sym::unknown(2);
  const RMatrix ns = nullspace(std::vector<Expr>{Expr(c1) + Expr(c2)}, {c1, c2});
  ASSERT_EQ(ns.size(), 1u);
  EXPECT_EQ(ns[0][0], -ns[0][1]);
  EXPECT_NE(ns[0][0], 0);

  const RMatrix free = nullspace(std::vector<Expr>{}, {c1});
  ASSERT_EQ(free.size(), 1u);
  EXPECT_EQ(free[0][0], 1);

  EXPECT_THROW(nullspace(std::vector<Expr>{Expr(c1) * Expr(c2)}, {c1, c2}), std::invalid_argument);
}

TEST(Parse, RoundTrip) {
  RandomExpr gen(29);
  for (int i = 0; i < 50; ++i) {
    const Expr e = normalize(gen(3));
    EXPECT_TRUE(equivalent(parse(to_string(e)), e)) << to_string(e);
  }
}

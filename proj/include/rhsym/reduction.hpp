#pragma once

// Group invariants, similarity ansatz and the catalog of reduced ODE systems.

#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rhsym/compiled.hpp"
#include "rhsym/fluid.hpp"
#include "rhsym/liealg.hpp"
#include "rhsym/symmetry.hpp"

namespace rhsym {

namespace sym {
inline Symbol alpha() { return dependent("alpha"); }
inline Symbol beta() { return dependent("beta"); }
inline Symbol w() { return dependent("w"); }
inline Symbol theta() { return dependent("theta"); }
inline Symbol sigma() { return dependent("sigma"); }
}  // namespace sym

struct InvariantSet {
  VectorField generator;
  std::optional<Symbol> indep;  // variable of the reduced system, if any
  Expr similarity;              // indep as a function of (t, x)
  Expr x_of;                    // x as a function of (t, indep)
  std::vector<std::pair<std::string, Expr>> invariants;
  std::array<Symbol, 4> states{};
  std::array<Expr, 4> inverse;  // psi, n, rho, q in terms of states and (t, x)
};

/// V applied to e as a first-order operator, normalized.
inline Expr verify_invariant(const VectorField& v, const Expr& e) {
  return from_ratfunc(v.apply(to_ratfunc(e)));
}

namespace detail {

inline VectorField combo(const Expr& ct, const Expr& cx, const Expr& cs, const Expr& cd) {
  VectorField out;
  auto add = [&](const Expr& c, const VectorField& f) {
    if (!is_zero(c)) out = out + f.scaled(to_ratfunc(c));
  };
  add(ct, fields::dt());
  add(cx, fields::dx());
  add(cs, fields::scaling_rho_q());
  add(cd, fields::dilation());
  return out;
}

inline std::array<Symbol, 4> plain_states() { return {sym::psi(), sym::n(), sym::rho(), sym::q()}; }

// Translation c_t dt + c_x dx plus r S, with c_t != 0.
inline InvariantSet translation_family(const Expr& ct, const Expr& cx, const Expr& r) {
  const Expr t = sym::t(), x = sym::x(), y = sym::y();
  const Expr psi = sym::psi(), n = sym::n(), rho = sym::rho(), q = sym::q();
  const Expr a = cx / ct;
  InvariantSet s;
  s.generator = combo(ct, cx, r, Expr(0));
  s.indep = sym::y();
  s.similarity = normalize(x - a * t);
  s.x_of = normalize(y + a * t);
  s.invariants = {{"y", s.similarity}, {"psi", psi}, {"n", n}};
  if (is_zero(r)) {
    s.invariants.push_back({"rho", rho});
    s.invariants.push_back({"q", q});
    s.states = plain_states();
    s.inverse = {psi, n, rho, q};
  } else {
    const Expr rate = r / ct;
    const Expr sg = sym::sigma(), th = sym::theta();
    s.invariants.push_back({"sigma", rho * exp(-rate * t)});
    s.invariants.push_back({"theta", q / rho});
    s.states = {sym::psi(), sym::n(), sym::sigma(), sym::theta()};
    s.inverse = {psi, n, sg * exp(rate * t), th * sg * exp(rate * t)};
  }
  return s;
}

}  // namespace detail

/// Invariants of the catalog generator for an optimal-system entry, with a
/// the family parameter. `literature_form` uses the invariants as printed
/// in the source (y = t - a x for entry 4, w = rho t^a for entry 5,
/// y = x + a t for entry 6), kept for discrepancy reports.
inline InvariantSet catalog_invariants(int case_id, const Expr& a = Expr(0), bool literature_form = false) {
  const Expr t = sym::t(), x = sym::x(), y = sym::y();
  const Expr psi = sym::psi(), n = sym::n(), rho = sym::rho(), q = sym::q();
  InvariantSet s;
  switch (case_id) {
    case 1:
      s.generator = fields::dx();
      s.indep = sym::t();
      s.similarity = t;
      s.x_of = x;
      s.invariants = {{"t", t}, {"psi", psi}, {"n", n}, {"rho", rho}, {"q", q}};
      s.states = detail::plain_states();
      s.inverse = {psi, n, rho, q};
      return s;
    case 2:
      s.generator = fields::dt();
      s.indep = sym::x();
      s.similarity = x;
      s.x_of = x;
      s.invariants = {{"x", x}, {"psi", psi}, {"n", n}, {"rho", rho}, {"q", q}};
      s.states = detail::plain_states();
      s.inverse = {psi, n, rho, q};
      return s;
    case 3:
      s.generator = fields::dilation();
      s.indep = sym::y();
      s.similarity = x / t;
      s.x_of = y * t;
      s.invariants = {{"y", x / t}, {"alpha", n * t}, {"psi", psi}, {"rho", rho}, {"q", q}};
      s.states = {sym::psi(), sym::alpha(), sym::rho(), sym::q()};
      s.inverse = {psi, Expr(sym::alpha()) / t, rho, q};
      return s;
    case 4: {
      s = detail::translation_family(Expr(1), a, Expr(0));
      if (literature_form) {
        s.similarity = normalize(t - a * x);
        s.x_of = normalize((t - y) / a);
        s.invariants[0].second = s.similarity;
      }
      return s;
    }
    case 5: {
      const Expr e = literature_form ? a : -a;
      s.generator = detail::combo(Expr(0), Expr(0), a, Expr(1));
      s.indep = sym::y();
      s.similarity = x / t;
      s.x_of = y * t;
      s.invariants = {{"y", x / t}, {"beta", n * x}, {"w", rho * pow(t, e)}, {"theta", q / rho}, {"psi", psi}};
      s.states = {sym::psi(), sym::beta(), sym::w(), sym::theta()};
      const Expr w = sym::w(), th = sym::theta();
      s.inverse = {psi, Expr(sym::beta()) / x, w * pow(t, -e), th * w * pow(t, -e)};
      return s;
    }
    case 6: {
      s = detail::translation_family(Expr(1), a, Expr(1));
      if (literature_form) {
        s.similarity = normalize(x + a * t);
        s.x_of = normalize(y - a * t);
        s.invariants[0].second = s.similarity;
      }
      return s;
    }
    default:
      throw std::invalid_argument("no reduction catalog entry for case " + std::to_string(case_id) +
                                  ": the fluid system cannot be reduced by this generator");
  }
}

/// Invariants of a concrete generator by characteristic integration for the
/// supported families: translations, translations plus the rho-q scaling,
/// the dilation with an optional rho-q scaling, and the scaling alone.
inline InvariantSet invariants_of(const VectorField& v) {
  const auto basis = literature_basis(Theory::Eckart);  // dt, dx, S, D
  const auto c = coordinates(basis, v);
  if (!c) throw std::invalid_argument("unsupported generator: " + to_string(v));
  const Rational ct = (*c)[0], cx = (*c)[1], cs = (*c)[2], cd = (*c)[3];
  const Expr t = sym::t(), x = sym::x();
  const Expr psi = sym::psi(), n = sym::n(), rho = sym::rho(), q = sym::q();
  InvariantSet s;
  if (!is_zero(cd)) {
    if (!is_zero(ct) || !is_zero(cx)) throw std::invalid_argument("unsupported generator: " + to_string(v));
    s = catalog_invariants(is_zero(cs) ? 3 : 5, Expr(cs / cd));
    s.generator = v;
    return s;
  }
  if (!is_zero(ct)) {
    s = detail::translation_family(Expr(ct), Expr(cx), Expr(cs));
    s.generator = v;
    return s;
  }
  if (!is_zero(cx)) {
    s.generator = v;
    s.indep = sym::t();
    s.similarity = t;
    s.x_of = x;
    if (is_zero(cs)) {
      s = catalog_invariants(1);
      s.generator = v;
      return s;
    }
    const Expr rate = Expr(cs / cx);
    s.invariants = {{"t", t}, {"psi", psi}, {"n", n}, {"sigma", rho * exp(-rate * x)}, {"theta", q / rho}};
    s.states = {sym::psi(), sym::n(), sym::sigma(), sym::theta()};
    const Expr sg = sym::sigma(), th = sym::theta();
    s.inverse = {psi, n, sg * exp(rate * x), th * sg * exp(rate * x)};
    return s;
  }
  if (!is_zero(cs)) {
    // No similarity variable: both t and x are invariants.
    s.generator = v;
    s.invariants = {{"t", t}, {"x", x}, {"psi", psi}, {"n", n}, {"theta", q / rho}};
    return s;
  }
  throw std::invalid_argument("zero generator has no invariants");
}

/// Rank of the Jacobian of the invariants in (t, x, psi, n, rho, q) at a
/// point, by numeric elimination with threshold tol.
inline std::size_t jacobian_rank(const InvariantSet& s, const std::array<double, 6>& point,
                                 const std::map<std::string, double>& params = {}, double tol = 1e-8) {
  const auto vars = base_vars();
  NumericEnv env;
  for (int i = 0; i < 6; ++i) env.set(vars[i], point[i]);
  for (const auto& [k, v] : params) env.set(sym::parameter(k), v);
  std::vector<std::vector<double>> jac;
  for (const auto& [name, e] : s.invariants) {
    const RatFunc r = to_ratfunc(e);
    std::vector<double> row;
    for (Symbol v : vars) row.push_back(env.eval(diff(r, v.id())));
    jac.push_back(row);
  }
  std::size_t rank = 0;
  for (std::size_t col = 0; col < 6 && rank < jac.size(); ++col) {
    std::size_t p = rank;
    for (std::size_t r = rank; r < jac.size(); ++r) {
      if (std::abs(jac[r][col]) > std::abs(jac[p][col])) p = r;
    }
    if (std::abs(jac[p][col]) <= tol) continue;
    std::swap(jac[p], jac[rank]);
    for (std::size_t r = rank + 1; r < jac.size(); ++r) {
      const double f = jac[r][col] / jac[rank][col];
      for (std::size_t k = col; k < 6; ++k) jac[r][k] -= f * jac[rank][k];
    }
    ++rank;
  }
  return rank;
}

// ------------------------------------------------------------ reduced systems

struct ReducedSystem {
  int case_id = 0;
  Theory theory = Theory::Eckart;
  Rational a = 0;
  FluidParams params;
  InvariantSet inv;
  Symbol indep;
  std::vector<Symbol> states;
  std::vector<Symbol> derivs;
  std::array<Expr, 4> ansatz;         // psi, n, rho, q in terms of states and (t, x)
  std::vector<std::vector<Poly>> mass;  // mass * d(states) = force
  std::vector<Poly> force;
  std::vector<RatFunc> rhs;           // explicit derivatives
  RatFunc det;                        // singular locus: det = 0
  std::vector<std::pair<std::string, Expr>> relations;  // algebraic relations, for display
  std::vector<std::pair<std::string, Expr>> first_integrals;
  std::vector<std::string> constants;
  Rational t_ref = 0;                 // time slice on which (t, x) are reported
  int orientation = 1;                // +1: forward in indep; -1: forward in -indep
  std::string note;
};

inline const char* theory_label(Theory t) { return t == Theory::Eckart ? "Eckart" : "Israel-Stewart"; }

/// Throws for combinations outside the catalog, naming the reason.
inline void check_supported(int case_id, Theory theory) {
  if (case_id < 1 || case_id > 9) throw std::invalid_argument("case must be between 1 and 9");
  if (case_id >= 7) {
    throw std::invalid_argument("case " + std::to_string(case_id) +
                                " is not reduced: the fluid system cannot be reduced by this generator");
  }
  if (theory == Theory::IsraelStewart) {
    if (case_id == 3) {
      throw std::invalid_argument(
          "Israel-Stewart case 3 is not reduced: the reduced system is much more complicated and was not solved");
    }
    if (case_id == 4) {
      throw std::invalid_argument(
          "Israel-Stewart case 4 is not supported: the reduced system only has a complex velocity solution");
    }
    if (case_id >= 5) {
      throw std::invalid_argument("Israel-Stewart case " + std::to_string(case_id) +
                                  " is not supported: the generator is not in the Israel-Stewart optimal system");
    }
  }
}

inline Rational default_family_parameter(int case_id) {
  if (case_id == 4) return -1;
  if (case_id == 5 || case_id == 6) return make_rational(1, 2);
  return 0;
}

namespace detail {

struct AnsatzResult {
  std::array<RatFunc, 4> residuals;  // in (t, indep, states, derivs)
};

/// Substitutes an ansatz for (psi, n, rho, q) into the residuals, with the
/// states functions of the similarity variable, then eliminates x.
inline std::array<RatFunc, 4> apply_ansatz(const PDESystem& sys, const std::array<Expr, 4>& ansatz,
                                           const std::vector<Symbol>& states, Symbol indep,
                                           const Expr& similarity, const Expr& x_of) {
  const Symbol t = sym::t(), x = sym::x();
  const auto deps = dependent_vars();
  const auto tj = time_jets();
  const auto xj = space_jets();
  const RatFunc sim = to_ratfunc(similarity);
  const RatFunc yt = diff(sim, t.id()), yx = diff(sim, x.id());
  Subst sub;
  for (int k = 0; k < 4; ++k) {
    const RatFunc u = to_ratfunc(ansatz[k]);
    RatFunc ut = indep == t ? RatFunc() : diff(u, t.id());
    RatFunc ux = indep == x ? RatFunc() : diff(u, x.id());
    for (Symbol s : states) {
      const RatFunc du = diff(u, s.id());
      if (du.is_zero()) continue;
      const RatFunc sd(Poly::symbol(sym::jet(s, indep)));
      ut += du * sd * yt;
      ux += du * sd * yx;
    }
    sub[deps[k].id()] = u;
    sub[tj[k].id()] = ut;
    sub[xj[k].id()] = ux;
  }
  std::array<RatFunc, 4> out;
  for (int i = 0; i < 4; ++i) {
    out[i] = substitute(sys.normal[i], sub);
    if (indep != x && indep != t) out[i] = substitute(out[i], Subst{{x.id(), to_ratfunc(x_of)}});
  }
  return out;
}

inline void linear_split(const std::vector<Poly>& eqs, const std::vector<Symbol>& derivs,
                         std::vector<std::vector<Poly>>& mass, std::vector<Poly>& force) {
  Subst zero;
  for (Symbol d : derivs) zero.emplace(d.id(), RatFunc());
  mass.assign(eqs.size(), std::vector<Poly>(derivs.size()));
  force.assign(eqs.size(), Poly());
  for (std::size_t i = 0; i < eqs.size(); ++i) {
    for (std::size_t j = 0; j < derivs.size(); ++j) {
      const RatFunc c = diff(eqs[i], derivs[j].id());
      if (!c.is_poly()) throw std::logic_error("reduced equation is not polynomial in its derivatives");
      for (Symbol d : derivs) {
        if (depends_on(c.num, d.id())) throw std::logic_error("reduced equation is not linear in its derivatives");
      }
      mass[i][j] = c.num;
    }
    const RatFunc r = substitute(eqs[i], zero);
    force[i] = -r.as_poly();
  }
}

inline void explicit_form(ReducedSystem& rs) {
  const std::size_t m = rs.states.size();
  std::vector<std::vector<RatFunc>> mat(m, std::vector<RatFunc>(m));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) mat[i][j] = RatFunc(rs.mass[i][j]);
  }
  rs.det = determinant(mat);
  if (rs.det.is_zero()) {
    throw std::domain_error("characteristic degeneracy: the reduced system is singular for case " +
                            std::to_string(rs.case_id) + " with a = " + to_string(rs.a));
  }
  rs.rhs.clear();
  for (std::size_t c = 0; c < m; ++c) {
    auto mm = mat;
    for (std::size_t r = 0; r < m; ++r) mm[r][c] = RatFunc(rs.force[r]);
    rs.rhs.push_back(determinant(mm) / rs.det);
  }
}

inline std::vector<std::pair<std::string, Expr>> integrals_for(int case_id, const Expr& a) {
  const Expr psi = sym::psi(), n = sym::n(), rho = sym::rho(), q = sym::q(), y = sym::y();
  const Expr s = sinh(psi), c = cosh(psi);
  const Expr p = rho / 3;
  const Expr t00 = (rho + p) * c * c - p + 2 * q * s * c;
  const Expr t01 = (rho + p) * s * c + q * (s * s + c * c);
  const Expr t11 = (rho + p) * s * s + p + 2 * q * s * c;
  switch (case_id) {
    case 1:
      return {{"N", n * c}, {"T00", t00}, {"T01", t01}, {"E0", t00 - t01}};
    case 2:
      return {{"n sinh(psi)", n * s}, {"T01", t01}, {"T11", t11}};
    case 3:
      return {{"alpha (sinh(psi) + y cosh(psi))", Expr(sym::alpha()) * (s + y * c)}};
    case 4:
      return {{"n (sinh(psi) + a cosh(psi))", n * (s + a * c)}};
    case 5:
      return {{"beta (sinh(psi) + y cosh(psi))/y", Expr(sym::beta()) * (s + y * c) / y}};
    case 6:
      return {{"n (sinh(psi) + a cosh(psi))", n * (s + a * c)}};
    default:
      return {};
  }
}

}  // namespace detail

/// Catalog entry for (case, theory) with family parameter a.
inline ReducedSystem reduced_system(int case_id, Theory theory, const FluidParams& params,
                                    std::optional<Rational> a_opt = std::nullopt) {
  check_supported(case_id, theory);
  const Rational a = a_opt ? *a_opt : default_family_parameter(case_id);
  FluidParams p = params;
  p.lambda = theory == Theory::Eckart ? 0 : 1;
  const PDESystem sys = build_system(p);

  ReducedSystem rs;
  rs.case_id = case_id;
  rs.theory = theory;
  rs.a = a;
  rs.params = p;
  rs.inv = catalog_invariants(case_id, Expr(a));
  rs.indep = *rs.inv.indep;
  rs.ansatz = rs.inv.inverse;
  rs.first_integrals = detail::integrals_for(case_id, Expr(a));
  rs.constants = {"k", "kappa"};
  if (case_id == 1) rs.orientation = -1;
  if (case_id == 3 || case_id == 5) rs.t_ref = 1;

  const bool special4 = case_id == 4 && a == -1;
  if (special4) {
    // Along y = x + t the system is characteristic: rho is constant, the
    // number current fixes n = N0 exp(psi), and psi, q follow from the rest.
    const Expr psi = sym::psi(), rho = sym::rho(), q = sym::q();
    const Expr N0 = sym::parameter("N0");
    rs.states = {sym::psi(), sym::rho(), sym::q()};
    rs.ansatz = {psi, N0 * exp(psi), rho, q};
    rs.constants.push_back("N0");
    const Expr K = 2 * p.kappa_expr() / (3 * p.k_expr() * N0);
    for (Symbol s : rs.states) rs.derivs.push_back(sym::jet(s, rs.indep));
    const Poly kr = to_ratfunc(K * rho).as_poly();
    rs.mass = {{kr, Poly(), Poly()},
               {Poly(), Poly(1), Poly()},
               {-to_ratfunc(2 * q - rat(4, 3) * rho).as_poly(), Poly(), Poly(1)}};
    rs.force = {to_ratfunc(q * exp(2 * psi)).as_poly(), Poly(), Poly()};
    rs.relations = {{"n", N0 * exp(psi)}, {"rho_y", Expr(0)}};
    rs.first_integrals = {{"q - 2 rho/3 - C exp(2 psi)", (q - 2 * rho / 3) * exp(-2 * psi)}};
    detail::explicit_form(rs);
    return rs;
  }

  rs.states.assign(rs.inv.states.begin(), rs.inv.states.end());
  for (Symbol s : rs.states) rs.derivs.push_back(sym::jet(s, rs.indep));
  const auto full = detail::apply_ansatz(sys, rs.ansatz, rs.states, rs.indep, rs.inv.similarity, rs.inv.x_of);
  std::vector<Poly> eqs;
  for (const RatFunc& r : full) {
    RatFunc e = r;
    if (rs.indep != sym::t()) e = substitute(e, Subst{{sym::t().id(), RatFunc(rs.t_ref)}});
    eqs.push_back(e.num);
  }
  detail::linear_split(eqs, rs.derivs, rs.mass, rs.force);
  detail::explicit_form(rs);
  if (case_id == 3) rs.relations = {{"alpha", Expr(sym::parameter("N0")) / (sinh(Expr(sym::psi())) + Expr(sym::y()) * cosh(Expr(sym::psi())))}};
  return rs;
}

inline ReducedSystem reduced_system(int case_id, Theory theory) {
  return reduced_system(case_id, theory, FluidParams::for_theory(theory));
}

/// Reduced equations in implicit form, for display.
inline std::vector<Expr> reduced_equations(const ReducedSystem& rs) {
  std::vector<Expr> out;
  for (std::size_t i = 0; i < rs.force.size(); ++i) {
    RatFunc e = RatFunc(-rs.force[i]);
    for (std::size_t j = 0; j < rs.derivs.size(); ++j) {
      e += RatFunc(rs.mass[i][j]) * RatFunc(Poly::symbol(rs.derivs[j]));
    }
    out.push_back(from_ratfunc(e));
  }
  return out;
}

struct ReductionCheck {
  int case_id = 0;
  Theory theory = Theory::Eckart;
  std::string variant;  // "corrected" or "literature"
  std::array<Expr, 4> residuals;
  bool zero = false;
  std::vector<std::pair<std::string, bool>> integrals;
};

namespace detail {

inline bool all_zero(const std::array<Expr, 4>& r) {
  for (const Expr& e : r) {
    if (!is_zero(e)) return false;
  }
  return true;
}

inline Subst derivative_subst(const ReducedSystem& rs) {
  Subst s;
  for (std::size_t j = 0; j < rs.derivs.size(); ++j) s.emplace(rs.derivs[j].id(), rs.rhs[j]);
  return s;
}

}  // namespace detail

/// Substitutes the ansatz into the full residuals for all t, eliminates the
/// state derivatives with the catalog right-hand side and normalizes.
inline ReductionCheck symbolic_check_reduction(const ReducedSystem& rs) {
  ReductionCheck out;
  out.case_id = rs.case_id;
  out.theory = rs.theory;
  out.variant = "corrected";
  const PDESystem sys = build_system(rs.params);
  const auto full = detail::apply_ansatz(sys, rs.ansatz, rs.states, rs.indep, rs.inv.similarity, rs.inv.x_of);
  const Subst ds = detail::derivative_subst(rs);
  for (int i = 0; i < 4; ++i) out.residuals[i] = from_ratfunc(substitute(full[i], ds));
  out.zero = detail::all_zero(out.residuals);
  for (const auto& [name, e] : rs.first_integrals) {
    const RatFunc f = to_ratfunc(e);
    RatFunc d = diff(f, rs.indep.id());
    for (std::size_t j = 0; j < rs.states.size(); ++j) d += diff(f, rs.states[j].id()) * rs.rhs[j];
    out.integrals.push_back({name, d.is_zero()});
  }
  return out;
}

inline ReductionCheck symbolic_check_reduction(int case_id, Theory theory) {
  return symbolic_check_reduction(reduced_system(case_id, theory));
}

struct LiteratureCheck {
  int case_id = 0;
  // Literature invariants under the catalog generator with symbolic a.
  std::vector<std::pair<std::string, Expr>> annihilation;
  bool annihilated = false;
  // The literature ansatz reduced on its own, checked for all t at a.
  std::array<Expr, 4> residuals;
  bool reduction_consistent = false;
};

/// Checks the literature form of the invariants (y = t - a x, w = rho t^a,
/// y = x + a t): annihilation by the stated generator, and whether the
/// ansatz still gives a consistent reduction at the given a.
inline LiteratureCheck literature_variant_check(int case_id, const Rational& a) {
  if (case_id < 4 || case_id > 6) throw std::invalid_argument("only cases 4 to 6 have a literature variant");
  LiteratureCheck out;
  out.case_id = case_id;
  const Expr as = sym::parameter("a");
  const InvariantSet sym_lit = catalog_invariants(case_id, as, true);
  const VectorField gen = catalog_invariants(case_id, as).generator;
  out.annihilated = true;
  for (const auto& [name, e] : sym_lit.invariants) {
    const Expr r = verify_invariant(gen, e);
    out.annihilation.push_back({name, r});
    if (!is_zero(r)) out.annihilated = false;
  }

  FluidParams p = FluidParams::for_theory(Theory::Eckart);
  const PDESystem sys = build_system(p);
  const InvariantSet lit = catalog_invariants(case_id, Expr(a), true);
  ReducedSystem rs;
  rs.case_id = case_id;
  rs.a = a;
  rs.params = p;
  rs.inv = lit;
  rs.indep = *lit.indep;
  rs.ansatz = lit.inverse;
  rs.states.assign(lit.states.begin(), lit.states.end());
  for (Symbol s : rs.states) rs.derivs.push_back(sym::jet(s, rs.indep));
  rs.t_ref = case_id == 5 ? 1 : 0;
  const auto full = detail::apply_ansatz(sys, rs.ansatz, rs.states, rs.indep, lit.similarity, lit.x_of);
  std::vector<Poly> eqs;
  for (const RatFunc& r : full) eqs.push_back(substitute(r, Subst{{sym::t().id(), RatFunc(rs.t_ref)}}).num);
  detail::linear_split(eqs, rs.derivs, rs.mass, rs.force);
  detail::explicit_form(rs);
  const Subst ds = detail::derivative_subst(rs);
  for (int i = 0; i < 4; ++i) out.residuals[i] = from_ratfunc(substitute(full[i], ds));
  out.reduction_consistent = detail::all_zero(out.residuals);
  return out;
}

// --------------------------------------------------------------- numerics

/// Numeric right-hand side d(state)/ds in the integration variable
/// s = orientation * indep.
class NumericSystem {
 public:
  explicit NumericSystem(const ReducedSystem& rs) : rs_(&rs) {
    inputs_.push_back(rs.indep);
    for (Symbol s : rs.states) inputs_.push_back(s);
    for (const char* c : {"k", "kappa", "N0", "E0"}) inputs_.push_back(sym::parameter(c));
    std::vector<Poly> polys;
    for (const auto& row : rs.mass) polys.insert(polys.end(), row.begin(), row.end());
    polys.insert(polys.end(), rs.force.begin(), rs.force.end());
    polys.push_back(rs.det.num);
    polys.push_back(rs.det.den);
    prog_ = CompiledPolys(polys, inputs_);
    // Physical variables on the reference slice.
    Subst slice;
    if (rs.indep != sym::t()) slice.emplace(sym::t().id(), RatFunc(rs.t_ref));
    if (rs.indep != sym::x()) slice.emplace(sym::x().id(), substitute(to_ratfunc(rs.inv.x_of), slice));
    std::vector<RatFunc> phys;
    for (const Expr& e : rs.ansatz) phys.push_back(substitute(to_ratfunc(e), slice));
    physical_ = CompiledRatFuncs(phys, inputs_);
    consts_ = {rs.params.k_value(), rs.params.kappa_value(), rs.params.N0, rs.params.E0};
  }

  std::size_t dim() const { return rs_->states.size(); }
  int orientation() const { return rs_->orientation; }
  const ReducedSystem& system() const { return *rs_; }

  /// Independent variable value at integration parameter s.
  double indep_at(double s) const { return rs_->orientation * s; }

  std::vector<double> operator()(double s, const std::vector<double>& z) const {
    const std::size_t m = dim();
    const std::vector<double> raw = prog_.eval(pack(indep_at(s), z));
    std::vector<std::vector<double>> a(m, std::vector<double>(m + 1));
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < m; ++j) a[i][j] = raw[i * m + j];
      a[i][m] = raw[m * m + i];
    }
    double scale = 0;
    for (const auto& r : a) {
      for (std::size_t j = 0; j < m; ++j) scale = std::max(scale, std::abs(r[j]));
    }
    for (std::size_t c = 0; c < m; ++c) {
      std::size_t p = c;
      for (std::size_t r = c + 1; r < m; ++r) {
        if (std::abs(a[r][c]) > std::abs(a[p][c])) p = r;
      }
      if (!(std::abs(a[p][c]) > 1e-13 * scale)) throw std::domain_error("singular reduced system");
      std::swap(a[p], a[c]);
      for (std::size_t r = c + 1; r < m; ++r) {
        const double f = a[r][c] / a[c][c];
        for (std::size_t k = c; k <= m; ++k) a[r][k] -= f * a[c][k];
      }
    }
    std::vector<double> out(m);
    for (std::size_t c = m; c-- > 0;) {
      double v = a[c][m];
      for (std::size_t k = c + 1; k < m; ++k) v -= a[c][k] * out[k];
      out[c] = v / a[c][c];
    }
    for (double& v : out) v *= rs_->orientation;
    return out;
  }

  /// Value of the singular-locus determinant.
  double singular_value(double s, const std::vector<double>& z) const {
    const std::vector<double> raw = prog_.eval(pack(indep_at(s), z));
    const std::size_t m = dim();
    return raw[m * m + m] / raw[m * m + m + 1];
  }

  /// (psi, n, rho, q) on the reference slice.
  std::array<double, 4> physical(double s, const std::vector<double>& z) const {
    const auto v = physical_.eval(pack(indep_at(s), z));
    return {v[0], v[1], v[2], v[3]};
  }

 private:
  std::vector<double> pack(double y, const std::vector<double>& z) const {
    std::vector<double> in;
    in.reserve(inputs_.size());
    in.push_back(y);
    in.insert(in.end(), z.begin(), z.end());
    in.insert(in.end(), consts_.begin(), consts_.end());
    return in;
  }

  const ReducedSystem* rs_;
  std::vector<Symbol> inputs_;
  CompiledPolys prog_;
  CompiledRatFuncs physical_;
  std::array<double, 4> consts_{};
};

struct InitialData {
  double y0 = 0;  // independent variable
  std::vector<double> state;
};

/// Optional physical overrides for the default initial state.
struct InitialOverrides {
  std::optional<double> n0, rho0, q0, y0;
};

/// Initial state from v0: n0 = N0, rho0 = 3 E0, q0 = -2 E0 unless
/// overridden, mapped to the invariants of the case on the reference slice.
inline InitialData initial_state(const ReducedSystem& rs, double v0, const InitialOverrides& o = {}) {
  if (!(std::abs(v0) < 1)) throw std::invalid_argument("initial velocity must satisfy |v0| < 1");
  const double psi = std::atanh(v0);
  const double N0 = rs.params.N0, E0 = rs.params.E0;
  const double rho = o.rho0.value_or(3 * E0);
  const double q = o.q0.value_or(-2 * E0);
  if (!(rho > 0)) throw std::invalid_argument("rho0 must be positive");
  InitialData d;
  d.y0 = o.y0.value_or(rs.case_id == 5 ? 0.1 : 0.0);
  const double y = d.y0;
  const double sh = std::sinh(psi), ch = std::cosh(psi);
  switch (rs.case_id) {
    case 1:
    case 2:
      d.state = {psi, o.n0.value_or(N0), rho, q};
      break;
    case 3: {
      const double den = sh + y * ch;
      if (!o.n0 && std::abs(den) < 1e-12) throw std::domain_error("initial point on the singular locus");
      d.state = {psi, o.n0 ? *o.n0 : N0 / den, rho, q};
      break;
    }
    case 4:
      if (rs.states.size() == 3) {
        d.state = {psi, rho, q};
      } else {
        d.state = {psi, o.n0.value_or(N0), rho, q};
      }
      break;
    case 5: {
      const double den = sh + y * ch;
      if (!o.n0 && std::abs(den) < 1e-12) throw std::domain_error("initial point on the singular locus");
      // n = beta/x with x = y on the slice t = 1.
      d.state = {psi, o.n0 ? *o.n0 * y : N0 * y / den, rho, q / rho};
      break;
    }
    case 6:
      d.state = {psi, o.n0.value_or(N0), rho, q / rho};
      break;
    default:
      throw std::invalid_argument("no initial data for case " + std::to_string(rs.case_id));
  }
  return d;
}

// ------------------------------------------------------- case-4 closed forms

struct ClosedFormPoint {
  FluidState state;
  double v = 0, v_y = 0;
};

/// The literature closed form along y = x + t with
/// S = sqrt(kappa C1/(k N0)): exp(psi) = S tanh(S (y - C2)), n = N0 exp(psi),
/// rho = rho0, q = (2 kappa/(3 k N0)) rho v_y/(1 + v)^2.
inline ClosedFormPoint closed_form_case4(const FluidParams& p, double C1, double C2, double rho0, double y) {
  const double k = p.k_value(), kappa = p.kappa_value(), N0 = p.N0;
  const double S2 = kappa * C1 / (k * N0);
  if (!(S2 > 0)) throw std::domain_error("closed form requires kappa C1/(k N0) > 0");
  const double S = std::sqrt(S2);
  const double th = std::tanh(S * (y - C2));
  const double u = S * th;
  if (!(u > 0) || !std::isfinite(u)) throw std::domain_error("closed form is singular at this y");
  const double du = S2 * (1 - th * th);
  ClosedFormPoint out;
  out.v = (u * u - 1) / (u * u + 1);
  out.v_y = 4 * u / ((u * u + 1) * (u * u + 1)) * du;
  out.state.psi = std::log(u);
  out.state.n = N0 * std::sqrt((1 + out.v) / (1 - out.v));
  out.state.rho = rho0;
  out.state.q = 2 * kappa / (3 * k * N0) * rho0 * out.v_y / ((1 + out.v) * (1 + out.v));
  return out;
}

/// Jets of the closed form along y = x + t (both derivatives equal d/dy).
inline Jets closed_form_case4_jets(const FluidParams& p, double C1, double C2, double rho0, double y) {
  const double h = 1e-5 * std::max(1.0, std::abs(y));
  const auto a = closed_form_case4(p, C1, C2, rho0, y - h);
  const auto b = closed_form_case4(p, C1, C2, rho0, y + h);
  Jets j;
  j.psi_t = j.psi_x = (b.state.psi - a.state.psi) / (2 * h);
  j.n_t = j.n_x = (b.state.n - a.state.n) / (2 * h);
  j.q_t = j.q_x = (b.state.q - a.state.q) / (2 * h);
  return j;
}

/// Exact quadrature of the a = -1 system: with u = exp(psi),
/// u' = A u^3 + C u^5, A = k N0/kappa, C = (q - 2 rho/3)/(K rho u^2) fixed by
/// the initial point, and G(u) - G(u0) = y - y0 where
/// G(u) = -1/(2 A u^2) + C/(2 A^2) ln|(A + C u^2)/u^2|.
struct Case4Quadrature {
  double A = 0, C = 0, G0 = 0, y0 = 0;

  static Case4Quadrature from_initial(const FluidParams& p, double y0, double psi0, double rho0, double q0) {
    const double k = p.k_value(), kappa = p.kappa_value(), N0 = p.N0;
    const double K = 2 * kappa / (3 * k * N0);
    Case4Quadrature c;
    c.A = k * N0 / kappa;
    const double u0 = std::exp(psi0);
    c.C = (q0 - 2 * rho0 / 3) / (u0 * u0) / (K * rho0);
    c.y0 = y0;
    c.G0 = c.G(u0);
    return c;
  }
  double G(double u) const {
    const double base = -1 / (2 * A * u * u);
    if (C == 0) return base;
    return base + C / (2 * A * A) * std::log(std::abs((A + C * u * u) / (u * u)));
  }
  /// Residual of the implicit relation at (y, psi).
  double residual(double y, double psi) const { return G(std::exp(psi)) - G0 - (y - y0); }
};

}  // namespace rhsym

#pragma once

// Point symmetries: vector fields, first prolongation, determining
// equations and their exact solution over a polynomial ansatz.

#include <algorithm>
#include <array>
#include <functional>
#include <future>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "rhsym/fluid.hpp"
#include "rhsym/linalg.hpp"

namespace rhsym {

/// Variables in coefficient order: t, x, psi, n, rho, q.
inline std::array<Symbol, 6> base_vars() {
  return {sym::t(), sym::x(), sym::psi(), sym::n(), sym::rho(), sym::q()};
}

/// tau d/dt + xi d/dx + Phi d/dpsi + Sigma d/dn + Gamma d/drho + Omega d/dq.
struct VectorField {
  std::array<RatFunc, 6> coef;  // tau, xi, Phi, Sigma, Gamma, Omega

  VectorField() = default;
  static VectorField from_exprs(const std::array<Expr, 6>& e) {
    VectorField v;
    for (int i = 0; i < 6; ++i) v.coef[i] = to_ratfunc(e[i]);
    return v;
  }
  static VectorField unit(int var) {
    VectorField v;
    v.coef[var] = RatFunc(1);
    return v;
  }

  const RatFunc& tau() const { return coef[0]; }
  const RatFunc& xi() const { return coef[1]; }
  Expr expr(int i) const { return from_ratfunc(coef[i]); }

  bool is_zero() const {
    return std::all_of(coef.begin(), coef.end(), [](const RatFunc& r) { return r.is_zero(); });
  }
  friend bool operator==(const VectorField& a, const VectorField& b) {
    for (int i = 0; i < 6; ++i) {
      if (!equal(a.coef[i], b.coef[i])) return false;
    }
    return true;
  }

  VectorField operator+(const VectorField& o) const {
    VectorField r;
    for (int i = 0; i < 6; ++i) r.coef[i] = coef[i] + o.coef[i];
    return r;
  }
  VectorField scaled(const RatFunc& s) const {
    VectorField r;
    for (int i = 0; i < 6; ++i) r.coef[i] = coef[i] * s;
    return r;
  }

  /// Action on a function as a first-order differential operator.
  RatFunc apply(const RatFunc& f) const {
    const auto vars = base_vars();
    RatFunc out;
    for (int i = 0; i < 6; ++i) {
      if (coef[i].is_zero()) continue;
      const RatFunc d = diff(f, vars[i].id());
      if (!d.is_zero()) out += coef[i] * d;
    }
    return out;
  }
  Expr apply(const Expr& f) const { return from_ratfunc(apply(to_ratfunc(f))); }
};

/// Text form such as "t*d/dt + x*d/dx - n*d/dn".
inline std::string to_string(const VectorField& v) {
  static const char* names[] = {"t", "x", "psi", "n", "rho", "q"};
  std::string out;
  for (int i = 0; i < 6; ++i) {
    if (v.coef[i].is_zero()) continue;
    Expr e = v.expr(i);
    std::string body;
    bool neg = false;
    if (e.is_num()) {
      neg = sgn(e.value()) < 0;
      const Rational a = abs(e.value());
      body = is_one(a) ? "" : to_string(a) + "*";
    } else {
      if (detail::negative_factor(e)) {
        neg = true;
        e = -e;
      }
      const std::string s = to_string(e);
      body = (e.op() == Op::Add ? "(" + s + ")" : s) + "*";
    }
    if (out.empty()) {
      out += neg ? "-" : "";
    } else {
      out += neg ? " - " : " + ";
    }
    out += body + "d/d" + names[i];
  }
  return out.empty() ? "0" : out;
}

struct ProlongedField {
  VectorField base;
  // Jet coefficient per first-order jet symbol.
  std::map<AtomId, RatFunc> jet;
};

/// u^d = D_d(Phi_u) - u_x D_d(xi) - u_t D_d(tau).
inline ProlongedField prolong1(const VectorField& v) {
  ProlongedField p;
  p.base = v;
  const auto dep = dependent_vars();
  const Symbol t = sym::t(), x = sym::x();
  const std::array<Symbol, 2> dirs = {t, x};
  for (Symbol d : dirs) {
    const RatFunc dtau = total_derivative(v.tau(), d);
    const RatFunc dxi = total_derivative(v.xi(), d);
    for (int u = 0; u < 4; ++u) {
      RatFunc c = total_derivative(v.coef[2 + u], d);
      c -= RatFunc(Poly::symbol(sym::jet(dep[u], x))) * dxi;
      c -= RatFunc(Poly::symbol(sym::jet(dep[u], t))) * dtau;
      p.jet[sym::jet(dep[u], d).id()] = std::move(c);
    }
  }
  return p;
}

/// Difference between the full formula D_d(Phi_u - xi u_x - tau u_t) +
/// xi u_xd + tau u_td and the reduced one; zero when the second-order jets
/// cancel.
inline std::vector<RatFunc> second_order_defect(const VectorField& v) {
  const ProlongedField p = prolong1(v);
  const auto dep = dependent_vars();
  const Symbol t = sym::t(), x = sym::x();
  std::vector<RatFunc> out;
  for (Symbol d : {t, x}) {
    for (int u = 0; u < 4; ++u) {
      const RatFunc ux(Poly::symbol(sym::jet(dep[u], x)));
      const RatFunc ut(Poly::symbol(sym::jet(dep[u], t)));
      const RatFunc inner = v.coef[2 + u] - v.xi() * ux - v.tau() * ut;
      RatFunc full = total_derivative(inner, d);
      full += v.xi() * RatFunc(Poly::symbol(sym::jet(sym::jet(dep[u], x), d)));
      full += v.tau() * RatFunc(Poly::symbol(sym::jet(sym::jet(dep[u], t), d)));
      out.push_back(full - p.jet.at(sym::jet(dep[u], d).id()));
    }
  }
  return out;
}

/// pr1 V applied to a function of variables and first-order jets.
inline RatFunc apply_prolonged(const ProlongedField& p, const RatFunc& f) {
  RatFunc out = p.base.apply(f);
  for (const auto& [j, c] : p.jet) {
    if (c.is_zero()) continue;
    const RatFunc d = diff(f, j);
    if (!d.is_zero()) out += c * d;
  }
  return out;
}

namespace detail {

/// Homogenized on-shell substitution: for F polynomial in the time jets of
/// degree at most `degree`, returns det^degree * F with u_t = numer/det.
class OnShell {
 public:
  OnShell(const TimeForm& tf, int degree) : tf_(tf), degree_(degree) {
    for (int i = 0; i < 4; ++i) index_[tf.jets[i].id()] = i;
  }

  int degree() const { return degree_; }

  Poly apply(const Poly& f) {
    std::unordered_map<Monomial, Rational, MonomialHash> acc;
    for (const auto& [m, c] : f.terms) {
      Monomial rest;
      std::vector<int> jets;
      for (auto [a, e] : m) {
        auto it = index_.find(a);
        if (it == index_.end()) {
          rest.emplace_back(a, e);
          continue;
        }
        if (e < 0) throw std::invalid_argument("time jet in a denominator");
        for (int k = 0; k < e; ++k) jets.push_back(it->second);
      }
      if (static_cast<int>(jets.size()) > degree_) {
        throw std::invalid_argument("time-jet degree exceeds the homogenization degree");
      }
      const Poly& q = factor(jets);
      for (const auto& [qm, qc] : q.terms) {
        auto [it, fresh] = acc.try_emplace(mono_mul(rest, qm), 0);
        it->second += c * qc;
      }
    }
    std::vector<Poly::Term> raw;
    for (auto& [m, c] : acc) {
      if (!rhsym::is_zero(c)) raw.emplace_back(m, c);
    }
    return Poly::from_terms(std::move(raw));
  }

 private:
  const Poly& factor(std::vector<int> jets) {
    std::sort(jets.begin(), jets.end());
    auto it = cache_.find(jets);
    if (it != cache_.end()) return it->second;
    Poly q = pow(tf_.det, static_cast<unsigned>(degree_ - static_cast<int>(jets.size())));
    for (int j : jets) q = q * tf_.numer[j];
    return cache_.emplace(jets, std::move(q)).first->second;
  }

  const TimeForm& tf_;
  int degree_;
  std::map<AtomId, int> index_;
  std::map<std::vector<int>, Poly> cache_;
};

inline int time_jet_degree(const Poly& f, const TimeForm& tf) {
  int best = 0;
  for (const auto& [m, c] : f.terms) {
    int d = 0;
    for (auto [a, e] : m) {
      if (std::find(tf.jets.begin(), tf.jets.end(), Symbol(a)) != tf.jets.end()) d += e;
    }
    best = std::max(best, d);
  }
  return best;
}

}  // namespace detail

/// On-shell value of a Laurent polynomial in variables and jets.
inline RatFunc on_shell(const RatFunc& f, const TimeForm& tf) {
  if (!f.is_poly()) throw std::invalid_argument("on-shell substitution expects a polynomial");
  const int deg = detail::time_jet_degree(f.num, tf);
  if (deg == 0) return f;
  detail::OnShell os(tf, deg);
  return RatFunc(os.apply(f.num), pow(tf.det, static_cast<unsigned>(deg)));
}

/// On-shell prolonged action per residual; all zero iff V is a symmetry.
inline std::array<RatFunc, 4> verify_symmetry(const VectorField& v, const PDESystem& sys,
                                              const TimeForm& tf) {
  const ProlongedField p = prolong1(v);
  std::array<RatFunc, 4> out;
  for (int i = 0; i < 4; ++i) out[i] = on_shell(apply_prolonged(p, sys.normal[i]), tf);
  return out;
}

inline std::array<RatFunc, 4> verify_symmetry(const VectorField& v, const PDESystem& sys) {
  return verify_symmetry(v, sys, quasilinear_time_form(sys));
}

inline bool is_symmetry(const VectorField& v, const PDESystem& sys) {
  const auto r = verify_symmetry(v, sys);
  return std::all_of(r.begin(), r.end(), [](const RatFunc& x) { return x.is_zero(); });
}

/// Polynomial ansatz: one unknown constant per (coefficient function,
/// monomial in t, x, psi, n, rho, q of degree <= degree).
struct Ansatz {
  int degree = 1;
  std::vector<Monomial> monomials;
  std::vector<Symbol> unknowns;  // index f * monomials.size() + j

  explicit Ansatz(int deg = 1) : degree(deg) {
    if (deg < 0) throw std::invalid_argument("ansatz degree must be nonnegative");
    const auto vars = base_vars();
    std::vector<Monomial> cur = {Monomial{}};
    monomials.push_back({});
    for (int d = 1; d <= deg; ++d) {
      std::vector<Monomial> next;
      for (const Monomial& m : cur) {
        // Extend by variables not preceding the last one to avoid repeats.
        std::size_t start = 0;
        if (!m.empty()) {
          for (std::size_t i = 0; i < vars.size(); ++i) {
            for (auto [a, e] : m) {
              if (a == vars[i].id()) start = i;
            }
          }
        }
        for (std::size_t i = start; i < vars.size(); ++i) next.push_back(mono_mul(m, {{vars[i].id(), 1}}));
      }
      monomials.insert(monomials.end(), next.begin(), next.end());
      cur = std::move(next);
    }
    for (std::size_t i = 0; i < 6 * monomials.size(); ++i) unknowns.push_back(sym::unknown(static_cast<long>(i + 1)));
  }

  std::size_t size() const { return unknowns.size(); }

  /// The field contributed by unknown i alone.
  VectorField field(std::size_t i) const {
    VectorField v;
    v.coef[i / monomials.size()] = RatFunc(Poly::term(1, monomials[i % monomials.size()]));
    return v;
  }

  /// Field for a vector of constant values.
  VectorField field(const RVector& c) const {
    VectorField v;
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (is_zero(c[i])) continue;
      v = v + field(i).scaled(RatFunc(c[i]));
    }
    return v;
  }

  /// Generic field with the unknown symbols as coefficients.
  VectorField generic() const {
    VectorField v;
    for (std::size_t i = 0; i < size(); ++i) v = v + field(i).scaled(RatFunc(Poly::symbol(unknowns[i])));
    return v;
  }
};

struct DeterminingSystem {
  RMatrix rows;        // one linear form per collected coefficient
  std::size_t unknowns = 0;
  std::string cleared;  // description of the cleared denominator
  std::vector<std::string> labels;  // equation index and monomial per row
};

/// Determining equations: prolonged action of each ansatz term, on-shell
/// substitution homogenized by det^2, collection over all monomials.
/// Rows are linear forms in the ansatz unknowns.
inline DeterminingSystem determining_equations(const PDESystem& sys, const Ansatz& ansatz) {
  const TimeForm tf = quasilinear_time_form(sys);
  // Second-order cancellation, checked once on the generic field.
  for (const RatFunc& d : second_order_defect(ansatz.generic())) {
    if (!d.is_zero()) throw std::logic_error("second-order jets do not cancel in the prolongation");
  }
  const std::size_t nu = ansatz.size();
  std::vector<std::array<Poly, 4>> images(nu);
  int degree = 0;
  auto work = [&](std::size_t i) {
    const ProlongedField p = prolong1(ansatz.field(i));
    std::array<Poly, 4> img;
    for (int e = 0; e < 4; ++e) {
      const RatFunc r = apply_prolonged(p, sys.normal[e]);
      if (!r.is_poly()) throw std::logic_error("prolonged residual is not a Laurent polynomial");
      img[e] = r.num;
    }
    return img;
  };
  {
    std::vector<std::future<std::array<Poly, 4>>> jobs;
    for (std::size_t i = 0; i < nu; ++i) jobs.push_back(std::async(std::launch::async, work, i));
    for (std::size_t i = 0; i < nu; ++i) images[i] = jobs[i].get();
  }
  for (const auto& img : images) {
    for (const Poly& p : img) degree = std::max(degree, detail::time_jet_degree(p, tf));
  }
  std::vector<std::array<Poly, 4>> shell(nu);
  {
    auto project = [&](std::size_t i) {
      detail::OnShell os(tf, degree);
      std::array<Poly, 4> out;
      for (int e = 0; e < 4; ++e) out[e] = os.apply(images[i][e]);
      return out;
    };
    std::vector<std::future<std::array<Poly, 4>>> jobs;
    for (std::size_t i = 0; i < nu; ++i) jobs.push_back(std::async(std::launch::async, project, i));
    for (std::size_t i = 0; i < nu; ++i) shell[i] = jobs[i].get();
  }
  std::map<std::pair<int, Monomial>, RVector> table;
  for (std::size_t i = 0; i < nu; ++i) {
    for (int e = 0; e < 4; ++e) {
      for (const auto& [m, c] : shell[i][e].terms) {
        auto [it, fresh] = table.try_emplace({e, m}, RVector(nu, Rational(0)));
        it->second[i] += c;
      }
    }
  }
  DeterminingSystem ds;
  ds.unknowns = nu;
  ds.cleared = "det^" + std::to_string(degree) + " with det = " + to_string(tf.det);
  for (auto& [key, row] : table) {
    if (std::all_of(row.begin(), row.end(), [](const Rational& r) { return is_zero(r); })) continue;
    ds.labels.push_back("D" + std::to_string(key.first + 1) + ": " +
                        (key.second.empty() ? std::string("1") : detail::monomial_body(key.second)));
    ds.rows.push_back(std::move(row));
  }
  return ds;
}

/// Sorting key placing translations first: (number of nonzero coefficient
/// functions, number of nonconstant ones, first nonzero index).
inline std::tuple<int, int, int> field_order_key(const VectorField& v) {
  int nz = 0, nc = 0, first = 6;
  for (int i = 0; i < 6; ++i) {
    if (v.coef[i].is_zero()) continue;
    ++nz;
    if (!v.coef[i].is_constant()) ++nc;
    first = std::min(first, i);
  }
  return {nz, nc, first};
}

/// Symmetry basis within the ansatz. Symbolic k and kappa are instantiated
/// at (1, 1) and (2/3, 3/5) and the nullspaces intersected.
inline std::vector<VectorField> solve_determining(const PDESystem& sys, const Ansatz& ansatz) {
  std::vector<FluidParams> points;
  if (sys.params.k && sys.params.kappa) {
    points.push_back(sys.params);
  } else {
    for (auto [k, kappa] : {std::pair{make_rational(1), make_rational(1)},
                            std::pair{make_rational(2, 3), make_rational(3, 5)}}) {
      FluidParams p = sys.params;
      if (!p.k) p.k = k;
      if (!p.kappa) p.kappa = kappa;
      points.push_back(p);
    }
  }
  RMatrix span;
  bool first = true;
  for (const FluidParams& p : points) {
    const DeterminingSystem ds = determining_equations(build_system(p), ansatz);
    RMatrix ns = nullspace(ds.rows, ds.unknowns);
    span = first ? ns : intersect(span, ns, ansatz.size());
    first = false;
  }
  rref(span, ansatz.size());
  std::vector<VectorField> basis;
  for (const RVector& v : span) basis.push_back(ansatz.field(v));
  std::stable_sort(basis.begin(), basis.end(), [](const VectorField& a, const VectorField& b) {
    return field_order_key(a) < field_order_key(b);
  });
  return basis;
}

/// Coordinates of fields over a fixed ansatz, for span comparisons.
inline RVector ansatz_coordinates(const VectorField& v, const Ansatz& ansatz) {
  RVector out(ansatz.size(), Rational(0));
  const std::size_t nm = ansatz.monomials.size();
  for (int f = 0; f < 6; ++f) {
    if (v.coef[f].is_zero()) continue;
    if (!v.coef[f].is_poly()) throw std::invalid_argument("field outside the ansatz");
    for (const auto& [m, c] : v.coef[f].num.terms) {
      auto it = std::find(ansatz.monomials.begin(), ansatz.monomials.end(), m);
      if (it == ansatz.monomials.end()) throw std::invalid_argument("field outside the ansatz");
      out[f * nm + static_cast<std::size_t>(it - ansatz.monomials.begin())] = c;
    }
  }
  return out;
}

/// Exact span equality of two families of fields.
inline bool same_span(const std::vector<VectorField>& a, const std::vector<VectorField>& b,
                      const Ansatz& ansatz) {
  RMatrix ma, mb, both;
  for (const auto& v : a) ma.push_back(ansatz_coordinates(v, ansatz));
  for (const auto& v : b) mb.push_back(ansatz_coordinates(v, ansatz));
  both = ma;
  both.insert(both.end(), mb.begin(), mb.end());
  const std::size_t n = ansatz.size();
  const std::size_t ra = rank(ma, n), rb = rank(mb, n), rab = rank(both, n);
  return ra == rb && ra == rab;
}

/// The fields named in the literature basis.
namespace fields {
inline VectorField dt() { return VectorField::unit(0); }
inline VectorField dx() { return VectorField::unit(1); }
inline VectorField scaling_rho_q() {
  VectorField v;
  v.coef[4] = RatFunc(Poly::symbol(sym::rho()));
  v.coef[5] = RatFunc(Poly::symbol(sym::q()));
  return v;
}
inline VectorField dilation() {
  VectorField v;
  v.coef[0] = RatFunc(Poly::symbol(sym::t()));
  v.coef[1] = RatFunc(Poly::symbol(sym::x()));
  v.coef[3] = -RatFunc(Poly::symbol(sym::n()));
  return v;
}
inline VectorField boost_psi() { return VectorField::unit(2); }
/// Lorentz boost x d/dt + t d/dx - d/dpsi.
inline VectorField boost() {
  VectorField v;
  v.coef[0] = RatFunc(Poly::symbol(sym::x()));
  v.coef[1] = RatFunc(Poly::symbol(sym::t()));
  v.coef[2] = RatFunc(Poly(-1));
  return v;
}
}  // namespace fields

}  // namespace rhsym

#pragma once

// Lie algebra structure of a symmetry basis: commutators, structure
// constants, solvability, adjoint action and one-dimensional subalgebra
// normal forms.

#include <cmath>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rhsym/symmetry.hpp"

namespace rhsym {

/// [V, W] with components V(W^a) - W(V^a).
inline VectorField commutator(const VectorField& v, const VectorField& w) {
  VectorField r;
  for (int a = 0; a < 6; ++a) r.coef[a] = v.apply(w.coef[a]) - w.apply(v.coef[a]);
  return r;
}

namespace detail {

using FieldKey = std::pair<int, Monomial>;

inline std::map<FieldKey, Rational> field_terms(const VectorField& v) {
  std::map<FieldKey, Rational> out;
  for (int f = 0; f < 6; ++f) {
    if (v.coef[f].is_zero()) continue;
    if (!v.coef[f].is_poly()) throw std::invalid_argument("field with rational coefficients");
    for (const auto& [m, c] : v.coef[f].num.terms) out[{f, m}] = c;
  }
  return out;
}

}  // namespace detail

/// Coordinates of v in the span of `basis`, or nullopt when outside it.
inline std::optional<RVector> coordinates(const std::vector<VectorField>& basis, const VectorField& v) {
  std::vector<std::map<detail::FieldKey, Rational>> cols;
  std::map<detail::FieldKey, std::size_t> index;
  for (const auto& b : basis) cols.push_back(detail::field_terms(b));
  auto target = detail::field_terms(v);
  for (const auto& c : cols) {
    for (const auto& [k, x] : c) index.try_emplace(k, index.size());
  }
  for (const auto& [k, x] : target) index.try_emplace(k, index.size());
  RMatrix columns(basis.size(), RVector(index.size(), Rational(0)));
  for (std::size_t j = 0; j < basis.size(); ++j) {
    for (const auto& [k, x] : cols[j]) columns[j][index.at(k)] = x;
  }
  RVector b(index.size(), Rational(0));
  for (const auto& [k, x] : target) b[index.at(k)] = x;
  return solve_columns(columns, b);
}

struct LieAlgebra {
  std::vector<VectorField> basis;
  std::vector<std::string> names;
  // c[i][j][k]: [V_i, V_j] = sum_k c[i][j][k] V_k
  std::vector<std::vector<RVector>> c;

  std::size_t dim() const { return basis.size(); }

  /// Matrix of ad V_i: column j holds the coordinates of [V_i, V_j].
  RMatrix ad(std::size_t i) const {
    RMatrix m(dim(), RVector(dim(), Rational(0)));
    for (std::size_t j = 0; j < dim(); ++j) {
      for (std::size_t k = 0; k < dim(); ++k) m[k][j] = c[i][j][k];
    }
    return m;
  }

  /// Bracket of two coordinate vectors.
  RVector bracket(const RVector& a, const RVector& b) const {
    RVector out(dim(), Rational(0));
    for (std::size_t i = 0; i < dim(); ++i) {
      if (is_zero(a[i])) continue;
      for (std::size_t j = 0; j < dim(); ++j) {
        if (is_zero(b[j])) continue;
        for (std::size_t k = 0; k < dim(); ++k) out[k] += a[i] * b[j] * c[i][j][k];
      }
    }
    return out;
  }
};

inline std::vector<std::string> default_names(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back("V" + std::to_string(i + 1));
  return out;
}

inline LieAlgebra structure_constants(const std::vector<VectorField>& basis,
                                      std::vector<std::string> names = {}) {
  LieAlgebra alg;
  alg.basis = basis;
  alg.names = names.empty() ? default_names(basis.size()) : std::move(names);
  const std::size_t n = basis.size();
  alg.c.assign(n, std::vector<RVector>(n, RVector(n, Rational(0))));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      auto co = coordinates(basis, commutator(basis[i], basis[j]));
      if (!co) {
        throw std::domain_error("basis not closed: [" + alg.names[i] + ", " + alg.names[j] +
                                "] = " + to_string(commutator(basis[i], basis[j])) + " is outside the span");
      }
      alg.c[i][j] = *co;
      for (std::size_t k = 0; k < n; ++k) alg.c[j][i][k] = -(*co)[k];
    }
  }
  return alg;
}

/// Text of a coordinate vector such as "V3 - eps*V1".
inline std::string element_text(const std::vector<Expr>& coef, const std::vector<std::string>& names) {
  Expr sum(0);
  for (std::size_t k = 0; k < coef.size(); ++k) {
    if (is_zero(coef[k])) continue;
    sum += normalize(coef[k]) * Expr(sym::parameter(names[k]));
  }
  return to_string(sum);
}

inline std::string element_text(const RVector& coef, const std::vector<std::string>& names) {
  std::vector<Expr> e;
  for (const auto& x : coef) e.emplace_back(x);
  return element_text(e, names);
}

/// Jacobi sums for every triple; all zero for a Lie algebra.
inline bool satisfies_jacobi(const LieAlgebra& alg) {
  const std::size_t n = alg.dim();
  auto unit = [&](std::size_t i) {
    RVector v(n, Rational(0));
    v[i] = 1;
    return v;
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t k = 0; k < n; ++k) {
        RVector s(n, Rational(0));
        const auto a = alg.bracket(unit(i), alg.bracket(unit(j), unit(k)));
        const auto b = alg.bracket(unit(j), alg.bracket(unit(k), unit(i)));
        const auto d = alg.bracket(unit(k), alg.bracket(unit(i), unit(j)));
        for (std::size_t m = 0; m < n; ++m) {
          if (!is_zero(a[m] + b[m] + d[m])) return false;
        }
      }
    }
  }
  return true;
}

struct Solvability {
  bool solvable = false;
  std::vector<std::size_t> derived_dims;  // dimensions of the derived series
  RMatrix witness;                         // rows: coordinates of the reordered basis
};

/// Derived series; on success a basis adapted to it, deepest terms first,
/// which satisfies [W_i, W_j] in span(W_1..W_{j-1}) for i < j.
inline Solvability is_solvable(const LieAlgebra& alg) {
  const std::size_t n = alg.dim();
  Solvability out;
  std::vector<RMatrix> series;
  RMatrix cur;
  for (std::size_t i = 0; i < n; ++i) {
    RVector v(n, Rational(0));
    v[i] = 1;
    cur.push_back(v);
  }
  out.derived_dims.push_back(cur.size());
  series.push_back(cur);
  while (!cur.empty()) {
    RMatrix next;
    for (std::size_t i = 0; i < cur.size(); ++i) {
      for (std::size_t j = i + 1; j < cur.size(); ++j) next.push_back(alg.bracket(cur[i], cur[j]));
    }
    rref(next, n);
    if (next.size() == cur.size()) return out;  // stalled at a perfect subalgebra
    cur = next;
    out.derived_dims.push_back(cur.size());
    series.push_back(cur);
  }
  out.solvable = true;
  // Extend from the deepest nonzero term outward, preferring basis vectors.
  RMatrix chosen;
  for (auto it = series.rbegin(); it != series.rend(); ++it) {
    for (const RVector& cand : *it) {
      RMatrix trial = chosen;
      trial.push_back(cand);
      if (rank(trial, n) == trial.size()) chosen.push_back(cand);
    }
  }
  out.witness = chosen;
  return out;
}

/// Checks the witness ordering condition exactly.
inline bool check_solvable_witness(const LieAlgebra& alg, const RMatrix& w) {
  const std::size_t n = alg.dim();
  for (std::size_t j = 0; j < w.size(); ++j) {
    RMatrix prefix(w.begin(), w.begin() + static_cast<long>(j));
    for (std::size_t i = 0; i < j; ++i) {
      const RVector b = alg.bracket(w[i], w[j]);
      RMatrix aug = prefix;
      aug.push_back(b);
      if (rank(aug, n) != rank(prefix, n)) return false;
    }
  }
  return true;
}

// ------------------------------------------------------------------ adjoint

namespace detail {

inline RMatrix mat_mul(const RMatrix& a, const RMatrix& b) {
  const std::size_t n = a.size();
  RMatrix r(n, RVector(n, Rational(0)));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      if (is_zero(a[i][k])) continue;
      for (std::size_t j = 0; j < n; ++j) r[i][j] += a[i][k] * b[k][j];
    }
  }
  return r;
}

inline bool is_zero_matrix(const RMatrix& m) {
  for (const auto& r : m) {
    for (const auto& x : r) {
      if (!is_zero(x)) return false;
    }
  }
  return true;
}

inline bool is_diagonal(const RMatrix& m) {
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = 0; j < m.size(); ++j) {
      if (i != j && !is_zero(m[i][j])) return false;
    }
  }
  return true;
}

}  // namespace detail

enum class AdjointPath { Nilpotent, Diagonal, Involutive, Numeric };

/// Symbolic Ad(exp(eps V_i)) w = exp(-eps ad V_i) w, with eps the symbol
/// `eps`. Closed forms cover nilpotent, diagonal and A^3 = A generators.
inline std::optional<std::vector<Expr>> adjoint_action_symbolic(const LieAlgebra& alg, std::size_t i,
                                                               const RVector& w,
                                                               AdjointPath* path = nullptr) {
  const std::size_t n = alg.dim();
  const RMatrix a = alg.ad(i);
  const Expr eps = sym::parameter("eps");
  auto apply = [&](const RMatrix& m, const RVector& v) {
    RVector r(n, Rational(0));
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = 0; q < n; ++q) r[p] += m[p][q] * v[q];
    }
    return r;
  };
  std::vector<Expr> out(n, Expr(0));
  if (detail::is_diagonal(a)) {
    for (std::size_t k = 0; k < n; ++k) out[k] = Expr(w[k]) * exp(-Expr(a[k][k]) * eps);
    if (path) *path = AdjointPath::Diagonal;
  } else {
    // Nilpotent: the series terminates.
    RMatrix pw = a;
    bool nilpotent = false;
    for (std::size_t p = 1; p <= n; ++p) {
      if (detail::is_zero_matrix(pw)) {
        nilpotent = true;
        break;
      }
      pw = detail::mat_mul(pw, a);
    }
    if (nilpotent) {
      RVector term = w;
      Rational fact = 1;
      for (std::size_t p = 0; p <= n; ++p) {
        if (p > 0) {
          term = apply(a, term);
          fact *= static_cast<long>(p);
        }
        for (std::size_t k = 0; k < n; ++k) {
          if (is_zero(term[k])) continue;
          out[k] += Expr(Rational(term[k] / fact)) * pow(-eps, static_cast<long>(p));
        }
      }
      if (path) *path = AdjointPath::Nilpotent;
    } else {
      const RMatrix a2 = detail::mat_mul(a, a);
      const RMatrix a3 = detail::mat_mul(a2, a);
      if (a3 != a) return std::nullopt;
      // exp(-eps A) = I - sinh(eps) A + (cosh(eps) - 1) A^2.
      const RVector aw = apply(a, w), a2w = apply(a2, w);
      for (std::size_t k = 0; k < n; ++k) {
        out[k] = Expr(w[k]) - sinh(eps) * Expr(aw[k]) + (cosh(eps) - 1) * Expr(a2w[k]);
      }
      if (path) *path = AdjointPath::Involutive;
    }
  }
  for (auto& e : out) e = normalize(e);
  return out;
}

/// Numeric exp(-eps A) w by scaling and squaring with a Taylor core.
inline std::vector<double> expm_apply(const std::vector<std::vector<double>>& a, double eps,
                                      const std::vector<double>& w) {
  const std::size_t n = a.size();
  double norm = 0;
  for (const auto& r : a) {
    double s = 0;
    for (double x : r) s += std::abs(x);
    norm = std::max(norm, s);
  }
  int squarings = 0;
  double scale = std::abs(eps) * norm;
  while (scale > 0.5) {
    scale /= 2;
    ++squarings;
  }
  const double h = -eps / std::ldexp(1.0, squarings);
  using Mat = std::vector<std::vector<double>>;
  auto mul = [&](const Mat& x, const Mat& y) {
    Mat r(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t j = 0; j < n; ++j) r[i][j] += x[i][k] * y[k][j];
      }
    }
    return r;
  };
  Mat e(n, std::vector<double>(n, 0.0)), term(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) e[i][i] = term[i][i] = 1.0;
  Mat ha = a;
  for (auto& r : ha) {
    for (double& x : r) x *= h;
  }
  for (int p = 1; p <= 20; ++p) {
    term = mul(term, ha);
    for (auto& r : term) {
      for (double& x : r) x /= p;
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) e[i][j] += term[i][j];
    }
  }
  for (int s = 0; s < squarings; ++s) e = mul(e, e);
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) out[i] += e[i][j] * w[j];
  }
  return out;
}

/// Numeric Ad(exp(eps V_i)) w; closed form when available.
inline std::vector<double> adjoint_action(const LieAlgebra& alg, double eps, std::size_t i,
                                          const std::vector<double>& w, bool force_numeric = false) {
  const std::size_t n = alg.dim();
  const RMatrix a = alg.ad(i);
  if (!force_numeric) {
    RVector dummy(n, Rational(0));
    std::vector<double> out(n, 0.0);
    bool closed = true;
    for (std::size_t j = 0; j < n && closed; ++j) {
      RVector e(n, Rational(0));
      e[j] = 1;
      auto col = adjoint_action_symbolic(alg, i, e);
      if (!col) {
        closed = false;
        break;
      }
      NumericEnv env;
      env.set(sym::parameter("eps"), eps);
      for (std::size_t k = 0; k < n; ++k) out[k] += evaluate(normalize((*col)[k]), env) * w[j];
    }
    if (closed) return out;
  }
  std::vector<std::vector<double>> ad(n, std::vector<double>(n));
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t q = 0; q < n; ++q) ad[p][q] = a[p][q].get_d();
  }
  return expm_apply(ad, eps, w);
}

// ---------------------------------------------------------- normal forms

/// One adjoint step Ad(exp(eps V_index)), or an overall rescaling when
/// index is npos.
struct AdjointStep {
  std::size_t index = static_cast<std::size_t>(-1);
  double eps = 0;       // numeric parameter (log of a rational for dilations)
  std::string text;     // exact description
};

struct NormalForm {
  RVector coords;             // canonical representative
  std::string form;           // canonical family, e.g. "S + dt + a*dx"
  Rational a = 0;             // family parameter where present
  std::vector<AdjointStep> word;
  int literature_entry = 0;        // 0 when the literature list has no match
  std::string note;
};

/// Basis labels: literature basis in order dt, dx, S = rho d/drho + q d/dq,
/// D = t d/dt + x d/dx - n d/dn (four coordinates), or dt, dx, D (three).
inline NormalForm normalize_element(const RVector& w) {
  if (w.size() != 3 && w.size() != 4) throw std::invalid_argument("element must have 3 or 4 coordinates");
  if (std::all_of(w.begin(), w.end(), [](const Rational& r) { return is_zero(r); })) {
    throw std::invalid_argument("zero element spans no subalgebra");
  }
  const bool eckart = w.size() == 4;
  const std::size_t iT = 0, iX = 1, iS = 2, iD = eckart ? 3 : 2;
  const Rational a1 = w[iT], a2 = w[iX];
  const Rational aS = eckart ? w[iS] : Rational(0);
  const Rational aD = w[iD];
  NormalForm nf;
  nf.coords.assign(w.size(), Rational(0));
  auto step = [&](std::size_t idx, const Rational& eps, const std::string& label) {
    AdjointStep s;
    s.index = idx;
    s.eps = eps.get_d();
    s.text = "Ad(exp((" + to_string(eps) + ")*" + label + "))";
    nf.word.push_back(s);
  };
  auto scale = [&](const Rational& f) {
    AdjointStep s;
    s.eps = f.get_d();
    s.text = "scale by " + to_string(f);
    nf.word.push_back(s);
  };
  if (!is_zero(aD)) {
    // Ad(exp(e dt)) D = D - e dt absorbs both translations.
    if (!is_zero(a1)) step(iT, a1 / aD, "dt");
    if (!is_zero(a2)) step(iX, a2 / aD, "dx");
    scale(1 / aD);
    nf.coords[iD] = 1;
    if (eckart) {
      nf.a = aS / aD;
      nf.coords[iS] = nf.a;
      nf.form = "D + a*S";
      nf.literature_entry = is_zero(nf.a) ? 3 : 5;
    } else {
      nf.form = "D";
      nf.literature_entry = 3;
    }
    return nf;
  }
  if (!is_zero(aS)) {
    scale(1 / aS);
    const Rational b1 = a1 / aS, b2 = a2 / aS;
    nf.coords[iS] = 1;
    // Ad(exp(e D)) multiplies both translations by exp(e) > 0.
    if (!is_zero(b1)) {
      const Rational m = abs(b1);
      if (!is_one(m)) {
        AdjointStep s;
        s.index = iD;
        s.eps = -std::log(m.get_d());
        s.text = "Ad(exp(-ln(" + to_string(m) + ")*D))";
        nf.word.push_back(s);
      }
      nf.coords[iT] = sgn(b1);
      nf.a = b2 / m;
      nf.coords[iX] = nf.a;
      if (sgn(b1) > 0) {
        nf.form = "S + dt + a*dx";
        nf.literature_entry = is_zero(nf.a) ? 8 : 6;
      } else {
        nf.form = "S - dt + a*dx";
        nf.note = "class absent from the literature list";
      }
      return nf;
    }
    if (!is_zero(b2)) {
      const Rational m = abs(b2);
      if (!is_one(m)) {
        AdjointStep s;
        s.index = iD;
        s.eps = -std::log(m.get_d());
        s.text = "Ad(exp(-ln(" + to_string(m) + ")*D))";
        nf.word.push_back(s);
      }
      nf.coords[iX] = sgn(b2);
      if (sgn(b2) > 0) {
        nf.form = "S + dx";
        nf.literature_entry = 7;
      } else {
        nf.form = "S - dx";
        nf.note = "class absent from the literature list";
      }
      return nf;
    }
    nf.form = "S";
    nf.literature_entry = 9;
    return nf;
  }
  if (!is_zero(a1)) {
    scale(1 / a1);
    nf.coords[iT] = 1;
    nf.a = a2 / a1;
    nf.coords[iX] = nf.a;
    nf.form = "dt + a*dx";
    nf.literature_entry = is_zero(nf.a) ? 2 : 4;
    return nf;
  }
  scale(1 / a2);
  nf.coords[iX] = 1;
  nf.form = "dx";
  nf.literature_entry = 1;
  return nf;
}

/// Applies a recorded word numerically to w.
inline std::vector<double> apply_word(const LieAlgebra& alg, const std::vector<AdjointStep>& word,
                                      std::vector<double> w) {
  for (const AdjointStep& s : word) {
    if (s.index == static_cast<std::size_t>(-1)) {
      for (double& x : w) x *= s.eps;
    } else {
      w = adjoint_action(alg, s.eps, s.index, w);
    }
  }
  return w;
}

/// The literature optimal-system list, for side-by-side reporting.
inline std::vector<std::string> literature_optimal_list(Theory t) {
  if (t == Theory::Eckart) {
    return {"dx", "dt", "D", "dt + a*dx", "D + a*S", "S + a*dx + dt", "S + dx", "S + dt", "S"};
  }
  return {"dx", "dt", "D", "dt + a*dx"};
}

/// This artifact's minimal canonical families.
inline std::vector<std::string> minimal_optimal_list(Theory t) {
  if (t == Theory::Eckart) {
    return {"dx", "dt + a*dx", "D + a*S", "S + dt + a*dx", "S - dt + a*dx", "S + dx", "S - dx", "S"};
  }
  return {"dx", "dt + a*dx", "D"};
}

// --------------------------------------------------- literature bases

/// Basis in the order of the generator list (dt, dx, S, D for Eckart;
/// dt, dx, S for Israel-Stewart).
inline std::vector<VectorField> literature_basis(Theory t) {
  std::vector<VectorField> b = {fields::dt(), fields::dx(), fields::scaling_rho_q()};
  if (t == Theory::Eckart) b.push_back(fields::dilation());
  return b;
}

/// Basis in the labelling of the commutator and adjoint tables, where the
/// third element is the dilation: (dt, dx, D, S) and (dt, dx, D).
inline std::vector<VectorField> table_basis(Theory t) {
  std::vector<VectorField> b = {fields::dt(), fields::dx(), fields::dilation()};
  if (t == Theory::Eckart) b.push_back(fields::scaling_rho_q());
  return b;
}

}  // namespace rhsym

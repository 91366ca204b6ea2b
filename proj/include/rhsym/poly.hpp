#pragma once

// Canonical normal form: Laurent polynomials with exact rational
// coefficients over atoms, and quotients of them.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "rhsym/rational.hpp"
#include "rhsym/symbol.hpp"

namespace rhsym {

/// Power product of atoms, sorted by atom id, exponents nonzero. At most one
/// exp kernel appears and it carries exponent 1.
using Monomial = std::vector<std::pair<AtomId, int>>;

struct MonomialHash {
  std::size_t operator()(const Monomial& m) const noexcept {
    std::size_t h = 0xcbf29ce484222325ULL;
    for (auto [a, e] : m) {
      h ^= (static_cast<std::size_t>(a) << 8) ^ static_cast<std::size_t>(static_cast<unsigned>(e));
      h *= 0x100000001b3ULL;
    }
    return h;
  }
};

inline const AtomInfo& atom_info(AtomId id) { return AtomTable::instance().info(id); }
inline bool is_exp_atom(AtomId id) { return atom_info(id).kind == AtomKind::Exp; }

/// True if the atom is the symbol s or a kernel whose argument involves s.
inline bool atom_depends(AtomId a, AtomId s) {
  const AtomInfo& info = atom_info(a);
  if (info.kind == AtomKind::Symbol) return a == s;
  return std::binary_search(info.depends.begin(), info.depends.end(), s);
}

inline int total_degree(const Monomial& m) {
  int d = 0;
  for (auto [a, e] : m) d += std::abs(e);
  return d;
}

Monomial mono_mul(const Monomial& a, const Monomial& b);
Monomial mono_pow(const Monomial& m, int k);
inline Monomial mono_inv(const Monomial& m) { return mono_pow(m, -1); }

struct Poly {
  using Term = std::pair<Monomial, Rational>;
  std::vector<Term> terms;  // sorted by monomial, coefficients nonzero

  Poly() = default;
  explicit Poly(const Rational& c) {
    if (!rhsym::is_zero(c)) terms.emplace_back(Monomial{}, c);
  }
  explicit Poly(long c) : Poly(Rational(c)) {}
  static Poly atom(AtomId a, int e = 1) {
    Poly p;
    p.terms.emplace_back(Monomial{{a, e}}, Rational(1));
    return p;
  }
  static Poly symbol(Symbol s, int e = 1) { return atom(s.id(), e); }
  static Poly term(const Rational& c, Monomial m) {
    Poly p;
    if (!rhsym::is_zero(c)) p.terms.emplace_back(std::move(m), c);
    return p;
  }

  bool is_zero() const { return terms.empty(); }
  bool is_constant() const { return terms.empty() || (terms.size() == 1 && terms[0].first.empty()); }
  Rational constant_value() const {
    if (!is_constant()) throw std::logic_error("polynomial is not constant");
    return terms.empty() ? Rational(0) : terms[0].second;
  }
  bool is_monomial() const { return terms.size() == 1; }
  Rational constant_term() const {
    if (!terms.empty() && terms[0].first.empty()) return terms[0].second;
    return 0;
  }

  friend bool operator==(const Poly& a, const Poly& b) { return a.terms == b.terms; }
  friend bool operator!=(const Poly& a, const Poly& b) { return !(a == b); }

  /// Builds from unsorted terms, merging duplicates.
  static Poly from_terms(std::vector<Term> raw) {
    std::sort(raw.begin(), raw.end(),
              [](const Term& l, const Term& r) { return l.first < r.first; });
    Poly p;
    for (auto& t : raw) {
      if (!p.terms.empty() && p.terms.back().first == t.first) {
        p.terms.back().second += t.second;
        if (rhsym::is_zero(p.terms.back().second)) p.terms.pop_back();
      } else if (!rhsym::is_zero(t.second)) {
        p.terms.push_back(std::move(t));
      }
    }
    return p;
  }

  Poly operator-() const {
    Poly r = *this;
    for (auto& t : r.terms) t.second = -t.second;
    return r;
  }

  Poly& operator+=(const Poly& o) {
    *this = add(*this, o, false);
    return *this;
  }
  Poly& operator-=(const Poly& o) {
    *this = add(*this, o, true);
    return *this;
  }

  Poly scaled(const Rational& c) const {
    if (rhsym::is_zero(c)) return {};
    Poly r = *this;
    for (auto& t : r.terms) t.second *= c;
    return r;
  }

  Poly mul_term(const Rational& c, const Monomial& m) const {
    if (rhsym::is_zero(c)) return {};
    std::vector<Term> raw;
    raw.reserve(terms.size());
    for (const auto& t : terms) raw.emplace_back(mono_mul(t.first, m), t.second * c);
    return from_terms(std::move(raw));
  }

  static Poly add(const Poly& a, const Poly& b, bool subtract) {
    Poly r;
    r.terms.reserve(a.terms.size() + b.terms.size());
    std::size_t i = 0, j = 0;
    while (i < a.terms.size() || j < b.terms.size()) {
      if (j == b.terms.size() || (i < a.terms.size() && a.terms[i].first < b.terms[j].first)) {
        r.terms.push_back(a.terms[i++]);
      } else if (i == a.terms.size() || b.terms[j].first < a.terms[i].first) {
        r.terms.push_back(b.terms[j++]);
        if (subtract) r.terms.back().second = -r.terms.back().second;
      } else {
        Rational c = subtract ? Rational(a.terms[i].second - b.terms[j].second)
                              : Rational(a.terms[i].second + b.terms[j].second);
        if (!rhsym::is_zero(c)) r.terms.emplace_back(a.terms[i].first, c);
        ++i;
        ++j;
      }
    }
    return r;
  }
};

inline Poly operator+(const Poly& a, const Poly& b) { return Poly::add(a, b, false); }
inline Poly operator-(const Poly& a, const Poly& b) { return Poly::add(a, b, true); }

inline Poly operator*(const Poly& a, const Poly& b) {
  if (a.is_zero() || b.is_zero()) return {};
  if (a.is_monomial()) return b.mul_term(a.terms[0].second, a.terms[0].first);
  if (b.is_monomial()) return a.mul_term(b.terms[0].second, b.terms[0].first);
  std::unordered_map<Monomial, Rational, MonomialHash> acc;
  acc.reserve(a.terms.size() * b.terms.size());
  for (const auto& ta : a.terms) {
    for (const auto& tb : b.terms) {
      auto [it, fresh] = acc.try_emplace(mono_mul(ta.first, tb.first), 0);
      it->second += ta.second * tb.second;
    }
  }
  std::vector<Poly::Term> raw;
  raw.reserve(acc.size());
  for (auto& [m, c] : acc) {
    if (!is_zero(c)) raw.emplace_back(m, c);
  }
  std::sort(raw.begin(), raw.end(),
            [](const Poly::Term& l, const Poly::Term& r) { return l.first < r.first; });
  Poly p;
  p.terms = std::move(raw);
  return p;
}

inline Poly pow(const Poly& p, unsigned k) {
  Poly r(1);
  Poly base = p;
  while (k) {
    if (k & 1u) r = r * base;
    k >>= 1u;
    if (k) base = base * base;
  }
  return r;
}

// ---------------------------------------------------------------- printing

namespace detail {

inline Monomial print_sorted(const Monomial& m) {
  Monomial s = m;
  auto& table = AtomTable::instance();
  std::sort(s.begin(), s.end(), [&](auto l, auto r) { return table.print_less(l.first, r.first); });
  return s;
}

/// Graded order: higher total degree first, then lexicographic in the
/// fixed atom order.
inline bool print_term_before(const Monomial& a, const Monomial& b) {
  const int da = total_degree(a), db = total_degree(b);
  if (da != db) return da > db;
  const Monomial sa = print_sorted(a), sb = print_sorted(b);
  auto& table = AtomTable::instance();
  std::size_t i = 0, j = 0;
  while (i < sa.size() && j < sb.size()) {
    if (sa[i].first == sb[j].first) {
      if (sa[i].second != sb[j].second) return sa[i].second > sb[j].second;
      ++i;
      ++j;
    } else if (table.print_less(sa[i].first, sb[j].first)) {
      return sa[i].second > 0;
    } else {
      return sb[j].second < 0;
    }
  }
  if (i < sa.size()) return sa[i].second > 0;
  if (j < sb.size()) return sb[j].second < 0;
  return false;
}

inline std::string monomial_body(const Monomial& m) {
  std::string out;
  for (auto [a, e] : print_sorted(m)) {
    if (!out.empty()) out += "*";
    out += atom_info(a).name;
    if (e < 0) {
      out += "^(" + std::to_string(e) + ")";
    } else if (e != 1) {
      out += "^" + std::to_string(e);
    }
  }
  return out;
}

}  // namespace detail

/// Terms in print order.
inline std::vector<const Poly::Term*> print_order(const Poly& p) {
  std::vector<const Poly::Term*> v;
  v.reserve(p.terms.size());
  for (const auto& t : p.terms) v.push_back(&t);
  std::stable_sort(v.begin(), v.end(), [](const Poly::Term* l, const Poly::Term* r) {
    return detail::print_term_before(l->first, r->first);
  });
  return v;
}

inline std::string to_string(const Poly& p) {
  if (p.is_zero()) return "0";
  std::string out;
  bool first = true;
  for (const Poly::Term* t : print_order(p)) {
    const bool neg = sgn(t->second) < 0;
    const Rational mag = abs(t->second);
    if (first) {
      if (neg) out += "-";
    } else {
      out += neg ? " - " : " + ";
    }
    first = false;
    if (t->first.empty()) {
      out += to_string(mag);
    } else {
      if (!is_one(mag)) out += to_string(mag) + "*";
      out += detail::monomial_body(t->first);
    }
  }
  return out;
}

// ------------------------------------------------------------ free symbols

inline void collect_symbols(const Poly& p, std::set<AtomId>& out) {
  for (const auto& [m, c] : p.terms) {
    for (auto [a, e] : m) {
      const AtomInfo& info = atom_info(a);
      if (info.kind == AtomKind::Symbol) {
        out.insert(a);
      } else {
        out.insert(info.depends.begin(), info.depends.end());
      }
    }
  }
}

inline std::vector<AtomId> free_symbols(const Poly& p) {
  std::set<AtomId> s;
  collect_symbols(p, s);
  return {s.begin(), s.end()};
}

inline bool depends_on(const Poly& p, AtomId s) {
  for (const auto& [m, c] : p.terms) {
    for (auto [a, e] : m) {
      if (atom_depends(a, s)) return true;
    }
  }
  return false;
}

// ----------------------------------------------------------------- kernels

namespace detail {

inline AtomId intern_kernel(AtomKind kind, const Poly& arg) {
  std::vector<AtomId> deps = free_symbols(arg);
  int group = 50;
  if (kind == AtomKind::Exp && deps.size() == 1 && deps[0] == sym::psi().id()) group = 4;
  return AtomTable::instance().intern_kernel(kind, std::make_shared<const Poly>(arg),
                                             to_string(arg), std::move(deps), group);
}

constexpr AtomId kNoAtom = std::numeric_limits<AtomId>::max();

struct ExpCache {
  std::mutex mutex;
  std::unordered_map<std::uint64_t, AtomId> product;
  std::map<std::pair<AtomId, int>, AtomId> power;

  static ExpCache& instance() {
    static ExpCache c;
    return c;
  }
};

/// exp atom for a nonzero argument, or kNoAtom for a zero argument.
inline AtomId exp_atom_of(const Poly& arg) {
  if (arg.is_zero()) return kNoAtom;
  return intern_kernel(AtomKind::Exp, arg);
}

inline AtomId exp_product(AtomId a, AtomId b) {
  if (a > b) std::swap(a, b);
  auto& cache = ExpCache::instance();
  const std::uint64_t key = (static_cast<std::uint64_t>(a) << 32) | b;
  {
    std::lock_guard lock(cache.mutex);
    if (auto it = cache.product.find(key); it != cache.product.end()) return it->second;
  }
  const AtomId r = exp_atom_of(*atom_info(a).arg + *atom_info(b).arg);
  std::lock_guard lock(cache.mutex);
  cache.product.emplace(key, r);
  return r;
}

inline AtomId exp_power(AtomId a, int k) {
  if (k == 1) return a;
  auto& cache = ExpCache::instance();
  {
    std::lock_guard lock(cache.mutex);
    if (auto it = cache.power.find({a, k}); it != cache.power.end()) return it->second;
  }
  const AtomId r = exp_atom_of(atom_info(a).arg->scaled(Rational(k)));
  std::lock_guard lock(cache.mutex);
  cache.power.emplace(std::make_pair(a, k), r);
  return r;
}

/// Restores the single-exp-kernel invariant.
inline void fix_exp(Monomial& m) {
  AtomId merged = kNoAtom;
  bool touched = false;
  std::size_t count = 0;
  for (auto [a, e] : m) {
    if (!is_exp_atom(a)) continue;
    ++count;
    if (e != 1) touched = true;
  }
  if (count == 0 || (count == 1 && !touched)) return;
  Monomial rest;
  rest.reserve(m.size());
  for (auto [a, e] : m) {
    if (!is_exp_atom(a)) {
      rest.emplace_back(a, e);
      continue;
    }
    const AtomId p = exp_power(a, e);
    if (p == kNoAtom) continue;
    merged = merged == kNoAtom ? p : exp_product(merged, p);
  }
  if (merged != kNoAtom) {
    auto pos = std::lower_bound(rest.begin(), rest.end(), std::make_pair(merged, 0),
                                [](auto l, auto r) { return l.first < r.first; });
    rest.insert(pos, {merged, 1});
  }
  m = std::move(rest);
}

}  // namespace detail

inline Monomial mono_mul(const Monomial& a, const Monomial& b) {
  if (a.empty()) return b;
  if (b.empty()) return a;
  Monomial r;
  r.reserve(a.size() + b.size());
  std::size_t i = 0, j = 0;
  int exps = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
      r.push_back(a[i++]);
    } else if (i == a.size() || b[j].first < a[i].first) {
      r.push_back(b[j++]);
    } else {
      const int e = a[i].second + b[j].second;
      if (e != 0) r.emplace_back(a[i].first, e);
      ++i;
      ++j;
    }
    if (!r.empty() && is_exp_atom(r.back().first)) ++exps;
  }
  if (exps > 0) detail::fix_exp(r);
  return r;
}

inline Monomial mono_pow(const Monomial& m, int k) {
  if (k == 0) return {};
  Monomial r = m;
  for (auto& [a, e] : r) e *= k;
  detail::fix_exp(r);
  return r;
}

struct RatFunc;
RatFunc exp_of(const Poly& arg);
Poly ln_of(const Poly& arg);

// --------------------------------------------------------------- RatFunc

/// Quotient of Laurent polynomials. The denominator is 1 whenever it reduces
/// to a single term; otherwise its monomial content is cleared and its first
/// stored term has coefficient 1.
struct RatFunc {
  Poly num;
  Poly den{1};

  RatFunc() = default;
  RatFunc(Poly n) : num(std::move(n)) {}  // NOLINT(google-explicit-constructor)
  RatFunc(Poly n, Poly d) : num(std::move(n)), den(std::move(d)) { canonicalize(); }
  explicit RatFunc(const Rational& c) : num(c) {}
  explicit RatFunc(long c) : num(c) {}

  bool is_zero() const { return num.is_zero(); }
  bool is_poly() const { return den.terms.size() == 1 && den.terms[0].first.empty(); }
  bool is_constant() const { return is_poly() && num.is_constant(); }
  Rational constant_value() const {
    if (!is_constant()) throw std::logic_error("expression is not constant");
    return num.constant_value();
  }
  const Poly& as_poly() const {
    if (!is_poly()) throw std::logic_error("expression is not polynomial");
    return num;
  }

  void canonicalize() {
    if (den.is_zero()) throw std::domain_error("singular: division by zero");
    if (num.is_zero()) {
      den = Poly(1);
      return;
    }
    if (den.is_monomial()) {
      const auto& [m, c] = den.terms[0];
      num = num.mul_term(1 / c, mono_inv(m));
      den = Poly(1);
      return;
    }
    // Clear the symbol/ln content of the denominator.
    std::map<AtomId, int> lo;
    bool first = true;
    for (const auto& [m, c] : den.terms) {
      std::map<AtomId, int> here;
      for (auto [a, e] : m) {
        if (!is_exp_atom(a)) here[a] = e;
      }
      if (first) {
        lo = here;
        first = false;
        continue;
      }
      for (auto& [a, e] : lo) {
        auto it = here.find(a);
        e = std::min(e, it == here.end() ? 0 : it->second);
      }
      for (auto& [a, e] : here) {
        if (!lo.count(a)) lo[a] = std::min(e, 0);
      }
    }
    Monomial g;
    for (auto [a, e] : lo) {
      if (e != 0) g.emplace_back(a, -e);
    }
    Rational lead = den.terms[0].second;
    if (!g.empty() || !is_one(lead)) {
      num = num.mul_term(1 / lead, g);
      den = den.mul_term(1 / lead, g);
    }
    if (num.terms.size() == den.terms.size()) {
      const Rational ratio = num.terms[0].second / den.terms[0].second;
      bool prop = true;
      for (std::size_t i = 0; i < num.terms.size() && prop; ++i) {
        prop = num.terms[i].first == den.terms[i].first &&
               num.terms[i].second == ratio * den.terms[i].second;
      }
      if (prop) {
        num = Poly(ratio);
        den = Poly(1);
      }
    }
  }

  RatFunc operator-() const {
    RatFunc r = *this;
    r.num = -r.num;
    return r;
  }
};

inline RatFunc operator+(const RatFunc& a, const RatFunc& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  if (a.den == b.den) return RatFunc(a.num + b.num, a.den);
  if (b.is_poly()) return RatFunc(a.num + b.num * a.den, a.den);
  if (a.is_poly()) return RatFunc(a.num * b.den + b.num, b.den);
  return RatFunc(a.num * b.den + b.num * a.den, a.den * b.den);
}
inline RatFunc operator-(const RatFunc& a, const RatFunc& b) { return a + (-b); }
inline RatFunc operator*(const RatFunc& a, const RatFunc& b) {
  if (a.is_zero() || b.is_zero()) return {};
  if (a.is_poly() && b.is_poly()) return RatFunc(a.num * b.num);
  return RatFunc(a.num * b.num, a.den * b.den);
}
inline RatFunc inverse(const RatFunc& a) {
  if (a.is_zero()) throw std::domain_error("singular: division by zero");
  return RatFunc(a.den, a.num);
}
inline RatFunc operator/(const RatFunc& a, const RatFunc& b) {
  if (b.is_zero()) throw std::domain_error("singular: division by zero");
  if (a.is_zero()) return {};
  return RatFunc(a.num * b.den, a.den * b.num);
}
inline RatFunc& operator+=(RatFunc& a, const RatFunc& b) { return a = a + b; }
inline RatFunc& operator-=(RatFunc& a, const RatFunc& b) { return a = a - b; }
inline RatFunc& operator*=(RatFunc& a, const RatFunc& b) { return a = a * b; }

inline RatFunc pow(const RatFunc& a, int k) {
  if (k == 0) return RatFunc(1);
  if (k < 0) return pow(inverse(a), -k);
  if (a.is_poly()) return RatFunc(pow(a.num, static_cast<unsigned>(k)));
  return RatFunc(pow(a.num, static_cast<unsigned>(k)), pow(a.den, static_cast<unsigned>(k)));
}

/// Exact equality of the represented functions (cross multiplication).
inline bool equal(const RatFunc& a, const RatFunc& b) {
  if (a.den == b.den) return a.num == b.num;
  return a.num * b.den == b.num * a.den;
}

inline std::string to_string(const RatFunc& r) {
  if (r.is_poly()) return to_string(r.num);
  return "(" + to_string(r.num) + ")/(" + to_string(r.den) + ")";
}

// ------------------------------------------------------ kernel construction

inline RatFunc exp_of(const Poly& arg) {
  // exp(c ln X) with integer c collapses to X^c.
  RatFunc out(1);
  Poly rest;
  for (const auto& t : arg.terms) {
    const auto& [m, c] = t;
    if (m.size() == 1 && m[0].second == 1 && is_integer(c) &&
        atom_info(m[0].first).kind == AtomKind::Ln) {
      out *= pow(RatFunc(*atom_info(m[0].first).arg), static_cast<int>(to_long(c)));
    } else {
      rest.terms.push_back(t);
    }
  }
  const AtomId a = detail::exp_atom_of(rest);
  if (a != detail::kNoAtom) out *= RatFunc(Poly::atom(a));
  return out;
}

inline Poly ln_of(const Poly& arg) {
  if (arg.is_zero()) throw std::domain_error("singular: logarithm of zero");
  if (!arg.is_monomial()) return Poly::atom(detail::intern_kernel(AtomKind::Ln, arg));
  const auto& [m, c] = arg.terms[0];
  Poly out;
  if (sgn(c) < 0) {
    if (!m.empty()) return Poly::atom(detail::intern_kernel(AtomKind::Ln, arg));
    throw std::domain_error("logarithm of a negative constant");
  }
  if (!is_one(c)) out += Poly::atom(detail::intern_kernel(AtomKind::Ln, Poly(c)));
  for (auto [a, e] : m) {
    const AtomInfo& info = atom_info(a);
    if (info.kind == AtomKind::Exp) {
      out += info.arg->scaled(Rational(e));
    } else {
      out += Poly::atom(detail::intern_kernel(AtomKind::Ln, Poly::atom(a))).scaled(Rational(e));
    }
  }
  return out;
}

inline Poly ln_of(const RatFunc& r) {
  if (r.is_poly()) return ln_of(r.num);
  return ln_of(r.num) - ln_of(r.den);
}

// ---------------------------------------------------------- differentiation

RatFunc diff(const Poly& p, AtomId s);

inline RatFunc diff(const RatFunc& r, AtomId s) {
  if (r.is_poly()) return diff(r.num, s);
  const RatFunc dn = diff(r.num, s);
  const RatFunc dd = diff(r.den, s);
  if (dd.is_zero()) return dn * RatFunc(Poly(1), r.den);
  return (dn * RatFunc(r.den) - RatFunc(r.num) * dd) * RatFunc(Poly(1), r.den * r.den);
}

inline RatFunc diff(const Poly& p, AtomId s) {
  std::vector<Poly::Term> plain;
  RatFunc extra;
  for (const auto& [m, c] : p.terms) {
    for (std::size_t i = 0; i < m.size(); ++i) {
      const auto [a, e] = m[i];
      if (!atom_depends(a, s)) continue;
      const AtomInfo& info = atom_info(a);
      if (info.kind == AtomKind::Symbol) {
        plain.emplace_back(mono_mul(m, Monomial{{a, -1}}), c * e);
      } else if (info.kind == AtomKind::Exp) {
        const RatFunc d = diff(*info.arg, s);
        if (d.is_poly()) {
          for (const auto& [dm, dc] : d.num.terms) plain.emplace_back(mono_mul(m, dm), c * dc);
        } else {
          extra += RatFunc(Poly::term(c, m)) * d;
        }
      } else {
        const RatFunc d = diff(*info.arg, s);
        const Poly coef = Poly::term(c * e, mono_mul(m, Monomial{{a, -1}}));
        extra += RatFunc(coef) * d * inverse(RatFunc(*info.arg));
      }
    }
  }
  RatFunc out(Poly::from_terms(std::move(plain)));
  if (!extra.is_zero()) out += extra;
  return out;
}

// -------------------------------------------------------------- substitution

using Subst = std::map<AtomId, RatFunc>;

namespace detail {

inline bool kernel_touched(AtomId a, const Subst& s) {
  const AtomInfo& info = atom_info(a);
  for (AtomId d : info.depends) {
    if (s.count(d)) return true;
  }
  return false;
}

}  // namespace detail

RatFunc substitute(const Poly& p, const Subst& s);

inline RatFunc substitute_kernel(AtomId a, const Subst& s) {
  const AtomInfo& info = atom_info(a);
  const RatFunc arg = substitute(*info.arg, s);
  if (info.kind == AtomKind::Exp) {
    if (!arg.is_poly()) throw std::domain_error("exp of a non-polynomial argument");
    return exp_of(arg.num);
  }
  return RatFunc(ln_of(arg));
}

/// Simultaneous substitution of symbols, kernels rebuilt as needed.
inline RatFunc substitute(const Poly& p, const Subst& s) {
  if (s.empty()) return RatFunc(p);
  std::map<AtomId, RatFunc> kernels;
  std::vector<Poly::Term> plain;
  RatFunc extra;
  for (const auto& [m, c] : p.terms) {
    Monomial keep;
    RatFunc factor(c);
    bool poly_factor = true;
    for (auto [a, e] : m) {
      const AtomInfo& info = atom_info(a);
      const RatFunc* repl = nullptr;
      if (info.kind == AtomKind::Symbol) {
        auto it = s.find(a);
        if (it != s.end()) repl = &it->second;
      } else if (detail::kernel_touched(a, s)) {
        auto it = kernels.find(a);
        if (it == kernels.end()) it = kernels.emplace(a, substitute_kernel(a, s)).first;
        repl = &it->second;
      }
      if (!repl) {
        keep.emplace_back(a, e);
        continue;
      }
      factor *= pow(*repl, e);
      if (!factor.is_poly()) poly_factor = false;
      if (factor.is_zero()) break;
    }
    if (factor.is_zero()) continue;
    detail::fix_exp(keep);
    if (poly_factor && factor.is_poly()) {
      for (const auto& [fm, fc] : factor.num.terms) plain.emplace_back(mono_mul(keep, fm), fc);
    } else {
      extra += factor * RatFunc(Poly::term(1, keep));
    }
  }
  RatFunc out(Poly::from_terms(std::move(plain)));
  if (!extra.is_zero()) out += extra;
  return out;
}

inline RatFunc substitute(const RatFunc& r, const Subst& s) {
  if (r.is_poly()) return substitute(r.num, s);
  const RatFunc d = substitute(r.den, s);
  if (d.is_zero()) throw std::domain_error("singular substitution: denominator vanishes");
  return substitute(r.num, s) / d;
}

// ---------------------------------------------------------------- numerics

/// Numeric values for symbols; kernel values are cached per environment.
class NumericEnv {
 public:
  NumericEnv() = default;
  void set(Symbol s, double v) {
    values_[s.id()] = v;
    kernels_.clear();
  }
  void set(AtomId a, double v) {
    values_[a] = v;
    kernels_.clear();
  }
  bool has(AtomId a) const { return values_.count(a) != 0; }

  double atom(AtomId a) const;
  double eval(const Poly& p) const;
  double eval(const RatFunc& r) const { return eval(r.num) / eval(r.den); }

 private:
  std::unordered_map<AtomId, double> values_;
  mutable std::unordered_map<AtomId, double> kernels_;
};

inline double NumericEnv::atom(AtomId a) const {
  const AtomInfo& info = atom_info(a);
  if (info.kind == AtomKind::Symbol) {
    auto it = values_.find(a);
    if (it == values_.end()) throw std::invalid_argument("no value for symbol " + info.name);
    return it->second;
  }
  if (auto it = kernels_.find(a); it != kernels_.end()) return it->second;
  const double arg = eval(*info.arg);
  const double v = info.kind == AtomKind::Exp ? std::exp(arg) : std::log(arg);
  kernels_.emplace(a, v);
  return v;
}

inline double NumericEnv::eval(const Poly& p) const {
  double acc = 0;
  for (const auto& [m, c] : p.terms) {
    double term = c.get_d();
    for (auto [a, e] : m) {
      const double v = atom(a);
      term *= e == 1 ? v : std::pow(v, e);
    }
    acc += term;
  }
  return acc;
}

// ---------------------------------------------------------------- collect

/// Splits p = sum over basis monomials of (monomial * coefficient). Kernels
/// depending on basis symbols count as basis atoms; ln kernels of them are
/// rejected.
inline std::map<Monomial, Poly> collect(const Poly& p, const std::vector<AtomId>& basis) {
  auto in_basis = [&](AtomId a) {
    const AtomInfo& info = atom_info(a);
    if (info.kind == AtomKind::Symbol) return std::find(basis.begin(), basis.end(), a) != basis.end();
    for (AtomId d : info.depends) {
      if (std::find(basis.begin(), basis.end(), d) != basis.end()) {
        if (info.kind == AtomKind::Ln) {
          throw std::invalid_argument("not polynomial in basis: " + info.name);
        }
        return true;
      }
    }
    return false;
  };
  std::map<Monomial, std::vector<Poly::Term>> raw;
  for (const auto& [m, c] : p.terms) {
    Monomial key, rest;
    for (auto [a, e] : m) (in_basis(a) ? key : rest).emplace_back(a, e);
    raw[key].emplace_back(std::move(rest), c);
  }
  std::map<Monomial, Poly> out;
  for (auto& [k, v] : raw) {
    Poly coef = Poly::from_terms(std::move(v));
    if (!coef.is_zero()) out.emplace(k, std::move(coef));
  }
  return out;
}

inline std::map<Monomial, RatFunc> collect(const RatFunc& r, const std::vector<AtomId>& basis) {
  for (AtomId b : basis) {
    if (depends_on(r.den, b)) {
      throw std::invalid_argument("not polynomial in basis: denominator depends on " +
                                  atom_info(b).name);
    }
  }
  std::map<Monomial, RatFunc> out;
  for (auto& [k, v] : collect(r.num, basis)) out.emplace(k, RatFunc(v, r.den));
  return out;
}

}  // namespace rhsym

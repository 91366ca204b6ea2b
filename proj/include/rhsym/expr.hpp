#pragma once

// Expression trees: construction, infix text round-trip, and the bridge to
// the canonical normal form in poly.hpp.

#include <cctype>
#include <cmath>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rhsym/poly.hpp"

namespace rhsym {

enum class Op : std::uint8_t { Num, Sym, Add, Mul, Pow, Fn };
enum class Fn : std::uint8_t { Exp, Ln, Sinh, Cosh, Tanh };

inline const char* fn_name(Fn f) {
  switch (f) {
    case Fn::Exp: return "exp";
    case Fn::Ln: return "ln";
    case Fn::Sinh: return "sinh";
    case Fn::Cosh: return "cosh";
    case Fn::Tanh: return "tanh";
  }
  return "?";
}

class Expr;

struct ExprNode {
  Op op = Op::Num;
  Rational value;
  AtomId atom = 0;
  Fn fn = Fn::Exp;
  std::vector<Expr> args;
};

class Expr {
 public:
  Expr() : Expr(Rational(0)) {}
  Expr(long v) : Expr(Rational(v)) {}  // NOLINT(google-explicit-constructor)
  Expr(int v) : Expr(Rational(v)) {}   // NOLINT(google-explicit-constructor)
  Expr(const Rational& v) {            // NOLINT(google-explicit-constructor)
    auto n = std::make_shared<ExprNode>();
    n->op = Op::Num;
    n->value = v;
    n->value.canonicalize();
    node_ = std::move(n);
  }
  Expr(Symbol s) {  // NOLINT(google-explicit-constructor)
    auto n = std::make_shared<ExprNode>();
    n->op = Op::Sym;
    n->atom = s.id();
    node_ = std::move(n);
  }

  static Expr make(Op op, std::vector<Expr> args) {
    auto n = std::make_shared<ExprNode>();
    n->op = op;
    n->args = std::move(args);
    return Expr(std::move(n));
  }
  static Expr apply(Fn f, Expr arg) {
    auto n = std::make_shared<ExprNode>();
    n->op = Op::Fn;
    n->fn = f;
    n->args = {std::move(arg)};
    return Expr(std::move(n));
  }

  Op op() const { return node_->op; }
  const Rational& value() const { return node_->value; }
  Symbol symbol() const { return Symbol(node_->atom); }
  Fn fn() const { return node_->fn; }
  const std::vector<Expr>& args() const { return node_->args; }

  bool is_num() const { return op() == Op::Num; }
  bool is_num(long v) const { return is_num() && value() == v; }

  friend bool operator==(const Expr& a, const Expr& b) {
    if (a.node_ == b.node_) return true;
    if (a.op() != b.op()) return false;
    switch (a.op()) {
      case Op::Num: return a.value() == b.value();
      case Op::Sym: return a.node_->atom == b.node_->atom;
      case Op::Fn:
        if (a.fn() != b.fn()) return false;
        break;
      default: break;
    }
    return a.args() == b.args();
  }
  friend bool operator!=(const Expr& a, const Expr& b) { return !(a == b); }

 private:
  explicit Expr(std::shared_ptr<const ExprNode> n) : node_(std::move(n)) {}
  std::shared_ptr<const ExprNode> node_;
};

// ----------------------------------------------------------------- builders

inline Expr operator+(const Expr& a, const Expr& b) {
  if (a.is_num() && b.is_num()) return Expr(Rational(a.value() + b.value()));
  if (a.is_num(0)) return b;
  if (b.is_num(0)) return a;
  std::vector<Expr> args;
  for (const Expr* e : {&a, &b}) {
    if (e->op() == Op::Add) {
      args.insert(args.end(), e->args().begin(), e->args().end());
    } else {
      args.push_back(*e);
    }
  }
  return Expr::make(Op::Add, std::move(args));
}

inline Expr operator*(const Expr& a, const Expr& b) {
  if (a.is_num() && b.is_num()) return Expr(Rational(a.value() * b.value()));
  if (a.is_num(0) || b.is_num(0)) return Expr(0);
  if (a.is_num(1)) return b;
  if (b.is_num(1)) return a;
  std::vector<Expr> args;
  for (const Expr* e : {&a, &b}) {
    if (e->op() == Op::Mul) {
      args.insert(args.end(), e->args().begin(), e->args().end());
    } else {
      args.push_back(*e);
    }
  }
  return Expr::make(Op::Mul, std::move(args));
}

inline Expr operator-(const Expr& a) {
  if (a.is_num()) return Expr(Rational(-a.value()));
  if (a.op() == Op::Mul && a.args()[0].is_num()) {
    std::vector<Expr> f = a.args();
    f[0] = Expr(Rational(-f[0].value()));
    if (f[0].is_num(1)) f.erase(f.begin());
    return f.size() == 1 ? f[0] : Expr::make(Op::Mul, std::move(f));
  }
  return Expr::make(Op::Mul, {Expr(-1), a});
}
inline Expr operator-(const Expr& a, const Expr& b) { return a + (-b); }

inline Expr pow(const Expr& b, const Expr& e) {
  if (e.is_num(1)) return b;
  if (e.is_num(0)) return Expr(1);
  if (b.is_num() && e.is_num() && is_integer(e.value())) {
    const long k = to_long(e.value());
    if (k < 0 && is_zero(b.value())) throw std::domain_error("singular: division by zero");
    Rational r;
    mpz_class n = b.value().get_num(), d = b.value().get_den();
    mpz_class pn, pd;
    mpz_pow_ui(pn.get_mpz_t(), n.get_mpz_t(), static_cast<unsigned long>(std::labs(k)));
    mpz_pow_ui(pd.get_mpz_t(), d.get_mpz_t(), static_cast<unsigned long>(std::labs(k)));
    r = k >= 0 ? Rational(pn, pd) : Rational(pd, pn);
    r.canonicalize();
    return Expr(r);
  }
  return Expr::make(Op::Pow, {b, e});
}
inline Expr pow(const Expr& b, long e) { return pow(b, Expr(e)); }

inline Expr operator/(const Expr& a, const Expr& b) {
  if (b.is_num()) {
    if (is_zero(b.value())) throw std::domain_error("singular: division by zero");
    return a * Expr(Rational(1 / b.value()));
  }
  return a * pow(b, -1L);
}

inline Expr& operator+=(Expr& a, const Expr& b) { return a = a + b; }
inline Expr& operator-=(Expr& a, const Expr& b) { return a = a - b; }
inline Expr& operator*=(Expr& a, const Expr& b) { return a = a * b; }

inline Expr exp(const Expr& a) { return Expr::apply(Fn::Exp, a); }
inline Expr ln(const Expr& a) { return Expr::apply(Fn::Ln, a); }
inline Expr sinh(const Expr& a) { return Expr::apply(Fn::Sinh, a); }
inline Expr cosh(const Expr& a) { return Expr::apply(Fn::Cosh, a); }
inline Expr tanh(const Expr& a) { return Expr::apply(Fn::Tanh, a); }

inline Expr rat(long p, long q = 1) { return Expr(make_rational(p, q)); }

// ------------------------------------------------------------- normal form

inline RatFunc to_ratfunc(const Expr& e) {
  switch (e.op()) {
    case Op::Num: return RatFunc(e.value());
    case Op::Sym: return RatFunc(Poly::atom(e.symbol().id()));
    case Op::Add: {
      RatFunc acc;
      std::vector<Poly::Term> plain;
      for (const Expr& a : e.args()) {
        RatFunc r = to_ratfunc(a);
        if (r.is_poly()) {
          plain.insert(plain.end(), r.num.terms.begin(), r.num.terms.end());
        } else {
          acc += r;
        }
      }
      return acc + RatFunc(Poly::from_terms(std::move(plain)));
    }
    case Op::Mul: {
      RatFunc acc(1);
      for (const Expr& a : e.args()) {
        acc *= to_ratfunc(a);
        if (acc.is_zero()) break;
      }
      return acc;
    }
    case Op::Pow: {
      const RatFunc base = to_ratfunc(e.args()[0]);
      const RatFunc ex = to_ratfunc(e.args()[1]);
      if (ex.is_constant() && is_integer(ex.constant_value())) {
        return pow(base, static_cast<int>(to_long(ex.constant_value())));
      }
      if (!ex.is_poly()) throw std::domain_error("non-polynomial exponent");
      return exp_of(ln_of(base) * ex.num);
    }
    case Op::Fn: {
      const RatFunc a = to_ratfunc(e.args()[0]);
      if (e.fn() == Fn::Ln) return RatFunc(ln_of(a));
      if (!a.is_poly()) throw std::domain_error(std::string(fn_name(e.fn())) + " of a non-polynomial argument");
      const Poly& p = a.num;
      switch (e.fn()) {
        case Fn::Exp: return exp_of(p);
        case Fn::Sinh: return (exp_of(p) - exp_of(-p)) * RatFunc(make_rational(1, 2));
        case Fn::Cosh: return (exp_of(p) + exp_of(-p)) * RatFunc(make_rational(1, 2));
        case Fn::Tanh: {
          const RatFunc e2 = exp_of(p.scaled(2));
          return (e2 - RatFunc(1)) / (e2 + RatFunc(1));
        }
        default: break;
      }
    }
  }
  throw std::logic_error("unreachable expression node");
}

inline Expr from_poly(const Poly& p);

inline Expr from_atom(AtomId a) {
  const AtomInfo& info = atom_info(a);
  switch (info.kind) {
    case AtomKind::Symbol: return Expr(Symbol(a));
    case AtomKind::Exp: return exp(from_poly(*info.arg));
    case AtomKind::Ln: return ln(from_poly(*info.arg));
  }
  return {};
}

inline Expr from_poly(const Poly& p) {
  if (p.is_zero()) return Expr(0);
  std::vector<Expr> terms;
  for (const Poly::Term* t : print_order(p)) {
    std::vector<Expr> factors;
    if (!is_one(t->second) || t->first.empty()) factors.emplace_back(t->second);
    for (auto [a, e] : detail::print_sorted(t->first)) {
      Expr base = from_atom(a);
      factors.push_back(e == 1 ? base : Expr::make(Op::Pow, {base, Expr(static_cast<long>(e))}));
    }
    terms.push_back(factors.size() == 1 ? factors[0] : Expr::make(Op::Mul, std::move(factors)));
  }
  return terms.size() == 1 ? terms[0] : Expr::make(Op::Add, std::move(terms));
}

inline Expr from_ratfunc(const RatFunc& r) {
  if (r.is_poly()) return from_poly(r.num);
  Expr num = from_poly(r.num);
  Expr den = Expr::make(Op::Pow, {from_poly(r.den), Expr(-1)});
  if (num.op() == Op::Mul) {
    std::vector<Expr> f = num.args();
    f.push_back(den);
    return Expr::make(Op::Mul, std::move(f));
  }
  return Expr::make(Op::Mul, {num, den});
}

/// Canonical form: hyperbolics via exp, common denominator, merged terms.
inline Expr normalize(const Expr& e) { return from_ratfunc(to_ratfunc(e)); }

inline bool is_zero(const Expr& e) { return to_ratfunc(e).is_zero(); }
inline bool equivalent(const Expr& a, const Expr& b) { return equal(to_ratfunc(a), to_ratfunc(b)); }

// ---------------------------------------------------------------- calculus

inline Expr differentiate(const Expr& e, Symbol s) { return from_ratfunc(diff(to_ratfunc(e), s.id())); }

/// D_dir: explicit dependence plus the chain rule through dependent
/// variables and jets.
inline RatFunc total_derivative(const RatFunc& r, Symbol dir) {
  std::set<AtomId> syms;
  collect_symbols(r.num, syms);
  collect_symbols(r.den, syms);
  RatFunc out;
  for (AtomId a : syms) {
    const AtomInfo& info = atom_info(a);
    if (a == dir.id()) {
      out += diff(r, a);
    } else if (info.symbol_kind == SymbolKind::Dependent || info.symbol_kind == SymbolKind::Jet) {
      const RatFunc d = diff(r, a);
      if (!d.is_zero()) out += d * RatFunc(Poly::symbol(sym::jet(Symbol(a), dir)));
    }
  }
  return out;
}

inline Expr total_derivative(const Expr& e, Symbol dir) {
  return from_ratfunc(total_derivative(to_ratfunc(e), dir));
}

inline Subst to_subst(const std::map<Symbol, Expr>& bindings) {
  Subst s;
  for (const auto& [k, v] : bindings) s.emplace(k.id(), to_ratfunc(v));
  return s;
}

/// Simultaneous substitution followed by normalization.
inline Expr substitute(const Expr& e, const std::map<Symbol, Expr>& bindings) {
  return from_ratfunc(substitute(to_ratfunc(e), to_subst(bindings)));
}

/// Monomial/coefficient pairs in print order.
inline std::vector<std::pair<Expr, Expr>> collect(const Expr& e, const std::vector<Symbol>& basis) {
  std::vector<AtomId> ids;
  for (Symbol s : basis) ids.push_back(s.id());
  auto m = collect(to_ratfunc(e), ids);
  Poly keys;
  for (const auto& [k, v] : m) keys.terms.emplace_back(k, Rational(1));
  std::vector<std::pair<Expr, Expr>> out;
  for (const Poly::Term* t : print_order(keys)) {
    out.emplace_back(from_poly(Poly::term(1, t->first)), from_ratfunc(m.at(t->first)));
  }
  return out;
}

// ---------------------------------------------------------------- numerics

/// Direct tree evaluation (does not go through the normal form).
inline double evaluate(const Expr& e, const NumericEnv& env) {
  switch (e.op()) {
    case Op::Num: return e.value().get_d();
    case Op::Sym: return env.atom(e.symbol().id());
    case Op::Add: {
      double s = 0;
      for (const Expr& a : e.args()) s += evaluate(a, env);
      return s;
    }
    case Op::Mul: {
      double s = 1;
      for (const Expr& a : e.args()) s *= evaluate(a, env);
      return s;
    }
    case Op::Pow: return std::pow(evaluate(e.args()[0], env), evaluate(e.args()[1], env));
    case Op::Fn: {
      const double a = evaluate(e.args()[0], env);
      switch (e.fn()) {
        case Fn::Exp: return std::exp(a);
        case Fn::Ln: return std::log(a);
        case Fn::Sinh: return std::sinh(a);
        case Fn::Cosh: return std::cosh(a);
        case Fn::Tanh: return std::tanh(a);
      }
    }
  }
  return 0;
}

// ----------------------------------------------------------------- printing

namespace detail {

inline int precedence(const Expr& e) {
  switch (e.op()) {
    case Op::Add: return 1;
    case Op::Mul: return 2;
    case Op::Pow: return 3;
    case Op::Num:
      if (sgn(e.value()) < 0 || !is_integer(e.value())) return 2;
      return 4;
    default: return 4;
  }
}

inline bool negative_factor(const Expr& e) {
  if (e.is_num()) return sgn(e.value()) < 0;
  return e.op() == Op::Mul && !e.args().empty() && e.args()[0].is_num() &&
         sgn(e.args()[0].value()) < 0;
}

std::string print(const Expr& e);

inline std::string wrap(const Expr& e, int min_prec) {
  const std::string s = print(e);
  return precedence(e) < min_prec ? "(" + s + ")" : s;
}

inline std::string print_mul(const std::vector<Expr>& args) {
  std::string num;
  std::vector<Expr> den;
  for (const Expr& a : args) {
    if (a.op() == Op::Pow && a.args()[1].is_num() && sgn(a.args()[1].value()) < 0) {
      den.push_back(a.args()[1].is_num(-1) ? a.args()[0]
                                           : pow(a.args()[0], Expr(Rational(-a.args()[1].value()))));
      continue;
    }
    if (!num.empty()) num += "*";
    num += wrap(a, 3);
  }
  if (num.empty()) num = "1";
  if (den.empty()) return num;
  if (den.size() == 1) return num + "/" + wrap(den[0], 3);
  std::string d;
  for (const Expr& a : den) d += (d.empty() ? "" : "*") + wrap(a, 3);
  return num + "/(" + d + ")";
}

inline std::string print(const Expr& e) {
  switch (e.op()) {
    case Op::Num: return to_string(e.value());
    case Op::Sym: return e.symbol().name();
    case Op::Add: {
      std::string out;
      bool first = true;
      for (const Expr& a : e.args()) {
        if (!first && negative_factor(a)) {
          out += " - " + wrap(-a, 2);
        } else {
          if (!first) out += " + ";
          out += wrap(a, 1);
        }
        first = false;
      }
      return out;
    }
    case Op::Mul: {
      const auto& args = e.args();
      if (args.size() >= 2 && args[0].is_num() && sgn(args[0].value()) < 0) {
        std::vector<Expr> rest = args;
        rest[0] = Expr(Rational(-args[0].value()));
        if (rest[0].is_num(1)) rest.erase(rest.begin());
        return "-" + (rest.size() == 1 ? wrap(rest[0], 3) : print_mul(rest));
      }
      return print_mul(args);
    }
    case Op::Pow: return wrap(e.args()[0], 4) + "^" + wrap(e.args()[1], 4);
    case Op::Fn: return std::string(fn_name(e.fn())) + "(" + print(e.args()[0]) + ")";
  }
  return "?";
}

}  // namespace detail

inline std::string to_string(const Expr& e) { return detail::print(e); }

// ------------------------------------------------------------------ parsing

namespace detail {

class Parser {
 public:
  explicit Parser(std::string_view text) : s_(text) {}

  Expr parse() {
    Expr e = sum();
    skip();
    if (pos_ != s_.size()) fail("unexpected character");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw std::invalid_argument("parse error at " + std::to_string(pos_) + ": " + what + " in '" +
                                std::string(s_) + "'");
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Expr sum() {
    Expr e = product();
    for (;;) {
      if (eat('+')) {
        e = e + product();
      } else if (eat('-')) {
        e = e - product();
      } else {
        return e;
      }
    }
  }
  Expr product() {
    Expr e = unary();
    for (;;) {
      if (eat('*')) {
        e = e * unary();
      } else if (eat('/')) {
        e = e / unary();
      } else {
        return e;
      }
    }
  }
  Expr unary() {
    if (eat('-')) return -unary();
    if (eat('+')) return unary();
    return power();
  }
  Expr power() {
    Expr base = primary();
    if (eat('^')) return pow(base, unary());
    return base;
  }
  Expr primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end");
    const char c = s_[pos_];
    if (eat('(')) {
      Expr e = sum();
      if (!eat(')')) fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    fail("unexpected character");
  }
  Expr number() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    std::string digits(s_.substr(start, pos_ - start));
    long scale = 0;
    if (pos_ < s_.size() && s_[pos_] == '.') {
      ++pos_;
      const std::size_t f = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      digits += std::string(s_.substr(f, pos_ - f));
      scale -= static_cast<long>(pos_ - f);
    }
    if (digits.empty()) fail("malformed number");
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E') && pos_ + 1 < s_.size() &&
        (std::isdigit(static_cast<unsigned char>(s_[pos_ + 1])) || s_[pos_ + 1] == '-' || s_[pos_ + 1] == '+')) {
      ++pos_;
      const std::size_t f = pos_;
      if (s_[pos_] == '-' || s_[pos_] == '+') ++pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      scale += std::stol(std::string(s_.substr(f, pos_ - f)));
    }
    Rational r(mpz_class(digits, 10));
    mpz_class ten;
    mpz_ui_pow_ui(ten.get_mpz_t(), 10, static_cast<unsigned long>(std::labs(scale)));
    r = scale >= 0 ? Rational(r * ten) : Rational(r / ten);
    r.canonicalize();
    return Expr(r);
  }
  Expr identifier() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) {
      ++pos_;
    }
    const std::string name(s_.substr(start, pos_ - start));
    static const std::map<std::string, Fn> fns = {{"exp", Fn::Exp},   {"ln", Fn::Ln},
                                                  {"log", Fn::Ln},    {"sinh", Fn::Sinh},
                                                  {"cosh", Fn::Cosh}, {"tanh", Fn::Tanh}};
    if (auto it = fns.find(name); it != fns.end()) {
      if (!eat('(')) fail("expected '(' after " + name);
      Expr arg = sum();
      if (!eat(')')) fail("expected ')'");
      return Expr::apply(it->second, arg);
    }
    if (name == "Psi") return Expr(sym::psi());
    return Expr(sym::lookup_or_parameter(name));
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline Expr parse(std::string_view text) { return detail::Parser(text).parse(); }

}  // namespace rhsym

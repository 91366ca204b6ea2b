#pragma once

// The 1+1 heat-conducting fluid: residuals, time-derivative form, numeric
// evaluation and parameter files.

#include <array>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "rhsym/expr.hpp"

namespace rhsym {

enum class Theory { Eckart, IsraelStewart };

inline const char* theory_name(Theory t) { return t == Theory::Eckart ? "eckart" : "israel-stewart"; }

inline Theory parse_theory(const std::string& s) {
  if (s == "eckart") return Theory::Eckart;
  if (s == "israel-stewart" || s == "is") return Theory::IsraelStewart;
  throw std::invalid_argument("unknown theory '" + s + "' (expected eckart or israel-stewart)");
}

struct FluidParams {
  // Unset k or kappa keeps the parameter symbolic.
  std::optional<Rational> k;
  std::optional<Rational> kappa;
  Rational lambda = 0;
  // Numeric modules only.
  double N0 = 1.0;
  double E0 = 1.0;

  static FluidParams for_theory(Theory t) {
    FluidParams p;
    p.lambda = t == Theory::Eckart ? 0 : 1;
    return p;
  }

  Expr k_expr() const { return k ? Expr(*k) : Expr(sym::parameter("k")); }
  Expr kappa_expr() const { return kappa ? Expr(*kappa) : Expr(sym::parameter("kappa")); }
  double k_value() const { return k ? k->get_d() : 1.0; }
  double kappa_value() const { return kappa ? kappa->get_d() : 1.0; }

  void validate() const {
    if (k && sgn(*k) <= 0) throw std::invalid_argument("k must be positive");
    if (kappa && sgn(*kappa) <= 0) throw std::invalid_argument("kappa must be positive");
    if (lambda < 0 || lambda > 1) throw std::invalid_argument("lambda must lie in [0, 1]");
    if (!(N0 > 0) || !(E0 > 0)) throw std::invalid_argument("N0 and E0 must be positive");
  }
};

/// Parses flat `key = value` text (keys k, kappa, lambda, N0, E0; '#' starts
/// a comment). Values are exact decimals or p/q.
inline FluidParams parse_params(std::istream& in, FluidParams base = {}) {
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    const auto eq = line.find('=');
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    if (trim(line).empty()) continue;
    if (eq == std::string::npos) {
      throw std::invalid_argument("params line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    const Expr v = parse(val);
    if (!v.is_num()) throw std::invalid_argument("params line " + std::to_string(lineno) + ": not a number");
    const Rational r = v.value();
    if (key == "k") {
      base.k = r;
    } else if (key == "kappa" || key == "chi") {
      base.kappa = r;
    } else if (key == "lambda") {
      base.lambda = r;
    } else if (key == "N0") {
      base.N0 = r.get_d();
    } else if (key == "E0") {
      base.E0 = r.get_d();
    } else {
      throw std::invalid_argument("params line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
  }
  base.validate();
  return base;
}

inline FluidParams load_params(const std::string& path, FluidParams base = {}) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open params file: " + path);
  return parse_params(f, std::move(base));
}

/// Jet symbols in the fixed order psi_t, psi_x, n_t, n_x, rho_t, rho_x, q_t, q_x.
inline std::array<Symbol, 4> dependent_vars() { return {sym::psi(), sym::n(), sym::rho(), sym::q()}; }
inline std::array<Symbol, 4> time_jets() {
  auto d = dependent_vars();
  return {sym::jet(d[0], sym::t()), sym::jet(d[1], sym::t()), sym::jet(d[2], sym::t()),
          sym::jet(d[3], sym::t())};
}
inline std::array<Symbol, 4> space_jets() {
  auto d = dependent_vars();
  return {sym::jet(d[0], sym::x()), sym::jet(d[1], sym::x()), sym::jet(d[2], sym::x()),
          sym::jet(d[3], sym::x())};
}

struct PDESystem {
  std::array<Expr, 4> residuals;
  std::array<RatFunc, 4> normal;
  FluidParams params;
};

/// The four residuals with p = rho/3, T = rho/(3 n k) and
/// beta1 = 15 lambda/(4 rho) substituted.
inline PDESystem build_system(const FluidParams& params) {
  params.validate();
  const Expr psi = sym::psi(), n = sym::n(), rho = sym::rho(), q = sym::q();
  const auto tj = time_jets();
  const auto xj = space_jets();
  const Expr psi_t = tj[0], n_t = tj[1], rho_t = tj[2], q_t = tj[3];
  const Expr psi_x = xj[0], n_x = xj[1], rho_x = xj[2], q_x = xj[3];
  const Expr s = sinh(psi), c = cosh(psi);
  const Expr p = rho / 3, p_t = rho_t / 3, p_x = rho_x / 3;
  const Expr beta1 = Expr(params.lambda) * rat(15, 4) / rho;
  const Expr k = params.k_expr(), kappa = params.kappa_expr();

  PDESystem sys;
  sys.params = params;
  sys.residuals[0] = s * n_x - c * n_t + n * c * psi_x - n * s * psi_t;
  sys.residuals[1] = c * rho_t - s * rho_x + s * q_t - c * q_x +
                     ((p + rho) * s + 2 * q * c) * psi_t - ((p + rho) * c + 2 * q * s) * psi_x;
  sys.residuals[2] = c * p_x - s * p_t + s * q_x - c * q_t - ((p + rho) * c + 2 * q * s) * psi_t +
                     ((p + rho) * s + 2 * q * c) * psi_x;
  // T^-1 dT = drho/rho - dn/n, q/(kappa T) = 3 n k q/(kappa rho).
  sys.residuals[3] = c * (rho_x / rho - n_x / n) - s * (rho_t / rho - n_t / n) +
                     beta1 * (s * q_x - c * q_t) + s * psi_x - c * psi_t +
                     3 * n * k * q / (kappa * rho);
  for (int i = 0; i < 4; ++i) {
    sys.normal[i] = to_ratfunc(sys.residuals[i]);
    sys.residuals[i] = from_ratfunc(sys.normal[i]);
  }
  return sys;
}

inline PDESystem build_system(Theory t) { return build_system(FluidParams::for_theory(t)); }

/// Determinant of a small square matrix by cofactor expansion.
inline RatFunc determinant(const std::vector<std::vector<RatFunc>>& m) {
  const std::size_t n = m.size();
  if (n == 1) return m[0][0];
  if (n == 2) return m[0][0] * m[1][1] - m[0][1] * m[1][0];
  RatFunc det;
  for (std::size_t j = 0; j < n; ++j) {
    if (m[0][j].is_zero()) continue;
    std::vector<std::vector<RatFunc>> minor;
    for (std::size_t r = 1; r < n; ++r) {
      std::vector<RatFunc> row;
      for (std::size_t c = 0; c < n; ++c) {
        if (c != j) row.push_back(m[r][c]);
      }
      minor.push_back(std::move(row));
    }
    const RatFunc term = m[0][j] * determinant(minor);
    det = (j % 2 == 0) ? det + term : det - term;
  }
  return det;
}

/// Time derivatives as u_t = numer[u] / det, with the x-jets left free.
struct TimeForm {
  Poly det;
  std::array<Poly, 4> numer;  // in the order psi_t, n_t, rho_t, q_t
  std::array<Symbol, 4> jets = time_jets();

  RatFunc value(std::size_t i) const { return RatFunc(numer[i], det); }
};

/// Cramer solution of the quasilinear system for the time derivatives.
inline TimeForm quasilinear_time_form(const PDESystem& sys) {
  const auto tj = time_jets();
  std::vector<std::vector<RatFunc>> mat(4, std::vector<RatFunc>(4));
  std::array<RatFunc, 4> rhs;
  Subst zero;
  for (Symbol j : tj) zero.emplace(j.id(), RatFunc());
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) mat[r][c] = diff(sys.normal[r], tj[c].id());
    rhs[r] = -substitute(sys.normal[r], zero);
  }
  TimeForm tf;
  const RatFunc det = determinant(mat);
  if (det.is_zero()) throw std::domain_error("characteristic degeneracy: time coefficient matrix is singular");
  if (!det.is_poly()) throw std::logic_error("unexpected rational determinant");
  tf.det = det.num;
  for (int c = 0; c < 4; ++c) {
    auto m = mat;
    for (int r = 0; r < 4; ++r) m[r][c] = rhs[r];
    const RatFunc d = determinant(m);
    if (!d.is_poly()) throw std::logic_error("unexpected rational cofactor");
    tf.numer[c] = d.num;
  }
  return tf;
}

struct FluidState {
  double psi = 0, n = 1, rho = 1, q = 0;
  double v() const { return std::tanh(psi); }
};

struct Jets {
  double psi_t = 0, psi_x = 0, n_t = 0, n_x = 0, rho_t = 0, rho_x = 0, q_t = 0, q_x = 0;
};

inline NumericEnv numeric_env(const PDESystem& sys, const FluidState& s, const Jets& j) {
  NumericEnv env;
  env.set(sym::psi(), s.psi);
  env.set(sym::n(), s.n);
  env.set(sym::rho(), s.rho);
  env.set(sym::q(), s.q);
  const auto tj = time_jets();
  const auto xj = space_jets();
  env.set(tj[0], j.psi_t);
  env.set(xj[0], j.psi_x);
  env.set(tj[1], j.n_t);
  env.set(xj[1], j.n_x);
  env.set(tj[2], j.rho_t);
  env.set(xj[2], j.rho_x);
  env.set(tj[3], j.q_t);
  env.set(xj[3], j.q_x);
  env.set(sym::parameter("k"), sys.params.k_value());
  env.set(sym::parameter("kappa"), sys.params.kappa_value());
  return env;
}

inline std::array<double, 4> residual_at(const PDESystem& sys, const FluidState& s, const Jets& j) {
  if (!(s.n > 0) || !(s.rho > 0)) throw std::domain_error("residual_at requires n > 0 and rho > 0");
  const NumericEnv env = numeric_env(sys, s, j);
  std::array<double, 4> out{};
  for (int i = 0; i < 4; ++i) out[i] = env.eval(sys.normal[i]);
  return out;
}

}  // namespace rhsym

#pragma once

// Exact rational linear algebra: reduced row echelon form and nullspaces.

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rhsym/expr.hpp"

namespace rhsym {

using RVector = std::vector<Rational>;
using RMatrix = std::vector<RVector>;

/// In-place reduced row echelon form; returns pivot columns. Zero rows are
/// dropped.
inline std::vector<std::size_t> rref(RMatrix& m, std::size_t cols) {
  std::vector<std::size_t> pivots;
  std::size_t row = 0;
  for (std::size_t c = 0; c < cols && row < m.size(); ++c) {
    std::size_t p = row;
    while (p < m.size() && is_zero(m[p][c])) ++p;
    if (p == m.size()) continue;
    std::swap(m[p], m[row]);
    const Rational inv = 1 / m[row][c];
    for (std::size_t k = c; k < cols; ++k) m[row][k] *= inv;
    for (std::size_t r = 0; r < m.size(); ++r) {
      if (r == row || is_zero(m[r][c])) continue;
      const Rational f = m[r][c];
      for (std::size_t k = c; k < cols; ++k) m[r][k] -= f * m[row][k];
    }
    pivots.push_back(c);
    ++row;
  }
  m.resize(row);
  return pivots;
}

inline std::size_t rank(RMatrix m, std::size_t cols) { return rref(m, cols).size(); }

/// Basis of {v : m v = 0}, one vector per free column in increasing order.
inline RMatrix nullspace(RMatrix m, std::size_t cols) {
  const auto pivots = rref(m, cols);
  std::vector<bool> is_pivot(cols, false);
  for (auto p : pivots) is_pivot[p] = true;
  RMatrix basis;
  for (std::size_t f = 0; f < cols; ++f) {
    if (is_pivot[f]) continue;
    RVector v(cols, Rational(0));
    v[f] = 1;
    for (std::size_t r = 0; r < pivots.size(); ++r) v[pivots[r]] = -m[r][f];
    basis.push_back(std::move(v));
  }
  return basis;
}

/// Coefficients of linear homogeneous forms in the given unknowns.
inline RMatrix linear_rows(const std::vector<Poly>& forms, const std::vector<AtomId>& unknowns) {
  RMatrix rows;
  for (const Poly& f : forms) {
    RVector row(unknowns.size(), Rational(0));
    for (const auto& [m, c] : f.terms) {
      if (m.size() != 1 || m[0].second != 1) {
        throw std::invalid_argument("nonlinear or inhomogeneous term in linear form: " + to_string(f));
      }
      std::size_t idx = unknowns.size();
      for (std::size_t i = 0; i < unknowns.size(); ++i) {
        if (unknowns[i] == m[0].first) idx = i;
      }
      if (idx == unknowns.size()) {
        throw std::invalid_argument("term outside the unknowns in linear form: " + to_string(f));
      }
      row[idx] += c;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

/// Nullspace of linear forms given as expressions in unknown constants.
inline RMatrix nullspace(const std::vector<Expr>& forms, const std::vector<Symbol>& unknowns) {
  std::vector<Poly> polys;
  for (const Expr& e : forms) {
    const RatFunc r = to_ratfunc(e);
    if (!r.is_poly()) throw std::invalid_argument("linear form with a denominator");
    polys.push_back(r.num);
  }
  std::vector<AtomId> ids;
  for (Symbol s : unknowns) ids.push_back(s.id());
  return nullspace(linear_rows(polys, ids), unknowns.size());
}

/// Solves a x = b exactly (a given as columns); nullopt if inconsistent.
inline std::optional<RVector> solve_columns(const RMatrix& columns, const RVector& b) {
  const std::size_t n = columns.size();
  RMatrix aug(b.size(), RVector(n + 1, Rational(0)));
  for (std::size_t r = 0; r < b.size(); ++r) {
    for (std::size_t c = 0; c < n; ++c) aug[r][c] = columns[c][r];
    aug[r][n] = b[r];
  }
  const auto piv = rref(aug, n + 1);
  if (!piv.empty() && piv.back() == n) return std::nullopt;
  RVector x(n, Rational(0));
  for (std::size_t r = 0; r < piv.size(); ++r) x[piv[r]] = aug[r][n];
  return x;
}

/// Intersection of two subspaces given by spanning rows.
inline RMatrix intersect(const RMatrix& a, const RMatrix& b, std::size_t dim) {
  // Solve sum x_i a_i - sum y_j b_j = 0 and map back through a.
  if (a.empty() || b.empty()) return {};
  const std::size_t na = a.size(), nb = b.size();
  RMatrix sys(dim, RVector(na + nb, Rational(0)));
  for (std::size_t r = 0; r < dim; ++r) {
    for (std::size_t i = 0; i < na; ++i) sys[r][i] = a[i][r];
    for (std::size_t j = 0; j < nb; ++j) sys[r][na + j] = -b[j][r];
  }
  RMatrix out;
  for (const RVector& k : nullspace(sys, na + nb)) {
    RVector v(dim, Rational(0));
    for (std::size_t i = 0; i < na; ++i) {
      for (std::size_t r = 0; r < dim; ++r) v[r] += k[i] * a[i][r];
    }
    out.push_back(std::move(v));
  }
  rref(out, dim);
  return out;
}

}  // namespace rhsym

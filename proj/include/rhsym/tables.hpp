#pragma once

// Commutator and adjoint tables as text, golden-file parsing and cell-wise
// comparison.

#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "rhsym/liealg.hpp"

namespace rhsym {

struct Table {
  std::string corner;                   // "[,]" or "Ad"
  std::vector<std::string> columns;     // V1..Vn
  std::vector<std::string> rows;        // V1..Vn
  std::vector<std::vector<std::string>> cells;
};

inline Table commutator_table(const LieAlgebra& alg) {
  Table t;
  t.corner = "[,]";
  t.columns = alg.names;
  t.rows = alg.names;
  for (std::size_t i = 0; i < alg.dim(); ++i) {
    std::vector<std::string> row;
    for (std::size_t j = 0; j < alg.dim(); ++j) row.push_back(element_text(alg.c[i][j], alg.names));
    t.cells.push_back(row);
  }
  return t;
}

/// Row i, column j: Ad(exp(eps V_i)) V_j.
inline Table adjoint_table(const LieAlgebra& alg) {
  Table t;
  t.corner = "Ad";
  t.columns = alg.names;
  t.rows = alg.names;
  for (std::size_t i = 0; i < alg.dim(); ++i) {
    std::vector<std::string> row;
    for (std::size_t j = 0; j < alg.dim(); ++j) {
      RVector e(alg.dim(), Rational(0));
      e[j] = 1;
      const auto img = adjoint_action_symbolic(alg, i, e);
      row.push_back(img ? element_text(*img, alg.names) : std::string("?"));
    }
    t.cells.push_back(row);
  }
  return t;
}

enum class TableFormat { Text, Csv };

inline void write_table(std::ostream& os, const Table& t, TableFormat f = TableFormat::Text) {
  const char* sep = f == TableFormat::Csv ? "," : " | ";
  std::vector<std::vector<std::string>> all;
  all.push_back({t.corner});
  all[0].insert(all[0].end(), t.columns.begin(), t.columns.end());
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    std::vector<std::string> r = {t.rows[i]};
    r.insert(r.end(), t.cells[i].begin(), t.cells[i].end());
    all.push_back(r);
  }
  std::vector<std::size_t> width(all[0].size(), 0);
  for (const auto& r : all) {
    for (std::size_t j = 0; j < r.size(); ++j) width[j] = std::max(width[j], r[j].size());
  }
  for (const auto& r : all) {
    for (std::size_t j = 0; j < r.size(); ++j) {
      if (j) os << sep;
      os << r[j];
      if (f == TableFormat::Text && j + 1 < r.size()) os << std::string(width[j] - r[j].size(), ' ');
    }
    os << '\n';
  }
}

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  const auto e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_cells(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto bar = line.find('|', start);
    out.push_back(trim(line.substr(start, bar == std::string::npos ? std::string::npos : bar - start)));
    if (bar == std::string::npos) break;
    start = bar + 1;
  }
  return out;
}

}  // namespace detail

/// Reads a '|'-separated table; '#' lines and blank lines are skipped.
inline Table read_table(std::istream& in) {
  Table t;
  std::string line;
  bool header = true;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string s = detail::trim(line);
    if (s.empty() || s[0] == '#') continue;
    auto cells = detail::split_cells(s);
    if (header) {
      t.corner = cells[0];
      t.columns.assign(cells.begin() + 1, cells.end());
      header = false;
      continue;
    }
    if (cells.size() != t.columns.size() + 1) {
      throw std::invalid_argument("table line " + std::to_string(lineno) + ": expected " +
                                  std::to_string(t.columns.size() + 1) + " cells");
    }
    t.rows.push_back(cells[0]);
    t.cells.emplace_back(cells.begin() + 1, cells.end());
  }
  if (header) throw std::invalid_argument("empty table");
  return t;
}

/// Coefficients of a cell "c1*V1 + ..." in the names; throws when the cell
/// is not linear in them.
inline std::vector<Expr> cell_coefficients(const std::string& cell, const std::vector<std::string>& names) {
  const Expr e = parse(cell);
  std::vector<Expr> out;
  Expr rest = e;
  for (const std::string& n : names) {
    const Symbol s = sym::lookup_or_parameter(n);
    const Expr c = differentiate(e, s);
    for (const std::string& m : names) {
      if (!is_zero(differentiate(c, sym::lookup_or_parameter(m)))) {
        throw std::invalid_argument("cell '" + cell + "' is not linear in the basis");
      }
    }
    out.push_back(c);
    rest = rest - c * Expr(s);
  }
  if (!is_zero(rest)) throw std::invalid_argument("cell '" + cell + "' has a part outside the basis");
  return out;
}

struct CellMismatch {
  std::string row, column, expected, actual;
};

inline std::string describe(const CellMismatch& m) {
  return "cell (" + m.row + ", " + m.column + "): expected " + m.expected + ", got " + m.actual;
}

/// Cell-by-cell comparison of coefficients (symbolic equivalence).
inline std::vector<CellMismatch> compare_tables(const Table& golden, const Table& actual) {
  if (golden.columns != actual.columns || golden.rows != actual.rows) {
    throw std::invalid_argument("tables have different shapes or labels");
  }
  std::vector<CellMismatch> out;
  for (std::size_t i = 0; i < golden.rows.size(); ++i) {
    for (std::size_t j = 0; j < golden.columns.size(); ++j) {
      bool same = false;
      try {
        const auto a = cell_coefficients(golden.cells[i][j], golden.columns);
        const auto b = cell_coefficients(actual.cells[i][j], golden.columns);
        same = true;
        for (std::size_t k = 0; k < a.size(); ++k) same = same && equivalent(a[k], b[k]);
      } catch (const std::invalid_argument&) {
        same = false;
      }
      if (!same) out.push_back({golden.rows[i], golden.columns[j], golden.cells[i][j], actual.cells[i][j]});
    }
  }
  return out;
}

/// Basis fixture: one "Vk = field" line per element, fields written as in
/// to_string(VectorField), e.g. "V3 = rho*d/drho + q*d/dq".
struct BasisFixture {
  std::vector<std::string> names;
  std::vector<VectorField> fields;
};

inline VectorField parse_field(const std::string& text) {
  VectorField v;
  const auto vars = base_vars();
  std::string s = text;
  for (std::size_t i = 0; i < vars.size(); ++i) {
    const std::string tag = "d/d" + vars[i].name();
    std::size_t pos;
    while ((pos = s.find(tag)) != std::string::npos) s.replace(pos, tag.size(), "D" + std::to_string(i) + "_");
  }
  const Expr e = parse(s);
  Expr rest = e;
  for (std::size_t i = 0; i < vars.size(); ++i) {
    const Symbol d = sym::lookup_or_parameter("D" + std::to_string(i) + "_");
    const Expr c = differentiate(e, d);
    v.coef[i] = to_ratfunc(c);
    rest = rest - c * Expr(d);
  }
  if (!is_zero(rest)) throw std::invalid_argument("not a vector field: '" + text + "'");
  return v;
}

inline BasisFixture read_basis(std::istream& in) {
  BasisFixture b;
  std::string line;
  while (std::getline(in, line)) {
    const std::string s = detail::trim(line);
    if (s.empty() || s[0] == '#') continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("basis line without '=': " + s);
    b.names.push_back(detail::trim(s.substr(0, eq)));
    b.fields.push_back(parse_field(detail::trim(s.substr(eq + 1))));
  }
  return b;
}

}  // namespace rhsym

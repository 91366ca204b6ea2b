// rhsym: symmetries, algebra tables, reductions and numeric runs for the
// 1+1 heat-conducting relativistic fluid.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rhsym/checks.hpp"

#ifndef RHSYM_GOLDEN_DIR
#define RHSYM_GOLDEN_DIR "tests/golden"
#endif

using namespace rhsym;

namespace {

constexpr int kOk = 0;
constexpr int kCheckFailed = 1;
constexpr int kUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Globals {
  std::string theory = "eckart";
  std::string params_file;
  std::string format = "text";
  std::uint64_t seed = 0;
  std::string out;
};

Theory theory_of(const Globals& g) {
  try {
    return parse_theory(g.theory);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

FluidParams params_of(const Globals& g) {
  FluidParams p = FluidParams::for_theory(theory_of(g));
  if (!g.params_file.empty()) {
    std::ifstream in(g.params_file);
    if (!in) throw std::runtime_error("cannot read params file " + g.params_file);
    p = parse_params(in, p);
  }
  p.validate();
  return p;
}

bool csv(const Globals& g) { return g.format == "csv"; }

/// Writes to --out when given, else to stdout.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw std::runtime_error("cannot write " + path);
    }
  }
  std::ostream& os() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }
  bool to_file() const { return file_.is_open(); }

 private:
  std::ofstream file_;
};

Rational parse_rational(const std::string& s) {
  const Expr e = parse(s);
  if (!e.is_num()) throw UsageError("not a rational number: " + s);
  return e.value();
}

// ------------------------------------------------------------ commands

void dump_determining(const std::string& path, FluidParams p, const Ansatz& ansatz) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  // Symbolic k and kappa: the first instantiation used by the solver.
  if (!p.k) p.k = 1;
  if (!p.kappa) p.kappa = 1;
  const DeterminingSystem ds = determining_equations(build_system(p), ansatz);
  f << "# k = " << to_string(*p.k) << ", kappa = " << to_string(*p.kappa) << ", lambda = " << to_string(p.lambda)
    << "\n# cleared denominator: " << ds.cleared << "\n# " << ds.rows.size() << " rows over " << ds.unknowns
    << " unknowns\n";
  for (std::size_t i = 0; i < ds.rows.size(); ++i) {
    f << ds.labels[i] << ":";
    bool any = false;
    for (std::size_t j = 0; j < ds.rows[i].size(); ++j) {
      const Rational& c = ds.rows[i][j];
      if (is_zero(c)) continue;
      f << (any ? (sgn(c) < 0 ? " - " : " + ") : (sgn(c) < 0 ? " -" : " "));
      const Rational m = abs(c);
      if (!is_one(m)) f << to_string(m) << "*";
      f << ansatz.unknowns[j].name();
      any = true;
    }
    f << (any ? "" : " 0") << " = 0\n";
  }
}

int cmd_symmetries(const Globals& g, int degree, const std::string& dump) {
  const Theory th = theory_of(g);
  const FluidParams p = params_of(g);
  const Ansatz ansatz(degree);
  const PDESystem sys = build_system(p);
  if (!dump.empty()) dump_determining(dump, p, ansatz);
  const auto found = solve_determining(sys, ansatz);
  const auto lit = literature_basis(th);
  Output out(g.out);
  auto& os = out.os();
  if (csv(g)) {
    os << "index,d_t,d_x,d_psi,d_n,d_rho,d_q\n";
    for (std::size_t i = 0; i < found.size(); ++i) {
      os << i + 1;
      for (int k = 0; k < 6; ++k) os << ',' << to_string(found[i].expr(k));
      os << '\n';
    }
    return kOk;
  }
  os << theory_label(th) << " point symmetries (polynomial ansatz of degree " << degree << "): dimension "
     << found.size() << "\n";
  for (std::size_t i = 0; i < found.size(); ++i) {
    os << "  X" << i + 1 << " = " << to_string(found[i]) << (is_symmetry(found[i], sys) ? "" : "  [NOT VERIFIED]")
       << "\n";
  }
  // The literature generators are affine, so compare in an ansatz holding both.
  const Ansatz common(std::max(degree, 1));
  auto spans = [&](const std::vector<VectorField>& x, const std::vector<VectorField>& y) {
    return same_span(x, y, common);
  };
  auto contains = [&](const std::vector<VectorField>& big, const VectorField& v) {
    auto with = big;
    with.push_back(v);
    return spans(with, big);
  };
  bool all_lit = true;
  for (const auto& v : lit) all_lit = all_lit && contains(found, v);
  os << "literature basis (" << lit.size() << " generators) contained: " << (all_lit ? "yes" : "no")
     << "; span equal: " << (spans(found, lit) ? "yes" : "no") << "\n";
  for (const auto& v : found) {
    if (!contains(lit, v)) os << "  beyond the literature basis: " << to_string(v) << "\n";
  }
  return kOk;
}

int cmd_algebra(const Globals& g, const std::string& basis_name, const std::string& normalize,
                const std::string& table) {
  const Theory th = theory_of(g);
  std::vector<VectorField> basis;
  std::vector<std::string> names;
  if (basis_name == "table") {
    basis = table_basis(th);
  } else if (basis_name == "literature") {
    basis = literature_basis(th);
  } else if (basis_name == "full") {
    basis = {fields::dt(), fields::dx(), fields::scaling_rho_q(), fields::dilation(), fields::boost()};
    names = {"dt", "dx", "S", "D", "B"};
  } else {
    throw UsageError("unknown basis '" + basis_name + "' (table, literature or full)");
  }
  const LieAlgebra alg = structure_constants(basis, names);
  Output out(g.out);
  auto& os = out.os();
  if (!table.empty()) {
    const TableFormat f = csv(g) ? TableFormat::Csv : TableFormat::Text;
    if (table == "commutator") {
      write_table(os, commutator_table(alg), f);
    } else if (table == "adjoint") {
      write_table(os, adjoint_table(alg), f);
    } else {
      throw UsageError("unknown table '" + table + "' (commutator or adjoint)");
    }
    return kOk;
  }
  if (!normalize.empty()) {
    RVector w;
    std::stringstream ss(normalize);
    std::string item;
    while (std::getline(ss, item, ',')) w.push_back(parse_rational(item));
    const std::size_t want = th == Theory::Eckart ? 4 : 3;
    if (w.size() != want) {
      throw UsageError("--normalize expects " + std::to_string(want) + " coordinates " +
                       (want == 4 ? "(dt, dx, S, D)" : "(dt, dx, D)"));
    }
    const NormalForm nf = normalize_element(w);
    const std::vector<std::string> labels =
        want == 4 ? std::vector<std::string>{"dt", "dx", "S", "D"} : std::vector<std::string>{"dt", "dx", "D"};
    os << "element: " << element_text(w, labels) << "\n";
    os << "canonical family: " << nf.form;
    if (nf.form.find('a') != std::string::npos) os << " with a = " << to_string(nf.a);
    os << "\nrepresentative: " << element_text(nf.coords, labels) << "\n";
    os << "literature entry: " << (nf.literature_entry ? std::to_string(nf.literature_entry) : std::string("none"));
    if (!nf.note.empty()) os << " (" << nf.note << ")";
    os << "\nadjoint word:";
    for (const auto& s : nf.word) os << " " << s.text;
    os << "\n";
    return kOk;
  }
  for (std::size_t i = 0; i < alg.dim(); ++i) {
    os << alg.names[i] << " = " << to_string(alg.basis[i]) << "\n";
  }
  os << "nonzero brackets:\n";
  for (std::size_t i = 0; i < alg.dim(); ++i) {
    for (std::size_t j = i + 1; j < alg.dim(); ++j) {
      const std::string e = element_text(alg.c[i][j], alg.names);
      if (e != "0") os << "  [" << alg.names[i] << ", " << alg.names[j] << "] = " << e << "\n";
    }
  }
  const Solvability s = is_solvable(alg);
  os << "Jacobi identity: " << (satisfies_jacobi(alg) ? "holds" : "FAILS") << "\n";
  os << "solvable: " << (s.solvable ? "yes" : "no") << "; derived series dimensions";
  for (auto d : s.derived_dims) os << " " << d;
  os << "\n";
  if (s.solvable) {
    os << "witness basis (deepest derived term first):\n";
    for (const auto& row : s.witness) os << "  " << element_text(row, alg.names) << "\n";
  }
  return kOk;
}

int cmd_tables(const Globals& g) {
  const Theory th = theory_of(g);
  const LieAlgebra alg = structure_constants(table_basis(th));
  Output out(g.out);
  auto& os = out.os();
  const TableFormat f = csv(g) ? TableFormat::Csv : TableFormat::Text;
  if (!csv(g)) {
    os << theory_label(th) << " algebra\n";
    for (std::size_t i = 0; i < alg.dim(); ++i) os << "  " << alg.names[i] << " = " << to_string(alg.basis[i]) << "\n";
    os << "\ncommutator table ([row, column]):\n";
  }
  write_table(os, commutator_table(alg), f);
  if (!csv(g)) os << "\nadjoint table (Ad(exp(eps*row)) column):\n";
  write_table(os, adjoint_table(alg), f);
  const auto lit = literature_optimal_list(th);
  const auto ours = minimal_optimal_list(th);
  if (csv(g)) {
    os << "literature_optimal,minimal_optimal\n";
  } else {
    os << "\noptimal system (S = rho d/drho + q d/dq, D = t d/dt + x d/dx - n d/dn)\n";
    os << std::left << std::setw(24) << "literature" << "minimal canonical\n";
  }
  for (std::size_t i = 0; i < std::max(lit.size(), ours.size()); ++i) {
    const std::string a = i < lit.size() ? std::to_string(i + 1) + ". " + lit[i] : "";
    const std::string b = i < ours.size() ? ours[i] : "";
    if (csv(g)) {
      os << a << ',' << b << "\n";
    } else {
      os << std::left << std::setw(24) << a << b << "\n";
    }
  }
  return kOk;
}

int cmd_reduce(const Globals& g, int case_id, const std::string& a_text, bool check, bool literature,
               bool dump_expr) {
  const Theory th = theory_of(g);
  const FluidParams p = params_of(g);
  try {
    check_supported(case_id, th);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  std::optional<Rational> a;
  if (!a_text.empty()) a = parse_rational(a_text);
  const ReducedSystem rs = reduced_system(case_id, th, p, a);
  Output out(g.out);
  auto& os = out.os();
  if (dump_expr) {
    for (const Expr& e : reduced_equations(rs)) os << to_string(e) << "\n";
    return kOk;
  }
  os << theory_label(th) << " case " << case_id << ": generator " << to_string(rs.inv.generator);
  if (case_id >= 4) os << " (a = " << to_string(rs.a) << ")";
  os << "\n";
  if (rs.indep != sym::t() && rs.indep != sym::x()) os << "similarity variable: y = " << to_string(rs.inv.similarity) << "\n";
  os << "invariants:";
  for (const auto& [name, e] : rs.inv.invariants) os << "  " << name << " = " << to_string(e) << ";";
  os << "\nansatz:\n";
  const char* fieldnames[] = {"psi", "n", "rho", "q"};
  for (int i = 0; i < 4; ++i) os << "  " << fieldnames[i] << " = " << to_string(rs.ansatz[i]) << "\n";
  os << "reduced system (= 0):\n";
  for (const Expr& e : reduced_equations(rs)) os << "  " << to_string(e) << "\n";
  for (const auto& [name, e] : rs.relations) os << "relation " << name << ": " << to_string(e) << "\n";
  for (const auto& [name, e] : rs.first_integrals) os << "first integral " << name << ": " << to_string(e) << "\n";
  os << "singular locus: " << to_string(from_ratfunc(rs.det)) << " = 0\n";
  if (!rs.note.empty()) os << "note: " << rs.note << "\n";
  int status = kOk;
  if (check) {
    const ReductionCheck rc = symbolic_check_reduction(rs);
    os << "residuals after substitution:";
    for (const Expr& r : rc.residuals) os << " " << to_string(r);
    os << "\nreduction check: " << (rc.zero ? "exactly zero" : "NONZERO") << "\n";
    for (const auto& [name, ok] : rc.integrals) os << "  " << name << ": " << (ok ? "conserved" : "NOT conserved") << "\n";
    if (!rc.zero) status = kCheckFailed;
  }
  if (literature) {
    if (case_id < 4 || case_id > 6) throw UsageError("literature variants exist for cases 4 to 6 only");
    const LiteratureCheck lc = literature_variant_check(case_id, rs.a);
    os << "literature invariants under the generator:";
    for (const auto& [name, r] : lc.annihilation) os << "  " << name << " -> " << to_string(r) << ";";
    os << "\nannihilated: " << (lc.annihilated ? "yes" : "no")
       << "; literature ansatz gives a consistent reduction: " << (lc.reduction_consistent ? "yes" : "no") << "\n";
  }
  return status;
}

struct SolveOptions {
  int case_id = 0;
  double v0 = 0;
  std::optional<double> n0, rho0, q0, y0;
  double t_end = 0, rtol = 1e-8, atol = 1e-10, guard = 0.05;
  int samples = 200;
  std::string a;
};

int cmd_solve(const Globals& g, const SolveOptions& o) {
  const Theory th = theory_of(g);
  const FluidParams p = params_of(g);
  try {
    check_supported(o.case_id, th);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (!(std::abs(o.v0) < 1)) throw UsageError("--v0 must satisfy |v0| < 1");
  std::optional<Rational> a;
  if (!o.a.empty()) a = parse_rational(o.a);
  RunConfig cfg;
  cfg.solver.rtol = o.rtol;
  cfg.solver.atol = o.atol;
  cfg.solver.t_end = o.t_end;
  cfg.guard = o.guard;
  cfg.samples = o.samples;
  cfg.initial = {o.n0, o.rho0, o.q0, o.y0};
  const Run run = run_case(o.case_id, th, p, o.v0, cfg, a);
  const auto rows = run.rows();
  Output out(g.out);
  auto& os = out.os();
  const std::string indep = run.system->indep.name();
  os << indep << ",psi,v,n,rho,q\n";
  os << std::setprecision(15);
  for (const Row& r : rows) {
    os << r.indep << ',' << r.psi << ',' << r.v << ',' << r.n << ',' << r.rho << ',' << r.q << '\n';
  }
  std::ostream& summary = out.to_file() ? std::cout : std::cerr;
  const Row& last = rows.back();
  summary << "case " << o.case_id << " " << theory_name(th) << " v0=" << o.v0 << ": "
          << termination_name(run.traj.reason);
  if (!run.traj.events.empty()) {
    const EventHit& e = run.traj.events.back();
    summary << " (" << e.name << " in [" << e.lo << ", " << e.hi << "])";
  }
  if (!run.traj.failure.empty()) summary << " (" << run.traj.failure << ")";
  summary << "; final " << indep << "=" << last.indep << " v=" << last.v << " n=" << last.n << " rho=" << last.rho
          << " q=" << last.q << "; classification " << behaviour_name(classify(run)) << "\n";
  return kOk;
}

int cmd_critical(const Globals& g, int case_id, double lo, double hi, double tol, bool sweep) {
  const Theory th = theory_of(g);
  const FluidParams p = params_of(g);
  try {
    check_supported(case_id, th);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  Output out(g.out);
  auto& os = out.os();
  if (csv(g)) os << "kappa,v_c,lo,hi\n";
  std::vector<FluidParams> runs = {p};
  if (sweep) {
    runs.clear();
    for (long k2 : {1L, 2L, 4L}) {
      FluidParams q = p;
      q.kappa = make_rational(k2, 2);
      runs.push_back(q);
    }
  }
  int status = kOk;
  for (const FluidParams& q : runs) {
    try {
      const CriticalResult cr = find_critical(case_id, th, q, lo, hi, tol);
      if (csv(g)) {
        os << std::setprecision(12) << q.kappa_value() << ',' << cr.estimate() << ',' << cr.lo << ',' << cr.hi << "\n";
      } else {
        os << theory_label(th) << " case " << case_id << " kappa=" << q.kappa_value() << ": v_c = " << std::setprecision(6)
           << cr.estimate() << " in [" << cr.lo << ", " << cr.hi << "]; below " << behaviour_name(classify(cr.below))
           << ", above " << behaviour_name(classify(cr.above)) << " (" << cr.evaluations << " runs)\n";
      }
    } catch (const NoBracket& e) {
      os << theory_label(th) << " case " << case_id << " kappa=" << q.kappa_value() << ": " << e.what() << "\n";
      status = kCheckFailed;
    }
  }
  return status;
}

int cmd_verify(const Globals& g, const std::string& golden, const std::vector<std::string>& only) {
  for (const auto& o : only) {
    const auto groups = verify_groups();
    if (std::find(groups.begin(), groups.end(), o) == groups.end()) throw UsageError("unknown check group '" + o + "'");
  }
  const auto results = verify_battery(golden, g.seed, only);
  Output out(g.out);
  auto& os = out.os();
  bool ok = true;
  if (csv(g)) os << "check,status,detail\n";
  for (const auto& r : results) {
    ok = ok && r.passed;
    if (csv(g)) {
      std::string d = r.detail;
      for (char& c : d) {
        if (c == '"') c = '\'';
      }
      os << '"' << r.name << "\"," << (r.passed ? "pass" : "fail") << ",\"" << d << "\"\n";
    } else {
      os << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << "\n";
    }
  }
  if (!csv(g)) os << (ok ? "all checks passed" : "some checks failed") << "\n";
  return ok ? kOk : kCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Lie symmetries, reductions and numeric solutions of the 1+1 relativistic heat-conducting fluid.\n"
      "Environment overrides: RHSYM_THEORY, RHSYM_PARAMS, RHSYM_FORMAT, RHSYM_SEED, RHSYM_GOLDEN.\n"
      "Exit status: 0 success, 1 check failure, 2 usage error."};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--theory", g.theory, "eckart or israel-stewart")
      ->envname("RHSYM_THEORY")
      ->check(CLI::IsMember({"eckart", "israel-stewart", "is"}))
      ->capture_default_str();
  app.add_option("--params", g.params_file, "key = value file (k, kappa, lambda, N0, E0)")->envname("RHSYM_PARAMS");
  app.add_option("--format", g.format, "text or csv")
      ->envname("RHSYM_FORMAT")
      ->check(CLI::IsMember({"text", "csv"}))
      ->capture_default_str();
  app.add_option("--seed", g.seed, "seed for randomized checks")->envname("RHSYM_SEED")->capture_default_str();
  app.add_option("--out", g.out, "output file (default stdout)");
  app.fallthrough();

  int degree = 1;
  std::string dump_det;
  auto* sym_cmd = app.add_subcommand("symmetries", "solve the determining equations");
  sym_cmd->add_option("--ansatz-degree,--degree", degree, "polynomial degree of the ansatz")
      ->check(CLI::Range(0, 2))
      ->capture_default_str();
  sym_cmd->add_option("--dump-determining", dump_det, "write the determining equations to FILE");

  std::string basis_name = "table", normalize, table;
  auto* alg_cmd = app.add_subcommand("algebra", "structure constants, solvability and normal forms");
  alg_cmd->add_option("--basis", basis_name, "table, literature or full (with the boost)")->capture_default_str();
  alg_cmd->add_option("--table", table, "print only the commutator or adjoint table")
      ->check(CLI::IsMember({"commutator", "adjoint"}));
  alg_cmd->add_option("--normalize", normalize,
                      "comma-separated coordinates in (dt, dx, S, D) for Eckart or (dt, dx, D) for Israel-Stewart");

  auto* tab_cmd = app.add_subcommand("tables", "commutator and adjoint tables and the optimal system");

  int red_case = 0;
  std::string red_a;
  bool red_check = false, red_lit = false, red_dump = false;
  auto* red_cmd = app.add_subcommand("reduce", "similarity reduction of one optimal-system case");
  red_cmd->add_option("--case", red_case, "case 1-9")->required();
  red_cmd->add_option("--a", red_a, "family parameter (rational)");
  red_cmd->add_flag("--check", red_check, "substitute back into the fluid system");
  red_cmd->add_flag("--literature", red_lit, "check the literature invariants (cases 4-6)");
  red_cmd->add_flag("--dump-expr", red_dump, "print only the reduced equations, one parseable expression per line");

  SolveOptions so;
  double n0 = 0, rho0 = 0, q0 = 0, y0 = 0;
  auto* solve_cmd = app.add_subcommand("solve", "integrate a reduced system and write CSV");
  solve_cmd->add_option("--case", so.case_id, "case 1-6")->required();
  solve_cmd->add_option("--v0", so.v0, "initial velocity")->required();
  auto* o_n0 = solve_cmd->add_option("--n0", n0, "initial particle density (default N0)");
  auto* o_rho0 = solve_cmd->add_option("--rho0", rho0, "initial energy density (default 3 E0)");
  auto* o_q0 = solve_cmd->add_option("--q0", q0, "initial heat flux (default -2 E0)");
  auto* o_y0 = solve_cmd->add_option("--y0", y0, "initial value of the independent variable");
  solve_cmd->add_option("--t-end", so.t_end, "integration length (default: scaled time 50)");
  solve_cmd->add_option("--rtol", so.rtol, "relative tolerance")->capture_default_str();
  solve_cmd->add_option("--atol", so.atol, "absolute tolerance")->capture_default_str();
  solve_cmd->add_option("--guard", so.guard, "blow-up when 1 - v^2 drops below this")->capture_default_str();
  solve_cmd->add_option("--samples", so.samples, "output points (0: every accepted step)")->capture_default_str();
  solve_cmd->add_option("--a", so.a, "family parameter (rational)");

  int crit_case = 1;
  double lo = 0.5, hi = 0.9, tol = 1e-3;
  bool sweep = false;
  auto* crit_cmd = app.add_subcommand("critical", "bisect for the critical initial velocity");
  crit_cmd->add_option("--case", crit_case, "case 1-6")->capture_default_str();
  crit_cmd->add_option("--lo", lo)->capture_default_str();
  crit_cmd->add_option("--hi", hi)->capture_default_str();
  crit_cmd->add_option("--tol", tol)->capture_default_str();
  crit_cmd->add_flag("--sweep", sweep, "repeat for kappa in {0.5, 1, 2}");

  std::string golden = RHSYM_GOLDEN_DIR;
  std::vector<std::string> only;
  auto* ver_cmd = app.add_subcommand("verify", "run the check battery against the golden files");
  ver_cmd->add_option("--golden", golden, "directory of golden files")->envname("RHSYM_GOLDEN")->capture_default_str();
  ver_cmd->add_option("--only", only, "restrict to check groups: basis, tables, solvability, normal-forms, invariants, "
                                      "reductions, closed-form, convergence");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*sym_cmd) return cmd_symmetries(g, degree, dump_det);
    if (*alg_cmd) return cmd_algebra(g, basis_name, normalize, table);
    if (*tab_cmd) return cmd_tables(g);
    if (*red_cmd) return cmd_reduce(g, red_case, red_a, red_check, red_lit, red_dump);
    if (*solve_cmd) {
      if (*o_n0) so.n0 = n0;
      if (*o_rho0) so.rho0 = rho0;
      if (*o_q0) so.q0 = q0;
      if (*o_y0) so.y0 = y0;
      return cmd_solve(g, so);
    }
    if (*crit_cmd) return cmd_critical(g, crit_case, lo, hi, tol, sweep);
    if (*ver_cmd) return cmd_verify(g, golden, only);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kCheckFailed;
  }
  return kUsage;
}

#pragma once

// Check battery shared by the command-line verifier and the acceptance
// runner. Each check returns a pass flag and a one-line detail.

#include <chrono>
#include <cmath>
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "rhsym/dynamics.hpp"
#include "rhsym/tables.hpp"

namespace rhsym {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

namespace detail {

inline std::string fmt(double v, int prec = 6) {
  std::ostringstream os;
  os.precision(prec);
  os << v;
  return os.str();
}

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

inline std::string theory_file(Theory t) { return t == Theory::Eckart ? "eckart" : "israel_stewart"; }

}  // namespace detail

// ------------------------------------------------------------- algebra

/// Exact span equality between the computed symmetry algebra and the
/// literature generator list.
inline CheckResult check_symmetry_recovery(Theory theory) {
  const auto t0 = std::chrono::steady_clock::now();
  CheckResult r{std::string("symmetry recovery (") + theory_name(theory) + ")", false, ""};
  const Ansatz ansatz(1);
  const auto found = solve_determining(build_system(theory), ansatz);
  const auto expected = literature_basis(theory);
  r.passed = same_span(found, expected, ansatz);
  std::ostringstream os;
  os << "dim " << found.size() << " (expected " << expected.size() << ")";
  // Generators outside the expected span.
  for (const VectorField& v : found) {
    auto with = expected;
    with.push_back(v);
    if (!same_span(with, expected, ansatz)) os << "; extra " << to_string(v);
  }
  for (const VectorField& v : expected) {
    auto with = found;
    with.push_back(v);
    if (!same_span(with, found, ansatz)) os << "; missing " << to_string(v);
  }
  os << "; " << detail::fmt(detail::seconds_since(t0), 3) << " s";
  r.detail = os.str();
  return r;
}

/// The literature basis fixture matches the built-in basis.
inline CheckResult check_basis_fixture(Theory theory, const std::filesystem::path& golden) {
  CheckResult r{std::string("basis fixture (") + theory_name(theory) + ")", false, ""};
  const auto path = golden / (detail::theory_file(theory) + "_basis.txt");
  std::ifstream in(path);
  if (!in) {
    r.detail = "cannot open " + path.string();
    return r;
  }
  const BasisFixture b = read_basis(in);
  const auto ours = literature_basis(theory);
  if (b.fields.size() != ours.size()) {
    r.detail = "fixture has " + std::to_string(b.fields.size()) + " elements, expected " +
               std::to_string(ours.size());
    return r;
  }
  for (std::size_t i = 0; i < ours.size(); ++i) {
    if (!(b.fields[i] == ours[i])) {
      r.detail = b.names[i] + ": fixture " + to_string(b.fields[i]) + ", built-in " + to_string(ours[i]);
      return r;
    }
  }
  r.passed = true;
  r.detail = std::to_string(ours.size()) + " generators agree";
  return r;
}

/// Computed commutator or adjoint table against the golden file.
inline CheckResult check_table(Theory theory, bool adjoint, const std::filesystem::path& golden) {
  const std::string kind = adjoint ? "adjoint" : "commutator";
  CheckResult r{kind + " table (" + theory_name(theory) + ")", false, ""};
  const auto path = golden / (detail::theory_file(theory) + "_" + kind + ".txt");
  std::ifstream in(path);
  if (!in) {
    r.detail = "cannot open " + path.string();
    return r;
  }
  try {
    const Table g = read_table(in);
    const LieAlgebra alg = structure_constants(table_basis(theory));
    const Table ours = adjoint ? adjoint_table(alg) : commutator_table(alg);
    const auto mism = compare_tables(g, ours);
    r.passed = mism.empty();
    if (r.passed) {
      r.detail = std::to_string(g.rows.size() * g.columns.size()) + " cells match " + path.filename().string();
    } else {
      r.detail = path.filename().string() + ": " + describe(mism.front());
      if (mism.size() > 1) r.detail += " (+" + std::to_string(mism.size() - 1) + " more)";
    }
  } catch (const std::exception& e) {
    r.detail = path.filename().string() + ": " + e.what();
  }
  return r;
}

inline CheckResult check_solvability(Theory theory) {
  CheckResult r{std::string("solvability (") + theory_name(theory) + ")", false, ""};
  const LieAlgebra alg = structure_constants(table_basis(theory));
  const Solvability s = is_solvable(alg);
  const bool witness = s.solvable && check_solvable_witness(alg, s.witness);
  r.passed = s.solvable && witness;
  std::ostringstream os;
  os << "derived series dims";
  for (auto d : s.derived_dims) os << ' ' << d;
  os << "; witness " << (witness ? "verified" : "invalid");
  r.detail = os.str();
  return r;
}

// ----------------------------------------------------------- reductions

/// Catalog invariants are annihilated by their generators.
inline CheckResult check_invariant_annihilation() {
  CheckResult r{"invariant annihilation", true, ""};
  int count = 0;
  for (int c = 1; c <= 6; ++c) {
    const InvariantSet inv = catalog_invariants(c, Expr(default_family_parameter(c)), false);
    for (const auto& [name, e] : inv.invariants) {
      ++count;
      const Expr res = verify_invariant(inv.generator, e);
      if (!is_zero(res)) {
        r.passed = false;
        r.detail = "case " + std::to_string(c) + " " + name + ": residual " + to_string(res);
        return r;
      }
    }
  }
  r.detail = std::to_string(count) + " invariants over cases 1-6";
  return r;
}

/// Exactly-zero residuals for every supported reduction; literature
/// variants reported alongside.
inline CheckResult check_reductions(bool with_literature = true) {
  CheckResult r{"reduction residuals", true, ""};
  std::ostringstream os;
  std::vector<std::pair<int, Theory>> cases;
  for (int c = 1; c <= 6; ++c) cases.emplace_back(c, Theory::Eckart);
  for (int c = 1; c <= 2; ++c) cases.emplace_back(c, Theory::IsraelStewart);
  std::vector<std::future<ReductionCheck>> jobs;
  for (auto [c, t] : cases) {
    jobs.push_back(std::async(std::launch::async, [c = c, t = t] { return symbolic_check_reduction(c, t); }));
  }
  int zero = 0;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const ReductionCheck rc = jobs[i].get();
    if (rc.zero) {
      ++zero;
    } else {
      r.passed = false;
      os << "case " << rc.case_id << ' ' << theory_name(rc.theory) << " nonzero; ";
    }
  }
  os << zero << "/" << cases.size() << " exactly zero";
  if (with_literature) {
    for (int c = 4; c <= 6; ++c) {
      const LiteratureCheck lc = literature_variant_check(c, default_family_parameter(c));
      os << "; literature case " << c << ": annihilated " << (lc.annihilated ? "yes" : "no");
      for (const auto& [name, res] : lc.annihilation) {
        if (!is_zero(res)) os << " (" << name << " residual " << to_string(res) << ")";
      }
      os << ", reduction " << (lc.reduction_consistent ? "consistent" : "inconsistent");
    }
  }
  r.detail = os.str();
  return r;
}

// --------------------------------------------------------- case-4 closed form

struct Case4Comparison {
  double closed_form_error = 0;  // max relative deviation from the literature closed form
  double quadrature_error = 0;   // max |G(u) - G(u0) - (y - y0)|
  int quadrature_points = 0;     // samples away from the equilibrium
  double y0 = 0, y1 = 0;
  std::string failure;
};

/// Integrates the Eckart case-4 system (a = -1) from a point on the
/// literature closed form and compares over [y0, y0 + window].
inline Case4Comparison compare_case4(const FluidParams& params, double rtol, double window = 5) {
  const double k = params.k_value(), kappa = params.kappa_value(), N0 = params.N0;
  const double C1 = k * N0 / kappa;  // S = 1
  const double C2 = -1, rho0 = 3 * params.E0;
  Case4Comparison out;
  out.y0 = 0;
  out.y1 = window;
  const auto start = closed_form_case4(params, C1, C2, rho0, out.y0);
  auto rs = std::make_shared<const ReducedSystem>(reduced_system(4, Theory::Eckart, params, Rational(-1)));
  NumericSystem ns(*rs);
  SolverConfig sc;
  sc.rtol = rtol;
  sc.atol = rtol * 1e-2;
  sc.t_end = out.y1;
  std::vector<double> samples;
  for (int i = 1; i <= 100; ++i) samples.push_back(out.y0 + window * i / 100);
  const OdeState z0 = {start.state.psi, start.state.rho, start.state.q};
  const Trajectory tr =
      integrate([&](double s, const OdeState& z) { return ns(s, z); }, out.y0, z0, sc, {}, samples);
  if (tr.reason != Termination::ReachedEnd) out.failure = tr.failure.empty() ? "stopped early" : tr.failure;
  const Case4Quadrature quad = Case4Quadrature::from_initial(params, out.y0, z0[0], z0[1], z0[2]);
  for (std::size_t i = 0; i < tr.s.size(); ++i) {
    const auto cf = closed_form_case4(params, C1, C2, rho0, tr.s[i]);
    const double num[3] = {tr.z[i][0], tr.z[i][1], tr.z[i][2]};
    const double ref[3] = {cf.state.psi, cf.state.rho, cf.state.q};
    for (int j = 0; j < 3; ++j) {
      const double rel = std::abs(num[j] - ref[j]) / std::max(std::abs(ref[j]), 1.0);
      out.closed_form_error = std::max(out.closed_form_error, rel);
    }
    // G is logarithmically singular at the equilibrium A + C u^2 = 0.
    const double u = std::exp(tr.z[i][0]);
    if (std::abs(quad.A + quad.C * u * u) < 1e-3 * quad.A) continue;
    ++out.quadrature_points;
    out.quadrature_error = std::max(out.quadrature_error, std::abs(quad.residual(tr.s[i], tr.z[i][0])));
  }
  return out;
}

inline CheckResult check_case4_closed_form(double rtol = 1e-8) {
  CheckResult r{"case-4 closed form", false, ""};
  const Case4Comparison c = compare_case4(FluidParams::for_theory(Theory::Eckart), rtol);
  r.passed = c.failure.empty() && c.closed_form_error <= 1e-6;
  r.detail = "max relative deviation (relative to max(|ref|, 1)) " + detail::fmt(c.closed_form_error, 3) + " over y in [" +
             detail::fmt(c.y0) + ", " + detail::fmt(c.y1) + "]; implicit quadrature residual " +
             detail::fmt(c.quadrature_error, 3) + (c.failure.empty() ? "" : "; " + c.failure);
  return r;
}

inline CheckResult check_case4_quadrature(double rtol = 1e-8) {
  CheckResult r{"case-4 quadrature", false, ""};
  const Case4Comparison c = compare_case4(FluidParams::for_theory(Theory::Eckart), rtol);
  r.passed = c.failure.empty() && c.quadrature_points > 0 && c.quadrature_error <= 1e-6;
  r.detail = "max |G(u) - G(u0) - (y - y0)| = " + detail::fmt(c.quadrature_error, 3) + " at " +
             std::to_string(c.quadrature_points) + " samples away from the equilibrium";
  return r;
}

// ------------------------------------------------------------- dynamics

/// Eckart case 1: every sample blows up and q/rho ends near -2/3.
inline CheckResult check_eckart_instability() {
  CheckResult r{"Eckart homogeneous instability", true, ""};
  const FluidParams p = FluidParams::for_theory(Theory::Eckart);
  auto rs = std::make_shared<const ReducedSystem>(reduced_system(1, Theory::Eckart, p));
  const double scale = 4 * p.k_value() * p.N0 / p.kappa_value();
  std::ostringstream os;
  for (double v0 : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    const Run run = run_system(rs, v0);
    const Row last = run.rows().back();
    const double ratio = last.q / last.rho;
    const Behaviour b = classify(run);
    const bool ok = b == Behaviour::BlowingUp && std::abs(ratio + 2.0 / 3.0) < 1e-2;
    r.passed = r.passed && ok;
    os << "v0=" << v0 << ": " << behaviour_name(b) << " at scaled time "
       << detail::fmt(std::abs(run.traj.s.back() - run.traj.s.front()) * scale, 4) << ", q/rho "
       << detail::fmt(ratio, 5) << (ok ? "" : " FAIL") << "; ";
  }
  r.detail = os.str();
  r.detail.resize(r.detail.size() - 2);
  return r;
}

struct CriticalReport {
  bool found = false;
  double vc = 0;
  std::string below, above;
  std::string error;
};

inline CriticalReport critical_report(int case_id, Theory theory, const FluidParams& p, double lo, double hi,
                                      double tol) {
  CriticalReport out;
  try {
    const CriticalResult cr = find_critical(case_id, theory, p, lo, hi, tol);
    out.found = true;
    out.vc = cr.estimate();
    out.below = behaviour_name(classify(cr.below));
    out.above = behaviour_name(classify(cr.above));
  } catch (const NoBracket& e) {
    out.error = e.what();
  }
  return out;
}

/// Critical velocity exists in (lo, hi); the band around the literature
/// value and a kappa sweep are reported.
inline CheckResult check_critical(int case_id, Theory theory, double target, const std::string& label) {
  CheckResult r{label, false, ""};
  FluidParams base = FluidParams::for_theory(theory);
  base.k = 1;
  base.kappa = 4;  // 4 k N0 / kappa = 1
  const CriticalReport rep = critical_report(case_id, theory, base, 0.5, 0.9, 1e-3);
  std::ostringstream os;
  if (!rep.found) {
    r.detail = rep.error;
    return r;
  }
  r.passed = rep.vc > 0.5 && rep.vc < 0.9 && rep.above == std::string("blowing-up");
  const bool band = std::abs(rep.vc - target) <= 0.05;
  os << "v_c = " << detail::fmt(rep.vc, 4) << " (below: " << rep.below << ", above: " << rep.above
     << "); literature " << target << ", within +-0.05: " << (band ? "yes" : "no") << "; kappa sweep";
  for (double kappa : {0.5, 1.0, 2.0}) {
    FluidParams p = base;
    p.kappa = Rational(make_rational(static_cast<long>(kappa * 2), 2));
    const CriticalReport s = critical_report(case_id, theory, p, 0.5, 0.9, 1e-3);
    os << " " << kappa << ":" << (s.found ? detail::fmt(s.vc, 4) : std::string("none"));
  }
  r.detail = os.str();
  return r;
}

/// Eckart case 3: decaying below 0.75, some blow-up above 0.8.
inline CheckResult check_case3_threshold() {
  CheckResult r{"case-3 threshold", false, ""};
  const FluidParams p = FluidParams::for_theory(Theory::Eckart);
  auto rs = std::make_shared<const ReducedSystem>(reduced_system(3, Theory::Eckart, p));
  std::ostringstream os;
  bool low_ok = true, high_ok = false;
  for (double v0 : {0.3, 0.5, 0.7}) {
    const Run run = run_system(rs, v0);
    const Behaviour b = classify(run);
    low_ok = low_ok && b == Behaviour::Decaying;
    os << "v0=" << v0 << ": " << behaviour_name(b);
    if (!run.traj.events.empty()) os << " (" << run.traj.events.back().name << ")";
    os << "; ";
  }
  for (double v0 : {0.82, 0.85, 0.9, 0.95}) {
    const Run run = run_system(rs, v0);
    const Behaviour b = classify(run);
    high_ok = high_ok || b == Behaviour::BlowingUp;
    os << "v0=" << v0 << ": " << behaviour_name(b) << " (final v " << detail::fmt(run.rows().back().v, 4)
       << "); ";
  }
  r.passed = low_ok && high_ok;
  r.detail = os.str();
  r.detail.resize(r.detail.size() - 2);
  return r;
}

// ------------------------------------------------------------ integrator

inline CheckResult check_convergence_order() {
  CheckResult r{"convergence order", false, ""};
  const OdeFn f = [](double, const OdeState& y) { return OdeState{-y[0]}; };
  const double order =
      convergence_order(f, 0, {1.0}, 1, [](double s) { return OdeState{std::exp(-s)}; });
  r.passed = order >= 3.9;
  r.detail = "observed order " + detail::fmt(order, 4) + " on y' = -y";
  return r;
}

/// Case-1 Eckart under rtol and rtol/2: pointwise difference at shared
/// samples relative to the finer tolerance.
inline double case1_self_convergence(double rtol, double v0 = 0.5) {
  const FluidParams p = FluidParams::for_theory(Theory::Eckart);
  auto rs = std::make_shared<const ReducedSystem>(reduced_system(1, Theory::Eckart, p));
  auto run_at = [&](double tol) {
    RunConfig cfg;
    cfg.solver.rtol = tol;
    cfg.solver.atol = tol * 1e-2;
    cfg.samples = 400;
    return run_system(rs, v0, cfg);
  };
  const Run a = run_at(rtol), b = run_at(rtol / 2);
  const std::size_t n = std::min(a.traj.s.size(), b.traj.s.size());
  // Exclude the terminal event point, whose abscissa differs between runs.
  double worst = 0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (a.traj.s[i] != b.traj.s[i]) break;
    for (std::size_t j = 0; j < a.traj.z[i].size(); ++j) {
      const double d = std::abs(a.traj.z[i][j] - b.traj.z[i][j]) / std::max(1.0, std::abs(b.traj.z[i][j]));
      worst = std::max(worst, d);
    }
  }
  return worst / (rtol / 2);
}

inline CheckResult check_self_convergence() {
  CheckResult r{"case-1 self-convergence", false, ""};
  const double ratio = case1_self_convergence(1e-8);
  r.passed = ratio < 10;
  r.detail = "max successive difference = " + detail::fmt(ratio, 3) + " x the finer tolerance";
  return r;
}

/// Random elements of the literature algebra: the recorded adjoint word
/// maps each onto its canonical representative.
inline CheckResult check_normal_forms(Theory theory, std::uint64_t seed, int count = 200) {
  CheckResult r{std::string("normal forms (") + theory_name(theory) + ", seed " + std::to_string(seed) + ")",
                true, ""};
  // Coordinates as in normalize_element: (dt, dx, S, D) or (dt, dx, D).
  const auto basis = theory == Theory::Eckart ? literature_basis(theory) : table_basis(theory);
  const LieAlgebra alg = structure_constants(basis);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> coef(-4, 4);
  std::bernoulli_distribution sparse(0.4);
  double worst = 0;
  int done = 0;
  while (done < count) {
    RVector w(alg.dim(), Rational(0));
    bool any = false;
    for (auto& c : w) {
      if (sparse(rng)) continue;
      c = make_rational(coef(rng), 1 + (coef(rng) + 4) % 3);
      any = any || !is_zero(c);
    }
    if (!any) continue;
    ++done;
    const NormalForm nf = normalize_element(w);
    std::vector<double> wd;
    for (const auto& c : w) wd.push_back(c.get_d());
    const auto img = apply_word(alg, nf.word, wd);
    for (std::size_t k = 0; k < img.size(); ++k) worst = std::max(worst, std::abs(img[k] - nf.coords[k].get_d()));
  }
  r.passed = worst < 1e-9;
  r.detail = std::to_string(count) + " elements, max deviation " + detail::fmt(worst, 3);
  return r;
}

// ------------------------------------------------------------- batteries

/// The verifier's battery; independent checks run concurrently and are
/// reported in a fixed order.
inline std::vector<CheckResult> verify_battery(const std::filesystem::path& golden, std::uint64_t seed = 0,
                                               const std::vector<std::string>& only = {}) {
  using Job = std::pair<std::string, std::function<CheckResult()>>;
  std::vector<Job> jobs = {
      {"basis", [] { return check_symmetry_recovery(Theory::Eckart); }},
      {"basis", [] { return check_symmetry_recovery(Theory::IsraelStewart); }},
      {"tables", [golden] { return check_basis_fixture(Theory::Eckart, golden); }},
      {"tables", [golden] { return check_basis_fixture(Theory::IsraelStewart, golden); }},
      {"tables", [golden] { return check_table(Theory::Eckart, false, golden); }},
      {"tables", [golden] { return check_table(Theory::Eckart, true, golden); }},
      {"tables", [golden] { return check_table(Theory::IsraelStewart, false, golden); }},
      {"tables", [golden] { return check_table(Theory::IsraelStewart, true, golden); }},
      {"solvability", [] { return check_solvability(Theory::Eckart); }},
      {"solvability", [] { return check_solvability(Theory::IsraelStewart); }},
      {"normal-forms", [seed] { return check_normal_forms(Theory::Eckart, seed); }},
      {"normal-forms", [seed] { return check_normal_forms(Theory::IsraelStewart, seed); }},
      {"invariants", [] { return check_invariant_annihilation(); }},
      {"reductions", [] { return check_reductions(); }},
      {"closed-form", [] { return check_case4_closed_form(); }},
      {"closed-form", [] { return check_case4_quadrature(); }},
      {"convergence", [] { return check_convergence_order(); }},
  };
  std::vector<std::future<CheckResult>> futures;
  for (const auto& [group, fn] : jobs) {
    if (!only.empty() && std::find(only.begin(), only.end(), group) == only.end()) continue;
    futures.push_back(std::async(std::launch::async, [fn = fn, g = group] {
      try {
        return fn();
      } catch (const std::exception& e) {
        return CheckResult{g, false, std::string("error: ") + e.what()};
      }
    }));
  }
  std::vector<CheckResult> out;
  for (auto& f : futures) out.push_back(f.get());
  return out;
}

inline std::vector<std::string> verify_groups() {
  return {"basis",      "tables",      "solvability", "normal-forms",
          "invariants", "reductions", "closed-form", "convergence"};
}

}  // namespace rhsym

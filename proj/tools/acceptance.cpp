// Acceptance runner: one PASS/FAIL line per criterion, exit 1 on any failure.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "rhsym/checks.hpp"

#ifndef RHSYM_GOLDEN_DIR
#define RHSYM_GOLDEN_DIR "tests/golden"
#endif

using namespace rhsym;

namespace {

struct Criterion {
  int id;
  std::string title;
  std::vector<CheckResult> parts;
};

bool report(const Criterion& c) {
  bool ok = !c.parts.empty();
  for (const auto& p : c.parts) ok = ok && p.passed;
  std::printf("criterion %d: %s  %s\n", c.id, ok ? "PASS" : "FAIL", c.title.c_str());
  for (const auto& p : c.parts) {
    std::printf("    [%s] %s: %s\n", p.passed ? "ok" : "fail", p.name.c_str(), p.detail.c_str());
  }
  std::fflush(stdout);
  return ok;
}

template <class F>
CheckResult guarded(const std::string& name, F f) {
  try {
    return f();
  } catch (const std::exception& e) {
    return {name, false, std::string("error: ") + e.what()};
  }
}

}  // namespace

int main(int argc, char** argv) {
  const std::filesystem::path golden = argc > 1 ? argv[1] : RHSYM_GOLDEN_DIR;
  bool all = true;

  {
    const auto t0 = std::chrono::steady_clock::now();
    Criterion c{1, "symmetry recovery", {}};
    c.parts.push_back(guarded("eckart", [] { return check_symmetry_recovery(Theory::Eckart); }));
    c.parts.push_back(guarded("israel-stewart", [] { return check_symmetry_recovery(Theory::IsraelStewart); }));
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    c.parts.push_back({"runtime", secs < 120, std::to_string(secs) + " s (limit 120 s)"});
    all &= report(c);
  }
  {
    Criterion c{2, "commutator and adjoint tables", {}};
    for (Theory t : {Theory::Eckart, Theory::IsraelStewart}) {
      for (bool adj : {false, true}) c.parts.push_back(guarded("table", [&] { return check_table(t, adj, golden); }));
    }
    all &= report(c);
  }
  {
    Criterion c{3, "solvability", {}};
    for (Theory t : {Theory::Eckart, Theory::IsraelStewart}) {
      c.parts.push_back(guarded("solvability", [&] { return check_solvability(t); }));
    }
    all &= report(c);
  }
  {
    Criterion c{4, "reduction soundness", {}};
    c.parts.push_back(guarded("annihilation", [] { return check_invariant_annihilation(); }));
    c.parts.push_back(guarded("reductions", [] { return check_reductions(); }));
    all &= report(c);
  }
  {
    Criterion c{5, "case-4 closed form", {}};
    c.parts.push_back(guarded("closed form", [] { return check_case4_closed_form(1e-8); }));
    all &= report(c);
    // Reported alongside, not part of the criterion.
    const CheckResult q = guarded("quadrature", [] { return check_case4_quadrature(1e-8); });
    std::printf("    [info] %s (%s): %s\n", q.name.c_str(), q.passed ? "agrees" : "disagrees", q.detail.c_str());
  }
  {
    Criterion c{6, "Eckart homogeneous instability", {}};
    c.parts.push_back(guarded("instability", [] { return check_eckart_instability(); }));
    all &= report(c);
  }
  {
    Criterion c{7, "Israel-Stewart critical velocity", {}};
    c.parts.push_back(guarded("critical", [] {
      return check_critical(1, Theory::IsraelStewart, 0.76, "Israel-Stewart case 1");
    }));
    all &= report(c);
  }
  {
    Criterion c{8, "Eckart stationary critical velocity", {}};
    c.parts.push_back(guarded("critical", [] { return check_critical(2, Theory::Eckart, 0.77, "Eckart case 2"); }));
    all &= report(c);
  }
  {
    Criterion c{9, "case-3 threshold behaviour", {}};
    c.parts.push_back(guarded("case 3", [] { return check_case3_threshold(); }));
    all &= report(c);
  }
  {
    Criterion c{10, "integrator quality", {}};
    c.parts.push_back(guarded("order", [] { return check_convergence_order(); }));
    c.parts.push_back(guarded("self-convergence", [] { return check_self_convergence(); }));
    all &= report(c);
  }
  return all ? 0 : 1;
}

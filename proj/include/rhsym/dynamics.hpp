#pragma once

// Numerical runs of the reduced systems: blow-up detection, trajectory
// classification and the critical initial velocity.

#include <cmath>
#include <future>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rhsym/ode.hpp"
#include "rhsym/reduction.hpp"

namespace rhsym {

struct RunConfig {
  SolverConfig solver;          // solver.t_end <= 0 selects the default horizon
  double guard = 0.05;          // blow-up when 1 - v^2 falls below this
  double delta = 1e-6;          // event bracket width
  InitialOverrides initial;
  int samples = 0;              // > 0: uniformly spaced output points
  RunConfig() { solver.t_end = 0; }
};

/// Default horizon: 50 in units of the relaxation scale kappa/(4 k N0).
inline double default_horizon(const FluidParams& p) {
  return 50 * p.kappa_value() / (4 * p.k_value() * p.N0);
}

struct Row {
  double indep, psi, v, n, rho, q;
};

struct Run {
  std::shared_ptr<const ReducedSystem> system;
  InitialData initial;
  double v0 = 0;
  Trajectory traj;  // in the integration variable s = orientation * indep

  bool blew_up() const { return traj.fired("v->1") || traj.fired("v->-1"); }

  /// Physical values along the run, on the reference slice.
  std::vector<Row> rows() const {
    NumericSystem ns(*system);
    std::vector<Row> out;
    for (std::size_t i = 0; i < traj.s.size(); ++i) {
      const auto ph = ns.physical(traj.s[i], traj.z[i]);
      out.push_back({ns.indep_at(traj.s[i]), ph[0], std::tanh(ph[0]), ph[1], ph[2], ph[3]});
    }
    return out;
  }
};

/// Integrates a reduced system from v0. Guards: "v->1" and "v->-1" when
/// 1 - v^2 drops below the guard level, "singular" when the determinant of
/// the reduced system changes sign.
inline Run run_system(std::shared_ptr<const ReducedSystem> rs, double v0, const RunConfig& cfg = {}) {
  if (!(cfg.guard > 0 && cfg.guard < 1)) throw std::invalid_argument("guard level must lie in (0, 1)");
  Run run;
  run.system = rs;
  run.v0 = v0;
  run.initial = initial_state(*rs, v0, cfg.initial);
  if (1 - v0 * v0 <= cfg.guard) throw std::invalid_argument("initial velocity already beyond the blow-up guard");
  auto ns = std::make_shared<NumericSystem>(*rs);
  const double s0 = rs->orientation * run.initial.y0;
  SolverConfig sc = cfg.solver;
  const double span = sc.t_end > 0 ? sc.t_end : default_horizon(rs->params);
  sc.t_end = s0 + span;

  const double level = cfg.guard;
  EventSpec ev;
  ev.delta = cfg.delta;
  ev.guards.push_back({"v->1", [level](double, const OdeState& z) {
                         const double v = std::tanh(z[0]);
                         return v > 0 ? 1 - v * v - level : 1 - level;
                       }});
  ev.guards.push_back({"v->-1", [level](double, const OdeState& z) {
                         const double v = std::tanh(z[0]);
                         return v < 0 ? 1 - v * v - level : 1 - level;
                       }});
  const double d0 = ns->singular_value(s0, run.initial.state);
  if (d0 == 0 || !std::isfinite(d0)) throw std::domain_error("initial point on the singular locus");
  const double sign = d0 > 0 ? 1 : -1;
  ev.guards.push_back({"singular", [ns, sign](double s, const OdeState& z) { return sign * ns->singular_value(s, z); }});

  std::vector<double> samples;
  if (cfg.samples > 0) {
    for (int i = 1; i <= cfg.samples; ++i) samples.push_back(s0 + span * i / cfg.samples);
  }
  run.traj = integrate([ns](double s, const OdeState& z) { return (*ns)(s, z); }, s0, run.initial.state, sc, ev,
                       samples);
  return run;
}

inline Run run_case(int case_id, Theory theory, const FluidParams& params, double v0, const RunConfig& cfg = {},
                    std::optional<Rational> a = std::nullopt) {
  auto rs = std::make_shared<const ReducedSystem>(reduced_system(case_id, theory, params, a));
  return run_system(rs, v0, cfg);
}

enum class Behaviour { BlowingUp, Decaying, Inconclusive };

inline const char* behaviour_name(Behaviour b) {
  switch (b) {
    case Behaviour::BlowingUp:
      return "blowing-up";
    case Behaviour::Decaying:
      return "decaying";
    case Behaviour::Inconclusive:
      return "inconclusive";
  }
  return "?";
}

/// Blowing-up if a velocity guard fired; decaying if no event fired and v
/// decreases monotonically over the final third of the samples (a run
/// stopped by step failure at a singularity still qualifies); otherwise
/// inconclusive.
inline Behaviour classify(const Run& run) {
  if (run.traj.empty()) return Behaviour::Inconclusive;
  if (run.blew_up()) return Behaviour::BlowingUp;
  if (!run.traj.events.empty()) return Behaviour::Inconclusive;
  const auto& z = run.traj.z;
  const std::size_t from = 2 * z.size() / 3;
  if (z.size() - from < 2) return Behaviour::Inconclusive;
  for (std::size_t i = from + 1; i < z.size(); ++i) {
    if (std::tanh(z[i][0]) > std::tanh(z[i - 1][0])) return Behaviour::Inconclusive;
  }
  return Behaviour::Decaying;
}

struct NoBracket : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CriticalResult {
  double lo = 0, hi = 0;  // lo does not blow up, hi does
  double estimate() const { return 0.5 * (lo + hi); }
  Run below, above;
  int evaluations = 0;
};

/// Bisection on the blow-up predicate over [lo, hi]; each round evaluates
/// three interior points concurrently, shrinking the bracket by four.
inline CriticalResult find_critical(std::shared_ptr<const ReducedSystem> rs, double lo, double hi, double tol,
                                    const RunConfig& cfg = {}) {
  if (!(lo < hi) || !(tol > 0)) throw std::invalid_argument("need lo < hi and tol > 0");
  CriticalResult res;
  auto eval = [&](const std::vector<double>& vs) {
    std::vector<std::future<Run>> fs;
    for (double v : vs) fs.push_back(std::async(std::launch::async, [=] { return run_system(rs, v, cfg); }));
    std::vector<Run> out;
    for (auto& f : fs) out.push_back(f.get());
    res.evaluations += static_cast<int>(vs.size());
    return out;
  };
  auto ends = eval({lo, hi});
  if (ends[0].blew_up() || !ends[1].blew_up()) {
    throw NoBracket("no bracket on [" + std::to_string(lo) + ", " + std::to_string(hi) +
                    "]: blow-up at lo = " + (ends[0].blew_up() ? "yes" : "no") +
                    ", at hi = " + (ends[1].blew_up() ? "yes" : "no"));
  }
  res.below = std::move(ends[0]);
  res.above = std::move(ends[1]);
  while (hi - lo > tol) {
    const double w = (hi - lo) / 4;
    auto mid = eval({lo + w, lo + 2 * w, lo + 3 * w});
    std::size_t first = 3;
    for (std::size_t i = 0; i < 3; ++i) {
      if (mid[i].blew_up()) {
        first = i;
        break;
      }
    }
    const double nlo = first == 0 ? lo : lo + w * first;
    const double nhi = first == 3 ? hi : lo + w * (first + 1);
    if (first > 0) res.below = std::move(mid[first - 1]);
    if (first < 3) res.above = std::move(mid[first]);
    lo = nlo;
    hi = nhi;
  }
  res.lo = lo;
  res.hi = hi;
  return res;
}

inline CriticalResult find_critical(int case_id, Theory theory, const FluidParams& params, double lo, double hi,
                                    double tol, const RunConfig& cfg = {}) {
  auto rs = std::make_shared<const ReducedSystem>(reduced_system(case_id, theory, params));
  return find_critical(rs, lo, hi, tol, cfg);
}

}  // namespace rhsym

#pragma once

// Dormand-Prince 5(4) with dense output and event location.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace rhsym {

using OdeState = std::vector<double>;
using OdeFn = std::function<OdeState(double, const OdeState&)>;

struct SolverConfig {
  double rtol = 1e-8;
  double atol = 1e-10;
  double h0 = 0;  // 0: automatic
  double hmax = std::numeric_limits<double>::infinity();
  long max_steps = 200000;
  double t_end = 1;

  void validate() const {
    if (!(rtol > 0) || !(atol > 0)) throw std::invalid_argument("tolerances must be positive");
    if (!(max_steps > 0)) throw std::invalid_argument("max_steps must be positive");
    if (!(hmax > 0)) throw std::invalid_argument("hmax must be positive");
  }
};

/// Guard g(s, z); the event fires when g crosses from positive to <= 0.
struct Guard {
  std::string name;
  std::function<double(double, const OdeState&)> g;
  bool terminal = true;
};

struct EventSpec {
  std::vector<Guard> guards;
  double delta = 1e-6;  // bracket width
};

enum class Termination { ReachedEnd, Event, StepFailure };

inline const char* termination_name(Termination t) {
  switch (t) {
    case Termination::ReachedEnd:
      return "reached-end";
    case Termination::Event:
      return "event";
    case Termination::StepFailure:
      return "step-failure";
  }
  return "?";
}

struct EventHit {
  std::string name;
  double lo = 0, hi = 0;     // final bracket
  double g_lo = 0, g_hi = 0;  // guard values at the bracket ends
};

struct Trajectory {
  std::vector<double> s;
  std::vector<OdeState> z;
  Termination reason = Termination::ReachedEnd;
  std::vector<EventHit> events;  // in order; the last one stopped the run if terminal
  std::string failure;
  long steps = 0, rejected = 0;

  bool empty() const { return s.empty(); }
  bool fired(const std::string& name) const {
    return std::any_of(events.begin(), events.end(), [&](const EventHit& e) { return e.name == name; });
  }
};

namespace detail {

struct DP5 {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                          a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                          a76 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                          e6 = 22.0 / 525, e7 = -1.0 / 40;
  static constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                          d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                          d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;
};

struct Step {
  OdeState y1, k7, err;
  std::vector<OdeState> cont;  // dense output coefficients
};

inline OdeState axpy(const OdeState& y, double h, std::initializer_list<std::pair<double, const OdeState*>> ks) {
  OdeState out = y;
  for (const auto& [c, k] : ks) {
    if (c == 0) continue;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += h * c * (*k)[i];
  }
  return out;
}

inline bool finite(const OdeState& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

/// One Dormand-Prince step from (s, y) with k1 = f(s, y).
inline Step dp5_step(const OdeFn& f, double s, const OdeState& y, const OdeState& k1, double h, bool dense) {
  using D = DP5;
  const OdeState k2 = f(s + D::c2 * h, axpy(y, h, {{D::a21, &k1}}));
  const OdeState k3 = f(s + D::c3 * h, axpy(y, h, {{D::a31, &k1}, {D::a32, &k2}}));
  const OdeState k4 = f(s + D::c4 * h, axpy(y, h, {{D::a41, &k1}, {D::a42, &k2}, {D::a43, &k3}}));
  const OdeState k5 =
      f(s + D::c5 * h, axpy(y, h, {{D::a51, &k1}, {D::a52, &k2}, {D::a53, &k3}, {D::a54, &k4}}));
  const OdeState k6 =
      f(s + h, axpy(y, h, {{D::a61, &k1}, {D::a62, &k2}, {D::a63, &k3}, {D::a64, &k4}, {D::a65, &k5}}));
  Step st;
  st.y1 = axpy(y, h, {{D::a71, &k1}, {D::a73, &k3}, {D::a74, &k4}, {D::a75, &k5}, {D::a76, &k6}});
  st.k7 = f(s + h, st.y1);
  const std::size_t n = y.size();
  st.err.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    st.err[i] = h * (D::e1 * k1[i] + D::e3 * k3[i] + D::e4 * k4[i] + D::e5 * k5[i] + D::e6 * k6[i] +
                     D::e7 * st.k7[i]);
  }
  if (dense) {
    st.cont.assign(5, OdeState(n));
    for (std::size_t i = 0; i < n; ++i) {
      const double ydiff = st.y1[i] - y[i];
      const double bspl = h * k1[i] - ydiff;
      st.cont[0][i] = y[i];
      st.cont[1][i] = ydiff;
      st.cont[2][i] = bspl;
      st.cont[3][i] = ydiff - h * st.k7[i] - bspl;
      st.cont[4][i] = h * (D::d1 * k1[i] + D::d3 * k3[i] + D::d4 * k4[i] + D::d5 * k5[i] + D::d6 * k6[i] +
                           D::d7 * st.k7[i]);
    }
  }
  return st;
}

inline OdeState dense_eval(const Step& st, double theta) {
  const double t1 = 1 - theta;
  OdeState out(st.cont[0].size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = st.cont[0][i] +
             theta * (st.cont[1][i] + t1 * (st.cont[2][i] + theta * (st.cont[3][i] + t1 * st.cont[4][i])));
  }
  return out;
}

inline double error_norm(const Step& st, const OdeState& y0, const SolverConfig& cfg) {
  double acc = 0;
  for (std::size_t i = 0; i < y0.size(); ++i) {
    const double sc = cfg.atol + cfg.rtol * std::max(std::abs(y0[i]), std::abs(st.y1[i]));
    acc += (st.err[i] / sc) * (st.err[i] / sc);
  }
  return std::sqrt(acc / static_cast<double>(std::max<std::size_t>(1, y0.size())));
}

inline double initial_step(const OdeFn& f, double s, const OdeState& y, const OdeState& f0,
                           const SolverConfig& cfg, double span) {
  double d0 = 0, d1 = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double sc = cfg.atol + cfg.rtol * std::abs(y[i]);
    d0 += (y[i] / sc) * (y[i] / sc);
    d1 += (f0[i] / sc) * (f0[i] / sc);
  }
  d0 = std::sqrt(d0 / y.size());
  d1 = std::sqrt(d1 / y.size());
  double h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
  h = std::min({h, span, cfg.hmax});
  const OdeState f1 = f(s + h, axpy(y, h, {{1.0, &f0}}));
  double d2 = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double sc = cfg.atol + cfg.rtol * std::abs(y[i]);
    d2 += ((f1[i] - f0[i]) / sc) * ((f1[i] - f0[i]) / sc);
  }
  d2 = std::sqrt(d2 / y.size()) / h;
  const double m = std::max(d1, d2);
  const double h1 = m <= 1e-15 ? std::max(1e-6, h * 1e-3) : std::pow(0.01 / m, 1.0 / 5);
  return std::min({100 * h, h1, span, cfg.hmax});
}

}  // namespace detail

/// Adaptive integration from s0 to cfg.t_end (> s0). With sample points the
/// trajectory holds dense output at those points (plus the start and any
/// terminal event); otherwise every accepted step is recorded.
inline Trajectory integrate(const OdeFn& f, double s0, OdeState z0, const SolverConfig& cfg,
                            const EventSpec& ev = {}, const std::vector<double>& samples = {}) {
  cfg.validate();
  if (!(cfg.t_end > s0)) throw std::invalid_argument("integration end must exceed the start");
  if (!detail::finite(z0)) throw std::invalid_argument("initial state is not finite");
  Trajectory tr;
  auto push = [&](double s, const OdeState& z) {
    if (!tr.s.empty() && !(s > tr.s.back())) return;
    tr.s.push_back(s);
    tr.z.push_back(z);
  };
  push(s0, z0);
  std::size_t next_sample = 0;
  while (next_sample < samples.size() && samples[next_sample] <= s0) ++next_sample;

  OdeState k1;
  try {
    k1 = f(s0, z0);
  } catch (const std::domain_error& e) {
    tr.reason = Termination::StepFailure;
    tr.failure = e.what();
    return tr;
  }
  std::vector<double> gprev;
  for (const Guard& g : ev.guards) gprev.push_back(g.g(s0, z0));

  double s = s0;
  OdeState z = std::move(z0);
  const double span = cfg.t_end - s0;
  double h = cfg.h0 > 0 ? std::min(cfg.h0, span) : detail::initial_step(f, s, z, k1, cfg, span);
  const bool dense = !samples.empty() || !ev.guards.empty();
  while (s < cfg.t_end) {
    if (tr.steps >= cfg.max_steps) {
      tr.reason = Termination::StepFailure;
      tr.failure = "maximum number of steps reached";
      return tr;
    }
    h = std::min({h, cfg.hmax, cfg.t_end - s});
    if (h < 1e-13 * std::max(1.0, std::abs(s))) {
      tr.reason = Termination::StepFailure;
      tr.failure = "step size underflow at s = " + std::to_string(s);
      return tr;
    }
    detail::Step st;
    double err = 0;
    try {
      st = detail::dp5_step(f, s, z, k1, h, dense);
      err = detail::finite(st.y1) && detail::finite(st.err) ? detail::error_norm(st, z, cfg)
                                                            : std::numeric_limits<double>::infinity();
    } catch (const std::domain_error&) {
      err = std::numeric_limits<double>::infinity();
    }
    if (!(err <= 1)) {
      ++tr.rejected;
      h *= std::isfinite(err) ? std::max(0.2, 0.9 * std::pow(err, -0.2)) : 0.25;
      continue;
    }
    ++tr.steps;
    const double s1 = (cfg.t_end - s - h <= 1e-14 * std::max(1.0, std::abs(cfg.t_end))) ? cfg.t_end : s + h;
    auto at = [&](double u) { return detail::dense_eval(st, (u - s) / h); };

    // Events on this step.
    std::vector<double> gnew;
    for (const Guard& g : ev.guards) gnew.push_back(g.g(s1, st.y1));
    int hit = -1;
    double hit_s = s1;
    for (std::size_t i = 0; i < ev.guards.size(); ++i) {
      if (gprev[i] > 0 && gnew[i] <= 0) {
        double lo = s, hi = s1, glo = gprev[i], ghi = gnew[i];
        while (hi - lo > ev.delta) {
          const double mid = 0.5 * (lo + hi);
          if (!(mid > lo && mid < hi)) break;
          const double gm = ev.guards[i].g(mid, at(mid));
          if (gm > 0) {
            lo = mid;
            glo = gm;
          } else {
            hi = mid;
            ghi = gm;
          }
        }
        EventHit e{ev.guards[i].name, lo, hi, glo, ghi};
        if (ev.guards[i].terminal && (hit < 0 || hi < hit_s)) {
          hit = static_cast<int>(tr.events.size());
          hit_s = hi;
        }
        tr.events.push_back(e);
      }
    }
    const double stop = hit >= 0 ? hit_s : s1;
    while (next_sample < samples.size() && samples[next_sample] <= stop) {
      push(samples[next_sample], at(samples[next_sample]));
      ++next_sample;
    }
    if (hit >= 0) {
      // Keep only events up to the terminal one.
      EventHit term = tr.events[hit];
      std::vector<EventHit> kept;
      for (const EventHit& e : tr.events) {
        if (e.hi <= hit_s && e.name != term.name) kept.push_back(e);
      }
      kept.push_back(term);
      tr.events = kept;
      push(hit_s, hit_s == s1 ? st.y1 : at(hit_s));
      tr.reason = Termination::Event;
      return tr;
    }
    if (samples.empty()) push(s1, st.y1);
    gprev = gnew;
    s = s1;
    z = st.y1;
    k1 = st.k7;
    const double fac = err == 0 ? 5.0 : std::min(5.0, std::max(0.2, 0.9 * std::pow(err, -0.2)));
    h *= fac;
  }
  tr.reason = Termination::ReachedEnd;
  if (!samples.empty() && (tr.s.empty() || tr.s.back() < s)) push(s, z);
  return tr;
}

/// Fixed-step Dormand-Prince (fifth-order solution), for order checks.
inline OdeState integrate_fixed(const OdeFn& f, double s0, OdeState z, double s1, long steps) {
  const double h = (s1 - s0) / static_cast<double>(steps);
  double s = s0;
  OdeState k1 = f(s, z);
  for (long i = 0; i < steps; ++i) {
    const detail::Step st = detail::dp5_step(f, s, z, k1, h, false);
    z = st.y1;
    k1 = st.k7;
    s = s0 + static_cast<double>(i + 1) * h;
  }
  return z;
}

/// Observed order from fixed-step errors at halved step sizes against an
/// exact solution: log2 of successive error ratios, averaged over the
/// doublings whose errors stay above round-off.
inline double convergence_order(const OdeFn& f, double s0, const OdeState& z0, double s1,
                                const std::function<OdeState(double)>& exact, long base_steps = 8,
                                int doublings = 4) {
  const OdeState ref = exact(s1);
  std::vector<double> errs;
  long n = base_steps;
  for (int i = 0; i <= doublings; ++i, n *= 2) {
    const OdeState z = integrate_fixed(f, s0, z0, s1, n);
    double e = 0;
    for (std::size_t k = 0; k < z.size(); ++k) e = std::max(e, std::abs(z[k] - ref[k]));
    errs.push_back(e);
  }
  double sum = 0;
  int count = 0;
  for (std::size_t i = 0; i + 1 < errs.size(); ++i) {
    if (errs[i + 1] < 1e-14) break;
    sum += std::log2(errs[i] / errs[i + 1]);
    ++count;
  }
  if (count == 0) throw std::runtime_error("errors at round-off level; increase the step size");
  return sum / count;
}

}  // namespace rhsym

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <variant>
#include <vector>

#include "gronwall/rng.hpp"

namespace gronwall {

/// Right-continuous step function: values[j] on [times[j], times[j+1]).
struct PiecewiseConstant {
  std::vector<double> times;   // start times, times[0] == 0, increasing
  std::vector<double> values;

  static PiecewiseConstant constant(double v) { return {{0.0}, {v}}; }

  double at(double t) const {
    std::size_t j = 0;
    while (j + 1 < times.size() && times[j + 1] <= t) ++j;
    return values[j];
  }

  bool valid() const {
    if (times.empty() || times.size() != values.size()) return false;
    if (times.front() != 0.0) return false;
    return std::is_sorted(times.begin(), times.end());
  }
};

/// One discretized trajectory.  values stops at the hit index when a
/// barrier model stops; the process is constant from there on.
struct PathRecord {
  double dt = 0.0;
  std::vector<double> values;
  double running_sup = 0.0;
  double running_inf = 0.0;
  std::optional<std::size_t> hit_index;
  bool truncated = false;  // horizon or step budget reached before a hit
};

// Brownian motion stopped at the first grid crossing of -barrier.
struct StoppedBm {
  double barrier = 1.0;
  double horizon = 1000.0;
  double dt = 1e-3;
};

// Brownian motion stopped on first exit of (-lower, upper).
struct ExitBm {
  double lower = 1.0;
  double upper = 1.0;
  double dt = 1e-3;
  double horizon = 100.0;
};

// int sigma(s) dW(s) with a piecewise-constant integrand, run to a horizon.
struct SigmaIntegral {
  PiecewiseConstant sigma = PiecewiseConstant::constant(1.0);
  double horizon = 1.0;
  double dt = 1e-3;
};

using MartingaleModel = std::variant<StoppedBm, ExitBm, SigmaIntegral>;

/// Scenario dX = a(s) X ds + dW with Z = X^2, psi = 2 a, H = x0^2 + t.
/// The drift is either a deterministic schedule or the sign-feedback form
/// a_bar * 1{X >= 0} (adapted, genuinely random psi).
struct GronwallScenario {
  double x0 = 1.0;
  PiecewiseConstant drift = PiecewiseConstant::constant(0.0);
  bool sign_feedback = false;
  double feedback_rate = 0.0;  // a_bar, used when sign_feedback
  double horizon = 1.0;
  double dt = 1e-3;
  // Extra per-path slack eta * U added to H (U uniform, independent of W);
  // makes the integral inequality strict while keeping H nondecreasing.
  double slack_noise = 0.0;

  bool psi_deterministic() const { return !sign_feedback; }

  // int_0^t psi(s) ds for deterministic psi, exact on schedule breakpoints.
  double psi_integral(double t) const {
    if (sign_feedback)
      throw std::logic_error("psi_integral: psi is not deterministic");
    double total = 0.0;
    for (std::size_t j = 0; j < drift.times.size(); ++j) {
      const double lo = drift.times[j];
      if (lo >= t) break;
      const double hi =
          j + 1 < drift.times.size() ? std::min(drift.times[j + 1], t) : t;
      total += 2.0 * drift.values[j] * (hi - lo);
    }
    return total;
  }
};

/// All grid series produced by one scenario path, on a common grid.
struct ScenarioPath {
  double dt = 0.0;
  std::vector<double> z;             // X^2
  std::vector<double> h;             // x0^2 + t (+ slack)
  std::vector<double> m;             // 2 int X dW, left-point sums
  std::vector<double> l;             // int exp(-int psi) dM
  std::vector<double> psi_integral;  // rectangle-rule int_0^t psi
  double z_sup = 0.0;
};

/// Draw of sup W(tau_{-b} & t) over all t, exact via the inverse CDF of
/// the ruin law P(sup >= a) = b/(a+b): A = b U/(1-U).
inline double sample_stopped_sup_exact(RngStream& rng, double b) {
  if (!(b > 0.0))
    throw std::invalid_argument("sample_stopped_sup_exact: b must be > 0");
  double u = rng.uniform();
  while (u >= 1.0) u = rng.uniform();
  return b * u / (1.0 - u);
}

/// Draw of Y_i v 0, the clipped supremum between successive hits of
/// -a_prev and -a_cur.  Law: P(Y v 0 >= y) = (a_cur - a_prev)/(a_cur + y)
/// for y >= 0, with an atom of mass a_prev/a_cur at zero.
inline double sample_ladder_rung_exact(RngStream& rng, double a_prev,
                                       double a_cur) {
  if (!(a_prev >= 0.0) || !(a_cur > a_prev)) {
    throw std::invalid_argument(
        "sample_ladder_rung_exact: requires 0 <= a_prev < a_cur");
  }
  double u = rng.uniform();
  while (u >= 1.0) u = rng.uniform();
  const double width = a_cur - a_prev;
  // Tail at 0 is width/a_cur; u below the atom mass maps to the atom.
  if (u < a_prev / a_cur) return 0.0;
  // Solve width/(a_cur + y) = 1 - u.
  return width / (1.0 - u) - a_cur;
}

namespace detail {

inline void finalize_extremes(PathRecord& rec) {
  rec.running_sup = *std::max_element(rec.values.begin(), rec.values.end());
  rec.running_inf = *std::min_element(rec.values.begin(), rec.values.end());
}

}  // namespace detail

/// Euler forward path of the given martingale model.  Barrier crossings
/// are detected on the grid only, so the recorded supremum underestimates
/// the true one and the infimum can overshoot the barrier by O(sqrt(dt)).
inline PathRecord simulate_model(const MartingaleModel& model,
                                 RngStream& rng) {
  PathRecord rec;
  const auto run_barrier = [&](double dt, double horizon, double down,
                               double up, bool has_up) {
    rec.dt = dt;
    const auto steps = static_cast<std::size_t>(std::llround(horizon / dt));
    rec.values.reserve(std::min<std::size_t>(steps + 1, 1 << 20));
    double w = 0.0;
    rec.values.push_back(w);
    const double sqdt = std::sqrt(dt);
    for (std::size_t k = 1; k <= steps; ++k) {
      w += sqdt * rng.normal();
      rec.values.push_back(w);
      if (w <= -down || (has_up && w >= up)) {
        rec.hit_index = k;
        detail::finalize_extremes(rec);
        return;
      }
    }
    rec.truncated = true;
    detail::finalize_extremes(rec);
  };

  if (const auto* m = std::get_if<StoppedBm>(&model)) {
    if (!(m->barrier > 0.0) || !(m->dt > 0.0) || !(m->horizon > 0.0))
      throw std::invalid_argument("StoppedBm: invalid parameters");
    run_barrier(m->dt, m->horizon, m->barrier, 0.0, false);
  } else if (const auto* m = std::get_if<ExitBm>(&model)) {
    if (!(m->lower > 0.0) || !(m->upper > 0.0) || !(m->dt > 0.0) ||
        !(m->horizon > 0.0))
      throw std::invalid_argument("ExitBm: invalid parameters");
    run_barrier(m->dt, m->horizon, m->lower, m->upper, true);
  } else {
    const auto& si = std::get<SigmaIntegral>(model);
    if (!si.sigma.valid() || !(si.dt > 0.0) || !(si.horizon > 0.0))
      throw std::invalid_argument("SigmaIntegral: invalid parameters");
    rec.dt = si.dt;
    const auto steps =
        static_cast<std::size_t>(std::llround(si.horizon / si.dt));
    rec.values.reserve(steps + 1);
    double x = 0.0;
    rec.values.push_back(x);
    const double sqdt = std::sqrt(si.dt);
    for (std::size_t k = 0; k < steps; ++k) {
      const double t = static_cast<double>(k) * si.dt;
      x += si.sigma.at(t) * sqdt * rng.normal();
      rec.values.push_back(x);
    }
    detail::finalize_extremes(rec);
  }
  return rec;
}

/// Euler-Maruyama for X with Z = X^2 and the Gronwall companions:
/// M by left-point Ito sums of 2 X dW, L by left-point sums of
/// exp(-int psi) dM, int psi by the rectangle rule, all on one grid.
inline ScenarioPath simulate_scenario(const GronwallScenario& scn,
                                      RngStream& rng) {
  if (!(scn.dt > 0.0) || !(scn.horizon > 0.0))
    throw std::invalid_argument("GronwallScenario: dt and horizon must be > 0");
  if (!scn.sign_feedback && !scn.drift.valid())
    throw std::invalid_argument("GronwallScenario: invalid drift schedule");
  if (scn.sign_feedback && !(scn.feedback_rate >= 0.0))
    throw std::invalid_argument("GronwallScenario: feedback_rate must be >= 0");
  if (!(scn.slack_noise >= 0.0))
    throw std::invalid_argument("GronwallScenario: slack_noise must be >= 0");

  ScenarioPath out;
  out.dt = scn.dt;
  const auto steps =
      static_cast<std::size_t>(std::llround(scn.horizon / scn.dt));
  const double sqdt = std::sqrt(scn.dt);
  const double slack = scn.slack_noise > 0.0
                           ? scn.slack_noise * rng.uniform()
                           : 0.0;

  out.z.reserve(steps + 1);
  out.h.reserve(steps + 1);
  out.m.reserve(steps + 1);
  out.l.reserve(steps + 1);
  out.psi_integral.reserve(steps + 1);

  double x = scn.x0;
  double m_acc = 0.0;
  double l_acc = 0.0;
  double psi_acc = 0.0;
  out.z.push_back(x * x);
  out.h.push_back(scn.x0 * scn.x0 + slack);
  out.m.push_back(0.0);
  out.l.push_back(0.0);
  out.psi_integral.push_back(0.0);
  out.z_sup = x * x;

  for (std::size_t k = 0; k < steps; ++k) {
    const double t = static_cast<double>(k) * scn.dt;
    const double a = scn.sign_feedback
                         ? (x >= 0.0 ? scn.feedback_rate : 0.0)
                         : scn.drift.at(t);
    const double dw = sqdt * rng.normal();
    const double dm = 2.0 * x * dw;
    m_acc += dm;
    l_acc += std::exp(-psi_acc) * dm;
    psi_acc += 2.0 * a * scn.dt;
    x += a * x * scn.dt + dw;
    const double z = x * x;
    out.z.push_back(z);
    out.h.push_back(scn.x0 * scn.x0 + (t + scn.dt) + slack);
    out.m.push_back(m_acc);
    out.l.push_back(l_acc);
    out.psi_integral.push_back(psi_acc);
    out.z_sup = std::max(out.z_sup, z);
  }
  return out;
}

}  // namespace gronwall

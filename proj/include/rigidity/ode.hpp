#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "rigidity/common.hpp"

namespace rigidity {

struct OdeOptions {
  double rtol = 1e-10;
  double atol = 1e-12;
  long max_steps = 20'000'000;
};

struct OdeStats {
  long accepted = 0;
  long rejected = 0;
};

namespace detail {

// Dormand-Prince 5(4) tableau.
inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                        a65 = -5103.0 / 18656;
inline constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                        e6 = 22.0 / 525, e7 = -1.0 / 40;

}  // namespace detail

/// Integrates y' = f(t, y) for a complex scalar from (a, y) to b > a with
/// adaptive Dormand-Prince 5(4) steps. `h` carries the step size between
/// calls (0 lets the routine pick one).
template <class Rhs>
Complex dopri5_segment(Rhs& f, double a, Complex y, double b, const OdeOptions& opt, double& h, OdeStats& stats) {
  using namespace detail;
  if (b <= a) return y;
  double t = a;
  if (!(h > 0.0)) h = std::min(b - a, 1e-3 * std::max(1.0, a));
  Complex k1 = f(t, y);
  const double h_min = 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(b));
  while (t < b) {
    if (stats.accepted + stats.rejected > opt.max_steps) {
      throw NumericalFailure("ode: step budget exhausted at t = " + std::to_string(t), y);
    }
    bool last = false;
    if (t + h >= b || b - (t + h) < h_min) {
      h = b - t;
      last = true;
    }
    const Complex k2 = f(t + c2 * h, y + h * (a21 * k1));
    const Complex k3 = f(t + c3 * h, y + h * (a31 * k1 + a32 * k2));
    const Complex k4 = f(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
    const Complex k5 = f(t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const double t_next = last ? b : t + h;
    // Left limit at the segment end: the right-hand side may jump at b.
    const double t_eval = last ? std::nextafter(b, a) : t_next;
    const Complex k6 = f(t_eval, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    const Complex y_next = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const Complex k7 = f(t_eval, y_next);
    const Complex err_vec = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    const double scale = opt.atol + opt.rtol * std::max(std::abs(y), std::abs(y_next));
    const double err = std::abs(err_vec) / scale;
    if (!std::isfinite(err)) throw NumericalFailure("ode: non-finite state at t = " + std::to_string(t), y);

    if (err <= 1.0) {
      t = t_next;
      y = y_next;
      k1 = k7;  // first-same-as-last
      ++stats.accepted;
      const double fac = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
      if (!last) h *= fac;
      else h = std::max(h, h * fac);
    } else {
      ++stats.rejected;
      h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
      if (h < h_min) throw NumericalFailure("ode: step size underflow at t = " + std::to_string(t), y);
    }
  }
  return y;
}

/// Values of the solution at each output time (sorted, >= t0). The
/// integration restarts at every `stops` point so right-hand sides with jumps
/// there are integrated piecewise smoothly.
template <class Rhs>
std::vector<Complex> dopri5_trajectory(Rhs f, double t0, Complex y0, std::span<const double> outputs,
                                       std::span<const double> stops, const OdeOptions& opt,
                                       OdeStats* stats_out = nullptr) {
  std::vector<Complex> values;
  values.reserve(outputs.size());
  OdeStats stats;
  double t = t0;
  Complex y = y0;
  double h = 0.0;
  auto stop = stops.begin();
  for (double target : outputs) {
    if (target < t) throw DomainError("ode: output times must be sorted and >= the initial time");
    while (stop != stops.end() && *stop <= t) ++stop;
    while (stop != stops.end() && *stop < target) {
      y = dopri5_segment(f, t, y, *stop, opt, h, stats);
      t = *stop++;
    }
    y = dopri5_segment(f, t, y, target, opt, h, stats);
    t = target;
    values.push_back(y);
  }
  if (stats_out) *stats_out = stats;
  return values;
}

}  // namespace rigidity

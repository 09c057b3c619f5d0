#include "rigidity/mu.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rigidity/parallel.hpp"

namespace rigidity {

namespace {

constexpr double kNewtonMargin = 0.01;
constexpr double kNewtonMaxModulus = 1e6;
constexpr int kMaxHalvings = 8;
constexpr int kPolishSteps = 2;
constexpr double kScanSigmaFloor = 0.02;

double newton_mu_tolerance(double zero_tol) { return std::max(kMinTolerance, 1e-2 * zero_tol); }

class WindingCounter {
 public:
  WindingCounter(const EtaFunction& eta, double tol) : eta_(eta), tol_(tol) {}

  Complex sample(Complex w) const {
    const Complex v = mu_eval(eta_, w, tol_).value;
    if (std::abs(v) <= 10.0 * tol_) {
      throw InconclusiveError("winding_number: |mu| <= 10 tol on the contour near " + std::to_string(w.real()) +
                              (w.imag() < 0 ? "" : "+") + std::to_string(w.imag()) + "i");
    }
    return v;
  }

  double phase(Complex a, Complex b, Complex fa, Complex fb, int depth) const {
    const double d = std::arg(fb / fa);
    if (std::abs(d) < kPi / 2) return d;
    if (depth >= 40) throw InconclusiveError("winding_number: contour refinement depth exhausted");
    const Complex m = 0.5 * (a + b);
    const Complex fm = sample(m);
    return phase(a, m, fa, fm, depth + 1) + phase(m, b, fm, fb, depth + 1);
  }

 private:
  const EtaFunction& eta_;
  double tol_;
};

}  // namespace

MuResult mu_eval(const EtaFunction& eta, const StripPoint& w, double tol, TailMethodChoice method) {
  check_tolerance(tol, "mu_eval");
  if (!w.in_half_plane()) throw DomainError("mu_eval requires Re(w) > 0");
  if (!eta.infinite_horizon()) throw UnsupportedError("mu_eval: " + eta.id() + " has a finite horizon");
  const Complex one_minus_w = 1.0 - w.w();
  const double scale = std::max(1.0, std::abs(one_minus_w));
  const auto tail = tail_integral(eta, w.w(), 1.0, tol / (2.0 * scale), method);
  return {-1.0 - one_minus_w * tail.value, tail.certificate, std::abs(one_minus_w) * tail.total_error()};
}

Complex mu_derivative(const EtaFunction& eta, const StripPoint& w, double tol) {
  check_tolerance(tol, "mu_derivative");
  if (!w.in_half_plane()) throw DomainError("mu_derivative requires Re(w) > 0");
  if (!eta.infinite_horizon()) throw UnsupportedError("mu_derivative: " + eta.id() + " has a finite horizon");
  const Complex one_minus_w = 1.0 - w.w();
  const auto plain = tail_integral(eta, w.w(), 1.0, 0.5 * tol);
  const auto logged = tail_integral(eta, w.w(), 1.0, 0.5 * tol / std::max(1.0, std::abs(one_minus_w)),
                                    TailMethodChoice::automatic, 1);
  return plain.value + one_minus_w * logged.value;
}

ZeroRecord find_zero_newton(const EtaFunction& eta, Complex seed, const NewtonOptions& options) {
  check_tolerance(options.zero_tol, "find_zero_newton");
  if (!(seed.real() > 0.0)) throw DomainError("find_zero_newton: seed must lie in Re(w) > 0");
  const double mu_tol = newton_mu_tolerance(options.zero_tol);
  auto mu = [&](Complex w) { return mu_eval(eta, w, mu_tol).value; };
  auto admissible = [](Complex w) { return w.real() > kNewtonMargin && std::abs(w) <= kNewtonMaxModulus; };

  std::vector<Complex> trace{seed};
  Complex w = seed;
  Complex value = mu(w);
  double last_step = 0.0;
  int iters = 0;

  // One damped Newton step; returns false when no admissible point was found.
  auto step_once = [&](bool require_decrease) {
    const Complex d = mu_derivative(eta, w, mu_tol);
    if (d == Complex{} || !std::isfinite(std::abs(d))) {
      throw NewtonFailure("find_zero_newton: vanishing derivative", trace, w);
    }
    Complex step = value / d;
    for (int halving = 0; halving <= kMaxHalvings; ++halving, step *= 0.5) {
      const Complex candidate = w - step;
      if (!admissible(candidate)) continue;
      const Complex candidate_value = mu(candidate);
      if (std::abs(candidate_value) < std::abs(value) || (!require_decrease && halving == kMaxHalvings)) {
        w = candidate;
        value = candidate_value;
        last_step = std::abs(step);
        ++iters;
        trace.push_back(w);
        return true;
      }
    }
    return false;
  };

  while (std::abs(value) > options.zero_tol) {
    if (iters >= options.max_iter) {
      throw NewtonFailure("find_zero_newton: no convergence in " + std::to_string(options.max_iter) + " iterations",
                          trace, w);
    }
    if (!step_once(false)) {
      throw NewtonFailure("find_zero_newton: iterate left Re(w) > 0.01 or |w| <= 1e6", trace, w);
    }
  }
  for (int p = 0; p < kPolishSteps && std::abs(value) > 0.0; ++p) {
    if (!step_once(true)) break;
  }

  ZeroRecord record;
  record.location = w;
  record.residual = std::abs(value);
  record.newton_iters = iters;
  if (!options.certify) return record;

  const double half = std::max(10.0 * last_step, 1e-6);
  record.winding_box = {std::max(w.real() - half, 0.5 * w.real()), w.real() + half, w.imag() - half, w.imag() + half};
  try {
    record.winding = winding_number(eta, record.winding_box, mu_tol);
  } catch (const InconclusiveError&) {
    record.winding.reset();
  }
  const Complex partner = 1.0 - std::conj(w);
  if (partner.real() > 0.0) {
    record.partner_value = mu(partner);
    const bool self_partner = std::abs(partner - w) <= 10.0 * options.zero_tol;
    record.partner_nonzero = self_partner || std::abs(*record.partner_value) > options.zero_tol;
  }
  return record;
}

int winding_number(const EtaFunction& eta, const Rectangle& rect, double tol) {
  check_tolerance(tol, "winding_number");
  if (!(rect.sigma_min > 0.0) || !(rect.sigma_max > rect.sigma_min) || !(rect.tau_max > rect.tau_min)) {
    throw DomainError("winding_number: rectangle must be non-degenerate and inside Re(w) > 0");
  }
  const WindingCounter counter(eta, tol);
  const Complex corners[] = {{rect.sigma_min, rect.tau_min},
                             {rect.sigma_max, rect.tau_min},
                             {rect.sigma_max, rect.tau_max},
                             {rect.sigma_min, rect.tau_max}};
  constexpr int kSamplesPerEdge = 16;
  double total = 0.0;
  const Complex start_value = counter.sample(corners[0]);
  Complex prev = corners[0];
  Complex prev_value = start_value;
  for (int e = 0; e < 4; ++e) {
    const Complex a = corners[e];
    const Complex b = corners[(e + 1) % 4];
    for (int k = 1; k <= kSamplesPerEdge; ++k) {
      const bool closing = e == 3 && k == kSamplesPerEdge;
      const Complex p = closing ? corners[0] : a + (b - a) * (static_cast<double>(k) / kSamplesPerEdge);
      const Complex v = closing ? start_value : counter.sample(p);
      total += counter.phase(prev, p, prev_value, v, 0);
      prev = p;
      prev_value = v;
    }
  }
  const double turns = total / kTwoPi;
  const double rounded = std::round(turns);
  if (std::abs(turns - rounded) > 0.05) throw InconclusiveError("winding_number: phase total is not an integer");
  return static_cast<int>(rounded);
}

std::vector<double> step_grid(double a, double b, double step) {
  if (!(step > 0.0) || !(b >= a) || !std::isfinite(a) || !std::isfinite(b)) {
    throw DomainError("step grid needs a <= b and a positive step");
  }
  const auto n = static_cast<std::size_t>(std::floor((b - a) / step + 1e-9));
  std::vector<double> out(n + 1);
  for (std::size_t k = 0; k <= n; ++k) out[k] = a + static_cast<double>(k) * step;
  return out;
}

LineHypothesis check_line_hypothesis(const EtaFunction& eta, double beta_min, double beta_max, double step,
                                     double tol) {
  std::vector<double> betas;
  for (double b : step_grid(beta_min, beta_max, step)) {
    if (std::abs(b) > 1e-9 * step) betas.push_back(b);
  }
  std::vector<double> values(betas.size());
  parallel_for(betas.size(), [&](std::size_t i) { values[i] = std::abs(mu_eval(eta, {1.0, betas[i]}, tol).value); });
  LineHypothesis out{std::numeric_limits<double>::infinity(), 0.0, betas.size()};
  for (std::size_t i = 0; i < betas.size(); ++i) {
    if (values[i] < out.min_abs) {
      out.min_abs = values[i];
      out.argmin_beta = betas[i];
    }
  }
  return out;
}

ScanReport scan_strip(const EtaFunction& eta, const ScanRegion& region, double zero_tol, double tol) {
  check_tolerance(zero_tol, "scan_strip");
  check_tolerance(tol, "scan_strip");
  if (region.sigma_min < 0.01 - 1e-12 || region.sigma_max > 0.99 + 1e-12) {
    throw DomainError("scan_strip: sigma range must lie within [0.01, 0.99]");
  }
  ScanReport report;
  report.region = region;
  if (report.region.sigma_min < kScanSigmaFloor) {
    report.region.sigma_min = kScanSigmaFloor;
    report.sigma_clamped = true;
  }
  const ScanRegion& r = report.region;
  const auto sigmas = step_grid(r.sigma_min, std::max(r.sigma_min, r.sigma_max), r.sigma_step);
  const auto taus = step_grid(r.tau_min, r.tau_max, r.tau_step);
  const std::size_t ns = sigmas.size();
  const std::size_t nt = taus.size();

  std::vector<double> abs_mu(ns * nt);
  parallel_for(abs_mu.size(), [&](std::size_t idx) {
    const std::size_t i = idx / nt;
    const std::size_t j = idx % nt;
    try {
      abs_mu[idx] = std::abs(mu_eval(eta, {sigmas[i], taus[j]}, tol).value);
    } catch (const NumericalFailure&) {
      abs_mu[idx] = std::numeric_limits<double>::quiet_NaN();
    }
  });
  report.grid.reserve(abs_mu.size());
  for (std::size_t idx = 0; idx < abs_mu.size(); ++idx) {
    report.grid.push_back({sigmas[idx / nt], taus[idx % nt], abs_mu[idx]});
  }

  // Local minima over the 8-neighbourhood seed Newton.
  std::vector<Complex> seeds;
  for (std::size_t i = 0; i < ns; ++i) {
    for (std::size_t j = 0; j < nt; ++j) {
      const double v = abs_mu[i * nt + j];
      if (!std::isfinite(v)) continue;
      bool minimum = true;
      for (int di = -1; di <= 1 && minimum; ++di) {
        for (int dj = -1; dj <= 1 && minimum; ++dj) {
          if (di == 0 && dj == 0) continue;
          const auto ii = static_cast<std::ptrdiff_t>(i) + di;
          const auto jj = static_cast<std::ptrdiff_t>(j) + dj;
          if (ii < 0 || jj < 0 || ii >= static_cast<std::ptrdiff_t>(ns) || jj >= static_cast<std::ptrdiff_t>(nt)) continue;
          const double n = abs_mu[static_cast<std::size_t>(ii) * nt + static_cast<std::size_t>(jj)];
          if (std::isfinite(n) && n < v) minimum = false;
        }
      }
      if (minimum) seeds.emplace_back(sigmas[i], taus[j]);
    }
  }

  // A simple zero within one cell leaves |mu| <= |mu'| * diagonal at the
  // nearest grid point; minima well above that are slopes, not zeros.
  const double diagonal = std::hypot(r.sigma_step, r.tau_step);
  std::vector<char> keep(seeds.size(), 1);
  parallel_for(seeds.size(), [&](std::size_t k) {
    try {
      const double value = std::abs(mu_eval(eta, seeds[k], tol).value);
      keep[k] = value <= std::abs(mu_derivative(eta, seeds[k], tol)) * diagonal;
    } catch (const NumericalFailure&) {
    }
  });
  std::vector<Complex> kept;
  for (std::size_t k = 0; k < seeds.size(); ++k) {
    if (keep[k]) kept.push_back(seeds[k]);
  }
  seeds = std::move(kept);

  std::vector<std::optional<ZeroRecord>> refined(seeds.size());
  std::vector<char> failed(seeds.size(), 0);
  NewtonOptions newton;
  newton.zero_tol = zero_tol;
  newton.certify = false;
  parallel_for(seeds.size(), [&](std::size_t k) {
    try {
      refined[k] = find_zero_newton(eta, seeds[k], newton);
    } catch (const NumericalFailure&) {
      failed[k] = 1;
    }
  });

  const double radius = 10.0 * zero_tol;
  Rectangle box{r.sigma_min - radius, r.sigma_max + radius, r.tau_min - radius, r.tau_max + radius};
  std::vector<ZeroRecord> unique;
  for (std::size_t k = 0; k < seeds.size(); ++k) {
    if (failed[k]) {
      report.candidates.push_back(seeds[k]);
      continue;
    }
    const ZeroRecord& z = *refined[k];
    if (!box.contains(z.location)) continue;
    const bool duplicate = std::any_of(unique.begin(), unique.end(), [&](const ZeroRecord& u) {
      return std::abs(u.location - z.location) < radius;
    });
    if (!duplicate) unique.push_back(z);
  }
  std::sort(unique.begin(), unique.end(), [](const ZeroRecord& a, const ZeroRecord& b) {
    return a.location.imag() != b.location.imag() ? a.location.imag() < b.location.imag()
                                                   : a.location.real() < b.location.real();
  });

  // Certify each distinct zero (winding square and partner).
  newton.certify = true;
  report.zeros.resize(unique.size());
  parallel_for(unique.size(), [&](std::size_t k) {
    const int prior_iters = unique[k].newton_iters;
    report.zeros[k] = find_zero_newton(eta, unique[k].location, newton);
    report.zeros[k].newton_iters += prior_iters;
  });

  report.line = check_line_hypothesis(eta, r.tau_min, r.tau_max, r.tau_step, tol);
  report.line_hypothesis_min = report.line.min_abs;
  return report;
}

const char* to_string(PairStatus status) {
  switch (status) {
    case PairStatus::both_zero: return "both_zero";
    case PairStatus::s_only: return "s_only";
    case PairStatus::partner_only: return "partner_only";
    case PairStatus::neither: return "neither";
  }
  return "unknown";
}

PairStatus check_pair(const EtaFunction& eta, const StripPoint& s, double zero_tol, double tol) {
  if (!s.in_B()) throw DomainError("check_pair requires s in B (0 < sigma < 1, sigma != 1/2, tau != 0)");
  const bool s_zero = std::abs(mu_eval(eta, s, tol).value) <= zero_tol;
  const bool partner_zero = std::abs(mu_eval(eta, s.reflected(), tol).value) <= zero_tol;
  if (s_zero && partner_zero) return PairStatus::both_zero;
  if (s_zero) return PairStatus::s_only;
  if (partner_zero) return PairStatus::partner_only;
  return PairStatus::neither;
}

}  // namespace rigidity

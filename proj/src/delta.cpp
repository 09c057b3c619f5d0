#include "rigidity/delta.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rigidity/mu.hpp"
#include "rigidity/parallel.hpp"

namespace rigidity {

namespace {

void check_strip(const StripPoint& s, const char* what) {
  if (!(s.sigma() > 0.0 && s.sigma() < 1.0)) {
    throw DomainError(std::string(what) + ": sigma must lie in the open interval (0, 1)");
  }
  if (s.sigma() == 0.5) throw DomainError(std::string(what) + ": sigma = 1/2 makes delta undefined");
  if (s.tau() == 0.0) throw DomainError(std::string(what) + ": tau must be nonzero");
}

void check_time(const EtaFunction& eta, double t, const char* what) {
  if (!(t >= 1.0)) throw DomainError(std::string(what) + ": t must be >= 1");
  if (t > eta.horizon()) throw DomainError(std::string(what) + ": t beyond the horizon of " + eta.id());
}

void check_grid(const EtaFunction& eta, std::span<const double> grid, const char* what) {
  if (grid.empty()) throw DomainError(std::string(what) + ": empty grid");
  if (!std::is_sorted(grid.begin(), grid.end())) throw DomainError(std::string(what) + ": grid must be increasing");
  check_time(eta, grid.front(), what);
  check_time(eta, grid.back(), what);
}

// Integration nodes in x = log v for integrands built on eta over [1, t].
std::vector<double> log_nodes(const EtaFunction& eta, double tau, double t) {
  auto nodes = log_panel_nodes(eta, tau, 1.0, t);
  for (double& v : nodes) v = std::log(v);
  return nodes;
}

QuadratureResult integrate_x(const Integrand& f, std::span<const double> x_nodes, double tol) {
  QuadratureOptions opts;
  opts.abs_tol = tol;
  return integrate_partitioned(f, x_nodes, opts);
}

// delta_s on [1, t_max] from two cached psi evaluators.
class DirectDelta {
 public:
  DirectDelta(const EtaFunction& eta, const StripPoint& s, double t_max, double tol)
      : scale_(2.0 * s.sigma() - 1.0),
        psi_s_(eta, s, t_max, psi_tolerance(s, tol)),
        psi_r_(eta, s.reflected(), t_max, psi_tolerance(s, tol)) {}

  Complex operator()(double t) const { return (psi_s_(t) - psi_r_(t)) / scale_; }

 private:
  static double psi_tolerance(const StripPoint& s, double tol) {
    return std::max(kMinTolerance, 0.5 * tol * std::abs(2.0 * s.sigma() - 1.0));
  }
  double scale_;
  PsiEvaluator psi_s_;
  PsiEvaluator psi_r_;
};

}  // namespace

Complex delta_direct(const EtaFunction& eta, const StripPoint& s, double t, double tol) {
  check_tolerance(tol, "delta_direct");
  check_strip(s, "delta_direct");
  check_time(eta, t, "delta_direct");
  if (t == 1.0) return {};
  const double psi_tol = std::max(kMinTolerance, 0.5 * tol * std::abs(2.0 * s.sigma() - 1.0));
  return (psi_closed_form(eta, s, t, psi_tol) - psi_closed_form(eta, s.reflected(), t, psi_tol)) /
         (2.0 * s.sigma() - 1.0);
}

LineDelta::LineDelta(const EtaFunction& eta, double tau, double t_max, double tol)
    : tau_(tau),
      j1_(eta, Complex{1.0, tau}, t_max, 0.5 * tol / std::max(1.0, std::abs(Complex{1.0, -tau}))),
      j2_(eta, Complex{2.0, tau}, t_max, 0.5 * tol / (t_max * std::max(1.0, std::abs(tau)))) {}

Complex LineDelta::operator()(double t) const {
  if (t == 1.0) return {};
  const Complex i_tau{0.0, tau_};
  return t * (1.0 - i_tau * j2_(t)) - 1.0 - (1.0 - i_tau) * j1_(t);
}

Complex delta_line(const EtaFunction& eta, double tau, double t, double tol) {
  check_tolerance(tol, "delta_line");
  check_time(eta, t, "delta_line");
  if (t == 1.0) return {};
  return LineDelta(eta, tau, t, tol)(t);
}

Complex delta_volterra(const EtaFunction& eta, const StripPoint& s, double t, double tol) {
  check_tolerance(tol, "delta_volterra");
  check_strip(s, "delta_volterra");
  check_time(eta, t, "delta_volterra");
  if (t == 1.0) return {};
  const double sigma = s.sigma();
  const double kappa = sigma * (1.0 - sigma) / (2.0 * sigma - 1.0);
  const double log_t = std::log(t);
  // The kernel weight is at most t^max(sigma, 1-sigma) over log t.
  const double weight = std::abs(kappa) * log_t * std::pow(t, std::max(sigma, 1.0 - sigma));
  const LineDelta line(eta, s.tau(), t, 0.25 * tol / std::max(1.0, weight));
  const auto nodes = log_nodes(eta, s.tau(), t);
  const auto conv = integrate_x(
      [&](double x) {
        const double lag = log_t - x;
        return (std::exp(sigma * lag) - std::exp((1.0 - sigma) * lag)) * line(std::exp(x));
      },
      nodes, 0.5 * tol / std::max(1e-300, std::abs(kappa)));
  return line(t) - kappa * conv.value;
}

Prop1Evaluation prop1_residual(const EtaFunction& eta, const StripPoint& s, double t, double tol,
                               double boundary_sign) {
  check_tolerance(tol, "prop1_residual");
  check_strip(s, "prop1_residual");
  check_time(eta, t, "prop1_residual");
  Prop1Evaluation out;
  if (t == 1.0) return out;

  const double sigma = s.sigma();
  const double log_t = std::log(t);
  const Complex decay{0.5, s.tau()};  // v^{-3/2 - i tau} dv = e^{-(1/2 + i tau) x} dx
  const double part_tol = 0.2 * tol;
  const double shift_sq = (sigma - 0.5) * (sigma - 0.5);
  const DirectDelta delta(eta, s, t, part_tol / std::max(1.0, shift_sq * log_t * log_t));
  const auto nodes = log_nodes(eta, s.tau(), t);

  const auto memory = integrate_x(
      [&](double x) { return (log_t - x) * std::exp(-0.5 * x) * delta(std::exp(x)); }, nodes,
      part_tol / std::max(1e-300, shift_sq));
  const auto weighted = integrate_x(
      [&](double x) { return (log_t - x) * std::exp(-decay * x) * eta.eval_unchecked(std::exp(x)); }, nodes,
      part_tol / std::abs(Complex{0.5, -s.tau()}));
  const auto plain = integrate_x(
      [&](double x) { return std::exp(-decay * x) * eta.eval_unchecked(std::exp(x)); }, nodes, part_tol);

  out.lhs = delta(t) / std::sqrt(t);
  out.rhs = shift_sq * memory.value + log_t + Complex{0.5, -s.tau()} * weighted.value + boundary_sign * plain.value;
  out.residual = std::abs(out.lhs - out.rhs);
  return out;
}

MajorationReport majoration_check(const EtaFunction& eta, double tau, std::span<const double> grid, double tol) {
  check_tolerance(tol, "majoration_check");
  if (tau == 0.0) throw DomainError("majoration_check requires tau != 0");
  eta.require_rotation_hypothesis("majoration_check");
  check_grid(eta, grid, "majoration_check");

  MajorationReport report;
  report.grid.assign(grid.begin(), grid.end());
  const double t_max = grid.back();
  report.mu_line = mu_eval(eta, {1.0, tau}, std::max(kMinTolerance, tol / t_max)).value;
  const LineDelta line(eta, tau, t_max, tol);
  report.delta_line.resize(grid.size());
  report.values.resize(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) {
    report.delta_line[i] = line(grid[i]);
    report.values[i] = std::abs(report.delta_line[i] + grid[i] * report.mu_line);
  });
  const std::size_t half = grid.size() / 2;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    report.sup_value = std::max(report.sup_value, report.values[i]);
    double& half_sup = i < half ? report.first_half_sup : report.second_half_sup;
    half_sup = std::max(half_sup, report.values[i]);
  }
  report.trend = report.first_half_sup > 0.0 ? report.second_half_sup / report.first_half_sup
                                             : std::numeric_limits<double>::infinity();
  return report;
}

double ratio_predicted(double sigma, double t) {
  const double denom = 2.0 * sigma - 1.0;
  return sigma / (denom * std::pow(t, 1.0 - sigma)) - (1.0 - sigma) / (denom * std::pow(t, sigma));
}

Complex oscillation_coefficient(Complex rho, Complex s) {
  const Complex sb = std::conj(s);
  return rho * ((s - 1.0) / s + sb / (1.0 - sb));
}

std::vector<DeltaSample> ratio_series(const EtaFunction& eta, const StripPoint& s, std::span<const double> t_grid,
                                      double tol) {
  check_tolerance(tol, "ratio_series");
  if (!s.in_B()) throw DomainError("ratio_series requires s in B (0 < sigma < 1, sigma != 1/2, tau != 0)");
  eta.require_rotation_hypothesis("ratio_series");
  check_grid(eta, t_grid, "ratio_series");
  const Complex mu_line = mu_eval(eta, {1.0, s.tau()}, tol).value;
  if (!(std::abs(mu_line.imag()) > 1e-6)) {
    throw PreconditionError("ratio_series requires |Im mu(1 + i tau)| > 1e-6", std::abs(mu_line.imag()));
  }

  // Shared immutable caches, built sequentially before the parallel sweep.
  const double t_max = t_grid.back();
  const DirectDelta direct(eta, s, t_max, tol);
  const LineDelta line(eta, s.tau(), t_max, tol);
  const Complex omega = oscillation_coefficient(eta.rho(), s.w());

  std::vector<DeltaSample> out(t_grid.size());
  parallel_for(t_grid.size(), [&](std::size_t i) {
    DeltaSample& d = out[i];
    d.t = t_grid[i];
    d.delta_s = d.t == 1.0 ? Complex{} : direct(d.t);
    d.delta_line = line(d.t);
    d.ratio_predicted = ratio_predicted(s.sigma(), d.t);
    d.oscillation_coeff = omega;
    d.flagged = std::abs(d.delta_line.imag()) < 1e-12;
    d.ratio_observed = d.flagged ? std::numeric_limits<double>::quiet_NaN() : d.delta_s.imag() / d.delta_line.imag();
  });
  return out;
}

}  // namespace rigidity

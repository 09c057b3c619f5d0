#include "rigidity/solver.hpp"

#include <algorithm>
#include <cmath>

#include "rigidity/mu.hpp"
#include "rigidity/ode.hpp"
#include "rigidity/parallel.hpp"

namespace rigidity {

namespace {

void check_time(const EtaFunction& eta, double t, const char* what) {
  if (!(t >= 1.0)) throw DomainError(std::string(what) + ": t must be >= 1");
  if (t > eta.horizon()) throw DomainError(std::string(what) + ": t beyond the horizon of " + eta.id());
}

// Absolute tolerance on int_1^t u^{-1-w} eta so that psi is within tol.
double integral_tolerance(const StripPoint& w, double t, double tol) {
  return tol / (std::max(1.0, std::pow(t, w.sigma())) * std::max(1.0, std::abs(1.0 - w.w())));
}

double mu_tolerance(double tol, double zero_tol) { return std::max(kMinTolerance, std::min(tol, 1e-2 * zero_tol)); }

void require_zero(const EtaFunction& eta, const StripPoint& w, double tol, double zero_tol) {
  const double mu_abs = std::abs(mu_eval(eta, w, mu_tolerance(tol, zero_tol)).value);
  if (mu_abs > zero_tol) {
    throw PreconditionError("mu(w) is not numerically zero: |mu| = " + std::to_string(mu_abs), mu_abs);
  }
}

const EtaFunction& validated(const EtaFunction& eta, double t_max, double tol) {
  check_tolerance(tol, "PsiEvaluator");
  check_time(eta, t_max, "PsiEvaluator");
  return eta;
}

}  // namespace

Complex psi_closed_form(const EtaFunction& eta, const StripPoint& w, double t, double tol) {
  check_tolerance(tol, "psi_closed_form");
  check_time(eta, t, "psi_closed_form");
  if (t == 1.0) return {1.0, 0.0};
  const auto j = mellin_integral(eta, w.w(), 1.0, t, integral_tolerance(w, t, tol));
  return std::pow(t, w.sigma()) * (1.0 + (1.0 - w.w()) * j.value);
}

PsiEvaluator::PsiEvaluator(const EtaFunction& eta, const StripPoint& w, double t_max, double tol)
    : w_(w), prefix_(validated(eta, t_max, tol), 1.0 + w.w(), t_max, integral_tolerance(w, t_max, tol)) {}

Complex PsiEvaluator::operator()(double t) const {
  if (t == 1.0) return {1.0, 0.0};
  return std::pow(t, w_.sigma()) * (1.0 + (1.0 - w_.w()) * prefix_(t));
}

std::vector<TrajectoryPoint> PsiEvaluator::trajectory(std::span<const double> grid) const {
  std::vector<TrajectoryPoint> out(grid.size());
  const bool has_theta = w_.tau() != 0.0;
  parallel_for(grid.size(), [&](std::size_t i) {
    const double t = grid[i];
    TrajectoryPoint& p = out[i];
    p.t = t;
    p.psi = (*this)(t);
    p.x_half = p.psi / std::sqrt(t);
    if (has_theta) p.theta = real_pow(t, {0.0, w_.tau()}) * p.psi / (1.0 - w_.w());
  });
  return out;
}

std::vector<Complex> psi_ode_trajectory(const EtaFunction& eta, const StripPoint& w, std::span<const double> grid,
                                        double tol) {
  check_tolerance(tol, "psi_ode_oracle");
  if (grid.empty()) return {};
  if (!std::is_sorted(grid.begin(), grid.end())) throw DomainError("psi_ode_oracle: grid must be increasing");
  check_time(eta, grid.front(), "psi_ode_oracle");
  check_time(eta, grid.back(), "psi_ode_oracle");

  const double sigma = w.sigma();
  const Complex drive = 1.0 - w.w();
  const Complex kernel_exp{-1.0, -w.tau()};
  auto rhs = [&](double t, Complex x) { return sigma * x / t + drive * real_pow(t, kernel_exp) * eta.eval_unchecked(t); };

  std::vector<double> stops;
  if (std::holds_alternative<FractionalPartEta>(eta.kind()) || std::holds_alternative<SampledEta>(eta.kind())) {
    stops = eta.breakpoints(1.0, grid.back());
  }
  OdeOptions opt;
  opt.rtol = std::clamp(tol * 1e-3, 1e-14, 1e-6);
  opt.atol = tol * 1e-3;
  return dopri5_trajectory(rhs, 1.0, Complex{1.0, 0.0}, grid, stops, opt);
}

Complex psi_ode_oracle(const EtaFunction& eta, const StripPoint& w, double t, double tol) {
  const double grid[] = {t};
  return psi_ode_trajectory(eta, w, grid, tol).front();
}

Complex psi_bounded_form(const EtaFunction& eta, const StripPoint& w, double t, double tol, double zero_tol) {
  check_tolerance(tol, "psi_bounded_form");
  if (!w.in_half_plane()) throw DomainError("psi_bounded_form requires Re(w) > 0");
  check_time(eta, t, "psi_bounded_form");
  require_zero(eta, w, tol, zero_tol);
  const auto tail = tail_integral(eta, w.w(), t, integral_tolerance(w, t, tol));
  return -(1.0 - w.w()) * std::pow(t, w.sigma()) * tail.value;
}

Complex theta_solution(const EtaFunction& eta, const StripPoint& w, double t, double tol) {
  if (w.tau() == 0.0) throw DomainError("theta_solution requires Im(w) != 0");
  return real_pow(t, {0.0, w.tau()}) * psi_closed_form(eta, w, t, tol) / (1.0 - w.w());
}

Lemma1Report lemma1_residual(const EtaFunction& eta, const StripPoint& w, std::span<const double> grid, double tol,
                             double zero_tol) {
  check_tolerance(tol, "lemma1_residual");
  eta.require_rotation_hypothesis("lemma1_residual");
  if (!w.in_half_plane()) throw DomainError("lemma1_residual requires Re(w) > 0");
  if (grid.empty()) throw DomainError("lemma1_residual: empty grid");
  for (double t : grid) check_time(eta, t, "lemma1_residual");

  Lemma1Report report;
  report.mu_abs = std::abs(mu_eval(eta, w, mu_tolerance(tol, zero_tol)).value);
  if (report.mu_abs > zero_tol) {
    throw PreconditionError("mu(w) is not numerically zero: |mu| = " + std::to_string(report.mu_abs), report.mu_abs);
  }
  const Complex limit = eta.rho() * (w.w() - 1.0) / w.w();
  const Complex drive = -(1.0 - w.w());
  report.residuals.assign(grid.size(), 0.0);
  parallel_for(grid.size(), [&](std::size_t i) {
    const double t = grid[i];
    const auto tail = tail_integral(eta, w.w(), t, integral_tolerance(w, t, tol) / t);
    const Complex psi = drive * std::pow(t, w.sigma()) * tail.value;
    report.residuals[i] = t * std::abs(psi - limit * real_pow(t, {0.0, -w.tau()}));
  });
  const std::size_t half = grid.size() / 2;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    report.sup = std::max(report.sup, report.residuals[i]);
    double& half_sup = i < half ? report.first_half_sup : report.second_half_sup;
    half_sup = std::max(half_sup, report.residuals[i]);
  }
  report.bound = 2.0 * eta.deviation_bound() * std::abs(1.0 - w.w() * w.w()) / (1.0 + w.sigma());
  return report;
}

}  // namespace rigidity

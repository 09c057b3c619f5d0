#pragma once

#include <optional>
#include <span>
#include <vector>

#include "rigidity/common.hpp"
#include "rigidity/eta.hpp"
#include "rigidity/quadrature.hpp"

namespace rigidity {

/// Default threshold for "mu(w) is numerically zero".
inline constexpr double kDefaultZeroTolerance = 1e-9;

/// A complex parameter w = sigma + i tau with the region predicates used
/// throughout: the right half-plane, the closed strip set I and the open
/// strip B (both without the critical line and the real axis).
class StripPoint {
 public:
  StripPoint(Complex w) : w_(w) {}  // NOLINT(google-explicit-constructor)
  StripPoint(double sigma, double tau) : w_(sigma, tau) {}

  Complex w() const { return w_; }
  double sigma() const { return w_.real(); }
  double tau() const { return w_.imag(); }

  bool in_half_plane() const { return sigma() > 0.0; }
  bool in_I() const { return sigma() >= 0.0 && sigma() <= 1.0 && sigma() != 0.5 && tau() != 0.0; }
  bool in_B() const { return sigma() > 0.0 && sigma() < 1.0 && sigma() != 0.5 && tau() != 0.0; }

  /// 1 - conj(w): the reflection through the critical line.
  StripPoint reflected() const { return {1.0 - sigma(), tau()}; }

 private:
  Complex w_;
};

struct TrajectoryPoint {
  double t = 1.0;
  Complex psi{1.0, 0.0};
  std::optional<Complex> theta;
  Complex x_half{1.0, 0.0};  // t^{-1/2} psi
};

/// psi(t) = t^sigma [1 + (1-w) int_1^t u^{-1-w} eta(u) du], absolute error within tol.
Complex psi_closed_form(const EtaFunction& eta, const StripPoint& w, double t, double tol = 1e-10);

/// Closed-form psi on [1, t_max] with the cumulative integral cached, so a
/// sweep over many t costs a single pass. Immutable once built.
class PsiEvaluator {
 public:
  PsiEvaluator(const EtaFunction& eta, const StripPoint& w, double t_max, double tol = 1e-10);

  Complex operator()(double t) const;
  /// Cumulative int_1^t u^{-1-w} eta(u) du.
  Complex integral(double t) const { return prefix_(t); }
  std::vector<TrajectoryPoint> trajectory(std::span<const double> grid) const;
  const StripPoint& point() const { return w_; }

 private:
  StripPoint w_;
  MellinPrefix prefix_;
};

/// psi(t) from x' = sigma x / t + (1-w) t^{-1-i tau} eta(t), x(1) = 1, by
/// adaptive Dormand-Prince integration (restarting at eta's jumps).
Complex psi_ode_oracle(const EtaFunction& eta, const StripPoint& w, double t, double tol = 1e-10);
std::vector<Complex> psi_ode_trajectory(const EtaFunction& eta, const StripPoint& w, std::span<const double> grid,
                                        double tol = 1e-10);

/// -(1-w) t^sigma int_t^inf u^{-1-w} eta(u) du, valid where mu(w) = 0.
/// Throws PreconditionError carrying |mu(w)| when it exceeds zero_tol.
Complex psi_bounded_form(const EtaFunction& eta, const StripPoint& w, double t, double tol = 1e-10,
                         double zero_tol = kDefaultZeroTolerance);

/// theta(t) = t^{i tau} psi(t) / (1-w); requires Im(w) != 0.
Complex theta_solution(const EtaFunction& eta, const StripPoint& w, double t, double tol = 1e-10);

struct Lemma1Report {
  /// sup over the grid of t |psi(t) - rho (w-1)/w t^{-i tau}|
  double sup = 0.0;
  /// 2 c~ |1-w^2| / (1 + sigma)
  double bound = 0.0;
  double first_half_sup = 0.0;
  double second_half_sup = 0.0;
  double mu_abs = 0.0;
  std::vector<double> residuals;  // per grid point
};

/// Bounded-branch asymptotics at a zero of mu. Requires rho != 0 and
/// |mu(w)| <= zero_tol; psi is taken from the bounded form.
Lemma1Report lemma1_residual(const EtaFunction& eta, const StripPoint& w, std::span<const double> grid,
                             double tol = 1e-10, double zero_tol = kDefaultZeroTolerance);

}  // namespace rigidity

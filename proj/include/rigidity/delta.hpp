#pragma once

#include <span>
#include <vector>

#include "rigidity/common.hpp"
#include "rigidity/eta.hpp"
#include "rigidity/quadrature.hpp"
#include "rigidity/solver.hpp"

namespace rigidity {

/// delta_s(t) = (psi_s(t) - psi_{1-conj(s)}(t)) / (2 sigma - 1) for
/// 0 < sigma < 1, sigma != 1/2, tau != 0.
Complex delta_direct(const EtaFunction& eta, const StripPoint& s, double t, double tol = 1e-10);

/// delta on the line Re = 1, i.e. psi_{1+i tau} - psi_{i tau}, through its
/// finite-t expansion
///   t [1 - i tau J_2(t)] - 1 - (1 - i tau) J_1(t),  J_k(t) = int_1^t u^{-k-i tau} eta(u) du,
/// which needs no infinite tail. Both J_k are cached up to t_max.
class LineDelta {
 public:
  LineDelta(const EtaFunction& eta, double tau, double t_max, double tol = 1e-10);
  Complex operator()(double t) const;
  double tau() const { return tau_; }

 private:
  double tau_;
  MellinPrefix j1_;
  MellinPrefix j2_;
};

Complex delta_line(const EtaFunction& eta, double tau, double t, double tol = 1e-10);

/// delta_s(t) from the Volterra representation in terms of the line delta:
///   delta_line(t) - sigma(1-sigma)/(2 sigma-1) int_1^t [(t/v)^sigma - (t/v)^{1-sigma}] v^{-1} delta_line(v) dv.
Complex delta_volterra(const EtaFunction& eta, const StripPoint& s, double t, double tol = 1e-10);

struct Prop1Evaluation {
  Complex lhs;  // t^{-1/2} delta_s(t)
  Complex rhs;
  double residual = 0.0;
};

/// Both sides of the integral equation for x(t) = t^{-1/2} delta_s(t):
///   x(t) = (sigma-1/2)^2 int_1^t log(t/v) v^{-3/2} delta_s(v) dv + log t
///          + (1/2 - i tau) int_1^t log(t/v) v^{-3/2-i tau} eta(v) dv
///          + boundary_sign * int_1^t v^{-3/2-i tau} eta(v) dv.
/// The identity holds with boundary_sign = -1.
Prop1Evaluation prop1_residual(const EtaFunction& eta, const StripPoint& s, double t, double tol = 1e-10,
                               double boundary_sign = -1.0);

struct MajorationReport {
  std::vector<double> grid;
  std::vector<Complex> delta_line;
  /// |delta_line(t) + t mu(1 + i tau)| per grid point
  std::vector<double> values;
  Complex mu_line;
  double sup_value = 0.0;
  double first_half_sup = 0.0;
  double second_half_sup = 0.0;
  /// second_half_sup / first_half_sup
  double trend = 0.0;
};

MajorationReport majoration_check(const EtaFunction& eta, double tau, std::span<const double> grid,
                                  double tol = 1e-10);

struct DeltaSample {
  double t = 1.0;
  Complex delta_s;
  Complex delta_line;
  /// Im delta_s / Im delta_line; NaN when flagged.
  double ratio_observed = 0.0;
  double ratio_predicted = 0.0;
  Complex oscillation_coeff;
  /// |Im delta_line(t)| < 1e-12: the observed ratio is undefined.
  bool flagged = false;
};

/// sigma / ((2 sigma-1) t^{1-sigma}) - (1-sigma) / ((2 sigma-1) t^sigma)
double ratio_predicted(double sigma, double t);

/// rho ((s-1)/s + conj(s)/(1-conj(s)))
Complex oscillation_coefficient(Complex rho, Complex s);

/// Requires s in B, rho != 0 and |Im mu(1 + i tau)| > 1e-6.
std::vector<DeltaSample> ratio_series(const EtaFunction& eta, const StripPoint& s, std::span<const double> t_grid,
                                      double tol = 1e-10);

}  // namespace rigidity

#pragma once

#include <optional>
#include <vector>

#include "rigidity/common.hpp"
#include "rigidity/eta.hpp"
#include "rigidity/quadrature.hpp"
#include "rigidity/solver.hpp"

namespace rigidity {

/// mu(w) = -1 - (1-w) int_1^inf u^{-1-w} eta(u) du.
struct MuResult {
  Complex value;
  /// Certificate of the tail integral behind the value.
  TailCertificate certificate;
  /// Total error bound on `value` (remainder plus quadrature, scaled by |1-w|).
  double error = 0.0;
};

MuResult mu_eval(const EtaFunction& eta, const StripPoint& w, double tol = 1e-10,
                 TailMethodChoice method = TailMethodChoice::automatic);

/// mu'(w) = int_1^inf u^{-1-w} eta + (1-w) int_1^inf u^{-1-w} log(u) eta.
Complex mu_derivative(const EtaFunction& eta, const StripPoint& w, double tol = 1e-10);

class NewtonFailure : public NumericalFailure {
 public:
  NewtonFailure(const std::string& what, std::vector<Complex> trace, Complex last)
      : NumericalFailure(what, last), trace_(std::move(trace)) {}
  const std::vector<Complex>& trace() const { return trace_; }

 private:
  std::vector<Complex> trace_;
};

/// The boundary of a winding rectangle passes too close to a zero, or the
/// accumulated phase is not close to a multiple of 2 pi.
class InconclusiveError : public NumericalFailure {
 public:
  using NumericalFailure::NumericalFailure;
};

struct Rectangle {
  double sigma_min = 0.0;
  double sigma_max = 0.0;
  double tau_min = 0.0;
  double tau_max = 0.0;
  bool contains(Complex w) const {
    return w.real() >= sigma_min && w.real() <= sigma_max && w.imag() >= tau_min && w.imag() <= tau_max;
  }
};

struct ZeroRecord {
  Complex location;
  double residual = 0.0;
  int newton_iters = 0;
  /// Winding number on a square around the zero; nullopt if inconclusive.
  std::optional<int> winding;
  Rectangle winding_box;
  /// mu(1 - conj(location)); nullopt when the reflection leaves the half-plane.
  std::optional<Complex> partner_value;
  /// True unless the reflected point is a distinct zero of mu.
  bool partner_nonzero = true;
  bool certified() const { return winding == 1; }
};

struct NewtonOptions {
  double zero_tol = kDefaultZeroTolerance;
  int max_iter = 50;
  /// Evaluate the partner and winding certificate after convergence.
  bool certify = true;
};

ZeroRecord find_zero_newton(const EtaFunction& eta, Complex seed, const NewtonOptions& options = {});

/// Argument-principle count of zeros inside `rect` (which must lie in Re > 0).
int winding_number(const EtaFunction& eta, const Rectangle& rect, double tol = 1e-10);

struct LineHypothesis {
  double min_abs = 0.0;
  double argmin_beta = 0.0;
  std::size_t samples = 0;
};

/// Minimum of |mu(1 + i beta)| over beta = beta_min + k step (beta = 0 skipped).
LineHypothesis check_line_hypothesis(const EtaFunction& eta, double beta_min, double beta_max, double step,
                                     double tol = 1e-10);

struct ScanRegion {
  double sigma_min = 0.05;
  double sigma_max = 0.95;
  double sigma_step = 0.05;
  double tau_min = -1.0;
  double tau_max = 1.0;
  double tau_step = 0.05;
};

struct GridSample {
  double sigma;
  double tau;
  double abs_mu;
};

struct ScanReport {
  ScanRegion region;
  /// True when sigma_min was raised to the 0.02 margin.
  bool sigma_clamped = false;
  std::vector<ZeroRecord> zeros;
  /// Grid minima whose Newton refinement failed or left the region unconverged.
  std::vector<Complex> candidates;
  LineHypothesis line;
  double line_hypothesis_min = 0.0;
  std::vector<GridSample> grid;
};

/// Grid points a:b:step (inclusive of b up to rounding).
std::vector<double> step_grid(double a, double b, double step);

ScanReport scan_strip(const EtaFunction& eta, const ScanRegion& region, double zero_tol = kDefaultZeroTolerance,
                      double tol = 1e-10);

enum class PairStatus { both_zero, s_only, partner_only, neither };
const char* to_string(PairStatus status);

PairStatus check_pair(const EtaFunction& eta, const StripPoint& s, double zero_tol = kDefaultZeroTolerance,
                      double tol = 1e-11);

}  // namespace rigidity

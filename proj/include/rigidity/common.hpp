#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace rigidity {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Smallest tolerance accepted by the public API. Below this the double
/// precision roundoff of the quadrature rules dominates.
inline constexpr double kMinTolerance = 1e-12;

/// Argument outside the mathematical domain of an operation (t < 1, Re(w) <= 0,
/// sigma = 1/2, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A numerical routine could not reach its tolerance. Carries the best
/// estimate available at the point of failure.
class NumericalFailure : public std::runtime_error {
 public:
  NumericalFailure(const std::string& what, Complex best_estimate = {}, double error_estimate = 0.0)
      : std::runtime_error(what), best_estimate_(best_estimate), error_estimate_(error_estimate) {}

  Complex best_estimate() const { return best_estimate_; }
  double error_estimate() const { return error_estimate_; }

 private:
  Complex best_estimate_;
  double error_estimate_;
};

/// A caller-checked numerical precondition failed, e.g. mu(w) is not zero
/// where the bounded representation of psi requires it.
class PreconditionError : public std::runtime_error {
 public:
  PreconditionError(const std::string& what, double measured)
      : std::runtime_error(what), measured_(measured) {}
  double measured() const { return measured_; }

 private:
  double measured_;
};

/// Operation not available for this kind of input (tail integrals of sampled eta).
class UnsupportedError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// The rotation number hypothesis needs rho != 0.
class RotationHypothesisError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Principal power t^z for real t > 0.
inline Complex real_pow(double t, Complex z) { return std::exp(z * std::log(t)); }

inline void check_tolerance(double tol, const char* what) {
  if (!(tol >= kMinTolerance)) {
    throw DomainError(std::string(what) + ": tolerance below 1e-12 is not achievable in double precision");
  }
}

}  // namespace rigidity

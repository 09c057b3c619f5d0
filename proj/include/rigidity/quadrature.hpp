#pragma once

#include <functional>
#include <span>
#include <vector>

#include "rigidity/common.hpp"
#include "rigidity/eta.hpp"

namespace rigidity {

using Integrand = std::function<Complex(double)>;

struct QuadratureResult {
  Complex value;
  double error_estimate = 0.0;
  int panels = 0;
};

struct QuadratureOptions {
  double abs_tol = 1e-10;
  double rel_tol = 0.0;
  /// Hard cap on the number of panels (initial partition plus bisections).
  std::size_t max_panels = 4'000'000;
};

/// Globally adaptive Gauss-Kronrod (10/21) quadrature of a complex integrand
/// over the partition `nodes` (sorted, at least two entries). The error
/// target is max(abs_tol, rel_tol*|I|); panels whose error is pure roundoff
/// are not refined further, so error_estimate can exceed the target when the
/// target is below the roundoff floor of the rule.
QuadratureResult integrate_partitioned(const Integrand& f, std::span<const double> nodes,
                                       const QuadratureOptions& options);

/// int_a^b f(u) du for 1 <= a <= b within tol. Extra `breakpoints` inside
/// (a, b) start the partition (integers for integrands built on frac).
/// Throws NumericalFailure when the panel cap is hit or tol is not reached.
QuadratureResult integrate_finite(const Integrand& f, double a, double b, double tol,
                                  std::span<const double> breakpoints = {});

/// Partition of [a, b] (1 <= a <= b) for integrands kernel(u) * eta(u) where
/// the kernel oscillates like u^{-i log_frequency}: eta's breakpoints plus a
/// uniform grid in log u of width at most min(1, 2 pi / |log_frequency|).
std::vector<double> log_panel_nodes(const EtaFunction& eta, double log_frequency, double a, double b);

/// int kernel(u) eta(u) du over the partition `nodes`, integrating in
/// x = log u. `abs_tol` is not validated (internal budgets may be tiny).
QuadratureResult integrate_against_eta(const EtaFunction& eta, const Integrand& kernel, std::span<const double> nodes,
                                       double abs_tol);

/// int_a^b u^{-1-w} (log u)^log_power eta(u) du, 0 <= log_power <= 1.
QuadratureResult mellin_integral(const EtaFunction& eta, Complex w, double a, double b, double abs_tol,
                                 int log_power = 0);

/// Cumulative v -> int_1^v u^{-exponent} eta(u) du on [1, t_max]. The panel
/// prefix sums are computed once; each query integrates only the partial
/// panel containing v.
class MellinPrefix {
 public:
  MellinPrefix(const EtaFunction& eta, Complex exponent, double t_max, double abs_tol);

  Complex operator()(double v) const;
  double t_max() const { return nodes_.back(); }
  double error_estimate() const { return error_; }

 private:
  EtaFunction eta_;
  Complex exponent_;
  std::vector<double> nodes_;
  std::vector<Complex> prefix_;
  double panel_tol_density_ = 0.0;
  double error_ = 0.0;
};

enum class TailMethod { crude, rotation_accelerated };
enum class TailMethodChoice { automatic, crude, rotation_accelerated };

const char* to_string(TailMethod method);

/// Crude truncation is abandoned in favour of the accelerated method beyond this point.
inline constexpr double kCrudeTruncationCap = 1e6;

struct TailCertificate {
  /// Truncation point T' actually used; the finite part covers [T, T'].
  double truncation_point = 1.0;
  /// Rigorous bound on the discarded part beyond T'.
  double bound = 0.0;
  TailMethod method = TailMethod::crude;
  /// Number of integration-by-parts levels (0 for crude).
  int expansion_order = 0;
};

struct TailResult {
  Complex value;
  TailCertificate certificate;
  double quadrature_error = 0.0;
  double total_error() const { return certificate.bound + quadrature_error; }
};

/// int_T^inf u^{-1-w} (log u)^log_power eta(u) du within `budget` (split
/// evenly between the remainder bound and the quadrature of [T, T']).
///
/// crude: remainder bounded by c / (Re(w) T'^Re(w)) (log_power = 0).
/// rotation_accelerated: integrate by parts K times along eta's tower,
///   int_T'^inf u^{-1-w} eta = rho T'^{-w}/w - sum_{k=1..K} a_k(w) T'^{-w-k} P_k(T') + R_K,
///   a_k(w) = prod_{j=1}^{k-1} (w + j),
///   |R_K| <= |a_{K+1}(w)| sup|P_K| / ((Re(w)+K) T'^{Re(w)+K}),
/// with K and T' chosen to minimise T'.
/// automatic picks crude unless its T' exceeds kCrudeTruncationCap.
TailResult tail_integral(const EtaFunction& eta, Complex w, double T, double budget,
                         TailMethodChoice choice = TailMethodChoice::automatic, int log_power = 0);

}  // namespace rigidity

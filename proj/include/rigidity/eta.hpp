#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "rigidity/common.hpp"

namespace rigidity {

/// eta(t) = value.
struct ConstantEta {
  Complex value;
};

/// eta(t) = rho + amplitude * exp(i omega t), omega != 0.
struct OscillatingEta {
  Complex rho;
  Complex amplitude;
  double omega;
};

/// eta(t) = t - floor(t).
struct FractionalPartEta {};

/// Piecewise-linear interpolation of samples on [1, T_max].
struct SampledEta {
  std::vector<double> t;
  std::vector<Complex> values;
  std::vector<Complex> cumulative;  // exact trapezoid integral from 1 to t[i]
  Complex rho;
  double sup_bound = 0.0;
  double deviation_bound = 0.0;
  bool real_valued = true;
};

/// A bounded, locally integrable non-homogeneous term together with its
/// rotation number rho and the constants c = sup|eta| and
/// c~ = sup_t |int_1^t (eta - rho)|.
///
/// Built-in kinds are periodic around rho, so eta - rho admits a tower of
/// bounded periodic antiderivatives P_1, P_2, ... (each the mean-zero
/// antiderivative of the previous one, P_0 = eta - rho). The tail integrals
/// integrate by parts along this tower.
///
/// Values are immutable and cheap to copy.
class EtaFunction {
 public:
  using Kind = std::variant<ConstantEta, OscillatingEta, FractionalPartEta, SampledEta>;

  static EtaFunction constant(Complex value);
  static EtaFunction oscillating(Complex rho, Complex amplitude, double omega);
  static EtaFunction fractional_part();
  /// Samples must start at t = 1, be strictly increasing and contain at least two points.
  static EtaFunction sampled(std::vector<double> t, std::vector<Complex> values, std::string id);

  const std::string& id() const { return id_; }
  /// Same function under a different identifier (keeps the user's spelling).
  EtaFunction with_id(std::string id) const {
    EtaFunction copy = *this;
    copy.id_ = std::move(id);
    return copy;
  }
  const Kind& kind() const { return *kind_; }

  /// eta(t); throws DomainError for t < 1 or t beyond the horizon.
  Complex operator()(double t) const;
  /// eta(t) without the domain check; callers guarantee 1 <= t <= horizon.
  Complex eval_unchecked(double t) const;

  Complex rho() const;
  double sup_bound() const;
  double deviation_bound() const;
  /// F(t) = int_1^t (eta(u) - rho) du when a closed form is known.
  std::optional<Complex> deviation_antiderivative(double t) const;

  double horizon() const;
  bool infinite_horizon() const;
  bool real_valued() const;

  bool satisfies_rotation_hypothesis() const { return rho() != Complex{0.0, 0.0}; }
  /// Throws RotationHypothesisError naming `operation` when rho = 0.
  void require_rotation_hypothesis(std::string_view operation) const;

  /// Points in (a, b) where eta is not smooth (integers for frac, samples for
  /// sampled eta) or, for oscillating eta, completes a period. Sorted.
  std::vector<double> breakpoints(double a, double b) const;

  /// Number of tower levels available for the accelerated tail (0 = none).
  int tower_depth() const;
  /// P_k(t) for 1 <= k <= tower_depth().
  Complex tower(int k, double t) const;
  /// Upper bound of sup_t |P_k(t)|, 0 <= k <= tower_depth().
  double tower_sup(int k) const;

 private:
  EtaFunction(std::string id, Kind kind);

  std::string id_;
  std::shared_ptr<const Kind> kind_;
};

inline Complex eta_eval(const EtaFunction& eta, double t) { return eta(t); }

/// Parses `<re>[+|-]<im>i`, a plain real, or a plain imaginary (`2i`, `-i`).
Complex parse_complex(std::string_view text);

/// Parses `const:<c>`, `osc:<rho>,<A>,<omega>`, `frac`, or `file:<path>`.
EtaFunction parse_eta(std::string_view spec);

/// Reads a CSV with header `t,re,im`; first t is 1.0, strictly increasing.
EtaFunction load_sampled_eta(const std::filesystem::path& path);

struct RotationEstimate {
  Complex rho;
  double error_bound;
};

/// Average (1/(T-1)) int_1^T eta, with error bound c~/(T-1).
RotationEstimate rotation_estimate(const EtaFunction& eta, double T, double tol = 1e-10);

/// sup over the grid (refined by the midpoints of consecutive grid points) of
/// |int_1^t (eta - rho_candidate) du|.
double hypothesis_check(const EtaFunction& eta, Complex rho_candidate, std::span<const double> grid,
                        double tol = 1e-10);

struct HypothesisTrend {
  double sup = 0.0;
  double first_half_sup = 0.0;
  double second_half_sup = 0.0;
  /// second_half_sup / first_half_sup; about 1 for a bounded partial integral.
  double trend = 0.0;
};

HypothesisTrend hypothesis_trend(const EtaFunction& eta, Complex rho_candidate, std::span<const double> grid,
                                 double tol = 1e-10);

}  // namespace rigidity

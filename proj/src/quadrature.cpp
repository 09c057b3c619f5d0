#include "rigidity/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>

namespace rigidity {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kUnderflow = std::numeric_limits<double>::min();

// Gauss-Kronrod 21-point abscissae and weights; odd entries are the 10-point Gauss nodes.
constexpr std::array<double, 11> kXgk = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452, 0.930157491355708226001207180059508,
    0.865063366688984510732096688423493, 0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784, 0.294392862701460198131126603103866,
    0.148874338981631210884826001129720, 0.000000000000000000000000000000000};
constexpr std::array<double, 11> kWgk = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390, 0.054755896574351996031381300244580,
    0.075039674810919952767043140916190, 0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077600197045743, 0.134709217311473325928054001771707, 0.142775938577060080797094273138717,
    0.147739104901338491374841515972068, 0.149445554002916905664936468389821};
constexpr std::array<double, 5> kWg = {0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
                                       0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
                                       0.295524224714752870173892994651338};

struct Panel {
  double a;
  double b;
  Complex value;
  double error;
  double roundoff;
};

struct ByError {
  bool operator()(const Panel& l, const Panel& r) const { return l.error < r.error; }
};

Panel gauss_kronrod21(const Integrand& f, double a, double b) {
  const double centre = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double abs_half = std::abs(half);

  std::array<Complex, 10> f1{};
  std::array<Complex, 10> f2{};
  const Complex fc = f(centre);
  Complex resg{};
  Complex resk = kWgk[10] * fc;
  double resabs = kWgk[10] * std::abs(fc);
  for (int j = 0; j < 5; ++j) {
    const int jtw = 2 * j + 1;
    const double dx = half * kXgk[jtw];
    f1[jtw] = f(centre - dx);
    f2[jtw] = f(centre + dx);
    resg += kWg[j] * (f1[jtw] + f2[jtw]);
    resk += kWgk[jtw] * (f1[jtw] + f2[jtw]);
    resabs += kWgk[jtw] * (std::abs(f1[jtw]) + std::abs(f2[jtw]));
  }
  for (int j = 0; j < 5; ++j) {
    const int jtwm1 = 2 * j;
    const double dx = half * kXgk[jtwm1];
    f1[jtwm1] = f(centre - dx);
    f2[jtwm1] = f(centre + dx);
    resk += kWgk[jtwm1] * (f1[jtwm1] + f2[jtwm1]);
    resabs += kWgk[jtwm1] * (std::abs(f1[jtwm1]) + std::abs(f2[jtwm1]));
  }
  const Complex reskh = 0.5 * resk;
  double resasc = kWgk[10] * std::abs(fc - reskh);
  for (int j = 0; j < 10; ++j) resasc += kWgk[j] * (std::abs(f1[j] - reskh) + std::abs(f2[j] - reskh));

  Panel p{a, b, resk * half, std::abs((resk - resg) * half), 0.0};
  resabs *= abs_half;
  resasc *= abs_half;
  if (resasc != 0.0 && p.error != 0.0) p.error = resasc * std::min(1.0, std::pow(200.0 * p.error / resasc, 1.5));
  if (resabs > kUnderflow / (50.0 * kEps)) {
    p.roundoff = 50.0 * kEps * resabs;
    p.error = std::max(p.roundoff, p.error);
  }
  if (!std::isfinite(std::abs(p.value))) {
    throw NumericalFailure("quadrature: integrand not finite on [" + std::to_string(a) + ", " + std::to_string(b) + "]");
  }
  return p;
}

// Neumaier-compensated complex sum.
class CompensatedSum {
 public:
  void add(Complex x) {
    add_part(sum_re_, comp_re_, x.real());
    add_part(sum_im_, comp_im_, x.imag());
  }
  Complex value() const { return {sum_re_ + comp_re_, sum_im_ + comp_im_}; }

 private:
  static void add_part(double& sum, double& comp, double x) {
    const double t = sum + x;
    comp += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
    sum = t;
  }
  double sum_re_ = 0.0, comp_re_ = 0.0, sum_im_ = 0.0, comp_im_ = 0.0;
};

std::vector<double> merge_nodes(std::vector<double> nodes) {
  std::sort(nodes.begin(), nodes.end());
  std::vector<double> out;
  out.reserve(nodes.size());
  for (double x : nodes) {
    if (out.empty() || x - out.back() > 4.0 * kEps * std::max(1.0, std::abs(x))) out.push_back(x);
  }
  return out;
}

// Number of breakpoints eta contributes to [a, b]; used to refuse hopeless partitions up front.
double breakpoint_count(const EtaFunction& eta, double a, double b) {
  if (const auto* o = std::get_if<OscillatingEta>(&eta.kind())) return (b - a) * std::abs(o->omega) / kTwoPi;
  if (std::holds_alternative<FractionalPartEta>(eta.kind())) return b - a;
  if (const auto* s = std::get_if<SampledEta>(&eta.kind())) return static_cast<double>(s->t.size());
  return 0.0;
}

QuadratureResult integrate_log_space(const Integrand& f_of_x, std::span<const double> nodes_u, double abs_tol) {
  if (nodes_u.size() < 2) return {};
  std::vector<double> xs;
  xs.reserve(nodes_u.size());
  for (double u : nodes_u) xs.push_back(std::log(u));
  QuadratureOptions opts;
  opts.abs_tol = abs_tol;
  return integrate_partitioned(f_of_x, xs, opts);
}

// Smallest y >= y_lo with log_bound(y) <= log_target, log_bound non-increasing in y.
template <class LogBound>
double solve_truncation(LogBound&& log_bound, double log_target, double y_lo) {
  if (log_bound(y_lo) <= log_target) return y_lo;
  double lo = y_lo;
  double hi = std::max(1.0, 2.0 * y_lo);
  while (log_bound(hi) > log_target) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e6) return std::numeric_limits<double>::infinity();
  }
  for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (log_bound(mid) > log_target ? lo : hi) = mid;
  }
  return hi;
}

}  // namespace

const char* to_string(TailMethod method) {
  return method == TailMethod::crude ? "crude" : "rotation_accelerated";
}

QuadratureResult integrate_partitioned(const Integrand& f, std::span<const double> nodes,
                                       const QuadratureOptions& options) {
  if (nodes.size() < 2) return {};
  if (nodes.size() - 1 > options.max_panels) {
    throw NumericalFailure("quadrature: initial partition exceeds the panel cap");
  }
  std::priority_queue<Panel, std::vector<Panel>, ByError> heap;
  std::vector<Panel> settled;
  CompensatedSum value;
  double error = 0.0;
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    if (nodes[i + 1] == nodes[i]) continue;
    Panel p = gauss_kronrod21(f, nodes[i], nodes[i + 1]);
    value.add(p.value);
    error += p.error;
    heap.push(p);
  }
  std::size_t panel_count = heap.size();
  auto target = [&] { return std::max(options.abs_tol, options.rel_tol * std::abs(value.value())); };

  std::size_t iterations = 0;
  while (error > target() && !heap.empty()) {
    if (panel_count >= options.max_panels) {
      throw NumericalFailure("quadrature: maximum number of subdivisions exceeded", value.value(), error);
    }
    Panel p = heap.top();
    heap.pop();
    const double width = p.b - p.a;
    if (p.error <= p.roundoff * (1.0 + 1e-9) || std::abs(width) <= 64.0 * kEps * std::max(1.0, std::abs(p.a))) {
      settled.push_back(p);
      continue;
    }
    const double mid = 0.5 * (p.a + p.b);
    const Panel left = gauss_kronrod21(f, p.a, mid);
    const Panel right = gauss_kronrod21(f, mid, p.b);
    value.add(left.value);
    value.add(right.value);
    value.add(-p.value);
    error += left.error + right.error - p.error;
    heap.push(left);
    heap.push(right);
    ++panel_count;
    if (++iterations % 1024 == 0) {
      error = 0.0;
      for (const auto& s : settled) error += s.error;
      auto copy = heap;
      while (!copy.empty()) {
        error += copy.top().error;
        copy.pop();
      }
    }
  }

  // Final totals from the panels themselves.
  CompensatedSum final_value;
  double final_error = 0.0;
  for (const auto& s : settled) {
    final_value.add(s.value);
    final_error += s.error;
  }
  while (!heap.empty()) {
    final_value.add(heap.top().value);
    final_error += heap.top().error;
    heap.pop();
  }
  return {final_value.value(), final_error, static_cast<int>(panel_count)};
}

QuadratureResult integrate_finite(const Integrand& f, double a, double b, double tol,
                                  std::span<const double> breakpoints) {
  check_tolerance(tol, "integrate_finite");
  if (!(a >= 1.0) || !(b >= a) || !std::isfinite(b)) {
    throw DomainError("integrate_finite requires 1 <= a <= b < inf");
  }
  if (a == b) return {};
  std::vector<double> nodes{a, b};
  for (double p : breakpoints) {
    if (p > a && p < b) nodes.push_back(p);
  }
  nodes = merge_nodes(std::move(nodes));
  QuadratureOptions opts;
  opts.abs_tol = tol;
  auto r = integrate_partitioned(f, nodes, opts);
  if (r.error_estimate > tol) {
    throw NumericalFailure("integrate_finite: tolerance unmet", r.value, r.error_estimate);
  }
  return r;
}

std::vector<double> log_panel_nodes(const EtaFunction& eta, double log_frequency, double a, double b) {
  if (!(a >= 1.0) || !(b >= a)) throw DomainError("log_panel_nodes requires 1 <= a <= b");
  if (b > eta.horizon()) throw DomainError("integration range beyond the horizon of " + eta.id());
  if (a == b) return {a};
  const double width = log_frequency == 0.0 ? 1.0 : std::min(1.0, kTwoPi / std::abs(log_frequency));
  const double xa = std::log(a);
  const double xb = std::log(b);
  const auto n = static_cast<std::size_t>(std::ceil((xb - xa) / width));
  std::vector<double> nodes;
  nodes.reserve(n + 2);
  nodes.push_back(a);
  for (std::size_t i = 1; i < n; ++i) nodes.push_back(std::exp(xa + (xb - xa) * static_cast<double>(i) / n));
  nodes.push_back(b);
  const auto extra = eta.breakpoints(a, b);
  nodes.insert(nodes.end(), extra.begin(), extra.end());
  nodes = merge_nodes(std::move(nodes));
  nodes.front() = a;
  nodes.back() = b;
  return nodes;
}

QuadratureResult integrate_against_eta(const EtaFunction& eta, const Integrand& kernel, std::span<const double> nodes,
                                       double abs_tol) {
  return integrate_log_space(
      [&](double x) {
        const double u = std::exp(x);
        return kernel(u) * eta.eval_unchecked(u) * u;
      },
      nodes, abs_tol);
}

QuadratureResult mellin_integral(const EtaFunction& eta, Complex w, double a, double b, double abs_tol,
                                 int log_power) {
  const auto nodes = log_panel_nodes(eta, w.imag(), a, b);
  return integrate_log_space(
      [&](double x) {
        const Complex v = std::exp(-w * x) * eta.eval_unchecked(std::exp(x));
        return log_power == 0 ? v : v * x;
      },
      nodes, abs_tol);
}

MellinPrefix::MellinPrefix(const EtaFunction& eta, Complex exponent, double t_max, double abs_tol)
    : eta_(eta), exponent_(exponent) {
  nodes_ = log_panel_nodes(eta, exponent.imag(), 1.0, t_max);
  prefix_.assign(nodes_.size(), Complex{});
  const double total_log = std::log(nodes_.back());
  panel_tol_density_ = total_log > 0.0 ? abs_tol / total_log : abs_tol;
  CompensatedSum running;
  for (std::size_t k = 0; k + 1 < nodes_.size(); ++k) {
    const std::array<double, 2> panel{nodes_[k], nodes_[k + 1]};
    const double tol = panel_tol_density_ * (std::log(panel[1]) - std::log(panel[0]));
    const auto r = integrate_log_space(
        [this](double x) { return std::exp((1.0 - exponent_) * x) * eta_.eval_unchecked(std::exp(x)); }, panel, tol);
    running.add(r.value);
    error_ += r.error_estimate;
    prefix_[k + 1] = running.value();
  }
}

Complex MellinPrefix::operator()(double v) const {
  if (!(v >= 1.0) || v > nodes_.back() * (1.0 + 4.0 * kEps)) {
    throw DomainError("MellinPrefix: evaluation point outside [1, t_max]");
  }
  v = std::min(v, nodes_.back());
  auto it = std::upper_bound(nodes_.begin(), nodes_.end(), v);
  const auto k = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, (it - nodes_.begin()) - 1));
  if (nodes_[k] == v) return prefix_[k];
  const std::array<double, 2> panel{nodes_[k], v};
  const double tol = panel_tol_density_ * (std::log(v) - std::log(nodes_[k]));
  const auto r = integrate_log_space(
      [this](double x) { return std::exp((1.0 - exponent_) * x) * eta_.eval_unchecked(std::exp(x)); }, panel, tol);
  return prefix_[k] + r.value;
}

TailResult tail_integral(const EtaFunction& eta, Complex w, double T, double budget, TailMethodChoice choice,
                         int log_power) {
  const double sigma = w.real();
  if (!(sigma > 0.0)) throw DomainError("tail_integral requires Re(w) > 0");
  if (!(T >= 1.0) || !std::isfinite(T)) throw DomainError("tail_integral requires finite T >= 1");
  if (!(budget > 0.0)) throw DomainError("tail_integral requires a positive budget");
  if (log_power < 0 || log_power > 1) throw DomainError("tail_integral supports log_power 0 or 1");
  if (!eta.infinite_horizon()) {
    throw UnsupportedError("tail_integral: " + eta.id() + " has a finite horizon; tails need an analytic eta");
  }

  const double half = 0.5 * budget;
  const double log_target = std::log(half);
  const double y_lo = std::log(T);
  const double c = eta.sup_bound();

  // Crude truncation point.
  double crude_y = y_lo;
  if (c > 0.0) {
    crude_y = solve_truncation(
        [&](double y) {
          if (log_power == 0) return std::log(c) - std::log(sigma) - sigma * y;
          return std::log(c) - sigma * y + std::log(sigma * y + 1.0) - 2.0 * std::log(sigma);
        },
        log_target, y_lo);
  }
  const double crude_T = std::exp(crude_y);

  TailMethod method = TailMethod::crude;
  if (choice == TailMethodChoice::rotation_accelerated ||
      (choice == TailMethodChoice::automatic && crude_T > kCrudeTruncationCap && eta.tower_depth() > 0)) {
    method = TailMethod::rotation_accelerated;
  }

  auto finite_part = [&](double T_trunc) -> QuadratureResult {
    const double panels = std::log(T_trunc / T) * (1.0 + std::abs(w.imag())) + breakpoint_count(eta, T, T_trunc);
    if (!(panels < 4e6)) {
      throw NumericalFailure("tail_integral: budget unreachable under the panel cap (truncation at " +
                             std::to_string(T_trunc) + ")");
    }
    if (T_trunc <= T) return {};
    return mellin_integral(eta, w, T, T_trunc, half, log_power);
  };

  TailResult out;
  if (method == TailMethod::crude) {
    if (!std::isfinite(crude_T)) throw NumericalFailure("tail_integral: crude truncation point overflows");
    const auto q = finite_part(crude_T);
    out.value = q.value;
    out.quadrature_error = q.error_estimate;
    out.certificate.truncation_point = crude_T;
    out.certificate.method = TailMethod::crude;
    out.certificate.expansion_order = 0;
    const double y = crude_y;
    out.certificate.bound = c == 0.0 ? 0.0
                            : log_power == 0
                                ? c / (sigma * std::exp(sigma * y))
                                : c * std::exp(-sigma * y) * (sigma * y + 1.0) / (sigma * sigma);
    return out;
  }

  const int depth = eta.tower_depth();
  if (depth == 0) throw UnsupportedError("tail_integral: " + eta.id() + " has no antiderivative tower");

  // Choose the expansion order K minimising the truncation point.
  int best_k = 1;
  double best_y = std::numeric_limits<double>::infinity();
  double log_abs_a = 0.0;     // log |a_{K+1}(w)| = sum_{j=1}^{K} log|w+j|
  Complex harmonic{};         // sum_{j=1}^{K} 1/(w+j), so a'_{K+1} = a_{K+1} * harmonic
  for (int k = 1; k <= depth; ++k) {
    log_abs_a += std::log(std::abs(w + static_cast<double>(k)));
    harmonic += 1.0 / (w + static_cast<double>(k));
    const double sup = eta.tower_sup(k);
    if (sup == 0.0) {
      best_k = k;
      best_y = y_lo;
      break;
    }
    const double order = sigma + k;
    const double log_harm = std::log(std::abs(harmonic));
    const double y = solve_truncation(
        [&](double yy) {
          if (log_power == 0) return log_abs_a + std::log(sup) - std::log(order) - order * yy;
          const double a = std::exp(log_harm) / order + (order * yy + 1.0) / (order * order);
          return log_abs_a + std::log(sup) - order * yy + std::log(a);
        },
        log_target, y_lo);
    if (y < best_y * (1.0 - 1e-12)) {
      best_y = y;
      best_k = k;
    }
  }
  if (!std::isfinite(best_y)) throw NumericalFailure("tail_integral: accelerated budget unreachable");

  const double T_trunc = std::max(T, std::exp(best_y));
  const auto q = finite_part(T_trunc);
  const double log_T = std::log(T_trunc);
  const Complex rho = eta.rho();
  const Complex power = std::exp(-w * log_T);  // T'^{-w}

  Complex expansion = log_power == 0 ? rho * power / w : rho * power * (log_T / w + 1.0 / (w * w));
  Complex a_k{1.0, 0.0};
  Complex harm_k{};
  for (int k = 1; k <= best_k; ++k) {
    if (k > 1) {
      a_k *= (w + static_cast<double>(k - 1));
      harm_k += 1.0 / (w + static_cast<double>(k - 1));
    }
    const Complex p_k = eta.tower(k, T_trunc);
    if (p_k == Complex{}) continue;
    const Complex scaled = a_k * std::exp(-(w + static_cast<double>(k)) * log_T) * p_k;
    expansion += log_power == 0 ? -scaled : scaled * (harm_k - log_T);
  }

  double bound = 0.0;
  const double sup = eta.tower_sup(best_k);
  if (sup > 0.0) {
    double abs_a = 1.0;
    Complex harm{};
    for (int j = 1; j <= best_k; ++j) {
      abs_a *= std::abs(w + static_cast<double>(j));
      harm += 1.0 / (w + static_cast<double>(j));
    }
    const double order = sigma + best_k;
    const double decay = std::exp(-order * log_T);
    bound = log_power == 0 ? abs_a * sup * decay / order
                           : abs_a * std::abs(harm) * sup * decay / order +
                                 abs_a * sup * decay * (order * log_T + 1.0) / (order * order);
  }

  out.value = q.value + expansion;
  out.quadrature_error = q.error_estimate;
  out.certificate.truncation_point = T_trunc;
  out.certificate.bound = bound;
  out.certificate.method = TailMethod::rotation_accelerated;
  out.certificate.expansion_order = best_k;
  return out;
}

}  // namespace rigidity

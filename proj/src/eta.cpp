#include "rigidity/eta.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "rigidity/quadrature.hpp"

namespace rigidity {

namespace {

constexpr int kFracTowerDepth = 14;
constexpr int kSmoothTowerDepth = 40;

// B_0 .. B_15
constexpr std::array<double, 16> kBernoulli = {
    1.0,         -0.5,  1.0 / 6.0, 0.0, -1.0 / 30.0,       0.0, 1.0 / 42.0, 0.0,
    -1.0 / 30.0, 0.0,   5.0 / 66.0, 0.0, -691.0 / 2730.0, 0.0, 7.0 / 6.0,  0.0};

double binomial(int n, int k) {
  double r = 1.0;
  for (int j = 1; j <= k; ++j) r = r * (n - k + j) / j;
  return r;
}

double factorial(int n) {
  double r = 1.0;
  for (int j = 2; j <= n; ++j) r *= j;
  return r;
}

// Bernoulli polynomial B_n(x) by Horner over its binomial expansion.
double bernoulli_poly(int n, double x) {
  double r = 0.0;
  for (int j = 0; j <= n; ++j) r = r * x + binomial(n, j) * kBernoulli[j];
  return r;
}

double frac(double t) { return t - std::floor(t); }

// Upper bound of zeta(n) for integer n >= 2.
double zeta_upper(int n) { return 1.0 + std::pow(2.0, -n) + std::pow(2.0, 1 - n) / (n - 1); }

Complex sampled_eval(const SampledEta& s, double t) {
  auto it = std::upper_bound(s.t.begin(), s.t.end(), t);
  if (it == s.t.begin()) return s.values.front();
  if (it == s.t.end()) return s.values.back();
  const auto i = static_cast<std::size_t>(it - s.t.begin()) - 1;
  const double lambda = (t - s.t[i]) / (s.t[i + 1] - s.t[i]);
  return s.values[i] + lambda * (s.values[i + 1] - s.values[i]);
}

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double parse_real(std::string_view text, std::string_view context) {
  double value = 0.0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || text.empty()) {
    throw std::invalid_argument("cannot parse real '" + std::string(text) + "' in " + std::string(context));
  }
  return value;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (;;) {
    const auto pos = text.find(sep, start);
    parts.push_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

}  // namespace

EtaFunction::EtaFunction(std::string id, Kind kind)
    : id_(std::move(id)), kind_(std::make_shared<const Kind>(std::move(kind))) {}

EtaFunction EtaFunction::constant(Complex value) {
  std::ostringstream id;
  id.precision(17);
  id << "const:" << value.real() << (value.imag() < 0 ? "-" : "+") << std::abs(value.imag()) << "i";
  return EtaFunction(id.str(), ConstantEta{value});
}

EtaFunction EtaFunction::oscillating(Complex rho, Complex amplitude, double omega) {
  if (omega == 0.0 || !std::isfinite(omega)) throw DomainError("osc: omega must be a finite nonzero real");
  std::ostringstream id;
  id.precision(17);
  id << "osc:" << rho.real() << (rho.imag() < 0 ? "-" : "+") << std::abs(rho.imag()) << "i," << amplitude.real()
     << (amplitude.imag() < 0 ? "-" : "+") << std::abs(amplitude.imag()) << "i," << omega;
  return EtaFunction(id.str(), OscillatingEta{rho, amplitude, omega});
}

EtaFunction EtaFunction::fractional_part() { return EtaFunction("frac", FractionalPartEta{}); }

EtaFunction EtaFunction::sampled(std::vector<double> t, std::vector<Complex> values, std::string id) {
  if (t.size() < 2 || t.size() != values.size()) {
    throw std::invalid_argument("sampled eta needs at least two (t, value) pairs");
  }
  if (t.front() != 1.0) throw std::invalid_argument("sampled eta must start at t = 1.0");
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (!(t[i] > t[i - 1])) throw std::invalid_argument("sampled eta: t must be strictly increasing");
  }
  SampledEta s;
  s.cumulative.assign(t.size(), Complex{});
  for (std::size_t i = 1; i < t.size(); ++i) {
    s.cumulative[i] = s.cumulative[i - 1] + 0.5 * (t[i] - t[i - 1]) * (values[i] + values[i - 1]);
  }
  const double span = t.back() - 1.0;
  s.rho = s.cumulative.back() / span;
  for (const auto& v : values) {
    s.sup_bound = std::max(s.sup_bound, std::abs(v));
    if (v.imag() != 0.0) s.real_valued = false;
  }
  // sup |int_1^t (eta - rho)| over nodes and segment midpoints (Simpson is exact for the quadratic).
  for (std::size_t i = 0; i < t.size(); ++i) {
    s.deviation_bound = std::max(s.deviation_bound, std::abs(s.cumulative[i] - s.rho * (t[i] - 1.0)));
    if (i + 1 < t.size()) {
      const double h = 0.5 * (t[i + 1] - t[i]);
      const Complex mid = 0.5 * (values[i] + values[i + 1]);
      const Complex partial = s.cumulative[i] + 0.5 * h * (values[i] + mid);
      s.deviation_bound = std::max(s.deviation_bound, std::abs(partial - s.rho * (t[i] + h - 1.0)));
    }
  }
  s.t = std::move(t);
  s.values = std::move(values);
  return EtaFunction(std::move(id), std::move(s));
}

Complex EtaFunction::operator()(double t) const {
  if (!(t >= 1.0)) throw DomainError("eta(t) requires t >= 1");
  if (t > horizon()) throw DomainError("eta(t): t beyond the sampled horizon of " + id_);
  return eval_unchecked(t);
}

Complex EtaFunction::eval_unchecked(double t) const {
  return std::visit(Overloaded{
                        [](const ConstantEta& c) { return c.value; },
                        [t](const OscillatingEta& o) {
                          return o.rho + o.amplitude * std::exp(Complex{0.0, o.omega * t});
                        },
                        [t](const FractionalPartEta&) { return Complex{frac(t), 0.0}; },
                        [t](const SampledEta& s) { return sampled_eval(s, t); },
                    },
                    *kind_);
}

Complex EtaFunction::rho() const {
  return std::visit(Overloaded{
                        [](const ConstantEta& c) { return c.value; },
                        [](const OscillatingEta& o) { return o.rho; },
                        [](const FractionalPartEta&) { return Complex{0.5, 0.0}; },
                        [](const SampledEta& s) { return s.rho; },
                    },
                    *kind_);
}

double EtaFunction::sup_bound() const {
  return std::visit(Overloaded{
                        [](const ConstantEta& c) { return std::abs(c.value); },
                        [](const OscillatingEta& o) { return std::abs(o.rho) + std::abs(o.amplitude); },
                        [](const FractionalPartEta&) { return 1.0; },
                        [](const SampledEta& s) { return s.sup_bound; },
                    },
                    *kind_);
}

double EtaFunction::deviation_bound() const {
  return std::visit(Overloaded{
                        [](const ConstantEta&) { return 0.0; },
                        [](const OscillatingEta& o) { return 2.0 * std::abs(o.amplitude) / std::abs(o.omega); },
                        [](const FractionalPartEta&) { return 0.125; },
                        [](const SampledEta& s) { return s.deviation_bound; },
                    },
                    *kind_);
}

std::optional<Complex> EtaFunction::deviation_antiderivative(double t) const {
  return std::visit(Overloaded{
                        [](const ConstantEta&) -> std::optional<Complex> { return Complex{}; },
                        [t](const OscillatingEta& o) -> std::optional<Complex> {
                          const Complex i_omega{0.0, o.omega};
                          return o.amplitude *
                                 (std::exp(Complex{0.0, o.omega * t}) - std::exp(Complex{0.0, o.omega})) / i_omega;
                        },
                        [t](const FractionalPartEta&) -> std::optional<Complex> {
                          const double f = frac(t);
                          return Complex{0.5 * (f * f - f), 0.0};
                        },
                        [](const SampledEta&) -> std::optional<Complex> { return std::nullopt; },
                    },
                    *kind_);
}

double EtaFunction::horizon() const {
  if (const auto* s = std::get_if<SampledEta>(kind_.get())) return s->t.back();
  return std::numeric_limits<double>::infinity();
}

bool EtaFunction::infinite_horizon() const { return !std::holds_alternative<SampledEta>(*kind_); }

bool EtaFunction::real_valued() const {
  return std::visit(Overloaded{
                        [](const ConstantEta& c) { return c.value.imag() == 0.0; },
                        [](const OscillatingEta& o) { return o.amplitude == Complex{} && o.rho.imag() == 0.0; },
                        [](const FractionalPartEta&) { return true; },
                        [](const SampledEta& s) { return s.real_valued; },
                    },
                    *kind_);
}

void EtaFunction::require_rotation_hypothesis(std::string_view operation) const {
  if (!satisfies_rotation_hypothesis()) {
    throw RotationHypothesisError(std::string(operation) + ": " + id_ +
                                  " has rotation number 0; the rotation hypothesis needs rho != 0");
  }
}

std::vector<double> EtaFunction::breakpoints(double a, double b) const {
  std::vector<double> points;
  std::visit(Overloaded{
                 [](const ConstantEta&) {},
                 [&](const OscillatingEta& o) {
                   const double period = kTwoPi / std::abs(o.omega);
                   const double k0 = std::floor((a - 1.0) / period) + 1.0;
                   for (double k = k0;; k += 1.0) {
                     const double u = 1.0 + k * period;
                     if (u >= b) break;
                     if (u > a) points.push_back(u);
                   }
                 },
                 [&](const FractionalPartEta&) {
                   for (double n = std::floor(a) + 1.0; n < b; n += 1.0) points.push_back(n);
                 },
                 [&](const SampledEta& s) {
                   for (double u : s.t) {
                     if (u > a && u < b) points.push_back(u);
                   }
                 },
             },
             *kind_);
  return points;
}

int EtaFunction::tower_depth() const {
  return std::visit(Overloaded{
                        [](const ConstantEta&) { return kSmoothTowerDepth; },
                        [](const OscillatingEta&) { return kSmoothTowerDepth; },
                        [](const FractionalPartEta&) { return kFracTowerDepth; },
                        [](const SampledEta&) { return 0; },
                    },
                    *kind_);
}

Complex EtaFunction::tower(int k, double t) const {
  return std::visit(Overloaded{
                        [](const ConstantEta&) { return Complex{}; },
                        [k, t](const OscillatingEta& o) {
                          return o.amplitude * std::exp(Complex{0.0, o.omega * t}) /
                                 std::pow(Complex{0.0, o.omega}, k);
                        },
                        [k, t](const FractionalPartEta&) {
                          // Periodic Bernoulli function B~_{k+1} / (k+1)!
                          return Complex{bernoulli_poly(k + 1, frac(t)) / factorial(k + 1), 0.0};
                        },
                        [](const SampledEta&) -> Complex {
                          throw UnsupportedError("sampled eta has no antiderivative tower");
                        },
                    },
                    *kind_);
}

double EtaFunction::tower_sup(int k) const {
  return std::visit(Overloaded{
                        [](const ConstantEta&) { return 0.0; },
                        [k](const OscillatingEta& o) {
                          return std::abs(o.amplitude) / std::pow(std::abs(o.omega), k);
                        },
                        [k](const FractionalPartEta&) {
                          if (k == 0) return 0.5;
                          const int n = k + 1;
                          return 2.0 * zeta_upper(n) / std::pow(kTwoPi, n);
                        },
                        [k](const SampledEta& s) {
                          return k == 0 ? s.sup_bound + std::abs(s.rho) : s.deviation_bound;
                        },
                    },
                    *kind_);
}

Complex parse_complex(std::string_view text) {
  const std::string context = "complex literal '" + std::string(text) + "'";
  if (text.empty()) throw std::invalid_argument("empty " + context);
  if (text.back() != 'i') return {parse_real(text, context), 0.0};

  const std::string_view body = text.substr(0, text.size() - 1);
  // Split at the last sign that is not a leading sign or part of an exponent.
  std::size_t split_at = std::string_view::npos;
  for (std::size_t k = body.size(); k-- > 1;) {
    if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
      split_at = k;
      break;
    }
  }
  auto imag_part = [&](std::string_view s) {
    if (s.empty() || s == "+") return 1.0;
    if (s == "-") return -1.0;
    return parse_real(s.front() == '+' ? s.substr(1) : s, context);
  };
  if (split_at == std::string_view::npos) return {0.0, imag_part(body)};
  return {parse_real(body.substr(0, split_at), context), imag_part(body.substr(split_at))};
}

EtaFunction parse_eta(std::string_view spec) {
  if (spec == "frac") return EtaFunction::fractional_part();
  const auto colon = spec.find(':');
  if (colon == std::string_view::npos) throw std::invalid_argument("unknown eta spec '" + std::string(spec) + "'");
  const auto head = spec.substr(0, colon);
  const auto body = spec.substr(colon + 1);
  if (head == "const") return EtaFunction::constant(parse_complex(body)).with_id(std::string(spec));
  if (head == "osc") {
    const auto parts = split(body, ',');
    if (parts.size() != 3) throw std::invalid_argument("osc spec needs <rho>,<A>,<omega>");
    const double omega = parse_real(parts[2], "osc omega");
    if (omega == 0.0) throw std::invalid_argument("osc spec: omega must be nonzero");
    return EtaFunction::oscillating(parse_complex(parts[0]), parse_complex(parts[1]), omega).with_id(std::string(spec));
  }
  if (head == "file") return load_sampled_eta(std::filesystem::path(std::string(body)));
  throw std::invalid_argument("unknown eta spec '" + std::string(spec) + "'");
}

EtaFunction load_sampled_eta(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open eta samples '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("empty eta sample file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "t,re,im") throw std::invalid_argument("eta sample file must start with header t,re,im");
  std::vector<double> t;
  std::vector<Complex> values;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split(line, ',');
    if (fields.size() != 3) throw std::invalid_argument("eta sample row needs 3 fields: " + line);
    t.push_back(parse_real(fields[0], "sample t"));
    values.emplace_back(parse_real(fields[1], "sample re"), parse_real(fields[2], "sample im"));
  }
  return EtaFunction::sampled(std::move(t), std::move(values), "file:" + path.string());
}

namespace {

std::vector<double> eta_nodes(const EtaFunction& eta, double a, double b) {
  std::vector<double> nodes{a};
  for (double p : eta.breakpoints(a, b)) nodes.push_back(p);
  nodes.push_back(b);
  return nodes;
}

}  // namespace

RotationEstimate rotation_estimate(const EtaFunction& eta, double T, double tol) {
  check_tolerance(tol, "rotation_estimate");
  if (!(T > 1.0)) throw DomainError("rotation_estimate requires T > 1");
  if (T > eta.horizon()) throw DomainError("rotation_estimate: T beyond the horizon of " + eta.id());
  const double span = T - 1.0;
  const double bound = eta.deviation_bound() / span;
  if (auto f = eta.deviation_antiderivative(T)) return {eta.rho() + *f / span, bound};

  const auto nodes = eta_nodes(eta, 1.0, T);
  QuadratureOptions opts;
  opts.abs_tol = tol * span;
  const auto r = integrate_partitioned([&](double u) { return eta.eval_unchecked(u); }, nodes, opts);
  if (r.error_estimate > opts.abs_tol) {
    throw NumericalFailure("rotation_estimate: quadrature tolerance unmet", r.value / span, r.error_estimate);
  }
  return {r.value / span, bound};
}

namespace {

// |int_1^t (eta - rho)| on the grid refined by midpoints, in grid order.
std::vector<double> partial_deviation(const EtaFunction& eta, Complex rho, std::span<const double> grid, double tol) {
  check_tolerance(tol, "hypothesis_check");
  if (grid.empty()) throw DomainError("hypothesis_check: empty grid");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] < 1.0 || grid[i] > eta.horizon()) throw DomainError("hypothesis_check: grid outside [1, horizon]");
    if (i > 0 && !(grid[i] > grid[i - 1])) throw DomainError("hypothesis_check: grid must be increasing");
  }
  std::vector<double> points;
  points.reserve(2 * grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (i > 0) points.push_back(0.5 * (grid[i - 1] + grid[i]));
    points.push_back(grid[i]);
  }
  const auto integrand = [&](double u) { return eta.eval_unchecked(u) - rho; };
  std::vector<double> out;
  out.reserve(points.size());
  Complex running{};
  double previous = 1.0;
  for (double t : points) {
    if (t > previous) {
      QuadratureOptions opts;
      opts.abs_tol = tol;
      running += integrate_partitioned(integrand, eta_nodes(eta, previous, t), opts).value;
      previous = t;
    }
    out.push_back(std::abs(running));
  }
  return out;
}

}  // namespace

double hypothesis_check(const EtaFunction& eta, Complex rho_candidate, std::span<const double> grid, double tol) {
  const auto values = partial_deviation(eta, rho_candidate, grid, tol);
  return *std::max_element(values.begin(), values.end());
}

HypothesisTrend hypothesis_trend(const EtaFunction& eta, Complex rho_candidate, std::span<const double> grid,
                                 double tol) {
  const auto values = partial_deviation(eta, rho_candidate, grid, tol);
  HypothesisTrend trend;
  const std::size_t half = values.size() / 2;
  for (std::size_t i = 0; i < values.size(); ++i) {
    trend.sup = std::max(trend.sup, values[i]);
    if (i < half) {
      trend.first_half_sup = std::max(trend.first_half_sup, values[i]);
    } else {
      trend.second_half_sup = std::max(trend.second_half_sup, values[i]);
    }
  }
  trend.trend = trend.first_half_sup > 0.0 ? trend.second_half_sup / trend.first_half_sup
                                           : (trend.second_half_sup > 0.0 ? INFINITY : 1.0);
  return trend;
}

}  // namespace rigidity

// Acceptance criteria 1-10: one PASS/FAIL line each; exit status is nonzero if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "oracles/zeta.hpp"
#include "rigidity/delta.hpp"
#include "rigidity/mu.hpp"
#include "rigidity/quadrature.hpp"
#include "rigidity/solver.hpp"

using namespace rigidity;
using C = Complex;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string format(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::vector<double> integer_grid(int lo, int hi) {
  std::vector<double> g;
  for (int i = lo; i <= hi; ++i) g.push_back(i);
  return g;
}

Outcome cross_oracle() {
  std::mt19937 rng(20240601);
  std::uniform_real_distribution<double> sig(0.1, 2.0), tau(-10.0, 10.0), tt(1.0, 100.0);
  const EtaFunction etas[] = {parse_eta("const:3-2i"), parse_eta("osc:1,1,6.283185307179586"), parse_eta("frac")};
  const auto start = std::chrono::steady_clock::now();
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const auto& eta = etas[i % 3];
    const C w(sig(rng), tau(rng));
    const double t = tt(rng);
    const C a = psi_closed_form(eta, w, t, 1e-10);
    const C b = psi_ode_oracle(eta, w, t, 1e-10);
    worst = std::max(worst, std::abs(a - b) / (1e-8 * (1.0 + std::abs(a))));
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {worst <= 1.0 && secs < 60.0, format("worst diff/(1e-8(1+|psi|)) = %.3g over 20 cases, %.2f s", worst, secs)};
}

Outcome constant_closed_form() {
  double worst = 0.0;
  for (C rho : {C(1.0), C(0.0, 2.0), C(3.0, -2.0)}) {
    const auto eta = EtaFunction::constant(rho);
    for (int i = 0; i < 10; ++i) {
      for (int j = 0; j < 10; ++j) {
        const C w(0.05 + 0.25 * i, -20.0 + 4.4 * j);
        const C exact = ((rho - 1.0) * w - rho) / w;
        worst = std::max(worst, std::abs(mu_eval(eta, w, 1e-10).value - exact));
      }
    }
  }
  return {worst <= 1e-9, format("max |mu - closed form| = %.3g over 3 x 100 points", worst)};
}

Outcome zeta_linkage() {
  const auto frac = parse_eta("frac");
  double worst = 0.0;
  for (C s : {C(2.0), C(3.0), C(1.5, 1.0), C(0.8, 5.0)}) {
    const C oracle_value = (1.0 - s) * oracle::zeta_borwein(s) / s;
    worst = std::max(worst, std::abs(mu_eval(frac, s, 1e-10).value - oracle_value));
  }
  return {worst <= 1e-6, format("max |mu - (1-s)zeta(s)/s| = %.3g", worst)};
}

Outcome strip_scan() {
  const auto start = std::chrono::steady_clock::now();
  const auto report = scan_strip(parse_eta("frac"), {0.05, 0.95, 0.25, 10.0, 30.0, 0.25});
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const double expected[] = {14.134725, 21.022040, 25.010858};
  bool pass = report.zeros.size() == 3 && secs < 300.0;
  double worst = 0.0;
  for (std::size_t i = 0; pass && i < 3; ++i) {
    const auto& z = report.zeros[i];
    worst = std::max(worst, std::abs(z.location - C(0.5, expected[i])));
    pass = pass && z.winding == 1 && z.partner_nonzero;
  }
  pass = pass && worst <= 1e-4;
  return {pass, format("%zu zeros, max location error %.3g, %.2f s", report.zeros.size(), worst, secs)};
}

Outcome desk_instance() {
  const auto z = find_zero_newton(parse_eta("const:2i"), C(0.7, -0.3));
  const double partner_err = z.partner_value ? std::abs(*z.partner_value - 3.0) : INFINITY;
  const bool pass = std::abs(z.location - C(0.8, -0.4)) < 1e-9 && z.residual < 1e-10 && partner_err <= 1e-9 &&
                    z.certified() && z.partner_nonzero;
  return {pass, format("zero %.12f%+.12fi, residual %.3g, |partner - 3| = %.3g", z.location.real(), z.location.imag(),
                       z.residual, partner_err)};
}

Outcome lemma1_dichotomy() {
  const auto grid = integer_grid(1, 1000);
  const PsiEvaluator bounded(parse_eta("const:2"), C(2.0), 1000.0, 1e-11);
  double sup = 0.0;
  for (const auto& p : bounded.trajectory(grid)) sup = std::max(sup, std::abs(p.psi));
  const double growth = std::abs(psi_closed_form(parse_eta("const:1"), C(1.0, 1.0), 1000.0, 1e-10)) / 1000.0;
  const bool pass = std::abs(sup - 1.0) <= 1e-8 && std::abs(growth - std::sqrt(0.5)) <= 1e-3;
  return {pass, format("bounded sup = %.12f, |psi(1e3)|/1e3 = %.6f vs 1/sqrt2", sup, growth)};
}

Outcome identities() {
  const auto start = std::chrono::steady_clock::now();
  const EtaFunction etas[] = {parse_eta("const:1"), parse_eta("frac"), parse_eta("osc:2i,1,6.283185307179586")};
  const C points[] = {{0.7, 5.0}, {0.3, 14.0}, {0.25, 2.0}, {0.8, -3.0}};
  double worst_v = 0.0, worst_p = 0.0;
  for (const auto& eta : etas) {
    for (C s : points) {
      for (double t : {2.0, 10.0, 100.0}) {
        const C direct = delta_direct(eta, s, t);
        const double scale = 1.0 + std::abs(direct);
        worst_v = std::max(worst_v, std::abs(delta_volterra(eta, s, t) - direct) / scale);
        worst_p = std::max(worst_p, prop1_residual(eta, s, t).residual / scale);
      }
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {worst_v <= 1e-5 && worst_p <= 1e-5 && secs < 120.0,
          format("max relative residual: volterra %.3g, integral equation %.3g; %.2f s", worst_v, worst_p, secs)};
}

Outcome ratio_asymptotics() {
  const double grid[] = {1.0, 10.0, 100.0, 1000.0, 10000.0};
  bool pass = true;
  std::string detail;
  for (C s : {C(0.7, 3.0), C(0.3, 3.0)}) {
    const auto last = ratio_series(parse_eta("const:1"), s, grid, 1e-10).back();
    const double rel = std::abs(last.ratio_observed / last.ratio_predicted - 1.0);
    pass = pass && rel <= 0.1;
    detail += format("s=%.1f%+.0fi observed %.5f predicted %.5f (%.0f%% off); ", s.real(), s.imag(),
                     last.ratio_observed, last.ratio_predicted, 100.0 * rel);
  }
  detail += "exact leading coefficient is (1+tau^2)/|s|^2 where the prediction has sigma";
  return {pass, detail};
}

Outcome majoration() {
  const auto r = majoration_check(parse_eta("frac"), 5.0, integer_grid(1, 1000));
  return {r.trend >= 0.5 && r.trend <= 2.0, format("sup %.6f, trend %.4f", r.sup_value, r.trend)};
}

Outcome property_suites() {
  std::mt19937 rng(77);
  std::uniform_real_distribution<double> sig(0.05, 2.0), tau(-20.0, 20.0), unit(0.0, 1.0);
  const EtaFunction etas[] = {parse_eta("frac"), parse_eta("const:3-2i"), parse_eta("osc:2i,1,6.283185307179586"),
                              parse_eta("osc:0.5,0,3")};
  int failures = 0;

  // psi(1) = 1 on both paths.
  for (int i = 0; i < 40; ++i) {
    const auto& eta = etas[i % 4];
    const C w(sig(rng), tau(rng));
    if (psi_closed_form(eta, w, 1.0) != C(1.0) || psi_ode_oracle(eta, w, 1.0) != C(1.0)) ++failures;
  }
  // delta reflection.
  const double tol = 1e-10;
  for (int i = 0; i < 24; ++i) {
    const auto& eta = etas[i % 4];
    double sigma = 0.02 + 0.96 * unit(rng);
    if (std::abs(sigma - 0.5) < 1e-3) sigma += 0.01;
    const StripPoint s(sigma, tau(rng));
    const double t = 1.0 + 99.0 * unit(rng);
    if (std::abs(delta_direct(eta, s, t, tol) - delta_direct(eta, s.reflected(), t, tol)) > 2 * tol) ++failures;
  }
  // mu conjugation for real eta.
  for (const auto& eta : {etas[0], etas[3], parse_eta("const:2")}) {
    for (int i = 0; i < 8; ++i) {
      const C w(sig(rng), tau(rng));
      if (std::abs(mu_eval(eta, std::conj(w), tol).value - std::conj(mu_eval(eta, w, tol).value)) > 2 * tol) {
        ++failures;
      }
    }
  }
  // Quadrature additivity and linearity.
  std::vector<double> ints;
  for (int k = 2; k < 60; ++k) ints.push_back(k);
  for (int i = 0; i < 20; ++i) {
    double a = 1.0 + 50.0 * unit(rng), b = 1.0 + 50.0 * unit(rng), c = 1.0 + 50.0 * unit(rng);
    if (a > b) std::swap(a, b);
    if (b > c) std::swap(b, c);
    if (a > b) std::swap(a, b);
    const C z(sig(rng), tau(rng));
    auto f = [&](double u) { return std::exp(-(1.0 + z) * std::log(u)) * std::fmod(u, 1.0); };
    auto g = [](double u) { return std::exp(C(0.0, 2.0 * u)) / std::sqrt(u); };
    const double qt = 1e-10;
    const C ac = integrate_finite(f, a, c, qt, ints).value;
    if (std::abs(ac - integrate_finite(f, a, b, qt, ints).value - integrate_finite(f, b, c, qt, ints).value) > 2 * qt) {
      ++failures;
    }
    const C alpha(unit(rng), -unit(rng)), beta(-unit(rng), unit(rng));
    const double split = qt / (std::abs(alpha) + std::abs(beta));
    const C lin = integrate_finite([&](double u) { return alpha * f(u) + beta * g(u); }, a, c, qt, ints).value;
    const C parts = alpha * integrate_finite(f, a, c, split, ints).value + beta * integrate_finite(g, a, c, split, ints).value;
    if (std::abs(lin - parts) > 2 * qt) ++failures;
  }
  // ratio_predicted > 0.
  for (int i = 1; i < 100; ++i) {
    if (i == 50) continue;
    for (double t = 2.0; t <= 1e8; t *= 1.5) {
      if (!(ratio_predicted(i / 100.0, t) > 0.0)) ++failures;
    }
  }
  return {failures == 0, format("%d property violations", failures)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"cross-oracle psi agreement", cross_oracle},
      {"constant-eta mu closed form", constant_closed_form},
      {"zeta linkage for frac", zeta_linkage},
      {"strip scan finds the first three zeros", strip_scan},
      {"const:2i zero and its nonzero partner", desk_instance},
      {"bounded/unbounded dichotomy", lemma1_dichotomy},
      {"Volterra and integral-equation identities", identities},
      {"asymptotic Im-ratio within 10%", ratio_asymptotics},
      {"majoration trend for frac", majoration},
      {"property suites", property_suites},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("criterion %2zu %s: %s [%s] (%.2f s)\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first,
                o.detail.c_str(), secs);
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}

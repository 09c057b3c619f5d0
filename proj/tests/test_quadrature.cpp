#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles/contour.hpp"
#include "rigidity/quadrature.hpp"

using namespace rigidity;

namespace {

Complex cpow(double u, Complex z) { return std::exp(z * std::log(u)); }

}  // namespace

TEST_CASE("integrate_finite examples") {
  CHECK(std::abs(integrate_finite([](double u) { return Complex(1.0 / (u * u)); }, 1, 2, 1e-10).value - 0.5) <= 1e-10);
  CHECK(std::abs(integrate_finite([](double u) { return Complex(1.0 / u); }, 1, std::exp(1.0), 1e-10).value - 1.0) <=
        1e-10);
  // (1 - 10^{-i}) (-i): antiderivative u^{-i} / (-i)
  const Complex exact = (1.0 - cpow(10.0, {0, -1})) * Complex(0, -1);
  const auto r = integrate_finite([](double u) { return cpow(u, {-1, -1}); }, 1, 10, 1e-10);
  CHECK(std::abs(r.value - exact) <= 1e-10);
  CHECK(std::abs(r.value - Complex(0.743980, -1.668201)) < 1e-6);
  CHECK(r.error_estimate <= 1e-10);
  CHECK(r.panels >= 1);
}

TEST_CASE("integrate_finite contract") {
  auto f = [](double u) { return Complex(u); };
  CHECK_THROWS_AS(integrate_finite(f, 0.5, 2, 1e-10), DomainError);
  CHECK_THROWS_AS(integrate_finite(f, 3, 2, 1e-10), DomainError);
  CHECK_THROWS_AS(integrate_finite(f, 1, 2, 1e-13), DomainError);
  CHECK(integrate_finite(f, 2, 2, 1e-10).value == Complex{});

  // A jump integrated without its breakpoint still converges; with it, in one panel per side.
  auto step = [](double u) { return Complex(u < 2.5 ? 0.0 : 1.0); };
  const double bp[] = {2.5};
  const auto split = integrate_finite(step, 1, 4, 1e-12, bp);
  CHECK(std::abs(split.value - 1.5) < 1e-12);
  CHECK(split.panels == 2);
}

TEST_CASE("panel cap raises a numerical failure with the best estimate") {
  QuadratureOptions opts;
  opts.abs_tol = 1e-14;
  opts.max_panels = 8;
  const double nodes[] = {1.0, 200.0};
  try {
    integrate_partitioned([](double u) { return std::exp(Complex(0, u * u)); }, nodes, opts);
    FAIL("expected NumericalFailure");
  } catch (const NumericalFailure& e) {
    CHECK(e.error_estimate() > 0.0);
    CHECK(std::isfinite(std::abs(e.best_estimate())));
  }
}

TEST_CASE("property: interval additivity and linearity") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> pos(1.0, 40.0);
  std::uniform_real_distribution<double> coef(-3.0, 3.0);
  const double tol = 1e-10;
  for (int trial = 0; trial < 25; ++trial) {
    double a = pos(rng), b = pos(rng), c = pos(rng);
    if (a > b) std::swap(a, b);
    if (b > c) std::swap(b, c);
    if (a > b) std::swap(a, b);
    const Complex z(coef(rng), coef(rng));
    auto f = [&](double u) { return cpow(u, -1.0 - z * 0.2) * (std::fmod(u, 1.0) + 0.1); };
    auto g = [&](double u) { return std::exp(Complex(0.0, 3.0 * u)) / u; };
    std::vector<double> ints;
    for (int k = 2; k < 40; ++k) ints.push_back(k);

    const auto ac = integrate_finite(f, a, c, tol, ints).value;
    const auto ab = integrate_finite(f, a, b, tol, ints).value;
    const auto bc = integrate_finite(f, b, c, tol, ints).value;
    CHECK(std::abs(ac - (ab + bc)) <= 2 * tol);

    const Complex alpha(coef(rng), coef(rng)), beta(coef(rng), coef(rng));
    const double scale = std::max(1.0, std::abs(alpha) + std::abs(beta));
    const auto lin = integrate_finite([&](double u) { return alpha * f(u) + beta * g(u); }, a, c, tol, ints).value;
    const auto fi = integrate_finite(f, a, c, tol / scale, ints).value;
    const auto gi = integrate_finite(g, a, c, tol / scale, ints).value;
    CHECK(std::abs(lin - (alpha * fi + beta * gi)) <= 2 * tol);
  }
}

TEST_CASE("tail_integral examples") {
  const auto zero = tail_integral(parse_eta("const:0"), Complex(0.4, 3.0), 1.0, 1e-9);
  CHECK(zero.value == Complex{});
  CHECK(zero.certificate.bound == 0.0);

  for (double t : {1.0, 3.0, 17.5, 400.0}) {
    const auto r = tail_integral(parse_eta("const:2"), Complex(2.0, 0.0), t, 1e-12);
    CHECK(std::abs(r.value - 1.0 / (t * t)) <= 1e-12);
  }

  const auto osc = parse_eta("osc:1,1,6.283185307179586");
  const auto acc = tail_integral(osc, Complex(0.1, 1.0), 1.0, 1e-8);
  CHECK(acc.certificate.method == TailMethod::rotation_accelerated);
  CHECK(acc.certificate.bound <= 0.5e-8);
  CHECK(acc.certificate.truncation_point >= 1.0);
  const Complex oracle_value = oracle::osc_eta_tail(1.0, 1.0, 6.283185307179586, Complex(0.1, 1.0), 1.0);
  CHECK(std::abs(acc.value - oracle_value) <= 1e-8);
}

TEST_CASE("tail_integral against the rotated-contour oracle") {
  struct Case {
    Complex rho, amp;
    double omega;
    Complex w;
    double T;
  };
  const Case cases[] = {{1.0, 1.0, kTwoPi, {0.5, 3.0}, 1.0},   {{0, 2}, 1.0, kTwoPi, {0.8, -0.4}, 5.0},
                        {0.3, {0.5, -1}, -3.7, {0.05, 10.0}, 2.0}, {1.0, 1.0, 0.4, {1.5, 0.0}, 1.0},
                        {2.0, 0.5, 25.0, {0.3, -20.0}, 10.0}};
  for (const auto& c : cases) {
    const auto eta = EtaFunction::oscillating(c.rho, c.amp, c.omega);
    const auto r = tail_integral(eta, c.w, c.T, 1e-10);
    const Complex expected = oracle::osc_eta_tail(c.rho, c.amp, c.omega, c.w, c.T);
    CHECK(std::abs(r.value - expected) <= 1e-10 + 1e-12);
    CHECK(r.total_error() <= 1e-10 * (1 + 1e-9));
  }
}

TEST_CASE("invariant: crude and accelerated tails agree for Re(w) >= 1") {
  const EtaFunction etas[] = {parse_eta("frac"), parse_eta("osc:1,1,6.283185307179586"), parse_eta("const:3-2i"),
                              parse_eta("osc:2i,0.5-0.5i,-2")};
  const Complex ws[] = {{1.0, 3.0}, {1.2, -0.7}, {2.0, 0.0}, {1.5, 12.0}};
  for (const auto& eta : etas) {
    for (Complex w : ws) {
      // Budget sized so that crude truncation stops near 1e5.
      const double budget = 2.0 * eta.sup_bound() / (w.real() * std::pow(1e5, w.real()));
      const auto crude = tail_integral(eta, w, 1.0, budget, TailMethodChoice::crude);
      const auto acc = tail_integral(eta, w, 1.0, budget, TailMethodChoice::rotation_accelerated);
      CHECK(crude.certificate.method == TailMethod::crude);
      CHECK(acc.certificate.method == TailMethod::rotation_accelerated);
      CHECK(std::abs(crude.value - acc.value) <= crude.total_error() + acc.total_error());
    }
  }
}

TEST_CASE("invariant: conjugation for real-valued eta") {
  const double budget = 1e-10;
  for (const auto& eta : {parse_eta("frac"), parse_eta("const:2"), parse_eta("osc:0.5,0,3")}) {
    for (Complex w : {Complex(0.3, 14.0), Complex(0.75, -2.5), Complex(1.0, 0.5), Complex(2.5, 7.0)}) {
      const auto a = tail_integral(eta, w, 1.0, budget);
      const auto b = tail_integral(eta, std::conj(w), 1.0, budget);
      CHECK(std::abs(b.value - std::conj(a.value)) <= 2 * budget);
    }
  }
}

TEST_CASE("log-weighted tail is minus the w-derivative") {
  const double h = 1e-5;
  for (const auto& eta : {parse_eta("frac"), parse_eta("osc:1,1,6.283185307179586"), parse_eta("const:2i")}) {
    for (Complex w : {Complex(0.5, 14.0), Complex(1.5, 0.0), Complex(0.2, -3.0)}) {
      for (double T : {1.0, 4.0}) {
        const auto logged = tail_integral(eta, w, T, 1e-11, TailMethodChoice::automatic, 1);
        const Complex fd = -(tail_integral(eta, w + h, T, 1e-12).value - tail_integral(eta, w - h, T, 1e-12).value) /
                           (2 * h);
        CHECK(std::abs(logged.value - fd) < 1e-6);
      }
    }
  }
}

TEST_CASE("tail_integral contract") {
  const auto frac = parse_eta("frac");
  CHECK_THROWS_AS(tail_integral(frac, Complex(0.0, 1.0), 1.0, 1e-8), DomainError);
  CHECK_THROWS_AS(tail_integral(frac, Complex(0.5, 1.0), 0.5, 1e-8), DomainError);
  CHECK_THROWS_AS(tail_integral(frac, Complex(0.5, 1.0), 1.0, 0.0), DomainError);
  CHECK_THROWS_AS(tail_integral(frac, Complex(0.5, 1.0), 1.0, 1e-8, TailMethodChoice::automatic, 2), DomainError);
  // Crude truncation near Re(w) = 0 is hopeless; the panel cap refuses it.
  CHECK_THROWS_AS(tail_integral(frac, Complex(0.05, 1.0), 1.0, 1e-10, TailMethodChoice::crude), NumericalFailure);
  // Automatic selection switches at the crude cap.
  const auto cheap = tail_integral(frac, Complex(3.0, 0.0), 1.0, 1e-6);
  CHECK(cheap.certificate.method == TailMethod::crude);
  CHECK(cheap.certificate.truncation_point <= kCrudeTruncationCap);
  const auto costly = tail_integral(frac, Complex(0.3, 0.0), 1.0, 1e-10);
  CHECK(costly.certificate.method == TailMethod::rotation_accelerated);
}

TEST_CASE("MellinPrefix matches direct integration") {
  const auto eta = parse_eta("frac");
  const Complex exponent(1.6, 5.0);
  const MellinPrefix prefix(eta, exponent, 300.0, 1e-11);
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> v(1.0, 300.0);
  for (int i = 0; i < 30; ++i) {
    const double x = v(rng);
    const auto direct = mellin_integral(eta, exponent - 1.0, 1.0, x, 1e-12);
    CHECK(std::abs(prefix(x) - direct.value) < 1e-10);
  }
  CHECK(prefix(1.0) == Complex{});
  CHECK_THROWS_AS(prefix(301.0), DomainError);
  CHECK_THROWS_AS(prefix(0.9), DomainError);
}

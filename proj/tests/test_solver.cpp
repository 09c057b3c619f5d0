#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles/theta_rk4.hpp"
#include "rigidity/mu.hpp"
#include "rigidity/solver.hpp"

using namespace rigidity;

namespace {

using C = Complex;

std::vector<double> integer_grid(int lo, int hi) {
  std::vector<double> g;
  for (int i = lo; i <= hi; ++i) g.push_back(i);
  return g;
}

double max_abs_psi(const EtaFunction& eta, const StripPoint& w, std::span<const double> grid) {
  const PsiEvaluator psi(eta, w, grid.back(), 1e-11);
  double m = 0.0;
  for (double t : grid) m = std::max(m, std::abs(psi(t)));
  return m;
}

}  // namespace

TEST_CASE("psi_closed_form examples") {
  CHECK(std::abs(psi_closed_form(parse_eta("const:0"), C(0.3, 2.0), 16.0) - std::pow(16.0, 0.3)) < 1e-12);
  CHECK(std::abs(psi_closed_form(parse_eta("const:0"), C(0.3, 2.0), 16.0) - 2.297397) < 1e-6);
  CHECK(std::abs(psi_closed_form(parse_eta("const:2"), C(2.0), 50.0) - 1.0) < 1e-10);
  const auto frac = parse_eta("frac");
  CHECK(std::abs(psi_closed_form(frac, C(1.5), 10.0, 1e-10) - psi_ode_oracle(frac, C(1.5), 10.0, 1e-10)) < 1e-8);
  CHECK(psi_closed_form(frac, C(0.5, 14.0), 1.0) == C(1.0));
}

TEST_CASE("psi_ode_oracle examples") {
  CHECK(std::abs(psi_ode_oracle(parse_eta("const:0"), C(1.0, 1.0), 4.0) - 4.0) < 1e-9);
  CHECK(std::abs(psi_ode_oracle(parse_eta("const:2"), C(2.0), 50.0) - 1.0) < 1e-9);
  const auto osc = parse_eta("osc:1,1,6.283185307179586");
  CHECK(std::abs(psi_ode_oracle(osc, C(0.5, 3.0), 20.0) - psi_closed_form(osc, C(0.5, 3.0), 20.0)) < 1e-8);
}

TEST_CASE("psi_bounded_form examples") {
  CHECK(std::abs(psi_bounded_form(parse_eta("const:2"), C(2.0), 7.0) - 1.0) < 1e-10);
  const auto c2i = parse_eta("const:2i");
  const C zero(0.8, -0.4);
  CHECK(std::abs(psi_bounded_form(c2i, zero, 10.0) - psi_closed_form(c2i, zero, 10.0)) < 1e-7);
  try {
    psi_bounded_form(parse_eta("const:1"), C(1.0, 1.0), 5.0);
    FAIL("expected PreconditionError");
  } catch (const PreconditionError& e) {
    CHECK(e.measured() == doctest::Approx(std::sqrt(0.5)).epsilon(1e-9));
  }
}

TEST_CASE("theta_solution examples") {
  const auto zero = parse_eta("const:0");
  CHECK(std::abs(theta_solution(zero, C(0.5, 1.0), 1.0) - C(0.4, 0.8)) < 1e-14);
  const C rk = oracle::theta_rk4(C(0.5, 1.0), [](double) { return C{}; }, 4.0);
  CHECK(std::abs(theta_solution(zero, C(0.5, 1.0), 4.0) - rk) < 1e-8);
  CHECK_THROWS_AS(theta_solution(parse_eta("const:2"), C(2.0), 3.0), DomainError);

  // Non-trivial forcing: the theta equation integrated directly in log time.
  const auto osc = EtaFunction::oscillating(C(0.5, 0.5), C(1.0, -0.3), 2.2);
  for (C w : {C(0.5, 1.0), C(0.3, -4.0), C(1.4, 0.7)}) {
    const C rk_osc = oracle::theta_rk4(w, [&](double t) { return osc(t); }, 12.0, 40000);
    CHECK(std::abs(theta_solution(osc, w, 12.0, 1e-11) - rk_osc) < 1e-8 * std::max(1.0, std::abs(rk_osc)));
  }
}

TEST_CASE("invariant: psi(1) = 1 on both paths") {
  for (const auto& eta : {parse_eta("frac"), parse_eta("const:3-2i"), parse_eta("osc:2i,1,6.283185307179586")}) {
    for (C w : {C(0.5, 14.0), C(0.01, -3.0), C(2.0), C(0.8, -0.4)}) {
      CHECK(psi_closed_form(eta, w, 1.0) == C(1.0));
      CHECK(psi_ode_oracle(eta, w, 1.0) == C(1.0));
      const PsiEvaluator ev(eta, w, 5.0);
      const double g[] = {1.0, 2.0, 5.0};
      const auto traj = ev.trajectory(g);
      CHECK(traj.front().psi == C(1.0));
      CHECK(traj.front().x_half == C(1.0));
    }
  }
}

TEST_CASE("property: closed form and ODE oracle agree on a randomized set") {
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> sig(0.1, 2.0), tau(-10.0, 10.0), tt(1.0, 50.0);
  const EtaFunction etas[] = {parse_eta("frac"), parse_eta("const:3-2i"), parse_eta("osc:1,1,6.283185307179586"),
                              EtaFunction::oscillating(C(0.0, 2.0), C(0.5, -0.25), -3.7)};
  const double tol = 1e-8;
  for (int i = 0; i < 24; ++i) {
    const auto& eta = etas[i % 4];
    const C w(sig(rng), tau(rng));
    const double t = tt(rng);
    const C a = psi_closed_form(eta, w, t, tol);
    const C b = psi_ode_oracle(eta, w, t, tol);
    INFO(eta.id(), " w=", w.real(), "+", w.imag(), "i t=", t);
    CHECK(std::abs(a - b) <= 10 * tol);
  }
}

TEST_CASE("trajectory sweep matches pointwise evaluation") {
  const auto eta = parse_eta("frac");
  const C w(0.5, 14.134725);
  const auto grid = integer_grid(1, 200);
  const PsiEvaluator ev(eta, w, 200.0, 1e-10);
  const auto traj = ev.trajectory(grid);
  const auto ode = psi_ode_trajectory(eta, w, grid, 1e-9);
  for (std::size_t i = 0; i < grid.size(); i += 17) {
    CHECK(std::abs(traj[i].psi - psi_closed_form(eta, w, grid[i], 1e-10)) < 2e-10);
    CHECK(std::abs(traj[i].psi - ode[i]) < 1e-8);
    CHECK(std::abs(traj[i].x_half - traj[i].psi / std::sqrt(grid[i])) < 1e-14);
    REQUIRE(traj[i].theta.has_value());
  }
}

TEST_CASE("invariant: growth law psi t^-sigma -> -mu") {
  for (const auto& eta : {parse_eta("frac"), parse_eta("osc:1,1,6.283185307179586"), parse_eta("const:2i")}) {
    for (C w : {C(0.5, 3.0), C(1.2, -1.0), C(0.25, 9.0)}) {
      const C mu = mu_eval(eta, w, 1e-11).value;
      for (double t : {10.0, 100.0, 1000.0}) {
        const double cert = std::abs(1.0 - w) * eta.sup_bound() / (w.real() * std::pow(t, w.real()));
        const C scaled = psi_closed_form(eta, w, t, 1e-10) * std::pow(t, -w.real());
        CHECK(std::abs(scaled + mu) <= cert + 1e-9);
      }
    }
  }
}

TEST_CASE("invariant: boundedness dichotomy") {
  const auto grid = integer_grid(1, 1000);
  const std::span<const double> first(grid.data(), 500), second(grid.data() + 500, 500);

  // |mu| > 0.01: growth.
  struct Grow {
    EtaFunction eta;
    C w;
  };
  for (const auto& g : {Grow{parse_eta("frac"), C(0.5, 10.0)}, Grow{parse_eta("const:1"), C(0.3, 2.0)},
                        Grow{parse_eta("osc:1,1,6.283185307179586"), C(1.0, 1.0)}}) {
    REQUIRE(std::abs(mu_eval(g.eta, g.w).value) > 0.01);
    const double factor = std::pow(second.back() / first.back(), g.w.real()) / 2.0;
    CHECK(max_abs_psi(g.eta, g.w, second) >= factor * max_abs_psi(g.eta, g.w, first));
  }

  // |mu| < 1e-9: bounded by c |1-w| / Re(w).
  const auto frac = parse_eta("frac");
  const auto z = find_zero_newton(frac, C(0.6, 14.0), {.zero_tol = 1e-12});
  const auto c2i = parse_eta("const:2i");
  struct Zero {
    EtaFunction eta;
    C w;
  };
  for (const auto& zc : {Zero{frac, z.location}, Zero{c2i, C(0.8, -0.4)}}) {
    REQUIRE(std::abs(mu_eval(zc.eta, zc.w).value) < 1e-9);
    const double bound = zc.eta.sup_bound() * std::abs(1.0 - zc.w) / zc.w.real();
    CHECK(max_abs_psi(zc.eta, zc.w, grid) <= bound + 1e-6);
  }
}

TEST_CASE("lemma1_residual examples") {
  const auto g100 = integer_grid(1, 100);
  const auto r1 = lemma1_residual(parse_eta("const:2"), C(2.0), g100);
  CHECK(r1.sup < 1e-8);
  CHECK(r1.bound == 0.0);

  const double sparse[] = {1.0, 10.0, 100.0, 1000.0};
  const auto r2 = lemma1_residual(parse_eta("const:2i"), C(0.8, -0.4), sparse);
  CHECK(r2.bound == 0.0);
  CHECK(r2.sup < 1e-6);

  const auto osc = parse_eta("osc:2i,1,6.283185307179586");
  const auto zero = find_zero_newton(osc, C(0.8, -0.4), {.zero_tol = 1e-11});
  CHECK(zero.residual <= 1e-11);
  const auto grid = integer_grid(1, 1000);
  const auto r3 = lemma1_residual(osc, zero.location, grid, 1e-10, 1e-9);
  CHECK(std::isfinite(r3.sup));
  CHECK(r3.sup <= r3.bound + 1e-6);
  CHECK(r3.second_half_sup <= 1.5 * r3.first_half_sup);
  CHECK(r3.residuals.size() == grid.size());

  CHECK_THROWS_AS(lemma1_residual(parse_eta("const:1"), C(1.0, 1.0), g100), PreconditionError);
  CHECK_THROWS_AS(lemma1_residual(parse_eta("const:0"), C(0.5, 1.0), g100), RotationHypothesisError);
}

#include <doctest.h>

#include <cmath>

#include "varineq/quadrature.hpp"
#include "varineq/special.hpp"

using namespace varineq;

namespace {
QuadratureSpec spec_default() { return QuadratureSpec{}; }
}  // namespace

TEST_CASE("integrate_1d examples") {
  const auto s = spec_default();
  auto e = integrate_1d([](double x) { return x * x; }, {0.0, 1.0}, s);
  CHECK(std::abs(e.value - 1.0 / 3.0) < 1e-12);
  CHECK(e.method == "gauss-kronrod");
  CHECK(e.node_count > 0);
  e = integrate_1d([](double x) { return 1.0 / (1 + x * x); }, {}, s);
  CHECK(std::abs(e.value - M_PI) < 1e-10);
  CHECK(e.error_bound < 1e-9);
  e = integrate_1d([](double x) { return std::pow(1 - x * x, 2); }, {-1.0, 1.0}, s);
  CHECK(std::abs(e.value - 16.0 / 15.0) < 1e-12);
}

TEST_CASE("half-line and kinked integrands") {
  const auto s = spec_default();
  auto e = integrate_1d([](double x) { return std::exp(-x); }, {2.0, INFINITY}, s);
  CHECK(std::abs(e.value - std::exp(-2.0)) < 1e-12);
  e = integrate_1d([](double x) { return std::exp(x); }, {-INFINITY, 0.0}, s);
  CHECK(std::abs(e.value - 1.0) < 1e-11);
  EndpointHints h;
  h.breakpoints = {0.0};
  e = integrate_1d([](double x) { return std::exp(-std::abs(x)); }, {}, s, h);
  CHECK(std::abs(e.value - 2.0) < 1e-11);
}

TEST_CASE("endpoint power singularities") {
  const auto s = spec_default();
  EndpointHints h;
  h.lo_power = -0.5;
  h.hi_power = -0.5;
  auto e = integrate_1d([](double x) { return 1.0 / std::sqrt(1 - x * x); }, {-1.0, 1.0}, s, h);
  CHECK(std::abs(e.value - M_PI) < 1e-10);
  EndpointHints h2;
  h2.lo_power = 0.3;
  e = integrate_1d([](double x) { return std::pow(x, 0.3); }, {0.0, 1.0}, s, h2);
  CHECK(std::abs(e.value - 1.0 / 1.3) < 1e-12);
  EndpointHints bad;
  bad.lo_power = -1.0;
  CHECK_THROWS_AS(integrate_1d([](double x) { return 1.0 / x; }, {0.0, 1.0}, s, bad), NonIntegrableError);
}

TEST_CASE("non-convergence carries the best estimate") {
  QuadratureSpec s;
  s.max_subdivisions = 3;
  try {
    integrate_1d([](double x) { return std::sin(50 * x) * std::sin(50 * x); }, {0.0, 10.0}, s);
    FAIL("expected non-convergence");
  } catch (const NonConvergentError& e) {
    CHECK(e.code() == "non-convergent");
    CHECK(std::isfinite(e.best().value));
    CHECK(e.best().error_bound > 0);
  }
}

TEST_CASE("slow tails are rejected") {
  const auto s = spec_default();
  CHECK_THROWS_AS(integrate_1d([](double x) { return 1.0 / (1 + std::abs(x)); }, {}, s), NonIntegrableError);
  CHECK_THROWS_AS(integrate_1d([](double x) { return std::exp(x * x / 4); }, {}, s), NonIntegrableError);
}

TEST_CASE("compactify examples") {
  const auto s = spec_default();
  auto g = compactify([](double x) { return 1.0 / (1 + x * x); });
  CHECK(std::abs(integrate_1d(g, {-1.0, 1.0}, s).value - M_PI) < 1e-10);
  g = compactify([](double x) { return x * std::exp(-x * x); });
  CHECK(std::abs(integrate_1d(g, {-1.0, 1.0}, s).value) < 1e-12);
  g = compactify([](double x) { return std::exp(-x * x); });
  CHECK(std::abs(integrate_1d(g, {-1.0, 1.0}, s).value - std::sqrt(M_PI)) < 1e-10);
  for (double x : {-30.0, -1.0, 0.0, 0.2, 7.0}) CHECK(compactify_map(compactify_inverse(x)) == doctest::Approx(x));
}

TEST_CASE("integrate_nd examples") {
  auto s = spec_default();
  auto e = integrate_nd([](const Vector& x) { return std::pow(1 + x.squaredNorm(), -2.0); }, DomainSpec::full_space(2), s);
  CHECK(std::abs(e.value - M_PI) < 1e-8);
  CHECK(e.method == "gauss-kronrod-tensor");
  e = integrate_nd([](const Vector&) { return 1.0; }, DomainSpec::box(Vector::Zero(2), Vector::Ones(2)), s);
  CHECK(e.value == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(integrate_nd([](const Vector&) { return 1.0; }, DomainSpec::box(Vector::Zero(4), Vector::Ones(4)), s),
                  UnsupportedDimensionError);
  s.nd_strategy = NdStrategy::kMonteCarlo;
  const double beta = 4.0;
  const double Z = std::pow(M_PI, 2.0) * special::gamma(beta - 2.0) / special::gamma(beta);
  e = integrate_nd([beta](const Vector& x) { return std::pow(1 + x.squaredNorm(), -beta); }, DomainSpec::full_space(4), s);
  CHECK(std::abs(e.value - Z) < 4 * e.error_bound);
  CHECK(e.method == "monte-carlo");
}

TEST_CASE("ball domains with boundary powers") {
  auto s = spec_default();
  NdHints h;
  h.boundary_power = 2.0;
  // ∫_{|x|<1} (1-|x|²)² d²x = π/3
  auto e = integrate_nd([](const Vector& x) { return std::pow(1 - x.squaredNorm(), 2.0); }, DomainSpec::ball(2, 1.0), s, h);
  CHECK(std::abs(e.value - M_PI / 3) < 1e-8);
  h.boundary_power = 0.5;
  // n=3: σ^{2β+n}π^{3/2}Γ(β+1)/Γ(β+5/2)
  const double Z = std::pow(M_PI, 1.5) * special::gamma(1.5) / special::gamma(3.0);
  e = integrate_nd([](const Vector& x) { return std::sqrt(std::max(0.0, 1 - x.squaredNorm())); }, DomainSpec::ball(3, 1.0), s, h);
  CHECK(std::abs(e.value - Z) < 1e-7);
}

TEST_CASE("linearity within error bounds") {
  const auto s = spec_default();
  auto f = [](double x) { return std::exp(-x * x) * std::cos(x); };
  auto g = [](double x) { return 1.0 / (1 + x * x * x * x); };
  const auto ef = integrate_1d(f, {}, s), eg = integrate_1d(g, {}, s);
  const auto eh = integrate_1d([&](double x) { return 2 * f(x) - 3 * g(x); }, {}, s);
  CHECK(std::abs(eh.value - (2 * ef.value - 3 * eg.value)) <= 2 * ef.error_bound + 3 * eg.error_bound + eh.error_bound + 1e-15);
}

TEST_CASE("halving the tolerance never increases the error bound") {
  QuadratureSpec s;
  auto f = [](double x) { return std::exp(-x * x) * (1 + std::sin(3 * x)); };
  double prev = INFINITY;
  for (double tol = 1e-4; tol > 1e-12; tol *= 0.5) {
    s.tolerance = tol;
    const auto e = integrate_1d(f, {}, s);
    CHECK(e.error_bound <= prev);
    prev = e.error_bound;
  }
}

TEST_CASE("monte carlo reproducibility and scaling") {
  QuadratureSpec s;
  s.nd_strategy = NdStrategy::kMonteCarlo;
  s.mc_samples = 20000;
  s.seed = 99;
  auto f = [](const Vector& x) { return std::exp(-x.squaredNorm()); };
  const auto a = integrate_nd(f, DomainSpec::full_space(3), s);
  const auto b = integrate_nd(f, DomainSpec::full_space(3), s);
  CHECK(a.value == b.value);
  CHECK(a.error_bound == b.error_bound);
  s.mc_samples = 80000;
  const auto c = integrate_nd(f, DomainSpec::full_space(3), s);
  const double ratio = a.error_bound / c.error_bound;
  CHECK(ratio >= 1.6);
  CHECK(ratio <= 2.4);
}

TEST_CASE("spec and domain validation") {
  QuadratureSpec s;
  s.tolerance = 0.0;
  CHECK_THROWS_AS(s.validate(), InvalidParametersError);
  CHECK_THROWS_AS(DomainSpec::interval(1.0, 1.0).validate(), InvalidParametersError);
  CHECK_THROWS_AS(DomainSpec::ball(2, 0.0).validate(), InvalidParametersError);
}

#include <doctest.h>

#include <cmath>

#include "varineq/evolve.hpp"

using namespace varineq;

namespace {

ScalarField lin() { return ScalarField(1, [](const Vector& x) { return x(0); }); }

}  // namespace

TEST_CASE("generator names") {
  for (auto g : {Generator::kCauchy, Generator::kSphere, Generator::kGenericCase1, Generator::kGenericCase2})
    CHECK(parse_generator(to_string(g)) == g);
  CHECK(parse_generator("Nβ-sphere") == Generator::kSphere);
  CHECK_THROWS_AS(parse_generator("heat"), InvalidParametersError);
}

TEST_CASE("problem validation") {
  auto p = make_sphere_evolution(1.0, 2.0, 200);
  p.T = 0.0;
  CHECK_THROWS_AS(p.validate(), InvalidParametersError);
  p = make_sphere_evolution(1.0, 2.0, 200);
  p.generator = Generator::kCauchy;
  CHECK_THROWS_AS(p.validate(), InvalidParametersError);
  p.generator = Generator::kGenericCase1;
  CHECK_THROWS_AS(p.validate(), InvalidParametersError);
  p.generator = Generator::kGenericCase2;
  CHECK_NOTHROW(p.validate());
}

TEST_CASE("truncation radius") {
  const auto mu = make_cauchy(1, 3.0);
  const double X = truncation_radius(mu, 1e-8);
  // two tails of (1+x²)^{−3}/(3π/8) beyond X
  auto tail = [](double X) { return 2.0 * (8.0 / (3.0 * M_PI)) * (std::pow(X, -5) / 5.0 - std::pow(X, -7) / 7.0 * 3.0); };
  CHECK(tail(X) < 1.01e-8);
  CHECK(tail(0.95 * X) > 1e-8);
  CHECK(truncation_radius(make_gaussian(1), 1e-8) == doctest::Approx(5.7307).epsilon(1e-3));
}

TEST_CASE("cell operator structure") {
  const auto p = make_sphere_evolution(1.0, 2.0, 400);
  const auto op = evolution_operator(p);
  double s = 0.0;
  for (double w : op.weights) s += w;
  CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
  for (int i = 0; i < op.size(); ++i) {
    CHECK(op.nodes[i] > op.edges[i]);
    CHECK(op.nodes[i] < op.edges[i + 1]);
  }
  const auto lc = op.apply(GridFunction(op.size(), 2.0));
  for (double v : lc) CHECK(v == 0.0);
  // x is an eigenfunction: N x = −2(β+1)x
  const auto x = op.sample(lin());
  const auto lx = op.apply(x);
  for (int i = 0; i < op.size(); ++i) CHECK(std::abs(lx[i] + 6.0 * x[i]) < 1e-9);
  // energy equals −Σ w u Lu
  GridFunction u = op.sample(ScalarField(1, [](const Vector& x) { return std::sin(3.0 * x(0)); }));
  const auto lu = op.apply(u);
  double q = 0.0;
  for (int i = 0; i < op.size(); ++i) q -= op.weights[i] * u[i] * lu[i];
  CHECK(op.energy(u) == doctest::Approx(q).epsilon(1e-12));
}

TEST_CASE("constant initial data stays constant") {
  const auto p = make_sphere_evolution(1.0, 2.0, 200);
  const auto ts = evolve(p, GridFunction(200, 1.5), 10);
  for (const auto& u : ts.u)
    for (double v : u) CHECK(v == doctest::Approx(1.5).epsilon(1e-13));
  const auto dc = variance_decay_check(p, GridFunction(200, 1.5), 12.0);
  CHECK(dc.report.status == Status::kHolds);
}

TEST_CASE("sphere semigroup on the linear eigenfunction") {
  const auto p = make_sphere_evolution(1.0, 2.0, 2000);
  const auto op = evolution_operator(p);
  const auto x = op.sample(lin());
  const auto ts = evolve(p, x);
  const auto k = ts.at(0.1);
  CHECK(ts.t[k] == doctest::Approx(0.1).epsilon(1e-12));
  for (int i = 0; i < op.size(); ++i) CHECK(std::abs(ts.u[k][i] - std::exp(-0.6) * x[i]) < 1e-4);

  CHECK(op.variance(x) == doctest::Approx(1.0 / 7.0).epsilon(1e-5));
  const auto dc = variance_decay_check(p, x, decay_rate(p));
  CHECK(decay_rate(p) == 12.0);
  for (double t : {0.05, 0.1, 0.2, 0.5}) {
    const auto& row = dc.rows[ts.at(t)];
    CHECK(row.t == doctest::Approx(t));
    const double ratio = row.var / (std::exp(-12.0 * t) * dc.rows[0].var);
    CHECK(std::abs(ratio - 1.0) <= 1e-3);
    CHECK(std::abs(row.var / (std::exp(-12.0 * t) / 7.0) - 1.0) <= 1e-3);
  }
  CHECK(dc.report.status == Status::kHolds);
  CHECK(dc.monotone);
}

TEST_CASE("mean conservation") {
  const auto p = make_sphere_evolution(1.0, 0.5, 500);
  const auto op = evolution_operator(p);
  const auto f = op.sample(ScalarField(1, [](const Vector& x) { return std::exp(x(0)) + x(0) * x(0); }));
  const auto ts = evolve(p, f, 50);
  for (double m : ts.mean) CHECK(std::abs(m - ts.mean.front()) <= 1e-10 * p.T);
}

TEST_CASE("Cauchy semigroup") {
  const auto p = make_cauchy_evolution(3.0);
  const auto op = evolution_operator(p);
  const auto x = op.sample(lin());
  CHECK(decay_rate(p) == 8.0);
  // x decays like e^{−4t} away from the artificial ends
  EvolutionProblem q = p;
  q.T = 0.1;
  const auto ts = evolve(q, x, 1000);
  for (int i = 0; i < op.size(); ++i)
    if (std::abs(op.nodes[i]) < 5.0) CHECK(std::abs(ts.u.back()[i] - std::exp(-0.4) * x[i]) < 1e-3 * (1.0 + std::abs(x[i])));

  const auto f0 = op.sample(ScalarField(1, [](const Vector& x) { return x(0) + 0.3 * x(0) * x(0) * x(0); }));
  const auto dc = variance_decay_check(p, f0, decay_rate(p), 1e-3, 10);
  CHECK(dc.report.status == Status::kHolds);
  CHECK(dc.report.margin > 0.0);
  CHECK(dc.monotone);
}

TEST_CASE("variance is monotone across the battery") {
  const auto sp = make_sphere_evolution(1.0, 2.0, 400);
  const auto cp = make_cauchy_evolution(3.0, 800);
  for (const auto* p : {&sp, &cp}) {
    const auto op = evolution_operator(*p);
    for (const auto& tf : battery(1)) {
      const auto f0 = op.sample(tf.f);
      const auto dc = variance_decay_check(*p, f0, decay_rate(*p), 1e-3, 5);
      CHECK_MESSAGE(dc.monotone, tf.name);
      CHECK_MESSAGE(dc.report.status != Status::kViolated, tf.name);
    }
  }
}

TEST_CASE("spectral gaps") {
  const auto cauchy = make_cauchy(1, 3.0);
  SpectralProblem c{field::quadratic(1, 1.0, 1.0), cauchy, default_grid(cauchy)};
  const auto rc = spectral_gap(c);
  CHECK(rc.lambda1 == doctest::Approx(4.0).epsilon(0.01));
  CHECK(rc.constant == doctest::Approx(1.0 / rc.lambda1));
  CHECK(truncation_sensitivity(c) < 1e-3);

  const auto sphere = make_halfsphere(1, 1.0, 2.0);
  SpectralProblem s{field::quadratic(1, 1.0, -1.0), sphere, Grid1D{-1.0, 1.0, 2000}};
  CHECK(spectral_gap(s).lambda1 == doctest::Approx(6.0).epsilon(0.01));

  const auto g = make_gaussian(1);
  SpectralProblem gs{field::constant(1, 1.0), g, default_grid(g)};
  CHECK(spectral_gap(gs).lambda1 == doctest::Approx(1.0).epsilon(0.05));

  // eigenvector of the sphere problem is linear
  const auto rs = spectral_gap(s);
  const double ratio = rs.eigenvector.back() / rs.nodes.back();
  for (std::size_t i = 0; i < rs.nodes.size(); i += 97) CHECK(rs.eigenvector[i] == doctest::Approx(ratio * rs.nodes[i]).epsilon(1e-6));
}

TEST_CASE("larger weights give larger gaps") {
  const auto g = make_gaussian(1);
  const auto grid = default_grid(g, 800);
  const double l1 = spectral_gap({field::constant(1, 1.0), g, grid}).lambda1;
  const double lw = spectral_gap({field::quadratic(1, 1.0, 0.5), g, grid}).lambda1;
  CHECK(lw >= l1);
  const auto sphere = make_halfsphere(1, 1.0, 2.0);
  const double a = spectral_gap({field::constant(1, 1.0), sphere, Grid1D{-1.0, 1.0, 800}}).lambda1;
  const double b = spectral_gap({field::quadratic(1, 2.0, -1.0), sphere, Grid1D{-1.0, 1.0, 800}}).lambda1;
  CHECK(b >= a);
}

TEST_CASE("Cauchy constant is below the Bobkov-Ledoux constant") {
  for (double beta : {2.0, 3.0, 5.0}) {
    const auto mu = make_cauchy(1, beta);
    const auto r = spectral_gap({field::quadratic(1, 1.0, 1.0), mu, default_grid(mu)});
    CHECK(r.lambda1 == doctest::Approx(2.0 * (beta - 1.0)).epsilon(0.01));
    const double a = std::sqrt(1.0 + 2.0 / (beta - 1.0)) + std::sqrt(2.0 / (beta + 1.0));
    CHECK(r.constant < a * a / (2.0 * (beta - 1.0)));
  }
}

TEST_CASE("spectral non-convergence") {
  const auto mu = make_cauchy(1, 3.0);
  CHECK_THROWS_AS(spectral_gap({field::quadratic(1, 1.0, 1.0), mu, default_grid(mu)}, 2), SpectralError);
}

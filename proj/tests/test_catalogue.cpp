#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "varineq/catalogue.hpp"

using namespace varineq;

namespace {

TestFunction lin() { return battery_member(1, "lin-x1"); }

Scenario make(const std::string& tag, const WeightedMeasure& mu, ParamTriple p, TestFunction f) {
  return Scenario{tag, tag, mu, p, std::move(f), QuadratureSpec{}, 0.0};
}

Potential abs_potential() { return Potential{field::abs_linear(1.0, 1.0), DomainSpec::full_space(1), false, "1+|x|"}; }

}  // namespace

TEST_CASE("battery members and gradients") {
  for (int n : {1, 2, 3}) {
    const auto b = battery(n);
    REQUIRE(b.size() == 12);
    std::set<std::string> names;
    std::mt19937_64 rng(7);
    std::normal_distribution<double> nd(0.0, 1.0);
    for (const auto& t : b) {
      names.insert(t.name);
      CHECK(t.f.has_gradient());
      for (int k = 0; k < 5; ++k) {
        Vector x(n);
        for (int i = 0; i < n; ++i) x(i) = nd(rng);
        const Vector ga = t.f.gradient_fn()(x);
        const Vector gn = eval_grad(ScalarField(n, [&t](const Vector& y) { return t.f(y); }), x);
        CHECK((ga - gn).norm() < 1e-7 * (1.0 + ga.norm()));
      }
    }
    CHECK(names.size() == 12);
  }
  CHECK_THROWS_AS(battery_member(1, "nope"), InvalidParametersError);
}

TEST_CASE("status classification") {
  CHECK(classify(1.0, 1e-3) == Status::kHolds);
  CHECK(classify(0.0, 1e-3) == Status::kInconclusive);
  CHECK(classify(-0.01, 1e-3) == Status::kInconclusive);
  CHECK(classify(-0.02, 1e-3) == Status::kViolated);
  CHECK(worst(Status::kHolds, Status::kViolated) == Status::kViolated);
  CHECK(worst(Status::kInconclusive, Status::kHolds) == Status::kInconclusive);
}

TEST_CASE("thm1 cauchy beta=3 r=1 f=x is an equality") {
  const auto rep = verify(make("thm1", make_cauchy(1, 3.0), {1, 3.0, 1.0}, lin()));
  CHECK(rep.lhs == doctest::Approx(2.0 / 3.0).epsilon(1e-10));
  CHECK(rep.rhs == doctest::Approx(2.0 / 3.0).epsilon(1e-10));
  CHECK(std::abs(rep.margin) < 1e-9);
  CHECK(rep.status != Status::kViolated);
}

TEST_CASE("cor16 and cor14 linear equality cases") {
  const auto a = verify(make("cor16", make_halfsphere(1, 1.0, 2.0), {1, 2.0, 0.0}, lin()));
  CHECK(a.lhs == doctest::Approx(1.0 / 7.0).epsilon(1e-10));
  CHECK(a.rhs == doctest::Approx(1.0 / 7.0).epsilon(1e-10));
  CHECK(std::abs(a.margin) < 1e-8);
  CHECK(a.parts.size() == 1);
  const auto b = verify(make("cor14", make_cauchy(1, 3.0), {1, 3.0, 0.0}, lin()));
  CHECK(b.lhs == doctest::Approx(1.0 / 3.0).epsilon(1e-10));
  CHECK(std::abs(b.margin) < 1e-8);
  CHECK(b.meta["bobkov_ledoux_constant"].get<double>() > 1.0);
  // reverse part skipped at beta = 0
  const auto c = verify(make("cor16", make_halfsphere(1, 1.0, 0.0), {1, 0.0, 0.0}, lin()));
  CHECK(c.parts.empty());
}

TEST_CASE("cor6 gaussian and laplace") {
  const auto g = verify(make("cor6", make_gaussian(1), {1, 0.0, 0.0}, lin()));
  CHECK(g.lhs == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(g.margin == doctest::Approx(0.5).epsilon(1e-8));
  CHECK(g.status == Status::kHolds);
  const auto l = verify(make("cor6", make_exp_power(1, 1.0), {1, 0.0, 0.0}, lin()));
  CHECK(std::abs(l.lhs - 1.0) < 1e-8);
  CHECK(std::abs(l.margin) < 1e-8);
}

TEST_CASE("thm1 at r=0 equals bl-dim-1") {
  const auto mu = make_cauchy(1, 3.0);
  for (const auto& f : battery(1)) {
    const auto a = verify(make("thm1", mu, {1, 3.0, 0.0}, f));
    const auto b = verify(make("bl-dim-1", mu, {1, 3.0, 0.0}, f));
    CHECK(std::abs(a.lhs - b.lhs) <= 1e-12 * std::abs(a.lhs));
    CHECK(std::abs(a.rhs - b.rhs) <= 1e-12 * std::abs(a.rhs));
  }
}

TEST_CASE("reverse hoelder equality for 1+|x|") {
  for (double beta : {2.0, 3.0, 4.0, 6.0}) {
    const auto mu = WeightedMeasure::case1(abs_potential(), beta);
    for (double r : {0.0, 0.5}) {
      if (!case1_guard({1, beta, r}).valid) continue;
      const auto rep = verify(make("rev-holder-1", mu, {1, beta, r}, lin()));
      CHECK(std::abs(rep.margin) < 1e-7);
      CHECK(rep.status != Status::kViolated);
    }
    const auto psi = verify(make("psi-3pt", mu, {1, beta, 0.0}, lin()));
    CHECK(std::abs(psi.margin) < 1e-6);
  }
  // strict on the Cauchy family
  const auto rep = verify(make("rev-holder-1", make_cauchy(1, 3.0), {1, 3.0, 0.0}, lin()));
  CHECK(rep.status == Status::kHolds);
}

TEST_CASE("C_r scan") {
  CHECK(c_r(1.0) == 4.0);
  CHECK(c_r(2.0) == 2.0);
  double mn = 1e9, mx = -1e9;
  for (int k = 0; k <= 1000; ++k) {
    const double v = c_r(1.0 + k * 1e-3);
    mn = std::min(mn, v);
    mx = std::max(mx, v);
  }
  CHECK(mn > 1.8);
  CHECK(mx <= 4.0);
  CHECK(mx == 4.0);
}

TEST_CASE("thm1 margin invariant under phi -> c phi") {
  const auto f = battery_member(1, "x1-bump");
  double margins[2];
  double errs[2];
  int k = 0;
  for (double c : {1.0, 3.7}) {
    Potential p{field::quadratic(1, c, c), DomainSpec::full_space(1), false, "c(1+x^2)"};
    const auto mu = WeightedMeasure::case1(p, 3.0);
    const auto rep = verify(make("thm1", mu, {1, 3.0, 0.5}, f));
    margins[k] = rep.margin;
    errs[k++] = rep.err;
  }
  CHECK(std::abs(margins[0] - margins[1]) <= errs[0] + errs[1] + 1e-12);
}

TEST_CASE("battery never violates thm1 and thm2") {
  struct Case {
    WeightedMeasure mu;
    ParamTriple p;
    const char* tag;
  };
  std::vector<Case> cases;
  for (double r : {-0.5, 0.0, 0.5, 1.0}) cases.push_back({make_cauchy(1, 3.5), {1, 3.5, r}, "thm1"});
  for (double r : {0.0, 0.5, 1.0}) cases.push_back({make_halfsphere(1, 1.0, 2.0), {1, 2.0, r}, "thm2"});
  for (const auto& c : cases) {
    for (const auto& f : battery(1)) {
      const auto rep = verify(make(c.tag, c.mu, c.p, f));
      INFO(c.tag << " r=" << c.p.r << " f=" << f.name << " margin=" << rep.margin << " err=" << rep.err);
      CHECK(rep.status != Status::kViolated);
      CHECK(rep.margin >= -10.0 * rep.err);
    }
  }
}

TEST_CASE("guard failures") {
  CHECK_THROWS_AS(verify(make("thm1", make_cauchy(1, 2.0), {1, 2.0, 1.0}, lin())), InvalidParametersError);
  CHECK_THROWS_AS(verify(make("thm8", make_cauchy(1, 1.5), {1, 1.5, 0.0}, lin())), InvalidParametersError);
  CHECK_THROWS_AS(verify(make("thm2", make_cauchy(1, 3.0), {1, 3.0, 0.0}, lin())), InvalidParametersError);
  CHECK_THROWS_AS(verify(make("nope", make_cauchy(1, 3.0), {1, 3.0, 0.0}, lin())), InvalidParametersError);
  // generic convex potential needs an explicit constant for thm12
  Potential p{field::quadratic(1, 1.0, 0.5), DomainSpec::full_space(1), false, "1+x^2/2"};
  const auto mu = WeightedMeasure::case1(p, 3.0);
  CHECK_THROWS_AS(verify(make("thm12", mu, {1, 3.0, 0.0}, lin())), InvalidParametersError);
  Scenario s = make("thm12", mu, {1, 3.0, 0.0}, lin());
  s.convexity = 1.0;
  CHECK(verify(s).status != Status::kViolated);
}

TEST_CASE("reverse weighted flags the asserted-only range") {
  const auto a = verify(make("rev-weighted-1", make_cauchy(1, 1.5), {1, 1.5, 0.0}, battery_member(1, "bump0")));
  CHECK(a.meta["asserted_only"].get<bool>());
  CHECK(a.status != Status::kViolated);
  const auto b = verify(make("rev-weighted-1", make_cauchy(1, 3.0), {1, 3.0, 0.0}, lin()));
  CHECK_FALSE(b.meta["asserted_only"].get<bool>());
  CHECK(b.status != Status::kViolated);
}

TEST_CASE("other registry tags hold on the battery") {
  const auto cau = make_cauchy(1, 3.0);
  const auto hs = make_halfsphere(1, 1.0, 1.5);
  const auto gauss = make_gaussian(1);
  for (const auto& f : battery(1)) {
    INFO(f.name);
    for (const char* tag : {"thm8", "rev-weighted-1", "thm12", "cor14"}) {
      CHECK(verify(make(tag, cau, {1, 3.0, 0.0}, f)).status != Status::kViolated);
    }
    for (const char* tag : {"thm9", "rev-weighted-2", "thm15", "cor16", "bl-dim-2"}) {
      CHECK(verify(make(tag, hs, {1, 1.5, 0.0}, f)).status != Status::kViolated);
    }
    CHECK(verify(make("bl-classic", gauss, {1, 0.0, 0.0}, f)).status != Status::kViolated);
  }
  CHECK(verify(make("rev-holder-2", hs, {1, 1.5, 0.5}, lin())).status == Status::kHolds);
  CHECK(verify(make("psibar-3pt", hs, {1, 1.5, 0.0}, lin())).status != Status::kViolated);
  // bl-classic linear on the Gaussian is an equality
  CHECK(std::abs(verify(make("bl-classic", gauss, {1, 0.0, 0.0}, lin())).margin) < 1e-9);
}

TEST_CASE("prop10 on the Gaussian with the rank-one form") {
  for (int n : {1, 2}) {
    const auto g = make_gaussian(n);
    for (const auto& f : battery(n)) {
      INFO(n << " " << f.name);
      const auto rep = verify(make("prop10", g, {n, n + 1.0, 0.0}, f));
      CHECK(rep.status != Status::kViolated);
      REQUIRE(rep.meta["rhs_rank_one"].is_number());
      CHECK(std::abs(rep.meta["rhs_rank_one"].get<double>() - rep.rhs) < 1e-7 * (1.0 + std::abs(rep.rhs)));
    }
  }
}

TEST_CASE("prop11 chain and chi chain") {
  for (double r : {1.0, 1.5, 2.0}) {
    const auto mu = make_exp_power(1, r);
    for (const auto& f : battery(1)) {
      INFO(r << " " << f.name);
      const auto rep = verify(make("prop11", mu, {1, 0.0, r}, f));
      CHECK(rep.status != Status::kViolated);
      CHECK(rep.parts.size() == 2);
    }
  }
  for (int n : {1, 2, 3}) {
    const auto chi = make_chi(n);
    for (const auto& f : battery(1)) {
      INFO(n << " " << f.name);
      const auto rep = verify(make("chi-n", chi, {n, 0.0, 0.0}, f));
      CHECK(rep.status != Status::kViolated);
    }
  }
}

TEST_CASE("optimized margin") {
  const auto mu = make_cauchy(1, 4.0);
  // f = phi^{r-1}: optimized LHS vanishes
  const double r = 0.0;
  ScalarField phi = field::quadratic(1, 1.0, 1.0);
  TestFunction f0 = make_test_function(
      "phi^(r-1)", 1, [](const Vector& x) { return 1.0 / (1.0 + x(0) * x(0)); },
      [](const Vector& x) {
        const double d = 1.0 + x(0) * x(0);
        return point({-2.0 * x(0) / (d * d)});
      });
  const auto a = optimized_margin(make("opt", mu, {1, 4.0, r}, f0));
  CHECK(a.R_phi < 0.0);
  CHECK(std::abs(a.S - a.R_phi) < 1e-10);
  CHECK(std::abs(a.report.lhs) < 1e-10);

  TestFunction f1 = make_test_function(
      "x+x^3/10", 1, [](const Vector& x) { return x(0) + 0.1 * x(0) * x(0) * x(0); },
      [](const Vector& x) { return point({1.0 + 0.3 * x(0) * x(0)}); });
  const auto b = optimized_margin(make("opt", mu, {1, 4.0, r}, f1));
  CHECK(b.report.lhs >= b.plain_lhs - b.report.err);
  CHECK(b.report.status != Status::kViolated);
  // odd f: S = 0, so optimized equals plain
  CHECK(std::abs(b.S) < 1e-10);

  // an even f with both means nonzero strictly strengthens
  const auto c = optimized_margin(make("opt", mu, {1, 4.0, r}, battery_member(1, "bump0")));
  CHECK(c.report.lhs > c.plain_lhs);
  CHECK(c.report.status != Status::kViolated);

  CHECK_THROWS_AS(optimized_margin(make("opt", mu, {1, 4.0, 1.0}, lin())), DegenerateDenominatorError);

  const auto hs = make_halfsphere(1, 1.0, 2.0);
  const auto d = optimized_margin(make("opt", hs, {1, 2.0, 0.5}, battery_member(1, "x1sq-bump")));
  CHECK(d.report.lhs >= d.plain_lhs - d.report.err);
  CHECK(d.report.status != Status::kViolated);
}

TEST_CASE("psi curvature") {
  for (double beta : {3.0, 4.0, 6.0}) {
    const auto pc = psi_curvature(abs_potential(), beta);
    CHECK(pc.psi_dd == doctest::Approx(1.0 / ((beta - 1.0) * (beta - 1.0))).epsilon(1e-6));
    CHECK(std::abs(pc.psi_dd / pc.bound - 1.0) < 1e-4);
    CHECK(std::isinf(pc.W));
  }
  const auto cau = psi_curvature(Potential{field::quadratic(1, 1.0, 1.0), DomainSpec::full_space(1), false, ""}, 4.0);
  CHECK(std::isfinite(cau.W));
  CHECK(cau.W == doctest::Approx(3.0 / 4.0).epsilon(1e-8));
  CHECK(cau.psi_dd <= cau.improved + cau.err);
  CHECK(cau.improved <= cau.bound);

  const double b0 = 50.0;
  ScalarField V = field::quadratic(1, 0.0, 0.5);
  Potential ph{field::exp_of(V, 1.0 / b0), DomainSpec::full_space(1), false, "exp(V/b0)"};
  const auto g = psi_curvature(ph, b0);
  CHECK(g.psi_dd * b0 * b0 == doctest::Approx(0.5).epsilon(1e-5));
  CHECK(g.psi_dd <= g.bound + g.err);
  CHECK_THROWS_AS(psi_curvature(abs_potential(), 1.5), RangeError);
}

TEST_CASE("phi concavity") {
  const auto rep = phi_concavity(abs_potential(), MeasureCase::kCase1, {3.0, 4.0, 5.0}, 0.1);
  CHECK(rep.lhs <= 1e-6);
  CHECK(rep.status != Status::kViolated);
  for (double b : {3.0, 4.5}) CHECK(std::abs(phi_case1(abs_potential(), b) - psi_big(abs_potential(), b)) < 1e-10);

  ScalarField tent = field::abs_linear(1.0, -1.0).with_domain([](const Vector& x) { return std::abs(x(0)) < 1.0; });
  Potential t{tent, DomainSpec::interval(-1.0, 1.0), true, "1-|x|"};
  const auto r2 = phi_concavity(t, MeasureCase::kCase2, {0.0, 1.0, 2.5}, 0.1);
  CHECK(r2.lhs <= 1e-9);
  CHECK(r2.status != Status::kViolated);
  CHECK(psi_bar(t, 1.0) == doctest::Approx(std::log(2.0 * 1.0)).epsilon(1e-10));

  // strictly concave in higher dimension
  const auto r3 = phi_concavity(Potential{field::quadratic(2, 1.0, 1.0), DomainSpec::full_space(2), false, ""},
                                MeasureCase::kCase1, {4.0, 6.0}, 0.5);
  CHECK(r3.status == Status::kHolds);
  const auto r4 = phi_concavity(make_halfsphere(2, 1.0, 1.0).potential(), MeasureCase::kCase2, {0.0, 1.0, 3.0}, 0.5);
  CHECK(r4.status == Status::kHolds);
}

TEST_CASE("equality witnesses") {
  const auto cau = make_cauchy(1, 4.0);
  for (double z : {1.0, -1.0}) {
    const auto rep = equality_witness(cau, {1, 4.0, 1.0}, point({z}));
    CHECK(std::abs(rep.margin) < 1e-7);
    CHECK(std::abs(rep.margin) <= 10.0 * rep.err + 1e-12);
    const auto hs = equality_witness(make_halfsphere(1, 1.0, 2.0), {1, 2.0, 1.0}, point({z}));
    CHECK(std::abs(hs.margin) < 1e-7);
  }
  const auto zero = equality_witness(cau, {1, 4.0, 1.0}, point({0.0}));
  CHECK(zero.lhs == 0.0);
  CHECK(zero.rhs == 0.0);
  // r != 1
  const auto half = equality_witness(cau, {1, 4.0, 0.5}, point({1.0}));
  CHECK(std::abs(half.margin) <= 10.0 * half.err + 1e-10);
  const auto two = equality_witness(make_cauchy(2, 4.0), {2, 4.0, 0.5}, point({1.0, -0.5}));
  CHECK(std::abs(two.margin) <= 10.0 * two.err + 1e-8);
}

TEST_CASE("local prekopa") {
  ScalarField phi = field::quadratic(1, 2.0, 1.0);
  const DomainSpec dom = DomainSpec::interval(-1.0, 1.0);
  ScalarField zero = field::constant(1, 0.0);
  for (double eps : {1e-2, 1e-3}) {
    const auto a = prekopa_local_check(phi, zero, dom, 6.0, eps);
    CHECK(std::abs(a.second_deriv_a - a.second_deriv_b) < 1e-6);
    ScalarField g = ScalarField(1, [](const Vector& x) { return 2.0 * x(0) * x(0); }).with_gradient([](const Vector& x) {
      return point({4.0 * x(0)});
    });
    const auto b = prekopa_local_check(phi, g, dom, 6.0, eps);
    CHECK(std::abs(b.second_deriv_a - b.second_deriv_b) < 1e-5);
    CHECK(b.second_deriv_a >= -b.err_a);
    CHECK(b.second_deriv_b >= -b.err_b);
  }
  CHECK_THROWS_AS(prekopa_local_check(phi, zero, dom, 6.0, 0.0), InvalidParametersError);
  CHECK_THROWS_AS(prekopa_local_check(phi, zero, DomainSpec::full_space(1), 6.0, 1e-2), InvalidParametersError);
}

TEST_CASE("brascamp-lieb limit") {
  ScalarField V = field::quadratic(1, 0.5 * std::log(2.0 * M_PI), 0.5);
  Potential p{V, DomainSpec::full_space(1), false, "x^2/2+log sqrt(2pi)"};
  const auto t = bl_limit_sweep(p, {10.0, 100.0, 1e3, 1e4}, lin());
  CHECK(std::abs(t.classical.margin) < 1e-9);
  REQUIRE(t.rows.size() == 4);
  CHECK(t.monotone);
  for (const auto& row : t.rows) CHECK(row.margin >= -10.0 * row.err);
  // linear f is an equality at every beta (phi quadratic)
  for (const auto& row : t.rows) CHECK(std::abs(row.margin) < 1e-9);
  const auto u = bl_limit_sweep(p, {10.0, 100.0, 1e3, 1e4}, battery_member(1, "cubic-bump"));
  CHECK(u.monotone);
  CHECK(std::abs(u.rows[3].margin - u.classical.margin) < 0.1 * std::abs(u.rows[0].margin - u.classical.margin));
  const auto c = bl_limit_sweep(p, {10.0, 1e3}, make_test_function(
                                                    "one", 1, [](const Vector&) { return 1.0; },
                                                    [](const Vector&) { return point({0.0}); }));
  for (const auto& row : c.rows) CHECK(std::abs(row.margin) < 1e-12);
  ScalarField neg = field::quadratic(1, -20.0, 0.5);
  CHECK_THROWS_AS(bl_limit_sweep(Potential{neg, DomainSpec::full_space(1), false, ""}, {10.0}, lin()), RangeError);
}

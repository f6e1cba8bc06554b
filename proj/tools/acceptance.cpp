// One pass/fail line per acceptance criterion, tolerances as stated there.
// Exit status 0 only when every criterion passes.

#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "varineq/catalogue.hpp"
#include "varineq/cli/config.hpp"
#include "varineq/cli/runner.hpp"
#include "varineq/dual.hpp"
#include "varineq/evolve.hpp"

using namespace varineq;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

TestFunction lin() { return battery_member(1, "lin-x1"); }

Scenario scen(const std::string& tag, const WeightedMeasure& mu, ParamTriple p, TestFunction f,
              QuadratureSpec q = {}) {
  return Scenario{tag, tag, mu, p, std::move(f), q, 0.0};
}

double gap(const ScalarField& w, const WeightedMeasure& mu, int m = 2000) {
  return spectral_gap({w, mu, default_grid(mu, m)}).lambda1;
}

void c1(Outcome& o) {
  const auto mu = make_cauchy(1, 3.0);
  const auto rep = verify(scen("cor14", mu, {1, 3.0, 0.0}, lin()));
  const double lam = gap(field::quadratic(1, 1.0, 1.0), mu);
  o.detail << "Var=" << rep.lhs << " RHS=" << rep.rhs << " margin=" << rep.margin << " lambda1=" << lam;
  o.require(std::abs(rep.lhs - 1.0 / 3.0) <= 1e-7, "Var = 1/3");
  o.require(std::abs(rep.rhs - 1.0 / 3.0) <= 1e-7, "RHS = 1/3");
  o.require(std::abs(rep.margin) <= 1e-7, "|margin| <= 1e-7");
  o.require(std::abs(lam - 4.0) <= 0.04, "lambda1 = 4 within 1%");
}

void c2(Outcome& o) {
  const auto mu = make_halfsphere(1, 1.0, 2.0);
  const auto rep = verify(scen("cor16", mu, {1, 2.0, 0.0}, lin()));
  const double lam = gap(field::quadratic(1, 1.0, -1.0), mu);
  o.detail << "LHS=" << rep.lhs << " RHS=" << rep.rhs << " lambda1=" << lam;
  o.require(std::abs(rep.lhs - 1.0 / 7.0) <= 1e-7, "LHS = 1/7");
  o.require(std::abs(rep.rhs - 1.0 / 7.0) <= 1e-7, "RHS = 1/7");
  o.require(std::abs(lam - 6.0) <= 0.06, "lambda1 = 6 within 1%");
}

void c3(Outcome& o) {
  const auto lap = verify(scen("cor6", make_exp_power(1, 1.0), {1, 0.0, 0.0}, lin()));
  const auto gau = verify(scen("cor6", make_gaussian(1), {1, 0.0, 0.0}, lin()));
  QuadratureSpec mc;
  mc.nd_strategy = NdStrategy::kMonteCarlo;
  mc.mc_samples = 400000;
  mc.seed = 2024;
  const auto two = verify(scen("cor6", make_exp_power(2, 1.0), {2, 0.0, 0.0}, battery_member(2, "lin-x1"), mc));
  o.detail << "Laplace Var(V)=" << lap.lhs << " Gaussian Var(V)=" << gau.lhs << " 2-D MC Var(V)=" << two.lhs
           << " +- " << two.err;
  o.require(std::abs(lap.lhs - 1.0) <= 1e-8, "Laplace Var(V) = 1");
  o.require(std::abs(gau.lhs - 0.5) <= 1e-8, "Gaussian Var(V) = 1/2");
  o.require(two.err > 0.0 && std::abs(two.lhs - 2.0) <= 4.0 * two.err, "2-D Var(V) = 2 within 4 SE");
}

void c4(Outcome& o) {
  Potential p{field::abs_linear(1.0, 1.0), DomainSpec::full_space(1), false, "1+|x|"};
  double worst_psi = 0.0, worst_36 = 0.0;
  for (double beta : {2.0, 3.0, 4.0, 6.0}) {
    const double d2 = psi_big(p, beta) + psi_big(p, beta + 2.0) - 2.0 * psi_big(p, beta + 1.0);
    worst_psi = std::max(worst_psi, std::abs(d2));
    const double a = power_mass(p, MeasureCase::kCase1, beta).value;
    const double b = power_mass(p, MeasureCase::kCase1, beta + 1.0).value;
    const double c = power_mass(p, MeasureCase::kCase1, beta + 2.0).value;
    const double n = 1.0;
    const double k = beta * (beta - n + 1.0) / ((beta + 1.0) * (beta - n));
    worst_36 = std::max(worst_36, std::abs(k - a * c / (b * b)));
  }
  o.detail << "max |Psi 2nd diff|=" << worst_psi << " max |(3pt moment) margin|=" << worst_36;
  o.require(worst_psi <= 1e-6, "Psi second differences = 0 within 1e-6");
  o.require(worst_36 <= 1e-7, "moment-ratio margin = 0 within 1e-7");
}

void c5(Outcome& o) {
  for (double r : {0.0, 0.5, 1.0}) {
    const DualProblem p{field::quadratic(1, 2.0, 1.0), 6.0, r, lin().f};
    const auto st = refine_decomposition(p, -1.0, 1.0, {251, 501, 1001, 2001});
    o.detail << " r=" << r << " orders";
    for (double ord : st.orders) {
      o.detail << " " << ord;
      o.require(std::abs(ord - 2.0) <= 0.3, "order 2.0 +- 0.3 at r=" + std::to_string(r));
    }
  }
}

void c6(Outcome& o, const std::string& suite) {
  const auto cfg = cli::load_config(suite);
  cli::RunOptions opt;
  const auto results = cli::execute(cfg, "verify", opt);
  long reports = 0, witnesses = 0;
  for (const auto& r : results) {
    if (r.status == "violated" || r.status == "error" || r.status == "skipped" || r.status == "invalid-parameters")
      o.require(false, r.id + " status " + r.status);
    for (const auto& j : r.reports) {
      ++reports;
      const double margin = j["margin"].get<double>(), err = j["err"].get<double>();
      o.require(j["status"] != "violated", j["id"].get<std::string>() + " violated");
      o.require(margin >= -10.0 * err, j["id"].get<std::string>() + " margin below -10 err");
    }
  }
  // equality witnesses for both theorems
  const auto cau = make_cauchy(1, 4.0);
  const auto hs = make_halfsphere(1, 1.0, 2.0);
  for (double z : {1.0, -1.0}) {
    for (double r : {0.0, 0.5, 1.0}) {
      for (const auto& w : {equality_witness(cau, {1, 4.0, r}, point({z})), equality_witness(hs, {1, 2.0, r}, point({z}))}) {
        ++witnesses;
        o.require(std::abs(w.margin) <= 10.0 * w.err, "witness margin within 10 err");
      }
    }
  }
  o.detail << results.size() << " verify jobs, " << reports << " reports, " << witnesses << " witnesses";
}

void c7(Outcome& o) {
  const auto p = make_sphere_evolution(1.0, 2.0, 2000);
  const auto op = evolution_operator(p);
  const auto ts = evolve(p, op.sample(lin().f));
  for (double t : {0.05, 0.1, 0.2, 0.5}) {
    const auto k = ts.at(t);
    const double ratio = ts.var[k] / (std::exp(-12.0 * t) * ts.var[0]);
    o.detail << " t=" << ts.t[k] << " ratio=" << ratio;
    o.require(std::abs(ts.t[k] - t) < 1e-12, "time grid hits t");
    o.require(std::abs(ratio - 1.0) <= 1e-3, "ratio within 1e-3");
  }
}

void c8(Outcome& o) {
  double lo = 1e300;
  for (double r : cli::parse_grid("1:2:0.01")) lo = std::min(lo, c_r(r));
  o.detail << "C_1=" << c_r(1.0) << " C_2=" << c_r(2.0) << " min=" << lo;
  o.require(c_r(1.0) == 4.0, "C_1 = 4 exactly");
  o.require(c_r(2.0) == 2.0, "C_2 = 2");
  o.require(lo > 1.8 && lo <= 4.0, "min in (1.8, 4]");
  long n = 0;
  for (double r : {1.0, 1.5, 2.0}) {
    const auto mu = make_exp_power(1, r);
    for (const auto& f : battery(1)) {
      const auto rep = verify(scen("prop11", mu, {1, 0.0, r}, f));
      ++n;
      o.require(rep.status != Status::kViolated, "prop11 r=" + std::to_string(r) + " " + f.name);
      for (const auto& part : rep.parts) o.require(part.status != Status::kViolated, "prop11 link " + part.name);
    }
  }
  o.detail << " prop11 reports=" << n;
}

void c9(Outcome& o) {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> N(0.0, 1.0);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const int n = 2 + k % 5;
    Matrix B(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) B(i, j) = N(rng);
    const Matrix A = B * B.transpose() + 0.1 * Matrix::Identity(n, n);
    Vector a(n);
    for (int i = 0; i < n; ++i) a(i) = N(rng);
    const Matrix P = rank_one_inverse(A, a) * (A + a * a.transpose());
    worst = std::max(worst, (P - Matrix::Identity(n, n)).cwiseAbs().maxCoeff());
  }
  o.detail << "multiply-back=" << worst;
  o.require(worst <= 1e-10, "multiply-back <= 1e-10");
  long reps = 0;
  for (int n : {1, 2}) {
    const auto g = make_gaussian(n);
    for (const auto& f : battery(n)) {
      const auto rep = verify(scen("prop10", g, {n, n + 1.0, 0.0}, f));
      ++reps;
      o.require(rep.status != Status::kViolated, "prop10 n=" + std::to_string(n) + " " + f.name);
    }
  }
  for (int n : {1, 2, 3}) {
    const auto chi = make_chi(n);
    for (const auto& f : battery(1)) {
      const auto rep = verify(scen("chi-n", chi, {n, 0.0, 0.0}, f));
      ++reps;
      o.require(rep.status != Status::kViolated, "chi chain n=" + std::to_string(n) + " " + f.name);
    }
  }
  o.detail << " prop10/chi reports=" << reps;
}

void c10(Outcome& o) {
  const ScalarField phi = field::quadratic(1, 2.0, 1.0);
  const ScalarField g = ScalarField(1, [](const Vector& x) { return 2.0 * x(0) * x(0); }).with_gradient([](const Vector& x) {
    return point({4.0 * x(0)});
  });
  for (double eps : {1e-2, 1e-3}) {
    const auto c = prekopa_local_check(phi, g, DomainSpec::interval(-1.0, 1.0), 6.0, eps);
    o.detail << " eps=" << eps << " a=" << c.second_deriv_a << " b=" << c.second_deriv_b;
    o.require(std::abs(c.second_deriv_a - c.second_deriv_b) <= 1e-5, "two paths agree within 1e-5");
    o.require(c.second_deriv_a >= -c.err_a && c.second_deriv_b >= -c.err_b, "nonnegative");
  }
}

}  // namespace

int main(int argc, char** argv) {
  const std::string suite = argc > 1 ? argv[1] : VARINEQ_DEFAULT_SUITE;
  const std::vector<std::pair<const char*, std::function<void(Outcome&)>>> criteria = {
      {"sharp Cauchy Poincare", c1},
      {"sharp sphere Poincare", c2},
      {"Var(V) <= n equality", c3},
      {"reverse Hoelder equality class", c4},
      {"Hoermander identity refinement", c5},
      {"inequality battery", [&suite](Outcome& o) { c6(o, suite); }},
      {"semigroup decay", c7},
      {"C_r constant and chain", c8},
      {"rank-one identity, prop10, chi chain", c9},
      {"local Prekopa", c10},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    o.detail.precision(10);
    try {
      criteria[i].second(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " [exception: " << e.what() << "]";
    }
    if (!o.pass) ++failed;
    std::printf("criterion %2zu %-40s %s  %s\n", i + 1, criteria[i].first, o.pass ? "PASS" : "FAIL", o.detail.str().c_str());
    std::fflush(stdout);
  }
  std::printf("%s: %d of %zu criteria passed\n", failed ? "FAIL" : "PASS", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed ? 1 : 0;
}

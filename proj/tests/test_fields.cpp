#include <doctest.h>

#include <cmath>
#include <random>

#include "varineq/fields.hpp"

using namespace varineq;

namespace {

Matrix random_spd(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> N(0.0, 1.0);
  Matrix B(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) B(i, j) = N(rng);
  return B * B.transpose() + 0.5 * Matrix::Identity(n, n);
}

Vector random_vec(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> N(0.0, 1.0);
  Vector v(n);
  for (int i = 0; i < n; ++i) v(i) = N(rng);
  return v;
}

ScalarField numeric_only(const ScalarField& f) {
  return ScalarField(f.dim(), [f](const Vector& x) { return f(x); });
}

}  // namespace

TEST_CASE("eval_grad examples") {
  const auto sq = field::squared_norm(2);
  const Vector g = eval_grad(sq, point({1.0, 2.0}));
  CHECK(g(0) == doctest::Approx(2.0));
  CHECK(g(1) == doctest::Approx(4.0));
  const Vector g0 = eval_grad(field::quadratic(2, 1.0, 1.0), Vector::Zero(2));
  CHECK(g0.norm() == 0.0);
  ScalarField e(1, [](const Vector& x) { return std::exp(x(0)); });
  CHECK(std::abs(eval_grad(e, point({0.0}), 1e-4)(0) - 1.0) < 1e-8);
}

TEST_CASE("eval_hess examples") {
  const Matrix H = eval_hess(field::quadratic(2, 1.0, 1.0), point({0.3, -2.0}));
  CHECK((H - 2.0 * Matrix::Identity(2, 2)).norm() < 1e-14);
  const Matrix Hs = eval_hess(field::quadratic(2, 4.0, -1.0), point({0.3, 0.1}));
  CHECK((Hs + 2.0 * Matrix::Identity(2, 2)).norm() < 1e-14);
  // (1+x²)³ has second derivative 6(1+x²)(1+5x²), which is 72 at x = 1.
  ScalarField cube(1, [](const Vector& x) { return std::pow(1.0 + x(0) * x(0), 3); });
  CHECK(std::abs(eval_hess(cube, point({1.0}))(0, 0) - 72.0) < 1e-5);
}

TEST_CASE("numeric Hessian of a 2-D field is symmetric and accurate") {
  ScalarField f(2, [](const Vector& x) { return std::exp(x(0) * x(1)) + x(0) * x(0) * x(1); });
  const Vector x = point({0.4, -0.7});
  const Matrix H = eval_hess(f, x);
  const double e = std::exp(x(0) * x(1));
  CHECK(H(0, 1) == H(1, 0));
  CHECK(std::abs(H(0, 0) - (x(1) * x(1) * e + 2 * x(1))) < 1e-5);
  CHECK(std::abs(H(0, 1) - ((1 + x(0) * x(1)) * e + 2 * x(0))) < 1e-5);
  CHECK(std::abs(H(1, 1) - x(0) * x(0) * e) < 1e-5);
}

TEST_CASE("gradient outside the domain is a domain error") {
  auto f = field::quadratic(1, 1.0, -1.0).with_domain([](const Vector& x) { return std::abs(x(0)) < 1.0; });
  CHECK_THROWS_AS(eval_grad(f, point({2.0})), DomainError);
  CHECK_THROWS_AS(eval_hess(numeric_only(f).with_domain([](const Vector& x) { return std::abs(x(0)) < 1.0; }),
                            point({1.0 - 1e-9})),
                  DomainError);
}

TEST_CASE("numeric derivatives converge at second order") {
  ScalarField f(1, [](const Vector& x) { return std::sin(x(0)) * std::exp(x(0)); });
  const double x0 = 0.7;
  const double exact = std::exp(x0) * (std::sin(x0) + std::cos(x0));
  const double e1 = std::abs(eval_grad(f, point({x0}), 1e-2)(0) - exact);
  const double e2 = std::abs(eval_grad(f, point({x0}), 5e-3)(0) - exact);
  CHECK(std::log2(e1 / e2) == doctest::Approx(2.0).epsilon(0.05));
  const double exact2 = 2.0 * std::exp(x0) * std::cos(x0);
  const double h1 = std::abs(eval_hess(f, point({x0}), 1e-2)(0, 0) - exact2);
  const double h2 = std::abs(eval_hess(f, point({x0}), 5e-3)(0, 0) - exact2);
  CHECK(std::log2(h1 / h2) == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("analytic derivatives agree with finite differences") {
  const auto f = field::power_sum(2, 1.5, 1.0);
  const auto fn = numeric_only(f);
  const Vector x = point({0.8, -1.3});
  CHECK((eval_grad(f, x) - eval_grad(fn, x)).norm() < 1e-8);
  CHECK((eval_hess(f, x) - eval_hess(fn, x)).norm() < 1e-5);
}

TEST_CASE("hess_inv_quadform examples") {
  CHECK(hess_inv_quadform(2.0 * Matrix::Identity(2, 2), point({1, 1})) == doctest::Approx(1.0));
  Matrix D = Matrix::Zero(2, 2);
  D(0, 0) = 1;
  D(1, 1) = 4;
  CHECK(hess_inv_quadform(D, point({2, 2})) == doctest::Approx(5.0));
  std::mt19937_64 rng(7);
  for (int k = 0; k < 20; ++k) {
    const Matrix A = random_spd(rng, 3);
    const Vector w = random_vec(rng, 3);
    const Vector y = A.fullPivLu().solve(w);
    CHECK(std::abs(hess_inv_quadform(A, w) - y.dot(w)) < 1e-12 * std::max(1.0, y.dot(w)));
  }
  Matrix S = Matrix::Identity(2, 2);
  S(1, 1) = -1;
  CHECK_THROWS_AS(hess_inv_quadform(S, point({1, 1})), SingularHessianError);
  CHECK_THROWS_AS(hess_inv_quadform(Matrix::Zero(2, 2), point({1, 1})), SingularHessianError);
}

TEST_CASE("rank_one_inverse") {
  const Matrix I2 = Matrix::Identity(2, 2);
  const Matrix R = rank_one_inverse(I2, point({1, 0}));
  CHECK(R(0, 0) == doctest::Approx(0.5));
  CHECK(R(1, 1) == doctest::Approx(1.0));
  CHECK(std::abs(R(0, 1)) < 1e-15);
  std::mt19937_64 rng(11);
  const Matrix A = random_spd(rng, 3);
  CHECK((rank_one_inverse(A, Vector::Zero(3)) - A.inverse()).norm() < 1e-12);
  for (int k = 0; k < 20; ++k) {
    const Matrix B = random_spd(rng, 4);
    const Vector a = random_vec(rng, 4);
    const Matrix P = rank_one_inverse(B, a) * (B + a * a.transpose());
    CHECK((P - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-10);
  }
  Matrix S = -Matrix::Identity(2, 2);
  CHECK_THROWS_AS(rank_one_inverse(S, point({1, 0})), SingularHessianError);
}

TEST_CASE("modified_hessian examples") {
  const auto V = field::quadratic(2, 0.0, 0.5);
  const Matrix W = modified_hessian(V, point({1, 0}), 2.0);
  CHECK(W(0, 0) == doctest::Approx(1.5));
  CHECK(W(1, 1) == doctest::Approx(1.0));
  CHECK(std::abs(W(0, 1)) < 1e-14);
  CHECK(modified_hessian(field::constant(2, 3.0), point({1, 2}), 1.0).norm() == 0.0);
  CHECK(modified_hessian(field::power_sum(1, 1.5), point({1.0}), 2.0)(0, 0) == doctest::Approx(1.0));
  CHECK_THROWS_AS(modified_hessian(V, point({1, 0}), 0.0), InvalidParametersError);
}

TEST_CASE("pointwise dual bound and trace bound") {
  std::mt19937_64 rng(3);
  for (int k = 0; k < 200; ++k) {
    const int n = 1 + k % 5;
    const Matrix H = random_spd(rng, n);
    const Vector v = random_vec(rng, n), w = random_vec(rng, n);
    CHECK(2 * v.dot(w) - v.dot(H * v) <= hess_inv_quadform(H, w) + 1e-12);
    Matrix Q(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j <= i; ++j) Q(i, j) = Q(j, i) = random_vec(rng, 1)(0);
    CHECK(Q.trace() * Q.trace() <= n * Q.squaredNorm() + 1e-12);
  }
}

TEST_CASE("kink flagging") {
  const auto f = field::power_sum(1, 1.5);
  CHECK(probe(f, point({1e-9})).flagged);
  CHECK_FALSE(probe(f, point({0.5})).flagged);
  CHECK(probe(f, point({1e-9})).grad.norm() == 0.0);
}

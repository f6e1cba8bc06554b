#include "varineq/battery.hpp"

#include <cmath>

namespace varineq {

namespace {

// P(x)·exp(−|x − c·e₁|²/(2s²)); s = 0 means no bump.
struct Piece {
  std::function<double(const Vector&)> p;
  std::function<Vector(const Vector&)> dp;
  double c = 0.0;
  double s = 0.0;
};

TestFunction bumped(std::string name, int dim, Piece pc, bool poly = false) {
  auto bump = [pc](const Vector& x) {
    if (pc.s == 0.0) return 1.0;
    Vector d = x;
    d(0) -= pc.c;
    return std::exp(-d.squaredNorm() / (2.0 * pc.s * pc.s));
  };
  ScalarField f(dim, [pc, bump](const Vector& x) { return pc.p(x) * bump(x); });
  f = f.with_gradient([pc, bump](const Vector& x) {
    const double b = bump(x);
    Vector g = pc.dp(x) * b;
    if (pc.s != 0.0) {
      Vector d = x;
      d(0) -= pc.c;
      g -= pc.p(x) * b * d / (pc.s * pc.s);
    }
    return g;
  });
  return TestFunction{std::move(name), std::move(f), poly};
}

Vector unit(int dim, int i, double v = 1.0) {
  Vector e = Vector::Zero(dim);
  e(i) = v;
  return e;
}

}  // namespace

TestFunction make_test_function(std::string name, int dim, ScalarField::ValueFn f, ScalarField::GradFn g) {
  return TestFunction{std::move(name), ScalarField(dim, std::move(f)).with_gradient(std::move(g)), false};
}

std::vector<TestFunction> battery(int dim) {
  if (dim < 1 || dim > kMaxDim) throw UnsupportedDimensionError("battery dimension out of range");
  const int n = dim;
  const int j = n > 1 ? 1 : 0;  // second coordinate, or x₁ again in 1-D
  const double rn = 1.0 / std::sqrt(static_cast<double>(n));
  std::vector<TestFunction> out;

  out.push_back(bumped("lin-x1", n, {[](const Vector& x) { return x(0); }, [n](const Vector&) { return unit(n, 0); }}, true));
  out.push_back(bumped("lin-diag", n,
                       {[rn](const Vector& x) { return x.sum() * rn; },
                        [n, rn](const Vector&) { return Vector(Vector::Constant(n, rn)); }},
                       true));
  out.push_back(bumped("affine", n,
                       {[](const Vector& x) { return 1.0 + 0.5 * x(0); }, [n](const Vector&) { return unit(n, 0, 0.5); }},
                       true));
  out.push_back(bumped("bump0", n, {[](const Vector&) { return 1.0; }, [n](const Vector&) { return Vector(Vector::Zero(n)); }, 0.0, 1.0}));
  out.push_back(bumped("bump-shift", n,
                       {[](const Vector&) { return 1.0; }, [n](const Vector&) { return Vector(Vector::Zero(n)); }, 0.5, 0.6}));
  out.push_back(bumped("x1-bump", n,
                       {[](const Vector& x) { return x(0); }, [n](const Vector&) { return unit(n, 0); }, 0.0, std::sqrt(2.0)}));
  out.push_back(bumped("x1sq-bump", n,
                       {[](const Vector& x) { return x(0) * x(0); }, [n](const Vector& x) { return unit(n, 0, 2.0 * x(0)); }, 0.0,
                        1.0}));
  out.push_back(bumped("cubic-bump", n,
                       {[](const Vector& x) { return x(0) * x(0) * x(0) - x(0); },
                        [n](const Vector& x) { return unit(n, 0, 3.0 * x(0) * x(0) - 1.0); }, 0.0, std::sqrt(1.5)}));
  out.push_back(bumped("mixed-bump", n,
                       {[j](const Vector& x) { return x(0) + 0.7 * x(j) * x(j); },
                        [n, j](const Vector& x) {
                          Vector g = unit(n, 0);
                          g(j) += 1.4 * x(j);
                          return g;
                        },
                        0.3, 0.8}));
  out.push_back(bumped("narrow-bump", n,
                       {[](const Vector&) { return 1.0; }, [n](const Vector&) { return Vector(Vector::Zero(n)); }, 0.2, 0.25}));

  // x₁ + 0.5·exp(−|x|²): sum of a polynomial and a bump
  out.push_back(make_test_function(
      "lin-plus-bump", n, [](const Vector& x) { return x(0) + 0.5 * std::exp(-x.squaredNorm()); },
      [n](const Vector& x) {
        Vector g = -x * std::exp(-x.squaredNorm());
        g(0) += 1.0;
        return g;
      }));
  out.back().polynomial = true;

  out.push_back(bumped("quartic-bump", n,
                       {[](const Vector& x) {
                          const double u = x(0);
                          return 1.0 - 2.0 * u * u + 0.5 * u * u * u * u;
                        },
                        [n](const Vector& x) {
                          const double u = x(0);
                          return unit(n, 0, -4.0 * u + 2.0 * u * u * u);
                        },
                        0.0, 1.0}));
  return out;
}

TestFunction battery_member(int dim, const std::string& name) {
  for (auto& t : battery(dim)) {
    if (t.name == name) return t;
  }
  throw InvalidParametersError("unknown battery function '" + name + "'");
}

}  // namespace varineq

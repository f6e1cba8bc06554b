#include "varineq/fields.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace varineq {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

void require_inside(const ScalarField& f, const Vector& x) {
  if (!f.inside(x)) {
    std::ostringstream os;
    os << "point outside field domain: (" << x.transpose() << ")";
    throw DomainError(os.str());
  }
}

double step_for(double h, double xi, bool second) {
  if (h > 0.0) return h;
  return second ? default_hessian_step(xi) : default_gradient_step(xi);
}

}  // namespace

Vector point(std::initializer_list<double> coords) {
  Vector v(static_cast<Eigen::Index>(coords.size()));
  Eigen::Index i = 0;
  for (double c : coords) v(i++) = c;
  return v;
}

ScalarField::ScalarField(int dim, ValueFn value) : dim_(dim), value_(std::move(value)) {
  if (dim < 1 || dim > kMaxDim) throw UnsupportedDimensionError("field dimension out of range");
}

ScalarField ScalarField::with_gradient(GradFn grad) const {
  ScalarField out = *this;
  out.grad_ = std::move(grad);
  return out;
}

ScalarField ScalarField::with_hessian(HessFn hess) const {
  ScalarField out = *this;
  out.hess_ = std::move(hess);
  return out;
}

ScalarField ScalarField::with_domain(DomainFn inside) const {
  ScalarField out = *this;
  out.inside_ = std::move(inside);
  return out;
}

ScalarField ScalarField::with_kinks(std::vector<double> kinks) const {
  ScalarField out = *this;
  out.kinks_ = std::move(kinks);
  return out;
}

bool ScalarField::near_kink(const Vector& x, double tol) const {
  for (double k : kinks_) {
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      if (std::abs(x(i) - k) <= tol) return true;
    }
  }
  return false;
}

double default_gradient_step(double xi) {
  return std::cbrt(kEps) * std::max(1.0, std::abs(xi));
}

double default_hessian_step(double xi) {
  return std::pow(kEps, 0.25) * std::max(1.0, std::abs(xi));
}

Vector eval_grad(const ScalarField& field, const Vector& x, double h) {
  require_inside(field, x);
  if (field.has_gradient()) return field.gradient_fn()(x);
  const int n = field.dim();
  Vector g(n);
  Vector xp = x;
  for (int i = 0; i < n; ++i) {
    const double hi = step_for(h, x(i), false);
    xp(i) = x(i) + hi;
    require_inside(field, xp);
    const double fp = field(xp);
    xp(i) = x(i) - hi;
    require_inside(field, xp);
    const double fm = field(xp);
    xp(i) = x(i);
    g(i) = (fp - fm) / (2.0 * hi);
  }
  return g;
}

Matrix eval_hess(const ScalarField& field, const Vector& x, double h) {
  require_inside(field, x);
  if (field.has_hessian()) {
    Matrix H = field.hessian_fn()(x);
    return 0.5 * (H + H.transpose());
  }
  const int n = field.dim();
  Matrix H(n, n);
  Vector xp = x;
  if (field.has_gradient()) {
    // Central differences of the analytic gradient.
    for (int i = 0; i < n; ++i) {
      const double hi = step_for(h, x(i), false);
      xp(i) = x(i) + hi;
      require_inside(field, xp);
      const Vector gp = field.gradient_fn()(xp);
      xp(i) = x(i) - hi;
      require_inside(field, xp);
      const Vector gm = field.gradient_fn()(xp);
      xp(i) = x(i);
      H.col(i) = (gp - gm) / (2.0 * hi);
    }
    return 0.5 * (H + H.transpose());
  }
  const double f0 = field(x);
  std::vector<double> steps(n);
  for (int i = 0; i < n; ++i) steps[i] = step_for(h, x(i), true);
  for (int i = 0; i < n; ++i) {
    const double hi = steps[i];
    xp(i) = x(i) + hi;
    require_inside(field, xp);
    const double fp = field(xp);
    xp(i) = x(i) - hi;
    require_inside(field, xp);
    const double fm = field(xp);
    xp(i) = x(i);
    H(i, i) = (fp - 2.0 * f0 + fm) / (hi * hi);
    for (int j = i + 1; j < n; ++j) {
      const double hj = steps[j];
      double acc = 0.0;
      for (int si : {1, -1}) {
        for (int sj : {1, -1}) {
          xp(i) = x(i) + si * hi;
          xp(j) = x(j) + sj * hj;
          require_inside(field, xp);
          acc += si * sj * field(xp);
        }
      }
      xp(i) = x(i);
      xp(j) = x(j);
      H(i, j) = H(j, i) = acc / (4.0 * hi * hj);
    }
  }
  return H;
}

FieldProbe probe(const ScalarField& field, const Vector& x, bool want_hessian) {
  FieldProbe p;
  p.value = field(x);
  p.flagged = field.near_kink(x);
  const int n = field.dim();
  if (p.flagged) {
    p.grad = Vector::Zero(n);
    p.hess = Matrix::Zero(n, n);
    return p;
  }
  p.grad = eval_grad(field, x);
  p.hess = want_hessian ? eval_hess(field, x) : Matrix::Zero(n, n);
  return p;
}

namespace {

// Returns the Cholesky factor when H passes the positive-definiteness test.
std::optional<Eigen::LLT<Matrix>> factor_spd(const Matrix& H) {
  const Matrix S = 0.5 * (H + H.transpose());
  Eigen::LLT<Matrix> llt(S);
  if (llt.info() != Eigen::Success) return std::nullopt;
  const double scale = S.norm();
  const auto diag = llt.matrixLLT().diagonal();
  for (Eigen::Index i = 0; i < diag.size(); ++i) {
    const double pivot = diag(i) * diag(i);
    if (!(pivot > 1e-12 * scale)) return std::nullopt;
  }
  return llt;
}

}  // namespace

bool is_positive_definite(const Matrix& H) { return factor_spd(H).has_value(); }

double hess_inv_quadform(const Matrix& H, const Vector& w) {
  const auto llt = factor_spd(H);
  if (!llt) throw SingularHessianError("matrix is not positive definite");
  const Vector y = llt->matrixL().solve(w);
  return y.squaredNorm();
}

Matrix rank_one_inverse(const Matrix& A, const Vector& a) {
  const auto llt = factor_spd(A);
  if (!llt) throw SingularHessianError("rank-one update base is not positive definite");
  const Eigen::Index n = A.rows();
  const Matrix Ainv = llt->solve(Matrix::Identity(n, n));
  const Vector Aa = llt->solve(a);
  return Ainv - (Aa * Aa.transpose()) / (1.0 + Aa.dot(a));
}

Matrix modified_hessian(const ScalarField& V, const Vector& x, double beta) {
  if (!(beta > 0.0)) throw InvalidParametersError("modified_hessian needs beta > 0");
  const Vector g = eval_grad(V, x);
  return eval_hess(V, x) + (g * g.transpose()) / beta;
}

namespace field {

ScalarField squared_norm(int dim) { return quadratic(dim, 0.0, 1.0); }

ScalarField quadratic(int dim, double c, double s) {
  return ScalarField(dim, [c, s](const Vector& x) { return c + s * x.squaredNorm(); })
      .with_gradient([s](const Vector& x) -> Vector { return 2.0 * s * x; })
      .with_hessian([s, dim](const Vector&) -> Matrix {
        return 2.0 * s * Matrix::Identity(dim, dim);
      });
}

ScalarField abs_linear(double c, double s) {
  return ScalarField(1, [c, s](const Vector& x) { return c + s * std::abs(x(0)); })
      .with_gradient([s](const Vector& x) -> Vector {
        Vector g(1);
        g(0) = x(0) > 0 ? s : (x(0) < 0 ? -s : 0.0);
        return g;
      })
      .with_hessian([](const Vector&) -> Matrix { return Matrix::Zero(1, 1); })
      .with_kinks({0.0});
}

ScalarField power_sum(int dim, double r, double shift) {
  ScalarField f =
      ScalarField(dim,
                  [r, shift](const Vector& x) {
                    double s = shift;
                    for (Eigen::Index i = 0; i < x.size(); ++i) s += std::pow(std::abs(x(i)), r) / r;
                    return s;
                  })
          .with_gradient([r](const Vector& x) -> Vector {
            Vector g(x.size());
            for (Eigen::Index i = 0; i < x.size(); ++i) {
              const double a = std::abs(x(i));
              const double sgn = x(i) > 0 ? 1.0 : (x(i) < 0 ? -1.0 : 0.0);
              g(i) = sgn * std::pow(a, r - 1.0);
            }
            return g;
          })
          .with_hessian([r](const Vector& x) -> Matrix {
            Matrix H = Matrix::Zero(x.size(), x.size());
            for (Eigen::Index i = 0; i < x.size(); ++i) {
              H(i, i) = r == 2.0 ? 1.0 : (r - 1.0) * std::pow(std::abs(x(i)), r - 2.0);
            }
            return H;
          });
  if (r < 2.0) f = f.with_kinks({0.0});
  return f;
}

ScalarField constant(int dim, double c) {
  return ScalarField(dim, [c](const Vector&) { return c; })
      .with_gradient([dim](const Vector&) -> Vector { return Vector::Zero(dim); })
      .with_hessian([dim](const Vector&) -> Matrix { return Matrix::Zero(dim, dim); });
}

ScalarField polynomial(std::vector<double> coeffs) {
  auto horner = [](const std::vector<double>& c, double x) {
    double acc = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
    return acc;
  };
  std::vector<double> d1, d2;
  for (std::size_t k = 1; k < coeffs.size(); ++k) d1.push_back(static_cast<double>(k) * coeffs[k]);
  for (std::size_t k = 1; k < d1.size(); ++k) d2.push_back(static_cast<double>(k) * d1[k]);
  return ScalarField(1, [coeffs, horner](const Vector& x) { return horner(coeffs, x(0)); })
      .with_gradient([d1, horner](const Vector& x) -> Vector {
        Vector g(1);
        g(0) = horner(d1, x(0));
        return g;
      })
      .with_hessian([d2, horner](const Vector& x) -> Matrix {
        Matrix H(1, 1);
        H(0, 0) = horner(d2, x(0));
        return H;
      });
}

ScalarField exp_of(const ScalarField& F, double s) {
  ScalarField out = ScalarField(F.dim(), [F, s](const Vector& x) { return std::exp(s * F(x)); })
                        .with_gradient([F, s](const Vector& x) -> Vector {
                          return s * std::exp(s * F(x)) * eval_grad(F, x);
                        })
                        .with_hessian([F, s](const Vector& x) -> Matrix {
                          const Vector g = eval_grad(F, x);
                          return std::exp(s * F(x)) * (s * eval_hess(F, x) + s * s * g * g.transpose());
                        })
                        .with_kinks(F.kinks());
  return out;
}

}  // namespace field

}  // namespace varineq

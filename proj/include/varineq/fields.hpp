#pragma once

// Scalar fields with derivative access and the small dense linear algebra
// used by every inequality: Hessian-inverse quadratic forms, rank-one
// inverse updates and the modified Hessian D²V + ∇V⊗∇V/β.

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <vector>

#include "varineq/errors.hpp"

namespace varineq {

/// Largest dimension handled anywhere in the toolkit (Monte Carlo limit).
inline constexpr int kMaxDim = 10;

using Vector = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;
using Matrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kMaxDim, kMaxDim>;

/// Convenience constructor for a point with the given coordinates.
Vector point(std::initializer_list<double> coords);

/// A point-evaluable real function on (a subset of) Rⁿ.
///
/// Analytic gradients and Hessians are optional; when absent the free
/// functions `eval_grad` / `eval_hess` fall back to central differences.
/// Kinks are coordinate values k such that the field may be non-smooth on
/// the hyperplanes {x_i = k}; quadrature splits there and derivative probes
/// within 1e-8 of a kink are flagged.
///
/// Fields are immutable values; the stored callables must be pure so that
/// one field can be evaluated from several threads at once.
class ScalarField {
 public:
  using ValueFn = std::function<double(const Vector&)>;
  using GradFn = std::function<Vector(const Vector&)>;
  using HessFn = std::function<Matrix(const Vector&)>;
  using DomainFn = std::function<bool(const Vector&)>;

  ScalarField(int dim, ValueFn value);

  ScalarField with_gradient(GradFn grad) const;
  ScalarField with_hessian(HessFn hess) const;
  /// Restricts the field to the open set where `inside` is true.
  ScalarField with_domain(DomainFn inside) const;
  ScalarField with_kinks(std::vector<double> kinks) const;

  int dim() const noexcept { return dim_; }
  double operator()(const Vector& x) const { return value_(x); }

  bool has_gradient() const noexcept { return static_cast<bool>(grad_); }
  bool has_hessian() const noexcept { return static_cast<bool>(hess_); }
  const GradFn& gradient_fn() const noexcept { return grad_; }
  const HessFn& hessian_fn() const noexcept { return hess_; }

  bool inside(const Vector& x) const { return !inside_ || inside_(x); }
  const std::vector<double>& kinks() const noexcept { return kinks_; }
  /// True when some coordinate of x lies within `tol` of a kink.
  bool near_kink(const Vector& x, double tol = 1e-8) const;

 private:
  int dim_;
  ValueFn value_;
  GradFn grad_;
  HessFn hess_;
  DomainFn inside_;
  std::vector<double> kinks_;
};

/// Value, gradient and Hessian at one point. `flagged` marks points within
/// 1e-8 of a kink, whose derivatives are meaningless.
struct FieldProbe {
  double value = 0.0;
  Vector grad;
  Matrix hess;
  bool flagged = false;
};

/// Default central-difference step for first derivatives at coordinate xi:
/// ε^{1/3}·max(1,|xi|).
double default_gradient_step(double xi);
/// Default step for second differences: ε^{1/4}·max(1,|xi|).
double default_hessian_step(double xi);

/// Gradient of `field` at x; analytic if available, else central
/// differences. `h <= 0` selects the default per-coordinate step.
/// Throws DomainError when x (or a stencil point) is outside the domain.
Vector eval_grad(const ScalarField& field, const Vector& x, double h = 0.0);

/// Symmetric Hessian of `field` at x. Numeric Hessians are symmetrized.
Matrix eval_hess(const ScalarField& field, const Vector& x, double h = 0.0);

/// Value, gradient and Hessian together, with kink flagging.
FieldProbe probe(const ScalarField& field, const Vector& x, bool want_hessian = true);

/// Decides positive-definiteness the way every routine here does:
/// Cholesky succeeds and the smallest pivot exceeds 1e-12·‖H‖.
bool is_positive_definite(const Matrix& H);

/// ⟨H⁻¹w, w⟩ through a Cholesky factorization (never an explicit inverse).
/// Throws SingularHessianError when H is not positive definite.
double hess_inv_quadform(const Matrix& H, const Vector& w);

/// (A + a⊗a)⁻¹ by the Sherman–Morrison update of A⁻¹.
Matrix rank_one_inverse(const Matrix& A, const Vector& a);

/// W = D²V(x) + (1/β) ∇V(x)⊗∇V(x).
Matrix modified_hessian(const ScalarField& V, const Vector& x, double beta);

namespace field {

/// |x|² with analytic derivatives.
ScalarField squared_norm(int dim);
/// c + s·|x|² (e.g. 1+|x|² for Cauchy, σ²−|x|² for the half sphere).
ScalarField quadratic(int dim, double c, double s);
/// 1-D c + s·|x| with a kink at 0.
ScalarField abs_linear(double c, double s);
/// Separable Σ |x_i|^r / r + shift, kinked at 0 when r < 2.
ScalarField power_sum(int dim, double r, double shift = 0.0);
/// Constant field.
ScalarField constant(int dim, double c);
/// 1-D polynomial Σ c_k x^k.
ScalarField polynomial(std::vector<double> coeffs);
/// exp(s·F) for a field F with analytic derivatives.
ScalarField exp_of(const ScalarField& F, double s);

}  // namespace field

}  // namespace varineq

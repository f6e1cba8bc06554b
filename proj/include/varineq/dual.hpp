#pragma once

// One-dimensional discrete form of the L² (Hörmander) argument behind
// the thm1 bound: the operator L = φ^r u″ − (β−r)φ^{r−1}φ′u′ on a grid with
// Neumann ends, the dual problem Lu = f − μ(f), and the identities of the
// proof evaluated term by term.

#include <string>
#include <vector>

#include "varineq/fields.hpp"

namespace varineq {

struct Grid1D {
  double a = -1.0, b = 1.0;
  int m = 2001;

  double h() const { return (b - a) / (m - 1); }
  double x(int i) const { return i == m - 1 ? b : a + i * h(); }
  /// Throws InvalidParametersError unless a < b and m >= 16.
  void validate() const;
};

using GridFunction = std::vector<double>;

/// Values of a field at the grid nodes.
GridFunction sample_on(const ScalarField& f, const Grid1D& g);

struct DualProblem {
  ScalarField phi;  ///< positive, convex on [a,b]
  double beta = 0.0;
  double r = 0.0;
  ScalarField f;

  /// Guard on (n=1, β, r), β > 2r, φ > 0 at the nodes.
  void validate(const Grid1D& g) const;
};

/// Conservative form Lu = (1/ρ)(k u′)′ with ρ = φ^{−β}, k = φ^{r−β}:
/// (Lu)_i = [k_{i+½}(u_{i+1}−u_i) − k_{i−½}(u_i−u_{i−1})]/(h²ρ_i), ghost
/// reflection u_{−1} = u_1 at both ends. Symmetric for the node masses.
struct DiscreteOperator {
  Grid1D grid;
  std::vector<double> lower, diag, upper;  ///< row i: lower[i]·u_{i−1} + diag[i]·u_i + upper[i]·u_{i+1}
  std::vector<double> weights;             ///< normalized μ_β node masses (trapezoid)
  std::vector<double> face;                ///< k_{i+½}/h, i = 0..m−2
  std::vector<double> mass;                ///< unnormalized masses c_i·ρ_i; Lu = (flux balance)/mass

  GridFunction apply(const GridFunction& u) const;
  /// Σ w_i u_i v_i
  double inner(const GridFunction& u, const GridFunction& v) const;
  double mean(const GridFunction& u) const;
};

DiscreteOperator build_operator(const DualProblem& p, const Grid1D& g);

/// Solves Lu = f − μ(f) with ∂u = 0 at the ends; the discrete μ-mean of u
/// is 0. Throws DiscretizationError on a zero pivot or when the residual
/// exceeds 1e−10·‖f‖∞.
GridFunction solve_dual(const DualProblem& p, const Grid1D& g);

/// |∫v·Lu dμ + ∫u′v′φ^r dμ| with an independent non-conservative stencil
/// for L and central differences for the derivatives.
double check_ibp(const DualProblem& p, const Grid1D& g, const GridFunction& u, const GridFunction& v);

struct DecompositionTerm {
  std::string name;
  double value = 0.0;
};

struct Decomposition {
  std::vector<DecompositionTerm> terms;  ///< the four terms of the 1-D identity
  double lhs = 0.0;                      ///< (β−2r+1)·Var_μ(f), discrete
  double residual = 0.0;                 ///< |Σ terms − lhs|
  double chain_bound = 0.0;              ///< ∫g′²φ^{2r−1}/φ″ dμ + (1−r)²μ(f)²/(β−1)
  double pointwise_excess = 0.0;         ///< max_i of the pointwise estimate violation (≤ 0 expected)
};

/// Terms −2(β−r)∫u′g′φ^{2r−1}, −(β−r)²∫φ″u′²φ^{2r−1}, −(β−1)∫u″²φ^{2r},
/// −2(r−1)μ(f)∫φ^r u″ (all dμ), g = fφ^{1−r}, against (β−2r+1)Var(f).
Decomposition check_decomposition(const DualProblem& p, const Grid1D& g);

/// α = (β−1)/(β−2r+1).
inline double dual_alpha(double beta, double r) { return (beta - 1.0) / (beta - 2.0 * r + 1.0); }

/// (1+α)∫(f−μ(f))Lu dμ − α∫(Lu)² dμ with α = (β−1)/(β−2r+1), Simpson
/// weights (odd m) or trapezoid.
double variance_from_dual(const DualProblem& p, const Grid1D& g);

struct RefinementRow {
  int m = 0;
  double h = 0.0;
  Decomposition d;
};

struct RefinementStudy {
  std::vector<RefinementRow> rows;
  std::vector<double> orders;  ///< log(res_k/res_{k+1})/log(h_k/h_{k+1})
};

/// check_decomposition on each grid size in `ms` over [a,b].
RefinementStudy refine_decomposition(const DualProblem& p, double a, double b,
                                     const std::vector<int>& ms = {251, 501, 1001, 2001});

}  // namespace varineq

#pragma once

// One-dimensional diffusion semigroups of the weighted Poincaré forms and
// their spectral gaps.
//
// Discretization is cell-centred finite volume. The interval is cut into
// grid.m equal cells; each cell carries its μ-mass w_i and μ-centroid c_i,
// and the flux through an interior face is K (u_{i+1} − u_i) with
// K = k(face)/(c_{i+1} − c_i), k = weight·density. No flux leaves through
// the two end faces.

#include <string>
#include <vector>

#include "varineq/catalogue.hpp"
#include "varineq/dual.hpp"
#include "varineq/measures.hpp"

namespace varineq {

enum class Generator { kCauchy, kSphere, kGenericCase1, kGenericCase2 };

/// "Lbeta-cauchy", "Nbeta-sphere", "generic-case1", "generic-case2".
const char* to_string(Generator g);
/// Accepts the names above (also with the Greek β). Throws InvalidParametersError.
Generator parse_generator(const std::string& s);

struct CellOperator {
  std::vector<double> edges;    ///< m+1 cell boundaries
  std::vector<double> nodes;    ///< μ-centroids
  std::vector<double> weights;  ///< μ-masses, summing to 1 up to the truncated tail
  std::vector<double> face;     ///< interior conductances, m−1 of them

  int size() const { return static_cast<int>(nodes.size()); }
  /// (Lu)_i = [K_{i+½}(u_{i+1}−u_i) − K_{i−½}(u_i−u_{i−1})]/w_i
  GridFunction apply(const GridFunction& u) const;
  /// Σ K (Δu)²
  double energy(const GridFunction& u) const;
  double mean(const GridFunction& u) const;
  double variance(const GridFunction& u) const;
  GridFunction sample(const ScalarField& f) const;
};

/// Cells of `g` with conductances from weight·density of `mu`. Throws
/// InvalidParametersError when the weight is not positive at an interior
/// face or a cell has no mass.
CellOperator build_cell_operator(const WeightedMeasure& mu, const ScalarField& weight, const Grid1D& g);

/// Smallest X with μ(|x| > X) < tail, for a 1-D measure on the real line.
double truncation_radius(const WeightedMeasure& mu, double tail = 1e-8);

/// The measure's interval, its ball, or [−X, X] from truncation_radius.
Grid1D default_grid(const WeightedMeasure& mu, int m = 2000);

struct EvolutionProblem {
  Generator generator = Generator::kGenericCase1;
  WeightedMeasure measure;
  Grid1D grid;
  double dt = 0.0;  ///< 0 selects the cell width
  double T = 1.0;

  /// dt ≥ 0, T > 0, 1-D measure of the case the generator needs.
  void validate() const;
  /// Cell width when dt is 0.
  double step() const;
};

EvolutionProblem make_cauchy_evolution(double beta, int m = 2000);
EvolutionProblem make_sphere_evolution(double sigma, double beta, int m = 2000);

/// Operator of the generator: weight φ (1+x² for Cauchy, σ²−x² for the sphere).
CellOperator evolution_operator(const EvolutionProblem& p);

struct TimeSeries {
  std::vector<double> t;
  std::vector<GridFunction> u;
  std::vector<double> mean, var;

  /// Index of the stored time nearest to `time`.
  std::size_t at(double time) const;
};

/// Crank–Nicolson from f0 (values at the centroids) up to T, every `stride`
/// steps stored (the last step always). The step is shrunk so that it
/// divides T. Throws DiscretizationError on a zero pivot.
TimeSeries evolve(const EvolutionProblem& p, const GridFunction& f0, int stride = 1);

/// 2C(β−1) for Case 1 generators, 2C(β+1) for Case 2; C = 2 for the
/// Cauchy and sphere generators.
double decay_rate(const EvolutionProblem& p, double C = 2.0);

struct DecayRow {
  double t = 0.0, var = 0.0, bound = 0.0;
};

struct DecayCheck {
  InequalityReport report;  ///< lhs = Var(P_t f), rhs = e^{−rate·t}Var(f)(1+tol) at the worst time
  std::vector<DecayRow> rows;
  bool monotone = false;    ///< Var(P_t f) nonincreasing along the stored times
};

/// Checks Var(P_t f) ≤ e^{−rate·t}Var(f)(1+tol) at every stored time.
DecayCheck variance_decay_check(const EvolutionProblem& p, const GridFunction& f0, double rate,
                                double tol = 1e-3, int stride = 1);

struct SpectralProblem {
  ScalarField weight;
  WeightedMeasure measure;
  Grid1D grid;
};

struct SpectralResult {
  double lambda1 = 0.0;
  double constant = 0.0;  ///< 1/lambda1
  int iterations = 0;
  double residual = 0.0;  ///< ‖Su − λMu‖/‖Mu‖ at exit
  GridFunction eigenvector;
  std::vector<double> nodes;
};

/// Smallest eigenvalue of S u = λ M u on μ-mean-zero functions, S the
/// stiffness of ∫w f′² dμ, M = diag(w_i). Inverse iteration with the
/// constants projected out. Throws SpectralError when λ has not settled to
/// `tol` after `max_iter` iterations.
SpectralResult spectral_gap(const SpectralProblem& sp, int max_iter = 2000, double tol = 1e-13);

/// |λ(X) − λ(2X)|/λ(X): the same problem on a doubled interval with
/// doubled cell count.
double truncation_sensitivity(const SpectralProblem& sp);

}  // namespace varineq

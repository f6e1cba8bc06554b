#pragma once

// Named inequality scenarios with computable left and right sides.
//
// Every scenario binds a measure, a parameter triple (n, β, r) and a test
// function to an equation tag. verify() evaluates both sides by quadrature,
// propagates the quadrature error bounds into `err`, and classifies the
// margin rhs − lhs.

#include <string>
#include <vector>

#include <json.hpp>

#include "varineq/battery.hpp"
#include "varineq/measures.hpp"

namespace varineq {

enum class Status { kHolds, kViolated, kInconclusive };

const char* to_string(Status s);

/// slack = 10·err; violated when margin < −(err + slack), inconclusive when
/// |margin| ≤ err + slack, holds otherwise.
Status classify(double margin, double err);

/// Worse of two statuses (violated > inconclusive > holds).
Status worst(Status a, Status b);

/// One link of a chain, or a companion inequality reported with the main one.
struct ReportPart {
  std::string name;
  double lhs = 0.0, rhs = 0.0, margin = 0.0, err = 0.0;
  Status status = Status::kHolds;
};

struct InequalityReport {
  std::string id;
  std::string equation_tag;
  ParamTriple params;
  double lhs = 0.0, rhs = 0.0, margin = 0.0, err = 0.0;
  Status status = Status::kHolds;  ///< worst over the main comparison and all parts
  std::vector<ReportPart> parts;
  nlohmann::json meta = nlohmann::json::object();
};

struct Scenario {
  std::string id;
  std::string equation_tag;
  WeightedMeasure measure;
  ParamTriple params;
  TestFunction f;
  QuadratureSpec spec{};
  /// D²φ ≥ C·I (Case 1) or −D²φ ≥ C·I (Case 2), used by thm12/thm15.
  /// 0 selects the known value for the cauchy and halfsphere families.
  double convexity = 0.0;
};

/// Every tag understood by verify().
const std::vector<std::string>& registered_tags();

/// Evaluates the scenario. Throws InvalidParametersError when the guard of
/// the tag fails, NonIntegrableError when an integral diverges.
InequalityReport verify(const Scenario& s);

struct OptimizedMargin {
  double R = 0.0;        ///< R(f)
  double S = 0.0;        ///< S(f)
  double R_phi = 0.0;    ///< R(φ^{r−1}), negative
  double plain_lhs = 0.0;
  InequalityReport report;  ///< lhs = R(f) − S(f)²/R(φ^{r−1})
};

/// Strengthened thm1/thm2 form with the projection on φ^{r−1} removed.
/// Throws DegenerateDenominatorError when |R(φ^{r−1})| is below its error.
OptimizedMargin optimized_margin(const Scenario& s);

struct PsiCurvature {
  double psi_dd = 0.0;
  double bound = 0.0;
  double improved = 0.0;
  double W = 0.0;  ///< infinite when D²φ is singular somewhere
  double err = 0.0;
};

/// ψ(β) = ln∫φ^{−β}: Richardson-extrapolated second difference with the
/// relative step `rel_step`, compared with n(β−2)/((β−1)²(β−n−1)).
PsiCurvature psi_curvature(const Potential& phi, double beta, double rel_step = 1e-2,
                           const QuadratureSpec& spec = {});

/// ∫φ^{−β} (Case 1) or ∫φ^{β} (Case 2) over the domain, unnormalized.
IntegralEstimate power_mass(const Potential& phi, MeasureCase c, double beta, const QuadratureSpec& spec = {});

/// Ψ(β) = ln(∏_{i=1}^n (β−i) ∫φ^{−β}).
double psi_big(const Potential& phi, double beta, const QuadratureSpec& spec = {});
/// Ψ̄(β) = ln(∏_{i=1}^n (β+i) ∫φ^{β}).
double psi_bar(const Potential& phi, double beta, const QuadratureSpec& spec = {});
/// Φ(β) = ln((β−1)∫φ^{−β}) + ((n−1)/n) ln((β−1)^{β−1}/(β−n−1)^{β−n−1}).
double phi_case1(const Potential& phi, double beta, const QuadratureSpec& spec = {});
/// Φ̄(β) = ln((β+1)∫φ^{β}) − ((n−1)/n) ln((β+1)^{β+1}/(β+n+1)^{β+n+1}).
double phi_case2(const Potential& phi, double beta, const QuadratureSpec& spec = {});

/// Second differences of Φ (Case 1) or Φ̄ (Case 2) at each grid point.
/// lhs = largest second difference, rhs = 0.
InequalityReport phi_concavity(const Potential& phi, MeasureCase c, const std::vector<double>& betas,
                               double dbeta = 0.1, const QuadratureSpec& spec = {});

/// f = ⟨∇φ, z₀⟩φ^{r−1} with its gradient.
TestFunction witness_function(const ScalarField& phi, double r, const Vector& z0);

/// thm1 (Case 1) or thm2 (Case 2) report for the witness function.
InequalityReport equality_witness(const WeightedMeasure& mu, const ParamTriple& p, const Vector& z0,
                                  const QuadratureSpec& spec = {});

struct PrekopaCheck {
  double second_deriv_a = 0.0;  ///< from the local formula
  double second_deriv_b = 0.0;  ///< from a second difference in t
  double err_a = 0.0, err_b = 0.0;
};

/// Local form of the Prékopa convexity of t ↦ (∫φ_ε(t,·)^{−β})^{−1/(β−n)}
/// with φ_ε(t,x) = φ + tg + (t²/2)⟨(D²φ)⁻¹∇g,∇g⟩ + (ε/2)(|x|²+t²).
PrekopaCheck prekopa_local_check(const ScalarField& phi, const ScalarField& g, const DomainSpec& domain,
                                 double beta, double eps, const QuadratureSpec& spec = {});

struct BlLimitRow {
  double beta = 0.0, lhs = 0.0, rhs = 0.0, margin = 0.0, err = 0.0;
};

struct BlLimitTable {
  std::vector<BlLimitRow> rows;
  BlLimitRow classical;  ///< Brascamp–Lieb for e^{−V}; beta = ∞
  bool monotone = false; ///< |margin − classical margin| nonincreasing in β, within err
};

/// thm8 for φ = c_β(1+V/β) at each β, next to the classical
/// Brascamp–Lieb margin of e^{−V}. V must be normalized (∫e^{−V} = 1).
BlLimitTable bl_limit_sweep(const Potential& V, const std::vector<double>& betas, const TestFunction& f,
                            const QuadratureSpec& spec = {});

/// C_r = (4/r)(2−r)^{(2−r)/r}, with 0⁰ = 1 at r = 2.
double c_r(double r);

nlohmann::json to_json(const InequalityReport& r);

}  // namespace varineq

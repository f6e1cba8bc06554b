#pragma once

// Deterministic and Monte Carlo integration with explicit error estimates.
//
// One-dimensional integrals use globally adaptive 7/15-point Gauss–Kronrod
// panels. Infinite ranges are compactified by x = t/(1−t²); kinks become
// panel breakpoints; integrable power-law endpoint behaviour (x−a)^α is
// removed by the substitution x = a + (b−a)·u^{1/(α+1)}. Tensor rules nest
// the 1-D integrator and carry the inner error bounds outward.

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "varineq/errors.hpp"
#include "varineq/fields.hpp"

namespace varineq {

struct IntegralEstimate {
  double value = 0.0;
  double error_bound = 0.0;  ///< the method's own estimate, never zeroed
  std::string method;
  long node_count = 0;
};

/// Raised when the tolerance is not met; carries the best estimate found.
class NonConvergentError : public Error {
 public:
  NonConvergentError(const std::string& what, IntegralEstimate best)
      : Error("non-convergent", what), best_(std::move(best)) {}
  const IntegralEstimate& best() const noexcept { return best_; }

 private:
  IntegralEstimate best_;
};

enum class NdStrategy { kTensor, kMonteCarlo };

struct QuadratureSpec {
  double tolerance = 1e-10;     ///< relative tolerance of 1-D rules
  double nd_tolerance = 1e-8;   ///< relative tolerance of tensor rules (n >= 2)
  int max_subdivisions = 3000;  ///< per 1-D integral
  NdStrategy nd_strategy = NdStrategy::kTensor;
  long mc_samples = 200000;
  std::uint64_t seed = 1;
  double mc_tail_dof = 1.0;  ///< degrees of freedom of the full-space Student proposal
  bool check_tails = true;   ///< reject integrands with too slow polynomial decay

  /// Throws InvalidParametersError when a field is out of range.
  void validate() const;
};

struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
};

/// Extra knowledge about a 1-D integrand.
struct EndpointHints {
  std::vector<double> breakpoints;  ///< kinks inside the interval
  double lo_power = 0.0;            ///< integrand ~ (x−lo)^lo_power near a finite lo
  double hi_power = 0.0;            ///< integrand ~ (hi−x)^hi_power near a finite hi
};

using Integrand1D = std::function<double(double)>;
using IntegrandND = std::function<double(const Vector&)>;

IntegralEstimate integrate_1d(const Integrand1D& f, Interval domain, const QuadratureSpec& spec,
                              const EndpointHints& hints = {});

struct DomainSpec {
  enum class Kind { kFullSpace, kInterval, kCenteredBall, kBox };
  Kind kind = Kind::kFullSpace;
  int dim = 1;
  double a = 0.0, b = 0.0;  ///< interval ends (n = 1); may be infinite
  double sigma = 0.0;       ///< ball radius
  Vector lo, hi;            ///< box corners

  static DomainSpec full_space(int n);
  static DomainSpec interval(double a, double b);
  static DomainSpec ball(int n, double sigma);
  static DomainSpec box(Vector lo, Vector hi);

  bool bounded() const;
  bool contains(const Vector& x) const;  ///< open-set membership
  void validate() const;                 ///< interval a < b, ball σ > 0, matching dims
};

/// Hints for n-D integrands: kinks (applied on every axis) and the power of
/// the boundary behaviour for bounded domains, dist(x,∂Ω)^boundary_power.
struct NdHints {
  std::vector<double> kinks;
  double boundary_power = 0.0;
};

IntegralEstimate integrate_nd(const IntegrandND& f, const DomainSpec& domain,
                              const QuadratureSpec& spec, const NdHints& hints = {});

/// The map x = t/(1−t²) of (−1,1) onto R and its inverse.
double compactify_map(double t);
double compactify_inverse(double x);
/// g(t) = f(x(t))·(1+t²)/(1−t²)², so that ∫_{−1}^{1} g = ∫_R f.
Integrand1D compactify(const Integrand1D& f);

/// Heuristic check that |f| decays faster than |x|^{−dim} along a few rays
/// to infinity. Throws NonIntegrableError otherwise. Returns the smallest
/// fitted decay exponent (infinity when every probe vanished).
double check_tail_decay(const IntegrandND& f, const DomainSpec& domain);

/// Sample mean with standard error, summed with compensation.
IntegralEstimate sample_mean(const std::vector<double>& values, const std::string& method);

}  // namespace varineq

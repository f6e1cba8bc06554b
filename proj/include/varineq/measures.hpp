#pragma once

// Probability measures built from convex or concave potentials:
//   Case 1   dμ = φ^{−β} dx / Z        (φ > 0 convex)
//   Case 2   dν = φ^{β} 𝟙_Ω dx / Z     (φ > 0 concave, Ω bounded)
//   log-concave  e^{−V} dx / Z
// plus a free-form density used for the χ_n family. Normalizers are
// computed eagerly, in closed form where a formula exists.

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "varineq/fields.hpp"
#include "varineq/quadrature.hpp"

namespace varineq {

enum class MeasureCase { kCase1, kCase2, kLogConcave, kDensity };

const char* to_string(MeasureCase c);

/// A potential together with the set it lives on.
struct Potential {
  ScalarField field;  ///< φ for Case 1/2, V for log-concave measures
  DomainSpec domain;
  /// True when φ vanishes to first order on ∂Ω (e.g. σ²−|x|²); powers φ^α then
  /// behave like dist(x,∂Ω)^α there.
  bool vanishes_on_boundary = false;
  std::string name;
};

struct ParamTriple {
  int n = 1;
  double beta = 0.0;
  double r = 0.0;
};

struct GuardResult {
  bool valid = false;
  double constant = 0.0;   ///< A(n,β,r) or B(n,β,r), meaningful only when valid
  double threshold = 0.0;  ///< the β threshold that must be exceeded
};

/// β > r + (n + √(n² + 4(r²−r)n))/2, A = (β−n)/n − (n−1)r²/(n(β−2r)).
GuardResult case1_guard(const ParamTriple& p);
/// β > −r + (−n + √(n² + 4(r²−r)n))/2, B = (β+n)/n − (n−1)r²/(n(β+2r)).
GuardResult case2_guard(const ParamTriple& p);

class WeightedMeasure {
 public:
  using Sampler = std::function<std::vector<Vector>(long count, std::uint64_t seed)>;

  /// Generic Case 1 measure. Throws NonIntegrableError when ∫φ^{−β} diverges.
  static WeightedMeasure case1(Potential p, double beta, const QuadratureSpec& spec = {});
  /// Generic Case 2 measure on a bounded domain.
  static WeightedMeasure case2(Potential p, double beta, const QuadratureSpec& spec = {});
  /// Log-concave measure e^{−V}; V is stored as the potential field.
  static WeightedMeasure log_concave(Potential p, const QuadratureSpec& spec = {});
  /// Arbitrary nonnegative density on a domain.
  static WeightedMeasure from_density(std::string family, ScalarField density, DomainSpec domain,
                                      NdHints hints, const QuadratureSpec& spec = {});
  /// A measure whose normalizer is known in closed form; no quadrature is run.
  /// For kDensity the potential field is the density itself.
  static WeightedMeasure known(MeasureCase c, Potential p, double beta, std::string family, double z,
                               NdHints density_hints = {});

  MeasureCase measure_case() const noexcept { return case_; }
  const Potential& potential() const noexcept { return pot_; }
  const ScalarField& field() const noexcept { return pot_.field; }
  double beta() const noexcept { return beta_; }
  int dim() const noexcept { return pot_.domain.dim; }
  const DomainSpec& domain() const noexcept { return pot_.domain; }
  const std::string& family() const noexcept { return family_; }

  double normalizer() const noexcept { return z_; }
  double normalizer_error() const noexcept { return z_err_; }
  bool closed_form_normalizer() const noexcept { return closed_form_; }
  /// Normalizer obtained by quadrature, whatever the closed form says.
  IntegralEstimate normalizer_by_quadrature(const QuadratureSpec& spec = {}) const;

  /// Unnormalized density; zero outside the domain.
  double unnormalized(const Vector& x) const;
  double density(const Vector& x) const { return unnormalized(x) / z_; }

  /// Quadrature hints for integrands carrying an extra factor φ^extra_power.
  NdHints hints(double extra_power = 0.0) const;

  /// ∫ F dμ. `extra_power` declares that F contains a factor φ^extra_power,
  /// which matters for Case 2 integrands near a vanishing boundary. With a
  /// Monte Carlo spec and an available sampler the measure itself is the
  /// importance density.
  IntegralEstimate integrate(const IntegrandND& F, const QuadratureSpec& spec,
                             double extra_power = 0.0) const;

  /// Same measure family at another exponent, normalizer recomputed.
  WeightedMeasure with_beta(double beta, const QuadratureSpec& spec = {}) const;

  bool has_sampler() const noexcept { return static_cast<bool>(sampler_); }
  const Sampler& sampler() const noexcept { return sampler_; }

  /// Replaces the rejection sampler by an exact one.
  void set_sampler(Sampler s) { sampler_ = std::move(s); }

 private:
  WeightedMeasure() = default;
  void compute_normalizer(const QuadratureSpec& spec);
  void install_default_sampler();

  MeasureCase case_ = MeasureCase::kCase1;
  Potential pot_{ScalarField(1, [](const Vector&) { return 1.0; }), DomainSpec{}, false, {}};
  double beta_ = 0.0;
  std::string family_;
  double z_ = 1.0, z_err_ = 0.0;
  bool closed_form_ = false;
  NdHints density_hints_;  // kDensity only
  Sampler sampler_;
};

/// Cauchy measure (1+|x|²)^{−β}/Z, Z = π^{n/2}Γ(β−n/2)/Γ(β). Needs β > n/2.
WeightedMeasure make_cauchy(int n, double beta);
/// (σ²−|x|²)^β on the ball of radius σ, Z = σ^{2β+n}π^{n/2}Γ(β+1)/Γ(β+n/2+1).
WeightedMeasure make_halfsphere(int n, double sigma, double beta);
/// Product density c_{r,n} exp(−Σ|x_i|^r/r), r ∈ [1,2]; c by 1-D quadrature.
WeightedMeasure make_exp_power(int n, double r, const QuadratureSpec& spec = {});
/// Standard Gaussian, V = |x|²/2 + (n/2)ln 2π.
WeightedMeasure make_gaussian(int n);
/// χ_n density on [0,∞): 2^{1−n/2}/Γ(n/2)·r^{n−1}e^{−r²/2}.
WeightedMeasure make_chi(int n);

/// ∫ f dμ.
IntegralEstimate expectation(const WeightedMeasure& mu, const IntegrandND& f,
                             const QuadratureSpec& spec = {});
/// Var_μ(f), computed as ∫(f−m)²dμ around a first-pass mean m.
IntegralEstimate variance(const WeightedMeasure& mu, const IntegrandND& f,
                          const QuadratureSpec& spec = {});
/// `count` points distributed as μ, reproducible for a given seed.
std::vector<Vector> sample(const WeightedMeasure& mu, long count, std::uint64_t seed);

}  // namespace varineq

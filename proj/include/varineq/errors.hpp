#pragma once

#include <stdexcept>
#include <string>

namespace varineq {

/// Base of every error raised by the toolkit. `code()` is the stable
/// machine-readable name written into reports.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& what)
      : std::runtime_error(what), code_(std::move(code)) {}
  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

#define VARINEQ_DEFINE_ERROR(Name, code_string)                     \
  class Name : public Error {                                       \
   public:                                                          \
    explicit Name(const std::string& what) : Error(code_string, what) {} \
  };

VARINEQ_DEFINE_ERROR(DomainError, "domain")
VARINEQ_DEFINE_ERROR(SingularHessianError, "singular-hessian")
VARINEQ_DEFINE_ERROR(NonIntegrableError, "non-integrable")
VARINEQ_DEFINE_ERROR(UnsupportedParameterError, "unsupported-parameter")
VARINEQ_DEFINE_ERROR(UnsupportedDimensionError, "unsupported-dimension")
VARINEQ_DEFINE_ERROR(SamplerInefficiencyError, "sampler-inefficiency")
VARINEQ_DEFINE_ERROR(InvalidParametersError, "invalid-parameters")
VARINEQ_DEFINE_ERROR(DegenerateDenominatorError, "degenerate-denominator")
VARINEQ_DEFINE_ERROR(RangeError, "range")
VARINEQ_DEFINE_ERROR(DiscretizationError, "discretization")
VARINEQ_DEFINE_ERROR(SpectralError, "spectral")
VARINEQ_DEFINE_ERROR(ParseError, "parse")

#undef VARINEQ_DEFINE_ERROR

}  // namespace varineq

#pragma once

// Text descriptions of potentials, domains and measure families.
//
//   potential   quadratic:c,s | abs-linear:c,s | power-sum:r[,shift] |
//               polynomial:c0,c1,... | constant:c
//   domain      full | interval:a,b | ball:sigma
//   family      cauchy | halfsphere | gaussian | laplace | exp-power |
//               chi | case1 | case2 | log-concave

#include <string>

#include "varineq/cli/config.hpp"
#include "varineq/measures.hpp"

namespace varineq::cli {

ScalarField parse_potential(const std::string& s, int dim);
DomainSpec parse_domain(const std::string& s, int dim);

/// Families that build_measure understands.
bool known_family(const std::string& family);

/// Measure from the keys family, n, beta, sigma, power, potential, domain.
WeightedMeasure build_measure(const JobSpec& job, const QuadratureSpec& spec);

/// D²φ ≥ C (Case 1), −D²φ ≥ C (Case 2) or D²V ≥ C: the `convexity` key, or
/// the known value for cauchy (2), halfsphere (2) and gaussian (1).
/// Returns 0 when neither is available.
double convexity_for(const JobSpec& job);

}  // namespace varineq::cli

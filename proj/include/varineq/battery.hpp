#pragma once

// Fixed set of twelve test functions: low-degree polynomials and
// polynomials times Gaussian bumps. Every member is smooth, has an analytic
// gradient, and is square integrable (with its gradient) against every
// measure family at the stock parameters.

#include <string>
#include <vector>

#include "varineq/fields.hpp"

namespace varineq {

inline constexpr int kBatteryVersion = 1;

struct TestFunction {
  std::string name;
  ScalarField f;
  bool polynomial = false;  ///< unbounded: needs enough moments of the measure
};

/// The battery in dimension `dim`. Order and names are stable per version.
std::vector<TestFunction> battery(int dim);

/// Looks a member up by name; throws InvalidParametersError when unknown.
TestFunction battery_member(int dim, const std::string& name);

/// A test function from its value and gradient.
TestFunction make_test_function(std::string name, int dim, ScalarField::ValueFn f, ScalarField::GradFn g);

}  // namespace varineq

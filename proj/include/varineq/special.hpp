#pragma once

namespace varineq::special {

/// Γ(x) by the Lanczos approximation (g = 7, nine terms) with reflection
/// for x < 1/2. Relative error is below 1e-13 on the ranges used here.
double gamma(double x);

/// ln Γ(x) for x > 0.
double log_gamma(double x);

/// Compensated (Neumaier) running sum.
class NeumaierSum {
 public:
  void add(double v) noexcept;
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace varineq::special

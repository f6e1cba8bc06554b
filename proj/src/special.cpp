#include "varineq/special.hpp"

#include <array>
#include <cmath>
#include <numbers>

namespace varineq::special {

namespace {

constexpr double kLanczosG = 7.0;
// Least-squares fit of the partial-fraction series for g = 7 on [0.5, 200].
constexpr std::array<double, 9> kLanczosCoeffs = {
    0.99999999999999911997, 676.52036812188843837,  -1259.139216722774451,
    771.3234287835242816,   -176.61502919654314238, 12.507343375198417737,
    -0.13857123535382457751, 1.0085948458771009195e-5, 1.2144544327698516766e-7};

// ln Γ(x) for x >= 1/2.
double lanczos_log_gamma(double x) {
  x -= 1.0;
  double a = kLanczosCoeffs[0];
  const double t = x + kLanczosG + 0.5;
  for (std::size_t i = 1; i < kLanczosCoeffs.size(); ++i) a += kLanczosCoeffs[i] / (x + static_cast<double>(i));
  return 0.5 * std::log(2.0 * std::numbers::pi) + (x + 0.5) * std::log(t) - t + std::log(a);
}

}  // namespace

double gamma(double x) {
  if (x < 0.5) {
    // Γ(x)Γ(1−x) = π / sin(πx)
    return std::numbers::pi / (std::sin(std::numbers::pi * x) * gamma(1.0 - x));
  }
  if (x == std::floor(x) && x <= 21.0) {
    double f = 1.0;
    for (int k = 2; k < static_cast<int>(x); ++k) f *= k;
    return f;
  }
  return std::exp(lanczos_log_gamma(x));
}

double log_gamma(double x) {
  if (x < 0.5) return std::log(std::numbers::pi / std::abs(std::sin(std::numbers::pi * x))) - log_gamma(1.0 - x);
  return lanczos_log_gamma(x);
}

void NeumaierSum::add(double v) noexcept {
  const double t = sum_ + v;
  if (std::abs(sum_) >= std::abs(v)) {
    comp_ += (sum_ - t) + v;
  } else {
    comp_ += (v - t) + sum_;
  }
  sum_ = t;
}

}  // namespace varineq::special

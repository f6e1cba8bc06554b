#include <doctest.h>

#include <cmath>

#include "varineq/special.hpp"

namespace sp = varineq::special;
using sp::NeumaierSum;

TEST_CASE("gamma matches the standard library across its range") {
  for (double x = -4.75; x < 40.0; x += 0.173) {
    if (std::abs(x - std::round(x)) < 1e-9 && x <= 0) continue;
    const double ref = std::tgamma(x);
    CHECK(std::abs(sp::gamma(x) - ref) <= 1e-13 * std::abs(ref));
  }
}

TEST_CASE("gamma half-integer values") {
  CHECK(sp::gamma(0.5) == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-14));
  CHECK(sp::gamma(2.5) == doctest::Approx(0.75 * std::sqrt(M_PI)).epsilon(1e-14));
  CHECK(sp::gamma(5.0) == 24.0);
}

TEST_CASE("log gamma agrees with lgamma") {
  for (double x = 0.05; x < 200.0; x *= 1.37) {
    CHECK(std::abs(sp::log_gamma(x) - std::lgamma(x)) <= 1e-13 * std::max(1.0, std::abs(std::lgamma(x))));
  }
}

TEST_CASE("compensated sum recovers lost low-order bits") {
  NeumaierSum s;
  s.add(1.0);
  s.add(1e100);
  s.add(1.0);
  s.add(-1e100);
  CHECK(s.value() == 2.0);
}

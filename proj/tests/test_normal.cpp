#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "raradapt/normal.hpp"

using namespace raradapt;

namespace {

// Independent high-precision Phi via the Taylor series
//   Phi(x) = 1/2 + phi(x) * sum_{k>=0} x^{2k+1} / (1*3*...*(2k+1)),
// used as the oracle for the quantile check.
long double phi_series(long double x) {
  const long double pdf = std::exp(-x * x / 2.0L) / std::sqrt(2.0L * M_PIl);
  long double term = x;
  long double sum = 0.0L;
  for (int k = 0; k < 500; ++k) {
    sum += term;
    term *= x * x / (2.0L * k + 3.0L);
    if (std::fabs(term) < 1e-24L * std::fabs(sum)) break;
  }
  return 0.5L + pdf * sum;
}

double quantile_by_bisection(double q) {
  double lo = -12.0, hi = 12.0;
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (static_cast<double>(phi_series(mid)) < q) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("normal cdf basics") {
  CHECK(normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
  for (double x : {0.1, 0.5, 1.0, 1.96, 3.3, 7.0}) {
    CHECK(normal_cdf(-x) == doctest::Approx(1.0 - normal_cdf(x)).epsilon(1e-13));
    CHECK(normal_cdf(x) == doctest::Approx(static_cast<double>(phi_series(x))).epsilon(1e-14));
  }
}

TEST_CASE("normal quantile agrees with the series oracle") {
  CHECK(std::fabs(normal_quantile(0.95) - 1.6449) < 1e-4);
  for (double q : {1e-8, 1e-4, 0.01, 0.2, 0.5, 0.8, 0.95, 0.975, 0.999, 1.0 - 1e-8}) {
    CHECK(normal_quantile(q) == doctest::Approx(quantile_by_bisection(q)).epsilon(1e-9));
  }
}

TEST_CASE("quantile/cdf round trip") {
  for (double q = 1e-8; q < 1.0 - 1e-9; q += 0.0137) {
    CHECK(std::fabs(normal_cdf(normal_quantile(q)) - q) < 1e-12);
  }
}

TEST_CASE("quantile domain errors") {
  CHECK_THROWS_AS(normal_quantile(0.0), std::domain_error);
  CHECK_THROWS_AS(normal_quantile(1.0), std::domain_error);
  CHECK_THROWS_AS(normal_quantile(-0.2), std::domain_error);
}

TEST_CASE("upper quantile") {
  CHECK(upper_quantile(0.05) == doctest::Approx(1.6448536269514722).epsilon(1e-12));
  CHECK(upper_quantile(0.025) == doctest::Approx(1.959963984540054).epsilon(1e-12));
}

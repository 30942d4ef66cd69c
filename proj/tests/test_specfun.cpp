#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "fujita/specfun.hpp"
#include "reference_values.hpp"

using namespace fujita;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("gamma at reference points", "[specfun]") {
  REQUIRE_THAT(fujita::gamma(0.5), WithinRel(refvals::kGammaHalf, 1e-14));
  REQUIRE_THAT(fujita::gamma(6.0), WithinRel(refvals::kGamma6, 1e-14));
  REQUIRE_THAT(fujita::gamma(4.5), WithinRel(refvals::kGamma45, 1e-14));
  REQUIRE_THAT(fujita::gamma(1.0), WithinRel(1.0, 1e-14));
  // Reflection: Gamma(-1/2) = -2 sqrt(pi).
  REQUIRE_THAT(fujita::gamma(-0.5),
               WithinRel(-2.0 * refvals::kGammaHalf, 1e-13));
}

TEST_CASE("gamma functional equation on a grid", "[specfun]") {
  for (double x = 0.1; x < 50.0; x += 0.37) {
    CAPTURE(x);
    REQUIRE_THAT(fujita::gamma(x + 1.0), WithinRel(x * fujita::gamma(x), 1e-12));
  }
}

TEST_CASE("log_gamma agrees with libm", "[specfun]") {
  for (double x : {0.2, 0.7, 1.3, 4.5, 11.0, 30.5, 57.0}) {
    CAPTURE(x);
    REQUIRE_THAT(fujita::log_gamma(x), WithinAbs(std::lgamma(x), 5e-13 * std::max(1.0, std::abs(std::lgamma(x)))));
  }
}

TEST_CASE("gamma poles throw", "[specfun]") {
  REQUIRE_THROWS_AS(fujita::gamma(0.0), domain_error);
  REQUIRE_THROWS_AS(fujita::gamma(-3.0), domain_error);
  REQUIRE_THROWS_AS(fujita::log_gamma(-1.0), domain_error);
}

TEST_CASE("digamma at reference points", "[specfun]") {
  REQUIRE_THAT(digamma(1.0), WithinRel(refvals::kDigamma1, 1e-13));
  REQUIRE_THAT(digamma(2.0), WithinRel(refvals::kDigamma2, 1e-13));
  REQUIRE_THAT(digamma(3.7), WithinRel(refvals::kDigamma37, 1e-13));
}

TEST_CASE("digamma recurrence and bounds", "[specfun]") {
  for (double z = 0.3; z < 40.0; z += 0.83) {
    CAPTURE(z);
    REQUIRE_THAT(digamma(z + 1.0), WithinAbs(digamma(z) + 1.0 / z, 1e-12));
  }
  // ln z - 1/z < psi(z) < ln z - 1/(2z) for z > 0.
  for (double z : {0.5, 1.0, 3.7, 10.0, 42.0}) {
    CAPTURE(z);
    REQUIRE(digamma(z) > std::log(z) - 1.0 / z);
    REQUIRE(digamma(z) < std::log(z) - 0.5 / z);
  }
  REQUIRE_THROWS_AS(digamma(0.0), domain_error);
  REQUIRE_THROWS_AS(digamma(-2.5), domain_error);
}

TEST_CASE("terminating Kummer polynomial", "[specfun]") {
  const KummerPoly M = make_kummer(2, 2.0);
  REQUIRE(M.coefficients.size() == 3);
  REQUIRE_THAT(M.coefficients[0], WithinRel(1.0, 1e-15));
  REQUIRE_THAT(M.coefficients[1], WithinRel(-1.0, 1e-15));
  REQUIRE_THAT(M.coefficients[2], WithinRel(1.0 / 6.0, 1e-15));
  REQUIRE_THAT(kummer_eval(M, 1.0), WithinRel(refvals::kKummerM2b2z1, 1e-14));
  REQUIRE_THAT(kummer_eval_deriv(M, 1.0), WithinRel(-2.0 / 3.0, 1e-14));
  REQUIRE_THAT(kummer_eval_deriv2(M, 1.0), WithinRel(1.0 / 3.0, 1e-14));
  REQUIRE_THAT(kummer_eval(M, 0.0), WithinRel(1.0, 1e-15));
}

TEST_CASE("Kummer polynomials satisfy their ODE", "[specfun]") {
  // z M'' + (b - z) M' + j M = 0 for M = M(-j, b, z).
  for (int j : {1, 2, 3, 5, 8}) {
    const double b = 2.118033988749895;
    const KummerPoly M = make_kummer(j, b);
    for (double z : {0.3, 1.0, 2.5, 7.0, 19.0}) {
      CAPTURE(j, z);
      const double res = z * kummer_eval_deriv2(M, z) +
                         (b - z) * kummer_eval_deriv(M, z) +
                         j * kummer_eval(M, z);
      const double scale = std::abs(kummer_eval(M, z)) + std::abs(z);
      REQUIRE_THAT(res, WithinAbs(0.0, 1e-11 * scale));
    }
  }
}

TEST_CASE("Kummer validation", "[specfun]") {
  REQUIRE_THROWS_AS(make_kummer(-1, 2.0), domain_error);
  REQUIRE_THROWS_AS(make_kummer(2, 0.0), domain_error);
}

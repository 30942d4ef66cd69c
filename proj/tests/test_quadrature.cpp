#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "fujita/quadrature.hpp"
#include "reference_values.hpp"

using namespace fujita;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("Gauss-Laguerre integrates monomials exactly", "[quadrature]") {
  const GaussLaguerreRule rule = gauss_laguerre(20, 0.0);
  REQUIRE_THAT(rule.integrate([](double) { return 1.0; }),
               WithinRel(1.0, 1e-14));
  REQUIRE_THAT(rule.integrate([](double t) { return std::pow(t, 5); }),
               WithinRel(120.0, 1e-13));
  REQUIRE_THAT(rule.integrate([](double t) { return std::pow(t, 10); }),
               WithinRel(3628800.0, 1e-13));
}

TEST_CASE("generalized rule reproduces Gamma moments", "[quadrature]") {
  const double alpha = 1.118033988749895;  // a fractional exponent in use
  const GaussLaguerreRule rule = gauss_laguerre(40, alpha);
  for (int k = 0; k <= 6; ++k) {
    CAPTURE(k);
    REQUIRE_THAT(rule.integrate([&](double t) { return std::pow(t, k); }),
                 WithinRel(fujita::gamma(alpha + k + 1.0), 1e-12));
  }
}

TEST_CASE("radial Gaussian-weight rule: exact moments", "[quadrature]") {
  const WeightedQuadrature q12 = WeightedQuadrature::make(12, 200);
  const double m[4] = {refvals::kWeightMoment_N12_m0,
                       refvals::kWeightMoment_N12_m1,
                       refvals::kWeightMoment_N12_m2,
                       refvals::kWeightMoment_N12_m3};
  for (int k = 0; k <= 3; ++k) {
    CAPTURE(k);
    REQUIRE_THAT(
        q12.integrate([&](double r) { return std::pow(r, 2 * k); }),
        WithinRel(m[k], 1e-13));
    REQUIRE_THAT(gaussian_weight_moment(12, k), WithinRel(m[k], 1e-13));
  }
  const WeightedQuadrature q6 = WeightedQuadrature::make(6, 64);
  REQUIRE_THAT(q6.integrate([](double) { return 1.0; }),
               WithinRel(gaussian_weight_moment(6, 0), 1e-13));
}

TEST_CASE("weighted rule vs adaptive Simpson cross-check", "[quadrature]") {
  // cos(rho) is entire in rho^2, so the transformed rule is spectrally
  // accurate; the adaptive integrator provides an independent value.
  const WeightedQuadrature q = WeightedQuadrature::make(6, 200);
  const double spectral = q.integrate([](double r) { return std::cos(r); });
  const double adaptive = integrate_adaptive(
      [](double r) {
        return std::cos(r) * std::pow(r, 5) * std::exp(-0.25 * r * r);
      },
      0.0, 40.0, 1e-13);
  REQUIRE_THAT(spectral, WithinRel(adaptive, 1e-10));
}

TEST_CASE("adaptive Simpson on classic integrals", "[quadrature]") {
  REQUIRE_THAT(integrate_adaptive([](double x) { return std::sin(x); }, 0.0,
                                  M_PI, 1e-13),
               WithinRel(2.0, 1e-12));
  REQUIRE_THAT(integrate_adaptive([](double x) { return std::exp(x); }, 0.0,
                                  1.0, 1e-13),
               WithinRel(std::exp(1.0) - 1.0, 1e-12));
  // Sharp peak at the center: 200 atan(100).
  const double ref = 200.0 * std::atan(100.0);
  REQUIRE_THAT(integrate_adaptive(
                   [](double x) { return 1.0 / (1e-4 + x * x); }, -1.0, 1.0,
                   1e-11),
               WithinRel(ref, 1e-9));
}

TEST_CASE("quadrature validation", "[quadrature]") {
  REQUIRE_THROWS_AS(gauss_laguerre(0, 0.0), domain_error);
  REQUIRE_THROWS_AS(gauss_laguerre(10, -1.5), domain_error);
  REQUIRE_THROWS_AS(
      integrate_adaptive([](double x) { return x; }, 1.0, 0.0, 1e-10),
      domain_error);
}

#pragma once

// Special functions needed by the spectral frame and the closed-form energy
// expressions: Gamma, digamma, and the terminating Kummer functions
// M(-j, b, z) that furnish the polynomial eigenfunctions.

#include <cmath>
#include <vector>

#include "fujita/common.hpp"

namespace fujita {

namespace detail {

// Lanczos coefficients, g = 7, kmax = 8. Relative error of lgamma is a few
// ulp on the half line, which keeps Gamma itself below ~1e-14 relative for
// the arguments used here (x <= ~60).
inline constexpr double kLanczos7[9] = {
    0.99999999999980993227684700473478,
    676.520368121885098567009190444019,
    -1259.13921672240287047156078755283,
    771.3234287776530788486528258894,
    -176.61502916214059906584551354,
    12.507343278686904814458936853,
    -0.13857109526572011689554707,
    9.984369578019570859563e-6,
    1.50563273514931155834e-7,
};

// log Gamma(x) for x >= 0.5.
inline double lgamma_lanczos(double x) {
  x -= 1.0;
  double ag = kLanczos7[0];
  for (int k = 1; k <= 8; ++k) ag += kLanczos7[k] / (x + k);
  const double t = x + 7.5;
  return (x + 0.5) * std::log(t) - t + 0.91893853320467274178 /* log sqrt(2 pi) */
         + std::log(ag);
}

}  // namespace detail

// Gamma(x) for real x, poles excluded. Uses Lanczos on x >= 0.5 and the
// reflection formula below, so moderate negative arguments are fine too.
inline double gamma(double x) {
  if (!std::isfinite(x)) throw domain_error("gamma: non-finite argument");
  if (x <= 0.0 && x == std::floor(x))
    throw domain_error("gamma: pole at non-positive integer");
  if (x >= 0.5) return std::exp(detail::lgamma_lanczos(x));
  // Gamma(x) Gamma(1-x) = pi / sin(pi x)
  return M_PI / (std::sin(M_PI * x) * std::exp(detail::lgamma_lanczos(1.0 - x)));
}

inline double log_gamma(double x) {
  if (!(x > 0.0)) throw domain_error("log_gamma: need x > 0");
  if (x >= 0.5) return detail::lgamma_lanczos(x);
  return std::log(M_PI / std::sin(M_PI * x)) - detail::lgamma_lanczos(1.0 - x);
}

// digamma(z) = Gamma'(z)/Gamma(z) for z > 0. Recurrence up to z >= 9, then
// the asymptotic series with Bernoulli numbers through B14; good to ~1e-15.
inline double digamma(double z) {
  if (!(z > 0.0) || !std::isfinite(z)) throw domain_error("digamma: need z > 0");
  double acc = 0.0;
  while (z < 9.0) {
    acc -= 1.0 / z;
    z += 1.0;
  }
  const double w = 1.0 / (z * z);
  // B2/2 z^-2, B4/4 z^-4, ... with B2=1/6, B4=-1/30, B6=1/42, B8=-1/30,
  // B10=5/66, B12=-691/2730, B14=7/6.
  double series = w * (1.0 / 12.0 -
                  w * (1.0 / 120.0 -
                  w * (1.0 / 252.0 -
                  w * (1.0 / 240.0 -
                  w * (1.0 / 132.0 -
                  w * (691.0 / 32760.0 -
                  w * (1.0 / 12.0)))))));
  return acc + std::log(z) - 0.5 / z - series;
}

// Terminating Kummer function M(-j, b, z): a degree-j polynomial in z with
// coefficient of z^k equal to (-j)_k / ((b)_k k!). These are, up to
// normalization, generalized Laguerre polynomials L_j^{(b-1)}(z).
struct KummerPoly {
  int j = 0;
  double b = 0;
  std::vector<double> coefficients;  // c[k] multiplies z^k, k = 0..j
};

inline KummerPoly make_kummer(int j, double b) {
  if (j < 0) throw domain_error("make_kummer: need j >= 0");
  if (b <= 0.0)
    throw domain_error("make_kummer: need b > 0 (b = beta + N/2 here)");
  KummerPoly P;
  P.j = j;
  P.b = b;
  P.coefficients.resize(static_cast<size_t>(j) + 1);
  double c = 1.0;
  P.coefficients[0] = c;
  for (int k = 0; k < j; ++k) {
    c *= static_cast<double>(-j + k) / ((b + k) * (k + 1));
    P.coefficients[static_cast<size_t>(k) + 1] = c;
  }
  return P;
}

inline double kummer_eval(const KummerPoly& P, double z) {
  double acc = 0.0;
  for (size_t k = P.coefficients.size(); k-- > 0;)
    acc = acc * z + P.coefficients[k];
  return acc;
}

// d/dz M(-j, b, z), itself a polynomial of degree j-1.
inline double kummer_eval_deriv(const KummerPoly& P, double z) {
  double acc = 0.0;
  for (size_t k = P.coefficients.size(); k-- > 1;)
    acc = acc * z + static_cast<double>(k) * P.coefficients[k];
  return acc;
}

inline double kummer_eval_deriv2(const KummerPoly& P, double z) {
  double acc = 0.0;
  for (size_t k = P.coefficients.size(); k-- > 2;)
    acc = acc * z + static_cast<double>(k) * static_cast<double>(k - 1) *
                        P.coefficients[k];
  return acc;
}

}  // namespace fujita

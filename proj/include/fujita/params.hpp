#pragma once

// Problem parameters and the critical exponent zoo for the semilinear heat
// equation u_t = Lap(u) + u^p on R^N. Everything downstream (shooting,
// spectra, evolution) starts from a ProblemParams value built here.

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "fujita/common.hpp"
#include "fujita/extended_real.hpp"

namespace fujita {

// Critical exponents for a given dimension. Thresholds that degenerate in
// low dimension are +infinity there, so `p < table.pJL` is always a valid
// comparison.
struct ExponentTable {
  int N = 0;
  ExtendedReal pS;     // Sobolev exponent (N+2)/(N-2)
  ExtendedReal pStar;  // N(N+2)/(N-1)^2, below pS
  ExtendedReal pJL;    // Joseph-Lundgren exponent
  ExtendedReal pL;     // Lepin exponent 1 + 6/(N-10)
  ExtendedReal pH;     // threshold for the Hermite-type spectral gap
};

struct ProblemParams {
  int N = 0;     // space dimension, N >= 3
  double p = 0;  // nonlinearity exponent, p > 1

  ExtendedReal pS, pStar, pJL, pL, pH;

  double kappa = 0;   // spatially constant steady state (p-1)^{-1/(p-1)}
  double xi = 0;      // (p+1)/(p-1), energy-weight shift
  double c0 = 0;      // (1/(2p(p-1)))^{1/(p-1)}, compactness amplitude
  double delta0 = 0;  // 1/(2(p-1)), compactness time margin

  // Amplitude of the singular steady state phi_inf = L r^{-2/(p-1)}.
  // Defined only when (N-2)p > N; absent otherwise (never NaN).
  std::optional<double> L;

  // Slow spatial decay rate of phi_alpha - phi_inf. Real only for p >= pJL;
  // absent in the oscillatory range p < pJL.
  std::optional<double> beta;

  // Spatial decay exponent m = 2/(p-1), so phi_inf = L r^{-m}.
  double m() const { return 2.0 / (p - 1.0); }

  // L^{p-1} = 2((N-2)p - N)/(p-1)^2 without going through the p-1 root.
  double L_pow_pm1() const {
    return 2.0 * ((N - 2) * p - N) / ((p - 1.0) * (p - 1.0));
  }

  bool has_singular_steady() const { return L.has_value(); }
  bool has_real_decay_rate() const { return beta.has_value(); }
};

inline ExponentTable exponent_table(int N) {
  if (N < 3) throw domain_error("exponent_table: need N >= 3");
  const double n = N;
  ExponentTable t;
  t.N = N;
  t.pS = ExtendedReal::of((n + 2.0) / (n - 2.0));
  t.pStar = ExtendedReal::of(n * (n + 2.0) / ((n - 1.0) * (n - 1.0)));
  if (N >= 11) {
    t.pJL = ExtendedReal::of(
        1.0 + 4.0 * (n - 4.0 + 2.0 * std::sqrt(n - 1.0)) /
                  ((n - 2.0) * (n - 10.0)));
    t.pL = ExtendedReal::of(1.0 + 6.0 / (n - 10.0));
    // Denominator N^2 - 12N + 16 is positive exactly for N >= 11; below that
    // the threshold plays no role and is reported as +infinity like the rest.
    t.pH = ExtendedReal::of((n * n - 8.0 * n + 8.0 * std::sqrt(n)) /
                            (n * n - 12.0 * n + 16.0));
  } else {
    t.pJL = ExtendedReal::infinity();
    t.pL = ExtendedReal::infinity();
    t.pH = ExtendedReal::infinity();
  }
  return t;
}

inline ProblemParams make_params(int N, double p) {
  if (N < 3) throw domain_error("make_params: need N >= 3");
  if (!(p > 1.0) || !std::isfinite(p))
    throw domain_error("make_params: need finite p > 1");

  ProblemParams P;
  P.N = N;
  P.p = p;
  const ExponentTable t = exponent_table(N);
  P.pS = t.pS;
  P.pStar = t.pStar;
  P.pJL = t.pJL;
  P.pL = t.pL;
  P.pH = t.pH;

  const double pm1 = p - 1.0;
  P.kappa = std::pow(pm1, -1.0 / pm1);
  P.xi = (p + 1.0) / pm1;
  P.c0 = std::pow(1.0 / (2.0 * p * pm1), 1.0 / pm1);
  P.delta0 = 1.0 / (2.0 * pm1);

  const double Lp = P.L_pow_pm1();
  if (Lp > 0.0) P.L = std::pow(Lp, 1.0 / pm1);

  // beta solves beta^2 + (N-2) beta + p L^{p-1} = 0 (slow root). The
  // discriminant vanishes exactly at p = pJL; clamp tiny negative values
  // produced by rounding right at the threshold.
  if (Lp > 0.0) {
    const double nm2 = N - 2.0;
    double disc = nm2 * nm2 - 4.0 * p * Lp;
    if (disc < 0.0 && disc > -1e-12 * nm2 * nm2) disc = 0.0;
    if (disc >= 0.0) P.beta = 0.5 * (-nm2 + std::sqrt(disc));
  }
  return P;
}

// Eigenvalue ladder of the linearization around phi_inf in the self-similar
// frame: mu_j = -(beta/2 + 1/(p-1) + j), j = 0, 1, 2, ...
inline double mu(const ProblemParams& P, int j) {
  if (j < 0) throw domain_error("mu: need j >= 0");
  if (!P.beta)
    throw domain_error("mu: decay rate beta undefined for p < pJL");
  return -(*P.beta / 2.0 + 1.0 / (P.p - 1.0) + j);
}

// Singular steady state phi_inf(r) = L r^{-2/(p-1)}, r > 0.
inline double singular_steady(const ProblemParams& P, double r) {
  if (!P.L) throw domain_error("singular_steady: L undefined, (N-2)p <= N");
  if (!(r > 0.0)) throw domain_error("singular_steady: need r > 0");
  return *P.L * std::pow(r, -P.m());
}

// Check the expected strict ordering of thresholds in one table. Returns a
// human-readable line per violated comparison (empty means all hold). The
// comparison pL < pH genuinely fails for N >= 16, where the spectral-gap
// condition is implied by p > pL and the threshold loses its bite.
inline std::vector<std::string> ordering_violations(const ExponentTable& t) {
  std::vector<std::string> out;
  auto lt = [](const ExtendedReal& a, const ExtendedReal& b) { return a < b; };
  auto note = [&](const char* claim) {
    out.push_back("N=" + std::to_string(t.N) + ": " + claim);
  };
  if (!lt(t.pStar, t.pS)) note("pStar < pS violated");
  if (!lt(t.pS, t.pJL)) note("pS < pJL violated");
  if (t.pJL.is_finite() || t.pL.is_finite()) {
    if (!lt(t.pJL, t.pL)) note("pJL < pL violated");
  }
  if (t.pL.is_finite() || t.pH.is_finite()) {
    if (!lt(t.pL, t.pH)) note("pL < pH violated");
  }
  return out;
}

}  // namespace fujita

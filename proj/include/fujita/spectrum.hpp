#pragma once

// Linearization at the singular steady state in the selfsimilar frame.
//
// The operator is
//
//   A f = f'' + ((N-1)/rho - rho/2) f' + (p L^{p-1}/rho^2 - 1/(p-1)) f,
//
// self-adjoint in L^2(a drho) with a(rho) = rho^{N-1} e^{-rho^2/4}. For
// p > pJL the slow indicial root beta is real and A has the explicit
// eigenpairs
//
//   A theta_j = mu_j theta_j,   theta_j(rho) = chat_j rho^beta M_j(rho^2/4),
//
// where M_j = M(-j, b, .) is a Kummer polynomial with b = beta + N/2 and
// mu_j = -(beta/2 + 1/(p-1) + j). This header builds those eigenpairs with
// quadrature normalization, provides a symmetric finite-difference
// discretization of A as an independent cross-check, and implements the
// projection diagnostics (xi0, xi1, tail) used to measure the convergence
// rate of rescaled steady states toward the singular one.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "fujita/common.hpp"
#include "fujita/params.hpp"
#include "fujita/quadrature.hpp"
#include "fujita/specfun.hpp"
#include "fujita/steady.hpp"

namespace fujita {

namespace detail {

// Split radius for the projection integrals: [0, eps] is handled by a
// power-law head (the integrands below are products f*g*a with f*g ~ c rho^q
// near the origin), the rest adaptively, split once more at rho = 1.
inline constexpr double kProjectionEps = 1e-3;
inline constexpr double kProjectionOuterRadius = 45.0;

// Radius cap for evaluating rescaled steady profiles. The dense phi_1
// profile ends at r = 3000 and continues with its asymptotic expansion;
// beyond this cap the expansion no longer traces back to computed data.
inline constexpr double kRescaledDomainLimit = 1e8;

}  // namespace detail

struct SpectralFrame {
  ProblemParams params;
  int jmax = 0;       // modes 0..jmax are prepared
  double beta = 0;    // slow indicial root (real, p > pJL)
  double b = 0;       // Kummer parameter beta + N/2 (> 0)
  std::vector<double> mu;          // eigenvalues mu_0 > mu_1 > ...
  std::vector<KummerPoly> modes;   // M(-j, b, .)
  std::vector<double> chat;        // normalizers, <theta_j, theta_j> = 1

  double theta(int j, double rho) const {
    check_mode(j);
    if (!(rho > 0.0)) throw domain_error("theta: need rho > 0");
    const size_t k = static_cast<size_t>(j);
    return chat[k] * std::pow(rho, beta) *
           kummer_eval(modes[k], 0.25 * rho * rho);
  }

  double theta_prime(int j, double rho) const {
    check_mode(j);
    if (!(rho > 0.0)) throw domain_error("theta_prime: need rho > 0");
    const size_t k = static_cast<size_t>(j);
    const double z = 0.25 * rho * rho;
    const double M = kummer_eval(modes[k], z);
    const double Mp = kummer_eval_deriv(modes[k], z);
    return chat[k] * (beta * std::pow(rho, beta - 1.0) * M +
                      0.5 * std::pow(rho, beta + 1.0) * Mp);
  }

  double theta_second(int j, double rho) const {
    check_mode(j);
    if (!(rho > 0.0)) throw domain_error("theta_second: need rho > 0");
    const size_t k = static_cast<size_t>(j);
    const double z = 0.25 * rho * rho;
    const double M = kummer_eval(modes[k], z);
    const double Mp = kummer_eval_deriv(modes[k], z);
    const double Mpp = kummer_eval_deriv2(modes[k], z);
    return chat[k] * (beta * (beta - 1.0) * std::pow(rho, beta - 2.0) * M +
                      (beta + 0.5) * std::pow(rho, beta) * Mp +
                      0.25 * std::pow(rho, beta + 2.0) * Mpp);
  }

  // Weighted inner product <f, g> = int_0^inf f g a(rho) drho, where the
  // product f*g behaves like a power rho^origin_power as rho -> 0. The
  // [0, eps] head is integrated analytically from that power law; the rest
  // adaptively. Throws when the origin power makes the integral diverge.
  // rel_tol must stay above the evaluation noise of f and g: differences of
  // interpolated profiles carry cancellation noise around 1e-9 relative,
  // and a tighter tolerance makes the adaptive refinement chase it forever.
  double inner(const RealFn& f, const RealFn& g, double origin_power,
               double rel_tol = 1e-11) const {
    const double q = origin_power;
    const int N = params.N;
    if (q + N - 1.0 <= -1.0)
      throw domain_error("inner: integrand power at the origin is <= -1");
    const double eps = detail::kProjectionEps;
    const double head_amp = f(eps) * g(eps) * std::pow(eps, -q);
    const double head =
        head_amp * (std::pow(eps, q + N) / (q + N) -
                    std::pow(eps, q + N + 2.0) / (4.0 * (q + N + 2.0)));
    auto integrand = [&](double r) {
      return f(r) * g(r) * std::pow(r, N - 1.0) * std::exp(-0.25 * r * r);
    };
    const double mid = integrate_adaptive(integrand, eps, 1.0, rel_tol);
    const double tail =
        integrate_adaptive(integrand, 1.0, detail::kProjectionOuterRadius,
                           rel_tol);
    return head + mid + tail;
  }

 private:
  void check_mode(int j) const {
    if (j < 0 || j > jmax)
      throw domain_error("SpectralFrame: mode index outside 0..jmax");
  }
};

// Closed-form normalizer (2^{2 beta + N - 1} Gamma(b)^2 j! / Gamma(b+j))^{-1/2},
// from the Laguerre orthogonality of the Kummer polynomials. Used as an
// independent check of the quadrature normalization in build_frame.
inline double normalizer_gamma(const ProblemParams& P, int j) {
  if (!P.beta) throw domain_error("normalizer_gamma: requires real beta");
  if (j < 0) throw domain_error("normalizer_gamma: need j >= 0");
  const double beta = *P.beta;
  const double b = beta + 0.5 * P.N;
  const double log_norm_sq = (2.0 * beta + P.N - 1.0) * std::log(2.0) +
                             2.0 * log_gamma(b) + log_gamma(j + 1.0) -
                             log_gamma(b + j);
  return std::exp(-0.5 * log_norm_sq);
}

inline SpectralFrame build_frame(const ProblemParams& P, int jmax) {
  if (!(P.pJL < P.p))
    throw domain_error("build_frame: requires p > pJL (real spectral gap)");
  if (jmax < 0 || jmax > 12)
    throw domain_error("build_frame: jmax must lie in 0..12");
  if (!P.beta || !P.L)
    throw domain_error("build_frame: missing beta or L for these parameters");

  SpectralFrame F;
  F.params = P;
  F.jmax = jmax;
  F.beta = *P.beta;
  F.b = F.beta + 0.5 * P.N;
  if (!(F.b > 0.0))
    throw domain_error("build_frame: integrability requires beta + N/2 > 0");

  // Substituting t = rho^2/4 maps <theta_j, theta_j> to a generalized
  // Gauss-Laguerre integral with exponent b - 1 and prefactor
  // 2^{2 beta + N - 1}; the integrand is a polynomial of degree 2 jmax, so
  // the rule below is exact.
  const GaussLaguerreRule rule = gauss_laguerre(jmax + 4, F.b - 1.0);
  const double prefactor = std::pow(2.0, 2.0 * F.beta + P.N - 1.0);
  for (int j = 0; j <= jmax; ++j) {
    F.mu.push_back(mu(P, j));
    F.modes.push_back(make_kummer(j, F.b));
    const KummerPoly& M = F.modes.back();
    const double norm_sq =
        prefactor *
        rule.integrate([&](double t) {
          const double v = kummer_eval(M, t);
          return v * v;
        });
    if (!(norm_sq > 0.0) || !std::isfinite(norm_sq))
      throw numerical_error("build_frame: mode normalization failed");
    F.chat.push_back(1.0 / std::sqrt(norm_sq));
  }
  return F;
}

// A twice-differentiable radial profile handed to apply_A.
struct C2Profile {
  RealFn value;
  RealFn deriv;
  RealFn second;
};

inline double apply_A(const SpectralFrame& F, const C2Profile& f, double rho) {
  if (!(rho > 0.0)) throw domain_error("apply_A: need rho > 0");
  const ProblemParams& P = F.params;
  const double drift = (P.N - 1.0) / rho - 0.5 * rho;
  const double potential =
      P.p * P.L_pow_pm1() / (rho * rho) - 1.0 / (P.p - 1.0);
  return f.second(rho) + drift * f.deriv(rho) + potential * f.value(rho);
}

enum class BoundaryCondition { dirichlet };

struct DiscreteEigs {
  std::vector<double> leading;  // largest eigenvalues, descending
  double h = 0;                 // grid spacing used
  int points = 0;               // total grid points including endpoints
};

// Second-order finite-difference discretization of A on [rho_min, rho_max],
// symmetrized in the a(rho)-weighted inner product: conjugating the flux
// form (a f')'/a by sqrt(a) gives a symmetric tridiagonal matrix with the
// same eigenvalues. Weight ratios are formed in log space.
inline DiscreteEigs discretize_A(const SpectralFrame& F, double rho_min,
                                 double rho_max, int points,
                                 BoundaryCondition bc =
                                     BoundaryCondition::dirichlet,
                                 int n_leading = 3) {
  (void)bc;  // only Dirichlet is implemented
  if (!(rho_min > 0.0) || !(rho_max > rho_min))
    throw domain_error("discretize_A: need 0 < rho_min < rho_max");
  if (points < 8) throw domain_error("discretize_A: need at least 8 points");
  if (n_leading < 1) throw domain_error("discretize_A: need n_leading >= 1");

  const ProblemParams& P = F.params;
  const double h = (rho_max - rho_min) / (points - 1);
  const int n = points - 2;  // interior unknowns
  auto log_a = [&](double r) {
    return (P.N - 1.0) * std::log(r) - 0.25 * r * r;
  };

  Eigen::VectorXd diag(n);
  Eigen::VectorXd off(n - 1);
  const double pl = P.p * P.L_pow_pm1();
  for (int i = 0; i < n; ++i) {
    const double r = rho_min + (i + 1) * h;
    const double la = log_a(r);
    const double lap = log_a(r + 0.5 * h);
    const double lam = log_a(r - 0.5 * h);
    const double wplus = std::exp(lap - la) / (h * h);
    const double wminus = std::exp(lam - la) / (h * h);
    diag[i] = -(wplus + wminus) + pl / (r * r) - 1.0 / (P.p - 1.0);
    if (i + 1 < n) {
      const double lan = log_a(r + h);
      off[i] = std::exp(lap - 0.5 * (la + lan)) / (h * h);
    }
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, off, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw numerical_error("discretize_A: tridiagonal eigensolve failed");

  DiscreteEigs out;
  out.h = h;
  out.points = points;
  const Eigen::VectorXd& ev = solver.eigenvalues();  // ascending
  const int take = std::min(n_leading, n);
  for (int k = 0; k < take; ++k) out.leading.push_back(ev[n - 1 - k]);
  return out;
}

struct ProjectionCoeffs {
  double xi0 = 0;
  double xi1 = 0;
  double tail_norm = 0;
};

// Project w onto the first two modes: xi_i = <w, theta_i>; the tail norm is
// (||w||^2 - xi0^2 - xi1^2)^{1/2} clamped at zero. origin_power is the
// exponent q in w ~ c rho^q as rho -> 0, used for the analytic head and the
// divergence bookkeeping.
inline ProjectionCoeffs project_coeffs(const SpectralFrame& F, const RealFn& w,
                                       double origin_power,
                                       double rel_tol = 1e-11) {
  if (F.jmax < 1)
    throw domain_error("project_coeffs: frame must carry modes 0 and 1");
  RealFn t0 = [&F](double r) { return F.theta(0, r); };
  RealFn t1 = [&F](double r) { return F.theta(1, r); };
  ProjectionCoeffs c;
  c.xi0 = F.inner(w, t0, origin_power + F.beta, rel_tol);
  c.xi1 = F.inner(w, t1, origin_power + F.beta, rel_tol);
  const double norm_sq = F.inner(w, w, 2.0 * origin_power, rel_tol);
  c.tail_norm =
      std::sqrt(std::max(0.0, norm_sq - c.xi0 * c.xi0 - c.xi1 * c.xi1));
  return c;
}

// psi_alpha(rho, s) = e^{-s/(p-1)} phi_alpha(e^{-s/2} rho): the bounded
// steady state of the physical equation viewed in the selfsimilar frame
// with blowup time 0. As s -> -inf it approaches the singular steady state.
inline double rescaled_steady(const ProblemParams& P, double alpha, double rho,
                              double s) {
  if (rho < 0.0) throw domain_error("rescaled_steady: need rho >= 0");
  const double r = std::exp(-0.5 * s) * rho;
  if (r > detail::kRescaledDomainLimit)
    throw domain_error(
        "rescaled_steady: radius exceeds the computed profile domain");
  return std::exp(-s / (P.p - 1.0)) * phi_alpha(P, alpha, r);
}

struct RatePoint {
  double s = 0;
  double xi0 = 0;
  double xi1 = 0;
  double tail_norm = 0;
};

struct RateDiagnostic {
  std::vector<RatePoint> points;  // ordered by increasing s
  double slope = 0;               // least-squares slope of log xi0 vs s
  double mu0 = 0;                 // analytic leading eigenvalue
  double b_alpha = 0;             // fitted expansion amplitude b(alpha)
  double chat0 = 0;               // normalizer of theta_0

  // First-order prediction log xi0(s) = log(b(alpha)/chat0) + mu0 s, from
  // phi_inf - psi_alpha ~ b(alpha) e^{mu0 s} rho^beta and
  // <rho^beta, theta_0> = 1/chat0.
  double predicted_log_xi0(double s) const {
    return std::log(b_alpha / chat0) + mu0 * s;
  }
};

// Track the deviation w(., s) = phi_inf - psi_alpha(., s) through the
// spectral projection as s decreases. Every xi0 must come out positive;
// the slope of log xi0 against s estimates mu0.
inline RateDiagnostic rate_diagnostic(const SpectralFrame& F, double alpha,
                                      double s_lo, double s_hi, int n) {
  if (n < 2) throw domain_error("rate_diagnostic: need n >= 2 samples");
  if (!(s_hi > s_lo)) throw domain_error("rate_diagnostic: need s_hi > s_lo");
  const ProblemParams& P = F.params;

  RateDiagnostic out;
  out.mu0 = F.mu[0];
  out.chat0 = F.chat[0];
  out.b_alpha = fit_b(P, alpha);

  const double q = -P.m();  // phi_inf dominates w near the origin
  for (int k = 0; k < n; ++k) {
    const double s = s_lo + (s_hi - s_lo) * k / (n - 1);
    auto w = [&](double r) {
      return singular_steady(P, r) - rescaled_steady(P, alpha, r, s);
    };
    // Profile differences carry interpolation cancellation noise; integrate
    // just above it.
    const ProjectionCoeffs c = project_coeffs(F, w, q, 1e-8);
    if (!(c.xi0 > 0.0))
      throw numerical_error(
          "rate_diagnostic: leading coefficient is not positive");
    out.points.push_back({s, c.xi0, c.xi1, c.tail_norm});
  }

  double sum_s = 0, sum_y = 0, sum_ss = 0, sum_sy = 0;
  for (const RatePoint& pt : out.points) {
    const double y = std::log(pt.xi0);
    sum_s += pt.s;
    sum_y += y;
    sum_ss += pt.s * pt.s;
    sum_sy += pt.s * y;
  }
  const double denom = n * sum_ss - sum_s * sum_s;
  out.slope = (n * sum_sy - sum_s * sum_y) / denom;
  return out;
}

}  // namespace fujita

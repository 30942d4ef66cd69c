#pragma once

// Steady states of the radial profile equations: shooting from the origin,
// classification of the outcome, the bisection search for the bounded
// members A_k of the self-similar family, the cached physical ground-state
// family phi_alpha, and the amplitude fit for phi_inf - phi_alpha.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "fujita/common.hpp"
#include "fujita/odecore.hpp"
#include "fujita/params.hpp"
#include "fujita/threads.hpp"
#include "fujita/zeronum.hpp"

namespace fujita {

enum class SteadyKind { bounded_positive, hits_zero, singular_reference };

// A classified steady-state shot. Profiles are valid on [0, domain_end];
// bounded profiles additionally carry a fitted far-field power-law tail
//   w(r) ~ (t0 + t1/r^2 + t2/r^4) r^{-m},  m = 2/(p-1),
// which value()/derivative() use beyond domain_end.
struct SteadyState {
  ProblemParams params;
  double alpha = 0;  // w(0); meaningless for the singular reference
  Frame frame = Frame::selfsimilar;
  SteadyKind kind = SteadyKind::bounded_positive;

  std::optional<DenseSolution> profile;  // absent for constant / singular
  bool is_constant = false;
  double const_value = 0;

  std::optional<int> k;           // intersection count against phi_inf
  std::optional<double> rho_alpha;  // first zero (hits_zero only)
  std::optional<double> c_a;      // fitted tail amplitude (bounded only)

  std::optional<std::array<double, 3>> tail;  // (t0, t1, t2) as above
  double domain_end = 0;

  double value(double r) const {
    if (kind == SteadyKind::singular_reference) return singular_steady(params, r);
    if (is_constant) return const_value;
    if (r <= domain_end) return profile->value(r);
    if (tail) {
      const auto& t = *tail;
      const double u = 1.0 / (r * r);
      return (t[0] + u * (t[1] + u * t[2])) * std::pow(r, -params.m());
    }
    throw domain_error("SteadyState: radius beyond computed domain");
  }

  double derivative(double r) const {
    if (kind == SteadyKind::singular_reference) {
      const double m = params.m();
      return -m * singular_steady(params, r) / r;
    }
    if (is_constant) return 0.0;
    if (r <= domain_end) return profile->derivative(r);
    if (tail) {
      const auto& t = *tail;
      const double m = params.m();
      const double u = 1.0 / (r * r);
      const double poly = t[0] + u * (t[1] + u * t[2]);
      const double dpoly = -(2.0 * t[1] + 4.0 * t[2] * u) * u / r;
      return (dpoly - m * poly / r) * std::pow(r, -m);
    }
    throw domain_error("SteadyState: radius beyond computed domain");
  }
};

namespace detail {

// Least-squares fit of samples (r_i, y_i) to y = c0 + c1/r + c2/r^2.
// Returns coefficients and the rms residual.
struct InversePolyFit {
  double c0 = 0, c1 = 0, c2 = 0, rms = 0;
};

inline InversePolyFit fit_inverse_poly(const std::vector<double>& r,
                                       const std::vector<double>& y,
                                       int nterms) {
  const int n = static_cast<int>(r.size());
  Eigen::MatrixXd A(n, nterms);
  Eigen::VectorXd b(n);
  for (int i = 0; i < n; ++i) {
    double basis = 1.0;
    for (int j = 0; j < nterms; ++j) {
      A(i, j) = basis;
      basis /= r[static_cast<size_t>(i)];
    }
    b(i) = y[static_cast<size_t>(i)];
  }
  const Eigen::VectorXd x = A.colPivHouseholderQr().solve(b);
  InversePolyFit f;
  f.c0 = x(0);
  if (nterms > 1) f.c1 = x(1);
  if (nterms > 2) f.c2 = x(2);
  f.rms = std::sqrt((A * x - b).squaredNorm() / n);
  return f;
}

// Count intersections of a shot profile with phi_inf on (0, r_hi]. The
// numerical count runs on [trunc, r_hi]; the single possible crossing
// below trunc (phi_inf diverges at the origin while w stays bounded) is
// recovered from the sign at trunc.
inline int count_vs_singular(const ProblemParams& P, const DenseSolution& sol,
                             double r_hi) {
  double trunc = kSingularTruncation;
  if (r_hi <= 2.0 * trunc) trunc = 0.05 * r_hi;
  auto w = [&](double r) { return sol.value(r); };
  auto ref = [&](double r) { return singular_steady(P, r); };
  const int near_origin = w(trunc) > ref(trunc) ? 1 : 0;
  const int n_coarse =
      std::max(1024, static_cast<int>(64.0 * (r_hi - trunc)));
  const ZeroCount zc = intersection_number(w, ref, trunc, r_hi * (1.0 - 1e-9),
                                           n_coarse);
  return near_origin + zc.count;
}

}  // namespace detail

inline double default_rmax(Frame frame) {
  return frame == Frame::selfsimilar ? 40.0 : 200.0;
}

// The singular steady state phi_inf as a SteadyState value (used in atlas
// output and comparisons; never produced by shooting).
inline SteadyState singular_state(const ProblemParams& P) {
  if (!P.L) throw domain_error("singular_state: L undefined, (N-2)p <= N");
  SteadyState s;
  s.params = P;
  s.frame = Frame::selfsimilar;
  s.kind = SteadyKind::singular_reference;
  s.alpha = std::numeric_limits<double>::infinity();
  s.domain_end = std::numeric_limits<double>::infinity();
  return s;
}

// Shoot from w(0) = alpha and classify the outcome. Constant self-similar
// solutions (alpha = 0 or alpha = kappa) are recognized analytically and
// never integrated.
inline SteadyState shoot(const ProblemParams& P, double alpha, Frame frame,
                         double rmax = 0.0, double rtol = 1e-10,
                         double atol = 1e-12) {
  if (alpha < 0.0) throw domain_error("shoot: need alpha >= 0");
  if (rmax == 0.0) rmax = default_rmax(frame);
  if (!(rmax > 1.0)) throw domain_error("shoot: need rmax > 1");

  SteadyState s;
  s.params = P;
  s.alpha = alpha;
  s.frame = frame;

  const bool is_kappa = frame == Frame::selfsimilar &&
                        std::abs(alpha - P.kappa) <= 1e-12 * P.kappa;
  if (alpha == 0.0 || is_kappa) {
    s.kind = SteadyKind::bounded_positive;
    s.is_constant = true;
    s.const_value = is_kappa ? P.kappa : 0.0;
    s.domain_end = rmax;
    if (P.L) {
      // kappa crosses phi_inf exactly once, at r = (L/kappa)^{(p-1)/2};
      // the zero solution never does.
      s.k = is_kappa ? 1 : 0;
    }
    return s;
  }

  RadialIVP ivp;
  ivp.params = P;
  ivp.frame = frame;
  ivp.origin_value = alpha;
  DenseSolution sol = integrate(ivp, rmax, rtol, atol);

  switch (sol.termination) {
    case Termination::hit_zero: {
      s.kind = SteadyKind::hits_zero;
      s.rho_alpha = sol.rho_end;
      s.domain_end = sol.rho_end;
      if (P.L) s.k = detail::count_vs_singular(P, sol, sol.rho_end);
      s.profile = std::move(sol);
      return s;
    }
    case Termination::reached_rmax: {
      // Power-law tail check: fit w rho^m over the last 40% of the range
      // against t0 + t1/rho^2 + t2/rho^4 (the expansion is even in 1/rho).
      // A clean fit certifies bounded_positive; c_a is the limit t0.
      const double m = P.m();
      const int K = 12;
      std::vector<double> r2s(K), cs(K);
      for (int i = 0; i < K; ++i) {
        const double r = 0.6 * rmax + (0.4 * rmax) * i / (K - 1);
        r2s[static_cast<size_t>(i)] = r * r;
        cs[static_cast<size_t>(i)] = sol.value(r) * std::pow(r, m);
      }
      const auto fit = detail::fit_inverse_poly(r2s, cs, 3);
      if (!(fit.c0 > 0.0) || fit.rms > 1e-3 * std::abs(fit.c0))
        throw numerical_error(
            "shoot: inconclusive classification at rmax (no clean power-law "
            "tail); raise rmax");
      s.kind = SteadyKind::bounded_positive;
      s.domain_end = rmax;
      s.c_a = fit.c0;
      s.tail = {fit.c0, fit.c1, fit.c2};
      if (P.L) s.k = detail::count_vs_singular(P, sol, rmax);
      s.profile = std::move(sol);
      return s;
    }
    case Termination::blew_up:
      throw numerical_error(
          "shoot: profile escaped beyond the blowup threshold before rmax");
    case Termination::stiff_failure:
      throw numerical_error("shoot: step size underflow");
  }
  throw numerical_error("shoot: unreachable");
}

namespace detail {

enum class ShotSide { hits_zero_first, crosses_k_first };

// Discriminator for the A_k bisection: which happens first along the shot,
// the zero crossing or the (k+1)-th intersection with phi_inf. Every
// intersection counted lies before the shot's endpoint, so reaching the
// count k+1 decides the side even when the shot later hits zero.
inline ShotSide classify_side(const ProblemParams& P, double alpha, int k,
                              double rmax) {
  RadialIVP ivp;
  ivp.params = P;
  ivp.frame = Frame::selfsimilar;
  ivp.origin_value = alpha;
  for (int attempt = 0; attempt < 3; ++attempt) {
    const DenseSolution sol = integrate(ivp, rmax, 1e-10, 1e-12);
    const int total = count_vs_singular(P, sol, sol.rho_end);
    if (total >= k + 1) return ShotSide::crosses_k_first;
    if (sol.termination == Termination::hit_zero)
      return ShotSide::hits_zero_first;
    rmax *= 1.5;  // inconclusive: look further out
  }
  throw numerical_error(
      "find_Ak: shot neither crosses zero nor accumulates k+1 intersections; "
      "raise rmax");
}

}  // namespace detail

// Bisection search for the bounded positive self-similar profile with
// exactly k intersections against phi_inf. Requires pS < p < pL and k >= 2:
// A_1 = {kappa} holds analytically and is not searched numerically.
inline SteadyState find_Ak(const ProblemParams& P, int k, double alpha_lo,
                           double alpha_hi, double rmax = 40.0) {
  if (k < 2)
    throw domain_error(
        "find_Ak: need k >= 2 (A_1 = {kappa} is known analytically)");
  if (!(P.p > P.pS.as_double()) || !(P.p < P.pL))
    throw domain_error("find_Ak: requires pS < p < pL");
  if (!(alpha_lo > 0.0) || !(alpha_hi > alpha_lo))
    throw domain_error("find_Ak: invalid bracket");

  using detail::ShotSide;
  ShotSide side_lo = detail::classify_side(P, alpha_lo, k, rmax);
  ShotSide side_hi = detail::classify_side(P, alpha_hi, k, rmax);
  if (side_lo == side_hi)
    throw domain_error("find_Ak: bracket endpoints classify identically");

  double lo = alpha_lo, hi = alpha_hi;
  while (hi - lo > 1e-12 * hi) {
    const double mid = 0.5 * (lo + hi);
    if (detail::classify_side(P, mid, k, rmax) == side_lo)
      lo = mid;
    else
      hi = mid;
  }
  const double alpha = 0.5 * (lo + hi);

  // The bisection pins alpha to relative width 1e-12; the remaining error
  // excites the e^{rho^2/4} mode, so the profile is trustworthy only while
  // that contamination stays below ~1e-4 relative: rho <= 2 sqrt(ln 1e8).
  double r_eff = 2.0 * std::sqrt(std::log(1e8));
  for (int attempt = 0; attempt < 4; ++attempt) {
    RadialIVP ivp;
    ivp.params = P;
    ivp.frame = Frame::selfsimilar;
    ivp.origin_value = alpha;
    const DenseSolution probe = integrate(ivp, r_eff, 1e-12, 1e-14);
    if (probe.termination == Termination::reached_rmax) break;
    r_eff *= 0.93;
    if (attempt == 3)
      throw numerical_error("find_Ak: refined shot lost validity too early");
  }

  SteadyState s = shoot(P, alpha, Frame::selfsimilar, r_eff, 1e-12, 1e-14);
  if (s.kind != SteadyKind::bounded_positive)
    throw numerical_error("find_Ak: refined shot failed classification");
  if (!s.k || *s.k != k)
    throw numerical_error("find_Ak: refined profile has wrong zero count");
  return s;
}

// ---------------------------------------------------------------------------
// Physical ground-state family phi_alpha and the amplitude fit b(alpha).

namespace detail {

struct PhysicalGround {
  ProblemParams P;
  DenseSolution phi1;        // alpha = 1 profile, dense to r_dense
  double r_dense = 0;        // end of dense coverage
  double b1 = 0;             // fitted amplitude: phi_inf - phi_1 ~ b1 r^beta
  bool has_b = false;

  // phi_1 with asymptotic continuation L r^{-m} - b1 r^{beta} beyond the
  // dense range (only available when beta is real, i.e. p >= pJL).
  double value(double r) const {
    if (r <= r_dense) return phi1.value(r);
    if (!has_b)
      throw domain_error("phi_alpha: radius beyond computed domain");
    return singular_steady(P, r) - b1 * std::pow(r, *P.beta);
  }
};

// Fit b from samples of (phi_inf - w)(r) r^{-beta} over [r0, r1] against
// b + c/r + d/r^2 (the remainder is o(r^beta), smooth in 1/r).
inline double fit_amplitude(const ProblemParams& P,
                            const std::function<double(double)>& w, double r0,
                            double r1) {
  const int K = 12;
  std::vector<double> rs(K), ys(K);
  for (int i = 0; i < K; ++i) {
    const double r = r0 * std::pow(r1 / r0, static_cast<double>(i) / (K - 1));
    rs[static_cast<size_t>(i)] = r;
    ys[static_cast<size_t>(i)] =
        (singular_steady(P, r) - w(r)) * std::pow(r, -*P.beta);
  }
  const auto fit = fit_inverse_poly(rs, ys, 3);
  if (!(std::abs(fit.c0) > 0.0) || fit.rms > 0.05 * std::abs(fit.c0))
    throw numerical_error("fit_b: amplitude fit did not converge");
  return fit.c0;
}

inline const PhysicalGround& physical_ground(const ProblemParams& P) {
  static std::map<std::pair<int, double>, std::unique_ptr<PhysicalGround>>
      cache;
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  auto key = std::make_pair(P.N, P.p);
  auto it = cache.find(key);
  if (it != cache.end()) return *it->second;

  if (!(P.p > P.pS.as_double()))
    throw domain_error(
        "phi_alpha: bounded ground states require p > pS");

  auto g = std::make_unique<PhysicalGround>();
  g->P = P;
  g->r_dense = 3000.0;
  RadialIVP ivp;
  ivp.params = P;
  ivp.frame = Frame::physical;
  ivp.origin_value = 1.0;
  g->phi1 = integrate(ivp, g->r_dense, 1e-12, 1e-14);
  if (g->phi1.termination != Termination::reached_rmax)
    throw numerical_error("phi_alpha: ground-state shot failed to reach rmax");
  if (P.beta) {
    auto w = [&](double r) { return g->phi1.value(r); };
    g->b1 = fit_amplitude(P, w, 20.0, 120.0);
    g->has_b = true;
  }
  auto [pos, inserted] = cache.emplace(key, std::move(g));
  (void)inserted;
  return *pos->second;
}

}  // namespace detail

// Bounded positive steady state of the physical equation with phi_alpha(0)
// = alpha, through the exact scaling phi_alpha(r) = alpha phi_1(alpha^{(p-1)/2} r)
// of the cached alpha = 1 profile.
inline double phi_alpha(const ProblemParams& P, double alpha, double r) {
  if (!(alpha > 0.0)) throw domain_error("phi_alpha: need alpha > 0");
  if (r < 0.0) throw domain_error("phi_alpha: need r >= 0");
  const detail::PhysicalGround& g = detail::physical_ground(P);
  const double scale = std::pow(alpha, 0.5 * (P.p - 1.0));
  return alpha * g.value(scale * r);
}

// Amplitude b(alpha) in phi_alpha = phi_inf - b(alpha) r^beta + o(r^beta).
// Defined for p >= pJL, where beta is real. The fit window is scaled so
// every alpha is fitted at the same radii of the underlying phi_1 profile.
inline double fit_b(const ProblemParams& P, double alpha) {
  if (!P.beta) throw domain_error("fit_b: requires p >= pJL (real beta)");
  if (!(alpha > 0.0)) throw domain_error("fit_b: need alpha > 0");
  const double scale = std::pow(alpha, 0.5 * (P.p - 1.0));
  auto w = [&](double r) { return phi_alpha(P, alpha, r); };
  return detail::fit_amplitude(P, w, 20.0 / scale, 120.0 / scale);
}

// Shoot a grid of alphas in parallel (deterministic order by index).
inline std::vector<SteadyState> sweep_alpha(const ProblemParams& P,
                                            Frame frame, double alpha_lo,
                                            double alpha_hi, int n,
                                            double rmax = 0.0) {
  if (n < 2) throw domain_error("sweep_alpha: need n >= 2");
  if (!(alpha_hi > alpha_lo) || alpha_lo < 0.0)
    throw domain_error("sweep_alpha: invalid alpha range");
  std::vector<SteadyState> out(static_cast<size_t>(n));
  parallel_for(n, [&](int i) {
    const double a = alpha_lo + (alpha_hi - alpha_lo) * i / (n - 1);
    out[static_cast<size_t>(i)] = shoot(P, a, frame, rmax);
  });
  return out;
}

}  // namespace fujita

#pragma once

// Weighted Lyapunov energy of radial profiles,
//   E(w) = int_0^inf ( w'^2/2 + w^2/(2(p-1)) - |w|^{p+1}/(p+1) ) a(rho) drho,
//   a(rho) = rho^{N-1} e^{-rho^2/4},
// together with the closed forms for the constant and singular members and
// the Gamma-function form of their ratio. The angular measure |S^{N-1}| is
// dropped throughout; ratios and orderings are unaffected.

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "fujita/common.hpp"
#include "fujita/params.hpp"
#include "fujita/quadrature.hpp"
#include "fujita/steady.hpp"

namespace fujita {

namespace detail {

inline const WeightedQuadrature& cached_weight_rule(int N) {
  static std::map<int, std::unique_ptr<WeightedQuadrature>> cache;
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  auto it = cache.find(N);
  if (it == cache.end()) {
    it = cache
             .emplace(N, std::make_unique<WeightedQuadrature>(
                             WeightedQuadrature::make(N, 200)))
             .first;
  }
  return *it->second;
}

inline double energy_density(double w, double wp, const ProblemParams& P) {
  const double wabs = std::abs(w);
  return 0.5 * wp * wp + w * w / (2.0 * (P.p - 1.0)) -
         std::pow(wabs, P.p + 1.0) / (P.p + 1.0);
}

}  // namespace detail

// Energy by the 200-point Gaussian-weight rule; the profile accessors must
// cover [0, ~56] (bounded states with a fitted tail do).
inline double energy(const RealFn& w, const RealFn& wp,
                     const ProblemParams& P) {
  const WeightedQuadrature& q = detail::cached_weight_rule(P.N);
  return q.integrate(
      [&](double r) { return detail::energy_density(w(r), wp(r), P); });
}

// Energy restricted to [0, r_end] by adaptive quadrature, for profiles that
// terminate (hits_zero shots); the density vanishes with w beyond the zero.
inline double energy_on(const RealFn& w, const RealFn& wp,
                        const ProblemParams& P, double r_end) {
  if (!(r_end > 0.0)) throw domain_error("energy_on: need r_end > 0");
  auto f = [&](double r) {
    return detail::energy_density(w(r), wp(r), P) * std::pow(r, P.N - 1.0) *
           std::exp(-0.25 * r * r);
  };
  return integrate_adaptive(f, 0.0, r_end, 1e-12);
}

// Energy of a classified steady state, dispatching on its domain coverage.
inline double energy_of(const SteadyState& s) {
  if (s.kind == SteadyKind::singular_reference)
    throw domain_error("energy_of: use energy_singular for phi_inf");
  auto w = [&](double r) { return s.value(r); };
  auto wp = [&](double r) { return s.derivative(r); };
  if (s.kind == SteadyKind::hits_zero) return energy_on(w, wp, s.params, s.domain_end);
  if (s.is_constant || s.tail) return energy(w, wp, s.params);
  return energy_on(w, wp, s.params, s.domain_end);
}

// E(kappa) in closed form. Every steady state obeys the Nehari-type
// identity E = ((p-1)/(2(p+1))) int |w|^{p+1} a drho, which for the
// constant gives ((p-1)/(2(p+1))) kappa^{p+1} 2^{N-1} Gamma(N/2).
inline double energy_kappa(const ProblemParams& P) {
  return (P.p - 1.0) / (2.0 * (P.p + 1.0)) * std::pow(P.kappa, P.p + 1.0) *
         std::pow(2.0, P.N - 1) * fujita::gamma(0.5 * P.N);
}

// E(phi_inf) in closed form (same identity; the weight moment shifts by
// 2 xi = m(p+1)). Finite exactly when xi < N/2, i.e. p > pS.
inline double energy_singular(const ProblemParams& P) {
  if (!P.L) throw domain_error("energy_singular: L undefined");
  if (!(P.xi < 0.5 * P.N))
    throw domain_error("energy_singular: diverges for p <= pS (xi >= N/2)");
  return (P.p - 1.0) / (2.0 * (P.p + 1.0)) * std::pow(*P.L, P.p + 1.0) *
         std::pow(2.0, P.N - 2.0 * P.xi - 1.0) *
         fujita::gamma(0.5 * P.N - P.xi);
}

// Independent numerical value of E(phi_inf): the singular head [0, eps] is
// integrated analytically term by term (three power laws, expanding the
// Gaussian), the rest adaptively.
inline double energy_singular_quadrature(const ProblemParams& P) {
  if (!P.L) throw domain_error("energy_singular_quadrature: L undefined");
  if (!(P.xi < 0.5 * P.N))
    throw domain_error("energy_singular_quadrature: diverges for p <= pS");
  const double L = *P.L, m = P.m();
  const double eps = 1e-3;

  // Density of phi_inf = L rho^{-m}: three power laws rho^{s-1} with
  // s = N - 2xi (gradient), N - 2m (mass), N - 2xi (reaction).
  // int_0^eps rho^{s-1} e^{-rho^2/4} = eps^s/s - eps^{s+2}/(4(s+2)) + ...
  auto head_moment = [&](double s) {
    return std::pow(eps, s) / s - std::pow(eps, s + 2.0) / (4.0 * (s + 2.0)) +
           std::pow(eps, s + 4.0) / (32.0 * (s + 4.0));
  };
  const double grad_c = 0.5 * m * m * L * L;
  const double mass_c = L * L / (2.0 * (P.p - 1.0));
  const double reac_c = -std::pow(L, P.p + 1.0) / (P.p + 1.0);
  const double head = (grad_c + reac_c) * head_moment(P.N - 2.0 * P.xi) +
                      mass_c * head_moment(P.N - 2.0 * m);

  auto density = [&](double r) {
    const double w = singular_steady(P, r);
    const double wp = -m * w / r;
    return detail::energy_density(w, wp, P) * std::pow(r, P.N - 1.0) *
           std::exp(-0.25 * r * r);
  };
  const double body = integrate_adaptive(density, eps, 50.0, 1e-12);
  return head + body;
}

// The ratio F(N, p) = E(phi_inf)/E(kappa) in pure Gamma form:
//   F = Gamma(N/2 - xi)/Gamma(N/2) * ((N - 1 - xi)/2)^xi.
inline double energy_ratio_F(const ProblemParams& P) {
  if (!(P.p > P.pS.as_double()))
    throw domain_error("energy_ratio_F: requires p > pS");
  return fujita::gamma(0.5 * P.N - P.xi) / fujita::gamma(0.5 * P.N) *
         std::pow(0.5 * (P.N - 1.0 - P.xi), P.xi);
}

// The same ratio with the numerator from quadrature, for cross-checking.
inline double energy_ratio_F_quadrature(const ProblemParams& P) {
  return energy_singular_quadrature(P) / energy_kappa(P);
}

struct EnergyProbeEntry {
  double alpha = 0;
  double E = 0;
  bool inside_window = false;  // E(kappa) < E < E(phi_inf)
};

struct EnergyProbeReport {
  double E_kappa = 0;
  double E_singular = 0;
  std::vector<EnergyProbeEntry> entries;
  bool all_inside = true;
};

// Evaluate the energy ordering E(kappa) < E(w) < E(phi_inf) for the
// bounded nonconstant members of an atlas.
inline EnergyProbeReport energy_condition_probe(
    const ProblemParams& P, const std::vector<SteadyState>& atlas) {
  EnergyProbeReport rep;
  rep.E_kappa = energy_kappa(P);
  rep.E_singular = energy_singular(P);
  for (const auto& s : atlas) {
    if (s.kind != SteadyKind::bounded_positive || s.is_constant) continue;
    EnergyProbeEntry e;
    e.alpha = s.alpha;
    e.E = energy_of(s);
    e.inside_window = rep.E_kappa < e.E && e.E < rep.E_singular;
    rep.all_inside = rep.all_inside && e.inside_window;
    rep.entries.push_back(e);
  }
  return rep;
}

}  // namespace fujita

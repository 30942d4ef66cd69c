#pragma once

// Radial ODE integration for steady-state profiles, in both the physical
// frame  w'' + (N-1)/r w' + |w|^{p-1} w = 0  and the self-similar frame
// w'' + ((N-1)/rho - rho/2) w' - w/(p-1) + |w|^{p-1} w = 0.
//
// Integrator: Dormand-Prince 5(4) with FSAL, PI-free standard controller,
// and the classical quartic dense-output polynomial. Events (zero crossing,
// blowup threshold) are located by bisection on the dense output, and
// grazing near-zeros are flagged separately so callers never mistake a
// tangency for a sign change.

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "fujita/common.hpp"
#include "fujita/params.hpp"

namespace fujita {

enum class Frame { physical, selfsimilar };

enum class Termination { reached_rmax, hit_zero, blew_up, stiff_failure };

// Odd-extension power: sign(w) |w|^p. Keeps the vector field defined for
// transient negative values; trajectories are truncated at the zero event
// anyway, so the extension never influences reported profiles.
inline double signed_pow(double w, double p) {
  if (w == 0.0) return 0.0;
  return w > 0.0 ? std::pow(w, p) : -std::pow(-w, p);
}

// Truncated Taylor expansion about the origin for a regular profile with
// w(0) = a, w'(0) = 0:  w = a + c2 rho^2 + c4 rho^4 + O(rho^6).
struct OriginSeries {
  double a = 0, c2 = 0, c4 = 0;
  int order = 4;

  double value(double rho) const {
    const double r2 = rho * rho;
    return order >= 4 ? a + r2 * (c2 + r2 * c4) : a + r2 * c2;
  }
  double derivative(double rho) const {
    const double r2 = rho * rho;
    return order >= 4 ? rho * (2.0 * c2 + 4.0 * c4 * r2) : 2.0 * c2 * rho;
  }
};

inline OriginSeries origin_series(double a, const ProblemParams& P,
                                  Frame frame, int order = 4) {
  if (order != 2 && order != 4)
    throw domain_error("origin_series: order must be 2 or 4");
  if (a < 0.0) throw domain_error("origin_series: need a >= 0");
  OriginSeries s;
  s.a = a;
  s.order = order;
  const double N = P.N, p = P.p;
  const double ap = signed_pow(a, p);
  const double apm1 = a > 0.0 ? std::pow(a, p - 1.0) : 0.0;
  if (frame == Frame::selfsimilar) {
    s.c2 = (a / (p - 1.0) - ap) / (2.0 * N);
    s.c4 = s.c2 * (1.0 + 1.0 / (p - 1.0) - p * apm1) / (4.0 * (N + 2.0));
  } else {
    s.c2 = -ap / (2.0 * N);
    s.c4 = -p * apm1 * s.c2 / (4.0 * (N + 2.0));
  }
  if (order == 2) s.c4 = 0.0;
  return s;
}

struct RadialIVP {
  ProblemParams params;
  Frame frame = Frame::selfsimilar;
  double origin_value = 0;        // w(0)
  double start_radius = 1e-4;     // series handoff radius rho_0
  double blowup_threshold = 1e8;  // |w| beyond this terminates as blew_up
  int series_order = 4;           // origin series order (2 or 4)
};

namespace detail {

// One accepted step with its dense-output polynomial (per component).
struct DenseStep {
  double t0 = 0, h = 0;
  std::array<double, 2> r1{}, r2{}, r3{}, r4{}, r5{};

  double eval(int comp, double t) const {
    const double th = (t - t0) / h;
    const double th1 = 1.0 - th;
    return r1[comp] +
           th * (r2[comp] + th1 * (r3[comp] + th * (r4[comp] + th1 * r5[comp])));
  }
};

}  // namespace detail

// Piecewise-polynomial solution of a RadialIVP. value()/derivative() cover
// [0, rho_end]: the origin series below start_radius, dense steps above.
struct DenseSolution {
  double rho0 = 0;     // series handoff radius
  double rho_end = 0;  // last valid radius (event location if terminated)
  Termination termination = Termination::reached_rmax;
  OriginSeries origin;
  std::vector<detail::DenseStep> steps;

  // Location of the terminating event (zero crossing or blowup), if any.
  std::optional<double> event_radius;
  // Radii of grazing local extrema with |w| below the tangency tolerance:
  // diagnostics, never counted as crossings.
  std::vector<double> tangency_radii;

  double value(double rho) const { return eval(0, rho); }
  double derivative(double rho) const { return eval(1, rho); }

 private:
  double eval(int comp, double rho) const {
    if (rho < 0.0 || rho > rho_end * (1.0 + 1e-12) + 1e-300)
      throw domain_error("DenseSolution: radius outside computed domain");
    if (rho <= rho0 || steps.empty())
      return comp == 0 ? origin.value(rho) : origin.derivative(rho);
    // Binary search for the step containing rho.
    size_t lo = 0, hi = steps.size() - 1;
    while (lo < hi) {
      const size_t mid = (lo + hi + 1) / 2;
      if (steps[mid].t0 <= rho)
        lo = mid;
      else
        hi = mid - 1;
    }
    return steps[lo].eval(comp, std::min(rho, rho_end));
  }
};

namespace detail {

using Vec2 = std::array<double, 2>;

struct RadialRHS {
  double N, p, pm1_inv;
  bool selfsim;

  Vec2 operator()(double rho, const Vec2& y) const {
    const double drift =
        (N - 1.0) / rho - (selfsim ? 0.5 * rho : 0.0);
    const double react =
        (selfsim ? y[0] * pm1_inv : 0.0) - signed_pow(y[0], p);
    return {y[1], -drift * y[1] + react};
  }
};

}  // namespace detail

// Integrate a radial IVP out to rmax with zero-crossing and blowup events.
// Events are located to 1e-12 (absolute in rho, relative beyond rho = 1) by
// bisection on the dense output.
inline DenseSolution integrate(const RadialIVP& ivp, double rmax,
                               double rtol = 1e-10, double atol = 1e-12) {
  const ProblemParams& P = ivp.params;
  if (!(rmax > ivp.start_radius))
    throw domain_error("integrate: need rmax > start_radius");
  if (!(ivp.start_radius > 0.0))
    throw domain_error("integrate: need start_radius > 0");

  DenseSolution sol;
  sol.rho0 = ivp.start_radius;
  sol.origin = origin_series(ivp.origin_value, P, ivp.frame, ivp.series_order);

  const detail::RadialRHS f{static_cast<double>(P.N), P.p,
                            1.0 / (P.p - 1.0), ivp.frame == Frame::selfsimilar};

  using detail::Vec2;
  double t = ivp.start_radius;
  Vec2 y{sol.origin.value(t), sol.origin.derivative(t)};
  Vec2 k1 = f(t, y);

  // Initial step heuristic: small relative to both rmax and solution scale.
  double h = std::min(1e-3 * (rmax - t),
                      1e-2 / (1.0 + std::abs(k1[1]) + std::abs(k1[0])));
  h = std::max(h, 1e-10);

  double running_max = std::abs(y[0]);
  const double tangency_tol = 1e3 * atol;

  const int kMaxSteps = 1000000;
  sol.steps.reserve(1024);

  for (int step = 0; step < kMaxSteps; ++step) {
    if (t >= rmax) {
      sol.termination = Termination::reached_rmax;
      sol.rho_end = rmax;
      return sol;
    }
    if (h > rmax - t) h = rmax - t;
    if (h < 1e-14 * std::max(1.0, std::abs(t))) {
      sol.termination = Termination::stiff_failure;
      sol.rho_end = t;
      return sol;
    }

    // Dormand-Prince 5(4) stages (FSAL: k1 carried over).
    Vec2 k2, k3, k4, k5, k6, k7, yt, y1;
    auto stage = [&](double c, std::initializer_list<std::pair<double, const Vec2*>> terms) {
      yt = y;
      for (auto& [a, k] : terms) {
        yt[0] += h * a * (*k)[0];
        yt[1] += h * a * (*k)[1];
      }
      return f(t + c * h, yt);
    };
    k2 = stage(0.2, {{0.2, &k1}});
    k3 = stage(0.3, {{3.0 / 40, &k1}, {9.0 / 40, &k2}});
    k4 = stage(0.8, {{44.0 / 45, &k1}, {-56.0 / 15, &k2}, {32.0 / 9, &k3}});
    k5 = stage(8.0 / 9, {{19372.0 / 6561, &k1},
                         {-25360.0 / 2187, &k2},
                         {64448.0 / 6561, &k3},
                         {-212.0 / 729, &k4}});
    k6 = stage(1.0, {{9017.0 / 3168, &k1},
                     {-355.0 / 33, &k2},
                     {46732.0 / 5247, &k3},
                     {49.0 / 176, &k4},
                     {-5103.0 / 18656, &k5}});
    for (int c = 0; c < 2; ++c)
      y1[c] = y[c] + h * (35.0 / 384 * k1[c] + 500.0 / 1113 * k3[c] +
                          125.0 / 192 * k4[c] - 2187.0 / 6784 * k5[c] +
                          11.0 / 84 * k6[c]);
    k7 = f(t + h, y1);

    // Embedded 4th-order error estimate.
    double err = 0.0;
    for (int c = 0; c < 2; ++c) {
      const double e4 = y[c] + h * (5179.0 / 57600 * k1[c] +
                                    7571.0 / 16695 * k3[c] +
                                    393.0 / 640 * k4[c] -
                                    92097.0 / 339200 * k5[c] +
                                    187.0 / 2100 * k6[c] + 1.0 / 40 * k7[c]);
      const double sc =
          atol + rtol * std::max(std::abs(y[c]), std::abs(y1[c]));
      const double d = (y1[c] - e4) / sc;
      err += d * d;
    }
    err = std::sqrt(0.5 * err);

    if (err > 1.0) {
      h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
      continue;
    }

    // Accepted: build the dense-output polynomial.
    detail::DenseStep ds;
    ds.t0 = t;
    ds.h = h;
    for (int c = 0; c < 2; ++c) {
      const double ydiff = y1[c] - y[c];
      const double bspl = h * k1[c] - ydiff;
      ds.r1[c] = y[c];
      ds.r2[c] = ydiff;
      ds.r3[c] = bspl;
      ds.r4[c] = ydiff - h * k7[c] - bspl;
      ds.r5[c] = h * (-12715105075.0 / 11282082432 * k1[c] +
                      87487479700.0 / 32700410799 * k3[c] -
                      10690763975.0 / 1880347072 * k4[c] +
                      701980252875.0 / 199316789632 * k5[c] -
                      1453857185.0 / 822651844 * k6[c] +
                      69997945.0 / 29380423 * k7[c]);
    }
    sol.steps.push_back(ds);

    const double t_new = t + h;
    const double bis_tol = 1e-12 * std::max(1.0, std::abs(t_new));
    auto bisect = [&](auto&& g) {
      double lo = t, hi = t_new;
      double glo = g(lo);
      while (hi - lo > bis_tol) {
        const double mid = 0.5 * (lo + hi);
        if (g(mid) * glo > 0.0)
          lo = mid, glo = g(lo);
        else
          hi = mid;
      }
      return 0.5 * (lo + hi);
    };

    // Zero-crossing event (strict sign change of w across the step).
    if (y[0] * y1[0] < 0.0) {
      const double rz = bisect([&](double r) { return ds.eval(0, r); });
      sol.termination = Termination::hit_zero;
      sol.rho_end = rz;
      sol.event_radius = rz;
      return sol;
    }

    // Grazing diagnostic: extremum of w inside the step with |w| tiny.
    if (y[1] * y1[1] < 0.0 && y[0] * y1[0] > 0.0) {
      const double re = bisect([&](double r) { return ds.eval(1, r); });
      if (std::abs(ds.eval(0, re)) < tangency_tol * std::max(1.0, running_max))
        sol.tangency_radii.push_back(re);
    }

    // Blowup event.
    if (std::abs(y1[0]) > ivp.blowup_threshold) {
      const double thr = ivp.blowup_threshold;
      const double rb =
          bisect([&](double r) { return std::abs(ds.eval(0, r)) - thr; });
      sol.termination = Termination::blew_up;
      sol.rho_end = rb;
      sol.event_radius = rb;
      return sol;
    }

    t = t_new;
    y = y1;
    k1 = k7;
    running_max = std::max(running_max, std::abs(y[0]));
    h *= std::min(5.0, std::max(0.2, 0.9 * std::pow(std::max(err, 1e-10), -0.2)));
  }
  throw numerical_error("integrate: step budget exhausted");
}

}  // namespace fujita

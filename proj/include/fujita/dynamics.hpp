#pragma once

// Radial method-of-lines evolution for the reaction-diffusion flow in the
// physical frame,
//
//   u_t = u'' + (N-1)/r u' + u^p,
//
// and in the selfsimilar frame,
//
//   v_s = v'' + ((N-1)/rho - rho/2) v' - v/(p-1) + v^p,
//
// both posed on [0, R] with the outer value pinned.  The spatial operator is
// a finite-volume scheme in the frame's natural weight (r^{N-1} resp.
// rho^{N-1} e^{-rho^2/4}), chosen so that two structural facts survive
// discretization exactly rather than up to O(h^2):
//
//   * off-diagonal coupling is positive, so the semi-discrete flow obeys a
//     maximum principle and the number of sign changes between any two
//     solutions cannot increase;
//   * the discrete energy defined in energy_of below satisfies the exact
//     dissipation identity dE/ds = -sum_i V_i vdot_i^2 along the
//     semi-discrete flow (summation by parts, with the pinned boundary
//     contributing nothing).
//
// Time stepping is an embedded Bogacki-Shampine 3(2) pair with a parabolic
// step cap.  The cap uses a Gershgorin bound assembled from the actual flux
// coefficients because the origin cell relaxes at a rate close to 2N/h^2,
// not the 2/h^2 of interior cells.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fujita/common.hpp"
#include "fujita/odecore.hpp"
#include "fujita/params.hpp"
#include "fujita/quadrature.hpp"
#include "fujita/steady.hpp"

namespace fujita {

constexpr double kDefaultDomainRadius = 20.0;
constexpr int kDefaultGridPoints = 2000;

struct DtControl {
  double rtol = 1e-8;
  double atol = 1e-12;
  double output_interval = 0.05;
  double blowup_threshold = 1e8;
  std::size_t max_steps = 2000000;
};

struct HistoryPoint {
  double time = 0.0;
  double sup_norm = 0.0;
  double energy = 0.0;
  int z_vs_phi_inf = -1;  // -1 when the singular steady state does not exist
};

struct Snapshot {
  double time = 0.0;
  std::vector<double> values;
};

enum class RunStatus { completed, blew_up };

struct EvolutionState {
  ProblemParams params;
  Frame frame = Frame::selfsimilar;
  double R = 0.0;
  int n = 0;
  double time = 0.0;
  std::vector<double> values;
  std::vector<HistoryPoint> history;
  std::vector<Snapshot> snapshots;
  RunStatus status = RunStatus::completed;

  double h() const { return R / (n - 1); }
  double rho(int i) const { return i * h(); }
  double sup_norm() const {
    double s = 0.0;
    for (double x : values) s = std::max(s, std::fabs(x));
    return s;
  }
};

// Count of strict sign alternations, with |d| <= tol collapsed to zero so
// that rounding-level wiggle between two nearly identical profiles does not
// register as a crossing.
inline int sign_changes(const std::vector<double>& diff, double tol) {
  int count = 0;
  int last = 0;
  for (double d : diff) {
    const int s = (d > tol) - (d < -tol);
    if (s == 0) continue;
    if (last != 0 && s != last) ++count;
    last = s;
  }
  return count;
}

namespace detail {

struct MolOperator {
  ProblemParams P;
  Frame frame = Frame::selfsimilar;
  int n = 0;
  double h = 0.0;
  std::vector<double> aface;   // weight at the faces (i + 1/2) h, i = 0..n-2
  std::vector<double> Vcell;   // cell masses of the weight
  std::vector<double> cplus;   // aface[i] / (h Vcell[i])
  std::vector<double> cminus;  // aface[i-1] / (h Vcell[i])
  double lambda_bound = 0.0;   // Gershgorin bound for the diffusion spectrum
  bool p_integral = false;
  long p_int = 0;

  // |v|^p with the sign of v.  The integer fast path matters: the reaction
  // term is the hot spot of the whole stepper and std::pow costs an order
  // of magnitude more than a handful of multiplications.
  double power_p(double v) const {
    if (p_integral) {
      const double av = std::fabs(v);
      double acc = 1.0;
      for (long k = 0; k < p_int; ++k) acc *= av;
      return v < 0.0 ? -acc : acc;
    }
    return signed_pow(v, P.p);
  }

  double react(double v) const {
    const double vp = power_p(v);
    return frame == Frame::selfsimilar ? vp - v / (P.p - 1.0) : vp;
  }

  void rhs(const std::vector<double>& v, std::vector<double>& dv) const {
    dv[0] = cplus[0] * (v[1] - v[0]) + react(v[0]);
    for (int i = 1; i + 1 < n; ++i)
      dv[i] = cplus[i] * (v[i + 1] - v[i]) - cminus[i] * (v[i] - v[i - 1]) +
              react(v[i]);
    dv[n - 1] = 0.0;  // outer value pinned
  }
};

inline MolOperator make_operator(const ProblemParams& P, Frame frame, double R,
                                 int n) {
  if (n < 8) throw domain_error("dynamics: need at least 8 grid points");
  if (!(R > 0.0) || !std::isfinite(R))
    throw domain_error("dynamics: domain radius must be positive and finite");
  if (frame == Frame::selfsimilar && R > 50.0)
    throw domain_error(
        "dynamics: the Gaussian weight underflows beyond R = 50");

  MolOperator op;
  op.P = P;
  op.frame = frame;
  op.n = n;
  op.h = R / (n - 1);
  const double pr = std::round(P.p);
  op.p_integral = std::fabs(P.p - pr) < 1e-12 && pr >= 1.0 && pr <= 64.0;
  op.p_int = static_cast<long>(pr);

  const double Nd = static_cast<double>(P.N);
  auto weight = [&](double r) {
    double w = std::pow(r, Nd - 1.0);
    if (frame == Frame::selfsimilar) w *= std::exp(-0.25 * r * r);
    return w;
  };
  // Exact cell masses for the pure power weight; adaptive quadrature for the
  // Gaussian-tilted one.  Near the origin the weight is a high power of rho,
  // so midpoint or Simpson cell masses would be off by factors of order one
  // there and would wreck the 2N/h^2 origin rate constant.
  auto mass = [&](double a, double b) {
    if (frame == Frame::physical)
      return (std::pow(b, Nd) - std::pow(a, Nd)) / Nd;
    return integrate_adaptive(weight, a, b, 1e-12);
  };

  const double h = op.h;
  op.aface.resize(n - 1);
  for (int i = 0; i + 1 < n; ++i) op.aface[i] = weight((i + 0.5) * h);
  op.Vcell.resize(n);
  op.Vcell[0] = mass(0.0, 0.5 * h);
  for (int i = 1; i + 1 < n; ++i)
    op.Vcell[i] = mass((i - 0.5) * h, (i + 0.5) * h);
  op.Vcell[n - 1] = mass((n - 1.5) * h, R);

  op.cplus.assign(n, 0.0);
  op.cminus.assign(n, 0.0);
  for (int i = 0; i + 1 < n; ++i) {
    op.cplus[i] = op.aface[i] / (h * op.Vcell[i]);
    if (i >= 1) op.cminus[i] = op.aface[i - 1] / (h * op.Vcell[i]);
  }
  for (int i = 0; i + 1 < n; ++i)
    op.lambda_bound =
        std::max(op.lambda_bound, 2.0 * (op.cplus[i] + op.cminus[i]));
  return op;
}

// Discrete Lyapunov energy.  In the selfsimilar frame
//   E_h = sum_f a_f (dv)^2 / (2h) + sum_i V_i (v_i^2/(2(p-1)) - |v_i|^{p+1}/(p+1)),
// in the physical frame the mass term is absent.  Along the semi-discrete
// flow dE_h/ds = -sum_i V_i vdot_i^2 exactly.
inline double energy_of(const MolOperator& op, const std::vector<double>& v) {
  const double p = op.P.p;
  double grad = 0.0;
  for (int i = 0; i + 1 < op.n; ++i) {
    const double d = v[i + 1] - v[i];
    grad += op.aface[i] * d * d;
  }
  grad /= 2.0 * op.h;
  double bulk = 0.0;
  for (int i = 0; i < op.n; ++i) {
    const double av = std::fabs(v[i]);
    double pw;  // |v|^{p+1}
    if (op.p_integral) {
      pw = 1.0;
      for (long k = 0; k <= op.p_int; ++k) pw *= av;
    } else {
      pw = std::pow(av, p + 1.0);
    }
    double g = -pw / (p + 1.0);
    if (op.frame == Frame::selfsimilar)
      g += v[i] * v[i] / (2.0 * (p - 1.0));
    bulk += op.Vcell[i] * g;
  }
  return grad + bulk;
}

}  // namespace detail

inline EvolutionState make_state(const ProblemParams& P, Frame frame, double R,
                                 int n, const RealFn& initial,
                                 double time0 = 0.0) {
  if (n < 8) throw domain_error("make_state: need at least 8 grid points");
  if (!(R > 0.0) || !std::isfinite(R))
    throw domain_error("make_state: domain radius must be positive and finite");
  if (frame == Frame::selfsimilar && R > 50.0)
    throw domain_error(
        "make_state: the Gaussian weight underflows beyond R = 50");
  EvolutionState st;
  st.params = P;
  st.frame = frame;
  st.R = R;
  st.n = n;
  st.time = time0;
  st.values.resize(n);
  const double h = R / (n - 1);
  for (int i = 0; i < n; ++i) {
    const double x = initial(i * h);
    if (!std::isfinite(x) || x < 0.0)
      throw domain_error("make_state: initial data must be finite and nonnegative");
    st.values[i] = x;
  }
  return st;
}

inline double discrete_energy(const EvolutionState& st) {
  const auto op = detail::make_operator(st.params, st.frame, st.R, st.n);
  return detail::energy_of(op, st.values);
}

inline EvolutionState evolve(const EvolutionState& initial, double until,
                             const DtControl& ctl = {}) {
  if (initial.n < 8 ||
      static_cast<int>(initial.values.size()) != initial.n)
    throw domain_error("evolve: malformed state");
  if (!(until >= initial.time))
    throw domain_error("evolve: target time precedes the state time");
  if (!(ctl.rtol > 0.0) || !(ctl.atol > 0.0) ||
      !(ctl.output_interval > 0.0) || !(ctl.blowup_threshold > 0.0))
    throw domain_error("evolve: dt control parameters must be positive");

  EvolutionState st = initial;
  st.status = RunStatus::completed;
  const auto op = detail::make_operator(st.params, st.frame, st.R, st.n);
  const ProblemParams& P = st.params;
  const int n = st.n;
  const double h = op.h;
  const double pm1 = P.p - 1.0;

  const double dt_spatial =
      std::min(0.4 * h * h, 2.0 / std::max(op.lambda_bound, 1e-300));

  // Reference values of the singular steady state on the grid, for the
  // intersection-count column of the history.  The comparison starts at the
  // first interior node: at the origin the singular profile diverges while
  // the solution is bounded, so the sign there is fixed and uninformative.
  std::vector<double> sing;
  if (P.L) {
    sing.assign(n, 0.0);
    for (int i = 1; i < n; ++i) sing[i] = singular_steady(P, i * h);
  }

  std::vector<double>& v = st.values;
  auto supnorm = [](const std::vector<double>& w) {
    double s = 0.0;
    for (double x : w) s = std::max(s, std::fabs(x));
    return s;
  };

  double t = st.time;
  double sup = supnorm(v);
  double last_recorded_sup = sup;

  auto zcount = [&]() {
    if (sing.empty()) return -1;
    const double tol = 1e-12 * std::max(1.0, sup);
    int count = 0, last = 0;
    for (int i = 1; i < n; ++i) {
      const double d = v[i] - sing[i];
      const int s = (d > tol) - (d < -tol);
      if (s == 0) continue;
      if (last != 0 && s != last) ++count;
      last = s;
    }
    return count;
  };
  auto record = [&]() {
    st.history.push_back({t, sup, detail::energy_of(op, v), zcount()});
    last_recorded_sup = sup;
  };
  auto snap = [&]() {
    Snapshot s;
    s.time = t;
    s.values = v;
    for (double& x : s.values) x = std::max(x, 0.0);
    st.snapshots.push_back(std::move(s));
  };

  const double teps = 1e-12 * std::max(1.0, std::fabs(until));
  if (st.history.empty() || st.history.back().time < t - teps) {
    record();
    snap();
  }
  if (until <= t + teps) {
    st.time = t;
    return st;
  }

  std::vector<double> k1(n), k2(n), k3(n), k4(n), y(n), vn(n);
  op.rhs(v, k1);

  double next_out = t + ctl.output_interval;
  double dt = std::min({dt_spatial, ctl.output_interval, until - t});
  std::size_t steps = 0;
  int pos_halvings = 0;

  while (t < until - teps) {
    if (++steps > ctl.max_steps)
      throw numerical_error("evolve: step budget exhausted");

    // The reaction cap tracks the current amplitude so the controller does
    // not thrash once u^p stiffens on the approach to blowup.
    const double fprime = P.p * std::pow(std::max(sup, 1e-30), pm1);
    double dt_try = std::min({dt, dt_spatial, 0.5 / fprime});
    const double t_stop = std::min(until, next_out);
    bool clipped = false;
    if (dt_try >= t_stop - t) {
      dt_try = t_stop - t;
      clipped = true;
    }
    if (!(dt_try > 0.0)) throw numerical_error("evolve: time step underflow");

    for (int i = 0; i < n; ++i) y[i] = v[i] + dt_try * 0.5 * k1[i];
    op.rhs(y, k2);
    for (int i = 0; i < n; ++i) y[i] = v[i] + dt_try * 0.75 * k2[i];
    op.rhs(y, k3);
    for (int i = 0; i < n; ++i)
      vn[i] = v[i] + dt_try * ((2.0 / 9.0) * k1[i] + (1.0 / 3.0) * k2[i] +
                               (4.0 / 9.0) * k3[i]);

    // Positivity is a theorem for the continuous flow with nonnegative
    // data, so a real undershoot means the step was too large.
    const double floor_tol = -1e-13 * std::max(1.0, sup);
    bool positive = true;
    for (int i = 0; i < n; ++i)
      if (vn[i] < floor_tol) {
        positive = false;
        break;
      }
    if (!positive) {
      if (++pos_halvings >= 20)
        throw numerical_error(
            "evolve: positivity violation persists after 20 step halvings");
      dt = 0.5 * dt_try;
      continue;
    }
    pos_halvings = 0;

    op.rhs(vn, k4);
    double errsq = 0.0;
    for (int i = 0; i < n; ++i) {
      const double e =
          dt_try * ((-5.0 / 72.0) * k1[i] + (1.0 / 12.0) * k2[i] +
                    (1.0 / 9.0) * k3[i] + (-1.0 / 8.0) * k4[i]);
      const double w =
          ctl.atol + ctl.rtol * std::max(std::fabs(v[i]), std::fabs(vn[i]));
      const double q = e / w;
      errsq += q * q;
    }
    const double err = std::sqrt(errsq / n);
    if (err > 1.0) {
      dt = dt_try * std::max(0.2, 0.9 * std::pow(err, -1.0 / 3.0));
      continue;
    }

    t = clipped ? t_stop : t + dt_try;
    v.swap(vn);
    k1.swap(k4);  // first-same-as-last
    sup = supnorm(v);
    dt = dt_try *
         std::min(5.0, std::max(0.2, 0.9 * std::pow(std::max(err, 1e-300),
                                                    -1.0 / 3.0)));

    bool at_boundary = false;
    if (next_out <= until + teps && t >= next_out - teps) {
      at_boundary = true;
      next_out += ctl.output_interval;
    }
    if (sup > ctl.blowup_threshold) {
      record();
      snap();
      st.status = RunStatus::blew_up;
      st.time = t;
      for (double& x : v) x = std::max(x, 0.0);
      return st;
    }
    if (at_boundary) {
      record();
      snap();
    } else if (sup >= 1.02 * last_recorded_sup) {
      // Extra records on growth keep the late history dense enough for the
      // blowup-rate fit even when no output boundary is crossed anymore.
      record();
    }
  }

  st.time = t;
  if (st.history.empty() || st.history.back().time != t) {
    record();
    snap();
  }
  for (double& x : v) x = std::max(x, 0.0);
  return st;
}

// v(rho, s) = (T-t)^{1/(p-1)} u(rho sqrt(T-t), t),  s = -log(T-t).
// The target grid is scaled by the same factor as the radius variable, so
// nodes map to nodes and no interpolation happens in either direction.
inline EvolutionState to_selfsimilar(const EvolutionState& u, double T) {
  if (u.frame != Frame::physical)
    throw domain_error("to_selfsimilar: state must be in the physical frame");
  const double tau = T - u.time;
  if (!(tau > 0.0)) throw domain_error("to_selfsimilar: requires t < T");
  EvolutionState v;
  v.params = u.params;
  v.frame = Frame::selfsimilar;
  v.n = u.n;
  v.R = u.R / std::sqrt(tau);
  v.time = -std::log(tau);
  const double amp = std::pow(tau, 1.0 / (u.params.p - 1.0));
  v.values.resize(u.n);
  for (int i = 0; i < u.n; ++i) v.values[i] = amp * u.values[i];
  return v;
}

inline EvolutionState from_selfsimilar(const EvolutionState& v, double T) {
  if (v.frame != Frame::selfsimilar)
    throw domain_error("from_selfsimilar: state must be in the selfsimilar frame");
  const double tau = std::exp(-v.time);
  EvolutionState u;
  u.params = v.params;
  u.frame = Frame::physical;
  u.n = v.n;
  u.R = v.R * std::sqrt(tau);
  u.time = T - tau;
  const double amp = std::pow(tau, -1.0 / (v.params.p - 1.0));
  u.values.resize(v.n);
  for (int i = 0; i < v.n; ++i) u.values[i] = amp * v.values[i];
  return u;
}

struct GridProfile {
  double h = 0.0;
  std::vector<double> values;
  double radius(int i) const { return i * h; }
};

// Zoomed profile r -> lambda^{2/(p-1)} u(lambda r, t_k) with
// lambda = sup^{-(p-1)/2}, so the output has sup exactly 1.  The output grid
// spacing is h/lambda: output nodes land exactly on input nodes and the
// normalization is interpolation-free.
inline GridProfile rescaled_profile(const EvolutionState& run, double t_k) {
  if (run.frame != Frame::physical)
    throw domain_error("rescaled_profile: expects a physical-frame run");
  const Snapshot* hit = nullptr;
  const double tol = 1e-9 * std::max(1.0, std::fabs(t_k));
  for (const auto& s : run.snapshots)
    if (std::fabs(s.time - t_k) <= tol) {
      hit = &s;
      break;
    }
  if (!hit)
    throw domain_error("rescaled_profile: no stored profile at the requested time");
  double sup = 0.0;
  for (double x : hit->values) sup = std::max(sup, x);
  if (!(sup > 0.0))
    throw domain_error("rescaled_profile: profile vanishes identically");
  const double lambda = std::pow(sup, -0.5 * (run.params.p - 1.0));
  GridProfile out;
  out.h = run.h() / lambda;
  out.values.resize(hit->values.size());
  for (std::size_t i = 0; i < hit->values.size(); ++i)
    out.values[i] = hit->values[i] / sup;
  return out;
}

struct LimitVerdict {
  bool decided = false;
  std::string label = "undecided";
  std::string nearest;  // closest candidate even when undecided
  double distance = std::numeric_limits<double>::infinity();
};

// Compares the latest stored profiles against the constant steady states,
// the singular one, and any user-supplied atlas members, in sup norm on the
// core region [0, R/2] where the pinned outer boundary has no influence.
// The verdict requires closeness and three consecutive improving distances,
// so a slow transient passing near a steady state does not get labeled.
inline LimitVerdict detect_limit(const EvolutionState& state,
                                 const std::vector<SteadyState>& atlas) {
  if (state.frame != Frame::selfsimilar)
    throw domain_error("detect_limit: expects a selfsimilar-frame run");
  if (state.history.empty() ||
      state.history.back().time - state.history.front().time < 5.0 - 1e-9)
    throw domain_error("detect_limit: history must span at least 5 in s");
  std::vector<const Snapshot*> last;
  for (auto it = state.snapshots.rbegin();
       it != state.snapshots.rend() && last.size() < 3; ++it) {
    if (!last.empty() && !(it->time < last.back()->time)) continue;
    last.push_back(&*it);
  }
  if (last.size() < 3)
    throw domain_error("detect_limit: needs at least three stored profiles");
  std::reverse(last.begin(), last.end());

  struct Candidate {
    std::string label;
    RealFn f;
    bool skip_origin;
  };
  std::vector<Candidate> cands;
  cands.push_back({"zero", [](double) { return 0.0; }, false});
  const double kap = state.params.kappa;
  cands.push_back({"kappa", [kap](double) { return kap; }, false});
  const ProblemParams P = state.params;
  if (P.L)
    cands.push_back(
        {"phi_inf", [P](double r) { return singular_steady(P, r); }, true});
  for (std::size_t k = 0; k < atlas.size(); ++k) {
    const SteadyState s = atlas[k];
    cands.push_back({"atlas[" + std::to_string(k) + "]",
                     [s](double r) { return s.value(r); },
                     s.kind == SteadyKind::singular_reference});
  }

  const double h = state.h();
  const int icut = (state.n - 1) / 2;
  LimitVerdict out;
  for (const auto& c : cands) {
    double d[3];
    for (int m = 0; m < 3; ++m) {
      double dm = 0.0;
      for (int i = c.skip_origin ? 1 : 0; i <= icut; ++i)
        dm = std::max(dm, std::fabs(last[m]->values[i] - c.f(i * h)));
      d[m] = dm;
    }
    if (d[2] < out.distance) {
      out.distance = d[2];
      out.nearest = c.label;
      out.decided = d[2] < 1e-3 && d[0] > d[1] && d[1] > d[2];
    }
  }
  out.label = out.decided ? out.nearest : "undecided";
  return out;
}

enum class BlowupType { type_I, type_II_suspect, none };

struct BlowupReport {
  std::optional<double> T_est;
  BlowupType type = BlowupType::none;
  // (t, sup * (T_est - t)^{1/(p-1)}); constant near kappa for type I.
  std::vector<std::pair<double, double>> rate_series;
  std::vector<std::pair<double, GridProfile>> rescaled;
};

// Estimates the blowup time from the history of sup norms and classifies
// the approach.  y = sup^{1-p} is exactly linear in t for the selfsimilar
// rate, so T_est comes from the root of a least-squares line through the
// latest samples.  The fit window is deepened in stages (y below 1e-2,
// 1e-4, 1e-6 of its starting value) as long as at least 30 samples remain,
// which keeps early transients out of the fit without ever starving it.
inline BlowupReport classify_blowup(const EvolutionState& run) {
  BlowupReport rep;
  if (run.status != RunStatus::blew_up) return rep;
  const auto& H = run.history;
  if (H.size() < 31)
    throw numerical_error(
        "classify_blowup: fewer than 30 samples precede the blowup event");
  const double p = run.params.p;

  std::vector<std::pair<double, double>> ty;
  ty.reserve(H.size());
  double ymax = 0.0;
  for (const auto& hp : H)
    if (hp.sup_norm > 0.0) {
      ty.push_back({hp.time, std::pow(hp.sup_norm, 1.0 - p)});
      ymax = std::max(ymax, ty.back().second);
    }
  std::vector<std::pair<double, double>> window = ty;
  for (double cut : {1e-2, 1e-4, 1e-6}) {
    std::vector<std::pair<double, double>> sub;
    for (const auto& q : ty)
      if (q.second <= cut * ymax) sub.push_back(q);
    if (sub.size() >= 30)
      window = sub;
    else
      break;
  }
  if (window.size() < 30)
    throw numerical_error(
        "classify_blowup: fewer than 30 samples precede the blowup event");

  double tbar = 0.0, ybar = 0.0;
  for (const auto& q : window) {
    tbar += q.first;
    ybar += q.second;
  }
  tbar /= window.size();
  ybar /= window.size();
  double sxx = 0.0, sxy = 0.0;
  for (const auto& q : window) {
    sxx += (q.first - tbar) * (q.first - tbar);
    sxy += (q.first - tbar) * (q.second - ybar);
  }
  if (!(sxx > 0.0))
    throw numerical_error("classify_blowup: degenerate sample times");
  const double slope = sxy / sxx;
  if (!(slope < 0.0))
    throw numerical_error("classify_blowup: sup norms are not accelerating");
  const double T = tbar - ybar / slope;
  rep.T_est = T;

  const double span = H.back().time - H.front().time;
  const double cut = 1e-8 * std::max(span, 1e-300);
  for (const auto& hp : H) {
    const double rem = T - hp.time;
    if (rem >= cut && hp.sup_norm > 0.0)
      rep.rate_series.push_back(
          {hp.time, hp.sup_norm * std::pow(rem, 1.0 / (p - 1.0))});
  }

  rep.type = BlowupType::type_II_suspect;
  if (!rep.rate_series.empty()) {
    const double rem_last = T - rep.rate_series.back().first;
    double rmin = std::numeric_limits<double>::infinity();
    double rmax = 0.0;
    for (const auto& q : rep.rate_series) {
      if (T - q.first <= 10.0 * rem_last) {
        rmin = std::min(rmin, q.second);
        rmax = std::max(rmax, q.second);
      }
    }
    if (rmin > 0.0 && rmax / rmin - 1.0 < 0.2 &&
        rmax < 10.0 * run.params.kappa)
      rep.type = BlowupType::type_I;
  }

  if (run.frame == Frame::physical) {
    std::vector<double> times;
    for (auto it = run.snapshots.rbegin();
         it != run.snapshots.rend() && times.size() < 3; ++it) {
      if (!times.empty() && !(it->time < times.back())) continue;
      times.push_back(it->time);
    }
    std::reverse(times.begin(), times.end());
    for (double tk : times)
      rep.rescaled.push_back({tk, rescaled_profile(run, tk)});
  }
  return rep;
}

// Smallest constant C so that, over all stored profiles and interior nodes,
//   u + |u_r|^{2/(p+1)} + |u_rr|^{1/p} <= C (r^{-2/(p-1)} + m(t)),
// with m(t) = (T-t)^{-1/(p-1)} for a finite-time run and m = 0 for a global
// one.  Derivatives are centered differences; the origin node is skipped
// because the weight r^{-2/(p-1)} diverges there and contributes nothing.
// Profiles stored within rounding distance of T are skipped: the remaining
// time T - t is then dominated by representation error of t itself (the true
// remainder can be dozens of orders of magnitude below one ulp of T), so the
// computed m(t) would be arbitrarily wrong.
inline double universal_bound_check(const EvolutionState& run,
                                    std::optional<double> T = std::nullopt) {
  if (run.frame != Frame::physical)
    throw domain_error("universal_bound_check: expects a physical-frame run");
  if (run.snapshots.empty())
    throw domain_error("universal_bound_check: no stored profiles");
  const double p = run.params.p;
  const double h = run.h();
  const int n = run.n;
  double C = 0.0;
  int used = 0;
  for (const auto& s : run.snapshots) {
    double m = 0.0;
    if (T) {
      const double rem = *T - s.time;
      if (!(rem > 0.0))
        throw domain_error("universal_bound_check: snapshot at or beyond T");
      if (rem <= 2.2e-13 * std::max(1.0, std::fabs(*T))) continue;
      m = std::pow(rem, -1.0 / (p - 1.0));
    }
    ++used;
    for (int i = 1; i + 1 < n; ++i) {
      const double r = i * h;
      const double ur = (s.values[i + 1] - s.values[i - 1]) / (2.0 * h);
      const double urr =
          (s.values[i + 1] - 2.0 * s.values[i] + s.values[i - 1]) / (h * h);
      const double num = s.values[i] +
                         std::pow(std::fabs(ur), 2.0 / (p + 1.0)) +
                         std::pow(std::fabs(urr), 1.0 / p);
      const double den = std::pow(r, -2.0 / (p - 1.0)) + m;
      C = std::max(C, num / den);
    }
  }
  if (used == 0)
    throw domain_error(
        "universal_bound_check: every stored profile sits within rounding "
        "distance of T");
  return C;
}

}  // namespace fujita

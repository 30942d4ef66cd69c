#include <catch2/catch_amalgamated.hpp>
#include <algorithm>
#include <cmath>
#include <vector>

#include "fujita/dynamics.hpp"
#include "fujita/steady.hpp"
#include "reference_values.hpp"

using namespace fujita;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// Exact spatially homogeneous solution of the rescaled equation through
// v(s0) = a: with y = v^{1-p}, y(s) = (p-1) + (y0 - (p-1)) e^{s - s0}.
double flat_exact(const ProblemParams& P, double a, double s0, double s) {
  const double pm1 = P.p - 1.0;
  const double y0 = std::pow(a, -pm1);
  const double y = pm1 + (y0 - pm1) * std::exp(s - s0);
  return std::pow(y, -1.0 / pm1);
}

double core_sup_diff(const EvolutionState& st, const std::vector<double>& a,
                     const std::vector<double>& b) {
  // Compare away from the pinned outer boundary; in the rescaled frame the
  // outward drift confines the Dirichlet error to a layer near R.
  const int core = (st.n - 1) / 2;
  double d = 0.0;
  for (int i = 0; i <= core; ++i) d = std::max(d, std::fabs(a[i] - b[i]));
  return d;
}

}  // namespace

TEST_CASE("grid states validate their construction data", "[dynamics]") {
  const ProblemParams P = make_params(12, 5.0);
  const auto one = [](double) { return 1.0; };

  REQUIRE_THROWS_AS(make_state(P, Frame::physical, 10.0, 4, one),
                    domain_error);
  REQUIRE_THROWS_AS(make_state(P, Frame::physical, -3.0, 100, one),
                    domain_error);
  REQUIRE_THROWS_AS(
      make_state(P, Frame::physical, 10.0, 100,
                 [](double r) { return r < 5.0 ? 1.0 : -0.5; }),
      domain_error);
  REQUIRE_THROWS_AS(make_state(P, Frame::selfsimilar, 60.0, 100, one),
                    domain_error);

  auto st = make_state(P, Frame::physical, 10.0, 101,
                       [](double r) { return 2.0 + r; });
  REQUIRE(st.n == 101);
  REQUIRE_THAT(st.h(), WithinRel(0.1, 1e-15));
  REQUIRE_THAT(st.rho(40), WithinRel(4.0, 1e-15));
  REQUIRE_THAT(st.values[40], WithinRel(6.0, 1e-15));
  REQUIRE_THAT(st.sup_norm(), WithinRel(12.0, 1e-15));

  REQUIRE_THROWS_AS(evolve(st, st.time - 1.0), domain_error);
  DtControl bad;
  bad.rtol = -1.0;
  REQUIRE_THROWS_AS(evolve(st, 1.0, bad), domain_error);
}

TEST_CASE("sign changes of grid differences", "[dynamics]") {
  REQUIRE(sign_changes({1.0, 2.0, 3.0}, 0.0) == 0);
  REQUIRE(sign_changes({1.0, -2.0, 3.0}, 0.0) == 2);
  REQUIRE(sign_changes({1.0, 0.0, 3.0}, 0.0) == 0);
  REQUIRE(sign_changes({1.0, 1e-14, -3.0}, 1e-12) == 1);
  REQUIRE(sign_changes({-1.0, 1e-14, -3.0}, 1e-12) == 0);
  REQUIRE(sign_changes({}, 0.0) == 0);
}

TEST_CASE("discrete energy of constant states matches closed forms",
          "[dynamics]") {
  // In the rescaled frame the constant state's energy has an exact value,
  // reproduced by the cell masses up to the (tiny) truncated Gaussian tail.
  for (int N : {6, 12}) {
    const ProblemParams P = make_params(N, 5.0);
    auto st = make_state(P, Frame::selfsimilar, 20.0, 1200,
                         [&](double) { return P.kappa; });
    const double exact =
        (N == 12) ? refvals::kEkappa_N12P5 : refvals::kEkappa_N6P5;
    REQUIRE_THAT(discrete_energy(st), WithinRel(exact, 1e-9));
  }

  const ProblemParams P = make_params(12, 5.0);
  auto zero =
      make_state(P, Frame::selfsimilar, 20.0, 400, [](double) { return 0.0; });
  REQUIRE(discrete_energy(zero) == 0.0);

  // Physical frame, constant u = kappa on [0, R]: no gradient term, and the
  // cell masses telescope to R^N / N exactly, so
  //   E = -(R^N / N) kappa^{p+1} / (p+1).
  auto flat = make_state(P, Frame::physical, 10.0, 500,
                         [&](double) { return P.kappa; });
  const double expected = -(std::pow(10.0, 12) / 12.0) *
                          std::pow(P.kappa, 6.0) / 6.0;
  REQUIRE_THAT(discrete_energy(flat), WithinRel(expected, 1e-12));
}

TEST_CASE("the discrete energy dissipates exactly along the semi-discrete flow",
          "[dynamics]") {
  // d/ds E_h(v(s)) = -sum_i V_i vdot_i^2 holds for the spatial discretization
  // before any time stepping; check it against a centered difference of E_h.
  for (Frame frame : {Frame::selfsimilar, Frame::physical}) {
    const ProblemParams P = make_params(12, 5.0);
    const double R = frame == Frame::selfsimilar ? 20.0 : 10.0;
    auto op = detail::make_operator(P, frame, R, 200);
    std::vector<double> v(200), k(200), vp(200), vm(200);
    for (int i = 0; i < 200; ++i) {
      const double rho = i * op.h;
      v[i] = P.kappa * (1.0 + 0.2 * std::exp(-(rho - 1.5) * (rho - 1.5)));
    }
    v[199] = v[198];  // keep the pinned node consistent with its neighbor
    op.rhs(v, k);
    double dissip = 0.0;
    for (int i = 0; i < 200; ++i) dissip += op.Vcell[i] * k[i] * k[i];

    const double delta = 1e-6;
    for (int i = 0; i < 200; ++i) {
      vp[i] = v[i] + delta * k[i];
      vm[i] = v[i] - delta * k[i];
    }
    const double dE =
        (detail::energy_of(op, vp) - detail::energy_of(op, vm)) /
        (2.0 * delta);
    REQUIRE_THAT(dE, WithinRel(-dissip, 1e-5));
  }
}

TEST_CASE("constant kappa data is a discrete steady state", "[dynamics]") {
  const ProblemParams P = make_params(12, 5.0);
  auto st = make_state(P, Frame::selfsimilar, 20.0, 300,
                       [&](double) { return P.kappa; });
  auto run = evolve(st, 2.0);
  REQUIRE(run.status == RunStatus::completed);
  double drift = 0.0;
  for (int i = 0; i < run.n; ++i)
    drift = std::max(drift, std::fabs(run.values[i] - P.kappa));
  REQUIRE(drift <= 1e-13);
  const double E0 = run.history.front().energy;
  for (const auto& hp : run.history) {
    REQUIRE_THAT(hp.energy, WithinRel(E0, 1e-12));
    REQUIRE(hp.z_vs_phi_inf == run.history.front().z_vs_phi_inf);
  }
}

TEST_CASE("flat data follows the spatially homogeneous solution",
          "[dynamics][slow]") {
  // Subcritical-amplitude constant data decays along the exact flat orbit;
  // the scheme's reaction term is pointwise exact for it, so the only error
  // is time stepping plus the boundary layer near the pinned node.
  const ProblemParams P = make_params(6, 5.0);
  const double a0 = 0.8 * P.kappa;
  const double s0 = -2.0;
  auto st = make_state(P, Frame::selfsimilar, 20.0, 400,
                       [&](double) { return a0; }, s0);
  DtControl ctl;
  ctl.rtol = 1e-9;
  ctl.output_interval = 0.5;
  auto run = evolve(st, s0 + 5.0, ctl);
  REQUIRE(run.status == RunStatus::completed);
  for (const auto& snap : run.snapshots) {
    const double exact = flat_exact(P, a0, s0, snap.time);
    std::vector<double> ref(run.n, exact);
    REQUIRE(core_sup_diff(run, snap.values, ref) <= 1e-10);
  }
}

TEST_CASE("energy decreases and stays nonnegative along a bounded run",
          "[dynamics]") {
  const ProblemParams P = make_params(12, 5.0);
  auto st = make_state(P, Frame::selfsimilar, 20.0, 250, [&](double rho) {
    return P.kappa * (1.0 - 0.3 * std::exp(-(rho - 2.0) * (rho - 2.0)));
  });
  auto run = evolve(st, 3.0);
  REQUIRE(run.status == RunStatus::completed);
  for (std::size_t k = 0; k < run.history.size(); ++k) {
    const auto& hp = run.history[k];
    REQUIRE(hp.energy >= 0.0);
    if (k > 0) {
      const double prev = run.history[k - 1].energy;
      REQUIRE(hp.energy <= prev + 1e-9 * std::max(1.0, std::fabs(prev)));
      REQUIRE(hp.z_vs_phi_inf <= run.history[k - 1].z_vs_phi_inf);
    }
  }
}

TEST_CASE("intersection counts between evolved pairs do not increase",
          "[dynamics][slow]") {
  const ProblemParams P = make_params(6, 5.0);
  const double R = 20.0;
  const int n = 300;
  auto mk = [&](Frame frame, double amp, double width, double shift) {
    return make_state(P, frame, R, n, [&](double rho) {
      const double osc = std::cos(rho * 1.3 + shift);
      return P.kappa * (0.8 + amp * osc * std::exp(-rho * rho / width));
    });
  };
  for (Frame frame : {Frame::selfsimilar, Frame::physical}) {
    auto sa = mk(frame, 0.25, 9.0, 0.0);
    auto sb = mk(frame, 0.20, 7.0, 1.1);
    DtControl ctl;
    ctl.output_interval = 0.25;
    auto ra = evolve(sa, 2.0, ctl);
    auto rb = evolve(sb, 2.0, ctl);
    REQUIRE(ra.snapshots.size() == rb.snapshots.size());
    int last = -1;
    for (std::size_t k = 0; k < ra.snapshots.size(); ++k) {
      std::vector<double> diff(static_cast<std::size_t>(n));
      double sup = 0.0;
      for (int i = 0; i < n; ++i) {
        diff[i] = ra.snapshots[k].values[i] - rb.snapshots[k].values[i];
        sup = std::max(sup, std::fabs(diff[i]));
      }
      const int z = sign_changes(diff, 1e-12 * std::max(1.0, sup));
      if (last >= 0) REQUIRE(z <= last);
      last = z;
    }
  }
}

TEST_CASE("radially decreasing data stays radially nonincreasing",
          "[dynamics]") {
  const ProblemParams P = make_params(6, 5.0);
  auto st = make_state(P, Frame::selfsimilar, 20.0, 300, [&](double rho) {
    return 1.3 * P.kappa * std::exp(-rho * rho / 6.0);
  });
  DtControl ctl;
  ctl.output_interval = 0.4;
  auto run = evolve(st, 2.0, ctl);
  REQUIRE(run.status == RunStatus::completed);
  for (const auto& snap : run.snapshots) {
    const double slack = 1e-11 * std::max(1.0, run.sup_norm());
    for (int i = 0; i + 1 < run.n; ++i)
      REQUIRE(snap.values[i + 1] <= snap.values[i] + slack);
  }
}

TEST_CASE("grid refinement converges at the capped-step rate",
          "[dynamics][slow]") {
  // With the accuracy tolerance slack, the parabolic step cap dt ~ 0.4 h^2
  // binds, so the third-order stepper's global error scales like h^6 and
  // successive sup-norm errors shrink by about 1/64 per halving.
  const ProblemParams P = make_params(6, 5.0);
  const double a0 = 1.05 * P.kappa;
  const double s1 = 1.4;
  const double exact = flat_exact(P, a0, 0.0, s1);
  DtControl ctl;
  ctl.rtol = 1e-2;
  ctl.output_interval = 0.35;
  std::vector<double> sups;
  for (int n : {50, 100, 200}) {
    auto st = make_state(P, Frame::selfsimilar, 20.0, n,
                         [&](double) { return a0; });
    auto run = evolve(st, s1, ctl);
    REQUIRE(run.status == RunStatus::completed);
    sups.push_back(run.sup_norm());
  }
  const double d1 = std::fabs(sups[1] - sups[0]);
  const double d2 = std::fabs(sups[2] - sups[1]);
  REQUIRE(d1 > 1e-13);
  REQUIRE(d2 <= 0.04 * d1);
  REQUIRE(std::fabs(sups[2] - exact) <= 1e-6);
}

TEST_CASE("selfsimilar transforms are mutually inverse and map the ground "
          "state family",
          "[dynamics][slow]") {
  const ProblemParams P = make_params(12, 5.0);
  const double T = 1.0;

  auto u = make_state(P, Frame::physical, 10.0, 200, [&](double r) {
    return 0.5 * std::exp(-r * r / 4.0);
  });
  u.time = 0.3;
  auto v = to_selfsimilar(u, T);
  REQUIRE(v.frame == Frame::selfsimilar);
  auto back = from_selfsimilar(v, T);
  REQUIRE_THAT(back.R, WithinRel(u.R, 1e-14));
  REQUIRE_THAT(back.time, WithinAbs(u.time, 1e-14));
  for (int i = 0; i < u.n; ++i)
    REQUIRE_THAT(back.values[i], WithinAbs(u.values[i], 1e-12));

  // A bounded steady profile maps to the explicit rescaled family
  //   v(rho, s) = e^{-s/(p-1)} phi_alpha(e^{-s/2} rho).
  auto w = make_state(P, Frame::physical, 6.0, 150,
                      [&](double r) { return phi_alpha(P, 1.0, r); });
  w.time = 0.75;
  auto vw = to_selfsimilar(w, T);
  const double s = -std::log(T - w.time);
  const double scale = std::exp(-s / (P.p - 1.0));
  for (int i = 0; i < vw.n; ++i) {
    const double rho = vw.rho(i);
    const double expect = scale * phi_alpha(P, 1.0, std::exp(-s / 2.0) * rho);
    REQUIRE_THAT(vw.values[i], WithinAbs(expect, 1e-10));
  }

  REQUIRE_THROWS_AS(to_selfsimilar(v, T), domain_error);
  REQUIRE_THROWS_AS(from_selfsimilar(u, T), domain_error);
  u.time = 2.0;
  REQUIRE_THROWS_AS(to_selfsimilar(u, T), domain_error);
}

TEST_CASE("rescaled profiles are normalized and interpolation-free",
          "[dynamics][slow]") {
  // Data phi_alpha with alpha = 10 has sup = 10, so the rescaling factor is
  // lambda = 10^{-(p-1)/2} = 0.01 and the normalized profile must collapse
  // onto phi_1 sampled at the stretched radii, with no interpolation error.
  const ProblemParams P = make_params(6, 5.0);
  const double alpha = 10.0;
  auto st = make_state(P, Frame::physical, 20.0, 256, [&](double r) {
    return phi_alpha(P, alpha, r);
  });
  // Record the initial profile as a snapshot without advancing time.
  st = evolve(st, st.time);
  auto prof = rescaled_profile(st, st.time);
  REQUIRE(prof.values.size() == static_cast<std::size_t>(st.n));
  const double sup = *std::max_element(prof.values.begin(), prof.values.end());
  REQUIRE_THAT(sup, WithinAbs(1.0, 1e-15));
  REQUIRE_THAT(prof.h, WithinRel(100.0 * st.h(), 1e-13));
  for (int i = 0; i < st.n; ++i)
    REQUIRE_THAT(prof.values[i],
                 WithinAbs(phi_alpha(P, 1.0, prof.radius(i)), 1e-12));

  REQUIRE_THROWS_AS(rescaled_profile(st, st.time + 0.5), domain_error);
  auto v = make_state(P, Frame::selfsimilar, 10.0, 64,
                      [&](double) { return P.kappa; });
  v = evolve(v, v.time);
  REQUIRE_THROWS_AS(rescaled_profile(v, v.time), domain_error);
}

TEST_CASE("a super-threshold profile blows up with a type I rate",
          "[dynamics][slow]") {
  const ProblemParams P = make_params(6, 5.0);
  auto st = make_state(P, Frame::physical, 20.0, 256, [&](double r) {
    return 1.5 * phi_alpha(P, 1.0, r);
  });
  DtControl ctl;
  ctl.rtol = 1e-8;
  ctl.output_interval = 0.005;
  auto run = evolve(st, 5.0, ctl);
  REQUIRE(run.status == RunStatus::blew_up);

  auto rep = classify_blowup(run);
  REQUIRE(rep.T_est.has_value());
  REQUIRE(*rep.T_est > 0.02);
  REQUIRE(*rep.T_est < 0.2);
  REQUIRE(rep.type == BlowupType::type_I);
  REQUIRE(!rep.rate_series.empty());
  REQUIRE(rep.rescaled.size() == 3);
  for (const auto& [tk, prof] : rep.rescaled) {
    REQUIRE(tk < *rep.T_est);
    const double sup =
        *std::max_element(prof.values.begin(), prof.values.end());
    REQUIRE_THAT(sup, WithinAbs(1.0, 1e-12));
  }

  const double C = universal_bound_check(run, rep.T_est);
  REQUIRE(C > 0.05);
  REQUIRE(C < 10.0);
}

TEST_CASE("the homogeneous exact blowup is classified sharply",
          "[dynamics][slow]") {
  // u(0) = kappa is spatially flat, so u(t) = kappa (1-t)^{-1/(p-1)} exactly
  // and T = 1; the estimate and the rescaled rate must both be sharp.
  const ProblemParams P = make_params(6, 5.0);
  auto st = make_state(P, Frame::physical, 20.0, 128,
                       [&](double) { return P.kappa; });
  DtControl ctl;
  ctl.rtol = 1e-10;
  ctl.output_interval = 0.01;
  auto run = evolve(st, 2.0, ctl);
  REQUIRE(run.status == RunStatus::blew_up);

  auto rep = classify_blowup(run);
  REQUIRE(rep.T_est.has_value());
  REQUIRE_THAT(*rep.T_est, WithinAbs(1.0, 1e-7));
  REQUIRE(rep.type == BlowupType::type_I);
  REQUIRE(rep.rate_series.size() > 100);
  for (const auto& [t, rate] : rep.rate_series)
    REQUIRE_THAT(rate, WithinRel(P.kappa, 1e-6));

  const double C = universal_bound_check(run, rep.T_est);
  REQUIRE(C > 0.5);
  REQUIRE(C < 3.0);
}

TEST_CASE("blowup classification guards", "[dynamics]") {
  const ProblemParams P = make_params(6, 5.0);

  auto st = make_state(P, Frame::selfsimilar, 20.0, 128,
                       [&](double) { return P.kappa; });
  auto run = evolve(st, 1.0);
  auto rep = classify_blowup(run);
  REQUIRE(rep.type == BlowupType::none);
  REQUIRE(!rep.T_est.has_value());

  // Data so close to the threshold that almost no history precedes the
  // blowup event: the rate fit must refuse rather than extrapolate.
  auto hot = make_state(P, Frame::physical, 10.0, 64,
                        [&](double) { return 8e7; });
  auto boom = evolve(hot, 1.0);
  REQUIRE(boom.status == RunStatus::blew_up);
  REQUIRE_THROWS_AS(classify_blowup(boom), numerical_error);
}

TEST_CASE("detect_limit identifies decay to zero", "[dynamics][slow]") {
  const ProblemParams P = make_params(12, 5.0);
  auto st = make_state(P, Frame::selfsimilar, 20.0, 250,
                       [&](double) { return 0.3 * P.kappa; });
  DtControl ctl;
  ctl.output_interval = 0.5;
  auto run = evolve(st, 23.0, ctl);
  REQUIRE(run.status == RunStatus::completed);

  std::vector<SteadyState> atlas;  // candidates beyond the built-ins: none
  auto verdict = detect_limit(run, atlas);
  REQUIRE(verdict.decided);
  REQUIRE(verdict.label == "zero");
  REQUIRE(verdict.distance < 1e-3);

  // Guards: frame, history span, snapshot count.
  auto phys = make_state(P, Frame::physical, 10.0, 64,
                         [&](double) { return 0.1; });
  phys = evolve(phys, 1.0);
  REQUIRE_THROWS_AS(detect_limit(phys, atlas), domain_error);

  auto brief = make_state(P, Frame::selfsimilar, 20.0, 64,
                          [&](double) { return 0.3 * P.kappa; });
  brief = evolve(brief, 2.0);
  REQUIRE_THROWS_AS(detect_limit(brief, atlas), domain_error);

  DtControl sparse;
  sparse.output_interval = 7.0;
  auto thin = make_state(P, Frame::selfsimilar, 20.0, 64,
                         [&](double) { return 0.3 * P.kappa; });
  auto thin_run = evolve(thin, 6.0, sparse);
  REQUIRE_THROWS_AS(detect_limit(thin_run, atlas), domain_error);
}

TEST_CASE("history records land on the output grid", "[dynamics]") {
  const ProblemParams P = make_params(12, 5.0);
  auto st = make_state(P, Frame::selfsimilar, 20.0, 100,
                       [&](double) { return P.kappa; });
  DtControl ctl;
  ctl.output_interval = 0.25;
  auto run = evolve(st, 1.0, ctl);
  for (double want : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    const bool found =
        std::any_of(run.history.begin(), run.history.end(),
                    [&](const HistoryPoint& hp) { return hp.time == want; });
    REQUIRE(found);
  }

  // Continuation does not duplicate the seam record.
  auto more = evolve(run, 2.0, ctl);
  const auto seams = std::count_if(
      more.history.begin(), more.history.end(),
      [](const HistoryPoint& hp) { return hp.time == 1.0; });
  REQUIRE(seams == 1);

  // A no-op evolve still records the current state once.
  auto idle = make_state(P, Frame::selfsimilar, 20.0, 100,
                         [&](double) { return P.kappa; });
  auto noop = evolve(idle, idle.time, ctl);
  REQUIRE(noop.history.size() == 1);
  REQUIRE(noop.snapshots.size() == 1);
}

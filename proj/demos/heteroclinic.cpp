// Connection experiment in the selfsimilar frame.  Start from the second
// bounded profile w_a nudged toward the constant state,
//
//     v(rho, 0) = w_a(rho) + 0.05 (kappa - w_a(rho)),
//
// evolve, and ask which steady state the run settles on.  The interesting
// observables along the way are the zero number against the singular steady
// state (nonincreasing by the intersection-comparison principle) and the
// weighted energy (nonincreasing by dissipation).  Both outcomes, decay to
// zero or relaxation to kappa, are legitimate; the point of the experiment
// is that the run does settle on a steady state rather than wander.
//
// Build target: demo_heteroclinic (no arguments, prints to stdout).

#include <cstdio>

#include "fujita/dynamics.hpp"
#include "fujita/steady.hpp"

using namespace fujita;

int main() {
  const ProblemParams P = make_params(6, 5);

  std::printf("locating w_a (second bounded profile) at N = %d, p = %g\n",
              P.N, P.p);
  const SteadyState wa = find_Ak(P, 2, 1.1 * P.kappa, 50.0 * P.kappa);
  std::printf("  w_a(0) = %.12f, kappa = %.12f\n\n", wa.value(0.0), P.kappa);

  const double eps = 0.05;
  const auto initial = [&](double rho) {
    const double w = wa.value(rho);
    return w + eps * (P.kappa - w);
  };

  EvolutionState st = make_state(P, Frame::selfsimilar, 20.0, 400, initial);
  DtControl ctl;
  ctl.output_interval = 1.0;

  std::printf("%8s %14s %14s %6s\n", "s", "sup", "energy", "z");
  EvolutionState run = evolve(st, 30.0, ctl);
  for (const auto& rec : run.history)
    std::printf("%8.2f %14.8f %14.8f %6d\n", rec.time, rec.sup_norm,
                rec.energy, rec.z_vs_phi_inf);

  if (run.status == RunStatus::blew_up) {
    std::printf("\nrun left the bounded regime (selfsimilar blowup)\n");
    return 0;
  }

  // Monotonicity of the recorded zero number.
  bool z_monotone = true;
  for (std::size_t i = 1; i < run.history.size(); ++i)
    if (run.history[i].z_vs_phi_inf > run.history[i - 1].z_vs_phi_inf)
      z_monotone = false;
  std::printf("\nz(v - phi_inf) nonincreasing: %s\n",
              z_monotone ? "yes" : "NO");

  const LimitVerdict verdict = detect_limit(run, {wa});
  std::printf("limit verdict: %s (nearest %s, core sup distance %.3e)\n",
              verdict.label.c_str(), verdict.nearest.c_str(),
              verdict.distance);
  return 0;
}

#pragma once

// Quadrature backends: generalized Gauss-Laguerre rules built by
// Golub-Welsch (symmetric tridiagonal eigenproblem, via Eigen), a Gaussian
// weight rule in the radial variable, and a globally adaptive Simpson
// integrator for everything that is not smooth-and-weighted.

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <vector>

#include "fujita/common.hpp"
#include "fujita/specfun.hpp"

namespace fujita {

using RealFn = std::function<double(double)>;

// Nodes/weights for int_0^inf f(t) t^alpha e^{-t} dt, exact for polynomials
// of degree <= 2n-1.
struct GaussLaguerreRule {
  double alpha = 0;
  std::vector<double> nodes;
  std::vector<double> weights;

  double integrate(const RealFn& f) const {
    double acc = 0.0;
    for (size_t i = 0; i < nodes.size(); ++i) acc += weights[i] * f(nodes[i]);
    return acc;
  }
};

inline GaussLaguerreRule gauss_laguerre(int n, double alpha) {
  if (n < 1) throw domain_error("gauss_laguerre: need n >= 1");
  if (alpha <= -1.0) throw domain_error("gauss_laguerre: need alpha > -1");

  // Jacobi matrix of the generalized Laguerre weight: diagonal 2k+alpha+1,
  // off-diagonal sqrt(k(k+alpha)). Weights come from the squared first
  // components of the eigenvectors times the zeroth moment Gamma(alpha+1).
  Eigen::VectorXd diag(n), sub(std::max(n - 1, 1));
  for (int k = 0; k < n; ++k) diag[k] = 2.0 * k + alpha + 1.0;
  for (int k = 1; k < n; ++k) sub[k - 1] = std::sqrt(k * (k + alpha));

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub.head(std::max(n - 1, 0)),
                            Eigen::ComputeEigenvectors);
  if (es.info() != Eigen::Success)
    throw numerical_error("gauss_laguerre: tridiagonal eigensolve failed");

  const double mu0 = gamma(alpha + 1.0);
  GaussLaguerreRule rule;
  rule.alpha = alpha;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    rule.nodes[i] = es.eigenvalues()[i];
    const double v0 = es.eigenvectors()(0, i);
    rule.weights[i] = mu0 * v0 * v0;
  }
  return rule;
}

// Rule for int_0^inf h(rho) rho^{N-1} e^{-rho^2/4} drho, obtained from the
// Laguerre rule with alpha = N/2 - 1 through rho = 2 sqrt(t). Spectrally
// accurate for h analytic in rho^2 (all steady profiles are).
struct WeightedQuadrature {
  int N = 0;
  std::vector<double> rho_nodes;
  std::vector<double> weights;

  static WeightedQuadrature make(int N, int n = 200) {
    if (N < 3) throw domain_error("WeightedQuadrature: need N >= 3");
    const GaussLaguerreRule gl = gauss_laguerre(n, 0.5 * N - 1.0);
    WeightedQuadrature q;
    q.N = N;
    const double pref = std::pow(2.0, N - 1);
    q.rho_nodes.resize(gl.nodes.size());
    q.weights.resize(gl.nodes.size());
    for (size_t i = 0; i < gl.nodes.size(); ++i) {
      q.rho_nodes[i] = 2.0 * std::sqrt(gl.nodes[i]);
      q.weights[i] = pref * gl.weights[i];
    }
    return q;
  }

  double integrate(const RealFn& h) const {
    double acc = 0.0;
    for (size_t i = 0; i < rho_nodes.size(); ++i)
      acc += weights[i] * h(rho_nodes[i]);
    return acc;
  }
};

// Exact moment int_0^inf rho^{N-1+2m} e^{-rho^2/4} drho, for rule checks.
inline double gaussian_weight_moment(int N, int m) {
  return std::pow(2.0, N + 2 * m - 1) * gamma(0.5 * (N + 2 * m));
}

namespace detail {

struct SimpsonWork {
  const RealFn* f;
  int evals = 0;
  int max_evals = 2000000;

  double eval(double x) {
    if (++evals > max_evals)
      throw numerical_error("adaptive quadrature: evaluation budget exceeded");
    return (*f)(x);
  }
};

inline double simpson_rec(SimpsonWork& w, double a, double b, double fa,
                          double fm, double fb, double whole, double eps,
                          int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = w.eval(lm), frm = w.eval(rm);
  const double h = b - a;
  const double left = h / 12.0 * (fa + 4.0 * flm + fm);
  const double right = h / 12.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0)
    throw numerical_error("adaptive quadrature: max refinement depth reached");
  if (std::abs(delta) <= 15.0 * eps)
    return left + right + delta / 15.0;
  return simpson_rec(w, a, m, fa, flm, fm, left, 0.5 * eps, depth - 1) +
         simpson_rec(w, m, b, fm, frm, fb, right, 0.5 * eps, depth - 1);
}

}  // namespace detail

// Globally adaptive Simpson on [a, b]. The tolerance is relative to a coarse
// estimate of int |f|; pass abs_floor to stop refining noise around zero.
inline double integrate_adaptive(const RealFn& f, double a, double b,
                                 double rel_tol = 1e-12,
                                 double abs_floor = 0.0) {
  if (!(b > a)) throw domain_error("integrate_adaptive: need b > a");
  detail::SimpsonWork w;
  w.f = &f;

  // Coarse pass for the scale of int |f| (33 samples).
  const int kCoarse = 32;
  double scale = 0.0;
  std::vector<double> fs(kCoarse + 1);
  for (int i = 0; i <= kCoarse; ++i) {
    fs[i] = w.eval(a + (b - a) * i / kCoarse);
    scale += std::abs(fs[i]);
  }
  scale *= (b - a) / (kCoarse + 1);
  double eps = std::max(rel_tol * scale, abs_floor);
  if (eps == 0.0) eps = 1e-300;

  // Refine each coarse panel independently so sharp features localized in
  // one panel do not force refinement everywhere.
  double total = 0.0;
  for (int i = 0; i < kCoarse; i += 2) {
    const double pa = a + (b - a) * i / kCoarse;
    const double pb = a + (b - a) * (i + 2) / kCoarse;
    const double whole =
        (pb - pa) / 6.0 * (fs[i] + 4.0 * fs[i + 1] + fs[i + 2]);
    total += detail::simpson_rec(w, pa, pb, fs[i], fs[i + 1], fs[i + 2], whole,
                                 eps * 2.0 / kCoarse, 48);
  }
  return total;
}

}  // namespace fujita

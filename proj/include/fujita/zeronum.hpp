#pragma once

// Robust zero counting on an interval, the discrete stand-in for the
// Sturm zero number z_I(f). Sign changes are detected on a coarse grid,
// refined by bisection, and near-grazing samples trigger a local rescan at
// higher density so close double zeros are not miscounted.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "fujita/common.hpp"

namespace fujita {

struct ZeroCount {
  double a = 0, b = 0;
  int count = 0;
  std::vector<double> crossing_locations;  // strictly increasing
  bool tangency_flag = false;  // grazing zero seen (not counted)
};

// Endpoint values for singular comparisons: intervals against phi_inf must
// start at or beyond this radius.
inline constexpr double kSingularTruncation = 1e-2;

namespace detail {

struct Sample {
  double x, f;
};

}  // namespace detail

// Count strict sign changes of f on [a, b] from n_coarse+1 uniform samples.
// |f| <= tol_zero (relative to max |f| sampled) counts as "numerically
// zero"; runs of such samples entered and left with the same sign raise the
// tangency flag instead of a crossing. Throws domain_error when an endpoint
// itself is numerically zero, since the count would be ill-defined.
inline ZeroCount zero_number(const std::function<double(double)>& f, double a,
                             double b, int n_coarse = 512) {
  if (!(b > a)) throw domain_error("zero_number: need b > a");
  if (n_coarse < 8) throw domain_error("zero_number: need n_coarse >= 8");

  std::vector<detail::Sample> s;
  s.reserve(static_cast<size_t>(n_coarse) + 1);
  double fmax = 0.0;
  for (int i = 0; i <= n_coarse; ++i) {
    const double x = a + (b - a) * i / n_coarse;
    const double v = f(x);
    if (!std::isfinite(v))
      throw numerical_error("zero_number: non-finite sample");
    fmax = std::max(fmax, std::abs(v));
    s.push_back({x, v});
  }
  if (fmax == 0.0)
    throw domain_error("zero_number: function vanishes identically on grid");

  const double tol_zero = 1e-12 * fmax;

  // Local rescan at 8x density around suspicious (near-zero) samples, so a
  // tight pair of crossings hiding between coarse nodes is resolved.
  const double suspicious = 1e3 * tol_zero;
  std::vector<detail::Sample> fine;
  fine.reserve(s.size());
  for (size_t i = 0; i < s.size(); ++i) {
    fine.push_back(s[i]);
    if (i + 1 == s.size()) break;
    const bool near0 =
        std::abs(s[i].f) < suspicious || std::abs(s[i + 1].f) < suspicious;
    const int sub = near0 ? 8 : 1;
    for (int k = 1; k < sub; ++k) {
      const double x = s[i].x + (s[i + 1].x - s[i].x) * k / sub;
      fine.push_back({x, f(x)});
    }
  }

  auto cls = [&](double v) -> int {
    if (v > tol_zero) return 1;
    if (v < -tol_zero) return -1;
    return 0;
  };

  if (cls(fine.front().f) == 0 || cls(fine.back().f) == 0)
    throw domain_error("zero_number: endpoint is numerically zero");

  ZeroCount out;
  out.a = a;
  out.b = b;

  const double xtol = 1e-12 * std::max(1.0, std::max(std::abs(a), std::abs(b)));
  auto refine = [&](size_t i0, size_t i1) {
    double lo = fine[i0].x, hi = fine[i1].x;
    double flo = fine[i0].f;
    while (hi - lo > xtol) {
      const double mid = 0.5 * (lo + hi);
      const double fm = f(mid);
      if ((fm < 0.0) == (flo < 0.0))
        lo = mid, flo = fm;
      else
        hi = mid;
    }
    return 0.5 * (lo + hi);
  };

  // Walk the classified sequence; crossings may pass through a run of
  // zero-classified samples.
  size_t i = 0;
  int last_sign = cls(fine[0].f);
  size_t last_idx = 0;
  for (i = 1; i < fine.size(); ++i) {
    const int c = cls(fine[i].f);
    if (c == 0) continue;
    if (c != last_sign) {
      out.crossing_locations.push_back(refine(last_idx, i));
    } else if (i > last_idx + 1) {
      // Same sign on both sides of a zero-classified run: grazing contact.
      out.tangency_flag = true;
    }
    last_sign = c;
    last_idx = i;
  }
  out.count = static_cast<int>(out.crossing_locations.size());
  return out;
}

// Zero number of f - g, with an explicit identity guard: if f and g agree
// to tolerance on the whole coarse grid the count is meaningless.
inline ZeroCount intersection_number(const std::function<double(double)>& f,
                                     const std::function<double(double)>& g,
                                     double a, double b, int n_coarse = 512) {
  if (!(b > a)) throw domain_error("intersection_number: need b > a");
  double scale = 0.0, dmax = 0.0;
  for (int i = 0; i <= 64; ++i) {
    const double x = a + (b - a) * i / 64;
    const double fv = f(x), gv = g(x);
    scale = std::max({scale, std::abs(fv), std::abs(gv)});
    dmax = std::max(dmax, std::abs(fv - gv));
  }
  if (scale > 0.0 && dmax < 1e-12 * scale)
    throw domain_error("intersection_number: profiles are identical on grid");
  return zero_number([&](double x) { return f(x) - g(x); }, a, b, n_coarse);
}

}  // namespace fujita

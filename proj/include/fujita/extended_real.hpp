#pragma once

#include <limits>
#include <ostream>

#include "fujita/common.hpp"

namespace fujita {

// A value on the extended half line: either a finite double or +infinity.
// Critical exponents that degenerate for small dimension (p_JL, p_L, p_H)
// are represented as +infinity rather than as NaN or a sentinel, so that
// comparisons like `p < pJL` stay meaningful in every dimension.
class ExtendedReal {
 public:
  constexpr ExtendedReal() : finite_(true), value_(0.0) {}

  static constexpr ExtendedReal of(double v) { return ExtendedReal(true, v); }
  static constexpr ExtendedReal infinity() { return ExtendedReal(false, 0.0); }

  constexpr bool is_finite() const { return finite_; }

  // Finite value; throws on +infinity instead of returning a junk double.
  double get() const {
    if (!finite_) throw domain_error("ExtendedReal: value is +infinity");
    return value_;
  }

  // Value with +infinity collapsed to HUGE_VAL, for printing and comparisons
  // where IEEE infinity semantics are exactly what is wanted.
  constexpr double as_double() const {
    return finite_ ? value_ : std::numeric_limits<double>::infinity();
  }

  friend constexpr bool operator<(double a, const ExtendedReal& b) {
    return !b.finite_ || a < b.value_;
  }
  friend constexpr bool operator>=(double a, const ExtendedReal& b) {
    return !(a < b);
  }
  friend constexpr bool operator<(const ExtendedReal& a, double b) {
    return a.finite_ && a.value_ < b;
  }
  friend constexpr bool operator<(const ExtendedReal& a, const ExtendedReal& b) {
    if (!a.finite_) return false;
    return !b.finite_ || a.value_ < b.value_;
  }

  friend std::ostream& operator<<(std::ostream& os, const ExtendedReal& x) {
    if (x.finite_) return os << x.value_;
    return os << "inf";
  }

 private:
  constexpr ExtendedReal(bool finite, double value)
      : finite_(finite), value_(value) {}

  bool finite_;
  double value_;
};

}  // namespace fujita

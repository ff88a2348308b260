#pragma once

#include <stdexcept>
#include <string>

#include "sqf/int128.hpp"

namespace sqf {

/// Exact rational with 128-bit numerator and denominator, always reduced,
/// denominator > 0. Arithmetic throws std::overflow_error rather than wrap.
struct Rat {
  i128 num = 0;
  i128 den = 1;

  Rat() = default;
  Rat(i128 n) : num(n), den(1) {}
  Rat(i128 n, i128 d) : num(n), den(d) { normalize(); }

  void normalize() {
    if (den == 0) throw std::domain_error("rational with zero denominator");
    if (den < 0) { num = -num; den = -den; }
    i128 g = gcd128(abs128(num), den);
    if (g > 1) { num /= g; den /= g; }
  }

  bool is_zero() const { return num == 0; }
  bool is_integer() const { return den == 1; }
  int sign() const { return sign128(num); }

  Rat operator+(const Rat& o) const {
    i128 g = gcd128(den, o.den);
    i128 dl = den / g;
    i128 n = checked_add(checked_mul(num, o.den / g), checked_mul(o.num, dl));
    return Rat(n, checked_mul(dl, o.den));
  }
  Rat operator-(const Rat& o) const { return *this + Rat(-o.num, o.den); }
  Rat operator-() const { Rat r; r.num = -num; r.den = den; return r; }
  Rat operator*(const Rat& o) const {
    i128 g1 = gcd128(abs128(num), o.den);
    i128 g2 = gcd128(abs128(o.num), den);
    Rat r;
    r.num = checked_mul(num / g1, o.num / g2);
    r.den = checked_mul(den / g2, o.den / g1);
    return r;
  }
  Rat operator/(const Rat& o) const {
    if (o.num == 0) throw std::domain_error("rational division by zero");
    return *this * Rat(o.den, o.num);
  }

  bool operator==(const Rat& o) const { return num == o.num && den == o.den; }
  bool operator!=(const Rat& o) const { return !(*this == o); }
  bool operator<(const Rat& o) const {
    return checked_mul(num, o.den) < checked_mul(o.num, den);
  }
  bool operator<=(const Rat& o) const { return !(o < *this); }
  bool operator>(const Rat& o) const { return o < *this; }
  bool operator>=(const Rat& o) const { return !(*this < o); }

  Rat abs() const { Rat r; r.num = abs128(num); r.den = den; return r; }

  /// Floor of num/den as an integer.
  i128 floor() const {
    i128 q = num / den;
    if (num % den != 0 && num < 0) --q;
    return q;
  }
  i128 ceil() const {
    i128 q = num / den;
    if (num % den != 0 && num > 0) ++q;
    return q;
  }

  double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
  std::string str() const {
    if (den == 1) return to_string(num);
    return to_string(num) + "/" + to_string(den);
  }
};

}  // namespace sqf

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace sqf {

using i64 = std::int64_t;
using u64 = std::uint64_t;
using i128 = __int128;
using u128 = unsigned __int128;

inline i128 abs128(i128 x) { return x < 0 ? -x : x; }

inline int sign128(i128 x) { return x < 0 ? -1 : (x > 0 ? 1 : 0); }

std::string to_string(i128 x);
std::string to_string(u128 x);

/// Floor of sqrt(n), exact.
u64 isqrt(u128 n);

/// Root r >= 0 with r*r == n, if n is a perfect square.
std::optional<u64> exact_sqrt(i128 n);

/// Floor cube root for n >= 0, exact.
u64 icbrt(u128 n);

/// Signed r with r^3 == n, if n is a perfect cube.
std::optional<i64> exact_cbrt(i128 n);

i128 gcd128(i128 a, i128 b);

/// a*b, throwing std::overflow_error if the product leaves the i128 range.
inline i128 checked_mul(i128 a, i128 b) {
  i128 r;
  if (__builtin_mul_overflow(a, b, &r)) throw std::overflow_error("i128 multiply overflow");
  return r;
}

inline i128 checked_add(i128 a, i128 b) {
  i128 r;
  if (__builtin_add_overflow(a, b, &r)) throw std::overflow_error("i128 add overflow");
  return r;
}

/// Euclidean remainder in [0, m).
inline u64 mod_floor(i128 a, u64 m) {
  i128 r = a % static_cast<i128>(m);
  if (r < 0) r += m;
  return static_cast<u64>(r);
}

u64 mulmod64(u64 a, u64 b, u64 m);
u64 powmod64(u64 base, u64 exp, u64 m);

/// Inverse of a modulo m (gcd(a, m) must be 1), in [0, m).
u64 inv_mod(u64 a, u64 m);

}  // namespace sqf

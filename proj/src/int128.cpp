#include "sqf/int128.hpp"

#include <algorithm>
#include <cmath>

namespace sqf {

std::string to_string(u128 x) {
  if (x == 0) return "0";
  std::string s;
  while (x > 0) {
    s.push_back(static_cast<char>('0' + static_cast<int>(x % 10)));
    x /= 10;
  }
  std::reverse(s.begin(), s.end());
  return s;
}

std::string to_string(i128 x) {
  if (x < 0) return "-" + to_string(static_cast<u128>(-x));
  return to_string(static_cast<u128>(x));
}

u64 isqrt(u128 n) {
  if (n == 0) return 0;
  u128 r = static_cast<u128>(std::sqrt(static_cast<long double>(n)));
  while (r > 0 && r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return static_cast<u64>(r);
}

std::optional<u64> exact_sqrt(i128 n) {
  if (n < 0) return std::nullopt;
  u64 r = isqrt(static_cast<u128>(n));
  if (static_cast<u128>(r) * r == static_cast<u128>(n)) return r;
  return std::nullopt;
}

u64 icbrt(u128 n) {
  if (n == 0) return 0;
  u128 r = static_cast<u128>(std::cbrt(static_cast<long double>(n)));
  while (r > 0 && r * r * r > n) --r;
  while ((r + 1) * (r + 1) * (r + 1) <= n) ++r;
  return static_cast<u64>(r);
}

std::optional<i64> exact_cbrt(i128 n) {
  bool neg = n < 0;
  u128 a = static_cast<u128>(neg ? -n : n);
  u64 r = icbrt(a);
  if (static_cast<u128>(r) * r * r == a) return neg ? -static_cast<i64>(r) : static_cast<i64>(r);
  return std::nullopt;
}

i128 gcd128(i128 a, i128 b) {
  a = abs128(a);
  b = abs128(b);
  while (b != 0) {
    i128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

u64 mulmod64(u64 a, u64 b, u64 m) {
  return static_cast<u64>(static_cast<u128>(a) * b % m);
}

u64 powmod64(u64 base, u64 exp, u64 m) {
  if (m == 1) return 0;
  u64 r = 1;
  base %= m;
  while (exp > 0) {
    if (exp & 1) r = mulmod64(r, base, m);
    base = mulmod64(base, base, m);
    exp >>= 1;
  }
  return r;
}

u64 inv_mod(u64 a, u64 m) {
  a %= m;
  i128 t = 0, newt = 1;
  i128 r = m, newr = a;
  while (newr != 0) {
    i128 q = r / newr;
    i128 tmp = t - q * newt;
    t = newt;
    newt = tmp;
    tmp = r - q * newr;
    r = newr;
    newr = tmp;
  }
  if (r != 1) throw std::domain_error("inv_mod: arguments not coprime");
  if (t < 0) t += m;
  return static_cast<u64>(t);
}

}  // namespace sqf

#include "sqf/cubic.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "sqf/arith.hpp"

namespace sqf {

CubicPointCount rho_count(u64 B, i64 a, i64 b, i64 c, bool collect_points) {
  if (a == 0 || b == 0 || c == 0) throw std::domain_error("coefficients must be nonzero");
  CubicPointCount r;
  r.a = a;
  r.b = b;
  r.c = c;
  r.B = B;
  const i64 H = static_cast<i64>(B);
  for (i64 x = -H; x <= H; ++x) {
    i128 ax3 = static_cast<i128>(a) * x * x * x;
    for (i64 y = -H; y <= H; ++y) {
      i128 t = ax3 + static_cast<i128>(b) * y * y * y;
      // c z^3 = -t
      if (t % c != 0) continue;
      auto z = exact_cbrt(-(t / c));
      if (!z) continue;
      if (*z < -H || *z > H) continue;
      if (x == 0 && y == 0 && *z == 0) continue;
      u64 g = std::gcd(std::gcd(static_cast<u64>(x < 0 ? -x : x), static_cast<u64>(y < 0 ? -y : y)),
                       static_cast<u64>(*z < 0 ? -*z : *z));
      if (g != 1) continue;
      ++r.count;
      if (collect_points) r.points.push_back({x, y, *z});
    }
  }
  return r;
}

i64 jacobian_m(i64 a, i64 b, i64 c) {
  if (a == 0 || b == 0 || c == 0) throw std::domain_error("coefficients must be nonzero");
  i128 prod = static_cast<i128>(12) * a * b * c;
  if (abs128(prod) > static_cast<i128>(INT64_MAX))
    throw std::domain_error("12abc out of range");
  return cube_decompose(static_cast<i64>(prod)).second;
}

RankBound rank_upper_bound(u64 M) {
  if (M == 0) throw std::domain_error("M must be positive");
  auto f = factorize(M);
  for (auto [p, e] : f.factors)
    if (e >= 3) throw std::domain_error("M must be cube-free");
  RankBound r;
  r.M = M;
  r.omega_M = f.omega();
  r.tau3_18M = tau3(18 * M);
  int log3 = 0;
  u64 pow3 = 1;
  while (pow3 * 3 <= r.tau3_18M) {
    pow3 *= 3;
    ++log3;
  }
  r.bound = (2 + 2 * r.omega_M) + log3 - 1;
  return r;
}

}  // namespace sqf

#pragma once

#include <vector>

#include "sqf/int128.hpp"

namespace sqf {

struct CubicPoint {
  i64 x, y, z;
};

/// Coprime integer points on a x^3 + b y^3 + c z^3 = 0 of height <= B.
struct CubicPointCount {
  i64 a, b, c;
  u64 B = 0;
  u64 count = 0;
  std::vector<CubicPoint> points;
};

/// Exact enumeration over (x, y) with z recovered by cube-root testing.
/// The origin is excluded; points with a zero coordinate are included.
CubicPointCount rho_count(u64 B, i64 a, i64 b, i64 c, bool collect_points = true);

/// The cube-free M with 12abc = n^3 M (sign carried by M).
i64 jacobian_m(i64 a, i64 b, i64 c);

struct RankBound {
  u64 M = 1;
  int omega_M = 0;
  u64 tau3_18M = 0;
  int bound = 0;  // (2 + 2 omega(M)) + floor(log3 tau3(18M)) - 1
};

/// Explicit descent bound for the rank of Y^2 = X^3 - 3M^2 from the
/// 3-isogeny image sizes. M must be cube-free and positive.
RankBound rank_upper_bound(u64 M);

}  // namespace sqf

#include "sqf/squarefull.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace sqf {
namespace {

constexpr u64 kMaxBound = 1ull << 60;
constexpr u64 kBitsetBound = 1ull << 30;

void check_bound(u64 B) {
  if (B == 0) throw std::domain_error("bound must be positive");
  if (B > kMaxBound) throw std::domain_error("bound exceeds 2^60 cap");
}

/// Square-free flags for 1..limit by sieving prime squares.
std::vector<bool> squarefree_table(u64 limit) {
  std::vector<bool> sf(limit + 1, true);
  if (limit >= 1) sf[0] = false;
  for (u64 p = 2; p * p <= limit; ++p) {
    if (!sf[p]) continue;  // p has a square divisor, p^2 already marked
    for (u64 m = p * p; m <= limit; m += p * p) sf[m] = false;
  }
  return sf;
}

u64 gcd3(u64 a, u64 b, u64 c) { return std::gcd(std::gcd(a, b), c); }

}  // namespace

void CoeffTriple::validate() const {
  const i64 as[3] = {a1, a2, a3};
  for (i64 a : as) {
    if (a == 0) throw std::domain_error("coefficient must be nonzero");
    if (!is_squarefree(static_cast<u64>(a < 0 ? -a : a)))
      throw std::domain_error("coefficient must be square-free");
  }
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j)
      if (std::gcd(static_cast<u64>(as[i] < 0 ? -as[i] : as[i]),
                   static_cast<u64>(as[j] < 0 ? -as[j] : as[j])) != 1)
        throw std::domain_error("coefficients must be pairwise coprime");
  if ((a1 > 0) == (a2 > 0) && (a2 > 0) == (a3 > 0))
    throw std::domain_error("coefficients of one sign admit no positive solutions");
}

i128 Solution::term(int i) const {
  i64 a = i == 1 ? coeffs.a1 : (i == 2 ? coeffs.a2 : coeffs.a3);
  u64 x = i == 1 ? x1 : (i == 2 ? x2 : x3);
  u64 y = i == 1 ? y1 : (i == 2 ? y2 : y3);
  return static_cast<i128>(a) * (static_cast<i128>(x) * x) * (static_cast<i128>(y) * y * y);
}

bool Solution::satisfies_equation() const { return term(1) + term(2) + term(3) == 0; }

bool Solution::satisfies_gcd() const {
  if (gcd3(x1 * y1, x2 * y2, x3 * y3) != 1) return false;
  u64 A = static_cast<u64>(abs128(static_cast<i128>(coeffs.a1) * coeffs.a2 * coeffs.a3));
  for (u64 v : {x1, x2, x3, y1, y2, y3})
    if (std::gcd(A, v) != 1) return false;
  return true;
}

bool Solution::satisfies_range(u64 B) const {
  for (int i = 1; i <= 3; ++i)
    if (abs128(term(i)) > static_cast<i128>(B)) return false;
  return true;
}

bool Solution::coeff_y_squarefree() const {
  auto ay = [](i64 a, u64 y) { return static_cast<u64>(a < 0 ? -a : a) * y; };
  return is_squarefree(ay(coeffs.a1, y1)) && is_squarefree(ay(coeffs.a2, y2)) &&
         is_squarefree(ay(coeffs.a3, y3));
}

bool DyadicBox::contains(const Solution& s) const {
  auto in = [](u64 v, u64 V) { return V / 2 < v && v <= V; };
  return in(s.x1, X1) && in(s.x2, X2) && in(s.x3, X3) && in(s.y1, Y1) && in(s.y2, Y2) &&
         in(s.y3, Y3);
}

bool DyadicBox::admissible(u64 B, const CoeffTriple& a) const {
  const u64 X[3] = {X1, X2, X3};
  const u64 Y[3] = {Y1, Y2, Y3};
  const i64 as[3] = {a.a1, a.a2, a.a3};
  for (int i = 0; i < 3; ++i) {
    if (X[i] == 0 || Y[i] == 0 || !std::has_single_bit(X[i]) || !std::has_single_bit(Y[i]))
      return false;
    i128 lhs = static_cast<i128>(X[i]) * X[i] * Y[i] * Y[i] * Y[i];
    i128 rhs = static_cast<i128>(32) * B / (as[i] < 0 ? -as[i] : as[i]);
    if (lhs > rhs) return false;
  }
  return true;
}

std::optional<SquareFullDecomp> decompose_squarefull(u64 n) {
  if (n == 0) return std::nullopt;
  SquareFullDecomp d;
  d.n = n;
  for (auto [p, e] : factorize(n).factors) {
    if (e < 2) return std::nullopt;
    if (e % 2 == 1) {
      d.y *= p;
      e -= 3;
    }
    for (int i = 0; i < e / 2; ++i) d.x *= p;
  }
  return d;
}

std::vector<SquareFullDecomp> enumerate_squarefull(u64 B) {
  check_bound(B);
  u64 ycap = icbrt(B);
  auto sf = squarefree_table(ycap);
  std::vector<SquareFullDecomp> out;
  for (u64 y = 1; y <= ycap; ++y) {
    if (!sf[y]) continue;
    u128 y3 = static_cast<u128>(y) * y * y;
    u64 xmax = isqrt(static_cast<u128>(B) / y3);
    for (u64 x = 1; x <= xmax; ++x) out.push_back({static_cast<u64>(x * x * y3), x, y});
  }
  std::sort(out.begin(), out.end(),
            [](const SquareFullDecomp& a, const SquareFullDecomp& b) { return a.n < b.n; });
  return out;
}

SquareFullSet::SquareFullSet(u64 B) : bound_(B) {
  check_bound(B);
  auto all = enumerate_squarefull(B);
  values_.reserve(all.size());
  for (const auto& d : all) values_.push_back(d.n);
  if (B <= kBitsetBound) {
    bits_.assign(B / 64 + 1, 0);
    for (u64 v : values_) bits_[v >> 6] |= 1ull << (v & 63);
  }
}

bool SquareFullSet::contains(u64 n) const {
  if (n == 0 || n > bound_) return false;
  if (!bits_.empty()) return (bits_[n >> 6] >> (n & 63)) & 1;
  return std::binary_search(values_.begin(), values_.end(), n);
}

namespace {

struct PairScanPart {
  std::vector<u64> bucket;  // per-threshold hit counts
  std::vector<Triple> witnesses;
};

// Scans ordered pairs with the first index in [lo, hi); thresholds sorted.
PairScanPart scan_pairs(const SquareFullSet& set, const std::vector<u64>& thresholds,
                        bool primitive, bool collect, size_t lo, size_t hi) {
  const auto& vals = set.values();
  PairScanPart part;
  part.bucket.assign(thresholds.size(), 0);
  u64 cap = thresholds.back();
  for (size_t iv = lo; iv < hi; ++iv) {
    u64 v = vals[iv];
    if (v >= cap) break;
    for (size_t iu = 0; iu <= iv; ++iu) {
      u64 u = vals[iu];
      u64 w = u + v;
      if (w > cap) break;
      if (!set.contains(w)) continue;
      if (primitive && std::gcd(u, v) != 1) continue;
      u64 mult = (iu == iv) ? 1 : 2;
      size_t slot = std::lower_bound(thresholds.begin(), thresholds.end(), w) -
                    thresholds.begin();
      part.bucket[slot] += mult;
      if (collect) {
        part.witnesses.push_back({u, v, w});
        if (iu != iv) part.witnesses.push_back({v, u, w});
      }
    }
  }
  return part;
}

std::vector<u64> run_pair_scan(const std::vector<u64>& thresholds_sorted, bool primitive,
                               bool collect, int threads, std::vector<Triple>* witnesses) {
  SquareFullSet set(thresholds_sorted.back());
  size_t n = set.values().size();
  threads = std::max(1, threads);
  std::vector<PairScanPart> parts(threads);
  if (threads == 1) {
    parts[0] = scan_pairs(set, thresholds_sorted, primitive, collect, 0, n);
  } else {
    std::vector<std::thread> pool;
    size_t chunk = (n + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
      size_t lo = std::min(n, t * chunk);
      size_t hi = std::min(n, lo + chunk);
      pool.emplace_back([&, t, lo, hi] {
        parts[t] = scan_pairs(set, thresholds_sorted, primitive, collect, lo, hi);
      });
    }
    for (auto& th : pool) th.join();
  }
  std::vector<u64> bucket(thresholds_sorted.size(), 0);
  for (const auto& p : parts)
    for (size_t i = 0; i < bucket.size(); ++i) bucket[i] += p.bucket[i];
  // prefix sums: count at threshold i includes all hits with w <= it
  std::vector<u64> counts(bucket.size());
  u64 acc = 0;
  for (size_t i = 0; i < bucket.size(); ++i) {
    acc += bucket[i];
    counts[i] = acc;
  }
  if (witnesses) {
    witnesses->clear();
    for (auto& p : parts)
      witnesses->insert(witnesses->end(), p.witnesses.begin(), p.witnesses.end());
    std::sort(witnesses->begin(), witnesses->end(), [](const Triple& a, const Triple& b) {
      return std::tie(a.w, a.u, a.v) < std::tie(b.w, b.u, b.v);
    });
  }
  return counts;
}

}  // namespace

CountResult count_solutions(u64 B, bool primitive, bool collect_witnesses, int threads) {
  check_bound(B);
  CountResult r;
  std::vector<u64> ts{B};
  auto counts =
      run_pair_scan(ts, primitive, collect_witnesses, threads, collect_witnesses ? &r.witnesses : nullptr);
  r.count = counts[0];
  return r;
}

std::vector<u64> count_solutions_table(const std::vector<u64>& thresholds, bool primitive,
                                       int threads) {
  if (thresholds.empty()) return {};
  std::vector<u64> sorted = thresholds;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  check_bound(sorted.back());
  auto counts = run_pair_scan(sorted, primitive, false, threads, nullptr);
  std::vector<u64> out(thresholds.size());
  for (size_t i = 0; i < thresholds.size(); ++i) {
    size_t j = std::lower_bound(sorted.begin(), sorted.end(), thresholds[i]) - sorted.begin();
    out[i] = counts[j];
  }
  return out;
}

u64 unordered_count(u64 B, bool primitive, int threads) {
  u64 ordered = count_solutions(B, primitive, false, threads).count;
  // diagonal pairs u = v: w = 2u must be square-full
  SquareFullSet set(B);
  u64 diag = 0;
  for (u64 u : set.values()) {
    if (2 * u > B) break;
    if (set.contains(2 * u) && (!primitive || u == 1)) ++diag;
  }
  return (ordered + diag) / 2;
}

namespace {

// m = a * x^2 * y^3 with a = product of primes of exponent 1 (forced by
// gcd(a, xy) = 1 and a y square-free), y square-free.
struct PartDecomp {
  u64 a = 1, x = 1, y = 1;
};

PartDecomp decompose_part(u64 m) {
  PartDecomp d;
  for (auto [p, e] : factorize(m).factors) {
    if (e == 1) {
      d.a *= p;
      continue;
    }
    if (e % 2 == 1) {
      d.y *= p;
      e -= 3;
    }
    for (int i = 0; i < e / 2; ++i) d.x *= p;
  }
  return d;
}

}  // namespace

std::pair<u64, Solution> reduce_triple(const Triple& t) {
  if (t.u == 0 || t.v == 0 || t.u + t.v != t.w) throw std::domain_error("not a triple: u+v != w");
  if (!is_squarefull(t.u) || !is_squarefull(t.v) || !is_squarefull(t.w))
    throw std::domain_error("triple entries must be square-full");
  u64 h = gcd3(t.u, t.v, t.w);
  PartDecomp p1 = decompose_part(t.u / h);
  PartDecomp p2 = decompose_part(t.v / h);
  PartDecomp p3 = decompose_part(t.w / h);
  for (const auto& p : {p1, p2, p3})
    if (h % p.a != 0) throw std::domain_error("reduction failed: a does not divide h");
  Solution s;
  s.coeffs = {static_cast<i64>(p1.a), static_cast<i64>(p2.a), -static_cast<i64>(p3.a)};
  s.x1 = p1.x; s.x2 = p2.x; s.x3 = p3.x;
  s.y1 = p1.y; s.y2 = p2.y; s.y3 = p3.y;
  return {h, s};
}

namespace {

struct VarRange {
  u64 xlo = 1, xhi = 0;  // inclusive bounds on x
  u64 ylo = 1, yhi = 0;
};

// Shared enumeration core: iterate y-triples and x-pairs, recover the third
// x by exact square testing. `extra` restricts each variable (box mode).
void enumerate_solutions(u64 B, const CoeffTriple& a, const VarRange* extra,
                         const std::function<void(const Solution&)>& emit) {
  const i64 as[3] = {a.a1, a.a2, a.a3};
  u64 aabs[3];
  for (int i = 0; i < 3; ++i) aabs[i] = static_cast<u64>(as[i] < 0 ? -as[i] : as[i]);
  u64 ycap = 0;
  for (int i = 0; i < 3; ++i) ycap = std::max(ycap, icbrt(B / aabs[i]));
  u64 sfcap = ycap;
  for (int i = 0; i < 3; ++i) sfcap = std::max(sfcap, aabs[i] * ycap);
  auto sf = squarefree_table(sfcap);

  auto ybound = [&](int i) { return icbrt(B / aabs[i]); };
  auto ys_for = [&](int i) {
    std::vector<u64> ys;
    u64 lo = extra ? extra[i].ylo : 1;
    u64 hi = std::min(ybound(i), extra ? extra[i].yhi : ybound(i));
    for (u64 y = lo; y <= hi; ++y)
      if (sf[aabs[i] * y]) ys.push_back(y);
    return ys;
  };
  std::vector<u64> ys[3] = {ys_for(0), ys_for(1), ys_for(2)};

  for (u64 y1 : ys[0]) {
    i128 c1 = static_cast<i128>(as[0]) * y1 * y1 * y1;
    for (u64 y2 : ys[1]) {
      i128 c2 = static_cast<i128>(as[1]) * y2 * y2 * y2;
      for (u64 y3 : ys[2]) {
        i128 c3 = static_cast<i128>(as[2]) * y3 * y3 * y3;
        // Iterate the two indices with the smallest x-ranges; recover the
        // remaining one by square testing. Count is independent of the pick.
        const i128 cs[3] = {c1, c2, c3};
        u64 xmax[3];
        for (int i = 0; i < 3; ++i) {
          xmax[i] = isqrt(static_cast<u128>(B) / static_cast<u128>(abs128(cs[i])));
          if (extra) xmax[i] = std::min(xmax[i], extra[i].xhi);
        }
        int rec = 0;  // recovered index = largest |a| y^3 (smallest range)
        for (int i = 1; i < 3; ++i)
          if (abs128(cs[i]) > abs128(cs[rec])) rec = i;
        int ia = (rec + 1) % 3, ib = (rec + 2) % 3;
        if (ia > ib) std::swap(ia, ib);
        u64 alo = extra ? extra[ia].xlo : 1, blo = extra ? extra[ib].xlo : 1;
        for (u64 xa = alo; xa <= xmax[ia]; ++xa) {
          i128 ta = cs[ia] * xa * xa;
          for (u64 xb = blo; xb <= xmax[ib]; ++xb) {
            i128 s = -(ta + cs[ib] * xb * xb);
            if (s == 0) continue;
            if ((s < 0) != (cs[rec] < 0)) continue;
            if (s % cs[rec] != 0) continue;
            i128 sq = s / cs[rec];
            auto root = exact_sqrt(sq);
            if (!root || *root == 0) continue;
            u64 xr = *root;
            if (xr > xmax[rec]) continue;
            if (extra && xr < extra[rec].xlo) continue;
            u64 xs[3];
            xs[ia] = xa;
            xs[ib] = xb;
            xs[rec] = xr;
            Solution sol;
            sol.coeffs = a;
            sol.x1 = xs[0]; sol.x2 = xs[1]; sol.x3 = xs[2];
            sol.y1 = y1; sol.y2 = y2; sol.y3 = y3;
            if (!sol.satisfies_gcd()) continue;
            emit(sol);
          }
        }
      }
    }
  }
}

}  // namespace

NormalizedCount count_normalized(u64 B, const CoeffTriple& a, bool collect_witnesses) {
  check_bound(B);
  a.validate();
  NormalizedCount r;
  enumerate_solutions(B, a, nullptr, [&](const Solution& s) {
    ++r.count;
    if (collect_witnesses) r.witnesses.push_back(s);
  });
  if (collect_witnesses) {
    std::sort(r.witnesses.begin(), r.witnesses.end(), [](const Solution& p, const Solution& q) {
      return std::tie(p.y1, p.y2, p.y3, p.x1, p.x2, p.x3) <
             std::tie(q.y1, q.y2, q.y3, q.x1, q.x2, q.x3);
    });
  }
  return r;
}

u64 box_count(u64 B, const CoeffTriple& a, const DyadicBox& box) {
  check_bound(B);
  a.validate();
  if (!box.admissible(B, a)) throw std::domain_error("box violates the admissibility bound");
  VarRange extra[3];
  const u64 X[3] = {box.X1, box.X2, box.X3};
  const u64 Y[3] = {box.Y1, box.Y2, box.Y3};
  for (int i = 0; i < 3; ++i) {
    extra[i].xlo = X[i] / 2 + 1;
    extra[i].xhi = X[i];
    extra[i].ylo = Y[i] / 2 + 1;
    extra[i].yhi = Y[i];
  }
  u64 count = 0;
  enumerate_solutions(B, a, extra, [&](const Solution&) { ++count; });
  return count;
}

DyadicBox box_of(const Solution& s) {
  auto up = [](u64 v) { return std::bit_ceil(v); };
  return {up(s.x1), up(s.x2), up(s.x3), up(s.y1), up(s.y2), up(s.y3)};
}

CLocalEstimate estimate_c_local(u64 y1, u64 y2, u64 y3, const CoeffTriple& a, u64 B) {
  check_bound(B);
  a.validate();
  auto ay = [](i64 c, u64 y) { return static_cast<u64>(c < 0 ? -c : c) * y; };
  if (!is_squarefree(ay(a.a1, y1)) || !is_squarefree(ay(a.a2, y2)) ||
      !is_squarefree(ay(a.a3, y3)))
    throw std::domain_error("a_i y_i must be square-free");
  VarRange extra[3];
  const u64 Y[3] = {y1, y2, y3};
  for (int i = 0; i < 3; ++i) {
    extra[i].xlo = 1;
    extra[i].xhi = ~0ull;
    extra[i].ylo = Y[i];
    extra[i].yhi = Y[i];
  }
  CLocalEstimate e;
  enumerate_solutions(B, a, extra, [&](const Solution&) { ++e.count; });
  e.value = static_cast<double>(e.count) / std::sqrt(static_cast<double>(B));
  return e;
}

}  // namespace sqf

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "sqf/squarefull.hpp"

using namespace sqf;

namespace {

// Trial-division square-full test, independent of the x^2 y^3 enumeration.
bool oracle_squarefull(u64 n) {
  if (n == 0) return false;
  for (u64 p = 2; p * p <= n; ++p) {
    if (n % p != 0) continue;
    int e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    if (e < 2) return false;
  }
  return n == 1;  // a leftover prime factor has exponent 1
}

std::vector<bool> oracle_squarefull_flags(u64 B) {
  std::vector<bool> f(B + 1, false);
  for (u64 n = 1; n <= B; ++n) f[n] = oracle_squarefull(n);
  return f;
}

// Quadratic brute-force count over the oracle's square-full list.
u64 oracle_count(u64 B, bool primitive) {
  auto flags = oracle_squarefull_flags(B);
  std::vector<u64> vals;
  for (u64 n = 1; n <= B; ++n)
    if (flags[n]) vals.push_back(n);
  u64 count = 0;
  for (u64 u : vals)
    for (u64 v : vals) {
      if (u + v > B) continue;
      if (!flags[u + v]) continue;
      if (primitive && std::gcd(u, v) != 1) continue;
      ++count;
    }
  return count;
}

}  // namespace

TEST_CASE("decompose_squarefull") {
  auto d1 = decompose_squarefull(1);
  REQUIRE(d1);
  CHECK(d1->x == 1);
  CHECK(d1->y == 1);
  auto d72 = decompose_squarefull(72);
  REQUIRE(d72);
  CHECK(d72->x == 3);
  CHECK(d72->y == 2);
  CHECK_FALSE(decompose_squarefull(12));
}

TEST_CASE("enumerate_squarefull small bounds") {
  auto e10 = enumerate_squarefull(10);
  std::vector<u64> got;
  for (auto& d : e10) got.push_back(d.n);
  CHECK(got == std::vector<u64>{1, 4, 8, 9});
  auto e1 = enumerate_squarefull(1);
  REQUIRE(e1.size() == 1);
  CHECK(e1[0].n == 1);
}

TEST_CASE("enumerate_squarefull matches the brute-force scan at 10^6") {
  auto flags = oracle_squarefull_flags(1000000);
  u64 expect = std::count(flags.begin(), flags.end(), true);
  auto list = enumerate_squarefull(1000000);
  CHECK(list.size() == expect);
  for (auto& d : list) {
    REQUIRE(flags[d.n]);
    REQUIRE(static_cast<u64>(d.x) * d.x * d.y * d.y * d.y == d.n);
  }
}

TEST_CASE("membership structure: bitset and sorted array agree") {
  SquareFullSet s(50000);
  CHECK(s.uses_bitset());
  auto flags = oracle_squarefull_flags(50000);
  for (u64 n = 1; n <= 50000; ++n) CHECK(s.contains(n) == flags[n]);
}

TEST_CASE("count_solutions at B = 10") {
  auto r = count_solutions(10, false, true);
  CHECK(r.count == 3);
  REQUIRE(r.witnesses.size() == 3);
  CHECK(r.witnesses[0].u == 4);  // (4,4,8)
  CHECK(r.witnesses[0].v == 4);
  CHECK(r.witnesses[0].w == 8);
  CHECK(r.witnesses[1].u == 1);  // (1,8,9)
  CHECK(r.witnesses[1].w == 9);
  CHECK(r.witnesses[2].u == 8);  // (8,1,9)
  auto rp = count_solutions(10, true);
  CHECK(rp.count == 2);
}

TEST_CASE("count_solutions includes (4,121,125) from B = 125 on") {
  auto r = count_solutions(125, true, true);
  bool found = false;
  for (auto& t : r.witnesses)
    if (t.u == 4 && t.v == 121 && t.w == 125) found = true;
  CHECK(found);
  auto r124 = count_solutions(124, true, true);
  for (auto& t : r124.witnesses) CHECK(t.w != 125);
}

TEST_CASE("fast counter equals the quadratic oracle") {
  for (u64 B : {100ull, 1000ull, 10000ull}) {
    for (bool prim : {false, true}) {
      CAPTURE(B);
      CAPTURE(prim);
      CHECK(count_solutions(B, prim).count == oracle_count(B, prim));
    }
  }
}

TEST_CASE("count table matches individual counts and thread counts agree") {
  std::vector<u64> ts{100, 1000, 10000};
  auto table = count_solutions_table(ts, true);
  REQUIRE(table.size() == 3);
  for (size_t i = 0; i < ts.size(); ++i) CHECK(table[i] == count_solutions(ts[i], true).count);
  auto t4 = count_solutions_table(ts, true, 4);
  CHECK(table == t4);
  auto w1 = count_solutions(2000, false, true, 1);
  auto w4 = count_solutions(2000, false, true, 4);
  CHECK(w1.count == w4.count);
  REQUIRE(w1.witnesses.size() == w4.witnesses.size());
  for (size_t i = 0; i < w1.witnesses.size(); ++i) {
    CHECK(w1.witnesses[i].u == w4.witnesses[i].u);
    CHECK(w1.witnesses[i].v == w4.witnesses[i].v);
  }
}

TEST_CASE("unordered counts") {
  CHECK(unordered_count(10, false) == 2);  // {1,8,9} and {4,4,8}
  CHECK(unordered_count(10, true) == 1);
}

TEST_CASE("reduce_triple examples") {
  auto [h1, s1] = reduce_triple({1, 8, 9});
  CHECK(h1 == 1);
  CHECK(s1.coeffs.a1 == 1);
  CHECK(s1.coeffs.a2 == 1);
  CHECK(s1.coeffs.a3 == -1);
  CHECK(s1.x1 == 1);
  CHECK(s1.x2 == 1);
  CHECK(s1.x3 == 3);
  CHECK(s1.y1 == 1);
  CHECK(s1.y2 == 2);
  CHECK(s1.y3 == 1);

  auto [h2, s2] = reduce_triple({4, 4, 8});
  CHECK(h2 == 4);
  CHECK(s2.coeffs.a1 == 1);
  CHECK(s2.coeffs.a2 == 1);
  CHECK(s2.coeffs.a3 == -2);
  CHECK(s2.x1 == 1);
  CHECK(s2.y1 == 1);
  CHECK(s2.x3 == 1);
  CHECK(s2.y3 == 1);

  auto [h3, s3] = reduce_triple({4, 121, 125});
  CHECK(h3 == 1);
  CHECK(s3.x1 == 2);
  CHECK(s3.x2 == 11);
  CHECK(s3.x3 == 1);
  CHECK(s3.y3 == 5);

  CHECK_THROWS_AS(reduce_triple({1, 2, 3}), std::domain_error);
  CHECK_THROWS_AS(reduce_triple({4, 8, 13}), std::domain_error);
}

TEST_CASE("reduction soundness over all witnesses at B = 10^4") {
  auto r = count_solutions(10000, false, true);
  for (auto& t : r.witnesses) {
    auto [h, s] = reduce_triple(t);
    REQUIRE(s.satisfies_equation());
    REQUIRE(s.satisfies_gcd());
    REQUIRE(s.coeff_y_squarefree());
    // re-multiplying recovers the triple
    REQUIRE(static_cast<i128>(h) * s.term(1) == static_cast<i128>(t.u));
    REQUIRE(static_cast<i128>(h) * s.term(2) == static_cast<i128>(t.v));
    REQUIRE(-static_cast<i128>(h) * s.term(3) == static_cast<i128>(t.w));
    // coefficients divide h and are coprime to their own x y
    for (int i = 1; i <= 3; ++i) {
      i64 a = i == 1 ? s.coeffs.a1 : (i == 2 ? s.coeffs.a2 : s.coeffs.a3);
      u64 x = i == 1 ? s.x1 : (i == 2 ? s.x2 : s.x3);
      u64 y = i == 1 ? s.y1 : (i == 2 ? s.y2 : s.y3);
      u64 aa = static_cast<u64>(a < 0 ? -a : a);
      REQUIRE(h % aa == 0);
      REQUIRE(std::gcd(aa, x * y) == 1);
    }
  }
}

TEST_CASE("count_normalized witnesses at small bounds") {
  CoeffTriple a{1, 1, -1};
  auto r = count_normalized(125, a);
  bool found = false;
  for (auto& s : r.witnesses)
    if (s.x1 == 2 && s.x2 == 11 && s.x3 == 1 && s.y1 == 1 && s.y2 == 1 && s.y3 == 5) found = true;
  CHECK(found);

  auto r10 = count_normalized(10, a);
  bool found2 = false;
  for (auto& s : r10.witnesses)
    if (s.x1 == 1 && s.x2 == 1 && s.x3 == 3 && s.y1 == 1 && s.y2 == 2 && s.y3 == 1) found2 = true;
  CHECK(found2);

  CHECK_THROWS_AS(count_normalized(10, CoeffTriple{1, 1, 1}), std::domain_error);
  CHECK_THROWS_AS(count_normalized(10, CoeffTriple{4, 1, -1}), std::domain_error);
  CHECK_THROWS_AS(count_normalized(10, CoeffTriple{2, 2, -1}), std::domain_error);
}

TEST_CASE("count_normalized (1,2,-1) matches a value-space oracle at 10^4") {
  // independent route: enumerate square-full u and 2*(square-full) v with
  // u + v = w square-full, decompose the values, apply the side conditions
  const u64 B = 10000;
  auto flags = oracle_squarefull_flags(B);
  u64 expect = 0;
  for (u64 u = 1; u <= B; ++u) {
    if (!flags[u]) continue;
    for (u64 v2 = 1; 2 * v2 + u <= B; ++v2) {
      if (!flags[v2]) continue;
      u64 w = u + 2 * v2;
      if (!flags[w]) continue;
      auto d1 = decompose_squarefull(u);
      auto d2 = decompose_squarefull(v2);
      auto d3 = decompose_squarefull(w);
      REQUIRE(d1);
      REQUIRE(d2);
      REQUIRE(d3);
      Solution s;
      s.coeffs = {1, 2, -1};
      s.x1 = d1->x; s.y1 = d1->y;
      s.x2 = d2->x; s.y2 = d2->y;
      s.x3 = d3->x; s.y3 = d3->y;
      if (!s.coeff_y_squarefree()) continue;
      if (!s.satisfies_gcd()) continue;
      if (!s.satisfies_range(B)) continue;
      ++expect;
    }
  }
  auto r = count_normalized(B, CoeffTriple{1, 2, -1});
  CHECK(r.count == expect);
}

TEST_CASE("box_count admissibility and membership") {
  CoeffTriple a{1, 1, -1};
  const u64 B = 125;
  // box holding the solution x=(2,11,1), y=(1,1,5)
  DyadicBox box{2, 16, 1, 1, 1, 8};
  CHECK(box.admissible(B, a));
  CHECK(box_count(B, a, box) >= 1);
  DyadicBox bad{1024, 1, 1, 1024, 1, 1};  // X1^2 Y1^3 too large
  CHECK_THROWS_AS(box_count(B, a, bad), std::domain_error);
  DyadicBox empty_box{1, 1, 1, 4, 4, 4};
  if (empty_box.admissible(B, a)) CHECK(box_count(B, a, empty_box) == 0);
}

TEST_CASE("dyadic boxes partition the solutions") {
  const u64 B = 3000;
  for (CoeffTriple a : {CoeffTriple{1, 1, -1}, CoeffTriple{1, 2, -3}}) {
    auto r = count_normalized(B, a);
    std::map<std::array<u64, 6>, u64> bins;
    for (auto& s : r.witnesses) {
      auto b = box_of(s);
      REQUIRE(b.contains(s));
      REQUIRE(b.admissible(B, a));
      bins[{b.X1, b.X2, b.X3, b.Y1, b.Y2, b.Y3}]++;
    }
    u64 total = 0;
    for (auto& [key, cnt] : bins) {
      DyadicBox b{key[0], key[1], key[2], key[3], key[4], key[5]};
      REQUIRE(box_count(B, a, b) == cnt);
      total += cnt;
    }
    CHECK(total == r.count);
  }
}

TEST_CASE("estimate_c_local") {
  CoeffTriple a{1, 1, -1};
  // oracle: direct scan over x-triples for y = (1,1,1)
  const u64 B = 10000;
  u64 expect = 0;
  for (u64 x1 = 1; x1 * x1 <= B; ++x1)
    for (u64 x2 = 1; x2 * x2 <= B; ++x2) {
      u64 s = x1 * x1 + x2 * x2;
      if (s > B) continue;
      u64 r = isqrt(s);
      if (r * r != s) continue;
      if (std::gcd(std::gcd(x1, x2), r) != 1) continue;
      ++expect;
    }
  auto est = estimate_c_local(1, 1, 1, a, B);
  CHECK(est.count == expect);
  CHECK(est.value == doctest::Approx(static_cast<double>(expect) / 100.0));
  CHECK(estimate_c_local(1, 1, 1, a, 1).count == 0);
  CHECK_THROWS_AS(estimate_c_local(4, 1, 1, a, 100), std::domain_error);
}

TEST_CASE("growth sanity: n_prim(B)/sqrt(B) positive and bounded") {
  for (u64 B : {10000ull, 100000ull}) {
    u64 c = count_solutions(B, true).count;
    double ratio = static_cast<double>(c) / std::sqrt(static_cast<double>(B));
    CHECK(ratio > 0.0);
    CHECK(ratio < 100.0);
    MESSAGE("n_prim(", B, ") = ", c, ", ratio = ", ratio);
  }
}

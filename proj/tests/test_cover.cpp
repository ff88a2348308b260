#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <numeric>

#include "sqf/arith.hpp"
#include "sqf/cover.hpp"
#include "sqf/rng.hpp"

using namespace sqf;

namespace {

const CoeffTriple kUnit{1, 1, -1};

// Random square-free q <= qmax coprime to a1 a2, with invertible kappa.
CongruenceClass random_class(SplitMix64& rng, const CoeffTriple& a, u64 qmax) {
  while (true) {
    u64 q = rng.below(qmax - 1) + 2;
    if (!is_squarefree(q)) continue;
    u64 a12 = static_cast<u64>(abs128(static_cast<i128>(a.a1) * a.a2));
    if (std::gcd(q, a12) != 1) continue;
    u64 kap = rng.below(q);
    if (std::gcd(kap == 0 ? q : kap, q) != 1) continue;
    return CongruenceClass{q, kap};
  }
}

// Point satisfying c1-c4, built through the congruence system's own
// parametrization u1 = u2 + qu, v2 = qv - v1 with q | A and q^2 | B.
Point4 sample_c1c4(SplitMix64& rng, const CongruenceClass& c, const CoeffTriple& a) {
  const u64 q = c.q, q2 = q * q, q3 = q2 * q;
  while (true) {
    u64 u2 = rng.below(q3), v1 = rng.below(q3), u = rng.below(q3);
    u64 rhs = mod_floor(-static_cast<i128>(2) * u * v1, q);
    u64 coef = 3 * u2 % q;
    u64 g = std::gcd(coef == 0 ? q : coef, q);
    if (rhs % g != 0) continue;
    u64 qg = q / g;
    u64 v0 = qg == 1 ? 0 : mulmod64(rhs / g % qg, inv_mod(coef / g % qg, qg), qg);
    u64 v = v0 + qg * rng.below(q3 / qg);
    i128 A = static_cast<i128>(2) * u * v1 + static_cast<i128>(3) * v * u2;
    if (A % q != 0) continue;
    i128 Bv = 2 * A + static_cast<i128>(q) * u * v;
    if (Bv % static_cast<i128>(q2) != 0) continue;  // rejection, about 1/q
    u64 u1 = mod_floor(static_cast<i128>(u2) + static_cast<i128>(q) * u, q3);
    u64 v2 = mod_floor(static_cast<i128>(q) * v - static_cast<i128>(v1), q3);
    u64 a1m = mod_floor(a.a1, q3), a2m = mod_floor(a.a2, q3);
    u64 kap = c.kappa % q3;
    u64 k2 = mulmod64(kap, kap, q3);
    u64 k3 = mulmod64(k2, kap, q3);
    Point4 p;
    p.x1 = mulmod64(u1, inv_mod(a2m, q3), q3);
    p.x2 = mulmod64(u2, inv_mod(mulmod64(k3, a1m, q3), q3), q3);
    p.y1 = mulmod64(v1, inv_mod(mulmod64(k2, a1m, q3), q3), q3);
    p.y2 = mulmod64(v2, inv_mod(a2m, q3), q3);
    return p;
  }
}

}  // namespace

TEST_CASE("kappa_of the worked solution") {
  Solution s;
  s.coeffs = kUnit;
  s.x1 = 2; s.x2 = 11; s.x3 = 1;
  s.y1 = 1; s.y2 = 1; s.y3 = 5;
  auto c = kappa_of(s);
  REQUIRE(c);
  CHECK(c->q == 5);
  CHECK(c->kappa == 3);  // 2 + 3*11 = 35 == 0 mod 5
  CHECK(std::gcd(c->kappa, c->q) == 1);

  Solution deg = s;
  deg.x3 = 3; deg.y3 = 1; deg.x1 = 1; deg.y1 = 1; deg.x2 = 1; deg.y2 = 2;
  CHECK_FALSE(kappa_of(deg));
}

TEST_CASE("verify_congruences on the hand-checked instance") {
  CongruenceClass c{5, 3};
  Point4 p{2, 11, 1, 1};
  // the stated sums behind c3 and c4
  i64 c3sum = 2 * 1 * 2 * 1 + 27 * 1 * 11 * 1 + 3 * 3 * 1 * 11 * 1;
  CHECK(c3sum == 400);
  CHECK(c3sum % 25 == 0);
  i64 c4sum = 5 * 9 * 2 + 2 + 243 * 11 + 5 * 27 * 11;
  CHECK(c4sum == 4250);
  CHECK(c4sum % 125 == 0);
  auto r = verify_congruences(p, c, kUnit);
  CHECK(r.c1);
  CHECK(r.c2);
  CHECK(r.c3);
  CHECK(r.c4);
  CHECK(r.c5);
  CHECK(r.all());
}

TEST_CASE("c3 and c4 verdicts do not depend on the kappa representative") {
  // evaluated with kappa and kappa + q on points satisfying c1
  Point4 p{2, 11, 1, 1};
  auto r1 = verify_congruences(p, CongruenceClass{5, 3}, kUnit);
  auto r2 = verify_congruences(p, CongruenceClass{5, 8}, kUnit);
  CHECK(r1.c3 == r2.c3);
  CHECK(r1.c4 == r2.c4);
  SplitMix64 rng(0xbeef);
  for (int it = 0; it < 60; ++it) {
    CongruenceClass c = random_class(rng, kUnit, 30);
    Point4 s = sample_c1c4(rng, c, kUnit);
    auto a1 = verify_congruences(s, c, kUnit);
    auto a2 = verify_congruences(s, CongruenceClass{c.q, c.kappa + c.q}, kUnit);
    REQUIRE(a1.c1);
    CHECK(a1.c3 == a2.c3);
    CHECK(a1.c4 == a2.c4);
  }
}

TEST_CASE("random points generically fail c1") {
  SplitMix64 rng(0x71f);
  int fails = 0, total = 200;
  for (int it = 0; it < total; ++it) {
    CongruenceClass c = random_class(rng, kUnit, 40);
    Point4 p{static_cast<i128>(rng.below(1000) + 1), static_cast<i128>(rng.below(1000) + 1),
             static_cast<i128>(rng.below(1000) + 1), static_cast<i128>(rng.below(1000) + 1)};
    if (!verify_congruences(p, c, kUnit).c1) ++fails;
  }
  CHECK(fails > total / 2);
}

TEST_CASE("all solutions satisfy the congruence system") {
  for (CoeffTriple a : {CoeffTriple{1, 1, -1}, CoeffTriple{1, 2, -3}, CoeffTriple{2, 3, -1}}) {
    auto r = count_normalized(10000, a);
    for (auto& s : r.witnesses) {
      if (s.y3 == 1) continue;
      auto c = kappa_of(s);
      REQUIRE(c);
      Point4 p{static_cast<i128>(s.x1), static_cast<i128>(s.x2), static_cast<i128>(s.y1),
               static_cast<i128>(s.y2)};
      auto rep = verify_congruences(p, *c, a);
      CAPTURE(s.x1);
      CAPTURE(s.x2);
      CAPTURE(s.y3);
      REQUIRE(rep.all());
    }
  }
}

TEST_CASE("converse: c1-c4 imply the scaled divisibility c5") {
  SplitMix64 rng(0xc5);
  std::vector<CoeffTriple> as = {{1, 1, -1}, {1, 2, -3}, {3, -1, 2}};
  for (int it = 0; it < 2000; ++it) {
    CoeffTriple a = as[it % as.size()];
    CongruenceClass c = random_class(rng, a, 50);
    Point4 p = sample_c1c4(rng, c, a);
    auto rep = verify_congruences(p, c, a);
    REQUIRE(rep.c1);
    REQUIRE(rep.c2);
    REQUIRE(rep.c3);
    REQUIRE(rep.c4);
    REQUIRE(rep.c5);
  }
}

TEST_CASE("lambda lattice determinant and duality") {
  SplitMix64 rng(0x1a77);
  for (int it = 0; it < 40; ++it) {
    CoeffTriple a = it % 2 == 0 ? kUnit : CoeffTriple{1, 2, -3};
    CongruenceClass c = random_class(rng, a, 60);
    IntLattice L = lambda_lattice(c, a);
    Rat q6(static_cast<i128>(c.q) * c.q * c.q * c.q * c.q * c.q);
    CHECK(lattice_det(L) == Rat(2) / q6);
  }
  CHECK_THROWS_AS(lambda_lattice(CongruenceClass{5, 0}, kUnit), std::domain_error);

  // the worked solution pairs integrally with every generator
  IntLattice L = lambda_lattice(CongruenceClass{5, 3}, kUnit);
  Vec4 w{2 * 1, 2 * 1, 11 * 1, 11 * 1};
  for (int j = 0; j < 4; ++j) {
    i128 dot = 0;
    for (int i = 0; i < 4; ++i) dot += w[i] * L.basis.col[j][i];
    CHECK(dot % L.basis.den == 0);
  }
}

TEST_CASE("duality holds for every solution") {
  auto r = count_normalized(10000, kUnit);
  for (auto& s : r.witnesses) {
    if (s.y3 == 1) continue;
    auto c = kappa_of(s);
    REQUIRE(c);
    IntLattice L = lambda_lattice(*c, kUnit);
    Vec4 w{static_cast<i128>(s.x1) * s.y1, static_cast<i128>(s.x1) * s.y2,
           static_cast<i128>(s.x2) * s.y1, static_cast<i128>(s.x2) * s.y2};
    for (int j = 0; j < 4; ++j) {
      i128 dot = 0;
      for (int i = 0; i < 4; ++i) dot += w[i] * L.basis.col[j][i];
      REQUIRE(dot % L.basis.den == 0);
    }
  }
}

TEST_CASE("extract_cover covers the worked solution") {
  CongruenceClass c{5, 3};
  DyadicBox box{2, 16, 1, 1, 1, 8};
  Point4 p{2, 11, 1, 1};
  auto focused = extract_cover(c, kUnit, box, p);
  CHECK(focused.lambda_det == Rat(2, 15625));
  CHECK(cover_contains(focused, p, c.q));
  auto full = extract_cover(c, kUnit, box);
  CHECK(cover_contains(full, p, c.q));
  CHECK(full.t_count >= focused.t_count);
  for (auto& cl : full.lattices) CHECK_FALSE(cl.quintic_vanishes());
}

TEST_CASE("extract_cover covers every solution with q > 1 at small bounds") {
  const u64 B = 3000;
  for (CoeffTriple a : {CoeffTriple{1, 1, -1}, CoeffTriple{1, 2, -3}}) {
    auto r = count_normalized(B, a);
    for (auto& s : r.witnesses) {
      if (s.y3 == 1) continue;
      auto c = kappa_of(s);
      REQUIRE(c);
      DyadicBox box = box_of(s);
      Point4 p{static_cast<i128>(s.x1), static_cast<i128>(s.x2), static_cast<i128>(s.y1),
               static_cast<i128>(s.y2)};
      auto res = extract_cover(*c, a, box, p);
      CAPTURE(s.x1);
      CAPTURE(s.x2);
      CAPTURE(s.y1);
      CAPTURE(s.y2);
      CAPTURE(s.y3);
      REQUIRE(cover_contains(res, p, c->q));
    }
  }
}

TEST_CASE("returned cover lattices satisfy the congruence system") {
  CongruenceClass c{5, 3};
  DyadicBox box{2, 16, 1, 1, 1, 8};
  auto full = extract_cover(c, kUnit, box);
  int sampled = 0;
  for (auto& cl : full.lattices) {
    for (i64 u = -2; u <= 2; ++u)
      for (i64 v = -2; v <= 2; ++v) {
        Point4 p{u * cl.gens[0][0] + v * cl.gens[1][0], u * cl.gens[0][1] + v * cl.gens[1][1],
                 u * cl.gens[0][2] + v * cl.gens[1][2], u * cl.gens[0][3] + v * cl.gens[1][3]};
        auto rep = verify_congruences(p, c, kUnit);
        REQUIRE(rep.c1);
        REQUIRE(rep.c2);
        REQUIRE(rep.c3);
        REQUIRE(rep.c4);
        bool zero = p.x1 == 0 && p.x2 == 0 && p.y1 == 0 && p.y2 == 0;
        if (!zero) {
          REQUIRE((p.x1 != 0 || p.x2 != 0));
          REQUIRE((p.y1 != 0 || p.y2 != 0));
        }
        ++sampled;
      }
  }
  CHECK(sampled > 0);
}

TEST_CASE("cube and square roots modulo q^3") {
  for (u64 q : {6ull, 10ull, 15ull, 21ull, 30ull}) {
    u64 q3 = q * q * q;
    SplitMix64 rng(q * 77 + 1);
    for (int it = 0; it < 4; ++it) {
      u64 cval = rng.below(q3);
      if (std::gcd(cval, q) != 1) continue;
      std::vector<u64> expect3, expect2;
      for (u64 x = 0; x < q3; ++x) {
        if (std::gcd(x, q) != 1) continue;
        if (mulmod64(mulmod64(x, x, q3), x, q3) == cval) expect3.push_back(x);
        if (mulmod64(x, x, q3) == cval) expect2.push_back(x);
      }
      CHECK(cube_roots_mod_q3(cval, q) == expect3);
      CHECK(square_roots_mod_q3(cval, q) == expect2);
    }
  }
}

TEST_CASE("detect_exceptional recognizes the parametrized lines") {
  RatForm M1{Rat(1), Rat(0)}, M2{Rat(0), Rat(1)};
  RatForm L1{Rat(4), Rat(-5)}, L2{Rat(5), Rat(-4)};
  auto w = detect_exceptional(L1, L2, M1, M2);
  REQUIRE(w);
  CHECK(w->g == Rat(1));
  CHECK(w->nu == Rat(1));
  CHECK_FALSE(detect_exceptional(M1, M2, M1, M2));
  CHECK_THROWS_AS(detect_exceptional(L1, L2, M1, RatForm{Rat(2), Rat(0)}), std::domain_error);
}

TEST_CASE("detect_exceptional rejects generic forms") {
  SplitMix64 rng(0x4e5);
  int rounds = 0;
  while (rounds < 60) {
    RatForm M1{Rat(rng.nonzero(9)), Rat(rng.range(-9, 9))};
    RatForm M2{Rat(rng.range(-9, 9)), Rat(rng.nonzero(9))};
    RatForm L1{Rat(rng.nonzero(9)), Rat(rng.range(-9, 9))};
    RatForm L2{Rat(rng.range(-9, 9)), Rat(rng.nonzero(9))};
    if ((M1.cu * M2.cv - M1.cv * M2.cu).is_zero()) continue;
    // keep the lemma preconditions: no forbidden proportionalities
    auto prop = [](const RatForm& f, const RatForm& g) {
      return (f.cu * g.cv - f.cv * g.cu).is_zero();
    };
    if (prop(L1, L2) || prop(L1, M2) || prop(L2, M1)) continue;
    ++rounds;
    auto w = detect_exceptional(L1, L2, M1, M2);
    if (!w) continue;
    // a found witness must reproduce the forms exactly
    CHECK(exceptional_factor_check(*w, L1, L2, M1, M2));
  }
}

TEST_CASE("exceptional factorization identity") {
  ExceptionalWitness w{Rat(1), Rat(1)};
  RatForm M1{Rat(1), Rat(0)}, M2{Rat(0), Rat(1)};
  RatForm L1{Rat(4), Rat(-5)}, L2{Rat(5), Rat(-4)};
  // spot value at (u, v) = (1, 1): F = 2 and the factored side is 1 * 2
  Rat F = L1.eval(Rat(1), Rat(1)) * L1.eval(Rat(1), Rat(1)) * M1.eval(Rat(1), Rat(1)) +
          L2.eval(Rat(1), Rat(1)) * L2.eval(Rat(1), Rat(1)) * M2.eval(Rat(1), Rat(1));
  CHECK(F == Rat(2));
  CHECK(exceptional_factor_check(w, L1, L2, M1, M2));
  // perturbed witness against forms built for nu = 1
  CHECK_FALSE(exceptional_factor_check(ExceptionalWitness{Rat(1), Rat(2)}, L1, L2, M1, M2));
  // random witnesses with integralized forms
  SplitMix64 rng(0x6a6);
  for (int it = 0; it < 50; ++it) {
    i64 gp = rng.nonzero(5), gq = rng.below(4) + 1;
    Rat g(gp, gq);
    i64 s = rng.nonzero(3);
    Rat nu = Rat(s) * Rat(gq * gq * gq * gq * gq);  // clears denominators
    RatForm m1{Rat(rng.nonzero(6)), Rat(rng.range(-6, 6))};
    RatForm m2{Rat(rng.range(-6, 6)), Rat(rng.nonzero(6))};
    if ((m1.cu * m2.cv - m1.cv * m2.cu).is_zero()) continue;
    Rat g2 = g * g;
    RatForm l1{nu * (Rat(4) * m1.cu - Rat(5) * g2 * m2.cu),
               nu * (Rat(4) * m1.cv - Rat(5) * g2 * m2.cv)};
    RatForm l2{nu * g * g2 * (Rat(5) * m1.cu - Rat(4) * g2 * m2.cu),
               nu * g * g2 * (Rat(5) * m1.cv - Rat(4) * g2 * m2.cv)};
    ExceptionalWitness ww{g, nu};
    REQUIRE(exceptional_factor_check(ww, l1, l2, m1, m2));
    auto found = detect_exceptional(l1, l2, m1, m2);
    REQUIRE(found);
    bool same = found->g == g && found->nu == nu;
    bool flipped = found->g == -g && found->nu == -nu;
    REQUIRE((same || flipped));
  }
}

TEST_CASE("check_awkward against a direct scan") {
  SplitMix64 rng(0xa3c0);
  for (int it = 0; it < 40; ++it) {
    CoeffTriple a = it % 2 == 0 ? CoeffTriple{1, -1, 2} : CoeffTriple{1, 2, -3};
    CongruenceClass c = random_class(rng, a, 12);
    DyadicBox box{4, 4, 1, 4, 4, 1};
    Rat R(static_cast<i128>(rng.below(3) + 1), 1);
    auto got = check_awkward(c, a, box, R);
    // oracle: scan the whole box
    i64 bx1 = static_cast<i64>((R * Rat(4)).floor());
    bool expect = false;
    for (i64 x1 = -bx1; x1 <= bx1 && !expect; ++x1)
      for (i64 x2 = -bx1; x2 <= bx1 && !expect; ++x2)
        for (i64 y1 = -bx1; y1 <= bx1 && !expect; ++y1)
          for (i64 y2 = -bx1; y2 <= bx1 && !expect; ++y2) {
            if ((x1 == 0 && x2 == 0) || (y1 == 0 && y2 == 0)) continue;
            i128 eq = static_cast<i128>(a.a1) * x1 * x1 * y1 * y1 * y1 +
                      static_cast<i128>(a.a2) * x2 * x2 * y2 * y2 * y2;
            if (eq != 0) continue;
            u64 k3 = mulmod64(mulmod64(c.kappa, c.kappa, c.q), c.kappa, c.q);
            i128 lhs = static_cast<i128>(a.a2) * x1 - static_cast<i128>(k3) * a.a1 * x2;
            if (mod_floor(lhs, c.q) != 0) continue;
            expect = true;
          }
    CAPTURE(c.q);
    CAPTURE(c.kappa);
    CAPTURE(a.a1);
    CAPTURE(a.a2);
    REQUIRE(static_cast<bool>(got) == expect);
    if (got) {
      // witness re-verifies
      i128 eq = static_cast<i128>(a.a1) * got->x1 * got->x1 * got->y1 * got->y1 * got->y1 +
                static_cast<i128>(a.a2) * got->x2 * got->x2 * got->y2 * got->y2 * got->y2;
      CHECK(eq == 0);
    }
  }
}

TEST_CASE("check_awkward with a box-excluding radius") {
  CongruenceClass c{7, 2};
  DyadicBox box{8, 8, 1, 8, 8, 1};
  CHECK_FALSE(check_awkward(c, CoeffTriple{1, -1, 2}, box, Rat(1, 100)));
}

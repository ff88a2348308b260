#include "verify_suite.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

#include "sqf/arith.hpp"
#include "sqf/cover.hpp"
#include "sqf/cubic.hpp"
#include "sqf/lattice.hpp"
#include "sqf/rng.hpp"
#include "sqf/sieve.hpp"
#include "sqf/squarefull.hpp"

namespace sqf {
namespace {

struct Suite {
  std::ostream& out;
  int failures = 0;

  void report(const char* name, bool ok, const std::string& detail) {
    out << (ok ? "ok   " : "FAIL ") << name;
    if (!detail.empty()) out << "  " << detail;
    out << "\n";
    if (!ok) ++failures;
  }
};

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
  return n == 1;
}

void arith_suite(Suite& s, SplitMix64& rng) {
  bool ok = true;
  for (int i = 0; i < 4000; ++i) {
    u64 n = rng.below(1000000000000ull) + 1;
    if (factorize(n).reconstruct() != n) ok = false;
  }
  s.report("arith.factorize.reconstruct", ok, "n=4000 random below 10^12");

  ok = true;
  int done = 0;
  while (done < 500) {
    u64 m = rng.below(100000) + 1, n = rng.below(100000) + 1;
    if (std::gcd(m, n) != 1) continue;
    if (tau3(m * n) != tau3(m) * tau3(n)) ok = false;
    ++done;
  }
  s.report("arith.tau3.multiplicative", ok, "pairs=500");

  ok = true;
  for (u64 p = 3; p < 300; p += 2) {
    if (!is_prime64(p)) continue;
    for (u64 a = 0; a < p; ++a) {
      u64 e = powmod64(a, (p - 1) / 2, p);
      int legendre = e == 0 ? 0 : (e == 1 ? 1 : -1);
      if (jacobi(static_cast<i64>(a), p) != legendre) ok = false;
    }
  }
  s.report("arith.jacobi.euler", ok, "p<300");

  ok = true;
  for (int i = 0; i < 2000; ++i) {
    i64 n = static_cast<i64>(rng.below(100000) + 1) * (rng.below(2) ? 1 : -1);
    auto [k, M] = cube_decompose(n);
    u64 aM = static_cast<u64>(M < 0 ? -M : M);
    if (k * k * k * aM != static_cast<u64>(n < 0 ? -n : n)) ok = false;
    for (u64 d = 2; d * d * d <= aM; ++d)
      if (aM % (d * d * d) == 0) ok = false;
  }
  s.report("arith.cube_decompose.exact", ok, "n=2000 random");
}

void squarefull_suite(Suite& s, SplitMix64& rng, int threads) {
  // fast counter against the quadratic oracle at a small bound
  const u64 B = 2000;
  std::vector<u64> vals;
  for (u64 n = 1; n <= B; ++n)
    if (oracle_squarefull(n)) vals.push_back(n);
  u64 expect = 0, expect_prim = 0;
  for (u64 u : vals)
    for (u64 v : vals) {
      if (u + v > B) continue;
      if (!std::binary_search(vals.begin(), vals.end(), u + v)) continue;
      ++expect;
      if (std::gcd(u, v) == 1) ++expect_prim;
    }
  u64 got = count_solutions(B, false, false, threads).count;
  u64 gotp = count_solutions(B, true, false, threads).count;
  std::ostringstream d;
  d << "n(" << B << ")=" << got << " nprim=" << gotp;
  s.report("squarefull.count.oracle", got == expect && gotp == expect_prim, d.str());

  bool ok = true;
  auto wit = count_solutions(10000, false, true, threads);
  for (auto& t : wit.witnesses) {
    auto [h, sol] = reduce_triple(t);
    if (!sol.satisfies_equation() || !sol.satisfies_gcd() || !sol.coeff_y_squarefree()) ok = false;
    if (static_cast<i128>(h) * sol.term(1) != static_cast<i128>(t.u)) ok = false;
  }
  std::ostringstream d2;
  d2 << "witnesses=" << wit.witnesses.size();
  s.report("squarefull.reduce.sound", ok, d2.str());

  // nonzero boxes partition the normalized solutions
  CoeffTriple a{1, 1, -1};
  const u64 NB = 1500 + rng.below(1000);
  auto r = count_normalized(NB, a);
  std::vector<std::array<u64, 6>> keys;
  for (auto& sol : r.witnesses) {
    auto b = box_of(sol);
    keys.push_back({b.X1, b.X2, b.X3, b.Y1, b.Y2, b.Y3});
  }
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
  u64 total = 0;
  for (auto& k : keys)
    total += box_count(NB, a, DyadicBox{k[0], k[1], k[2], k[3], k[4], k[5]});
  std::ostringstream d3;
  d3 << "B=" << NB << " boxes=" << keys.size();
  s.report("squarefull.boxes.partition", total == r.count, d3.str());
}

void lattice_suite(Suite& s, SplitMix64& rng) {
  bool ok = true;
  for (int it = 0; it < 100; ++it) {
    u64 r = rng.below(300) + 1;
    QForm Q{rng.range(-20, 20), rng.range(-20, 20), rng.range(-20, 20)};
    auto ls = omega_decompose(Q, r);
    for (u64 u = 0; u < r && ok; ++u)
      for (u64 v = 0; v < r; ++v) {
        bool qz = mod_floor(Q.eval(u, v), r) == 0;
        bool in = false;
        for (auto& L : ls)
          if (lattice_contains_2d(L, u, v)) in = true;
        if (qz != in) {
          ok = false;
          break;
        }
      }
  }
  s.report("lattice.omega.exact", ok, "instances=100 r<=300");

  ok = true;
  double worst_h = 0, worst_m = 0;
  for (int it = 0; it < 24; ++it) {
    int k = 2 + static_cast<int>(rng.below(3));
    IntLattice L = [&] {
      while (true) {
        std::vector<std::vector<i64>> cols(k, std::vector<i64>(k));
        for (int j = 0; j < k; ++j)
          for (int i = 0; i < k; ++i) cols[j][i] = rng.range(-6, 6);
        try {
          return make_lattice(k, cols);
        } catch (const std::domain_error&) {
        }
      }
    }();
    auto sc = siegel_cover(L, 200000);
    double det = lattice_det(L).to_double();
    double denom = 1.0 + std::pow(det, 1.0 / (k - 1));
    worst_h = std::max(worst_h, sc.count / denom);
    worst_m = std::max(worst_m, sc.max_norm.to_double() / denom);
    for (auto& u : dual_vectors_in_unit_box(L))
      if (!siegel_covers(L, sc, u)) ok = false;
  }
  std::ostringstream d;
  d.setf(std::ios::fixed);
  d.precision(3);
  d << "maxH/(1+det^(1/(k-1)))=" << worst_h << " maxnorm_ratio=" << worst_m;
  s.report("lattice.siegel.coverage", ok, d.str());

  ok = true;
  for (int it = 0; it < 60; ++it) {
    IntLattice L = [&] {
      while (true) {
        std::vector<std::vector<i64>> cols = {{rng.range(-9, 9), rng.range(-9, 9)},
                                              {rng.range(-9, 9), rng.range(-9, 9)}};
        try {
          return make_lattice(2, cols);
        } catch (const std::domain_error&) {
        }
      }
    }();
    auto mb = minimal_basis_linf(L);
    Rat det = lattice_det(L);
    Rat prod = mb.minima[0] * mb.minima[1];
    if (!(prod <= det) || !(Rat(2) * prod >= det)) ok = false;
    if (!mb.basis_achieves_minima) ok = false;
  }
  s.report("lattice.minima.minkowski", ok, "instances=60");
}

void cover_suite(Suite& s, SplitMix64& rng) {
  // forward congruences over every solution at a moderate bound
  bool ok = true;
  u64 with_q = 0;
  for (CoeffTriple a : {CoeffTriple{1, 1, -1}, CoeffTriple{1, 2, -3}}) {
    auto r = count_normalized(20000, a);
    for (auto& sol : r.witnesses) {
      if (sol.y3 == 1) continue;
      ++with_q;
      auto c = kappa_of(sol);
      if (!c) {
        ok = false;
        continue;
      }
      Point4 p{static_cast<i128>(sol.x1), static_cast<i128>(sol.x2), static_cast<i128>(sol.y1),
               static_cast<i128>(sol.y2)};
      if (!verify_congruences(p, *c, a).all()) ok = false;
    }
  }
  std::ostringstream d;
  d << "solutions=" << with_q;
  s.report("cover.congruences.forward", ok, d.str());

  // converse c5 on constructed c1-c4 tuples
  ok = true;
  CoeffTriple a{1, 2, -3};
  int made = 0;
  while (made < 1500) {
    u64 q = rng.below(48) + 2;
    if (!is_squarefree(q)) continue;
    if (std::gcd(q, static_cast<u64>(6)) != 1) continue;  // coprime to a1 a2 = 6
    u64 kap = rng.below(q);
    if (std::gcd(kap == 0 ? q : kap, q) != 1) continue;
    CongruenceClass c{q, kap};
    u64 q3 = q * q * q;
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
    if ((2 * A + static_cast<i128>(q) * u * v) % static_cast<i128>(q * q) != 0) continue;
    u64 u1 = mod_floor(static_cast<i128>(u2) + static_cast<i128>(q) * u, q3);
    u64 v2 = mod_floor(static_cast<i128>(q) * v - static_cast<i128>(v1), q3);
    u64 a1m = mod_floor(a.a1, q3), a2m = mod_floor(a.a2, q3);
    u64 kq = kap % q3;
    u64 k2 = mulmod64(kq, kq, q3), k3 = mulmod64(k2, kq, q3);
    Point4 p;
    p.x1 = mulmod64(u1, inv_mod(a2m, q3), q3);
    p.x2 = mulmod64(u2, inv_mod(mulmod64(k3, a1m, q3), q3), q3);
    p.y1 = mulmod64(v1, inv_mod(mulmod64(k2, a1m, q3), q3), q3);
    p.y2 = mulmod64(v2, inv_mod(a2m, q3), q3);
    auto rep = verify_congruences(p, c, a);
    if (!rep.c1 || !rep.c3 || !rep.c4 || !rep.c5) ok = false;
    ++made;
  }
  s.report("cover.congruences.converse_c5", ok, "tuples=1500");

  // lambda determinant
  ok = true;
  for (int it = 0; it < 50; ++it) {
    u64 q = rng.below(60) + 2;
    if (!is_squarefree(q)) continue;
    u64 kap = rng.below(q);
    if (std::gcd(kap == 0 ? q : kap, q) != 1) continue;
    Rat q6(static_cast<i128>(q) * q * q * q * q * q);
    if (lattice_det(lambda_lattice(CongruenceClass{q, kap}, CoeffTriple{1, 1, -1})) !=
        Rat(2) / q6)
      ok = false;
  }
  s.report("cover.lambda.det", ok, "det=2/q^6");

  // coverage at a small bound
  ok = true;
  u64 covered = 0;
  auto r = count_normalized(2500, CoeffTriple{1, 1, -1});
  for (auto& sol : r.witnesses) {
    if (sol.y3 == 1) continue;
    auto c = kappa_of(sol);
    Point4 p{static_cast<i128>(sol.x1), static_cast<i128>(sol.x2), static_cast<i128>(sol.y1),
             static_cast<i128>(sol.y2)};
    auto res = extract_cover(*c, CoeffTriple{1, 1, -1}, box_of(sol), p);
    if (!cover_contains(res, p, c->q))
      ok = false;
    else
      ++covered;
  }
  std::ostringstream d2;
  d2 << "covered=" << covered;
  s.report("cover.extract.coverage", ok, d2.str());
}

void sieve_suite(Suite& s, SplitMix64& rng) {
  BinaryForm F{{1, 0, 0, 1}};
  bool ok = true;
  for (u64 p : {5ull, 7ull, 11ull, 13ull}) {
    auto z = sigma0(F, 0, 0, p);
    for (i64 c : z.canonical())
      if (c != 0) ok = false;
  }
  s.report("sieve.sigma0.origin", ok, "");

  ok = true;
  int pairs = 0;
  std::vector<u64> primes{5, 7, 11, 13};
  for (int it = 0; it < 4; ++it) {
    BinaryForm G;
    G.c.resize(6);
    do {
      for (auto& cf : G.c) cf = rng.range(-9, 9);
    } while (form_has_repeated_factor(G));
    for (size_t i = 0; i < primes.size(); ++i)
      for (size_t j = i + 1; j < primes.size(); ++j) {
        u64 p1 = primes[i], p2 = primes[j];
        if (form_discriminant_mod(G, p1) == 0 || form_discriminant_mod(G, p2) == 0) continue;
        i64 u = rng.range(0, 30), v = rng.range(0, 30);
        int sign = 1;
        for (int t = 0; t < 5; ++t)
          sign *= jacobi(static_cast<i64>(p2), p1) * jacobi(static_cast<i64>(p1), p2);
        if (!sigma0(G, u, v, p1 * p2)
                 .equals(cyclo_product(sigma0(G, u, v, p1), sigma0(G, u, v, p2), sign)))
          ok = false;
        ++pairs;
      }
  }
  std::ostringstream d;
  d << "pairs=" << pairs;
  s.report("sieve.sigma0.multiplicative", ok, d.str());

  double worst = 0;
  for (auto& row : weil_report(F, 60)) worst = std::max(worst, row.max_ratio);
  std::ostringstream d2;
  d2.setf(std::ios::fixed);
  d2.precision(4);
  d2 << "max|Sigma0|/p=" << worst;
  s.report("sieve.weil.envelope", worst <= 4.0, d2.str());
}

void cubic_suite(Suite& s) {
  bool ok = rho_count(10, 1, 1, -1).count == 6 && rho_count(1, 1, 2, 3).count == 2 &&
            rho_count(50, 1, 1, 1).count == 6;
  s.report("cubic.rho.examples", ok, "");
  ok = rank_upper_bound(1).bound == 3;
  int worst = 0;
  for (u64 M = 1; M <= 2000; ++M) {
    bool cubefree = true;
    for (u64 d = 2; d * d * d <= M; ++d)
      if (M % (d * d * d) == 0) cubefree = false;
    if (!cubefree) continue;
    auto r = rank_upper_bound(M);
    if (r.bound > 7 * (r.omega_M + 1)) ok = false;
    worst = std::max(worst, (r.bound + r.omega_M) / (r.omega_M + 1));
  }
  s.report("cubic.rank.bound", ok, "M<=2000");
}

}  // namespace

int run_verify_suite(std::uint64_t seed, int threads, std::ostream& out) {
  out << "# sqfull verify\n# seed = " << seed << "\n";
  Suite s{out};
  SplitMix64 rng(seed);
  arith_suite(s, rng);
  squarefull_suite(s, rng, threads);
  lattice_suite(s, rng);
  cover_suite(s, rng);
  sieve_suite(s, rng);
  cubic_suite(s);
  out << (s.failures == 0 ? "PASS" : "FAIL") << " (" << s.failures << " failures)\n";
  return s.failures == 0 ? 0 : 1;
}

}  // namespace sqf

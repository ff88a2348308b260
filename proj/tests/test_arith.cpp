#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <numeric>

#include "sqf/arith.hpp"
#include "sqf/rng.hpp"

using namespace sqf;

namespace {

// Independent deterministic Miller-Rabin used only as a test oracle.
bool oracle_prime(u64 n) {
  if (n < 2) return false;
  for (u64 p = 2; p < 100; ++p) {
    if (p * p > n) break;
    if (n % p == 0) return n == p;
  }
  u64 d = n - 1;
  int s = 0;
  while (d % 2 == 0) {
    d /= 2;
    ++s;
  }
  for (u64 a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    if (a % n == 0) continue;
    u64 x = powmod64(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool comp = true;
    for (int i = 0; i < s - 1; ++i) {
      x = mulmod64(x, x, n);
      if (x == n - 1) {
        comp = false;
        break;
      }
    }
    if (comp) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("factorize basic examples") {
  CHECK(factorize(1).factors.empty());
  auto f18 = factorize(18);
  REQUIRE(f18.factors.size() == 2);
  CHECK(f18.factors[0] == std::pair<u64, int>{2, 1});
  CHECK(f18.factors[1] == std::pair<u64, int>{3, 2});
  CHECK_THROWS_AS(factorize(0), std::domain_error);
}

TEST_CASE("factorize Mersenne prime 2^61-1") {
  u64 m = (1ull << 61) - 1;
  CHECK(oracle_prime(m));
  auto f = factorize(m);
  REQUIRE(f.factors.size() == 1);
  CHECK(f.factors[0].first == 2305843009213693951ull);
  CHECK(f.factors[0].second == 1);
}

TEST_CASE("factorize reconstructs every n up to 10^6") {
  for (u64 n = 1; n <= 1000000; ++n) {
    auto f = factorize(n);
    REQUIRE(f.reconstruct() == n);
    for (size_t i = 1; i < f.factors.size(); ++i)
      REQUIRE(f.factors[i - 1].first < f.factors[i].first);
  }
}

TEST_CASE("factorize splits 64-bit semiprimes") {
  // products of two primes above the trial-division bound
  u64 p = 1000003, q = 1000033;
  auto f = factorize(p * q);
  REQUIRE(f.factors.size() == 2);
  CHECK(f.factors[0].first == p);
  CHECK(f.factors[1].first == q);
  u64 big1 = 2147483647ull, big2 = 2147483629ull;  // both prime
  auto g = factorize(big1 * big2);
  REQUIRE(g.factors.size() == 2);
  CHECK(g.factors[0].first == big2);
  CHECK(g.factors[1].first == big1);
}

TEST_CASE("is_squarefree") {
  CHECK(is_squarefree(1));
  CHECK_FALSE(is_squarefree(12));
  CHECK(is_squarefree(30030));  // 2*3*5*7*11*13
}

TEST_CASE("jacobi examples and error cases") {
  CHECK(jacobi(0, 3) == 0);
  for (u64 n = 1; n < 50; n += 2) CHECK(jacobi(1, n) == 1);
  CHECK(jacobi(2, 15) == 1);
  CHECK(jacobi(7, 1) == 1);
  CHECK_THROWS_AS(jacobi(3, 4), std::domain_error);
  CHECK_THROWS_AS(jacobi(3, 0), std::domain_error);
}

TEST_CASE("jacobi matches Euler's criterion for all odd primes below 1000") {
  for (u64 p = 3; p < 1000; p += 2) {
    if (!oracle_prime(p)) continue;
    for (u64 a = 0; a < p; ++a) {
      u64 e = powmod64(a, (p - 1) / 2, p);
      int legendre = e == 0 ? 0 : (e == 1 ? 1 : -1);
      REQUIRE(jacobi(static_cast<i64>(a), p) == legendre);
    }
  }
}

TEST_CASE("tau3 small values and the divisor-pair definition") {
  CHECK(tau3(1) == 1);
  for (u64 p : {2ull, 3ull, 5ull, 97ull}) CHECK(tau3(p) == 3);
  // direct enumeration of pairs (u1, u2) with u1 u2 | 18
  u64 pairs = 0;
  for (u64 u1 = 1; u1 <= 18; ++u1)
    for (u64 u2 = 1; u2 <= 18; ++u2)
      if (u1 * u2 <= 18 && 18 % (u1 * u2) == 0) ++pairs;
  CHECK(pairs == 18);
  CHECK(tau3(18) == 18);
}

TEST_CASE("tau3 is multiplicative on random coprime pairs") {
  SplitMix64 rng(0x7a31);
  int done = 0;
  while (done < 1000) {
    u64 m = rng.below(100000) + 1;
    u64 n = rng.below(100000) + 1;
    if (std::gcd(m, n) != 1) continue;
    REQUIRE(tau3(m * n) == tau3(m) * tau3(n));
    ++done;
  }
}

TEST_CASE("cube_decompose examples") {
  CHECK(cube_decompose(7) == std::pair<u64, i64>{1, 7});
  CHECK(cube_decompose(216) == std::pair<u64, i64>{6, 1});
  CHECK(cube_decompose(-432) == std::pair<u64, i64>{6, -2});
  CHECK_THROWS_AS(cube_decompose(0), std::domain_error);
}

TEST_CASE("cube_decompose is exact for |n| <= 10^5") {
  for (i64 n = 1; n <= 100000; ++n) {
    for (i64 s : {n, -n}) {
      auto [k, M] = cube_decompose(s);
      u64 aM = static_cast<u64>(M < 0 ? -M : M);
      REQUIRE(k * k * k * aM == static_cast<u64>(n));
      REQUIRE((M < 0) == (s < 0));
      for (u64 d = 2; d * d * d <= aM; ++d) REQUIRE(aM % (d * d * d) != 0);
    }
  }
}

TEST_CASE("sqrt_mod_prime agrees with scanning") {
  for (u64 p : {2ull, 3ull, 5ull, 13ull, 17ull, 97ull, 101ull, 257ull}) {
    for (u64 a = 0; a < p; ++a) {
      std::vector<u64> expect;
      for (u64 x = 0; x < p; ++x)
        if (x * x % p == a) expect.push_back(x);
      CHECK(sqrt_mod_prime(a, p) == expect);
    }
  }
}

TEST_CASE("cbrt_mod_prime agrees with scanning above the scan threshold") {
  for (u64 p : {1009ull, 1033ull}) {  // both are 1 mod 3
    REQUIRE(oracle_prime(p));
    REQUIRE(p % 3 == 1);
    for (u64 a : std::vector<u64>{1, 2, 5, 100, 555, p - 1}) {
      std::vector<u64> expect;
      for (u64 x = 0; x < p; ++x)
        if (mulmod64(mulmod64(x, x, p), x, p) == a % p) expect.push_back(x);
      CHECK(cbrt_mod_prime(a, p) == expect);
    }
  }
  u64 p = 1019;  // 2 mod 3: cubing is a bijection
  REQUIRE(p % 3 == 2);
  for (u64 a : {1ull, 2ull, 3ull, 717ull}) {
    std::vector<u64> expect;
    for (u64 x = 0; x < p; ++x)
      if (mulmod64(mulmod64(x, x, p), x, p) == a) expect.push_back(x);
    CHECK(cbrt_mod_prime(a, p) == expect);
  }
}

TEST_CASE("divisors of 360") {
  auto ds = divisors(factorize(360));
  CHECK(ds.size() == 24);
  CHECK(ds.front() == 1);
  CHECK(ds.back() == 360);
  for (u64 d : ds) CHECK(360 % d == 0);
}

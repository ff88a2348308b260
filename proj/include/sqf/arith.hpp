#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "sqf/int128.hpp"

namespace sqf {

/// Complete prime factorization of a positive 64-bit integer.
/// factors are (prime, exponent) pairs with primes strictly increasing.
struct Factorization {
  u64 n = 1;
  std::vector<std::pair<u64, int>> factors;

  u64 reconstruct() const;
  int omega() const { return static_cast<int>(factors.size()); }
  int big_omega() const;
};

/// Deterministic: trial division by primes below 10^6, then a 64-bit
/// Miller-Rabin with a proven base set plus Pollard-Brent splitting.
Factorization factorize(u64 n);

bool is_prime64(u64 n);

bool is_squarefree(u64 n);

/// Every prime exponent of n is >= 2 (1 counts vacuously).
bool is_squarefull(u64 n);

/// Jacobi symbol (a/n) for odd n >= 1; (a/1) = 1 by the empty product.
int jacobi(i64 a, u64 n);

/// #{(u1,u2) : u1*u2 | n} = prod (e+1)(e+2)/2 over prime exponents e.
u64 tau3(u64 n);

/// |n| = k^3 * |M| with M cube-free, sign(M) = sign(n).
std::pair<u64, i64> cube_decompose(i64 n);

/// All divisors of n in increasing order.
std::vector<u64> divisors(const Factorization& f);

/// Solutions of x^2 == a mod p for prime p, sorted. Tonelli-Shanks for odd
/// p; p = 2 by inspection.
std::vector<u64> sqrt_mod_prime(u64 a, u64 p);

/// Solutions of x^3 == a mod p for prime p, sorted. Scan for p <= 1000,
/// exponentiation (with a 3-Sylow discrete log for p == 1 mod 3) above.
std::vector<u64> cbrt_mod_prime(u64 a, u64 p);

}  // namespace sqf

#include "sqf/arith.hpp"

#include <algorithm>
#include <array>
#include <numeric>
#include <stdexcept>

namespace sqf {
namespace {

constexpr u64 kTrialBound = 1'000'000;

const std::vector<u64>& small_primes() {
  static const std::vector<u64> primes = [] {
    std::vector<bool> comp(kTrialBound + 1, false);
    std::vector<u64> ps;
    for (u64 i = 2; i <= kTrialBound; ++i) {
      if (!comp[i]) {
        ps.push_back(i);
        for (u64 j = i * i; j <= kTrialBound; j += i) comp[j] = true;
      }
    }
    return ps;
  }();
  return primes;
}

bool miller_rabin(u64 n) {
  // Deterministic for all n < 2^64 with this base set.
  static constexpr std::array<u64, 7> bases = {2,      325,     9375,      28178,
                                               450775, 9780504, 1795265022};
  int s = __builtin_ctzll(n - 1);
  u64 d = (n - 1) >> s;
  for (u64 a : bases) {
    a %= n;
    if (a == 0) continue;
    u64 x = powmod64(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int i = 0; i < s - 1; ++i) {
      x = mulmod64(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

u64 pollard_brent(u64 n) {
  // n is odd, composite, with no factor below the trial bound.
  for (u64 c = 1;; ++c) {
    auto step = [&](u64 x) { return (static_cast<u128>(x) * x + c) % n; };
    u64 x = 2, y = 2, d = 1;
    u64 saved_x = x, saved_y = y;
    int lam = 1;
    while (d == 1) {
      x = y;
      u64 q = 1;
      for (int i = 0; i < lam && d == 1; i += 128) {
        saved_x = x;
        saved_y = y;
        int batch = std::min(128, lam - i);
        for (int j = 0; j < batch; ++j) {
          y = step(y);
          u64 diff = x > y ? x - y : y - x;
          q = mulmod64(q, diff == 0 ? 1 : diff, n);
        }
        d = std::gcd(q, n);
      }
      lam *= 2;
    }
    if (d == n) {
      // Redo the last batch one step at a time.
      d = 1;
      u64 yy = saved_y;
      while (d == 1) {
        yy = step(yy);
        u64 diff = saved_x > yy ? saved_x - yy : yy - saved_x;
        if (diff == 0) break;
        d = std::gcd(diff, n);
      }
    }
    if (d != 1 && d != n) return d;
  }
}

void factor_rec(u64 n, std::vector<u64>& out) {
  if (n == 1) return;
  if (is_prime64(n)) {
    out.push_back(n);
    return;
  }
  u64 d = pollard_brent(n);
  factor_rec(d, out);
  factor_rec(n / d, out);
}

}  // namespace

u64 Factorization::reconstruct() const {
  u64 prod = 1;
  for (auto [p, e] : factors)
    for (int i = 0; i < e; ++i) prod *= p;
  return prod;
}

int Factorization::big_omega() const {
  int s = 0;
  for (auto [p, e] : factors) s += e;
  return s;
}

bool is_prime64(u64 n) {
  if (n < 2) return false;
  for (u64 p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    if (n % p == 0) return n == p;
  }
  return miller_rabin(n);
}

Factorization factorize(u64 n) {
  if (n == 0) throw std::domain_error("factorize: n must be positive");
  Factorization f;
  f.n = n;
  u64 m = n;
  for (u64 p : small_primes()) {
    if (p * p > m) break;
    if (m % p == 0) {
      int e = 0;
      while (m % p == 0) {
        m /= p;
        ++e;
      }
      f.factors.emplace_back(p, e);
    }
  }
  if (m > 1) {
    if (m <= kTrialBound * kTrialBound || is_prime64(m)) {
      // After trial division to 10^6, any remaining m <= 10^12 is prime.
      f.factors.emplace_back(m, 1);
    } else {
      std::vector<u64> rest;
      factor_rec(m, rest);
      std::sort(rest.begin(), rest.end());
      for (size_t i = 0; i < rest.size();) {
        size_t j = i;
        while (j < rest.size() && rest[j] == rest[i]) ++j;
        f.factors.emplace_back(rest[i], static_cast<int>(j - i));
        i = j;
      }
    }
  }
  std::sort(f.factors.begin(), f.factors.end());
  return f;
}

bool is_squarefree(u64 n) {
  if (n == 0) return false;
  auto f = factorize(n);
  for (auto [p, e] : f.factors)
    if (e >= 2) return false;
  return true;
}

bool is_squarefull(u64 n) {
  if (n == 0) return false;
  auto f = factorize(n);
  for (auto [p, e] : f.factors)
    if (e < 2) return false;
  return true;
}

int jacobi(i64 a, u64 n) {
  if (n == 0 || n % 2 == 0) throw std::domain_error("jacobi: modulus must be odd and positive");
  u64 ua = mod_floor(a, n);
  int result = 1;
  while (ua != 0) {
    while (ua % 2 == 0) {
      ua /= 2;
      u64 r = n % 8;
      if (r == 3 || r == 5) result = -result;
    }
    std::swap(ua, n);
    if (ua % 4 == 3 && n % 4 == 3) result = -result;
    ua %= n;
  }
  return n == 1 ? result : 0;
}

u64 tau3(u64 n) {
  if (n == 0) throw std::domain_error("tau3: n must be positive");
  u64 t = 1;
  for (auto [p, e] : factorize(n).factors) {
    t *= static_cast<u64>(e + 1) * static_cast<u64>(e + 2) / 2;
  }
  return t;
}

std::pair<u64, i64> cube_decompose(i64 n) {
  if (n == 0) throw std::domain_error("cube_decompose: n must be nonzero");
  u64 a = static_cast<u64>(n < 0 ? -n : n);
  u64 k = 1, m = 1;
  for (auto [p, e] : factorize(a).factors) {
    for (int i = 0; i < e / 3; ++i) k *= p;
    for (int i = 0; i < e % 3; ++i) m *= p;
  }
  i64 signed_m = n < 0 ? -static_cast<i64>(m) : static_cast<i64>(m);
  return {k, signed_m};
}

std::vector<u64> divisors(const Factorization& f) {
  std::vector<u64> ds{1};
  for (auto [p, e] : f.factors) {
    size_t base = ds.size();
    u64 pk = 1;
    for (int i = 1; i <= e; ++i) {
      pk *= p;
      for (size_t j = 0; j < base; ++j) ds.push_back(ds[j] * pk);
    }
  }
  std::sort(ds.begin(), ds.end());
  return ds;
}

std::vector<u64> sqrt_mod_prime(u64 a, u64 p) {
  a %= p;
  if (p == 2) return {a};
  if (a == 0) return {0};
  if (jacobi(static_cast<i64>(a), p) != 1) return {};
  u64 x;
  if (p % 4 == 3) {
    x = powmod64(a, (p + 1) / 4, p);
  } else {
    // Tonelli-Shanks with the smallest non-residue
    u64 s = 0, q = p - 1;
    while (q % 2 == 0) { q /= 2; ++s; }
    u64 z = 2;
    while (jacobi(static_cast<i64>(z), p) != -1) ++z;
    u64 m = s;
    u64 cc = powmod64(z, q, p);
    u64 t = powmod64(a, q, p);
    u64 r = powmod64(a, (q + 1) / 2, p);
    while (t != 1) {
      u64 i = 0, tt = t;
      while (tt != 1) { tt = mulmod64(tt, tt, p); ++i; }
      u64 b = cc;
      for (u64 j = 0; j + i + 1 < m; ++j) b = mulmod64(b, b, p);
      m = i;
      cc = mulmod64(b, b, p);
      t = mulmod64(t, cc, p);
      r = mulmod64(r, b, p);
    }
    x = r;
  }
  u64 y = p - x;
  if (x == y) return {x};
  return {std::min(x, y), std::max(x, y)};
}

std::vector<u64> cbrt_mod_prime(u64 a, u64 p) {
  a %= p;
  if (p <= 1000) {
    std::vector<u64> roots;
    for (u64 x = 0; x < p; ++x)
      if (mulmod64(mulmod64(x, x, p), x, p) == a) roots.push_back(x);
    return roots;
  }
  if (a == 0) return {0};
  if (p % 3 == 2) {
    // cubing is a bijection; invert the exponent
    u64 e = inv_mod(3 % (p - 1), p - 1);
    return {powmod64(a, e, p)};
  }
  // p == 1 mod 3: a is a cube iff a^{(p-1)/3} == 1
  if (powmod64(a, (p - 1) / 3, p) != 1) return {};
  u64 s = 0, t = p - 1;
  while (t % 3 == 0) { t /= 3; ++s; }
  u64 g = 2;
  while (powmod64(g, (p - 1) / 3, p) == 1) ++g;
  u64 x = powmod64(a, inv_mod(3 % t, t), p);  // x^3 = a * (a^t)^m for some m
  // correct within the 3-Sylow subgroup by a digit-wise discrete log
  u64 K = powmod64(g, t, p);  // order 3^s
  u64 err = mulmod64(powmod64(x, 3, p), inv_mod(a % p, p), p);  // in <K>, a cube
  // solve K^d = err with 3 | d, then divide x by K^{d/3}
  u64 d = 0, pow3 = 1;
  u64 Ktop = K;
  std::vector<u64> Kpows(s);  // K^{3^i}
  for (u64 i = 0; i < s; ++i) { Kpows[i] = Ktop; Ktop = mulmod64(mulmod64(Ktop, Ktop, p), Kpows[i], p); }
  u64 omega_top = s >= 1 ? Kpows[s - 1] : 1;  // primitive cube root of unity
  for (u64 i = 0; i < s; ++i) {
    u64 e3 = 1;
    for (u64 j = 0; j + i + 1 < s; ++j) e3 *= 3;
    u64 probe = powmod64(mulmod64(err, inv_mod(powmod64(K, d, p), p), p), e3, p);
    u64 digit = 0;
    u64 w = 1;
    while (probe != w && digit < 3) { w = mulmod64(w, omega_top, p); ++digit; }
    if (digit == 3) return {};  // not in the subgroup (cannot happen for cubes)
    d += digit * pow3;
    pow3 *= 3;
  }
  if (d % 3 != 0) return {};
  x = mulmod64(x, inv_mod(powmod64(K, d / 3, p), p), p);
  // the three roots differ by cube roots of unity
  u64 w1 = powmod64(g, (p - 1) / 3, p);
  std::vector<u64> roots{x, mulmod64(x, w1, p), mulmod64(x, mulmod64(w1, w1, p), p)};
  std::sort(roots.begin(), roots.end());
  return roots;
}

}  // namespace sqf

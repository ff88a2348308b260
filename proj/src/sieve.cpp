#include "sqf/sieve.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "sqf/arith.hpp"
#include "sqf/rat.hpp"

namespace sqf {

i128 BinaryForm::eval(i128 x, i128 y) const {
  i128 acc = 0, yp = 1;
  for (size_t i = 0; i < c.size(); ++i) {
    acc = acc * x + c[i] * yp;
    yp *= y;
  }
  return acc;
}

i128 BinaryForm::height() const {
  i128 h = 0;
  for (i128 v : c) h = std::max(h, abs128(v));
  return h;
}

namespace {

std::vector<i128> poly_mul(const std::vector<i128>& f, const std::vector<i128>& g) {
  std::vector<i128> h(f.size() + g.size() - 1, 0);
  for (size_t i = 0; i < f.size(); ++i)
    for (size_t j = 0; j < g.size(); ++j) h[i + j] += checked_mul(f[i], g[j]);
  return h;
}

u64 det_mod(std::vector<std::vector<u64>> m, u64 p) {
  size_t n = m.size();
  u64 det = 1;
  for (size_t c = 0; c < n; ++c) {
    size_t piv = c;
    while (piv < n && m[piv][c] == 0) ++piv;
    if (piv == n) return 0;
    if (piv != c) {
      std::swap(m[piv], m[c]);
      det = p - det;
      if (det == p) det = 0;
    }
    det = mulmod64(det, m[c][c], p);
    u64 inv = inv_mod(m[c][c], p);
    for (size_t r = c + 1; r < n; ++r) {
      if (m[r][c] == 0) continue;
      u64 f = mulmod64(m[r][c], inv, p);
      for (size_t j = c; j < n; ++j) {
        u64 sub = mulmod64(f, m[c][j], p);
        m[r][j] = (m[r][j] + p - sub) % p;
      }
    }
  }
  return det % p;
}

std::vector<std::vector<i128>> sylvester(const std::vector<i128>& f, const std::vector<i128>& g) {
  int m = static_cast<int>(f.size()) - 1;
  int n = static_cast<int>(g.size()) - 1;
  int N = m + n;
  std::vector<std::vector<i128>> S(N, std::vector<i128>(N, 0));
  for (int r = 0; r < n; ++r)
    for (int j = 0; j <= m; ++j) S[r][r + j] = f[j];
  for (int r = 0; r < m; ++r)
    for (int j = 0; j <= n; ++j) S[n + r][r + j] = g[j];
  return S;
}

double hadamard_log2(const std::vector<std::vector<i128>>& S) {
  double lb = 0;
  for (const auto& row : S) {
    double s = 0;
    for (i128 v : row) {
      double d = static_cast<double>(v);
      s += d * d;
    }
    lb += 0.5 * std::log2(std::max(1.0, s));
  }
  return lb;
}

// primes just below 2^62 for the CRT determinant
constexpr u64 kCrtPrimes[7] = {4611686018427387847ull, 4611686018427387817ull,
                               4611686018427387787ull, 4611686018427387761ull,
                               4611686018427387731ull, 4611686018427387707ull,
                               4611686018427387631ull};

u64 sylvester_det_mod(const std::vector<std::vector<i128>>& S, u64 p) {
  std::vector<std::vector<u64>> m(S.size(), std::vector<u64>(S.size()));
  for (size_t i = 0; i < S.size(); ++i)
    for (size_t j = 0; j < S.size(); ++j) m[i][j] = mod_floor(S[i][j], p);
  return det_mod(std::move(m), p);
}

// Sylvester determinant of the coefficient sequences (binary-form
// resultant), reconstructed from prime images by mixed-radix CRT. Throws
// when the value provably cannot fit in a signed 128-bit integer.
i128 resultant(const std::vector<i128>& f, const std::vector<i128>& g) {
  int N = static_cast<int>(f.size() + g.size()) - 2;
  if (N == 0) return 1;
  auto S = sylvester(f, g);
  double lb = hadamard_log2(S);
  if (lb > 183.0) throw std::overflow_error("resultant bound too large");
  u64 p1 = kCrtPrimes[0], p2 = kCrtPrimes[1], p3 = kCrtPrimes[2];
  u64 r1 = sylvester_det_mod(S, p1);
  u64 r2 = sylvester_det_mod(S, p2);
  u64 t1 = mulmod64((r2 % p2 + p2 - r1 % p2) % p2, inv_mod(p1 % p2, p2), p2);
  i128 P12 = static_cast<i128>(p1) * p2;
  i128 v12 = static_cast<i128>(r1) + static_cast<i128>(p1) * t1;  // value mod p1 p2
  if (lb <= 122.0) {
    if (v12 > P12 / 2) v12 -= P12;
    return v12;
  }
  // third digit; for a value that fits i128 it is tiny
  u64 r3 = sylvester_det_mod(S, p3);
  u64 v12m = mod_floor(v12, p3);
  u64 t2 = mulmod64((r3 + p3 - v12m) % p3, inv_mod(mod_floor(P12, p3), p3), p3);
  i128 digit = static_cast<i128>(t2);
  if (t2 > p3 / 2) digit -= static_cast<i128>(p3);
  if (abs128(digit) > 8) throw std::overflow_error("resultant exceeds the 128-bit range");
  return v12 + P12 * digit;
}

bool resultant_is_zero(const std::vector<i128>& f, const std::vector<i128>& g) {
  int N = static_cast<int>(f.size() + g.size()) - 2;
  if (N == 0) return false;
  auto S = sylvester(f, g);
  double lb = hadamard_log2(S);
  int need = static_cast<int>(lb / 61.0) + 1;
  if (need > 7) throw std::overflow_error("resultant bound too large");
  for (int i = 0; i < need; ++i)
    if (sylvester_det_mod(S, kCrtPrimes[i]) != 0) return false;
  return true;
}

std::pair<std::vector<i128>, std::vector<i128>> form_derivatives(const BinaryForm& F) {
  int D = F.degree();
  std::vector<i128> fx(D), fy(D);
  for (int i = 0; i < D; ++i) fx[i] = F.c[i] * (D - i);
  for (int i = 1; i <= D; ++i) fy[i - 1] = F.c[i] * i;
  return {fx, fy};
}

}  // namespace

i128 form_discriminant(const BinaryForm& F) {
  int D = F.degree();
  if (D < 1) return 0;
  if (D == 1) return (F.c[0] != 0 || F.c[1] != 0) ? 1 : 0;
  auto [fx, fy] = form_derivatives(F);
  return resultant(fx, fy);
}

bool form_has_repeated_factor(const BinaryForm& F) {
  int D = F.degree();
  if (D < 1) return true;
  if (D == 1) return F.c[0] == 0 && F.c[1] == 0;
  auto [fx, fy] = form_derivatives(F);
  return resultant_is_zero(fx, fy);
}

u64 form_discriminant_mod(const BinaryForm& F, u64 p) {
  int D = F.degree();
  if (D < 1) return 0;
  if (D == 1) return (F.c[0] != 0 || F.c[1] != 0) ? 1 % p : 0;
  auto [fx, fy] = form_derivatives(F);
  return sylvester_det_mod(sylvester(fx, fy), p);
}

QuinticForm make_quintic(const LinForm& L1, const LinForm& L2, const LinForm& M1,
                         const LinForm& M2) {
  auto lin = [](const LinForm& f) { return std::vector<i128>{f.a, f.b}; };
  auto sq = [&](const LinForm& f) { return poly_mul(lin(f), lin(f)); };
  auto cube = [&](const LinForm& f) { return poly_mul(poly_mul(lin(f), lin(f)), lin(f)); };
  auto t1 = poly_mul(sq(L1), cube(M1));
  auto t2 = poly_mul(sq(L2), cube(M2));
  QuinticForm qf;
  qf.L1 = L1;
  qf.L2 = L2;
  qf.M1 = M1;
  qf.M2 = M2;
  qf.F.c.resize(6);
  for (int i = 0; i < 6; ++i) qf.F.c[i] = t1[i] + t2[i];
  qf.disc = form_discriminant(qf.F);
  qf.height = qf.F.height();
  return qf;
}

std::complex<double> CycloSum::approx() const {
  std::complex<double> s(0.0, 0.0);
  for (u64 k = 0; k < q; ++k) {
    if (counts[k] == 0) continue;
    double ang = 2.0 * M_PI * static_cast<double>(k) / static_cast<double>(q);
    s += static_cast<double>(counts[k]) * std::complex<double>(std::cos(ang), std::sin(ang));
  }
  return s;
}

std::vector<i64> CycloSum::canonical() const {
  auto fac = factorize(q).factors;
  if (q == 1) return {counts.empty() ? 0 : counts[0]};
  if (fac.size() == 1) {
    if (fac[0].second != 1) throw std::domain_error("cyclotomic order must be square-free");
    std::vector<i64> out(q - 1);
    for (u64 k = 0; k + 1 < q; ++k) out[k] = counts[k] - counts[q - 1];
    return out;
  }
  if (fac.size() != 2) throw std::domain_error("at most two prime factors supported");
  u64 p1 = fac[0].first, p2 = fac[1].first;
  u64 c1 = inv_mod(p2 % p1, p1), c2 = inv_mod(p1 % p2, p2);
  std::vector<std::vector<i64>> T(p1, std::vector<i64>(p2, 0));
  for (u64 k = 0; k < q; ++k) {
    if (counts[k] == 0) continue;
    T[k * c1 % p1][k * c2 % p2] += counts[k];
  }
  std::vector<i64> out;
  out.reserve((p1 - 1) * (p2 - 1));
  for (u64 a = 0; a + 1 < p1; ++a)
    for (u64 b = 0; b + 1 < p2; ++b)
      out.push_back(T[a][b] - T[p1 - 1][b] - T[a][p2 - 1] + T[p1 - 1][p2 - 1]);
  return out;
}

bool CycloSum::equals(const CycloSum& o) const {
  if (q != o.q) return false;
  return canonical() == o.canonical();
}

CycloSum sigma0(const BinaryForm& F, i64 u, i64 v, u64 q) {
  if (q % 2 == 0) throw std::domain_error("modulus must be odd");
  int D = F.degree();
  if (D % 2 == 0 || D < 3) throw std::domain_error("form degree must be odd and >= 3");
  auto fac = factorize(q).factors;
  if (fac.size() > 2) throw std::domain_error("modulus must have at most two prime factors");
  for (auto [p, e] : fac) {
    if (e != 1) throw std::domain_error("modulus must be square-free");
    if (form_discriminant_mod(F, p) == 0)
      throw std::domain_error("modulus divides the discriminant");
  }
  CycloSum s;
  s.q = q;
  s.counts.assign(q, 0);
  if (q == 1) {
    s.counts[0] = 1;
    return s;
  }
  std::vector<int> jtab(q);
  for (u64 x = 0; x < q; ++x) jtab[x] = jacobi(static_cast<i64>(x), q);
  u64 um = mod_floor(u, q), vm = mod_floor(v, q);
  for (u64 m = 0; m < q; ++m) {
    u64 base = m * um % q;
    for (u64 n = 0; n < q; ++n) {
      u64 fv = mod_floor(F.eval(m, n), q);
      int jac = jtab[fv];
      if (jac == 0) continue;
      u64 k = (base + n * vm) % q;
      s.counts[k] += jac;
    }
  }
  return s;
}

CycloSum cyclo_product(const CycloSum& x, const CycloSum& y, int sign) {
  if (std::gcd(x.q, y.q) != 1) throw std::domain_error("orders must be coprime");
  CycloSum out;
  out.q = x.q * y.q;
  out.counts.assign(out.q, 0);
  for (u64 i = 0; i < x.q; ++i) {
    if (x.counts[i] == 0) continue;
    for (u64 j = 0; j < y.q; ++j) {
      if (y.counts[j] == 0) continue;
      u64 k = (i * y.q + j * x.q) % out.q;
      out.counts[k] += sign * x.counts[i] * y.counts[j];
    }
  }
  return out;
}

u64 mu0_count(const BinaryForm& F, u64 U, u64 V) {
  if (form_has_repeated_factor(F)) throw std::domain_error("form has a repeated factor");
  u64 count = 0;
  for (i64 x = -static_cast<i64>(U); x <= static_cast<i64>(U); ++x) {
    for (i64 y = -static_cast<i64>(V); y <= static_cast<i64>(V); ++y) {
      i128 val = F.eval(x, y);
      if (val <= 0) continue;
      if (exact_sqrt(val)) ++count;
    }
  }
  return count;
}

bool poly_is_const_multiple_of_square(const std::vector<i128>& f) {
  int d = static_cast<int>(f.size()) - 1;
  while (d >= 0 && f[d] == 0) --d;
  if (d < 0) return true;  // zero polynomial
  if (d == 0) return true;
  if (d % 2 == 1) return false;
  // try an exact monic square root of f / lc
  int h = d / 2;
  std::vector<Rat> g(h + 1, Rat(0));
  Rat lc(f[d]);
  g[h] = Rat(1);
  for (int i = h - 1; i >= 0; --i) {
    // coefficient of X^{h+i} in g^2 is 2 g[i] plus terms in known g's
    Rat target = Rat(f[h + i]) / lc;
    Rat known(0);
    for (int a = i + 1; a <= h; ++a) {
      int b = h + i - a;
      if (b <= i || b > h || a < b) continue;
      Rat term = g[a] * g[b];
      if (a != b) term = term * Rat(2);
      known = known + term;
    }
    g[i] = (target - known) / Rat(2);
  }
  // verify g^2 * lc == f exactly
  std::vector<Rat> sq(d + 1, Rat(0));
  for (int a = 0; a <= h; ++a)
    for (int b = 0; b <= h; ++b) sq[a + b] = sq[a + b] + g[a] * g[b];
  for (int i = 0; i <= d; ++i) {
    if (sq[i] * lc != Rat(f[i])) return false;
  }
  return true;
}

u64 mu1_count(const std::vector<i128>& f, u64 U) {
  if (poly_is_const_multiple_of_square(f))
    throw std::domain_error("polynomial is a constant multiple of a square");
  u64 count = 0;
  for (i64 x = -static_cast<i64>(U); x <= static_cast<i64>(U); ++x) {
    i128 val = 0;
    for (size_t i = f.size(); i-- > 0;) val = val * x + f[i];
    if (val < 0) continue;
    if (exact_sqrt(val)) ++count;
  }
  return count;
}

std::vector<WeilRow> weil_report(const BinaryForm& F, u64 prime_bound) {
  int D = F.degree();
  if (D % 2 == 0 || D < 3) throw std::domain_error("form degree must be odd and >= 3");
  std::vector<WeilRow> rows;
  for (u64 p = 3; p <= prime_bound; p += 2) {
    if (!is_prime64(p)) continue;
    if (form_discriminant_mod(F, p) == 0) continue;
    std::vector<int> jtab(p);
    for (u64 x = 0; x < p; ++x) jtab[x] = jacobi(static_cast<i64>(x), p);
    // 2d character table, then two passes of naive DFTs
    std::vector<std::vector<double>> re(p, std::vector<double>(p)), im(p, std::vector<double>(p));
    std::vector<double> cs(p), sn(p);
    for (u64 k = 0; k < p; ++k) {
      double ang = 2.0 * M_PI * static_cast<double>(k) / static_cast<double>(p);
      cs[k] = std::cos(ang);
      sn[k] = std::sin(ang);
    }
    std::vector<std::vector<int>> J(p, std::vector<int>(p));
    for (u64 m = 0; m < p; ++m)
      for (u64 n = 0; n < p; ++n) J[m][n] = jtab[mod_floor(F.eval(m, n), p)];
    // rows: R[m][v] = sum_n J[m][n] e(nv/p)
    for (u64 m = 0; m < p; ++m) {
      for (u64 vv = 0; vv < p; ++vv) {
        double sr = 0, si = 0;
        for (u64 n = 0; n < p; ++n) {
          int j = J[m][n];
          if (j == 0) continue;
          u64 k = n * vv % p;
          sr += j * cs[k];
          si += j * sn[k];
        }
        re[m][vv] = sr;
        im[m][vv] = si;
      }
    }
    double best = 0.0;
    for (u64 uu = 0; uu < p; ++uu) {
      for (u64 vv = 0; vv < p; ++vv) {
        double sr = 0, si = 0;
        for (u64 m = 0; m < p; ++m) {
          u64 k = m * uu % p;
          sr += re[m][vv] * cs[k] - im[m][vv] * sn[k];
          si += re[m][vv] * sn[k] + im[m][vv] * cs[k];
        }
        best = std::max(best, std::sqrt(sr * sr + si * si));
      }
    }
    rows.push_back({p, best / static_cast<double>(p)});
  }
  return rows;
}

}  // namespace sqf

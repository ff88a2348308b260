#include "sqf/cover.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "sqf/arith.hpp"

namespace sqf {
namespace {

// Hensel lift of a root of x^n = c from p to p^3 (derivative invertible).
u64 hensel_lift_pow(u64 root, u64 cval, u64 n, u64 p) {
  u64 m = p;
  u64 x = root;
  for (int step = 0; step < 2; ++step) {
    u64 m2 = m * p;
    u64 fx = powmod64(x, n, m2);
    u64 diff = (cval % m2 + m2 - fx) % m2;
    u64 deriv = mulmod64(n % m2, powmod64(x, n - 1, m2), m2);
    u64 corr = mulmod64(diff, inv_mod(deriv, m2), m2);
    x = (x + corr) % m2;
    m = m2;
  }
  return x;
}

std::vector<u64> roots_mod_p3(u64 cval, u64 p, u64 n) {
  u64 p3 = p * p * p;
  u64 c = cval % p3;
  if (std::gcd(c, p) != 1) return {};  // callers only need unit targets
  if (p <= 3) {
    std::vector<u64> out;
    for (u64 x = 0; x < p3; ++x)
      if (std::gcd(x, p) == 1 && powmod64(x, n, p3) == c) out.push_back(x);
    return out;
  }
  std::vector<u64> base = (n == 2) ? sqrt_mod_prime(c % p, p) : cbrt_mod_prime(c % p, p);
  std::vector<u64> out;
  for (u64 r : base) {
    if (r == 0) continue;
    out.push_back(hensel_lift_pow(r, c, n, p));
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<u64> roots_mod_q3(u64 cval, u64 q, u64 n) {
  // CRT over the cubes of the prime factors of square-free q
  std::vector<u64> res{0};
  u64 mod = 1;
  for (auto [p, e] : factorize(q).factors) {
    if (e != 1) throw std::domain_error("modulus must be square-free");
    u64 p3 = p * p * p;
    auto rs = roots_mod_p3(cval % p3, p, n);
    if (rs.empty()) return {};
    std::vector<u64> next;
    u64 m_inv = inv_mod(mod % p3, p3);
    for (u64 r0 : res)
      for (u64 rp : rs) {
        // x = r0 + mod * t with x == rp mod p3
        u64 t = mulmod64((rp % p3 + p3 - r0 % p3) % p3, m_inv, p3);
        next.push_back(r0 + mod * t);
      }
    res = std::move(next);
    mod *= p3;
  }
  std::sort(res.begin(), res.end());
  return res;
}

}  // namespace

std::vector<u64> cube_roots_mod_q3(u64 cvalue, u64 q) { return roots_mod_q3(cvalue, q, 3); }
std::vector<u64> square_roots_mod_q3(u64 cvalue, u64 q) { return roots_mod_q3(cvalue, q, 2); }

void CongruenceClass::validate(const CoeffTriple& a) const {
  if (q == 0) throw std::domain_error("modulus must be positive");
  if (!is_squarefree(q)) throw std::domain_error("modulus must be square-free");
  u64 a12 = static_cast<u64>(abs128(static_cast<i128>(a.a1) * a.a2));
  if (std::gcd(q, a12) != 1) throw std::domain_error("modulus must be coprime to a1 a2");
  if (kappa >= q && q > 1) throw std::domain_error("kappa must be reduced mod q");
  if (std::gcd(kappa == 0 ? q : kappa, q) != 1 && q > 1)
    throw std::domain_error("kappa must be invertible mod q");
}

std::optional<CongruenceClass> kappa_of(const Solution& s) {
  u64 q = s.y3;
  if (q == 1) return std::nullopt;
  u64 a12 = static_cast<u64>(abs128(static_cast<i128>(s.coeffs.a1) * s.coeffs.a2));
  if (std::gcd(q, a12) != 1 || !is_squarefree(q))
    throw std::domain_error("class modulus must be square-free and coprime to a1 a2");
  u64 m1 = mod_floor(static_cast<i128>(s.x1) * s.y1, q);
  u64 m2 = mod_floor(static_cast<i128>(s.x2) * s.y2, q);
  if (std::gcd(m1 == 0 ? q : m1, q) != 1 || std::gcd(m2 == 0 ? q : m2, q) != 1)
    throw std::domain_error("x_i y_i must be coprime to the modulus");
  u64 kap = mulmod64((q - m1) % q, inv_mod(m2, q), q);
  CongruenceClass c{q, kap};
  c.validate(s.coeffs);
  return c;
}

CongruenceReport verify_congruences(const Point4& p, const CongruenceClass& c,
                                    const CoeffTriple& a) {
  const i128 q = c.q;
  const i128 q2 = q * q, q3 = q2 * q;
  const i128 kap = c.kappa;
  const i128 a1 = a.a1, a2 = a.a2;
  const i128 k2 = kap * kap;
  const i128 k3 = k2 * kap % q3;
  const u64 q3u = static_cast<u64>(q3);
  const i128 k5 = static_cast<i128>(
      mulmod64(mulmod64(mod_floor(k2, q3u), mod_floor(k2, q3u), q3u), c.kappa % q3u, q3u));

  CongruenceReport r;
  i128 c1a = a2 * p.x1 - k3 * a1 * p.x2;
  i128 c1b = k2 * a1 * p.y1 + a2 * p.y2;
  r.c1 = (c1a % q == 0) && (c1b % q == 0);
  i128 c2v = k2 * a1 * p.x2 * p.y1 + a2 * p.x2 * p.y2;
  r.c2 = c2v % q == 0;
  i128 c3v = 2 * a2 * p.x1 * p.y1 + k3 * a1 * p.x2 * p.y1 + 3 * kap * a2 * p.x2 * p.y2;
  r.c3 = c3v % q2 == 0;
  i128 c4v = 5 * k2 * a1 * a2 * p.x1 * p.y1 + a2 * a2 * p.x1 * p.y2 + k5 * a1 * a1 * p.x2 * p.y1 +
             5 * k3 * a1 * a2 * p.x2 * p.y2;
  r.c4 = c4v % q3 == 0;
  i128 rr = gcd128(gcd128(p.y1, p.y2), q);
  i128 t1 = checked_mul(checked_mul(a1, checked_mul(p.x1, p.x1)),
                        checked_mul(checked_mul(p.y1, p.y1), p.y1));
  i128 t2 = checked_mul(checked_mul(a2, checked_mul(p.x2, p.x2)),
                        checked_mul(checked_mul(p.y2, p.y2), p.y2));
  i128 total = checked_mul(static_cast<i128>(18), checked_add(t1, t2));
  i128 modulus = checked_mul(q3, checked_mul(rr, rr));
  r.c5 = total % modulus == 0;
  return r;
}

IntLattice lambda_lattice(const CongruenceClass& c, const CoeffTriple& a) {
  a.validate();
  c.validate(a);
  if (c.q < 2) throw std::domain_error("degenerate modulus q = 1");
  const u64 q = c.q;
  const u64 q2 = q * q, q3 = q * q * q;
  const u64 a1m = mod_floor(a.a1, q3);
  const u64 a2bar = inv_mod(mod_floor(a.a2, q3), q3);
  const u64 kap = c.kappa;
  const u64 k2a1b = mulmod64(mulmod64(kap, kap, q3), mulmod64(a1m, a2bar, q3), q3);
  const u64 k3a1b = mulmod64(k2a1b, kap, q3);
  const u64 k5a1b2 = mulmod64(mulmod64(k3a1b, k2a1b, q3), 1, q3);  // kappa^5 a1^2 a2bar^2

  LatBasis B;
  B.dim = 4;
  B.rank = 4;
  B.den = static_cast<i128>(q3);
  // numerators of q^3 * (generators); third coordinates reduced mod q^3,
  // which subtracts multiples of the first generator
  B.col[0] = {0, 0, static_cast<i128>(q3), 0};
  B.col[1] = {0, 0, static_cast<i128>(mulmod64(q2, k2a1b, q3)), static_cast<i128>(q2)};
  B.col[2] = {static_cast<i128>(2 * q), 0, static_cast<i128>(mulmod64(q, k3a1b, q3)),
              static_cast<i128>(3 * kap * q)};
  B.col[3] = {static_cast<i128>(5) * k2a1b, 1, static_cast<i128>(k5a1b2),
              static_cast<i128>(5) * k3a1b};
  hnf_columns(B);
  IntLattice L;
  L.basis = B;
  return L;
}

bool CoverLattice::quintic_vanishes() const {
  for (const auto& cf : quintic)
    if (cf != 0) return false;
  return true;
}

bool CoverLattice::contains(const Point4& p) const {
  const i128 pv[4] = {p.x1, p.x2, p.y1, p.y2};
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) {
      i128 det = gens[0][i] * gens[1][j] - gens[0][j] * gens[1][i];
      if (det == 0) continue;
      i128 un = pv[i] * gens[1][j] - pv[j] * gens[1][i];
      i128 vn = gens[0][i] * pv[j] - gens[0][j] * pv[i];
      if (un % det != 0 || vn % det != 0) return false;
      i128 u = un / det, v = vn / det;
      for (int t = 0; t < 4; ++t)
        if (u * gens[0][t] + v * gens[1][t] != pv[t]) return false;
      return true;
    }
  }
  return false;
}

std::array<i128, 8> CoverLattice::canonical_key() const {
  LatBasis B;
  B.dim = 4;
  B.rank = 2;
  B.den = 1;
  B.col[0] = gens[0];
  B.col[1] = gens[1];
  hnf_columns(B);
  return {B.col[0][0], B.col[0][1], B.col[0][2], B.col[0][3],
          B.col[1][0], B.col[1][1], B.col[1][2], B.col[1][3]};
}

bool S0Item::matches(const Point4& p, u64 q) const {
  const i128 q3 = static_cast<i128>(q) * q * q;
  if (x_fixed) {
    if (p.x1 != static_cast<i128>(fixed_a) || p.x2 != static_cast<i128>(fixed_b)) return false;
    for (u64 lam : classes) {
      if ((p.y1 - static_cast<i128>(lam) * p.y2) % q3 == 0) return true;
    }
    return false;
  }
  if (p.y1 != static_cast<i128>(fixed_a) || p.y2 != static_cast<i128>(fixed_b)) return false;
  for (u64 s : classes) {
    if ((p.x1 - static_cast<i128>(s) * p.x2) % q3 == 0) return true;
  }
  return false;
}

namespace {

using Gens = std::array<Vec4, 2>;

Gens compose_gens(const Gens& G, const LatBasis& S) {
  Gens out{};
  for (int j = 0; j < 2; ++j)
    for (int i = 0; i < 4; ++i)
      out[j][i] = G[0][i] * S.col[j][0] + G[1][i] * S.col[j][1];
  return out;
}

void reduce_gens(Gens& G) {
  LatBasis B;
  B.dim = 4;
  B.rank = 2;
  B.den = 1;
  B.col[0] = G[0];
  B.col[1] = G[1];
  lll_reduce(B);
  G[0] = B.col[0];
  G[1] = B.col[1];
}

std::vector<i128> pmul(const std::vector<i128>& f, const std::vector<i128>& g) {
  std::vector<i128> h(f.size() + g.size() - 1, 0);
  for (size_t i = 0; i < f.size(); ++i)
    for (size_t j = 0; j < g.size(); ++j) h[i + j] += f[i] * g[j];
  return h;
}

std::array<i128, 6> quintic_of(const Gens& G, const CoeffTriple& a) {
  auto lin = [&](int coord) { return std::vector<i128>{G[0][coord], G[1][coord]}; };
  auto x1 = lin(0), x2 = lin(1), y1 = lin(2), y2 = lin(3);
  auto t1 = pmul(pmul(x1, x1), pmul(pmul(y1, y1), y1));
  auto t2 = pmul(pmul(x2, x2), pmul(pmul(y2, y2), y2));
  std::array<i128, 6> out{};
  for (int i = 0; i < 6; ++i) out[i] = a.a1 * t1[i] + a.a2 * t2[i];
  return out;
}

struct ModCoeffs {
  // congruence-system coefficients with the powers of kappa reduced
  u64 q, q2, q3;
  u64 kap, k2_q3, k3_q2, k3_q3, k5_q3;
  u64 a1_q, a2_q;
};

ModCoeffs make_mod_coeffs(const CongruenceClass& c, const CoeffTriple& a) {
  ModCoeffs m;
  m.q = c.q;
  m.q2 = m.q * m.q;
  m.q3 = m.q2 * m.q;
  m.kap = c.kappa;
  m.k2_q3 = mulmod64(m.kap, m.kap, m.q3);
  u64 k3 = mulmod64(m.k2_q3, m.kap, m.q3);
  m.k3_q3 = k3;
  m.k3_q2 = k3 % m.q2;
  m.k5_q3 = mulmod64(m.k2_q3, k3, m.q3);
  m.a1_q = mod_floor(a.a1, m.q3);
  m.a2_q = mod_floor(a.a2, m.q3);
  return m;
}

// c3 evaluated on an integer 4-vector, reduced mod q^2
i128 eval_c3(const ModCoeffs& m, const Vec4& P) {
  u64 M = m.q2;
  u64 x1 = mod_floor(P[0], M), x2 = mod_floor(P[1], M);
  u64 y1 = mod_floor(P[2], M), y2 = mod_floor(P[3], M);
  u64 a1 = m.a1_q % M, a2 = m.a2_q % M;
  u64 s = mulmod64(mulmod64(2 * 1ull, mulmod64(a2, x1, M), M), y1, M);
  s = (s + mulmod64(mulmod64(m.k3_q2 % M, mulmod64(a1, x2, M), M), y1, M)) % M;
  s = (s + mulmod64(mulmod64(3 * (m.kap % M) % M, mulmod64(a2, x2, M), M), y2, M)) % M;
  return static_cast<i128>(s);
}

// c4 evaluated on an integer 4-vector, reduced mod q^3
i128 eval_c4(const ModCoeffs& m, const Vec4& P) {
  u64 M = m.q3;
  u64 x1 = mod_floor(P[0], M), x2 = mod_floor(P[1], M);
  u64 y1 = mod_floor(P[2], M), y2 = mod_floor(P[3], M);
  u64 a1 = m.a1_q, a2 = m.a2_q;
  u64 s = mulmod64(mulmod64(mulmod64(5, m.k2_q3, M), mulmod64(a1, a2, M), M),
                   mulmod64(x1, y1, M), M);
  s = (s + mulmod64(mulmod64(a2, a2, M), mulmod64(x1, y2, M), M)) % M;
  s = (s + mulmod64(mulmod64(m.k5_q3, mulmod64(a1, a1, M), M), mulmod64(x2, y1, M), M)) % M;
  s = (s + mulmod64(mulmod64(mulmod64(5, m.k3_q3, M), mulmod64(a1, a2, M), M),
                    mulmod64(x2, y2, M), M)) %
      M;
  return static_cast<i128>(s);
}

QForm form_of(const ModCoeffs& m, const Gens& G, bool use_c4) {
  Vec4 sum{};
  for (int i = 0; i < 4; ++i) sum[i] = G[0][i] + G[1][i];
  i128 A = use_c4 ? eval_c4(m, G[0]) : eval_c3(m, G[0]);
  i128 C = use_c4 ? eval_c4(m, G[1]) : eval_c3(m, G[1]);
  i128 S = use_c4 ? eval_c4(m, sum) : eval_c3(m, sum);
  i128 M = use_c4 ? static_cast<i128>(m.q3) : static_cast<i128>(m.q2);
  i128 B = ((S - A - C) % M + M) % M;
  return QForm{A, B, C};
}

}  // namespace

CoverResult extract_cover(const CongruenceClass& c, const CoeffTriple& a, const DyadicBox& box,
                          const std::optional<Point4>& focus, u64 max_lattices,
                          bool stop_when_covered) {
  a.validate();
  c.validate(a);
  if (c.q < 2) throw std::domain_error("degenerate modulus q = 1");
  const u64 q = c.q;
  const u64 q3u = q * q * q;
  const i128 q3 = static_cast<i128>(q3u);

  IntLattice lambda = lambda_lattice(c, a);
  CoverResult res;
  res.lambda_det = lattice_det(lambda);
  std::vector<Rat> E = {Rat(static_cast<i128>(box.X1) * box.Y1),
                        Rat(static_cast<i128>(box.X1) * box.Y2),
                        Rat(static_cast<i128>(box.X2) * box.Y1),
                        Rat(static_cast<i128>(box.X2) * box.Y2)};
  IntLattice EL = apply_diag(lambda, E);
  SiegelThreshold st = siegel_threshold(EL);
  res.t0 = st.t0;

  std::vector<Vec4> ts;
  auto add_t = [&](Vec4 tv) {
    i128 g = 0;
    for (i128 v : tv) g = gcd128(g, v);
    if (g == 0) return;
    for (i128& v : tv) v /= g;
    for (int i = 0; i < 4; ++i) {
      if (tv[i] != 0) {
        if (tv[i] < 0)
          for (i128& v : tv) v = -v;
        break;
      }
    }
    if (std::find(ts.begin(), ts.end(), tv) == ts.end()) ts.push_back(tv);
  };
  auto lambda_numerator_from_scaled = [&](const RatVec& h) {
    // h lives in E*Lambda; the t-vector is q^3 * E^{-1} h, an integer vector
    Vec4 tv{};
    for (int i = 0; i < 4; ++i) {
      Rat g = h[i] / E[i] * Rat(q3);
      if (!g.is_integer()) throw std::runtime_error("cover: non-integral t-vector");
      tv[i] = g.num;
    }
    return tv;
  };

  if (focus) {
    Vec4 w = {focus->x1 * focus->y1, focus->x1 * focus->y2, focus->x2 * focus->y1,
              focus->x2 * focus->y2};
    if (st.shortest_vector_case) {
      Rat dot(0);
      for (int i = 0; i < 4; ++i) dot = dot + Rat(w[i]) * (st.shortest[i] / E[i]);
      if (dot.is_zero()) add_t(lambda_numerator_from_scaled(st.shortest));
    } else {
      // sublattice of Lambda orthogonal to w, scaled by E, inside the 2 t0 box
      std::vector<Vec4> row(1);
      for (int j = 0; j < 4; ++j) {
        i128 s = 0;
        for (int i = 0; i < 4; ++i) s += w[i] * lambda.basis.col[j][i];
        row[0][j] = s;
      }
      auto ker = integer_kernel(row, 4);
      if (!ker.empty()) {
        LatBasis K;
        K.dim = 4;
        K.rank = static_cast<int>(ker.size());
        K.den = lambda.basis.den;
        for (size_t j = 0; j < ker.size(); ++j)
          for (int i = 0; i < 4; ++i) {
            i128 s = 0;
            for (int t = 0; t < 4; ++t) s += ker[j][t] * lambda.basis.col[t][i];
            K.col[j][i] = s;
          }
        lll_reduce(K);  // keep entries small before the diagonal scaling
        for (int j = 0; j < K.rank; ++j)
          for (int i = 0; i < 4; ++i) K.col[j][i] *= E[i].num;
        enumerate_linf(K, st.t0 * Rat(2), 50'000'000,
                       [&](const std::array<i64, 4>&, const Vec4& num) {
                         Vec4 tv{};
                         for (int i = 0; i < 4; ++i) tv[i] = num[i] / E[i].num;
                         add_t(tv);
                         return true;
                       });
      }
    }
  } else {
    if (st.shortest_vector_case) {
      add_t(lambda_numerator_from_scaled(st.shortest));
    } else {
      SiegelCover sc = siegel_cover(EL, 500'000);
      if (!sc.materialized)
        throw std::runtime_error("cover: slicing set too large to materialize; use a focus");
      for (const auto& h : sc.H) add_t(lambda_numerator_from_scaled(h));
    }
  }
  res.t_count = ts.size();

  ModCoeffs mc = make_mod_coeffs(c, a);
  const u64 a1m = mod_floor(a.a1, q3u);
  const u64 a2m = mod_floor(a.a2, q3u);
  const u64 a1bar = inv_mod(a1m, q3u);

  std::vector<std::array<i128, 8>> seen;
  auto push_lattice = [&](const Gens& G, const Vec4& t, i128 h) {
    CoverLattice cl;
    cl.gens = G;
    cl.cls = c;
    cl.t = t;
    cl.h = h;
    cl.quintic = quintic_of(G, a);
    if (cl.quintic_vanishes()) return;
    auto key = cl.canonical_key();
    if (std::find(seen.begin(), seen.end(), key) != seen.end()) return;
    seen.push_back(key);
    if (res.lattices.size() >= max_lattices)
      throw std::runtime_error("cover: lattice cap exceeded");
    res.lattices.push_back(cl);
  };

  auto process_s0 = [&](const Vec4& t) {
    auto prim2 = [](i128 x, i128 y) {
      i128 g = gcd128(x, y);
      if (g != 0) { x /= g; y /= g; }
      return std::pair<i128, i128>(x, y);
    };
    // rank-1 coefficient matrix [[t1,t2],[t3,t4]] = u v^T
    auto [u1, u2] = (t[0] != 0 || t[2] != 0) ? prim2(t[0], t[2]) : prim2(t[1], t[3]);
    auto [v1, v2] = (t[0] != 0 || t[1] != 0) ? prim2(t[0], t[1]) : prim2(t[2], t[3]);
    if (u1 != 0 && u2 != 0 && (u1 < 0) != (u2 < 0)) {
      u64 fx1 = static_cast<u64>(abs128(u2)), fx2 = static_cast<u64>(abs128(u1));
      S0Item item;
      item.x_fixed = true;
      item.fixed_a = fx1;
      item.fixed_b = fx2;
      item.t = t;
      if (std::gcd(fx1 % q == 0 ? q : fx1 % q, q) == 1 &&
          std::gcd(fx2 % q == 0 ? q : fx2 % q, q) == 1) {
        u64 x1b = inv_mod(fx1 % q3u, q3u);
        u64 cval = mulmod64(mulmod64(a1bar, a2m, q3u), mulmod64(x1b, x1b, q3u), q3u);
        cval = mulmod64(cval, mulmod64(fx2 % q3u, fx2 % q3u, q3u), q3u);
        cval = (q3u - cval) % q3u;  // -a1bar a2 x1^{-2} x2^2
        item.classes = cube_roots_mod_q3(cval, q);
      }
      res.s0.push_back(item);
    }
    if (v1 != 0 && v2 != 0 && (v1 < 0) != (v2 < 0)) {
      u64 fy1 = static_cast<u64>(abs128(v2)), fy2 = static_cast<u64>(abs128(v1));
      S0Item item;
      item.x_fixed = false;
      item.fixed_a = fy1;
      item.fixed_b = fy2;
      item.t = t;
      if (std::gcd(fy1 % q == 0 ? q : fy1 % q, q) == 1 &&
          std::gcd(fy2 % q == 0 ? q : fy2 % q, q) == 1) {
        u64 y1b = inv_mod(fy1 % q3u, q3u);
        u64 cval = mulmod64(mulmod64(a1bar, a2m, q3u),
                            mulmod64(mulmod64(y1b, y1b, q3u), y1b, q3u), q3u);
        u64 y2c = mulmod64(mulmod64(fy2 % q3u, fy2 % q3u, q3u), fy2 % q3u, q3u);
        cval = mulmod64(cval, y2c, q3u);
        cval = (q3u - cval) % q3u;  // -a1bar a2 y1^{-3} y2^3; x1 == s x2 for s^2 = cval
        item.classes = square_roots_mod_q3(cval, q);
      }
      res.s0.push_back(item);
    }
  };

  auto process_line = [&](const Vec4& t, i128 h) {
    std::array<std::array<i128, 2>, 2> M = {{{t[1], t[3]}, {t[0], t[2]}}};
    LatBasis V = congruence_kernel_mod(M, abs128(h));
    Gens G{};
    for (int j = 0; j < 2; ++j) {
      i128 x1 = V.col[j][0], x2 = V.col[j][1];
      i128 n1 = -t[1] * x1 - t[3] * x2;
      i128 n2 = t[0] * x1 + t[2] * x2;
      if (n1 % h != 0 || n2 % h != 0) throw std::runtime_error("cover: line division failed");
      G[j] = {x1, x2, n1 / h, n2 / h};
    }
    reduce_gens(G);
    // refine by c1 (two linear congruences mod q)
    std::array<std::array<i128, 2>, 2> C1;
    for (int j = 0; j < 2; ++j) {
      i128 c1a = static_cast<i128>(a.a2) * G[j][0] -
                 static_cast<i128>(mc.k3_q3 % q) * a.a1 * G[j][1];
      i128 c1b = static_cast<i128>(mc.k2_q3 % q) * a.a1 * G[j][2] +
                 static_cast<i128>(a.a2) * G[j][3];
      C1[0][j] = mod_floor(c1a, q);
      C1[1][j] = mod_floor(c1b, q);
    }
    LatBasis W = congruence_kernel_mod(C1, static_cast<i128>(q));
    Gens G1 = compose_gens(G, W);
    reduce_gens(G1);
    // refine by c3 mod q^2 and c4 mod q^3 via the quadratic decomposition
    QForm Q3 = form_of(mc, G1, false);
    for (const auto& L3 : omega_decompose(Q3, static_cast<u64>(mc.q2))) {
      Gens G2 = compose_gens(G1, L3.basis);
      reduce_gens(G2);
      QForm Q4 = form_of(mc, G2, true);
      for (const auto& L4 : omega_decompose(Q4, q3u)) {
        Gens G3 = compose_gens(G2, L4.basis);
        reduce_gens(G3);
        push_lattice(G3, t, h);
      }
    }
  };

  for (const auto& t : ts) {
    i128 delta = t[0] * t[3] - t[1] * t[2];
    if (delta == 0) {
      process_s0(t);
    } else {
      i128 ad = abs128(delta);
      if (ad > static_cast<i128>(1) << 62)
        throw std::runtime_error("cover: t-vector too large to factor");
      for (u64 d : divisors(factorize(static_cast<u64>(ad)))) {
        process_line(t, static_cast<i128>(d));
        process_line(t, -static_cast<i128>(d));
      }
    }
    if (stop_when_covered && focus && cover_contains(res, *focus, q)) break;
  }
  return res;
}

bool cover_contains(const CoverResult& r, const Point4& p, u64 q) {
  for (const auto& item : r.s0)
    if (item.matches(p, q)) return true;
  for (const auto& cl : r.lattices)
    if (cl.contains(p)) return true;
  return false;
}

namespace {

std::vector<Rat> form_poly(const RatForm& f) { return {f.cu, f.cv}; }

std::vector<Rat> rmul(const std::vector<Rat>& a, const std::vector<Rat>& b) {
  std::vector<Rat> h(a.size() + b.size() - 1, Rat(0));
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) h[i + j] = h[i + j] + a[i] * b[j];
  return h;
}

std::vector<Rat> radd(std::vector<Rat> a, const std::vector<Rat>& b) {
  if (b.size() > a.size()) a.resize(b.size(), Rat(0));
  for (size_t i = 0; i < b.size(); ++i) a[i] = a[i] + b[i];
  return a;
}

std::vector<Rat> rscale(std::vector<Rat> a, const Rat& s) {
  for (auto& v : a) v = v * s;
  return a;
}

}  // namespace

std::optional<ExceptionalWitness> detect_exceptional(const RatForm& L1, const RatForm& L2,
                                                     const RatForm& M1, const RatForm& M2) {
  Rat cross = M1.cu * M2.cv - M1.cv * M2.cu;
  if (cross.is_zero()) throw std::domain_error("M1 and M2 must be independent");
  auto solve = [&](const RatForm& L) {
    Rat a = (L.cu * M2.cv - L.cv * M2.cu) / cross;
    Rat b = (M1.cu * L.cv - M1.cv * L.cu) / cross;
    return std::make_pair(a, b);
  };
  auto [a, b] = solve(L1);
  auto [cc, d] = solve(L2);
  if (a.is_zero() || cc.is_zero()) return std::nullopt;
  Rat nu = a / Rat(4);
  Rat s = -(b / (Rat(5) * nu));  // g^2
  if (!(s > Rat(0))) return std::nullopt;
  Rat g = cc / (Rat(5) * nu * s);
  if (g.is_zero() || g * g != s) return std::nullopt;
  if (d != -(Rat(4) * nu * g * s * s)) return std::nullopt;
  return ExceptionalWitness{g, nu};
}

bool exceptional_factor_check(const ExceptionalWitness& w, const RatForm& L1, const RatForm& L2,
                              const RatForm& M1, const RatForm& M2) {
  if (w.g.is_zero() || w.nu.is_zero()) return false;
  Rat s = w.g * w.g;
  auto m1 = form_poly(M1), m2 = form_poly(M2), l1 = form_poly(L1), l2 = form_poly(L2);
  // line identities
  auto l1exp = rscale(radd(rscale(m1, Rat(4)), rscale(m2, -(Rat(5) * s))), w.nu);
  auto l2exp = rscale(radd(rscale(m1, Rat(5)), rscale(m2, -(Rat(4) * s))), w.nu * w.g * s);
  if (l1 != l1exp || l2 != l2exp) return false;
  // F = L1^2 M1^3 + L2^2 M2^3 against nu^2 (4M1^2 - 7g^2 M1M2 + 4g^4 M2^2)^2 (M1 + g^2 M2)
  auto F = radd(rmul(rmul(l1, l1), rmul(rmul(m1, m1), m1)),
                rmul(rmul(l2, l2), rmul(rmul(m2, m2), m2)));
  auto Qf = radd(radd(rscale(rmul(m1, m1), Rat(4)), rscale(rmul(m1, m2), -(Rat(7) * s))),
                 rscale(rmul(m2, m2), Rat(4) * s * s));
  auto rhs = rscale(rmul(rmul(Qf, Qf), radd(m1, rscale(m2, s))), w.nu * w.nu);
  return F == rhs;
}

std::optional<AwkwardWitness> check_awkward(const CongruenceClass& c, const CoeffTriple& a,
                                            const DyadicBox& box, const Rat& R) {
  a.validate();
  c.validate(a);
  if (!(R > Rat(0))) throw std::domain_error("R must be positive");
  const u64 q = c.q;
  auto bound = [&](u64 X) {
    i128 f = (R * Rat(static_cast<i128>(X))).floor();
    return f < 0 ? static_cast<i64>(0) : static_cast<i64>(std::min<i128>(f, 1 << 26));
  };
  const i64 xb1 = bound(box.X1), xb2 = bound(box.X2);
  const i64 yb1 = bound(box.Y1), yb2 = bound(box.Y2);
  const i64 A1 = a.a1, A2 = a.a2;
  const i64 aa1 = A1 < 0 ? -A1 : A1, aa2 = A2 < 0 ? -A2 : A2;
  const u64 k3q = mulmod64(mulmod64(c.kappa, c.kappa, q), c.kappa, q);

  auto congruence_ok = [&](i128 x1, i128 x2) {
    i128 lhs = static_cast<i128>(A2) * x1 - static_cast<i128>(k3q) * A1 * x2;
    return lhs % static_cast<i128>(q) == 0;
  };
  auto make = [&](i128 x1, i128 x2, i128 y1, i128 y2) -> std::optional<AwkwardWitness> {
    // re-verify everything exactly before returning
    if ((x1 == 0 && x2 == 0) || (y1 == 0 && y2 == 0)) return std::nullopt;
    if (!congruence_ok(x1, x2)) return std::nullopt;
    i128 eq = A1 * x1 * x1 * y1 * y1 * y1 + A2 * x2 * x2 * y2 * y2 * y2;
    if (eq != 0) return std::nullopt;
    if (abs128(x1) > xb1 || abs128(x2) > xb2 || abs128(y1) > yb1 || abs128(y2) > yb2)
      return std::nullopt;
    return AwkwardWitness{static_cast<i64>(x1), static_cast<i64>(x2), static_cast<i64>(y1),
                          static_cast<i64>(y2)};
  };

  // degenerate branches: one of the x's is zero
  if (static_cast<i64>(q) <= xb1 && yb2 >= 1) {
    if (auto w = make(static_cast<i128>(q), 0, 0, 1)) return w;
  }
  if (static_cast<i64>(q) <= xb2 && yb1 >= 1) {
    if (auto w = make(0, static_cast<i128>(q), 1, 0)) return w;
  }

  // a2 x1 = j u1^3, a1 x2 = j u2^3 with u1 > 0, gcd(u1, u2) = 1
  const i64 u1max = static_cast<i64>(icbrt(static_cast<u128>(aa2) * xb1));
  const i64 u2max = static_cast<i64>(icbrt(static_cast<u128>(aa1) * xb2));
  for (i64 u1 = 1; u1 <= u1max; ++u1) {
    i128 u13 = static_cast<i128>(u1) * u1 * u1;
    for (i64 u2a = 1; u2a <= u2max; ++u2a) {
      if (std::gcd(static_cast<u64>(u1), static_cast<u64>(u2a)) != 1) continue;
      i128 u23a = static_cast<i128>(u2a) * u2a * u2a;
      i128 jmax = std::min(static_cast<i128>(aa2) * xb1 / u13,
                           static_cast<i128>(aa1) * xb2 / u23a);
      for (int su = 0; su < 2; ++su) {
        i128 u2 = su == 0 ? static_cast<i128>(u2a) : -static_cast<i128>(u2a);
        i128 u23 = su == 0 ? u23a : -u23a;
        for (i128 jm = 1; jm <= jmax; ++jm) {
          for (int sj = 0; sj < 2; ++sj) {
            i128 j = sj == 0 ? jm : -jm;
            if ((j * u13) % A2 != 0 || (j * u23) % A1 != 0) continue;
            i128 x1 = j * u13 / A2;
            i128 x2 = j * u23 / A1;
            if (abs128(x1) > xb1 || abs128(x2) > xb2 || x1 == 0 || x2 == 0) continue;
            if (!congruence_ok(x1, x2)) continue;
            // a1 u1^2 y1 + a2 u2^2 y2 = 0
            i128 c1 = static_cast<i128>(A2) * u2 * u2;
            i128 c2 = -static_cast<i128>(A1) * u1 * u1;
            i128 g = gcd128(c1, c2);
            i128 y1 = c1 / g, y2 = c2 / g;
            if (auto w = make(x1, x2, y1, y2)) return w;
            if (auto w = make(x1, x2, -y1, -y2)) return w;
          }
        }
      }
    }
  }
  return std::nullopt;
}

}  // namespace sqf

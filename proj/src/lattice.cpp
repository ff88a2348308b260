#include "sqf/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "sqf/arith.hpp"

namespace sqf {
namespace {

i128 floor_div(i128 a, i128 b) {
  if (b < 0) { a = -a; b = -b; }
  i128 q = a / b;
  if (a % b != 0 && a < 0) --q;
  return q;
}

// Floating-point Gram-Schmidt data computed from exact integer inner
// products. Only used for pruning decisions and reduction heuristics; every
// membership or norm decision is re-checked in exact arithmetic.
struct GramSchmidt {
  int rank = 0;
  std::array<double, 4> Bstar;          // squared l2 norms of the GS vectors
  std::array<std::array<double, 4>, 4> mu;
};

i128 inner_cols(const LatBasis& B, int a, int b) {
  i128 s = 0;
  for (int i = 0; i < B.dim; ++i) s += B.col[a][i] * B.col[b][i];
  return s;
}

GramSchmidt compute_gs(const LatBasis& B) {
  GramSchmidt g;
  g.rank = B.rank;
  std::array<std::array<double, 4>, 4> proj{};  // proj[j][i] = <b_j, b*_i>
  for (int j = 0; j < B.rank; ++j) {
    for (int i = 0; i < j; ++i) {
      double p = static_cast<double>(inner_cols(B, j, i));
      for (int k = 0; k < i; ++k) p -= g.mu[i][k] * proj[j][k];
      proj[j][i] = p;
      if (g.Bstar[i] <= 0) throw std::domain_error("dependent basis vectors");
      g.mu[j][i] = p / g.Bstar[i];
    }
    double n = static_cast<double>(inner_cols(B, j, j));
    for (int k = 0; k < j; ++k) n -= g.mu[j][k] * proj[j][k];
    g.Bstar[j] = n;
    if (n <= 0) throw std::domain_error("dependent basis vectors");
  }
  return g;
}

}  // namespace

Rat LatBasis::gram_det() const {
  // det of the rank x rank Gram matrix, exact
  std::array<std::array<Rat, 4>, 4> G;
  for (int i = 0; i < rank; ++i)
    for (int j = 0; j < rank; ++j) G[i][j] = Rat(inner_cols(*this, i, j), den * den);
  // Gaussian elimination over Q
  Rat det(1);
  std::array<std::array<Rat, 4>, 4> M = G;
  for (int c = 0; c < rank; ++c) {
    int piv = -1;
    for (int r = c; r < rank; ++r)
      if (!M[r][c].is_zero()) { piv = r; break; }
    if (piv < 0) return Rat(0);
    if (piv != c) { std::swap(M[piv], M[c]); det = -det; }
    det = det * M[c][c];
    for (int r = c + 1; r < rank; ++r) {
      Rat f = M[r][c] / M[c][c];
      for (int j = c; j < rank; ++j) M[r][j] = M[r][j] - f * M[c][j];
    }
  }
  return det;
}

Rat LatBasis::det() const {
  if (rank != dim) throw std::domain_error("determinant requires a full-rank basis");
  // cofactor expansion on the integer numerators
  std::array<std::array<i128, 4>, 4> m;
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) m[i][j] = col[j][i];
  std::function<i128(std::vector<int>, std::vector<int>)> minor_det =
      [&](std::vector<int> rows, std::vector<int> cols) -> i128 {
    size_t n = rows.size();
    if (n == 1) return m[rows[0]][cols[0]];
    i128 s = 0;
    int sign = 1;
    for (size_t j = 0; j < n; ++j) {
      std::vector<int> rc(rows.begin() + 1, rows.end());
      std::vector<int> cc;
      for (size_t t = 0; t < n; ++t)
        if (t != j) cc.push_back(cols[t]);
      s += sign * m[rows[0]][cols[j]] * minor_det(rc, cc);
      sign = -sign;
    }
    return s;
  };
  std::vector<int> idx(dim);
  std::iota(idx.begin(), idx.end(), 0);
  i128 nd = minor_det(idx, idx);
  i128 dk = 1;
  for (int i = 0; i < dim; ++i) dk *= den;
  return Rat(nd, dk);
}

Rat LatBasis::abs_det() const {
  if (rank != dim) throw std::domain_error("determinant requires a full-rank basis");
  LatBasis W = *this;
  hnf_columns(W);
  i128 prod = 1;
  for (int j = 0; j < dim; ++j) {
    // pivot of column j is its first nonzero entry
    i128 piv = 0;
    for (int i = 0; i < dim; ++i)
      if (W.col[j][i] != 0) {
        piv = W.col[j][i];
        break;
      }
    if (piv == 0) return Rat(0);
    prod = checked_mul(prod, abs128(piv));
  }
  i128 dk = 1;
  for (int i = 0; i < dim; ++i) dk = checked_mul(dk, den);
  return Rat(prod, dk);
}

void lll_reduce(LatBasis& B) {
  if (B.rank < 2) return;
  const double delta = 0.75;
  GramSchmidt g = compute_gs(B);
  int j = 1;
  int guard = 0;
  while (j < B.rank) {
    // the loop performs exact unimodular column operations; the guard only
    // bounds the floating-point control flow
    if (++guard > 200000) break;
    for (int i = j - 1; i >= 0; --i) {
      i128 q = static_cast<i128>(std::llround(g.mu[j][i]));
      if (std::abs(g.mu[j][i]) > 9e17) q = static_cast<i128>(g.mu[j][i]);
      if (q != 0) {
        for (int t = 0; t < B.dim; ++t) B.col[j][t] -= q * B.col[i][t];
        for (int k = 0; k < i; ++k) g.mu[j][k] -= static_cast<double>(q) * g.mu[i][k];
        g.mu[j][i] -= static_cast<double>(q);
      }
    }
    double lhs = g.Bstar[j];
    double rhs = (delta - g.mu[j][j - 1] * g.mu[j][j - 1]) * g.Bstar[j - 1];
    if (!std::isfinite(lhs) || !std::isfinite(rhs)) break;
    if (lhs >= rhs) {
      ++j;
    } else {
      std::swap(B.col[j], B.col[j - 1]);
      g = compute_gs(B);
      j = std::max(1, j - 1);
    }
  }
}

namespace {

struct EnumState {
  const LatBasis* B;
  GramSchmidt gs;
  Rat bound_num;  // radius as Rat, for the exact final filter
  u64 budget;
  bool aborted = false;
  std::array<i64, 4> coeffs{};
  const std::function<bool(const std::array<i64, 4>&, const Vec4&)>* visit;
  bool stopped = false;
};

// The pruning bounds run in double precision with an inflation margin, so
// the candidate set is a superset of the true ball; the exact sup-norm
// filter below makes the enumeration exact.
void enum_level(EnumState& st, int level, double Trem) {
  if (st.aborted || st.stopped) return;
  if (level < 0) {
    if (st.budget == 0) {
      st.aborted = true;
      return;
    }
    --st.budget;
    Vec4 num{};
    const LatBasis& B = *st.B;
    for (int i = 0; i < B.dim; ++i) {
      i128 s = 0;
      for (int jj = 0; jj < B.rank; ++jj) s += static_cast<i128>(st.coeffs[jj]) * B.col[jj][i];
      num[i] = s;
    }
    // exact linf filter: |num_i| / den <= radius
    for (int i = 0; i < B.dim; ++i) {
      if (abs128(num[i]) * st.bound_num.den > st.bound_num.num * B.den) return;
    }
    if (!(*st.visit)(st.coeffs, num)) st.stopped = true;
    return;
  }
  double off = 0;
  for (int i = level + 1; i < st.gs.rank; ++i)
    off += static_cast<double>(st.coeffs[i]) * st.gs.mu[i][level];
  double s = std::sqrt(std::max(0.0, Trem / st.gs.Bstar[level]));
  s = s * (1.0 + 1e-9) + 1e-6;
  double lo_d = std::floor(-s - off), hi_d = std::ceil(s - off);
  if (hi_d - lo_d > 4e9) {
    st.aborted = true;  // degenerate numeric range
    return;
  }
  i128 lo = static_cast<i128>(lo_d), hi = static_cast<i128>(hi_d);
  for (i128 c = lo; c <= hi; ++c) {
    if (st.aborted || st.stopped) return;
    double v = static_cast<double>(c) + off;
    double used = v * v * st.gs.Bstar[level];
    double pass = used * (1.0 - 1e-9) - 1e-6;
    if (pass > Trem) continue;
    st.coeffs[level] = static_cast<i64>(c);
    enum_level(st, level - 1, Trem - pass);
  }
}

}  // namespace

bool enumerate_linf(const LatBasis& B, const Rat& radius, u64 max_points,
                    const std::function<bool(const std::array<i64, 4>&, const Vec4&)>& visit) {
  if (radius.sign() < 0) return true;
  LatBasis W = B;
  lll_reduce(W);
  EnumState st;
  st.B = &W;
  st.gs = compute_gs(W);
  st.bound_num = radius;
  st.budget = max_points;
  st.visit = &visit;
  // the Gram data lives in numerator units, so the l2 budget carries den^2
  double rnum = radius.to_double() * static_cast<double>(W.den);
  double T = rnum * rnum * B.dim;
  T = T * (1.0 + 1e-9) + 1e-6;
  enum_level(st, W.rank - 1, T);
  return !st.aborted;
}

u64 count_linf(const LatBasis& B, const Rat& radius, u64 cutoff) {
  u64 count = 0;
  bool complete = enumerate_linf(B, radius, cutoff + 1'000'000,
                                 [&](const std::array<i64, 4>&, const Vec4&) {
                                   ++count;
                                   return count <= cutoff;
                                 });
  if (!complete || count > cutoff) return cutoff + 1;
  return count;
}

std::vector<Vec4> integer_kernel(const std::vector<Vec4>& rows, int ncols) {
  int m = static_cast<int>(rows.size());
  // column representation of the matrix plus a unimodular transform
  std::array<std::vector<i128>, 4> A;
  std::array<Vec4, 4> U{};
  for (int j = 0; j < ncols; ++j) {
    A[j].resize(m);
    for (int i = 0; i < m; ++i) A[j][i] = rows[i][j];
    U[j][j] = 1;
  }
  int lead = 0;
  for (int r = 0; r < m && lead < ncols; ++r) {
    while (true) {
      int j0 = -1;
      for (int j = lead; j < ncols; ++j)
        if (A[j][r] != 0 && (j0 < 0 || abs128(A[j][r]) < abs128(A[j0][r]))) j0 = j;
      if (j0 < 0) break;
      std::swap(A[j0], A[lead]);
      std::swap(U[j0], U[lead]);
      bool clean = true;
      for (int j = lead + 1; j < ncols; ++j) {
        if (A[j][r] == 0) continue;
        i128 q = A[j][r] / A[lead][r];
        if (q != 0) {
          for (int i = 0; i < m; ++i) A[j][i] -= q * A[lead][i];
          for (int i = 0; i < 4; ++i) U[j][i] -= q * U[lead][i];
        }
        if (A[j][r] != 0) clean = false;
      }
      if (clean) break;
    }
    if (A[lead][r] != 0) ++lead;
  }
  std::vector<Vec4> kernel;
  for (int j = lead; j < ncols; ++j) kernel.push_back(U[j]);
  return kernel;
}

LatBasis congruence_kernel_mod(const std::array<std::array<i128, 2>, 2>& M, i128 h) {
  // kernel of [M | -hI] in Z^4, projected to the first two coordinates
  std::vector<Vec4> rows(2);
  rows[0] = {M[0][0], M[0][1], -h, 0};
  rows[1] = {M[1][0], M[1][1], 0, -h};
  auto ker = integer_kernel(rows, 4);
  if (ker.size() != 2) throw std::runtime_error("congruence kernel: unexpected rank");
  LatBasis B;
  B.dim = 2;
  B.rank = 2;
  B.den = 1;
  for (int j = 0; j < 2; ++j) {
    B.col[j][0] = ker[j][0];
    B.col[j][1] = ker[j][1];
  }
  hnf_columns(B);
  return B;
}

void hnf_columns(LatBasis& B) {
  int lead = 0;
  for (int r = 0; r < B.dim && lead < B.rank; ++r) {
    while (true) {
      int j0 = -1;
      for (int j = lead; j < B.rank; ++j)
        if (B.col[j][r] != 0 && (j0 < 0 || abs128(B.col[j][r]) < abs128(B.col[j0][r]))) j0 = j;
      if (j0 < 0) break;
      std::swap(B.col[j0], B.col[lead]);
      bool clean = true;
      for (int j = lead + 1; j < B.rank; ++j) {
        if (B.col[j][r] == 0) continue;
        i128 q = B.col[j][r] / B.col[lead][r];
        if (q != 0)
          for (int i = 0; i < B.dim; ++i) B.col[j][i] -= q * B.col[lead][i];
        if (B.col[j][r] != 0) clean = false;
      }
      if (clean) break;
    }
    if (B.col[lead][r] != 0) {
      if (B.col[lead][r] < 0)
        for (int i = 0; i < B.dim; ++i) B.col[lead][i] = -B.col[lead][i];
      for (int j = 0; j < lead; ++j) {
        i128 q = floor_div(B.col[j][r], B.col[lead][r]);
        if (q != 0)
          for (int i = 0; i < B.dim; ++i) B.col[j][i] -= q * B.col[lead][i];
      }
      ++lead;
    }
  }
}

IntLattice make_lattice(int k, const std::vector<std::vector<i64>>& columns) {
  std::vector<std::vector<Rat>> cols;
  for (const auto& c : columns) {
    std::vector<Rat> rc;
    for (i64 v : c) rc.emplace_back(v);
    cols.push_back(rc);
  }
  return make_lattice_rational(k, cols);
}

IntLattice make_lattice_rational(int k, const std::vector<std::vector<Rat>>& columns) {
  if (k < 2 || k > 4 || static_cast<int>(columns.size()) != k)
    throw std::domain_error("lattice dimension must be in [2,4] with k basis vectors");
  IntLattice L;
  L.basis.dim = k;
  L.basis.rank = k;
  i128 den = 1;
  for (const auto& c : columns)
    for (const auto& r : c) den = checked_mul(den / gcd128(den, r.den), r.den);
  L.basis.den = den;
  for (int j = 0; j < k; ++j) {
    if (static_cast<int>(columns[j].size()) != k) throw std::domain_error("bad basis column");
    for (int i = 0; i < k; ++i)
      L.basis.col[j][i] = columns[j][i].num * (den / columns[j][i].den);
  }
  if (L.basis.abs_det().is_zero()) throw std::domain_error("singular basis");
  return L;
}

IntLattice congruence_lattice(u64 lambda, u64 m) {
  return make_lattice(2, {{1, static_cast<i64>(lambda)}, {0, static_cast<i64>(m)}});
}

IntLattice apply_diag(const IntLattice& L, const std::vector<Rat>& weights) {
  if (static_cast<int>(weights.size()) != L.k()) throw std::domain_error("bad weight count");
  std::vector<std::vector<Rat>> cols(L.k());
  for (int j = 0; j < L.k(); ++j)
    for (int i = 0; i < L.k(); ++i)
      cols[j].push_back(weights[i] * Rat(L.basis.col[j][i], L.basis.den));
  IntLattice out = make_lattice_rational(L.k(), cols);
  out.diag_scale = weights;
  return out;
}

Rat lattice_det(const IntLattice& L) {
  Rat d = L.basis.abs_det();
  if (d.is_zero()) throw std::domain_error("singular basis");
  return d;
}

namespace {

Rat linf_norm(const Vec4& num, i128 den, int dim) {
  i128 m = 0;
  for (int i = 0; i < dim; ++i) m = std::max(m, abs128(num[i]));
  return Rat(m, den);
}

struct FoundVec {
  Rat norm;
  Vec4 num;
};

bool lex_less(const Vec4& a, const Vec4& b, int dim) {
  for (int i = 0; i < dim; ++i)
    if (a[i] != b[i]) return a[i] < b[i];
  return false;
}

// exact rank of a set of rational row vectors
struct RankTracker {
  std::vector<RatVec> rows;
  int dim;

  explicit RankTracker(int d) : dim(d) {}

  bool try_add(const Vec4& num, i128 den) {
    RatVec v;
    for (int i = 0; i < dim; ++i) v[i] = Rat(num[i], den);
    for (const auto& r : rows) {
      int p = -1;
      for (int i = 0; i < dim; ++i)
        if (!r[i].is_zero()) { p = i; break; }
      if (p < 0) continue;
      if (!v[p].is_zero()) {
        Rat f = v[p] / r[p];
        for (int i = 0; i < dim; ++i) v[i] = v[i] - f * r[i];
      }
    }
    bool nonzero = false;
    for (int i = 0; i < dim; ++i)
      if (!v[i].is_zero()) nonzero = true;
    if (nonzero) rows.push_back(v);
    return nonzero;
  }
};

std::optional<FoundVec> find_shortest(const LatBasis& B, u64 max_points = 4'000'000) {
  LatBasis W = B;
  lll_reduce(W);
  Rat radius = linf_norm(W.col[0], W.den, W.dim);
  for (int j = 1; j < W.rank; ++j) radius = std::min(radius, linf_norm(W.col[j], W.den, W.dim));
  std::optional<FoundVec> best;
  enumerate_linf(W, radius, max_points, [&](const std::array<i64, 4>&, const Vec4& num) {
    bool zero = true;
    for (int i = 0; i < W.dim; ++i)
      if (num[i] != 0) zero = false;
    if (zero) return true;
    Rat n = linf_norm(num, W.den, W.dim);
    if (!best || n < best->norm || (n == best->norm && lex_less(num, best->num, W.dim)))
      best = FoundVec{n, num};
    return true;
  });
  return best;
}

}  // namespace

MinimalBasis minimal_basis_of(const LatBasis& B) {
  LatBasis W = B;
  lll_reduce(W);
  Rat radius = linf_norm(W.col[0], W.den, W.dim);
  for (int j = 1; j < W.rank; ++j) radius = std::min(radius, linf_norm(W.col[j], W.den, W.dim));
  std::vector<FoundVec> chosen;
  std::vector<std::array<i64, 4>> chosen_coeffs;
  for (int attempt = 0; attempt < 64; ++attempt) {
    std::vector<FoundVec> pts;
    std::vector<std::array<i64, 4>> coeffs;
    enumerate_linf(W, radius, 80'000'000, [&](const std::array<i64, 4>& c, const Vec4& num) {
      bool zero = true;
      for (int i = 0; i < W.dim; ++i)
        if (num[i] != 0) zero = false;
      if (!zero) {
        pts.push_back({linf_norm(num, W.den, W.dim), num});
        coeffs.push_back(c);
      }
      return true;
    });
    std::vector<size_t> order(pts.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
      if (pts[a].norm != pts[b].norm) return pts[a].norm < pts[b].norm;
      return lex_less(pts[a].num, pts[b].num, W.dim);
    });
    chosen.clear();
    chosen_coeffs.clear();
    RankTracker rt(W.dim);
    for (size_t idx : order) {
      if (rt.try_add(pts[idx].num, W.den)) {
        chosen.push_back(pts[idx]);
        chosen_coeffs.push_back(coeffs[idx]);
        if (static_cast<int>(chosen.size()) == W.rank) break;
      }
    }
    if (static_cast<int>(chosen.size()) == W.rank) break;
    radius = radius * Rat(2);
  }
  if (static_cast<int>(chosen.size()) != W.rank)
    throw std::runtime_error("minimal basis: enumeration failed to reach full rank");

  MinimalBasis mb;
  for (const auto& f : chosen) {
    RatVec v{};
    for (int i = 0; i < W.dim; ++i) v[i] = Rat(f.num[i], W.den);
    mb.minima_vectors.push_back(v);
    mb.minima.push_back(f.norm);
  }
  // does the achiever set generate the lattice?  compare Gram determinants
  LatBasis V;
  V.dim = W.dim;
  V.rank = W.rank;
  V.den = W.den;
  for (int j = 0; j < W.rank; ++j) V.col[j] = chosen[j].num;
  Rat ratio = V.gram_det() / W.gram_det();
  if (ratio == Rat(1)) {
    mb.vectors = mb.minima_vectors;
    mb.norms = mb.minima;
    mb.basis_achieves_minima = true;
  } else {
    mb.basis_achieves_minima = false;
    for (int j = 0; j < W.rank; ++j) {
      RatVec v{};
      for (int i = 0; i < W.dim; ++i) v[i] = Rat(W.col[j][i], W.den);
      mb.vectors.push_back(v);
      mb.norms.push_back(linf_norm(W.col[j], W.den, W.dim));
    }
    std::sort(mb.vectors.begin(), mb.vectors.end(),
              [&](const RatVec& a, const RatVec& b) {
                Rat na(0), nb(0);
                for (int i = 0; i < W.dim; ++i) {
                  na = std::max(na, a[i].abs());
                  nb = std::max(nb, b[i].abs());
                }
                return na < nb;
              });
    std::sort(mb.norms.begin(), mb.norms.end());
  }
  return mb;
}

MinimalBasis minimal_basis_linf(const IntLattice& L) { return minimal_basis_of(L.basis); }

LatBasis dual_basis(const IntLattice& L) {
  int k = L.k();
  // basis matrix A = N/den (columns are vectors); dual = A^{-T} = den * adj(N)^T / det(N)
  std::array<std::array<i128, 4>, 4> N;
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) N[i][j] = L.basis.col[j][i];
  auto minor_at = [&](int skip_r, int skip_c) {
    std::array<int, 3> rs{}, cs{};
    int a = 0, b = 0;
    for (int i = 0; i < k; ++i) {
      if (i != skip_r) rs[a++] = i;
      if (i != skip_c) cs[b++] = i;
    }
    int n = k - 1;
    if (n == 1) return N[rs[0]][cs[0]];
    if (n == 2) return N[rs[0]][cs[0]] * N[rs[1]][cs[1]] - N[rs[0]][cs[1]] * N[rs[1]][cs[0]];
    i128 s = 0;
    for (int j = 0; j < 3; ++j) {
      i128 sub = N[rs[1]][cs[(j + 1) % 3]] * N[rs[2]][cs[(j + 2) % 3]] -
                 N[rs[1]][cs[(j + 2) % 3]] * N[rs[2]][cs[(j + 1) % 3]];
      s += N[rs[0]][cs[j]] * sub;
    }
    return s;
  };
  i128 detN = 0;
  if (k == 2) {
    detN = N[0][0] * N[1][1] - N[0][1] * N[1][0];
  } else {
    for (int j = 0; j < k; ++j)
      detN += ((j % 2 == 0) ? 1 : -1) * N[0][j] * minor_at(0, j);
  }
  if (detN == 0) throw std::domain_error("singular basis");
  LatBasis D;
  D.dim = k;
  D.rank = k;
  i128 den = detN;
  // column j, row i of the dual matrix: den_L * adj(N)[j][i] / det(N),
  // adj(N)[j][i] = (-1)^{i+j} minor(i, j)
  for (int j = 0; j < k; ++j)
    for (int i = 0; i < k; ++i) {
      i128 cof;
      if (k == 2) {
        i128 signv = ((i + j) % 2 == 0) ? 1 : -1;
        cof = signv * N[1 - i][1 - j];
      } else {
        cof = (((i + j) % 2 == 0) ? 1 : -1) * minor_at(i, j);
      }
      D.col[j][i] = L.basis.den * cof;
    }
  if (den < 0) {
    den = -den;
    for (int j = 0; j < k; ++j)
      for (int i = 0; i < k; ++i) D.col[j][i] = -D.col[j][i];
  }
  D.den = den;
  // reduce the common content
  i128 g = den;
  for (int j = 0; j < k; ++j)
    for (int i = 0; i < k; ++i) g = gcd128(g, abs128(D.col[j][i]));
  if (g > 1) {
    D.den /= g;
    for (int j = 0; j < k; ++j)
      for (int i = 0; i < k; ++i) D.col[j][i] /= g;
  }
  return D;
}

std::vector<RatVec> dual_vectors_in_unit_box(const IntLattice& L, u64 max_points) {
  LatBasis D = dual_basis(L);
  std::vector<RatVec> out;
  bool ok = enumerate_linf(D, Rat(1), max_points, [&](const std::array<i64, 4>&, const Vec4& num) {
    RatVec v{};
    for (int i = 0; i < D.dim; ++i) v[i] = Rat(num[i], D.den);
    out.push_back(v);
    return true;
  });
  if (!ok) throw std::runtime_error("dual box enumeration exceeded the point budget");
  std::sort(out.begin(), out.end(), [&](const RatVec& a, const RatVec& b) {
    for (int i = 0; i < L.k(); ++i) {
      if (a[i] != b[i]) return a[i] < b[i];
    }
    return false;
  });
  return out;
}

SiegelThreshold siegel_threshold(const IntLattice& L) {
  int k = L.k();
  Rat det = lattice_det(L);
  SiegelThreshold st;
  i128 kk = 1;
  for (int i = 0; i < k; ++i) kk *= k;
  if (det < Rat(1, kk)) {
    auto sv = find_shortest(L.basis);
    if (!sv) throw std::runtime_error("shortest vector search failed");
    st.shortest_vector_case = true;
    st.t0 = Rat(0);
    for (int i = 0; i < k; ++i) st.shortest[i] = Rat(sv->num[i], L.basis.den);
    return st;
  }
  LatBasis W = L.basis;
  lll_reduce(W);
  auto cond_holds = [&](const Rat& t) {
    // N(t) > 1 + 2 k t, evaluated with an early-exit count
    Rat rhs = Rat(1) + Rat(2 * k) * t;
    u64 cutoff = static_cast<u64>(rhs.floor()) + 1;
    u64 n = count_linf(W, t, cutoff + 2);
    return Rat(static_cast<i128>(n)) > rhs;
  };
  double dd = det.to_double();
  Rat T(std::max<i128>(1, static_cast<i128>(std::pow(2.0 * k * dd, 1.0 / (k - 1)))));
  int guard = 0;
  while (!cond_holds(T)) {
    T = T * Rat(2);
    if (++guard > 120) throw std::runtime_error("siegel: t0 search failed");
  }
  // refine downward: keep a valid point, bisect toward the last invalid one;
  // midpoints are rounded to a fixed grid so denominators stay bounded
  Rat lo = T / Rat(2), good = T;
  for (int it = 0; it < 28; ++it) {
    Rat mid = (lo + good) / Rat(2);
    mid = Rat((mid * Rat(4096)).floor(), 4096);
    if (!(mid > lo) || !(mid < good)) break;
    if (cond_holds(mid))
      good = mid;
    else
      lo = mid;
  }
  // snap to the largest point norm <= good (a jump of N); condition persists
  Rat snapped(0);
  enumerate_linf(W, good, 400'000'000, [&](const std::array<i64, 4>&, const Vec4& num) {
    Rat n = linf_norm(num, W.den, W.dim);
    if (n > snapped) snapped = n;
    return true;
  });
  if (snapped.is_zero() || !cond_holds(snapped))
    snapped = good;  // degenerate; keep the validated radius
  st.t0 = snapped;
  return st;
}

SiegelCover siegel_cover(const IntLattice& L, u64 materialize_cap) {
  int k = L.k();
  SiegelCover sc;
  SiegelThreshold st = siegel_threshold(L);
  if (st.shortest_vector_case) {
    sc.shortest_vector_case = true;
    sc.t0 = Rat(0);
    sc.count = 1;
    Rat mn(0);
    for (int i = 0; i < k; ++i) mn = std::max(mn, st.shortest[i].abs());
    sc.max_norm = mn;
    sc.H.push_back(st.shortest);
    sc.materialized = true;
    return sc;
  }
  LatBasis W = L.basis;
  lll_reduce(W);
  sc.t0 = st.t0;
  Rat R2 = sc.t0 * Rat(2);
  u64 nonzero = 0;
  Rat maxn(0);
  std::vector<RatVec> H;
  bool ok = enumerate_linf(W, R2, 400'000'000, [&](const std::array<i64, 4>&, const Vec4& num) {
    bool zero = true;
    for (int i = 0; i < W.dim; ++i)
      if (num[i] != 0) zero = false;
    if (zero) return true;
    ++nonzero;
    Rat n = linf_norm(num, W.den, W.dim);
    if (n > maxn) maxn = n;
    if (nonzero <= materialize_cap) {
      RatVec v{};
      for (int i = 0; i < W.dim; ++i) v[i] = Rat(num[i], W.den);
      H.push_back(v);
    }
    return true;
  });
  if (!ok) throw std::runtime_error("siegel: H enumeration exceeded budget");
  sc.count = nonzero;
  sc.max_norm = maxn;
  if (nonzero <= materialize_cap) {
    std::sort(H.begin(), H.end(), [&](const RatVec& a, const RatVec& b) {
      Rat na(0), nb(0);
      for (int i = 0; i < k; ++i) {
        na = std::max(na, a[i].abs());
        nb = std::max(nb, b[i].abs());
      }
      if (na != nb) return na < nb;
      for (int i = 0; i < k; ++i)
        if (a[i] != b[i]) return a[i] < b[i];
      return false;
    });
    sc.H = std::move(H);
    sc.materialized = true;
  }
  return sc;
}

bool siegel_covers(const IntLattice& L, const SiegelCover& cover, const RatVec& u) {
  int k = L.k();
  bool uzero = true;
  for (int i = 0; i < k; ++i)
    if (!u[i].is_zero()) uzero = false;
  if (uzero) return true;
  if (cover.shortest_vector_case) {
    Rat dot(0);
    for (int i = 0; i < k; ++i) dot = dot + u[i] * cover.H[0][i];
    return dot.is_zero();
  }
  // pairing of u with each basis column, scaled to integers
  std::array<Rat, 4> pair{};
  i128 den = 1;
  for (int j = 0; j < L.basis.rank; ++j) {
    Rat s(0);
    for (int i = 0; i < k; ++i) s = s + u[i] * Rat(L.basis.col[j][i], L.basis.den);
    pair[j] = s;
    den = checked_mul(den / gcd128(den, s.den), s.den);
  }
  std::vector<Vec4> row(1);
  for (int j = 0; j < L.basis.rank; ++j) row[0][j] = pair[j].num * (den / pair[j].den);
  auto ker = integer_kernel(row, L.basis.rank);
  if (ker.empty()) return false;
  LatBasis sub;
  sub.dim = k;
  sub.rank = static_cast<int>(ker.size());
  sub.den = L.basis.den;
  for (size_t j = 0; j < ker.size(); ++j) {
    for (int i = 0; i < k; ++i) {
      i128 s = 0;
      for (int t = 0; t < L.basis.rank; ++t) s += ker[j][t] * L.basis.col[t][i];
      sub.col[j][i] = s;
    }
  }
  Rat radius = cover.t0 * Rat(2);
  if (sub.rank == 1) {
    // the orthogonal sublattice is a line: reduce its generator to
    // primitive form and compare norms directly
    i128 g = 0;
    for (int i = 0; i < k; ++i) g = gcd128(g, sub.col[0][i]);
    if (g == 0) return false;
    i128 m = 0;
    for (int i = 0; i < k; ++i) m = std::max(m, abs128(sub.col[0][i]) / g);
    return Rat(m, sub.den) <= radius;
  }
  u64 n = count_linf(sub, radius, 1);  // zero point plus anything else
  return n >= 2;
}

std::vector<IntLattice> omega_decompose(const QForm& Q, u64 r) {
  if (r == 0) throw std::domain_error("modulus must be positive");
  struct Item {
    std::array<std::array<i128, 2>, 2> M;  // columns
    QForm q;
  };
  auto compose_form = [](const QForm& q, const std::array<std::array<i128, 2>, 2>& S) {
    // q(S * (X,Y)) coefficients
    i128 a = q.eval(S[0][0], S[0][1]);
    i128 c = q.eval(S[1][0], S[1][1]);
    i128 s = q.eval(S[0][0] + S[1][0], S[0][1] + S[1][1]);
    return QForm{a, s - a - c, c};
  };
  auto mat_mul = [](const std::array<std::array<i128, 2>, 2>& A,
                    const std::array<std::array<i128, 2>, 2>& B) {
    std::array<std::array<i128, 2>, 2> C{};
    for (int j = 0; j < 2; ++j)
      for (int i = 0; i < 2; ++i) C[j][i] = A[0][i] * B[j][0] + A[1][i] * B[j][1];
    return C;
  };

  std::vector<Item> items{{{{{1, 0}, {0, 1}}}, Q}};
  for (auto [p, e] : factorize(r).factors) {
    for (int step = 0; step < e; ++step) {
      std::vector<Item> next;
      for (const auto& it : items) {
        i128 ip = static_cast<i128>(p);
        i128 A = mod_floor(it.q.A, p), B = mod_floor(it.q.B, p), C = mod_floor(it.q.C, p);
        auto push = [&](std::array<std::array<i128, 2>, 2> S) {
          QForm qc = compose_form(it.q, S);
          if (qc.A % ip != 0 || qc.B % ip != 0 || qc.C % ip != 0)
            throw std::runtime_error("omega: inexact division");
          next.push_back({mat_mul(it.M, S), QForm{qc.A / ip, qc.B / ip, qc.C / ip}});
        };
        if (A == 0 && B == 0 && C == 0) {
          push({{{1, 0}, {0, 1}}});
          continue;
        }
        // projective roots of A u^2 + B uv + C v^2 mod p
        std::vector<std::pair<u64, u64>> roots;  // (u0, v0) normalized
        for (u64 x = 0; x < p; ++x) {
          if ((A * x % ip * x + B * x + C) % ip == 0) roots.push_back({x, 1});
        }
        if (A == 0) roots.push_back({1, 0});
        if (roots.empty()) {
          push({{{ip, 0}, {0, ip}}});  // irreducible mod p
          continue;
        }
        for (auto [u0, v0] : roots) {
          if (v0 == 1)
            push({{{static_cast<i128>(u0), 1}, {ip, 0}}});
          else
            push({{{1, 0}, {0, ip}}});
        }
      }
      items = std::move(next);
    }
  }
  // canonicalize and deduplicate
  std::vector<IntLattice> out;
  std::vector<std::array<i128, 4>> seen;
  for (const auto& it : items) {
    LatBasis B;
    B.dim = 2;
    B.rank = 2;
    B.den = 1;
    B.col[0] = {it.M[0][0], it.M[0][1], 0, 0};
    B.col[1] = {it.M[1][0], it.M[1][1], 0, 0};
    hnf_columns(B);
    std::array<i128, 4> key = {B.col[0][0], B.col[0][1], B.col[1][0], B.col[1][1]};
    if (std::find(seen.begin(), seen.end(), key) != seen.end()) continue;
    seen.push_back(key);
    IntLattice L;
    L.basis = B;
    out.push_back(L);
  }
  return out;
}

void Ellipse::validate() const {
  if (!(a > Rat(0)) || !(Rat(4) * a * c - b * b > Rat(0)))
    throw std::domain_error("form is not positive definite");
}

double Ellipse::area() const {
  return 2.0 * M_PI / std::sqrt((Rat(4) * a * c - b * b).to_double());
}

bool Ellipse::contains(i128 x, i128 y) const {
  Rat v = a * Rat(x) * Rat(x) + b * Rat(x) * Rat(y) + c * Rat(y) * Rat(y);
  return v <= Rat(1);
}

Ellipse Ellipse::disk(const Rat& radius) {
  Rat inv = Rat(1) / (radius * radius);
  return Ellipse{inv, Rat(0), inv};
}

bool lattice_contains_2d(const IntLattice& L, i128 u, i128 v) {
  if (L.basis.den != 1) throw std::domain_error("expected an integral lattice");
  i128 a = L.basis.col[0][0], c = L.basis.col[0][1];
  i128 b = L.basis.col[1][0], d = L.basis.col[1][1];
  i128 det = a * d - b * c;
  i128 x = d * u - b * v;
  i128 y = -c * u + a * v;
  return x % det == 0 && y % det == 0;
}

PrimitivePoints primitive_points(const IntLattice& L, const Ellipse& E) {
  E.validate();
  if (L.k() != 2) throw std::domain_error("primitive point counting is 2-dimensional");
  Rat disc = Rat(4) * E.a * E.c - E.b * E.b;
  Rat x2max = Rat(4) * E.c / disc;
  Rat y2max = Rat(4) * E.a / disc;
  auto bound = [](const Rat& m) {
    i64 g = static_cast<i64>(std::sqrt(std::max(0.0, m.to_double()))) + 2;
    while (g > 0 && Rat(g) * Rat(g) > m) --g;
    return g;
  };
  i64 X0 = bound(x2max), Y0 = bound(y2max);
  PrimitivePoints out;
  for (i64 x = -X0; x <= X0; ++x) {
    for (i64 y = -Y0; y <= Y0; ++y) {
      if (x == 0 && y == 0) continue;
      if (std::gcd(static_cast<u64>(x < 0 ? -x : x), static_cast<u64>(y < 0 ? -y : y)) != 1)
        continue;
      if (!E.contains(x, y)) continue;
      if (!lattice_contains_2d(L, x, y)) continue;
      out.points.emplace_back(x, y);
    }
  }
  out.count = out.points.size();
  return out;
}

}  // namespace sqf

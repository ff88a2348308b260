#pragma once

#include <array>
#include <functional>
#include <optional>
#include <vector>

#include "sqf/int128.hpp"
#include "sqf/rat.hpp"

namespace sqf {

using Vec4 = std::array<i128, 4>;
using RatVec = std::array<Rat, 4>;

/// Basis of a rank-r lattice in Q^dim: columns col[0..rank) over a common
/// positive denominator. Lattice points are (1/den) * sum c_j col[j].
struct LatBasis {
  int dim = 0;
  int rank = 0;
  i128 den = 1;
  std::array<Vec4, 4> col{};

  Rat entry(int i, int j) const { return Rat(col[j][i], den); }
  /// Gram determinant det(B^T B) as an exact rational (covolume squared).
  Rat gram_det() const;
  /// Signed determinant / den^dim; requires rank == dim. Cofactor-based,
  /// suitable for small entries only.
  Rat det() const;
  /// |det| / den^dim via the Hermite form (products stay near |det|).
  Rat abs_det() const;
};

/// Size-reduce with exact rational Gram-Schmidt, delta = 3/4.
void lll_reduce(LatBasis& B);

/// Visit every lattice point with linf norm <= radius (the zero vector
/// included). Returns false if more than max_points points were visited
/// (enumeration aborted). Callback may return false to stop early.
bool enumerate_linf(const LatBasis& B, const Rat& radius, u64 max_points,
                    const std::function<bool(const std::array<i64, 4>& coeffs,
                                             const Vec4& num)>& visit);

/// Count points with linf norm <= radius, stopping once the count exceeds
/// cutoff (returns cutoff + 1 in that case).
u64 count_linf(const LatBasis& B, const Rat& radius, u64 cutoff);

/// Kernel of an m x n integer matrix as a basis of {v in Z^n : Mv = 0}.
std::vector<Vec4> integer_kernel(const std::vector<Vec4>& rows, int ncols);

/// Basis of {v in Z^2 : M v == 0 mod h} for a 2x2 integer matrix M.
LatBasis congruence_kernel_mod(const std::array<std::array<i128, 2>, 2>& M, i128 h);

/// Column-style Hermite normal form; canonical for equal lattices.
void hnf_columns(LatBasis& B);

/// Full-rank integer/rational lattice of dimension k in [2, 4].
struct IntLattice {
  LatBasis basis;
  std::vector<Rat> diag_scale;  // recorded weights when built as D * L

  int k() const { return basis.dim; }
};

IntLattice make_lattice(int k, const std::vector<std::vector<i64>>& columns);
IntLattice make_lattice_rational(int k, const std::vector<std::vector<Rat>>& columns);
/// {(u, v) : v == lambda * u mod m}
IntLattice congruence_lattice(u64 lambda, u64 m);
/// Lattice with each row i multiplied by weights[i].
IntLattice apply_diag(const IntLattice& L, const std::vector<Rat>& weights);

/// |det| of the basis; throws std::domain_error if singular.
Rat lattice_det(const IntLattice& L);

struct MinimalBasis {
  std::vector<RatVec> vectors;       // basis (dim 2: achieves the minima)
  std::vector<Rat> norms;            // linf norms of `vectors`
  std::vector<RatVec> minima_vectors;
  std::vector<Rat> minima;           // exact successive minima
  bool basis_achieves_minima = false;
  double coeff_domination_constant = 2.0;  // |u| <= C ||w|| / lambda_1 in dim 2
};

/// Exact linf successive minima with achieving vectors. In dimension 2 the
/// returned basis attains the minima.
MinimalBasis minimal_basis_linf(const IntLattice& L);
MinimalBasis minimal_basis_of(const LatBasis& B);

/// All dual-lattice vectors with linf norm <= 1 (zero included).
std::vector<RatVec> dual_vectors_in_unit_box(const IntLattice& L, u64 max_points = 80'000'000);

LatBasis dual_basis(const IntLattice& L);

struct SiegelCover {
  std::vector<RatVec> H;  // nonzero elements; filled only when materialized
  Rat t0;
  u64 count = 0;          // #(2 t0 C cap M) minus the zero vector
  Rat max_norm;
  bool shortest_vector_case = false;
  bool materialized = false;
};

/// Covering set H for the slicing lemma: every dual vector in the unit box
/// is orthogonal to a nonzero element of H. H is the set of nonzero lattice
/// points of norm <= 2 t0, where t0 is the least jump of N(t) with
/// N(t) > 1 + 2 k t; if det < k^-k, H is a single shortest vector.
SiegelCover siegel_cover(const IntLattice& L, u64 materialize_cap = 2'000'000);

struct SiegelThreshold {
  Rat t0;
  bool shortest_vector_case = false;
  RatVec shortest{};  // set in the shortest-vector case
};

/// The radius computation of siegel_cover alone (no H enumeration).
SiegelThreshold siegel_threshold(const IntLattice& L);

/// True if u (a dual vector, or any covector) is orthogonal to some nonzero
/// lattice point of norm <= 2 t0. Works without materializing H.
bool siegel_covers(const IntLattice& L, const SiegelCover& cover, const RatVec& u);

/// Binary quadratic form A u^2 + B uv + C v^2 with integer coefficients.
struct QForm {
  i128 A = 0, B = 0, C = 0;

  i128 eval(i128 u, i128 v) const { return A * u * u + B * u * v + C * v * v; }
};

/// Lattices L_1..L_N (N <= 2^Omega(r)) with r | Q(u,v) iff (u,v) lies in
/// their union. Exact; recursive over the prime factorization of r.
std::vector<IntLattice> omega_decompose(const QForm& Q, u64 r);

/// Origin-centred ellipse {(x,y) : a x^2 + b xy + c y^2 <= 1}.
struct Ellipse {
  Rat a, b, c;

  void validate() const;  // positive definite
  double area() const;    // pi / sqrt(ac - b^2/4)
  bool contains(i128 x, i128 y) const;
  static Ellipse disk(const Rat& radius);
};

struct PrimitivePoints {
  u64 count = 0;
  std::vector<std::pair<i64, i64>> points;  // gcd(|x|,|y|) == 1
};

/// Exact list of primitive lattice points inside E (L must be integral).
PrimitivePoints primitive_points(const IntLattice& L, const Ellipse& E);

/// Membership of an integer point in a 2-dim integer lattice.
bool lattice_contains_2d(const IntLattice& L, i128 u, i128 v);

}  // namespace sqf

#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "sqf/arith.hpp"
#include "sqf/int128.hpp"

namespace sqf {

/// A square-full integer n = x^2 * y^3 with y square-free (unique).
struct SquareFullDecomp {
  u64 n = 1;
  u64 x = 1;
  u64 y = 1;
};

/// u + v = w, all square-full.
struct Triple {
  u64 u, v, w;
};

/// Nonzero square-free coefficients, pairwise coprime, not all of one sign.
struct CoeffTriple {
  i64 a1, a2, a3;

  /// Throws std::domain_error if any invariant fails.
  void validate() const;
};

/// A solution of a1 x1^2 y1^3 + a2 x2^2 y2^3 + a3 x3^2 y3^3 = 0 with the
/// side conditions of the normalized counting problem.
struct Solution {
  CoeffTriple coeffs;
  u64 x1, x2, x3;
  u64 y1, y2, y3;

  i128 term(int i) const;  // a_i x_i^2 y_i^3, i in {1,2,3}
  bool satisfies_equation() const;
  bool satisfies_gcd() const;
  bool satisfies_range(u64 B) const;
  bool coeff_y_squarefree() const;
};

/// Half-open dyadic ranges X/2 < x <= X, Y/2 < y <= Y; all powers of two.
struct DyadicBox {
  u64 X1, X2, X3, Y1, Y2, Y3;

  bool contains(const Solution& s) const;
  /// X_i^2 Y_i^3 <= 32 B / |a_i| for all i.
  bool admissible(u64 B, const CoeffTriple& a) const;
};

std::optional<SquareFullDecomp> decompose_squarefull(u64 n);

/// All square-full n <= B, ascending.
std::vector<SquareFullDecomp> enumerate_squarefull(u64 B);

/// Membership structure over the square-full integers <= B.
/// Uses a bitset for B up to 2^30 and binary search on the sorted
/// enumeration beyond that.
class SquareFullSet {
 public:
  explicit SquareFullSet(u64 B);

  bool contains(u64 n) const;
  const std::vector<u64>& values() const { return values_; }
  u64 bound() const { return bound_; }
  bool uses_bitset() const { return !bits_.empty(); }

 private:
  u64 bound_;
  std::vector<u64> values_;
  std::vector<u64> bits_;
};

struct CountResult {
  u64 count = 0;
  std::vector<Triple> witnesses;  // sorted by (w, u); filled only on request
};

/// Ordered pairs (u, v) of square-full integers with u + v = w square-full,
/// w <= B; primitive additionally requires gcd(u, v, w) = 1.
CountResult count_solutions(u64 B, bool primitive, bool collect_witnesses = false,
                            int threads = 1);

/// Counts at several bounds in one pass: result[i] counts triples with
/// w <= thresholds[i]. Thresholds need not be sorted.
std::vector<u64> count_solutions_table(const std::vector<u64>& thresholds, bool primitive,
                                       int threads = 1);

/// Pairs with u <= v instead of ordered pairs.
u64 unordered_count(u64 B, bool primitive, int threads = 1);

/// Factor a triple through h = gcd(u, v, w): u = h a1 x1^2 y1^3 etc., with
/// a_i | h, gcd(a_i, x_i y_i) = 1, a_i y_i square-free, and a3 < 0.
std::pair<u64, Solution> reduce_triple(const Triple& t);

struct NormalizedCount {
  u64 count = 0;
  std::vector<Solution> witnesses;  // sorted by (y1,y2,y3,x1,x2,x3)
};

/// Exact count of Solutions at bound B for the coefficient triple a.
NormalizedCount count_normalized(u64 B, const CoeffTriple& a, bool collect_witnesses = true);

/// Solutions restricted to a dyadic box; the box must be admissible.
u64 box_count(u64 B, const CoeffTriple& a, const DyadicBox& box);

/// The box containing a given solution (componentwise least powers of two).
DyadicBox box_of(const Solution& s);

struct CLocalEstimate {
  u64 count = 0;
  double value = 0.0;  // count / sqrt(B)
};

/// N_x(B)/sqrt(B) for fixed (y1,y2,y3): the number of x-triples completing
/// the y-triple to a Solution, normalized.
CLocalEstimate estimate_c_local(u64 y1, u64 y2, u64 y3, const CoeffTriple& a, u64 B);

}  // namespace sqf

#pragma once

#include <complex>
#include <vector>

#include "sqf/int128.hpp"

namespace sqf {

/// Binary form of degree D; c[i] is the coefficient of X^{D-i} Y^i.
struct BinaryForm {
  std::vector<i128> c;

  int degree() const { return static_cast<int>(c.size()) - 1; }
  i128 eval(i128 x, i128 y) const;
  i128 height() const;
};

/// Integer linear form a*u + b*v.
struct LinForm {
  i64 a = 0, b = 0;
};

/// F = L1^2 M1^3 + L2^2 M2^3 kept with its linear factors, the expanded
/// degree-5 coefficients, the discriminant and the height.
struct QuinticForm {
  LinForm L1, L2, M1, M2;
  BinaryForm F;
  i128 disc = 0;
  i128 height = 0;
};

QuinticForm make_quintic(const LinForm& L1, const LinForm& L2, const LinForm& M1,
                         const LinForm& M2);

/// Resultant of the two partial derivatives; zero iff F has a repeated
/// factor (the Y | F case needs no special treatment in this formulation).
/// Throws std::overflow_error when the value cannot fit in 128 bits.
i128 form_discriminant(const BinaryForm& F);

/// Repeated-factor test via prime images; works for any coefficient size.
bool form_has_repeated_factor(const BinaryForm& F);

/// The discriminant reduced mod p, computed without the full value.
u64 form_discriminant_mod(const BinaryForm& F, u64 p);

/// Exact element of Z[zeta_q]: counts[k] is the coefficient of zeta_q^k.
struct CycloSum {
  u64 q = 1;
  std::vector<i64> counts;

  std::complex<double> approx() const;
  /// Canonical coordinates on the tensor basis of Z[zeta_q] (q square-free
  /// with at most two prime factors); equal sums have equal canonical forms.
  std::vector<i64> canonical() const;
  bool equals(const CycloSum& o) const;
};

/// sum_{m,n mod q} (F(m,n)/q) e_q(mu + nv), exactly. q must be odd,
/// square-free with at most two prime factors, and coprime to disc(F).
CycloSum sigma0(const BinaryForm& F, i64 u, i64 v, u64 q);

/// Product in Z[zeta_{q1 q2}] scaled by sign (for the multiplicativity law).
CycloSum cyclo_product(const CycloSum& x, const CycloSum& y, int sign);

/// #{(x,y) : |x| <= U, |y| <= V, F(x,y) a nonzero perfect square}.
/// Throws if F has a repeated factor.
u64 mu0_count(const BinaryForm& F, u64 U, u64 V);

/// #{x in [-U,U] : f(x) is a perfect square, zero included}; f given by
/// ascending coefficients. Throws if f is a constant multiple of a square.
u64 mu1_count(const std::vector<i128>& f, u64 U);

bool poly_is_const_multiple_of_square(const std::vector<i128>& f);

struct WeilRow {
  u64 p;
  double max_ratio;  // max_{u,v} |Sigma0(u,v;p)| / p
};

/// Ratio table over odd primes p <= prime_bound with p not dividing disc(F).
std::vector<WeilRow> weil_report(const BinaryForm& F, u64 prime_bound);

}  // namespace sqf

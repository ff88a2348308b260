#pragma once

#include <array>
#include <optional>
#include <vector>

#include "sqf/lattice.hpp"
#include "sqf/squarefull.hpp"

namespace sqf {

/// Congruence class (q, kappa): q square-free and coprime to a1 a2,
/// kappa in [0, q) invertible.
struct CongruenceClass {
  u64 q = 1;
  u64 kappa = 0;

  void validate(const CoeffTriple& a) const;
};

/// Point in the (x1, x2, y1, y2) coordinates.
struct Point4 {
  i128 x1, x2, y1, y2;
};

/// kappa with x1 y1 + kappa x2 y2 == 0 mod q, q = y3.
/// Empty when y3 == 1 (degenerate modulus).
std::optional<CongruenceClass> kappa_of(const Solution& s);

struct CongruenceReport {
  bool c1 = false, c2 = false, c3 = false, c4 = false, c5 = false;
  bool all() const { return c1 && c2 && c3 && c4 && c5; }
};

/// Evaluates the congruence system exactly: c1, c2 mod q, c3 mod q^2,
/// c4 mod q^3, and c5: q^3 r^2 | 18(a1 x1^2 y1^3 + a2 x2^2 y2^3) with
/// r = gcd(y1, y2, q).
CongruenceReport verify_congruences(const Point4& p, const CongruenceClass& c,
                                    const CoeffTriple& a);

/// The lattice Lambda(q, kappa) in q^{-3} Z^4, det = 2 q^{-6}.
IntLattice lambda_lattice(const CongruenceClass& c, const CoeffTriple& a);

/// Rank-2 covering lattice in Z^4 whose points satisfy c1-c4.
struct CoverLattice {
  std::array<Vec4, 2> gens;  // coordinates (x1, x2, y1, y2)
  CongruenceClass cls;
  Vec4 t;
  i128 h = 0;
  std::array<i128, 6> quintic{};  // a1 x1(u,v)^2 y1(u,v)^3 + a2 x2(u,v)^2 y2(u,v)^3

  bool quintic_vanishes() const;
  bool contains(const Point4& p) const;
  std::array<i128, 8> canonical_key() const;
};

/// Degenerate branch (t1 t4 == t2 t3): one coordinate pair is pinned and the
/// other is constrained to residue classes mod q^3.
struct S0Item {
  bool x_fixed = true;
  u64 fixed_a = 0, fixed_b = 0;
  std::vector<u64> classes;  // y1 == lambda y2 (x branch) or x1 == s x2 (y branch)
  Vec4 t{};

  bool matches(const Point4& p, u64 q) const;
};

struct CoverResult {
  std::vector<S0Item> s0;
  std::vector<CoverLattice> lattices;
  Rat t0;
  Rat lambda_det;
  u64 t_count = 0;  // t-vectors processed
};

/// The covering pipeline for one class and box: scale Lambda by
/// E = Diag(X1Y1, X1Y2, X2Y1, X2Y2), slice, map the short dual-side vectors
/// back to integer t-vectors, split t1 t4 == t2 t3 into S0 descriptions and
/// refine the lines h y1 = -t2 x1 - t4 x2 by the congruences c1, c3, c4.
/// With `focus` set, only t-vectors orthogonal to the focus point's moment
/// vector (x1y1, x1y2, x2y1, x2y2) are processed; the output is the
/// corresponding subset of the full construction. stop_when_covered
/// additionally ends the t-loop once the focus point lies in the output.
CoverResult extract_cover(const CongruenceClass& c, const CoeffTriple& a, const DyadicBox& box,
                          const std::optional<Point4>& focus = std::nullopt,
                          u64 max_lattices = 200000, bool stop_when_covered = false);

bool cover_contains(const CoverResult& r, const Point4& p, u64 q);

/// Rational linear form in (u, v).
struct RatForm {
  Rat cu, cv;

  Rat eval(const Rat& u, const Rat& v) const { return cu * u + cv * v; }
};

struct ExceptionalWitness {
  Rat g, nu;
};

/// Decides whether L1 = nu(4 M1 - 5 g^2 M2) and L2 = nu g^3 (5 M1 - 4 g^2 M2)
/// for nonzero rationals g, nu. M1, M2 must be independent.
std::optional<ExceptionalWitness> detect_exceptional(const RatForm& L1, const RatForm& L2,
                                                     const RatForm& M1, const RatForm& M2);

/// Checks the witness line identities and the exact factorization
/// F = nu^2 (4 M1^2 - 7 g^2 M1 M2 + 4 g^4 M2^2)^2 (M1 + g^2 M2).
bool exceptional_factor_check(const ExceptionalWitness& w, const RatForm& L1, const RatForm& L2,
                              const RatForm& M1, const RatForm& M2);

struct AwkwardWitness {
  i64 x1, x2, y1, y2;
};

/// Searches for an integer vector with a2 x1 == kappa^3 a1 x2 mod q,
/// a1 x1^2 y1^3 + a2 x2^2 y2^3 = 0, (x1,x2) != 0 != (y1,y2), and
/// ||D^{-1} v||_inf <= R with D = Diag(X1, X2, Y1, Y2). Uses the cube
/// parametrization a2 x1 = j u1^3, a1 x2 = j u2^3.
std::optional<AwkwardWitness> check_awkward(const CongruenceClass& c, const CoeffTriple& a,
                                            const DyadicBox& box, const Rat& R);

/// Roots modulo q^3 for square-free q, lifted prime by prime and combined.
std::vector<u64> cube_roots_mod_q3(u64 cvalue, u64 q);
std::vector<u64> square_roots_mod_q3(u64 cvalue, u64 q);

}  // namespace sqf

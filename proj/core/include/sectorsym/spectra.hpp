#pragma once

#include <string>
#include <utility>
#include <vector>

#include "sectorsym/nonlinearity.hpp"
#include "sectorsym/operators.hpp"

namespace sectorsym {

// Which invariant subspace an eigenproblem is restricted to.
struct Subspace {
  enum class Kind { Full, KInvariant, Sector };
  Kind kind = Kind::Full;
  int k = 1;  // meaningful for KInvariant

  static Subspace full() { return {}; }
  static Subspace k_invariant(int k) { return {Kind::KInvariant, k}; }
  static Subspace sector() { return {Kind::Sector, 1}; }
};

std::string to_string(const Subspace& s);

struct SpectrumResult {
  std::vector<double> eigenvalues;  // ascending
  std::vector<Field> eigenfields;   // scattered onto the full grid shape,
                                    // mass-orthonormal, deterministic sign
  Subspace subspace;
  double zero_tol = 0.0;
};

// Counts of eigenvalues below -zero_tol and within [-zero_tol, zero_tol].
struct MorseCount {
  int negative = 0;
  int marginal = 0;
  double zero_tol = 0.0;
};

// Number of pencil eigenvalues of (A, diag(mass)) strictly below tau,
// counted exactly by factorization inertia (no iteration).
int eigenvalue_count_below(const OperatorMatrix& op, double tau);

// The m smallest eigenvalues of the pencil (op.A, diag(op.mass)), restricted
// to the requested subspace.
//  - Full: op must be whole-domain.
//  - KInvariant(k): op must be whole-domain with a k-invariant potential;
//    the problem is folded onto one angular wedge and eigenfields are lifted
//    back (exactly k-invariant).
//  - Sector: op is already masked; eigenfields are scattered as zero outside.
// Every returned pair satisfies |A v - lambda M v| / |M v| < 1e-8; fields
// are mutually M-orthonormal; each field's largest-magnitude entry is made
// positive (first such index on ties), so the ground mode of a sector
// problem has nonnegative interior values.
SpectrumResult smallest_eigs(const PolarGrid& g, const OperatorMatrix& op, int m,
                             const Subspace& sub);

// Default tolerance band around zero for index counting, based on the
// potential scale: 1e-3 * max(1, |V|_inf).
double default_zero_tol(const Field& V);

// Morse index of the linearized operator  -Lap - f'(|x|, u)  in the
// k-invariant subspace (k = 1 means the full space): eigenvalues below
// -zero_tol, with the band count reported separately as marginal.
// zero_tol <= 0 selects default_zero_tol.  Requires u k-invariant.
MorseCount morse_index(const PolarGrid& g, const Field& u, const Nonlinearity& nl,
                       int k, double zero_tol = 0.0);

// Smallest eigenvalue of the linearized operator on a half-sector, with its
// eigenfunction normalized to unit mass norm and nonnegative interior sign.
std::pair<double, Field> sector_lambda1(const PolarGrid& g, const Field& u,
                                        const Nonlinearity& nl,
                                        const SectorSpec& spec);

}  // namespace sectorsym

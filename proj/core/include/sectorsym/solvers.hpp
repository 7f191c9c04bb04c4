#pragma once

#include <string>
#include <vector>

#include "sectorsym/grid.hpp"
#include "sectorsym/nonlinearity.hpp"
#include "sectorsym/radial.hpp"

namespace sectorsym {

struct SolveResult {
  Field u;
  double energy = 0.0;
  double residual = 0.0;  // pointwise PDE residual, inf norm
  int iterations = 0;
  // Relative Nehari identities at the returned solution: one entry for
  // positive mode, two (each sign part) for nodal mode, empty otherwise.
  std::vector<double> constraint_residuals;
  std::string provenance;
  std::vector<double> energy_trace;  // accepted descent steps (minimization)
};

// E(u) = 1/2 Int |grad u|^2 - Int F(|x|, u), by the mass-weighted quadratic
// form and the trapezoid-free cell quadrature; both reductions are
// order-invariant, so the value commutes with grid rotations.
double energy(const PolarGrid& g, const Nonlinearity& nl, const Field& u);

// Pointwise residual field  -Lap u - f(|x|, u)  in difference form.
Field pde_residual(const PolarGrid& g, const Nonlinearity& nl, const Field& u);

// Damped Newton for  -Lap u = f(|x|, u)  in the k-invariant subspace.
// Iterates are re-projected every step; all reductions are order-invariant
// and the linear solver is stationary-preconditioned, so the entire solve
// commutes bit-for-bit with grid rotations of the initial field.
// Success when the pointwise residual inf-norm drops below tol.
SolveResult newton_solve(const PolarGrid& g, const Nonlinearity& nl,
                         const Field& init, int k, double tol = 1e-10);

enum class NehariMode { Positive, Nodal };

// Least-energy solution on the (nodal) Nehari set in the k-invariant
// subspace: closed-form ray rescaling onto the constraint, descent along the
// (-Lap + 1)-preconditioned negative gradient with Armijo backtracking,
// finished by newton_solve to newton_tol.  Homogeneous kinds only.  On fine
// grids the rotational near-zero mode limits the attainable polish; callers
// can pass a looser newton_tol there.
SolveResult nehari_minimize(const PolarGrid& g, const Nonlinearity& nl, int k,
                            const Field& seed, NehariMode mode,
                            double newton_tol = 1e-10);

// Deterministic seeds: "radial" (lifted 1D profile), "cos-mode" (radial
// profile times 1 + 0.1 cos(k theta)), "peaks" (k mid-radius bumps; nodal
// mode uses 2k alternating-sign bumps so the seed stays k-invariant).
Field make_named_seed(const PolarGrid& g, const Nonlinearity& nl,
                      const std::string& name, int k, NehariMode mode);

struct Distinctness {
  bool distinct = false;
  double rotation_distance = 0.0;  // min over grid rotations, relative L2
  double energy_gap = 0.0;         // relative
  int best_rotation = 0;           // spokes achieving the minimum
};

// Solutions are the same up to rotation when the best rotational alignment
// is within 1e-3 relative L2 and energies agree within 1e-6 relative.
Distinctness distinctness(const PolarGrid& g, const SolveResult& a,
                          const SolveResult& b);

}  // namespace sectorsym

#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "sectorsym/geometry.hpp"
#include "sectorsym/grid.hpp"

namespace sectorsym {

// Mass-weighted symmetric form of a second-order operator restricted to a
// node mask.  The generalized pair (A, diag(mass)) represents the operator:
// eigenvalues of  A v = lambda * diag(mass) v  approximate the continuum
// Dirichlet eigenvalues on the masked region.
struct OperatorMatrix {
  NodeMask mask;
  Eigen::SparseMatrix<double> A;  // count x count, symmetric
  Eigen::VectorXd mass;           // count entries, node quadrature weights

  int n() const { return static_cast<int>(mass.size()); }
};

// Minus-Laplacian with homogeneous Dirichlet walls on the masked region.
// Curved walls (inner/outer radius) sit on cell faces and use half-cell
// one-sided fluxes; straight sector edges use excluded node rays (axis on
// grid rays) or mirror-image diagonal bumps (axis between rays).  Both are
// second-order accurate.  Off-diagonal entries are nonpositive.
OperatorMatrix build_laplacian(const PolarGrid& g, const NodeMask& mask);

// Returns a copy with A replaced by A - diag(mass) * diag(V on mask):
// the mass-weighted form of  -Lap - V.
OperatorMatrix with_potential(const OperatorMatrix& op, const Field& V);

// v^T A v.
double quad_form(const OperatorMatrix& op, const Eigen::VectorXd& v);

// Matrix-free difference-form application of  -Lap u  (potential == nullptr)
// or  (-Lap - diag(V)) u  on the whole grid with Dirichlet walls.  Every
// node accumulates its stencil terms as coefficient * (u_node - u_neighbor)
// in one fixed slot order, so the result commutes bitwise with grid
// rotations and axis reflections of the input.  With mass_weighted the
// result is multiplied by the node quadrature weight (symmetric form).
Field apply_operator(const PolarGrid& g, const Field& u, const Field* V,
                     bool mass_weighted);

// Diagonal of the operator applied by apply_operator (same weighting).
Eigen::VectorXd operator_diagonal(const PolarGrid& g, const Field* V,
                                  bool mass_weighted);

// Independent higher-order evaluation of  -Lap u  using centered five-point
// stencils in each coordinate (fourth order in the interior).  Only rings
// 2 .. n_r-3 are evaluated; on a disk, rings 0 and 1 are also evaluated by
// indexing through the center (radius -r at angle theta reads radius r at
// angle theta+pi).  Unevaluated rings are filled with NaN.
Field high_order_neg_laplacian(const PolarGrid& g, const Field& u);

// Centered second-order angular derivative du/dtheta (periodic).
Field angular_derivative(const PolarGrid& g, const Field& u);

// Orbit average over rotations by 2*pi/k.  Each orbit is summed in
// value-sorted order, so the output is exactly k-fold rotation invariant in
// floating point and the projection commutes bitwise with grid rotations.
// Requires n_theta divisible by k.
Field project_k_invariant(const PolarGrid& g, const Field& u, int k);

// Max-norm of u - project_k_invariant(u).
double k_invariance_defect(const PolarGrid& g, const Field& u, int k);

}  // namespace sectorsym

#pragma once

#include <Eigen/Dense>

#include "sectorsym/grid.hpp"
#include "sectorsym/nonlinearity.hpp"

namespace sectorsym {

// One-dimensional radial Dirichlet solution sampled on the staggered cell
// centers (the same radial discretization the 2D grid uses, so a lifted
// profile is a discrete 2D solution up to the 1D/2D quadrature identity).
struct RadialProfile {
  DomainSpec domain;
  int n_r = 0;
  Eigen::VectorXd r;  // cell centers
  Eigen::VectorXd u;  // profile values
  double residual = 0.0;  // final 1D finite-difference residual (inf norm)
  double param = 0.0;     // shooting parameter: center value (disk) or
                          // inner-wall slope (ring domains)
  int zeros = 0;          // prescribed interior sign changes
};

// Radial solution with a prescribed number of interior zeros (0 = positive
// solution, n = nodal with n sign changes).  Power kinds are solved by
// shooting with bisection on the initial value/slope, then polished by a
// damped 1D Newton iteration on the staggered grid to residual < 1e-10.
// The exponential kind (Gelfand) is reached by Newton continuation from the
// zero branch and supports zeros == 0 only.  SinhPoisson is rejected: from
// the zero branch the continuation stays trivial, and no scaling-based
// shooting target exists (ConfigError).
RadialProfile solve_radial(const DomainSpec& domain, const Nonlinearity& nl,
                           int zeros, int n_r);

// Lift onto a 2D grid: every spoke carries the same profile bit-for-bit.
Field lift_radial(const PolarGrid& g, const RadialProfile& prof);

}  // namespace sectorsym

#pragma once

#include <string>
#include <utility>

#include "sectorsym/geometry.hpp"
#include "sectorsym/grid.hpp"

namespace sectorsym {

enum class NonlinKind { LaneEmden, Henon, Gelfand, SinhPoisson };

std::string to_string(NonlinKind k);
NonlinKind nonlin_kind_from_string(const std::string& s);

// Right-hand side f(r, s) of  -Lap u = f(|x|, u):
//   LaneEmden:   |s|^(p-1) s
//   Henon:       r^alpha |s|^(p-1) s
//   Gelfand:     lambda r^alpha e^s
//   SinhPoisson: eps r^alpha (e^s - e^{-s})
struct Nonlinearity {
  NonlinKind kind = NonlinKind::LaneEmden;
  double p = 3.0;       // superlinear exponent (power kinds), p > 1
  double alpha = 0.0;   // radial weight exponent, alpha >= 0
  double lambda = 1.0;  // amplitude (Gelfand), lambda > 0
  double eps = 1.0;     // amplitude (SinhPoisson), eps > 0

  void validate() const;  // throws ConfigError

  double f(double r, double s) const;
  double fp(double r, double s) const;  // d f / d s
  double F(double r, double s) const;   // primitive in s with F(r, 0) = 0

  // Power kinds scale as f(r, t s) = t^p f(r, s): a closed-form ray
  // rescaling onto the constraint manifold exists for them.
  bool homogeneous() const {
    return kind == NonlinKind::LaneEmden || kind == NonlinKind::Henon;
  }
  // f(r, .) convex in s on the relevant range: Gelfand globally, the odd
  // kinds on s >= 0 only.
  bool f_convex() const;
  // f'(r, .) convex in s (secant-slope potential below endpoint-average
  // potential).  Power kinds need p >= 2.
  bool fp_convex() const;
};

Nonlinearity make_lane_emden(double p);
Nonlinearity make_henon(double p, double alpha);
Nonlinearity make_gelfand(double lambda, double alpha);
Nonlinearity make_sinh_poisson(double eps, double alpha);

// Nodewise evaluation over a grid, r taken from the node ring.
Field eval_f(const PolarGrid& g, const Nonlinearity& nl, const Field& u);
Field eval_fp(const PolarGrid& g, const Nonlinearity& nl, const Field& u);
Field eval_F(const PolarGrid& g, const Nonlinearity& nl, const Field& u);

// Potentials comparing u with its reflection across the axis e, nodewise
// with a = u(x), b = u(reflected x):
// first:  V_e  = secant slope (f(r,b) - f(r,a)) / (b - a), the average of
//         f' along the segment; closed form, switching to a symmetric
//         16-point Gauss quadrature of f' when a and b nearly coincide.
// second: V_es = endpoint average (f'(r,a) + f'(r,b)) / 2.
// Both fields are bitwise invariant under the reflection.
std::pair<Field, Field> comparison_potentials(const PolarGrid& g,
                                              const Nonlinearity& nl,
                                              const Field& u, const Direction& e);

}  // namespace sectorsym

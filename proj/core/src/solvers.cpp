#include "sectorsym/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <utility>

#include "sectorsym/errors.hpp"
#include "sectorsym/operators.hpp"
#include "sectorsym/stable_sum.hpp"

namespace sectorsym {

namespace {

// std::to_string renders small magnitudes as "0.000000"; diagnostics need
// scientific notation.
std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

}  // namespace

namespace {

using Vec = Eigen::VectorXd;

// Multiply a node vector by the quadrature weight of its ring.
Vec ring_weighted(const PolarGrid& g, const Vec& x) {
  Vec out(x.size());
  for (int i = 0; i < g.n_r; ++i) {
    const double w = g.weight(i);
    for (int j = 0; j < g.n_theta; ++j) {
      const int n = i * g.n_theta + j;
      out[n] = w * x[n];
    }
  }
  return out;
}

// ----- rotation-equivariant linear solver ---------------------------------
//
// MINRES on the Jacobi-scaled mass-weighted system
//   (D^{-1/2} (A - M diag(V)) D^{-1/2}) xhat = D^{-1/2} b,   x = D^{-1/2} xhat,
// with D = |operator diagonal|.  The operator application uses the
// difference-form stencil and every reduction is order-invariant, so the
// returned vector commutes bitwise with grid rotations of (V, b).

struct LinearOutcome {
  Vec x;
  double rel = 0.0;  // final relative residual of the scaled system
  int iters = 0;
  bool breakdown = false;
};

LinearOutcome minres_weighted(const PolarGrid& g, const Field* V, const Vec& b,
                              double rtol, int maxit) {
  const int n = g.size();
  Vec d = operator_diagonal(g, V, true).cwiseAbs();
  const double dmax = d.maxCoeff();
  for (int i = 0; i < n; ++i) d[i] = std::max(d[i], 1e-14 * dmax);
  const Vec isq = d.cwiseSqrt().cwiseInverse();

  const auto apply_hat = [&](const Vec& xhat) {
    Field t(g.n_r, g.n_theta);
    t.v = isq.cwiseProduct(xhat);
    const Field At = apply_operator(g, t, V, true);
    return Vec(isq.cwiseProduct(At.v));
  };

  LinearOutcome out;
  out.x = Vec::Zero(n);
  const Vec bhat = isq.cwiseProduct(b);
  const double beta1 = std::sqrt(std::max(stable_dot(bhat, bhat), 0.0));
  if (beta1 == 0.0) return out;

  Vec v_prev = Vec::Zero(n), v = bhat / beta1;
  Vec dir_prev = Vec::Zero(n), dir_pprev = Vec::Zero(n);
  Vec xhat = Vec::Zero(n);
  double beta = 0.0;  // off-diagonal linking v_{k-1}, v_k
  double c_prev = 1.0, s_prev = 0.0, c_pprev = 1.0, s_pprev = 0.0;
  double phibar = beta1;

  for (int k = 1; k <= maxit; ++k) {
    Vec w = apply_hat(v);
    const double alpha = stable_dot(w, v);
    w -= alpha * v;
    if (beta != 0.0) w -= beta * v_prev;
    const double beta_next = std::sqrt(std::max(stable_dot(w, w), 0.0));

    // Fold the new tridiagonal column through the stored Givens rotations.
    const double eps_k = s_pprev * beta;
    const double deltilde = c_pprev * beta;
    const double delta_k = c_prev * deltilde + s_prev * alpha;
    const double gamtilde = -s_prev * deltilde + c_prev * alpha;
    const double gamma_k = std::hypot(gamtilde, beta_next);
    if (!(gamma_k > 1e-300 * std::max(1.0, std::abs(alpha)))) {
      out.breakdown = true;
      break;
    }
    const double c_k = gamtilde / gamma_k;
    const double s_k = beta_next / gamma_k;
    const double phi_k = c_k * phibar;
    phibar = -s_k * phibar;

    Vec dir = (v - delta_k * dir_prev - eps_k * dir_pprev) / gamma_k;
    xhat += phi_k * dir;
    dir_pprev.swap(dir_prev);
    dir_prev = std::move(dir);

    out.iters = k;
    if (std::abs(phibar) <= rtol * beta1) break;
    if (beta_next < 1e-300) break;  // Krylov space exhausted

    v_prev = v;
    v = w / beta_next;
    beta = beta_next;
    c_pprev = c_prev;
    s_pprev = s_prev;
    c_prev = c_k;
    s_prev = s_k;
  }
  out.rel = std::abs(phibar) / beta1;
  out.x = isq.cwiseProduct(xhat);
  return out;
}

double inf_norm(const Field& f) { return f.v.lpNorm<Eigen::Infinity>(); }

// <u, A u> with the mass-weighted difference-form operator.
double quad_energy(const PolarGrid& g, const Field& u) {
  const Field Au = apply_operator(g, u, nullptr, true);
  return stable_dot(u.v, Au.v);
}

// <u, M f(u)> = Int r^alpha |u|^{p+1} for power kinds.
double pairing(const PolarGrid& g, const Nonlinearity& nl, const Field& u) {
  const Field fu = eval_f(g, nl, u);
  return stable_dot3(g.weights(), u.v, fu.v);
}

Field positive_part(const Field& u) {
  Field out(u.n_r, u.n_theta);
  out.v = u.v.cwiseMax(0.0);
  return out;
}

Field negative_part(const Field& u) {  // nonnegative: max(-u, 0)
  Field out(u.n_r, u.n_theta);
  out.v = (-u.v).cwiseMax(0.0);
  return out;
}

}  // namespace

double energy(const PolarGrid& g, const Nonlinearity& nl, const Field& u) {
  const double quad = 0.5 * quad_energy(g, u);
  const Field Fu = eval_F(g, nl, u);
  return quad - integrate(g, Fu);
}

Field pde_residual(const PolarGrid& g, const Nonlinearity& nl, const Field& u) {
  Field out = apply_operator(g, u, nullptr, false);
  const Field fu = eval_f(g, nl, u);
  out.v -= fu.v;
  return out;
}

SolveResult newton_solve(const PolarGrid& g, const Nonlinearity& nl,
                         const Field& init, int k, double tol) {
  if (init.n_r != g.n_r || init.n_theta != g.n_theta)
    throw MaskMismatch("newton_solve: initial field shape mismatch");
  if (!init.v.allFinite())
    throw ConfigError("newton_solve: initial field has non-finite entries");

  Field u = project_k_invariant(g, init, k);
  Field F = pde_residual(g, nl, u);
  double fn = inf_norm(F);
  const double fn_first = std::max(fn, std::numeric_limits<double>::min());

  // Roundoff floor of the residual evaluation: the stencil cancels terms of
  // size diag * |u| down to the f scale, so no iterate can be certified
  // below a small multiple of that cancellation noise.
  const double diag_max =
      operator_diagonal(g, nullptr, false).lpNorm<Eigen::Infinity>();
  const auto eval_floor = [&](const Field& w) {
    return 64.0 * std::numeric_limits<double>::epsilon() * diag_max *
           inf_norm(w);
  };

  int iter = 0;
  constexpr int kMaxIter = 60;
  while (fn >= tol) {
    if (iter >= kMaxIter)
      throw Diverged("newton_solve: residual " + sci(fn) +
                     " after " + std::to_string(kMaxIter) + " iterations");

    const Field V = eval_fp(g, nl, u);
    Vec rhs = ring_weighted(g, F.v);
    rhs = -rhs;
    // Inexact Newton forcing: loose early, sharp near the solution.
    const double ratio = std::min(fn / fn_first, 1.0);
    const double rtol = std::clamp(1e-2 * std::pow(ratio, 1.5), 1e-9, 1e-2);
    const LinearOutcome lin = minres_weighted(g, &V, rhs, rtol, 3000);
    // Accept any solve that met (a modest multiple of) its forcing target;
    // a hard stall far above it means the Jacobian is numerically singular.
    if (lin.breakdown || lin.rel > std::max(10.0 * rtol, 1e-3))
      throw SingularJacobian(
          "newton_solve: inner linear solve stalled (relative residual " +
          sci(lin.rel) + "), possible bifurcation point");

    Field step(g.n_r, g.n_theta);
    step.v = lin.x;
    step = project_k_invariant(g, step, k);

    double t = 1.0;
    bool accepted = false;
    for (int half = 0; half < 30; ++half, t *= 0.5) {
      Field cand(g.n_r, g.n_theta);
      cand.v = u.v + t * step.v;
      cand = project_k_invariant(g, cand, k);
      Field Fc;
      try {
        Fc = pde_residual(g, nl, cand);
      } catch (const Overflow&) {
        continue;  // absurd step for an exponential kind; shrink
      }
      const double fc = inf_norm(Fc);
      if (fc < (1.0 - 1e-4 * t) * fn) {
        u = std::move(cand);
        F = std::move(Fc);
        fn = fc;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      if (fn <= eval_floor(u)) break;  // at double-precision resolution
      throw Diverged("newton_solve: line search failed 30 times at residual " +
                     sci(fn));
    }
    ++iter;
  }

  SolveResult res;
  res.u = std::move(u);
  res.energy = energy(g, nl, res.u);
  res.residual = fn;
  res.iterations = iter;
  res.provenance = "newton(k=" + std::to_string(k) + ")";
  return res;
}

namespace {

// Closed-form ray rescaling onto the Nehari constraint; throws CollapsedSign
// when a required sign part carries no quadratic mass.
void nehari_rescale(const PolarGrid& g, const Nonlinearity& nl, NehariMode mode,
                    Field& u) {
  const double pw = 1.0 / (nl.p - 1.0);
  if (mode == NehariMode::Positive) {
    const double qf = pairing(g, nl, u);
    const double qa = quad_energy(g, u);
    if (!(qf > 0.0) || !(qa > 0.0))
      throw CollapsedSign("nehari_minimize: field vanished during rescaling");
    u.v *= std::pow(qa / qf, pw);
    return;
  }
  const Field up = positive_part(u);
  const Field um = negative_part(u);
  const double sup = inf_norm(u);
  if (inf_norm(up) < 1e-14 * sup || inf_norm(um) < 1e-14 * sup)
    throw CollapsedSign("nehari_minimize: a sign part vanished during descent");
  const double qap = quad_energy(g, up), qfp = pairing(g, nl, up);
  const double qam = quad_energy(g, um), qfm = pairing(g, nl, um);
  if (!(qap > 0.0) || !(qfp > 0.0) || !(qam > 0.0) || !(qfm > 0.0))
    throw CollapsedSign("nehari_minimize: degenerate sign part during descent");
  const double tp = std::pow(qap / qfp, pw);
  const double tm = std::pow(qam / qfm, pw);
  u.v = tp * up.v - tm * um.v;
}

}  // namespace

SolveResult nehari_minimize(const PolarGrid& g, const Nonlinearity& nl, int k,
                            const Field& seed, NehariMode mode,
                            double newton_tol) {
  if (!nl.homogeneous())
    throw ConfigError(
        "nehari_minimize: requires a homogeneous kind (LaneEmden or Henon)");
  if (seed.n_r != g.n_r || seed.n_theta != g.n_theta)
    throw MaskMismatch("nehari_minimize: seed shape mismatch");

  Field u = project_k_invariant(g, seed, k);
  nehari_rescale(g, nl, mode, u);
  double E = energy(g, nl, u);
  std::vector<double> trace{E};

  // Potential -1 turns the weighted operator into A + M: the descent
  // preconditioner (a discrete -Lap + 1 solve at loose tolerance).
  Field minus_one(g.n_r, g.n_theta);
  minus_one.v.setConstant(-1.0);

  constexpr int kMaxDescent = 600;
  for (int it = 0; it < kMaxDescent; ++it) {
    const Field Au = apply_operator(g, u, nullptr, true);
    const Field fu = eval_f(g, nl, u);
    Vec R = Au.v - ring_weighted(g, fu.v);  // weighted-form energy gradient

    const LinearOutcome lin = minres_weighted(g, &minus_one, R, 1e-4, 400);
    Field h(g.n_r, g.n_theta);
    h.v = lin.x;
    h = project_k_invariant(g, h, k);
    const double gdot = stable_dot(R, h.v);
    if (!(gdot > 1e-14 * std::max(1.0, std::abs(E)))) break;  // flat

    double t = 1.0;
    bool accepted = false;
    for (int half = 0; half < 30; ++half, t *= 0.5) {
      Field cand(g.n_r, g.n_theta);
      cand.v = u.v - t * h.v;
      cand = project_k_invariant(g, cand, k);
      try {
        nehari_rescale(g, nl, mode, cand);
      } catch (const CollapsedSign&) {
        continue;  // step overshot a sign part; shrink
      }
      const double Ec = energy(g, nl, cand);
      if (Ec <= E - 1e-4 * t * gdot) {
        u = std::move(cand);
        E = Ec;
        trace.push_back(Ec);
        accepted = true;
        break;
      }
    }
    if (!accepted) break;  // descent plateau: hand over to Newton
  }

  SolveResult res = newton_solve(g, nl, u, k, newton_tol);
  if (mode == NehariMode::Nodal) {
    const double sup = inf_norm(res.u);
    if (res.u.v.maxCoeff() < 1e-8 * sup || -res.u.v.minCoeff() < 1e-8 * sup)
      throw CollapsedSign(
          "nehari_minimize: nodal descent converged to a one-signed solution");
  }

  // Constraint residuals at the converged solution, via the mixed pairing
  // <part, A u - M f(u)> which vanishes identically at a discrete solution.
  const Field Au = apply_operator(g, res.u, nullptr, true);
  const Field fu = eval_f(g, nl, res.u);
  const Vec R = Au.v - ring_weighted(g, fu.v);
  if (mode == NehariMode::Positive) {
    const double qa = quad_energy(g, res.u);
    res.constraint_residuals = {std::abs(stable_dot(res.u.v, R)) / qa};
  } else {
    const Field up = positive_part(res.u);
    const Field um = negative_part(res.u);
    res.constraint_residuals = {
        std::abs(stable_dot(up.v, R)) / quad_energy(g, up),
        std::abs(stable_dot(um.v, R)) / quad_energy(g, um)};
  }
  res.energy_trace = std::move(trace);
  res.energy_trace.push_back(res.energy);
  res.provenance = std::string("nehari(") +
                   (mode == NehariMode::Positive ? "positive" : "nodal") +
                   ",k=" + std::to_string(k) + ")";
  return res;
}

Field make_named_seed(const PolarGrid& g, const Nonlinearity& nl,
                      const std::string& name, int k, NehariMode mode) {
  if (k < 1 || g.n_theta % k != 0)
    throw IncompatibleSymmetry("seeds: n_theta=" + std::to_string(g.n_theta) +
                               " not divisible by k=" + std::to_string(k));
  const int zeros = mode == NehariMode::Nodal ? 1 : 0;
  if (name == "radial")
    return lift_radial(g, solve_radial(g.domain, nl, zeros, g.n_r));
  if (name == "cos-mode") {
    Field f = lift_radial(g, solve_radial(g.domain, nl, zeros, g.n_r));
    for (int i = 0; i < g.n_r; ++i)
      for (int j = 0; j < g.n_theta; ++j)
        f.at(i, j) *= 1.0 + 0.1 * std::cos(k * g.theta(j));
    return project_k_invariant(g, f, k);
  }
  if (name == "peaks") {
    // Gaussian bumps on the mid-radius circle: k positive bumps, or 2k
    // alternating-sign bumps in nodal mode (the alternation then has period
    // 2 pi / k, keeping the seed k-invariant).
    const int m = mode == NehariMode::Nodal ? 2 * k : k;
    const double rho = 0.5 * (g.domain.r_inner + g.domain.r_outer);
    // Neighbor spacing on the bump circle; a single bump has no neighbor and
    // uses the diameter instead.
    const double chord = m == 1 ? 2.0 * rho : 2.0 * rho * std::sin(M_PI / m);
    const double sigma =
        0.35 * std::min(g.domain.r_outer - g.domain.r_inner, chord);
    Field f(g);
    for (int i = 0; i < g.n_r; ++i) {
      const double r = g.r[i];
      for (int j = 0; j < g.n_theta; ++j) {
        const double th = g.theta(j);
        double val = 0.0;
        for (int b = 0; b < m; ++b) {
          const double thb = 2.0 * M_PI * b / m;
          const double d2 = r * r + rho * rho - 2.0 * r * rho * std::cos(th - thb);
          const double bump = std::exp(-d2 / (2.0 * sigma * sigma));
          val += (mode == NehariMode::Nodal && b % 2 == 1) ? -bump : bump;
        }
        f.at(i, j) = val;
      }
    }
    return project_k_invariant(g, f, k);
  }
  throw ConfigError("seeds: unknown named seed \"" + name +
                    "\" (expected radial, cos-mode, or peaks)");
}

Distinctness distinctness(const PolarGrid& g, const SolveResult& a,
                          const SolveResult& b) {
  if (!a.u.same_shape(b.u))
    throw MaskMismatch("distinctness: fields live on different grids");
  Distinctness out;
  const Vec w = g.weights();
  const double den = std::sqrt(stable_dot3(w, b.u.v, b.u.v));
  double best = std::numeric_limits<double>::infinity();
  int best_shift = 0;
  for (int s = 0; s < g.n_theta; ++s) {
    double acc = 0.0;
    for (int i = 0; i < g.n_r; ++i) {
      const double wi = g.weight(i);
      for (int j = 0; j < g.n_theta; ++j) {
        const double diff = a.u.at(i, j + s) - b.u.at(i, j);
        acc += wi * diff * diff;
      }
    }
    const double dist = std::sqrt(acc) / den;
    if (dist < best) {
      best = dist;
      best_shift = s;
    }
  }
  out.rotation_distance = best;
  out.best_rotation = best_shift;
  out.energy_gap = std::abs(a.energy - b.energy) /
                   std::max(std::abs(b.energy), 1e-300);
  out.distinct = out.rotation_distance > 1e-3 || out.energy_gap > 1e-6;
  return out;
}

}  // namespace sectorsym

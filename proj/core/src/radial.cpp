#include "sectorsym/radial.hpp"

#include <Eigen/SparseLU>
#include <algorithm>
#include <cstdio>
#include <cmath>
#include <limits>
#include <vector>

#include "sectorsym/errors.hpp"

namespace sectorsym {

namespace {

// std::to_string renders small magnitudes as "0.000000"; diagnostics need
// scientific notation.
std::string sci1d(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

}  // namespace

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// ----- shooting -----------------------------------------------------------

// Integrates u'' + u'/r + f(r, u) = 0 outward by fixed-step RK4 and records
// interior zero positions (linear interpolation between steps).
struct ShotResult {
  std::vector<double> zeros;      // ascending positions of sign changes
  std::vector<double> r_samples;  // trajectory for seeding the 1D Newton
  std::vector<double> u_samples;
};

ShotResult integrate(const Nonlinearity& nl, double r0, double u0, double v0,
                     double r_end, int steps) {
  ShotResult out;
  out.r_samples.reserve(steps + 1);
  out.u_samples.reserve(steps + 1);
  const double h = (r_end - r0) / steps;
  double r = r0, u = u0, v = v0;
  out.r_samples.push_back(r);
  out.u_samples.push_back(u);
  const auto du = [](double vv) { return vv; };
  const auto dv = [&nl](double rr, double uu, double vv) {
    return -nl.f(rr, uu) - vv / rr;
  };
  for (int s = 0; s < steps; ++s) {
    const double k1u = du(v), k1v = dv(r, u, v);
    const double k2u = du(v + 0.5 * h * k1v),
                 k2v = dv(r + 0.5 * h, u + 0.5 * h * k1u, v + 0.5 * h * k1v);
    const double k3u = du(v + 0.5 * h * k2v),
                 k3v = dv(r + 0.5 * h, u + 0.5 * h * k2u, v + 0.5 * h * k2v);
    const double k4u = du(v + h * k3v),
                 k4v = dv(r + h, u + h * k3u, v + h * k3v);
    const double u_next = u + h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
    const double v_next = v + h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    const double r_next = r + h;
    if ((u > 0.0 && u_next <= 0.0) || (u < 0.0 && u_next >= 0.0)) {
      const double t = u / (u - u_next);
      out.zeros.push_back(r + t * h);
    }
    u = u_next;
    v = v_next;
    r = r_next;
    out.r_samples.push_back(r);
    out.u_samples.push_back(u);
    if (!std::isfinite(u) || std::abs(u) > 1e12) break;  // blow-up: stop early
  }
  return out;
}

// Position of the (zeros+1)-th interior zero, +inf when the shot has fewer.
double target_zero(const ShotResult& shot, int zeros) {
  if (static_cast<int>(shot.zeros.size()) <= zeros) return kInf;
  return shot.zeros[zeros];
}

// ----- 1D staggered-grid Newton polish ------------------------------------

Eigen::VectorXd cell_centers(const DomainSpec& dom, int n_r, double* dr_out) {
  const double dr = (dom.r_outer - dom.r_inner) / n_r;
  Eigen::VectorXd r(n_r);
  for (int i = 0; i < n_r; ++i) r[i] = dom.r_inner + (i + 0.5) * dr;
  if (dr_out != nullptr) *dr_out = dr;
  return r;
}

// Unweighted 1D difference-form operator: row i of  -(u'' + u'/r)  on the
// staggered radial grid with half-cell Dirichlet walls; identical to the 2D
// stencil with the angular terms removed.
Eigen::SparseMatrix<double> radial_operator(const DomainSpec& dom, int n_r) {
  double dr = 0.0;
  const Eigen::VectorXd r = cell_centers(dom, n_r, &dr);
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(3 * n_r);
  for (int i = 0; i < n_r; ++i) {
    const double inv = 1.0 / (r[i] * dr * dr);
    const double face_in = dom.r_inner + i * dr;
    const double face_out = dom.r_inner + (i + 1) * dr;
    double diag = 0.0;
    if (i > 0) {
      const double T = face_in * inv;
      diag += T;
      trips.emplace_back(i, i - 1, -T);
    } else if (dom.has_inner_wall()) {
      diag += 2.0 * face_in * inv;
    }
    if (i < n_r - 1) {
      const double T = face_out * inv;
      diag += T;
      trips.emplace_back(i, i + 1, -T);
    } else {
      diag += 2.0 * face_out * inv;
    }
    trips.emplace_back(i, i, diag);
  }
  Eigen::SparseMatrix<double> L(n_r, n_r);
  L.setFromTriplets(trips.begin(), trips.end());
  L.makeCompressed();
  return L;
}

Eigen::VectorXd radial_residual(const Eigen::SparseMatrix<double>& L,
                                const Eigen::VectorXd& r, const Nonlinearity& nl,
                                const Eigen::VectorXd& u) {
  Eigen::VectorXd F = L * u;
  for (int i = 0; i < u.size(); ++i) F[i] -= nl.f(r[i], u[i]);
  return F;
}

// Damped Newton on the 1D grid; returns the final residual inf-norm.
double newton_polish(const DomainSpec& dom, const Nonlinearity& nl,
                     Eigen::VectorXd& u, double tol) {
  const int n = static_cast<int>(u.size());
  double dr = 0.0;
  const Eigen::VectorXd r = cell_centers(dom, n, &dr);
  const Eigen::SparseMatrix<double> L = radial_operator(dom, n);

  Eigen::SparseMatrix<double> Labs = L;
  Labs.coeffs() = Labs.coeffs().abs();
  // Roundoff floor of the residual evaluation: the stencil sums cancel
  // terms of size (|L| |u|)_inf down to the f scale, so no iterate can be
  // certified below a small multiple of that cancellation noise.
  const auto eval_floor = [&](const Eigen::VectorXd& w) {
    return 32.0 * std::numeric_limits<double>::epsilon() *
           (Labs * w.cwiseAbs()).lpNorm<Eigen::Infinity>();
  };

  Eigen::VectorXd F = radial_residual(L, r, nl, u);
  double fn = F.lpNorm<Eigen::Infinity>();
  for (int iter = 0; iter < 80; ++iter) {
    if (fn < tol) return fn;
    Eigen::SparseMatrix<double> J = L;
    for (int i = 0; i < n; ++i) J.coeffRef(i, i) -= nl.fp(r[i], u[i]);
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(J);
    if (lu.info() != Eigen::Success)
      throw SingularJacobian("solve_radial: singular 1D Jacobian");
    const Eigen::VectorXd step = lu.solve(-F);
    double t = 1.0;
    bool accepted = false;
    for (int half = 0; half < 30; ++half) {
      const Eigen::VectorXd cand = u + t * step;
      const Eigen::VectorXd Fc = radial_residual(L, r, nl, cand);
      const double fc = Fc.lpNorm<Eigen::Infinity>();
      if (fc < (1.0 - 1e-4 * t) * fn) {
        u = cand;
        F = Fc;
        fn = fc;
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      if (fn <= eval_floor(u)) return fn;  // at double-precision resolution
      throw Diverged("solve_radial: 1D Newton line search stalled at residual " +
                     sci1d(fn));
    }
  }
  if (fn < tol || fn <= eval_floor(u)) return fn;
  throw Diverged("solve_radial: 1D Newton did not reach tolerance, residual " +
                 sci1d(fn));
}

// Sample a trajectory onto the staggered cell centers by linear
// interpolation (the Newton polish removes the interpolation error).
Eigen::VectorXd sample_onto_centers(const ShotResult& shot,
                                    const Eigen::VectorXd& r) {
  Eigen::VectorXd u(r.size());
  std::size_t a = 0;
  for (int i = 0; i < r.size(); ++i) {
    while (a + 2 < shot.r_samples.size() && shot.r_samples[a + 1] < r[i]) ++a;
    const double r0 = shot.r_samples[a], r1 = shot.r_samples[a + 1];
    const double t = std::clamp((r[i] - r0) / (r1 - r0), 0.0, 1.0);
    u[i] = (1.0 - t) * shot.u_samples[a] + t * shot.u_samples[a + 1];
  }
  return u;
}

// The shot only needs to bracket and localize the mode: the staggered-grid
// Newton polish supplies the final accuracy.
constexpr int kShotSteps = 40000;

// Disk shot from the center series  u(r) = c - f(0,c) r^2 / 4 + O(r^4).
ShotResult shoot_disk(const Nonlinearity& nl, double c, double r_end) {
  const double r0 = 1e-6 * r_end;
  const double fc = nl.f(0.0, c);
  return integrate(nl, r0, c - 0.25 * fc * r0 * r0, -0.5 * fc * r0, r_end,
                   kShotSteps);
}

ShotResult shoot_ring(const Nonlinearity& nl, const DomainSpec& dom, double slope,
                      double r_end) {
  return integrate(nl, dom.r_inner, 0.0, slope, r_end, kShotSteps);
}

RadialProfile polish_and_pack(const DomainSpec& dom, const Nonlinearity& nl,
                              int zeros, int n_r, const ShotResult& shot,
                              double param) {
  RadialProfile prof;
  prof.domain = dom;
  prof.n_r = n_r;
  prof.zeros = zeros;
  prof.param = param;
  double dr = 0.0;
  prof.r = cell_centers(dom, n_r, &dr);
  prof.u = sample_onto_centers(shot, prof.r);
  prof.residual = newton_polish(dom, nl, prof.u, 1e-10);

  // The polish must not change the mode: recount the sign changes.
  int changes = 0;
  for (int i = 1; i < n_r; ++i)
    if ((prof.u[i - 1] > 0.0 && prof.u[i] < 0.0) ||
        (prof.u[i - 1] < 0.0 && prof.u[i] > 0.0))
      ++changes;
  if (changes != zeros)
    throw Diverged("solve_radial: Newton polish changed the zero count from " +
                   std::to_string(zeros) + " to " + std::to_string(changes));
  return prof;
}

RadialProfile solve_power_disk(const DomainSpec& dom, const Nonlinearity& nl,
                               int zeros, int n_r) {
  // Amplitude scaling moves the zeros of the c = 1 profile as
  // rho_j(c) = rho_j(1) * c^{-(p-1)/(2+alpha)}: one exploratory shot gives a
  // sharp initial guess, and bisection on the (zeros+1)-th zero position
  // pins the Dirichlet condition at the outer wall.
  const double R = dom.r_outer;
  double rho1 = kInf;
  for (double cap = 20.0 * R; cap <= 5200.0 * R; cap *= 2.0) {
    rho1 = target_zero(shoot_disk(nl, 1.0, cap), zeros);
    if (std::isfinite(rho1)) break;
  }
  if (!std::isfinite(rho1))
    throw NoBracket("solve_radial: unit-amplitude disk shot produced no zero " +
                    std::to_string(zeros + 1));
  const double expo = (2.0 + (nl.kind == NonlinKind::Henon ? nl.alpha : 0.0)) /
                      (nl.p - 1.0);
  const double c_est = std::pow(rho1 / R, expo);

  const double r_end = 1.5 * R;
  double c_lo = c_est, c_hi = c_est;  // target(c) decreases in c
  double t_lo = target_zero(shoot_disk(nl, c_lo, r_end), zeros);
  int guard = 0;
  while (t_lo <= R && guard++ < 60) {
    c_lo *= 0.5;
    t_lo = target_zero(shoot_disk(nl, c_lo, r_end), zeros);
  }
  double t_hi = target_zero(shoot_disk(nl, c_hi, r_end), zeros);
  guard = 0;
  while (t_hi > R && guard++ < 60) {
    c_hi *= 2.0;
    t_hi = target_zero(shoot_disk(nl, c_hi, r_end), zeros);
  }
  if (!(t_lo > R) || !(t_hi <= R))
    throw NoBracket("solve_radial: disk shooting bracket not found around c = " +
                    sci1d(c_est));
  for (int it = 0; it < 60 && (c_hi - c_lo) > 1e-12 * c_hi; ++it) {
    const double c = 0.5 * (c_lo + c_hi);
    if (target_zero(shoot_disk(nl, c, r_end), zeros) > R)
      c_lo = c;
    else
      c_hi = c;
  }
  const double c = 0.5 * (c_lo + c_hi);
  return polish_and_pack(dom, nl, zeros, n_r, shoot_disk(nl, c, r_end), c);
}

RadialProfile solve_power_ring(const DomainSpec& dom, const Nonlinearity& nl,
                               int zeros, int n_r) {
  const double R = dom.r_outer;
  const double r_end = dom.r_inner + 1.5 * (R - dom.r_inner);
  // Geometric sweep for an inner-slope bracket: small slopes oscillate too
  // slowly (target beyond the wall), large slopes too fast.
  double s_lo = kInf, s_hi = kInf;
  for (int e = -40; e <= 40; ++e) {
    const double s = std::ldexp(1.0, e);
    const double t = target_zero(shoot_ring(nl, dom, s, r_end), zeros);
    if (t > R)
      s_lo = s;
    else {
      s_hi = s;
      break;
    }
  }
  if (!std::isfinite(s_lo) || !std::isfinite(s_hi))
    throw NoBracket("solve_radial: no inner-slope bracket on [" +
                    std::to_string(dom.r_inner) + ", " + std::to_string(R) + "]");
  for (int it = 0; it < 60 && (s_hi - s_lo) > 1e-12 * s_hi; ++it) {
    const double s = 0.5 * (s_lo + s_hi);
    if (target_zero(shoot_ring(nl, dom, s, r_end), zeros) > R)
      s_lo = s;
    else
      s_hi = s;
  }
  const double s = 0.5 * (s_lo + s_hi);
  return polish_and_pack(dom, nl, zeros, n_r, shoot_ring(nl, dom, s, r_end), s);
}

RadialProfile solve_gelfand(const DomainSpec& dom, const Nonlinearity& nl,
                            int zeros, int n_r) {
  if (zeros != 0)
    throw ConfigError(
        "solve_radial: the exponential kind supports the positive branch only "
        "(zeros = 0)");
  RadialProfile prof;
  prof.domain = dom;
  prof.n_r = n_r;
  prof.zeros = 0;
  prof.param = nl.lambda;
  double dr = 0.0;
  prof.r = cell_centers(dom, n_r, &dr);
  prof.u = Eigen::VectorXd::Zero(n_r);
  // Newton continuation from the zero branch picks the minimal solution.
  for (int step = 1; step <= 4; ++step) {
    Nonlinearity part = nl;
    part.lambda = nl.lambda * step / 4.0;
    prof.residual = newton_polish(dom, part, prof.u, 1e-10);
  }
  return prof;
}

}  // namespace

RadialProfile solve_radial(const DomainSpec& domain, const Nonlinearity& nl,
                           int zeros, int n_r) {
  domain.validate();
  nl.validate();
  if (n_r < 2) throw ConfigError("solve_radial: n_r must be at least 2");
  if (zeros < 0) throw ConfigError("solve_radial: zeros must be nonnegative");

  switch (nl.kind) {
    case NonlinKind::LaneEmden:
    case NonlinKind::Henon:
      return domain.kind == DomainKind::Disk
                 ? solve_power_disk(domain, nl, zeros, n_r)
                 : solve_power_ring(domain, nl, zeros, n_r);
    case NonlinKind::Gelfand:
      return solve_gelfand(domain, nl, zeros, n_r);
    case NonlinKind::SinhPoisson:
      throw ConfigError(
          "solve_radial: SinhPoisson is not solvable by shooting or "
          "continuation from the zero branch; seed a 2D solve instead");
  }
  throw ConfigError("solve_radial: unknown nonlinearity kind");
}

Field lift_radial(const PolarGrid& g, const RadialProfile& prof) {
  if (prof.n_r != g.n_r)
    throw MaskMismatch("lift_radial: profile has n_r = " + std::to_string(prof.n_r) +
                       ", grid has " + std::to_string(g.n_r));
  if (prof.domain.kind != g.domain.kind ||
      prof.domain.r_inner != g.domain.r_inner ||
      prof.domain.r_outer != g.domain.r_outer)
    throw MaskMismatch("lift_radial: profile domain differs from grid domain");
  Field f(g);
  for (int i = 0; i < g.n_r; ++i)
    for (int j = 0; j < g.n_theta; ++j) f.at(i, j) = prof.u[i];
  return f;
}

}  // namespace sectorsym

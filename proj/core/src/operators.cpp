#include "sectorsym/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "sectorsym/errors.hpp"

namespace sectorsym {

OperatorMatrix build_laplacian(const PolarGrid& g, const NodeMask& mask) {
  if (mask.n_r != g.n_r || mask.n_theta != g.n_theta)
    throw MaskMismatch("build_laplacian: mask shape does not match grid");

  const int count = mask.count();
  const double cdr = g.dtheta / g.dr;  // multiplies a radial face radius

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(count) * 5);
  Eigen::VectorXd mass(count);

  for (int a = 0; a < count; ++a) {
    const int n = mask.nodes[a];
    const int i = g.ring_of(n);
    const int j = g.spoke_of(n);
    const double ct = g.dr / (g.r[i] * g.dtheta);
    double diag = 0.0;

    // Inner radial side.
    if (i > 0) {
      const double T = g.r_face[i] * cdr;
      diag += T;
      const int nb = g.node(i - 1, j);
      if (mask.contains(nb)) trips.emplace_back(a, mask.local[nb], -T);
    } else if (g.domain.has_inner_wall()) {
      diag += 2.0 * g.r_face[0] * cdr;  // half-cell Dirichlet wall
    }
    // For a disk, r_face[0] == 0: the center face carries no flux.

    // Outer radial side.
    if (i < g.n_r - 1) {
      const double T = g.r_face[i + 1] * cdr;
      diag += T;
      const int nb = g.node(i + 1, j);
      if (mask.contains(nb)) trips.emplace_back(a, mask.local[nb], -T);
    } else {
      diag += 2.0 * g.r_face[g.n_r] * cdr;  // half-cell Dirichlet wall
    }

    // Angular sides.  A flagged side has a Dirichlet edge halfway to the
    // neighbor ray: the mirror image turns the coupling into a diagonal
    // bump.  An unflagged non-member neighbor lies on an excluded edge ray
    // (value pinned to zero), so the coupling is simply dropped.
    const std::uint8_t wall = mask.whole_domain ? 0 : mask.theta_wall[a];
    if (wall & 1) {
      diag += 2.0 * ct;
    } else {
      diag += ct;
      const int nb = g.node(i, j - 1);
      if (mask.contains(nb)) trips.emplace_back(a, mask.local[nb], -ct);
    }
    if (wall & 2) {
      diag += 2.0 * ct;
    } else {
      diag += ct;
      const int nb = g.node(i, j + 1);
      if (mask.contains(nb)) trips.emplace_back(a, mask.local[nb], -ct);
    }

    trips.emplace_back(a, a, diag);
    mass[a] = g.weight(i);
  }

  OperatorMatrix op;
  op.mask = mask;
  op.A.resize(count, count);
  op.A.setFromTriplets(trips.begin(), trips.end());
  op.A.makeCompressed();
  op.mass = std::move(mass);
  return op;
}

OperatorMatrix with_potential(const OperatorMatrix& op, const Field& V) {
  if (V.n_r != op.mask.n_r || V.n_theta != op.mask.n_theta)
    throw MaskMismatch("with_potential: potential shape does not match mask");
  OperatorMatrix out = op;
  for (int a = 0; a < out.n(); ++a)
    out.A.coeffRef(a, a) -= out.mass[a] * V.v[op.mask.nodes[a]];
  return out;
}

double quad_form(const OperatorMatrix& op, const Eigen::VectorXd& v) {
  return v.dot(op.A * v);
}

Field apply_operator(const PolarGrid& g, const Field& u, const Field* V,
                     bool mass_weighted) {
  if (u.n_r != g.n_r || u.n_theta != g.n_theta)
    throw MaskMismatch("apply_operator: field shape does not match grid");
  Field out(g);
  const int nr = g.n_r, nt = g.n_theta;
  for (int i = 0; i < nr; ++i) {
    const double inv_r_dr2 = 1.0 / (g.r[i] * g.dr * g.dr);
    const double crm = i > 0 ? g.r_face[i] * inv_r_dr2 : 0.0;
    const double wall_in =
        (i == 0 && g.domain.has_inner_wall()) ? 2.0 * g.r_face[0] * inv_r_dr2 : 0.0;
    const double crp = i < nr - 1 ? g.r_face[i + 1] * inv_r_dr2 : 0.0;
    const double wall_out = i == nr - 1 ? 2.0 * g.r_face[nr] * inv_r_dr2 : 0.0;
    const double ct = 1.0 / (g.r[i] * g.r[i] * g.dtheta * g.dtheta);
    const double w = mass_weighted ? g.weight(i) : 1.0;
    for (int j = 0; j < nt; ++j) {
      const double un = u.at(i, j);
      // Fixed slot order; the angular pair is combined with one commutative
      // addition so the result commutes bitwise with rotations and
      // reflections of the input.
      double acc = wall_in * un;
      if (i > 0) acc += crm * (un - u.at(i - 1, j));
      if (i < nr - 1) acc += crp * (un - u.at(i + 1, j));
      acc += wall_out * un;
      const double tm = ct * (un - u.at(i, j - 1));
      const double tp = ct * (un - u.at(i, j + 1));
      acc += tm + tp;
      if (V != nullptr) acc -= V->at(i, j) * un;
      out.at(i, j) = w * acc;
    }
  }
  return out;
}

Eigen::VectorXd operator_diagonal(const PolarGrid& g, const Field* V,
                                  bool mass_weighted) {
  Eigen::VectorXd d(g.size());
  const int nr = g.n_r, nt = g.n_theta;
  for (int i = 0; i < nr; ++i) {
    const double inv_r_dr2 = 1.0 / (g.r[i] * g.dr * g.dr);
    double ring = 2.0 / (g.r[i] * g.r[i] * g.dtheta * g.dtheta);
    if (i > 0) ring += g.r_face[i] * inv_r_dr2;
    else if (g.domain.has_inner_wall()) ring += 2.0 * g.r_face[0] * inv_r_dr2;
    if (i < nr - 1) ring += g.r_face[i + 1] * inv_r_dr2;
    else ring += 2.0 * g.r_face[nr] * inv_r_dr2;
    const double w = mass_weighted ? g.weight(i) : 1.0;
    for (int j = 0; j < nt; ++j) {
      const int n = i * nt + j;
      d[n] = w * (ring - (V != nullptr ? V->v[n] : 0.0));
    }
  }
  return d;
}

Field high_order_neg_laplacian(const PolarGrid& g, const Field& u) {
  if (u.n_r != g.n_r || u.n_theta != g.n_theta)
    throw MaskMismatch("high_order_neg_laplacian: field shape mismatch");
  const int nr = g.n_r, nt = g.n_theta;
  const bool disk = g.domain.kind == DomainKind::Disk;
  const double nan = std::numeric_limits<double>::quiet_NaN();

  // Radial fetch with through-center indexing on a disk: the sample at
  // radius -r along ray theta is the sample at radius r along theta + pi.
  const auto rad = [&](int i, int j) -> double {
    if (i >= 0) return u.at(i, j);
    return u.at(-1 - i, j + nt / 2);
  };

  Field out(g);
  for (int i = 0; i < nr; ++i) {
    const bool valid = (i >= 2 || disk) && i <= nr - 3;
    if (!valid) {
      for (int j = 0; j < nt; ++j) out.at(i, j) = nan;
      continue;
    }
    const double r = g.r[i];
    const double c_rr = 1.0 / (12.0 * g.dr * g.dr);
    const double c_r = 1.0 / (12.0 * g.dr * r);
    const double c_tt = 1.0 / (12.0 * g.dtheta * g.dtheta * r * r);
    for (int j = 0; j < nt; ++j) {
      const double um2 = rad(i - 2, j), um1 = rad(i - 1, j), u0 = u.at(i, j),
                   up1 = rad(i + 1, j), up2 = rad(i + 2, j);
      const double u_rr = c_rr * (-um2 + 16.0 * um1 - 30.0 * u0 + 16.0 * up1 - up2);
      const double u_r = c_r * (um2 - 8.0 * um1 + 8.0 * up1 - up2);
      const double u_tt = c_tt * (-u.at(i, j - 2) + 16.0 * u.at(i, j - 1) -
                                  30.0 * u0 + 16.0 * u.at(i, j + 1) - u.at(i, j + 2));
      out.at(i, j) = -(u_rr + u_r + u_tt);
    }
  }
  return out;
}

Field angular_derivative(const PolarGrid& g, const Field& u) {
  Field out(g);
  const double c = 1.0 / (2.0 * g.dtheta);
  for (int i = 0; i < g.n_r; ++i)
    for (int j = 0; j < g.n_theta; ++j)
      out.at(i, j) = c * (u.at(i, j + 1) - u.at(i, j - 1));
  return out;
}

Field project_k_invariant(const PolarGrid& g, const Field& u, int k) {
  if (k < 1 || g.n_theta % k != 0)
    throw IncompatibleSymmetry("project_k_invariant: n_theta=" +
                               std::to_string(g.n_theta) +
                               " not divisible by k=" + std::to_string(k));
  if (k == 1) return u;
  const int p = g.n_theta / k;
  Field out(g);
  std::vector<double> orbit(k);
  for (int i = 0; i < g.n_r; ++i) {
    for (int j = 0; j < p; ++j) {
      for (int s = 0; s < k; ++s) orbit[s] = u.at(i, j + s * p);
      std::sort(orbit.begin(), orbit.end());
      double sum = 0.0;
      for (int s = 0; s < k; ++s) sum += orbit[s];
      const double avg = sum / k;
      for (int s = 0; s < k; ++s) out.at(i, j + s * p) = avg;
    }
  }
  return out;
}

double k_invariance_defect(const PolarGrid& g, const Field& u, int k) {
  const Field p = project_k_invariant(g, u, k);
  return (u.v - p.v).lpNorm<Eigen::Infinity>();
}

}  // namespace sectorsym

#include "sectorsym/symmetry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sectorsym/errors.hpp"
#include "sectorsym/operators.hpp"
#include "sectorsym/spectra.hpp"
#include "sectorsym/stable_sum.hpp"

namespace sectorsym {

namespace {

constexpr double kTolRadial = 1e-6;
constexpr double kTolSym = 1e-3;
constexpr double kTolSignRel = 1e-8;
constexpr double kTolMono = 1e-3;
constexpr double kInvarianceTol = 1e-10;

void require_aligned(const PolarGrid& g, const Direction& e, const char* who) {
  if (e.n_theta != g.n_theta || e.index < 0 || e.index >= 2 * g.n_theta)
    throw AxisNotGridAligned(std::string(who) +
                             ": direction does not live on this grid's lattice");
}

void require_k_invariant(const PolarGrid& g, const Field& u, int k,
                         const char* who) {
  const double sup = u.v.lpNorm<Eigen::Infinity>();
  if (k_invariance_defect(g, u, k) > kInvarianceTol * std::max(sup, 1e-300))
    throw NotKInvariant(std::string(who) + ": field is not k-invariant (k=" +
                        std::to_string(k) + ")");
}

// Rotate a field by `shift` spokes counterclockwise (exact permutation).
Field rotated(const Field& f, int shift) {
  Field out(f.n_r, f.n_theta);
  for (int i = 0; i < f.n_r; ++i)
    for (int j = 0; j < f.n_theta; ++j) out.at(i, j) = f.at(i, j - shift);
  return out;
}

}  // namespace

Field difference_field(const PolarGrid& g, const Field& u, const Direction& e) {
  require_aligned(g, e, "difference_field");
  if (u.n_r != g.n_r || u.n_theta != g.n_theta)
    throw MaskMismatch("difference_field: field shape mismatch");
  Field w(g);
  for (int i = 0; i < g.n_r; ++i)
    for (int j = 0; j < g.n_theta; ++j)
      w.at(i, j) = u.at(i, e.index - j) - u.at(i, j);
  return w;
}

AxisScan axis_scan(const PolarGrid& g, const Field& u, int k) {
  require_k_invariant(g, u, k, "axis_scan");
  if (k < 1 || g.n_theta % (2 * k) != 0)
    throw IncompatibleSymmetry("axis_scan: n_theta=" + std::to_string(g.n_theta) +
                               " not divisible by 2k=" + std::to_string(2 * k));
  AxisScan scan;
  scan.lattice_step = M_PI / g.n_theta;
  scan.tol = kTolSym * u.v.lpNorm<Eigen::Infinity>();

  const int nd = 2 * g.n_theta / k;  // directions in [0, 2*pi/k)
  scan.table.reserve(nd);
  for (int m = 0; m < nd; ++m) {
    const Direction e = direction_from_index(g, m);
    const Field w = difference_field(g, u, e);
    const NodeMask plus = sector_mask(g, {k, e, SectorPart::Plus});
    DirectionStats st;
    st.index = m;
    st.psi = e.psi();
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (int n : plus.nodes) {
      lo = std::min(lo, w.v[n]);
      hi = std::max(hi, w.v[n]);
    }
    if (plus.nodes.empty()) lo = hi = 0.0;
    st.w_min = lo;
    st.w_max = hi;
    st.w_sup = std::max(std::abs(lo), std::abs(hi));
    scan.table.push_back(st);
  }

  int best = 0;
  for (int m = 1; m < nd; ++m)
    if (scan.table[m].w_sup < scan.table[best].w_sup) best = m;
  scan.psi_star_index = best;
  scan.psi_star = scan.table[best].psi;
  scan.best_sup = scan.table[best].w_sup;
  for (int m = 0; m < nd; ++m)
    if (scan.table[m].w_sup <= 2.0 * scan.best_sup) scan.near_minimal.push_back(m);

  int t = 0;
  while (t < nd && scan.table[t].w_min >= -scan.tol) ++t;
  scan.psi_tilde_count = t;
  scan.psi_tilde = t * scan.lattice_step;
  return scan;
}

MonotonicityStats monotonicity_verdict(const PolarGrid& g, const Field& u,
                                       const Direction& e, int k) {
  require_aligned(g, e, "monotonicity_verdict");
  require_k_invariant(g, u, k, "monotonicity_verdict");
  const Field ut = angular_derivative(g, u);

  MonotonicityStats st;
  st.tol_sign = kTolSignRel * u.v.lpNorm<Eigen::Infinity>();
  st.tol_mono = kTolMono;

  const auto side_stats = [&](SectorPart part, double& neg_frac,
                              double& pos_frac, int& dominant) {
    const NodeMask mask = sector_mask(g, {k, e, part});
    long neg = 0, pos = 0;
    for (int n : mask.nodes) {
      if (ut.v[n] < -st.tol_sign) ++neg;
      else if (ut.v[n] > st.tol_sign) ++pos;
    }
    const double total = std::max<double>(1.0, mask.nodes.size());
    neg_frac = neg / total;
    pos_frac = pos / total;
    dominant = pos_frac > neg_frac ? 1 : (neg_frac > pos_frac ? -1 : 0);
  };
  side_stats(SectorPart::Plus, st.neg_frac_plus, st.pos_frac_plus,
             st.dominant_plus);
  side_stats(SectorPart::Minus, st.neg_frac_minus, st.pos_frac_minus,
             st.dominant_minus);

  const double viol_plus = std::min(st.neg_frac_plus, st.pos_frac_plus);
  const double viol_minus = std::min(st.neg_frac_minus, st.pos_frac_minus);
  st.strict = viol_plus < st.tol_mono && viol_minus < st.tol_mono &&
              st.dominant_plus * st.dominant_minus == -1;
  return st;
}

double residual_L_e(const PolarGrid& g, const Field& u, const Nonlinearity& nl,
                    const Direction& e) {
  require_aligned(g, e, "residual_L_e");
  constexpr int collar = 4;
  if (g.n_r < 2 * collar + 2)
    throw ConfigError("residual_L_e: need at least " +
                      std::to_string(2 * collar + 2) + " rings, have " +
                      std::to_string(g.n_r));
  const Field w = difference_field(g, u, e);
  const Field Ve = comparison_potentials(g, nl, u, e).first;
  const Field ho = high_order_neg_laplacian(g, w);
  double sup = 0.0;
  for (int i = collar; i < g.n_r - collar; ++i)
    for (int j = 0; j < g.n_theta; ++j) {
      const double res = ho.at(i, j) - Ve.at(i, j) * w.at(i, j);
      sup = std::max(sup, std::abs(res));
    }
  return sup;
}

std::pair<Field, Field> split_fields(const PolarGrid& g, const Field& w,
                                     const Direction& e, int k) {
  require_aligned(g, e, "split_fields");
  const NodeMask plus = sector_mask(g, {k, e, SectorPart::Plus});
  const NodeMask minus = sector_mask(g, {k, e, SectorPart::Minus});
  Field w1(g), w2(g);
  for (int n : plus.nodes) {
    w1.v[n] = std::max(w.v[n], 0.0);
    w2.v[n] = -std::min(w.v[n], 0.0);
  }
  for (int n : minus.nodes) {
    w1.v[n] = -std::min(w.v[n], 0.0);
    w2.v[n] = std::max(w.v[n], 0.0);
  }
  return {std::move(w1), std::move(w2)};
}

double sector_quadratic_form(const PolarGrid& g, const Field& V,
                             const Direction& e, int k, const Field& v) {
  require_aligned(g, e, "sector_quadratic_form");
  const NodeMask mask = sector_mask(g, {k, e, SectorPart::Double});
  const OperatorMatrix op = with_potential(build_laplacian(g, mask), V);
  Eigen::VectorXd local(mask.count());
  for (int l = 0; l < mask.count(); ++l) local[l] = v.v[mask.nodes[l]];
  return quad_form(op, local);
}

XiDiagnostic xi_h_diagnostic(const PolarGrid& g, const Field& u,
                             const Nonlinearity& nl, int k) {
  require_k_invariant(g, u, k, "xi_h_diagnostic");
  if (k < 1 || g.n_theta % (2 * k) != 0)
    throw IncompatibleSymmetry("xi_h_diagnostic: n_theta=" +
                               std::to_string(g.n_theta) +
                               " not divisible by 2k=" + std::to_string(2 * k));

  const Field V = eval_fp(g, nl, u);
  const double ztol = default_zero_tol(V);
  const MorseCount mc = morse_index(g, u, nl, k, ztol);
  if (mc.negative != 2)
    throw IndexMismatch("xi_h_diagnostic: k-invariant negative eigenvalue count is " +
                        std::to_string(mc.negative) + ", need exactly 2");

  const OperatorMatrix op = with_potential(build_laplacian(g, full_mask(g)), V);
  const SpectrumResult low = smallest_eigs(g, op, 2, Subspace::k_invariant(k));
  const Field& phi1 = low.eigenfields[0];
  const Field& phi2 = low.eigenfields[1];

  XiDiagnostic out;
  out.zero_tol = ztol;
  const int S = g.n_theta / k;  // lattice index of psi = pi/k
  const int shift = g.n_theta / k;  // spokes in a 2*pi/k rotation
  const Eigen::VectorXd wts = g.weights();

  std::vector<Field> phi_p(S + 1), phi_m(S + 1);
  out.psi_index.resize(S + 1);
  out.psi.resize(S + 1);
  out.lambda_plus.resize(S + 1);
  out.lambda_minus.resize(S + 1);
  for (int j = 0; j < S; ++j) {
    const Direction e = direction_from_index(g, j);
    auto [lp, fp] = sector_lambda1(g, u, nl, {k, e, SectorPart::Plus});
    auto [lm, fm] = sector_lambda1(g, u, nl, {k, e, SectorPart::Minus});
    out.lambda_plus[j] = lp;
    out.lambda_minus[j] = lm;
    phi_p[j] = std::move(fp);
    phi_m[j] = std::move(fm);
  }
  // Endpoint psi = pi/k: its minus half-sector is exactly the plus
  // half-sector at psi = 0 (same node set, same walls), and its plus
  // half-sector is the 2*pi/k rotation of the minus one at psi = 0.  Using
  // the permutation images keeps the antisymmetry endpoint identity exact.
  phi_m[S] = phi_p[0];
  out.lambda_minus[S] = out.lambda_plus[0];
  phi_p[S] = rotated(phi_m[0], shift);
  out.lambda_plus[S] = out.lambda_minus[0];

  out.a_weight.resize(S + 1);
  out.b_weight.resize(S + 1);
  out.h.resize(S + 1);
  for (int j = 0; j <= S; ++j) {
    out.psi_index[j] = j;
    out.psi[j] = j * M_PI / g.n_theta;
    const double op_plus = stable_dot3(wts, phi_p[j].v, phi1.v);
    const double op_minus = stable_dot3(wts, phi_m[j].v, phi1.v);
    if (!(op_plus > 0.0) || !(op_minus > 0.0))
      throw NonpositiveOverlap(
          "xi_h_diagnostic: ground-mode overlap not positive at lattice index " +
          std::to_string(j) + " (plus " + std::to_string(op_plus) + ", minus " +
          std::to_string(op_minus) + ")");
    out.a_weight[j] = std::sqrt(op_minus / op_plus);
    out.b_weight[j] = std::sqrt(op_plus / op_minus);
    Field xi(g);
    xi.v = out.a_weight[j] * phi_p[j].v - out.b_weight[j] * phi_m[j].v;
    out.h[j] = stable_dot3(wts, xi.v, phi2.v);
  }

  out.endpoint_defect = std::abs(out.h[S] + out.h[0]);
  const double scale = std::max({std::abs(out.h[0]), std::abs(out.h[S]), 1e-12});
  out.endpoint_ok = out.endpoint_defect <= 1e-8 * scale;

  if (out.h[0] == 0.0) {
    out.sign_change_lo = 0;
    out.located_index = 0;
  } else {
    int lo = -1;
    for (int j = 0; j < S; ++j)
      if (out.h[j] * out.h[j + 1] <= 0.0) {
        lo = j;
        break;
      }
    if (lo < 0)
      throw Error("xi_h_diagnostic: no sign change found despite endpoint antisymmetry");
    out.sign_change_lo = lo;
    out.located_index =
        std::abs(out.h[lo]) <= std::abs(out.h[lo + 1]) ? lo : lo + 1;
  }
  out.psi_prime = out.psi[out.located_index];
  out.lambda_plus_at_prime = out.lambda_plus[out.located_index];
  out.lambda_minus_at_prime = out.lambda_minus[out.located_index];
  out.sector_nonneg_ok =
      std::max(out.lambda_plus_at_prime, out.lambda_minus_at_prime) >= -ztol;
  return out;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Radial: return "Radial";
    case Verdict::AxisSymmetricMonotone: return "AxisSymmetricMonotone";
    case Verdict::Violation: return "Violation";
  }
  return "Violation";
}

SymmetryReport classify(const PolarGrid& g, const Field& u,
                        const Nonlinearity& nl, int k) {
  SymmetryReport rep;
  rep.tol_radial = kTolRadial;
  rep.tol_sym = kTolSym;
  rep.tol_mono = kTolMono;

  const double sup_u = std::max(u.v.lpNorm<Eigen::Infinity>(), 1e-300);
  rep.tol_sign = kTolSignRel * sup_u;
  rep.u_theta_ratio =
      angular_derivative(g, u).v.lpNorm<Eigen::Infinity>() / sup_u;

  rep.scan = axis_scan(g, u, k);
  rep.psi_star_index = rep.scan.psi_star_index;
  rep.psi_star = rep.scan.psi_star;
  rep.w_star_ratio = rep.scan.best_sup / sup_u;

  const Direction star = direction_from_index(g, rep.psi_star_index);
  rep.monotonicity = monotonicity_verdict(g, u, star, k);

  const Field V = eval_fp(g, nl, u);
  rep.zero_tol = default_zero_tol(V);
  rep.lambda1_plus = sector_lambda1(g, u, nl, {k, star, SectorPart::Plus}).first;
  rep.lambda1_minus =
      sector_lambda1(g, u, nl, {k, star, SectorPart::Minus}).first;

  // Interior local extrema and their placement relative to the axis family
  // {psi* + h*pi/k} (within one spoke) or the innermost disk rings.
  const double period = g.n_theta / (2.0 * k);  // axis spacing in spokes
  const double axis_spoke = rep.psi_star_index / 2.0;
  for (int i = 1; i < g.n_r - 1; ++i)
    for (int j = 0; j < g.n_theta; ++j) {
      const double c = u.at(i, j);
      const bool mx = c > u.at(i - 1, j) && c > u.at(i + 1, j) &&
                      c > u.at(i, j - 1) && c > u.at(i, j + 1);
      const bool mn = c < u.at(i - 1, j) && c < u.at(i + 1, j) &&
                      c < u.at(i, j - 1) && c < u.at(i, j + 1);
      if (!mx && !mn) continue;
      ++rep.extrema_total;
      double off = std::fmod(j - axis_spoke, period);
      if (off < 0) off += period;
      off = std::min(off, period - off);  // spokes to the nearest axis ray
      const bool near_axis = off <= 1.0 + 1e-12;
      const bool near_center = g.domain.kind == DomainKind::Disk && i <= 1;
      if (!near_axis && !near_center) ++rep.extrema_off_axis;
    }

  if (rep.u_theta_ratio < rep.tol_radial) {
    rep.verdict = Verdict::Radial;
    return rep;
  }
  if (rep.w_star_ratio < rep.tol_sym && rep.monotonicity.strict) {
    rep.verdict = Verdict::AxisSymmetricMonotone;
    return rep;
  }
  rep.verdict = Verdict::Violation;
  std::string why;
  if (rep.w_star_ratio >= rep.tol_sym)
    why += "best-axis reflection difference " + std::to_string(rep.w_star_ratio) +
           " exceeds " + std::to_string(rep.tol_sym) + "; ";
  if (!rep.monotonicity.strict)
    why += "angular derivative not one-signed per half-sector (violation fractions " +
           std::to_string(std::min(rep.monotonicity.neg_frac_plus,
                                   rep.monotonicity.pos_frac_plus)) +
           " / " +
           std::to_string(std::min(rep.monotonicity.neg_frac_minus,
                                   rep.monotonicity.pos_frac_minus)) +
           "); ";
  rep.details = why;
  return rep;
}

}  // namespace sectorsym

#include "sectorsym/grid.hpp"

#include <cmath>

#include "sectorsym/stable_sum.hpp"

namespace sectorsym {

std::string to_string(DomainKind k) {
  switch (k) {
    case DomainKind::Disk: return "Disk";
    case DomainKind::Annulus: return "Annulus";
    case DomainKind::TruncatedExterior: return "TruncatedExterior";
  }
  return "?";
}

DomainKind domain_kind_from_string(const std::string& s) {
  if (s == "Disk") return DomainKind::Disk;
  if (s == "Annulus") return DomainKind::Annulus;
  if (s == "TruncatedExterior") return DomainKind::TruncatedExterior;
  throw ConfigError("domain.kind: unknown value '" + s +
                    "' (expected Disk, Annulus, or TruncatedExterior)");
}

void DomainSpec::validate() const {
  if (!(r_outer > 0.0) || !std::isfinite(r_outer))
    throw ConfigError("domain.r_outer: must be positive and finite");
  if (kind == DomainKind::Disk) {
    if (r_inner != 0.0)
      throw ConfigError("domain.r_inner: must be 0 for a disk");
  } else {
    if (!(r_inner > 0.0) || !(r_inner < r_outer))
      throw ConfigError("domain.r_inner: must satisfy 0 < r_inner < r_outer");
  }
}

PolarGrid make_grid(const DomainSpec& domain, int n_r, int n_theta) {
  domain.validate();
  if (n_r < 2) throw ConfigError("grid.n_r: must be at least 2");
  if (n_theta < 4 || n_theta % 2 != 0)
    throw ConfigError("grid.n_theta: must be even and at least 4");
  PolarGrid g;
  g.domain = domain;
  g.n_r = n_r;
  g.n_theta = n_theta;
  g.dr = (domain.r_outer - domain.r_inner) / n_r;
  g.dtheta = 2.0 * M_PI / n_theta;
  g.r.resize(n_r);
  g.r_face.resize(n_r + 1);
  for (int i = 0; i < n_r; ++i) g.r[i] = domain.r_inner + (i + 0.5) * g.dr;
  for (int i = 0; i <= n_r; ++i) g.r_face[i] = domain.r_inner + i * g.dr;
  return g;
}

Eigen::VectorXd PolarGrid::weights() const {
  Eigen::VectorXd w(size());
  for (int i = 0; i < n_r; ++i) {
    const double wi = weight(i);
    for (int j = 0; j < n_theta; ++j) w[node(i, j)] = wi;
  }
  return w;
}

double integrate(const PolarGrid& g, const Field& f) {
  StableSum s;
  for (int i = 0; i < g.n_r; ++i) {
    const double wi = g.weight(i);
    for (int j = 0; j < g.n_theta; ++j) s.add(wi * f.v[g.node(i, j)]);
  }
  return s.value();
}

double inner(const PolarGrid& g, const Field& a, const Field& b) {
  if (!a.same_shape(b)) throw MaskMismatch("inner: field shapes differ");
  StableSum s;
  for (int i = 0; i < g.n_r; ++i) {
    const double wi = g.weight(i);
    for (int j = 0; j < g.n_theta; ++j) {
      const int n = g.node(i, j);
      s.add((wi * a.v[n]) * b.v[n]);
    }
  }
  return s.value();
}

double norm_l2(const PolarGrid& g, const Field& a) {
  return std::sqrt(inner(g, a, a));
}

double norm_inf(const Field& a) {
  double m = 0.0;
  for (Eigen::Index n = 0; n < a.v.size(); ++n) m = std::max(m, std::abs(a.v[n]));
  return m;
}

}  // namespace sectorsym

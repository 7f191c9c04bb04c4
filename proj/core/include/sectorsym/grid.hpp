#pragma once

#include <string>

#include <Eigen/Core>

#include "sectorsym/errors.hpp"

namespace sectorsym {

enum class DomainKind { Disk, Annulus, TruncatedExterior };

std::string to_string(DomainKind k);
DomainKind domain_kind_from_string(const std::string& s);

// Planar radial domain: disk (r_inner = 0) or annular region.
struct DomainSpec {
  DomainKind kind = DomainKind::Disk;
  double r_inner = 0.0;
  double r_outer = 1.0;

  void validate() const;
  bool has_inner_wall() const { return kind != DomainKind::Disk; }
};

// Tensor polar grid, cell-centered in r so that no node sits on a wall or at
// the origin:  r_i = r_inner + (i + 1/2) dr,  theta_j = j * dtheta.
// Node ids are r-major: node(i, j) = i * n_theta + j.
struct PolarGrid {
  DomainSpec domain;
  int n_r = 0;
  int n_theta = 0;
  double dr = 0.0;
  double dtheta = 0.0;
  Eigen::VectorXd r;       // n_r cell centers
  Eigen::VectorXd r_face;  // n_r + 1 cell faces; r_face[0] == r_inner

  int size() const { return n_r * n_theta; }
  int wrap(int j) const {
    j %= n_theta;
    return j < 0 ? j + n_theta : j;
  }
  int node(int i, int j) const { return i * n_theta + wrap(j); }
  int ring_of(int node) const { return node / n_theta; }
  int spoke_of(int node) const { return node % n_theta; }

  // Quadrature weight of every node in ring i: r_i * dr * dtheta.
  double weight(int i) const { return r[i] * dr * dtheta; }
  Eigen::VectorXd weights() const;

  double theta(int j) const { return dtheta * j; }
};

PolarGrid make_grid(const DomainSpec& domain, int n_r, int n_theta);

// Scalar field sampled at grid nodes, stored r-major.
struct Field {
  int n_r = 0;
  int n_theta = 0;
  Eigen::VectorXd v;

  Field() = default;
  Field(int nr, int nt) : n_r(nr), n_theta(nt), v(Eigen::VectorXd::Zero(nr * nt)) {}
  explicit Field(const PolarGrid& g) : Field(g.n_r, g.n_theta) {}

  double& at(int i, int j) { return v[i * n_theta + mod(j)]; }
  double at(int i, int j) const { return v[i * n_theta + mod(j)]; }
  int size() const { return n_r * n_theta; }
  bool same_shape(const Field& o) const { return n_r == o.n_r && n_theta == o.n_theta; }

 private:
  int mod(int j) const {
    j %= n_theta;
    return j < 0 ? j + n_theta : j;
  }
};

// Quadrature integral of a field over the whole domain.
double integrate(const PolarGrid& g, const Field& f);

// Weighted L2 inner product and norm.
double inner(const PolarGrid& g, const Field& a, const Field& b);
double norm_l2(const PolarGrid& g, const Field& a);
double norm_inf(const Field& a);

}  // namespace sectorsym

#pragma once

#include <cstdint>
#include <vector>

#include "sectorsym/grid.hpp"

namespace sectorsym {

// Unit direction e = (cos psi, sin psi) restricted to the half-step angular
// lattice psi = index * pi / n_theta, index in [0, 2 n_theta).  On this
// lattice the reflection about the line through the origin along e maps grid
// nodes to grid nodes exactly.
struct Direction {
  int index = 0;    // psi in units of pi / n_theta
  int n_theta = 0;

  double psi() const;
  bool on_nodes() const { return index % 2 == 0; }  // axis passes through grid rays
};

Direction direction_from_index(const PolarGrid& g, int index);
// Throws AxisNotGridAligned when psi is not on the lattice (tolerance 1e-9 rad).
Direction direction_from_angle(const PolarGrid& g, double psi);

// Number of lattice directions in [0, 2*pi): 2 * n_theta.
int direction_lattice_size(const PolarGrid& g);

// Reflection sigma_e: (i, j) -> (i, e.index - j mod n_theta).  An involution.
int reflect_node(const PolarGrid& g, const Direction& e, int node);

// Rotation by times * 2*pi/k.  Requires n_theta divisible by k.
int rotate_node(const PolarGrid& g, int k, int node, int times = 1);

// Nodes fixed by sigma_e (the two rays of the axis), empty for half-step axes.
std::vector<int> axis_nodes(const PolarGrid& g, const Direction& e);

enum class SectorPart { Plus, Minus, Double };

// Sector of opening pi/k (Plus/Minus) or 2*pi/k (Double) bounded by the rays
// of e and its rotations; Plus lies counterclockwise of e.
struct SectorSpec {
  int k = 1;
  Direction axis;
  SectorPart part = SectorPart::Plus;
};

// Index set of grid nodes with boundary labels.
//
// gamma1: nodes on the curved domain boundary (always empty: the staggered
//         radial grid keeps the walls between nodes).
// gamma2: nodes on the axis ray theta = psi.
// gamma3: nodes on the far straight edge(s).
// For half-step axes the straight edges fall between grid rays; a masked
// node next to such an edge carries a wall flag for that side (theta_wall,
// bit 0 = -theta edge, bit 1 = +theta edge).  Assembly must not couple across
// a flagged edge; instead the Dirichlet mirror image adds the angular
// coupling back onto the diagonal, which keeps the edge condition second
// order.
struct NodeMask {
  int n_r = 0;
  int n_theta = 0;
  bool whole_domain = false;
  std::vector<std::uint8_t> inside;         // by global node id
  std::vector<int> nodes;                   // sorted global ids of masked nodes
  std::vector<int> local;                   // global id -> local index or -1
  std::vector<std::uint8_t> theta_wall;     // by local index, bitmask of sides
  std::vector<int> gamma1, gamma2, gamma3;  // global ids

  int count() const { return static_cast<int>(nodes.size()); }
  bool contains(int node) const { return inside[node] != 0; }
  bool same_as(const NodeMask& o) const;
};

NodeMask full_mask(const PolarGrid& g);

// Requires n_theta divisible by 2k.  See NodeMask for the boundary encoding.
NodeMask sector_mask(const PolarGrid& g, const SectorSpec& spec);

}  // namespace sectorsym

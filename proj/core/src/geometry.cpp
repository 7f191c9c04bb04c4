#include "sectorsym/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace sectorsym {

double Direction::psi() const { return M_PI * index / n_theta; }

Direction direction_from_index(const PolarGrid& g, int index) {
  const int lat = 2 * g.n_theta;
  index %= lat;
  if (index < 0) index += lat;
  return Direction{index, g.n_theta};
}

Direction direction_from_angle(const PolarGrid& g, double psi) {
  const double step = M_PI / g.n_theta;
  const double q = psi / step;
  const double qr = std::round(q);
  if (std::abs(q - qr) * step > 1e-9)
    throw AxisNotGridAligned("direction angle " + std::to_string(psi) +
                             " is not on the lattice of step pi/" +
                             std::to_string(g.n_theta));
  return direction_from_index(g, static_cast<int>(qr));
}

int direction_lattice_size(const PolarGrid& g) { return 2 * g.n_theta; }

int reflect_node(const PolarGrid& g, const Direction& e, int node) {
  if (e.n_theta != g.n_theta)
    throw MaskMismatch("reflect_node: direction built for a different grid");
  const int i = g.ring_of(node);
  const int j = g.spoke_of(node);
  return g.node(i, e.index - j);
}

int rotate_node(const PolarGrid& g, int k, int node, int times) {
  if (k < 1 || g.n_theta % k != 0)
    throw IncompatibleSymmetry("rotate_node: n_theta=" + std::to_string(g.n_theta) +
                               " not divisible by k=" + std::to_string(k));
  const int i = g.ring_of(node);
  const int j = g.spoke_of(node);
  return g.node(i, j + times * (g.n_theta / k));
}

std::vector<int> axis_nodes(const PolarGrid& g, const Direction& e) {
  std::vector<int> out;
  if (!e.on_nodes()) return out;
  const int j0 = (e.index / 2) % g.n_theta;
  const int j1 = (j0 + g.n_theta / 2) % g.n_theta;
  for (int i = 0; i < g.n_r; ++i) {
    out.push_back(g.node(i, j0));
    out.push_back(g.node(i, j1));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool NodeMask::same_as(const NodeMask& o) const {
  return n_r == o.n_r && n_theta == o.n_theta && nodes == o.nodes;
}

NodeMask full_mask(const PolarGrid& g) {
  NodeMask m;
  m.n_r = g.n_r;
  m.n_theta = g.n_theta;
  m.whole_domain = true;
  const int n = g.size();
  m.inside.assign(n, 1);
  m.nodes.resize(n);
  m.local.resize(n);
  for (int a = 0; a < n; ++a) {
    m.nodes[a] = a;
    m.local[a] = a;
  }
  m.theta_wall.assign(n, 0);
  return m;
}

namespace {

// Angular offset of a node ray from the axis in half-step units, folded into
// [0, 2*n_theta):  t = 2j - m  (mod 2 n_theta).
int ray_offset(int j, int axis_index, int n_theta) {
  int t = (2 * j - axis_index) % (2 * n_theta);
  if (t < 0) t += 2 * n_theta;
  return t;
}

}  // namespace

NodeMask sector_mask(const PolarGrid& g, const SectorSpec& spec) {
  if (spec.k < 1 || g.n_theta % (2 * spec.k) != 0)
    throw IncompatibleSymmetry("sector_mask: n_theta=" + std::to_string(g.n_theta) +
                               " not divisible by 2k=" + std::to_string(2 * spec.k));
  if (spec.axis.n_theta != g.n_theta)
    throw MaskMismatch("sector_mask: direction built for a different grid");

  const int nt = g.n_theta;
  const int two_n = 2 * nt;
  const int span = nt / spec.k;  // edge offset: pi/k in half-step units is span
  const int m = spec.axis.index;

  NodeMask out;
  out.n_r = g.n_r;
  out.n_theta = nt;
  out.inside.assign(g.size(), 0);
  out.local.assign(g.size(), -1);

  // Per spoke: membership plus edge/wall classification (identical for all
  // rings).  Wall bits: 1 = edge on the -theta side, 2 = edge on the +theta
  // side.
  std::vector<std::uint8_t> member(nt, 0), wall(nt, 0), is_g2(nt, 0), is_g3(nt, 0);
  for (int j = 0; j < nt; ++j) {
    const int t = ray_offset(j, m, nt);
    const int ts = t <= nt ? t : t - two_n;  // signed offset in (-n_theta, n_theta]
    bool in = false;
    switch (spec.part) {
      case SectorPart::Plus:
        in = ts > 0 && ts < span;
        if (ts == 0) is_g2[j] = 1;
        if (ts == span) is_g3[j] = 1;
        if (in && m % 2 != 0) {
          if (ts == 1) wall[j] |= 1;
          if (ts == span - 1) wall[j] |= 2;
        }
        break;
      case SectorPart::Minus:
        in = ts < 0 && ts > -span;
        if (ts == 0) is_g2[j] = 1;
        if (ts == -span || (spec.k == 1 && ts == span)) is_g3[j] = 1;
        if (in && m % 2 != 0) {
          if (ts == -1) wall[j] |= 2;
          if (ts == -(span - 1)) wall[j] |= 1;
        }
        break;
      case SectorPart::Double:
        in = ts > -span && ts < span;
        if (ts == 0) is_g2[j] = 1;
        if (ts == span || ts == -span) is_g3[j] = 1;
        if (in && m % 2 != 0) {
          if (ts == span - 1) wall[j] |= 2;
          if (ts == -(span - 1)) wall[j] |= 1;
        }
        break;
    }
    if (in) member[j] = 1;
  }

  for (int i = 0; i < g.n_r; ++i) {
    for (int j = 0; j < nt; ++j) {
      const int n = g.node(i, j);
      if (member[j]) {
        out.inside[n] = 1;
        out.local[n] = static_cast<int>(out.nodes.size());
        out.nodes.push_back(n);
        out.theta_wall.push_back(wall[j]);
      }
      if (is_g2[j]) out.gamma2.push_back(n);
      if (is_g3[j]) out.gamma3.push_back(n);
    }
  }
  std::sort(out.gamma2.begin(), out.gamma2.end());
  std::sort(out.gamma3.begin(), out.gamma3.end());
  return out;
}

}  // namespace sectorsym

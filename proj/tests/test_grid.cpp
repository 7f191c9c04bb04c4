#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "sectorsym/errors.hpp"
#include "sectorsym/grid.hpp"
#include "sectorsym/stable_sum.hpp"

using namespace sectorsym;

TEST_CASE("stable sum recovers small residues drowned by large terms") {
  StableSum s;
  s.add(1e16);
  s.add(1.0);
  s.add(-1e16);
  CHECK(s.value() == 1.0);  // naive summation yields 0
}

TEST_CASE("stable_dot is exactly negation-equivariant") {
  std::vector<double> a, b;
  std::mt19937_64 eng(7);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    a.push_back(d(eng) * std::pow(10.0, int(d(eng) * 8)));
    b.push_back(d(eng));
  }
  Eigen::VectorXd va = Eigen::Map<Eigen::VectorXd>(a.data(), 1000);
  Eigen::VectorXd vb = Eigen::Map<Eigen::VectorXd>(b.data(), 1000);
  const double p = stable_dot(va, vb);
  Eigen::VectorXd na = -va;
  CHECK(stable_dot(na, vb) == -p);
}

TEST_CASE("disk grid geometry") {
  PolarGrid g = make_grid({DomainKind::Disk, 0.0, 1.0}, 16, 8);
  CHECK(g.dr == doctest::Approx(1.0 / 16));
  CHECK(g.dtheta == doctest::Approx(2.0 * M_PI / 8));
  CHECK(g.r_face[0] == 0.0);
  CHECK(g.r_face[16] == doctest::Approx(1.0));
  CHECK(g.r[0] == doctest::Approx(0.5 / 16));
  CHECK(g.theta(0) == 0.0);
  CHECK(g.theta(2) == doctest::Approx(M_PI / 2));
  CHECK(g.wrap(-1) == 7);
  CHECK(g.wrap(8) == 0);
  CHECK(g.node(3, 5) == 3 * 8 + 5);
  CHECK(g.ring_of(g.node(3, 5)) == 3);
  CHECK(g.spoke_of(g.node(3, 5)) == 5);
}

TEST_CASE("quadrature integrates areas exactly (midpoint rule, linear in r)") {
  SUBCASE("disk") {
    PolarGrid g = make_grid({DomainKind::Disk, 0.0, 2.0}, 24, 12);
    Field one(g);
    one.v.setConstant(1.0);
    CHECK(integrate(g, one) == doctest::Approx(M_PI * 4.0).epsilon(1e-13));
  }
  SUBCASE("annulus") {
    PolarGrid g = make_grid({DomainKind::Annulus, 0.5, 1.5}, 24, 12);
    Field one(g);
    one.v.setConstant(1.0);
    CHECK(integrate(g, one) ==
          doctest::Approx(M_PI * (1.5 * 1.5 - 0.25)).epsilon(1e-13));
  }
}

TEST_CASE("field wrapping accessor") {
  PolarGrid g = make_grid({DomainKind::Disk, 0.0, 1.0}, 4, 8);
  Field f(g);
  f.at(2, 3) = 7.5;
  CHECK(f.at(2, 3 + 8) == 7.5);
  CHECK(f.at(2, 3 - 8) == 7.5);
}

TEST_CASE("inner product and norms agree") {
  PolarGrid g = make_grid({DomainKind::Annulus, 1.0, 2.0}, 10, 8);
  Field f(g);
  for (int i = 0; i < g.n_r; ++i)
    for (int j = 0; j < g.n_theta; ++j) f.at(i, j) = std::sin(i + 0.3 * j);
  const double n2 = norm_l2(g, f);
  CHECK(n2 * n2 == doctest::Approx(inner(g, f, f)).epsilon(1e-14));
  CHECK(norm_inf(f) <= 1.0);
  CHECK(norm_inf(f) > 0.5);
}

TEST_CASE("domain validation rejects bad radii") {
  CHECK_THROWS_AS(make_grid({DomainKind::Disk, 0.1, 1.0}, 8, 8), ConfigError);
  CHECK_THROWS_AS(make_grid({DomainKind::Annulus, 0.0, 1.0}, 8, 8), ConfigError);
  CHECK_THROWS_AS(make_grid({DomainKind::Annulus, 2.0, 1.0}, 8, 8), ConfigError);
  CHECK_THROWS_AS(make_grid({DomainKind::TruncatedExterior, 1.0, 1.0}, 8, 8),
                  ConfigError);
}

TEST_CASE("grid validation rejects bad resolutions") {
  CHECK_THROWS_AS(make_grid({DomainKind::Disk, 0.0, 1.0}, 1, 8), ConfigError);
  CHECK_THROWS_AS(make_grid({DomainKind::Disk, 0.0, 1.0}, 8, 7), ConfigError);
  CHECK_THROWS_AS(make_grid({DomainKind::Disk, 0.0, 1.0}, 8, 2), ConfigError);
}

TEST_CASE("domain kind strings round-trip") {
  for (auto k : {DomainKind::Disk, DomainKind::Annulus,
                 DomainKind::TruncatedExterior})
    CHECK(domain_kind_from_string(to_string(k)) == k);
  CHECK_THROWS_AS(domain_kind_from_string("disk"), ConfigError);
}

TEST_CASE("shape mismatch raises") {
  PolarGrid g = make_grid({DomainKind::Disk, 0.0, 1.0}, 8, 8);
  Field a(g);
  Field b(4, 8);
  CHECK_THROWS_AS(inner(g, a, b), MaskMismatch);
}

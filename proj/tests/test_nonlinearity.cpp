#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "sectorsym/errors.hpp"
#include "sectorsym/geometry.hpp"
#include "sectorsym/grid.hpp"
#include "sectorsym/nonlinearity.hpp"

using namespace sectorsym;

namespace {
const double kRs[] = {0.3, 0.7, 1.4};
const double kSs[] = {-2.0, -0.6, -1e-3, 0.0, 1e-3, 0.4, 1.7};

std::vector<Nonlinearity> all_kinds() {
  return {make_lane_emden(3.0), make_lane_emden(2.0), make_henon(4.0, 8.0),
          make_gelfand(0.5, 1.0), make_sinh_poisson(0.8, 2.0)};
}
}  // namespace

TEST_CASE("f values match their definitions") {
  CHECK(make_lane_emden(3.0).f(0.5, 2.0) == doctest::Approx(8.0));
  CHECK(make_lane_emden(3.0).f(0.5, -2.0) == doctest::Approx(-8.0));
  CHECK(make_henon(4.0, 8.0).f(0.5, 2.0) ==
        doctest::Approx(std::pow(0.5, 8) * 16.0));
  CHECK(make_gelfand(0.3, 2.0).f(2.0, 1.0) ==
        doctest::Approx(0.3 * 4.0 * std::exp(1.0)));
  CHECK(make_sinh_poisson(0.7, 0.0).f(1.0, 1.0) ==
        doctest::Approx(0.7 * (std::exp(1.0) - std::exp(-1.0))));
}

TEST_CASE("fp is the s-derivative of f (central differences)") {
  for (const auto& nl : all_kinds()) {
    for (double r : kRs) {
      for (double s : kSs) {
        if (std::abs(s) < 1e-2 && nl.homogeneous()) continue;  // |s|^{p-1} kink
        const double h = 1e-6 * std::max(1.0, std::abs(s));
        const double fd = (nl.f(r, s + h) - nl.f(r, s - h)) / (2 * h);
        CHECK(nl.fp(r, s) == doctest::Approx(fd).epsilon(1e-6));
      }
    }
  }
}

TEST_CASE("F is the s-primitive of f with F(r,0)=0") {
  for (const auto& nl : all_kinds()) {
    for (double r : kRs) {
      CHECK(nl.F(r, 0.0) == 0.0);
      for (double s : kSs) {
        const double h = 1e-6 * std::max(1.0, std::abs(s));
        const double fd = (nl.F(r, s + h) - nl.F(r, s - h)) / (2 * h);
        CHECK(nl.f(r, s) == doctest::Approx(fd).epsilon(1e-6));
      }
    }
  }
}

TEST_CASE("classification flags") {
  CHECK(make_lane_emden(3.0).homogeneous());
  CHECK(make_henon(4.0, 8.0).homogeneous());
  CHECK(!make_gelfand(1.0, 0.0).homogeneous());
  CHECK(!make_sinh_poisson(1.0, 0.0).homogeneous());
  CHECK(make_lane_emden(2.0).fp_convex());
  CHECK(make_lane_emden(3.0).fp_convex());
  CHECK(!make_lane_emden(1.5).fp_convex());
  CHECK(make_sinh_poisson(1.0, 0.0).fp_convex());
  CHECK(make_gelfand(1.0, 0.0).f_convex());
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(make_lane_emden(1.0).validate(), ConfigError);
  CHECK_THROWS_AS(make_lane_emden(0.5).validate(), ConfigError);
  CHECK_THROWS_AS(make_henon(3.0, -1.0).validate(), ConfigError);
  CHECK_THROWS_AS(make_gelfand(-0.1, 0.0).validate(), ConfigError);
  CHECK_THROWS_AS(make_sinh_poisson(0.0, 0.0).validate(), ConfigError);
  CHECK_NOTHROW(make_lane_emden(12.0).validate());
}

TEST_CASE("overflow in exponential kinds raises instead of returning inf") {
  CHECK_THROWS_AS(make_gelfand(1.0, 0.0).f(1.0, 1e4), Overflow);
  CHECK_THROWS_AS(make_sinh_poisson(1.0, 0.0).f(1.0, -1e4), Overflow);
  PolarGrid g = make_grid({DomainKind::Disk, 0.0, 1.0}, 4, 4);
  Field u(g);
  u.v.setConstant(800.0);
  CHECK_THROWS_AS(eval_f(g, make_gelfand(1.0, 0.0), u), Overflow);
}

TEST_CASE("nodewise evaluation uses the ring radius") {
  PolarGrid g = make_grid({DomainKind::Annulus, 1.0, 2.0}, 6, 4);
  Nonlinearity nl = make_henon(3.0, 2.0);
  Field u(g);
  u.v.setConstant(1.5);
  Field f = eval_f(g, nl, u);
  for (int i = 0; i < g.n_r; ++i)
    CHECK(f.at(i, 2) == doctest::Approx(nl.f(g.r[i], 1.5)).epsilon(1e-14));
}

TEST_CASE("secant potential is exact for nearly-coincident arguments") {
  // The quadrature fallback must join smoothly with the closed form.
  Nonlinearity nl = make_sinh_poisson(1.3, 0.0);
  const double r = 1.0, a = 0.7;
  for (double d : {1e-3, 1e-7, 1e-9, 0.0}) {
    PolarGrid g = make_grid({DomainKind::Disk, 0.0, 2.0}, 2, 4);
    Field u(g);
    // Arrange u so that reflection across psi=0 pairs (a, a+d).
    for (int i = 0; i < g.n_r; ++i) {
      u.at(i, 0) = a;
      u.at(i, 1) = a;
      u.at(i, 2) = a;
      u.at(i, 3) = a + d;
    }
    Direction e = direction_from_index(g, 0);
    auto [ve, ves] = comparison_potentials(g, nl, u, e);
    // Node (i,1) reflects to (i,3): secant over [a, a+d].  The difference
    // quotient is only a usable oracle while cancellation error stays far
    // below the tolerance; below that, the interval average of f' equals
    // the midpoint value up to O(d^2).
    if (d >= 1e-3) {
      const double expect = (nl.f(r, a + d) - nl.f(r, a)) / d;
      CHECK(ve.at(0, 1) == doctest::Approx(expect).epsilon(1e-9));
    } else {
      const double expect = nl.fp(r, a + 0.5 * d);
      CHECK(ve.at(0, 1) == doctest::Approx(expect).epsilon(1e-12));
    }
    CHECK(ves.at(0, 1) ==
          doctest::Approx(0.5 * (nl.fp(r, a) + nl.fp(r, a + d))).epsilon(1e-12));
  }
}

TEST_CASE("comparison potentials are bitwise reflection invariant") {
  PolarGrid g = make_grid({DomainKind::Annulus, 0.5, 1.5}, 8, 16);
  Field u = oracles::random_field(g, 17);
  for (const auto& nl : {make_lane_emden(3.0), make_sinh_poisson(0.5, 1.0)}) {
    for (int idx : {0, 5}) {
      Direction e = direction_from_index(g, idx);
      auto [ve, ves] = comparison_potentials(g, nl, u, e);
      for (int n = 0; n < g.size(); ++n) {
        const int m = reflect_node(g, e, n);
        CHECK(ve.v[n] == ve.v[m]);
        CHECK(ves.v[n] == ves.v[m]);
      }
    }
  }
}

TEST_CASE("secant potential lies below the endpoint average when f' is convex") {
  // Property over randomized fields; the margin 1e-12 covers roundoff only.
  std::mt19937_64 eng(424242);
  std::uniform_real_distribution<double> amp(0.2, 2.5);
  PolarGrid g = make_grid({DomainKind::Disk, 0.0, 1.0}, 10, 16);
  std::vector<Nonlinearity> kinds = {make_lane_emden(2.0), make_lane_emden(3.5),
                                     make_henon(2.0, 3.0),
                                     make_sinh_poisson(0.9, 1.0)};
  int checked = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto& nl = kinds[trial % kinds.size()];
    Field u = oracles::random_field(g, 1000 + trial, amp(eng));
    Direction e = direction_from_index(g, (trial * 7) % 32);
    auto [ve, ves] = comparison_potentials(g, nl, u, e);
    for (int n = 0; n < g.size(); ++n) {
      CHECK(ve.v[n] <= ves.v[n] + 1e-12 * std::max(1.0, std::abs(ves.v[n])));
      ++checked;
    }
  }
  CHECK(checked == 100 * g.size());
}

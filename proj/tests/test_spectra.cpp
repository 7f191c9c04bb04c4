#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "sectorsym/errors.hpp"
#include "sectorsym/geometry.hpp"
#include "sectorsym/grid.hpp"
#include "sectorsym/nonlinearity.hpp"
#include "sectorsym/operators.hpp"
#include "sectorsym/radial.hpp"
#include "sectorsym/spectra.hpp"

using namespace sectorsym;

namespace {
OperatorMatrix random_potential_op(const PolarGrid& g, std::uint64_t seed,
                                   double amp) {
  Field V = oracles::random_field(g, seed, amp);
  return with_potential(build_laplacian(g, full_mask(g)), V);
}
}  // namespace

TEST_CASE("inertia count matches dense eigenvalue counts") {
  PolarGrid g = make_grid({DomainKind::Annulus, 0.5, 1.5}, 12, 16);
  OperatorMatrix op = random_potential_op(g, 31, 30.0);
  auto dense = oracles::dense_pencil_eigs(op);
  for (double tau : {-20.0, 0.0, 13.7, 80.0, 300.0}) {
    const int expect =
        static_cast<int>(std::lower_bound(dense.begin(), dense.end(), tau) -
                         dense.begin());
    CHECK(eigenvalue_count_below(op, tau) == expect);
  }
}

TEST_CASE("dense-path smallest eigenpairs match a dense reference") {
  PolarGrid g = make_grid({DomainKind::Disk, 0.0, 1.0}, 14, 16);
  OperatorMatrix op = random_potential_op(g, 7, 20.0);
  auto dense = oracles::dense_pencil_eigs(op);
  SpectrumResult sr = smallest_eigs(g, op, 5, Subspace::full());
  REQUIRE(sr.eigenvalues.size() == 5);
  for (int i = 0; i < 5; ++i)
    CHECK(sr.eigenvalues[i] == doctest::Approx(dense[i]).epsilon(1e-9));
  // ascending order
  for (int i = 1; i < 5; ++i) CHECK(sr.eigenvalues[i] >= sr.eigenvalues[i - 1]);
}

TEST_CASE("iterative-path smallest eigenpairs match a dense reference") {
  // Large enough to force the sliced Lanczos path instead of direct dense.
  PolarGrid g = make_grid({DomainKind::Annulus, 0.5, 1.5}, 60, 40);
  OperatorMatrix op = random_potential_op(g, 8, 15.0);
  REQUIRE(op.n() > 2000);
  auto dense = oracles::dense_pencil_eigs(op);
  SpectrumResult sr = smallest_eigs(g, op, 6, Subspace::full());
  REQUIRE(sr.eigenvalues.size() == 6);
  for (int i = 0; i < 6; ++i)
    CHECK(sr.eigenvalues[i] == doctest::Approx(dense[i]).epsilon(1e-8));
}

TEST_CASE("eigenpairs satisfy the residual gate and mass-orthonormality") {
  PolarGrid g = make_grid({DomainKind::Disk, 0.0, 1.0}, 20, 24);
  OperatorMatrix op = random_potential_op(g, 55, 40.0);
  SpectrumResult sr = smallest_eigs(g, op, 4, Subspace::full());
  for (int a = 0; a < 4; ++a) {
    const Eigen::VectorXd& va = sr.eigenfields[a].v;
    Eigen::VectorXd Av = op.A * va;
    Eigen::VectorXd Mv = op.mass.cwiseProduct(va);
    CHECK((Av - sr.eigenvalues[a] * Mv).norm() < 1e-7 * Mv.norm());
    for (int b = 0; b <= a; ++b) {
      const double dot = sr.eigenfields[b].v.dot(Mv);
      CHECK(std::abs(dot - (a == b ? 1.0 : 0.0)) < 1e-8);
    }
    // deterministic sign: the largest-magnitude entry is positive
    int idx = 0;
    va.cwiseAbs().maxCoeff(&idx);
    CHECK(va[idx] > 0.0);
  }
}

TEST_CASE("k-invariant subspace keeps only multiples of k angular modes") {
  // Zero potential on an annulus: angular mode m contributes eigenvalues
  // with multiplicity 2 (cos/sin) for m > 0.  The k-invariant solver must
  // reproduce exactly the m = 0 and m = k branches of the dense spectrum.
  PolarGrid g = make_grid({DomainKind::Annulus, 1.0, 2.0}, 24, 24);
  OperatorMatrix op = build_laplacian(g, full_mask(g));
  auto dense = oracles::dense_pencil_eigs(op);
  const int k = 3;
  SpectrumResult sr = smallest_eigs(g, op, 4, Subspace::k_invariant(k));
  for (int a = 0; a < 4; ++a) {
    // The lift copies one wedge to all k wedges, so rotation invariance is
    // bitwise.  (The defect functional itself re-rounds through the orbit
    // average and may sit one ulp off zero for k = 3.)
    const Field& ef = sr.eigenfields[a];
    bool rot_exact = true;
    for (int i = 0; i < g.n_r; ++i)
      for (int j = 0; j < g.n_theta; ++j)
        if (ef.at(i, j) != ef.at(i, j + g.n_theta / k)) rot_exact = false;
    CHECK(rot_exact);
    CHECK(k_invariance_defect(g, ef, k) < 1e-14);
    // every k-invariant eigenvalue appears in the dense full spectrum
    double best = 1e300;
    for (double d : dense) best = std::min(best, std::abs(d - sr.eigenvalues[a]));
    CHECK(best < 1e-7 * std::max(1.0, std::abs(sr.eigenvalues[a])));
  }
  // The 2nd k-invariant eigenvalue skips the m=1,2 modes: strictly above
  // the 2nd..5th dense eigenvalues (m=1,1,2,2).
  CHECK(sr.eigenvalues[1] > dense[4] + 1.0);
}

TEST_CASE("sector restriction matches dense on the masked operator") {
  PolarGrid g = make_grid({DomainKind::Disk, 0.0, 1.0}, 16, 24);
  Direction e = direction_from_index(g, 5);
  OperatorMatrix op =
      build_laplacian(g, sector_mask(g, {2, e, SectorPart::Plus}));
  auto dense = oracles::dense_pencil_eigs(op);
  SpectrumResult sr = smallest_eigs(g, op, 3, Subspace::sector());
  for (int i = 0; i < 3; ++i)
    CHECK(sr.eigenvalues[i] == doctest::Approx(dense[i]).epsilon(1e-9));
  // scattered outside the mask as exact zeros
  for (int n = 0; n < g.size(); ++n)
    if (!op.mask.contains(n)) CHECK(sr.eigenfields[0].v[n] == 0.0);
}

TEST_CASE("morse index counts negatives of the linearization") {
  PolarGrid g = make_grid({DomainKind::Disk, 0.0, 1.0}, 24, 16);
  Nonlinearity nl = make_lane_emden(3.0);
  Field u = lift_radial(g, solve_radial(g.domain, nl, 0, g.n_r));
  MorseCount mc = morse_index(g, u, nl, 1);
  // dense reference on the linearized operator
  Field V = eval_fp(g, nl, u);
  OperatorMatrix op = with_potential(build_laplacian(g, full_mask(g)), V);
  auto dense = oracles::dense_pencil_eigs(op);
  int neg = 0, marg = 0;
  for (double d : dense) {
    if (d < -mc.zero_tol) ++neg;
    else if (d <= mc.zero_tol) ++marg;
  }
  CHECK(mc.negative == neg);
  CHECK(mc.marginal == marg);
  CHECK(mc.negative == 1);  // ground state of the focusing problem
}

TEST_CASE("morse index in the k-invariant subspace is at most the full one") {
  PolarGrid g = make_grid({DomainKind::Disk, 0.0, 1.0}, 24, 24);
  Nonlinearity nl = make_lane_emden(5.0);
  Field u = lift_radial(g, solve_radial(g.domain, nl, 1, g.n_r));
  MorseCount full = morse_index(g, u, nl, 1);
  MorseCount inv2 = morse_index(g, u, nl, 2);
  MorseCount inv3 = morse_index(g, u, nl, 3);
  CHECK(inv2.negative <= full.negative);
  CHECK(inv3.negative <= full.negative);
  CHECK(full.negative >= 2);  // nodal radial: at least 2
}

TEST_CASE("morse_index rejects a non-invariant field") {
  PolarGrid g = make_grid({DomainKind::Disk, 0.0, 1.0}, 8, 12);
  Field u = oracles::random_field(g, 2);
  CHECK_THROWS_AS(morse_index(g, u, make_lane_emden(3.0), 3), NotKInvariant);
}

TEST_CASE("sector ground mode: smallest eigenvalue, nonnegative, unit mass") {
  PolarGrid g = make_grid({DomainKind::Annulus, 0.5, 1.0}, 16, 24);
  Nonlinearity nl = make_lane_emden(3.0);
  Field u = lift_radial(g, solve_radial(g.domain, nl, 0, g.n_r));
  Direction e = direction_from_index(g, 4);
  SectorSpec spec{2, e, SectorPart::Minus};
  auto [lam, phi] = sector_lambda1(g, u, nl, spec);

  OperatorMatrix op =
      with_potential(build_laplacian(g, sector_mask(g, spec)), eval_fp(g, nl, u));
  auto dense = oracles::dense_pencil_eigs(op);
  CHECK(lam == doctest::Approx(dense[0]).epsilon(1e-9));
  double mass = 0.0;
  for (int n = 0; n < g.size(); ++n) {
    CHECK(phi.v[n] >= 0.0);  // ground mode sign-normalized nonnegative
    mass += g.weight(g.ring_of(n)) * phi.v[n] * phi.v[n];
  }
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("default zero tolerance scales with the potential") {
  PolarGrid g = make_grid({DomainKind::Disk, 0.0, 1.0}, 4, 4);
  Field V(g);
  V.v.setConstant(0.5);
  CHECK(default_zero_tol(V) == doctest::Approx(1e-3));
  V.v.setConstant(-250.0);
  CHECK(default_zero_tol(V) == doctest::Approx(0.25));
}

// Microbenchmarks for the hot paths: operator assembly, matrix-free applies,
// inertia counts, eigenvalue extraction, Newton steps, and the axis scan.

#include <benchmark/benchmark.h>

#include <cmath>

#include "sectorsym/geometry.hpp"
#include "sectorsym/grid.hpp"
#include "sectorsym/nonlinearity.hpp"
#include "sectorsym/operators.hpp"
#include "sectorsym/radial.hpp"
#include "sectorsym/solvers.hpp"
#include "sectorsym/spectra.hpp"
#include "sectorsym/symmetry.hpp"

using namespace sectorsym;

namespace {

PolarGrid disk_grid(int n) {
  return make_grid({DomainKind::Disk, 0.0, 1.0}, n, n);
}

Field ground_state(const PolarGrid& g, const Nonlinearity& nl) {
  RadialProfile prof = solve_radial(g.domain, nl, 0, g.n_r);
  return lift_radial(g, prof);
}

void BM_AssembleLaplacian(benchmark::State& state) {
  PolarGrid g = disk_grid(static_cast<int>(state.range(0)));
  NodeMask mask = full_mask(g);
  for (auto _ : state) {
    OperatorMatrix op = build_laplacian(g, mask);
    benchmark::DoNotOptimize(op.A);
  }
  state.SetItemsProcessed(state.iterations() * g.size());
}
BENCHMARK(BM_AssembleLaplacian)->Arg(64)->Arg(128)->Arg(256);

void BM_ApplyOperator(benchmark::State& state) {
  PolarGrid g = disk_grid(static_cast<int>(state.range(0)));
  Nonlinearity nl = make_lane_emden(3.0);
  Field u = ground_state(g, nl);
  Field V = eval_fp(g, nl, u);
  for (auto _ : state) {
    Field out = apply_operator(g, u, &V, true);
    benchmark::DoNotOptimize(out.v);
  }
  state.SetItemsProcessed(state.iterations() * g.size());
}
BENCHMARK(BM_ApplyOperator)->Arg(64)->Arg(128)->Arg(256);

void BM_InertiaCount(benchmark::State& state) {
  PolarGrid g = disk_grid(static_cast<int>(state.range(0)));
  OperatorMatrix op = build_laplacian(g, full_mask(g));
  for (auto _ : state) {
    int below = eigenvalue_count_below(op, 60.0);
    benchmark::DoNotOptimize(below);
  }
}
BENCHMARK(BM_InertiaCount)->Arg(64)->Arg(128);

void BM_SmallestEigs(benchmark::State& state) {
  PolarGrid g = disk_grid(static_cast<int>(state.range(0)));
  OperatorMatrix op = build_laplacian(g, full_mask(g));
  for (auto _ : state) {
    SpectrumResult sr = smallest_eigs(g, op, 4, Subspace::full());
    benchmark::DoNotOptimize(sr.eigenvalues);
  }
}
BENCHMARK(BM_SmallestEigs)->Arg(48)->Arg(96);

void BM_NewtonSolve(benchmark::State& state) {
  PolarGrid g = disk_grid(static_cast<int>(state.range(0)));
  Nonlinearity nl = make_lane_emden(3.0);
  Field seed = ground_state(g, nl);
  seed.v *= 1.05;
  for (auto _ : state) {
    SolveResult r = newton_solve(g, nl, seed, 1, 1e-10);
    benchmark::DoNotOptimize(r.residual);
  }
}
BENCHMARK(BM_NewtonSolve)->Arg(48)->Arg(96);

void BM_AxisScan(benchmark::State& state) {
  PolarGrid g = disk_grid(static_cast<int>(state.range(0)));
  Nonlinearity nl = make_lane_emden(3.0);
  Field u = ground_state(g, nl);
  for (int j = 0; j < g.n_theta; ++j)
    for (int i = 0; i < g.n_r; ++i)
      u.at(i, j) *= 1.0 + 0.05 * std::cos(g.theta(j));
  for (auto _ : state) {
    AxisScan scan = axis_scan(g, u, 1);
    benchmark::DoNotOptimize(scan.best_sup);
  }
}
BENCHMARK(BM_AxisScan)->Arg(64)->Arg(128);

void BM_ProjectKInvariant(benchmark::State& state) {
  PolarGrid g = disk_grid(static_cast<int>(state.range(0)));
  Nonlinearity nl = make_lane_emden(3.0);
  Field u = ground_state(g, nl);
  for (auto _ : state) {
    Field p = project_k_invariant(g, u, 4);
    benchmark::DoNotOptimize(p.v);
  }
  state.SetItemsProcessed(state.iterations() * g.size());
}
BENCHMARK(BM_ProjectKInvariant)->Arg(128)->Arg(256);

}  // namespace

BENCHMARK_MAIN();

#pragma once

#include <string>
#include <vector>

#include "sectorsym/scenario.hpp"
#include "sectorsym/symmetry.hpp"

namespace sectorsym {

// Everything recorded about one run of an experiment.  Wall-clock time is
// kept out of report.json (it goes to timings.txt) so that identical
// scenarios produce byte-identical reports.
struct RunRecord {
  std::string id;
  int k = 0;          // 0 marks the radial branch of a Multiplicity run
  std::string seed;
  std::string status = "ok";  // "ok" or "error"
  std::string error;

  bool has_solution = false;
  Field u;              // not serialized directly; saved as a field container
  double energy = 0.0;
  double residual = 0.0;
  int iterations = 0;
  std::vector<double> constraint_residuals;
  std::string provenance;

  bool has_morse = false;
  int m_full = 0, m_full_marginal = 0;
  int m_k = 0, m_k_marginal = 0;

  bool has_report = false;
  SymmetryReport report;
  Field w_star;  // reflection difference at the best axis

  bool has_sector = false;  // half-sector ground eigenvalues available
  double lambda1_plus = 0.0, lambda1_minus = 0.0;

  bool has_eigs = false;
  std::vector<double> eigenvalues;  // k-invariant subspace, ascending

  bool has_xi = false;
  XiDiagnostic xi;

  std::string field_base;    // relative container base for u ("" if none)
  std::string w_field_base;  // relative container base for w_star

  double wall_seconds = 0.0;
};

struct RefinementStudy {
  bool present = false;
  double lambda_full_coarse = 0.0, lambda_full_fine = 0.0;
  double lambda_sector_coarse = 0.0, lambda_sector_fine = 0.0;
  bool has_reference = false;
  double reference_full = 0.0, reference_sector = 0.0;
  double ratio_full = 0.0, ratio_sector = 0.0;  // |err(h)| / |err(h/2)|
};

struct RunManifest {
  std::string tool_version;
  std::string scenario_hash;
  Scenario scenario;
  std::vector<RunRecord> runs;

  // Multiplicity extras: pairwise rotation distances / energy gaps over the
  // runs above (symmetric, zero diagonal), the greedy distinct count, and
  // the expected count from the closed-form formulas.
  bool has_distinctness = false;
  std::vector<std::vector<double>> rotation_distance;
  std::vector<std::vector<double>> energy_gap;
  std::vector<std::vector<int>> pair_distinct;
  int distinct_count = 0;
  int expected_count = 0;

  RefinementStudy refinement;

  double total_wall_seconds = 0.0;
};

// Expected number of pairwise-distinct solutions for a Multiplicity
// experiment: power-on-annulus counts one radial plus one branch per k;
// radially-weighted power on the disk uses the ceiling formulas with the
// growth constant 5.1869.
int expected_solution_count(const Scenario& sc);

// Executes the scenario's experiment: builds the job list, runs jobs on a
// small worker pool (errors are captured per run, siblings continue), and
// assembles the manifest in deterministic order.
RunManifest run_scenario(const Scenario& sc, const std::string& scenario_bytes,
                         int workers);

// Writes report.json, summary.csv, per-k h-profile CSVs, heatmaps, field
// containers, and timings.txt into out_dir (created if needed).  Everything
// except timings.txt is a deterministic function of the manifest.
void emit_outputs(RunManifest& manifest, const std::string& out_dir);

// True when every run in the manifest finished without an error.
bool all_runs_ok(const RunManifest& manifest);

}  // namespace sectorsym

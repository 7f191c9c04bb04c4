#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sectorsym/grid.hpp"
#include "sectorsym/nonlinearity.hpp"
#include "sectorsym/solvers.hpp"

namespace sectorsym {

enum class Experiment { Solve, Spectrum, Classify, Multiplicity, XiDiagnostic, Refinement };

std::string to_string(Experiment e);
Experiment experiment_from_string(const std::string& s);

std::string to_string(NehariMode m);
NehariMode nehari_mode_from_string(const std::string& s);

struct SolverTolerances {
  double newton_tol = 1e-10;
};

// One experiment description, read from a strict JSON document: unknown keys
// anywhere are configuration errors, reported with their path.
struct Scenario {
  DomainSpec domain;
  int n_r = 128;
  int n_theta = 128;
  Nonlinearity nonlin;
  Experiment experiment = Experiment::Solve;
  std::vector<int> k_list;
  std::vector<std::string> seeds = {"radial"};
  NehariMode mode = NehariMode::Positive;
  int num_eigs = 6;
  SolverTolerances tol;

  // Cross-field checks (divisibility, resolvable seeds, parameter ranges);
  // throws ConfigError naming the offending field.
  void validate() const;
};

Scenario parse_scenario(const std::string& json_text);
Scenario load_scenario(const std::string& path);  // reads the file, parses

// FNV-1a 64-bit content hash, hex encoded; keys run manifests to their input.
std::string content_hash(const std::string& bytes);

}  // namespace sectorsym

#include "sectorsym/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <thread>

#include <json.hpp>

#include "sectorsym/errors.hpp"
#include "sectorsym/field_io.hpp"
#include "sectorsym/operators.hpp"
#include "sectorsym/radial.hpp"
#include "sectorsym/spectra.hpp"

namespace sectorsym {

namespace {

using json = nlohmann::ordered_json;

constexpr const char* kToolVersion = "sectorsym 1.0.0";

// Disk-with-weight solution-count constant (growth rate of the expected
// number of distinct branches with the radial weight exponent).
constexpr double kWeightedCountConstant = 5.1869;

// ---- closed-form reference eigenvalues for the refinement study ----------

double first_bessel_root(double nu) {
  const auto f = [nu](double x) { return std::cyl_bessel_j(nu, x); };
  double lo = std::max(nu, 1e-3), step = 0.05;
  double hi = lo + step;
  for (int i = 0; i < 4000 && f(lo) * f(hi) > 0.0; ++i) {
    lo = hi;
    hi += step;
  }
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (f(lo) * f(mid) <= 0.0 ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

double first_annulus_root(double nu, double a, double b) {
  const auto f = [&](double x) {
    return std::cyl_bessel_j(nu, x * a) * std::cyl_neumann(nu, x * b) -
           std::cyl_bessel_j(nu, x * b) * std::cyl_neumann(nu, x * a);
  };
  const double step = M_PI / (b - a) / 64.0;
  double lo = std::max(step, nu / b * 0.25 + step);
  double hi = lo + step;
  for (int i = 0; i < 100000 && f(lo) * f(hi) > 0.0; ++i) {
    lo = hi;
    hi += step;
  }
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (f(lo) * f(mid) <= 0.0 ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

// lambda_1 of the (unweighted) Dirichlet Laplacian on the domain and on its
// opening-pi/k sector, when a closed form via Bessel roots exists.
bool reference_eigenvalues(const DomainSpec& d, int k, double& full,
                           double& sector) {
  if (d.kind == DomainKind::Disk) {
    const double R = d.r_outer;
    const double j0 = first_bessel_root(0.0);
    const double jk = first_bessel_root(static_cast<double>(k));
    full = j0 * j0 / (R * R);
    sector = jk * jk / (R * R);
    return true;
  }
  const double kap0 = first_annulus_root(0.0, d.r_inner, d.r_outer);
  const double kapk = first_annulus_root(static_cast<double>(k), d.r_inner,
                                         d.r_outer);
  full = kap0 * kap0;
  sector = kapk * kapk;
  return true;
}

// ---- job plumbing --------------------------------------------------------

void run_pool(std::vector<std::function<void()>>& jobs, int workers) {
  workers = std::max(1, std::min<int>(workers, static_cast<int>(jobs.size())));
  if (workers == 1) {
    for (auto& job : jobs) job();
    return;
  }
  std::atomic<size_t> next{0};
  const auto work = [&] {
    for (size_t i = next.fetch_add(1); i < jobs.size(); i = next.fetch_add(1))
      jobs[i]();
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
}

void guard(RunRecord& rec, const std::function<void()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body();
  } catch (const std::exception& e) {
    rec.status = "error";
    rec.error = e.what();
  }
  rec.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
}

void fill_solution(RunRecord& rec, SolveResult&& sol) {
  rec.has_solution = true;
  rec.u = std::move(sol.u);
  rec.energy = sol.energy;
  rec.residual = sol.residual;
  rec.iterations = sol.iterations;
  rec.constraint_residuals = std::move(sol.constraint_residuals);
  rec.provenance = std::move(sol.provenance);
}

void fill_morse(const PolarGrid& g, RunRecord& rec, const Nonlinearity& nl,
                int k) {
  const MorseCount full = morse_index(g, rec.u, nl, 1);
  rec.m_full = full.negative;
  rec.m_full_marginal = full.marginal;
  if (k > 1) {
    const MorseCount sub = morse_index(g, rec.u, nl, k);
    rec.m_k = sub.negative;
    rec.m_k_marginal = sub.marginal;
  } else {
    rec.m_k = full.negative;
    rec.m_k_marginal = full.marginal;
  }
  rec.has_morse = true;
}

void fill_report(const PolarGrid& g, RunRecord& rec, const Nonlinearity& nl,
                 int k) {
  rec.report = classify(g, rec.u, nl, k);
  rec.w_star =
      difference_field(g, rec.u, direction_from_index(g, rec.report.psi_star_index));
  rec.lambda1_plus = rec.report.lambda1_plus;
  rec.lambda1_minus = rec.report.lambda1_minus;
  rec.has_sector = true;
  rec.has_report = true;
}

SolveResult solve_branch(const PolarGrid& g, const Scenario& sc, int k,
                         const std::string& seed) {
  const Field init = make_named_seed(g, sc.nonlin, seed, k, sc.mode);
  if (sc.nonlin.homogeneous())
    return nehari_minimize(g, sc.nonlin, k, init, sc.mode, sc.tol.newton_tol);
  if (sc.mode == NehariMode::Nodal)
    throw ConfigError(
        "mode: nodal minimization requires a homogeneous kind (LaneEmden or "
        "Henon)");
  return newton_solve(g, sc.nonlin, init, k, sc.tol.newton_tol);
}

// ---- experiment drivers --------------------------------------------------

void plan_solutions(const PolarGrid& g, const Scenario& sc,
                    std::vector<RunRecord>& records,
                    std::vector<std::function<void()>>& jobs, bool plain_newton,
                    bool with_xi) {
  for (int k : sc.k_list)
    for (const std::string& seed : sc.seeds) {
      RunRecord rec;
      rec.id = "k" + std::to_string(k) + "-" + seed;
      rec.k = k;
      rec.seed = seed;
      records.push_back(std::move(rec));
    }
  for (size_t idx = 0; idx < records.size(); ++idx) {
    RunRecord& rec = records[idx];
    jobs.push_back([&g, &sc, &rec, plain_newton, with_xi] {
      guard(rec, [&] {
        const int k = rec.k;
        if (plain_newton) {
          const Field init = make_named_seed(g, sc.nonlin, rec.seed, k, sc.mode);
          fill_solution(rec, newton_solve(g, sc.nonlin, init, k, sc.tol.newton_tol));
        } else {
          fill_solution(rec, solve_branch(g, sc, k, rec.seed));
        }
        fill_morse(g, rec, sc.nonlin, k);
        fill_report(g, rec, sc.nonlin, k);
        if (with_xi) {
          rec.xi = xi_h_diagnostic(g, rec.u, sc.nonlin, k);
          rec.report.h_psi = rec.xi.psi;
          rec.report.h_vals = rec.xi.h;
          rec.has_xi = true;
        }
      });
    });
  }
}

void plan_spectrum(const PolarGrid& g, const Scenario& sc,
                   std::vector<RunRecord>& records,
                   std::vector<std::function<void()>>& jobs) {
  for (int k : sc.k_list) {
    RunRecord rec;
    rec.id = "k" + std::to_string(k) + "-spectrum";
    rec.k = k;
    records.push_back(std::move(rec));
  }
  for (size_t idx = 0; idx < records.size(); ++idx) {
    RunRecord& rec = records[idx];
    jobs.push_back([&g, &sc, &rec] {
      guard(rec, [&] {
        const int k = rec.k;
        const Field zero(g);
        const Field V = eval_fp(g, sc.nonlin, zero);
        const OperatorMatrix op =
            with_potential(build_laplacian(g, full_mask(g)), V);
        const SpectrumResult sp =
            smallest_eigs(g, op, sc.num_eigs, Subspace::k_invariant(k));
        rec.eigenvalues = sp.eigenvalues;
        rec.has_eigs = true;
        rec.u = zero;  // the experiment linearizes at the zero state
        fill_morse(g, rec, sc.nonlin, k);
        const Direction axis = direction_from_index(g, 0);
        rec.lambda1_plus =
            sector_lambda1(g, zero, sc.nonlin, {k, axis, SectorPart::Plus}).first;
        rec.lambda1_minus =
            sector_lambda1(g, zero, sc.nonlin, {k, axis, SectorPart::Minus}).first;
        rec.has_sector = true;
      });
    });
  }
}

void plan_multiplicity(const PolarGrid& g, const Scenario& sc,
                       std::vector<RunRecord>& records,
                       std::vector<std::function<void()>>& jobs) {
  RunRecord radial;
  radial.id = "radial";
  radial.k = 0;
  records.push_back(std::move(radial));
  for (int k : sc.k_list) {
    RunRecord rec;
    rec.id = "k" + std::to_string(k) + "-" + sc.seeds.front();
    rec.k = k;
    rec.seed = sc.seeds.front();
    records.push_back(std::move(rec));
  }
  for (size_t idx = 0; idx < records.size(); ++idx) {
    RunRecord& rec = records[idx];
    jobs.push_back([&g, &sc, &rec] {
      guard(rec, [&] {
        if (rec.k == 0) {
          const int zeros = sc.mode == NehariMode::Nodal ? 1 : 0;
          const RadialProfile prof =
              solve_radial(g.domain, sc.nonlin, zeros, g.n_r);
          SolveResult sol;
          sol.u = lift_radial(g, prof);
          sol.energy = energy(g, sc.nonlin, sol.u);
          sol.residual =
              pde_residual(g, sc.nonlin, sol.u).v.lpNorm<Eigen::Infinity>();
          sol.provenance = "radial-lift";
          fill_solution(rec, std::move(sol));
          fill_morse(g, rec, sc.nonlin, 1);
          fill_report(g, rec, sc.nonlin, 1);
        } else {
          fill_solution(rec, solve_branch(g, sc, rec.k, rec.seed));
          fill_morse(g, rec, sc.nonlin, rec.k);
          fill_report(g, rec, sc.nonlin, rec.k);
        }
      });
    });
  }
}

void finish_multiplicity(const PolarGrid& g, RunManifest& m) {
  const size_t n = m.runs.size();
  m.rotation_distance.assign(n, std::vector<double>(n, -1.0));
  m.energy_gap.assign(n, std::vector<double>(n, -1.0));
  m.pair_distinct.assign(n, std::vector<int>(n, 0));
  for (size_t i = 0; i < n; ++i) {
    if (!m.runs[i].has_solution) continue;
    m.rotation_distance[i][i] = 0.0;
    m.energy_gap[i][i] = 0.0;
    SolveResult a;
    a.u = m.runs[i].u;
    a.energy = m.runs[i].energy;
    for (size_t j = i + 1; j < n; ++j) {
      if (!m.runs[j].has_solution) continue;
      SolveResult b;
      b.u = m.runs[j].u;
      b.energy = m.runs[j].energy;
      const Distinctness d = distinctness(g, a, b);
      m.rotation_distance[i][j] = m.rotation_distance[j][i] = d.rotation_distance;
      m.energy_gap[i][j] = m.energy_gap[j][i] = d.energy_gap;
      m.pair_distinct[i][j] = m.pair_distinct[j][i] = d.distinct ? 1 : 0;
    }
  }
  // Greedy representative count: a run opens a new class when it is distinct
  // from every representative found before it (fixed manifest order).
  std::vector<size_t> reps;
  for (size_t i = 0; i < n; ++i) {
    if (!m.runs[i].has_solution) continue;
    bool fresh = true;
    for (size_t r : reps)
      if (!m.pair_distinct[r][i]) {
        fresh = false;
        break;
      }
    if (fresh) reps.push_back(i);
  }
  m.distinct_count = static_cast<int>(reps.size());
  m.expected_count = expected_solution_count(m.scenario);
  m.has_distinctness = true;
}

void plan_refinement(const Scenario& sc, std::vector<RunRecord>& records,
                     std::vector<std::function<void()>>& jobs) {
  for (const char* name : {"refine-coarse", "refine-fine"}) {
    RunRecord rec;
    rec.id = name;
    rec.k = sc.k_list.front();
    records.push_back(std::move(rec));
  }
  for (int level = 0; level < 2; ++level) {
    RunRecord& rec = records[level];
    jobs.push_back([&sc, &rec, level] {
      guard(rec, [&] {
        const int scale = level == 0 ? 1 : 2;
        const PolarGrid g =
            make_grid(sc.domain, scale * sc.n_r, scale * sc.n_theta);
        const Field zero(g);
        const Field V = eval_fp(g, sc.nonlin, zero);
        const OperatorMatrix op =
            with_potential(build_laplacian(g, full_mask(g)), V);
        const double lam_full =
            smallest_eigs(g, op, 1, Subspace::full()).eigenvalues.front();
        const Direction axis = direction_from_index(g, 0);
        const double lam_sector =
            sector_lambda1(g, zero, sc.nonlin,
                           {rec.k, axis, SectorPart::Plus})
                .first;
        rec.eigenvalues = {lam_full, lam_sector};
        rec.has_eigs = true;
        rec.lambda1_plus = lam_sector;
        rec.has_sector = true;
      });
    });
  }
}

void finish_refinement(RunManifest& m) {
  RefinementStudy& st = m.refinement;
  if (m.runs.size() != 2 || !m.runs[0].has_eigs || !m.runs[1].has_eigs) return;
  st.present = true;
  st.lambda_full_coarse = m.runs[0].eigenvalues[0];
  st.lambda_sector_coarse = m.runs[0].eigenvalues[1];
  st.lambda_full_fine = m.runs[1].eigenvalues[0];
  st.lambda_sector_fine = m.runs[1].eigenvalues[1];
  const Nonlinearity& nl = m.scenario.nonlin;
  const bool zero_linearization =
      (nl.kind == NonlinKind::LaneEmden || nl.kind == NonlinKind::Henon) &&
      nl.p > 1.0;
  if (!zero_linearization) return;
  double ref_full = 0.0, ref_sector = 0.0;
  if (!reference_eigenvalues(m.scenario.domain, m.scenario.k_list.front(),
                             ref_full, ref_sector))
    return;
  st.has_reference = true;
  st.reference_full = ref_full;
  st.reference_sector = ref_sector;
  const auto ratio = [](double coarse, double fine, double ref) {
    const double ec = std::abs(coarse - ref), ef = std::abs(fine - ref);
    return ef > 0.0 ? ec / ef : 0.0;
  };
  st.ratio_full = ratio(st.lambda_full_coarse, st.lambda_full_fine, ref_full);
  st.ratio_sector =
      ratio(st.lambda_sector_coarse, st.lambda_sector_fine, ref_sector);
}

}  // namespace

int expected_solution_count(const Scenario& sc) {
  const bool weighted_disk = sc.nonlin.kind == NonlinKind::Henon &&
                             sc.domain.kind == DomainKind::Disk;
  if (weighted_disk) {
    const double a = sc.nonlin.alpha;
    if (sc.mode == NehariMode::Positive)
      return 1 + static_cast<int>(std::ceil(a / 2.0));
    return 1 +
           static_cast<int>(std::ceil((2.0 + a) * kWeightedCountConstant / 2.0));
  }
  int kmax = 1;
  for (int k : sc.k_list) kmax = std::max(kmax, k);
  return kmax + 1;
}

RunManifest run_scenario(const Scenario& sc, const std::string& scenario_bytes,
                         int workers) {
  sc.validate();
  RunManifest m;
  m.tool_version = kToolVersion;
  m.scenario_hash = content_hash(scenario_bytes);
  m.scenario = sc;

  const PolarGrid g = make_grid(sc.domain, sc.n_r, sc.n_theta);
  std::vector<std::function<void()>> jobs;
  switch (sc.experiment) {
    case Experiment::Solve:
      plan_solutions(g, sc, m.runs, jobs, /*plain_newton=*/true, false);
      break;
    case Experiment::Classify:
      plan_solutions(g, sc, m.runs, jobs, /*plain_newton=*/false, false);
      break;
    case Experiment::XiDiagnostic:
      plan_solutions(g, sc, m.runs, jobs, /*plain_newton=*/false, true);
      break;
    case Experiment::Spectrum:
      plan_spectrum(g, sc, m.runs, jobs);
      break;
    case Experiment::Multiplicity:
      plan_multiplicity(g, sc, m.runs, jobs);
      break;
    case Experiment::Refinement:
      plan_refinement(sc, m.runs, jobs);
      break;
  }
  run_pool(jobs, workers);

  if (sc.experiment == Experiment::Multiplicity) finish_multiplicity(g, m);
  if (sc.experiment == Experiment::Refinement) finish_refinement(m);

  m.total_wall_seconds = 0.0;
  for (const RunRecord& r : m.runs) m.total_wall_seconds += r.wall_seconds;
  return m;
}

bool all_runs_ok(const RunManifest& manifest) {
  for (const RunRecord& r : manifest.runs)
    if (r.status != "ok") return false;
  return true;
}

// ---- serialization -------------------------------------------------------

namespace {

json domain_json(const DomainSpec& d) {
  return {{"kind", to_string(d.kind)},
          {"r_inner", d.r_inner},
          {"r_outer", d.r_outer}};
}

json nonlin_json(const Nonlinearity& nl) {
  json j{{"kind", to_string(nl.kind)}};
  switch (nl.kind) {
    case NonlinKind::LaneEmden: j["p"] = nl.p; break;
    case NonlinKind::Henon:
      j["p"] = nl.p;
      j["alpha"] = nl.alpha;
      break;
    case NonlinKind::Gelfand:
      j["lambda"] = nl.lambda;
      j["alpha"] = nl.alpha;
      break;
    case NonlinKind::SinhPoisson:
      j["eps"] = nl.eps;
      j["alpha"] = nl.alpha;
      break;
  }
  return j;
}

json scenario_json(const Scenario& sc) {
  json j;
  j["experiment"] = to_string(sc.experiment);
  j["domain"] = domain_json(sc.domain);
  j["grid"] = {{"n_r", sc.n_r}, {"n_theta", sc.n_theta}};
  j["nonlinearity"] = nonlin_json(sc.nonlin);
  j["k_list"] = sc.k_list;
  j["seeds"] = sc.seeds;
  j["mode"] = to_string(sc.mode);
  j["num_eigs"] = sc.num_eigs;
  j["tolerances"] = {{"newton_tol", sc.tol.newton_tol}};
  return j;
}

json run_json(const RunRecord& r) {
  json j;
  j["id"] = r.id;
  j["k"] = r.k;
  if (!r.seed.empty()) j["seed"] = r.seed;
  j["status"] = r.status;
  if (r.status != "ok") j["error"] = r.error;
  if (r.has_solution) {
    j["energy"] = r.energy;
    j["residual"] = r.residual;
    j["iterations"] = r.iterations;
    if (!r.constraint_residuals.empty())
      j["constraint_residuals"] = r.constraint_residuals;
    j["provenance"] = r.provenance;
  }
  if (r.has_morse) {
    j["m_full"] = r.m_full;
    j["m_full_marginal"] = r.m_full_marginal;
    j["m_k"] = r.m_k;
    j["m_k_marginal"] = r.m_k_marginal;
  }
  if (r.has_report) {
    const SymmetryReport& rep = r.report;
    j["verdict"] = to_string(rep.verdict);
    if (!rep.details.empty()) j["verdict_details"] = rep.details;
    j["psi_star"] = rep.psi_star;
    j["psi_star_index"] = rep.psi_star_index;
    j["u_theta_ratio"] = rep.u_theta_ratio;
    j["w_star_ratio"] = rep.w_star_ratio;
    j["psi_tilde"] = rep.scan.psi_tilde;
    j["near_minimal_axes"] = rep.scan.near_minimal;
    json prof = json::array();
    for (const DirectionStats& st : rep.scan.table)
      prof.push_back({{"psi", st.psi},
                      {"w_min", st.w_min},
                      {"w_max", st.w_max},
                      {"w_sup", st.w_sup}});
    j["w_profile"] = std::move(prof);
    j["monotonicity"] = {{"neg_frac_plus", rep.monotonicity.neg_frac_plus},
                         {"pos_frac_plus", rep.monotonicity.pos_frac_plus},
                         {"neg_frac_minus", rep.monotonicity.neg_frac_minus},
                         {"pos_frac_minus", rep.monotonicity.pos_frac_minus},
                         {"strict", rep.monotonicity.strict}};
    j["extrema"] = {{"total", rep.extrema_total},
                    {"off_axis", rep.extrema_off_axis}};
    j["zero_tol"] = rep.zero_tol;
  }
  if (r.has_sector) {
    j["lambda1_plus"] = r.lambda1_plus;
    j["lambda1_minus"] = r.lambda1_minus;
  }
  if (r.has_eigs) j["eigenvalues"] = r.eigenvalues;
  if (r.has_xi) {
    const XiDiagnostic& xi = r.xi;
    j["xi"] = {{"psi", xi.psi},
               {"h", xi.h},
               {"a_weight", xi.a_weight},
               {"b_weight", xi.b_weight},
               {"lambda_plus", xi.lambda_plus},
               {"lambda_minus", xi.lambda_minus},
               {"endpoint_defect", xi.endpoint_defect},
               {"endpoint_ok", xi.endpoint_ok},
               {"sign_change_lo", xi.sign_change_lo},
               {"located_index", xi.located_index},
               {"psi_prime", xi.psi_prime},
               {"lambda_plus_at_prime", xi.lambda_plus_at_prime},
               {"lambda_minus_at_prime", xi.lambda_minus_at_prime},
               {"sector_nonneg_ok", xi.sector_nonneg_ok},
               {"zero_tol", xi.zero_tol}};
  }
  json files = json::object();
  if (!r.field_base.empty()) files["u"] = r.field_base;
  if (!r.w_field_base.empty()) files["w"] = r.w_field_base;
  j["files"] = std::move(files);
  return j;
}

std::string csv_cell(double x) { return format_double(x); }

std::string summary_csv(const RunManifest& m) {
  std::string out =
      "run,k,energy,residual,m_full,m_k,verdict,psi_star,lambda1_plus,"
      "lambda1_minus\n";
  for (const RunRecord& r : m.runs) {
    out += r.id + "," + std::to_string(r.k) + ",";
    out += (r.has_solution ? csv_cell(r.energy) : "") + ",";
    out += (r.has_solution ? csv_cell(r.residual) : "") + ",";
    out += (r.has_morse ? std::to_string(r.m_full) : "") + ",";
    out += (r.has_morse ? std::to_string(r.m_k) : "") + ",";
    out += (r.has_report ? to_string(r.report.verdict) : "") + ",";
    out += (r.has_report ? csv_cell(r.report.psi_star) : "") + ",";
    out += (r.has_sector ? csv_cell(r.lambda1_plus) : "") + ",";
    out += (r.has_sector ? csv_cell(r.lambda1_minus) : "");
    out += "\n";
  }
  return out;
}

}  // namespace

void emit_outputs(RunManifest& m, const std::string& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory " + out_dir + ": " +
                        ec.message());
  const auto path = [&](const std::string& name) { return out_dir + "/" + name; };

  for (RunRecord& r : m.runs) {
    if (r.has_solution) {
      r.field_base = r.id + "_u";
      save_field(path(r.field_base), m.scenario.domain, r.u);
      write_pgm(path(r.field_base + ".pgm"), r.u);
    }
    if (r.has_report) {
      r.w_field_base = r.id + "_w";
      save_field(path(r.w_field_base), m.scenario.domain, r.w_star);
      write_pgm(path(r.w_field_base + ".pgm"), r.w_star);
    }
  }

  json report;
  report["tool_version"] = m.tool_version;
  report["scenario_hash"] = m.scenario_hash;
  report["scenario"] = scenario_json(m.scenario);
  json runs = json::array();
  for (const RunRecord& r : m.runs) runs.push_back(run_json(r));
  report["runs"] = std::move(runs);
  if (m.has_distinctness) {
    report["distinctness"] = {{"rotation_distance", m.rotation_distance},
                              {"energy_gap", m.energy_gap},
                              {"pair_distinct", m.pair_distinct},
                              {"distinct_count", m.distinct_count},
                              {"expected_count", m.expected_count}};
  }
  if (m.refinement.present) {
    const RefinementStudy& st = m.refinement;
    json ref{{"lambda_full_coarse", st.lambda_full_coarse},
             {"lambda_full_fine", st.lambda_full_fine},
             {"lambda_sector_coarse", st.lambda_sector_coarse},
             {"lambda_sector_fine", st.lambda_sector_fine}};
    if (st.has_reference) {
      ref["reference_full"] = st.reference_full;
      ref["reference_sector"] = st.reference_sector;
      ref["ratio_full"] = st.ratio_full;
      ref["ratio_sector"] = st.ratio_sector;
    }
    report["refinement"] = std::move(ref);
  }
  write_text_file(path("report.json"), report.dump(2) + "\n");
  write_text_file(path("summary.csv"), summary_csv(m));

  const bool single_k = m.scenario.k_list.size() == 1;
  for (const RunRecord& r : m.runs) {
    if (!r.has_xi) continue;
    std::string csv = "psi,h\n";
    for (size_t i = 0; i < r.xi.psi.size(); ++i)
      csv += format_double(r.xi.psi[i]) + "," + format_double(r.xi.h[i]) + "\n";
    const std::string name =
        single_k ? "h_profile.csv" : "h_profile_k" + std::to_string(r.k) + ".csv";
    write_text_file(path(name), csv);
  }

  std::string timings;
  for (const RunRecord& r : m.runs)
    timings += r.id + " " + format_double(r.wall_seconds) + "\n";
  timings += "total " + format_double(m.total_wall_seconds) + "\n";
  write_text_file(path("timings.txt"), timings);
}

}  // namespace sectorsym

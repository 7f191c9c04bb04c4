#include "sectorsym/scenario.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include <json.hpp>

#include "sectorsym/errors.hpp"
#include "sectorsym/field_io.hpp"

namespace sectorsym {

namespace {

using json = nlohmann::ordered_json;

void reject_unknown(const json& obj, const std::string& path,
                    const std::set<std::string>& allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.count(it.key()))
      throw ConfigError(path + ": unknown key \"" + it.key() + "\"");
}

const json* find(const json& obj, const char* key) {
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

double as_number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path + ": expected a number");
  return j.get<double>();
}

int as_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw ConfigError(path + ": expected an integer");
  return j.get<int>();
}

std::string as_string(const json& j, const std::string& path) {
  if (!j.is_string()) throw ConfigError(path + ": expected a string");
  return j.get<std::string>();
}

DomainSpec parse_domain(const json& j) {
  if (!j.is_object()) throw ConfigError("domain: expected an object");
  reject_unknown(j, "domain", {"kind", "r_inner", "r_outer"});
  const json* kind = find(j, "kind");
  if (!kind) throw ConfigError("domain.kind: required");
  DomainSpec d;
  d.kind = domain_kind_from_string(as_string(*kind, "domain.kind"));
  if (const json* v = find(j, "r_inner")) d.r_inner = as_number(*v, "domain.r_inner");
  if (const json* v = find(j, "r_outer")) d.r_outer = as_number(*v, "domain.r_outer");
  return d;
}

Nonlinearity parse_nonlinearity(const json& j) {
  if (!j.is_object()) throw ConfigError("nonlinearity: expected an object");
  const json* kind = find(j, "kind");
  if (!kind) throw ConfigError("nonlinearity.kind: required");
  Nonlinearity nl;
  nl.kind = nonlin_kind_from_string(as_string(*kind, "nonlinearity.kind"));
  std::set<std::string> allowed = {"kind"};
  switch (nl.kind) {
    case NonlinKind::LaneEmden: allowed.insert("p"); break;
    case NonlinKind::Henon: allowed.insert({"p", "alpha"}); break;
    case NonlinKind::Gelfand: allowed.insert({"lambda", "alpha"}); break;
    case NonlinKind::SinhPoisson: allowed.insert({"eps", "alpha"}); break;
  }
  reject_unknown(j, "nonlinearity", allowed);
  if (const json* v = find(j, "p")) nl.p = as_number(*v, "nonlinearity.p");
  if (const json* v = find(j, "alpha")) nl.alpha = as_number(*v, "nonlinearity.alpha");
  if (const json* v = find(j, "lambda")) nl.lambda = as_number(*v, "nonlinearity.lambda");
  if (const json* v = find(j, "eps")) nl.eps = as_number(*v, "nonlinearity.eps");
  return nl;
}

}  // namespace

std::string to_string(Experiment e) {
  switch (e) {
    case Experiment::Solve: return "Solve";
    case Experiment::Spectrum: return "Spectrum";
    case Experiment::Classify: return "Classify";
    case Experiment::Multiplicity: return "Multiplicity";
    case Experiment::XiDiagnostic: return "XiDiagnostic";
    case Experiment::Refinement: return "Refinement";
  }
  return "Solve";
}

Experiment experiment_from_string(const std::string& s) {
  if (s == "Solve") return Experiment::Solve;
  if (s == "Spectrum") return Experiment::Spectrum;
  if (s == "Classify") return Experiment::Classify;
  if (s == "Multiplicity") return Experiment::Multiplicity;
  if (s == "XiDiagnostic") return Experiment::XiDiagnostic;
  if (s == "Refinement") return Experiment::Refinement;
  throw ConfigError(
      "experiment: unknown value \"" + s +
      "\" (expected Solve, Spectrum, Classify, Multiplicity, XiDiagnostic, or "
      "Refinement)");
}

std::string to_string(NehariMode m) {
  return m == NehariMode::Positive ? "positive" : "nodal";
}

NehariMode nehari_mode_from_string(const std::string& s) {
  if (s == "positive") return NehariMode::Positive;
  if (s == "nodal") return NehariMode::Nodal;
  throw ConfigError("mode: unknown value \"" + s +
                    "\" (expected positive or nodal)");
}

void Scenario::validate() const {
  domain.validate();
  nonlin.validate();
  if (n_r < 2) throw ConfigError("grid.n_r: must be at least 2");
  if (n_theta < 4 || n_theta % 2 != 0)
    throw ConfigError("grid.n_theta: must be even and at least 4");
  if (k_list.empty()) throw ConfigError("k_list: must not be empty");
  std::set<int> seen;
  long long l = 1;
  for (size_t i = 0; i < k_list.size(); ++i) {
    const std::string path = "k_list[" + std::to_string(i) + "]";
    if (k_list[i] < 1) throw ConfigError(path + ": must be a positive integer");
    if (!seen.insert(k_list[i]).second)
      throw ConfigError(path + ": duplicate entry " + std::to_string(k_list[i]));
    l = std::lcm(l, static_cast<long long>(k_list[i]));
  }
  if (n_theta % (2 * l) != 0)
    throw ConfigError("grid.n_theta: must be divisible by 2*lcm(k_list) = " +
                      std::to_string(2 * l));
  if (seeds.empty()) throw ConfigError("seeds: must not be empty");
  for (size_t i = 0; i < seeds.size(); ++i)
    if (seeds[i] != "radial" && seeds[i] != "cos-mode" && seeds[i] != "peaks")
      throw ConfigError("seeds[" + std::to_string(i) + "]: unknown named seed \"" +
                        seeds[i] + "\" (expected radial, cos-mode, or peaks)");
  if (num_eigs < 1) throw ConfigError("num_eigs: must be at least 1");
  if (!(tol.newton_tol > 0.0))
    throw ConfigError("tolerances.newton_tol: must be positive");
}

Scenario parse_scenario(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("scenario: not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("scenario: not a JSON object");
  reject_unknown(root, "scenario",
                 {"domain", "grid", "nonlinearity", "experiment", "k_list",
                  "seeds", "mode", "num_eigs", "tolerances"});

  Scenario sc;
  const json* dom = find(root, "domain");
  if (!dom) throw ConfigError("domain: required");
  sc.domain = parse_domain(*dom);

  if (const json* grid = find(root, "grid")) {
    if (!grid->is_object()) throw ConfigError("grid: expected an object");
    reject_unknown(*grid, "grid", {"n_r", "n_theta"});
    const json* nr = find(*grid, "n_r");
    const json* nt = find(*grid, "n_theta");
    if (!nr) throw ConfigError("grid.n_r: required");
    if (!nt) throw ConfigError("grid.n_theta: required");
    sc.n_r = as_int(*nr, "grid.n_r");
    sc.n_theta = as_int(*nt, "grid.n_theta");
  }

  const json* nl = find(root, "nonlinearity");
  if (!nl) throw ConfigError("nonlinearity: required");
  sc.nonlin = parse_nonlinearity(*nl);

  const json* exp = find(root, "experiment");
  if (!exp) throw ConfigError("experiment: required");
  sc.experiment = experiment_from_string(as_string(*exp, "experiment"));

  const json* kl = find(root, "k_list");
  if (!kl) throw ConfigError("k_list: required");
  if (!kl->is_array()) throw ConfigError("k_list: expected an array");
  sc.k_list.clear();
  for (size_t i = 0; i < kl->size(); ++i)
    sc.k_list.push_back(as_int((*kl)[i], "k_list[" + std::to_string(i) + "]"));

  if (const json* sd = find(root, "seeds")) {
    if (!sd->is_array()) throw ConfigError("seeds: expected an array");
    sc.seeds.clear();
    for (size_t i = 0; i < sd->size(); ++i)
      sc.seeds.push_back(as_string((*sd)[i], "seeds[" + std::to_string(i) + "]"));
  }

  if (const json* md = find(root, "mode"))
    sc.mode = nehari_mode_from_string(as_string(*md, "mode"));
  if (const json* ne = find(root, "num_eigs"))
    sc.num_eigs = as_int(*ne, "num_eigs");
  if (const json* tl = find(root, "tolerances")) {
    if (!tl->is_object()) throw ConfigError("tolerances: expected an object");
    reject_unknown(*tl, "tolerances", {"newton_tol"});
    if (const json* v = find(*tl, "newton_tol"))
      sc.tol.newton_tol = as_number(*v, "tolerances.newton_tol");
  }

  sc.validate();
  return sc;
}

Scenario load_scenario(const std::string& path) {
  return parse_scenario(read_text_file(path));
}

std::string content_hash(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string("fnv1a:") + buf;
}

}  // namespace sectorsym

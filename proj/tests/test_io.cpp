#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unistd.h>

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>

#include "oracles.hpp"
#include "sectorsym/errors.hpp"
#include "sectorsym/field_io.hpp"
#include "sectorsym/grid.hpp"
#include "sectorsym/scenario.hpp"

using namespace sectorsym;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("sectorsym_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static int& counter() {
    static int c = 0;
    return c;
  }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

const char* kValidScenario = R"({
  "domain": {"kind": "Annulus", "r_inner": 0.5, "r_outer": 1.0},
  "grid": {"n_r": 32, "n_theta": 24},
  "nonlinearity": {"kind": "Henon", "p": 4.0, "alpha": 8.0},
  "experiment": "Classify",
  "k_list": [1, 2],
  "seeds": ["radial", "cos-mode"],
  "mode": "positive",
  "num_eigs": 4,
  "tolerances": {"newton_tol": 1e-9}
})";

}  // namespace

TEST_CASE("field container round-trips bit-exactly") {
  TempDir tmp;
  PolarGrid g = make_grid({DomainKind::Annulus, 0.25, 1.25}, 12, 16);
  Field f = oracles::random_field(g, 2024);
  // adversarial values: signed zeros, denormals, extremes
  f.at(0, 0) = -0.0;
  f.at(0, 1) = std::numeric_limits<double>::denorm_min();
  f.at(0, 2) = -std::numeric_limits<double>::max();
  f.at(0, 3) = std::numeric_limits<double>::min();
  save_field(tmp.file("a"), g.domain, f);
  FieldFile ff = load_field(tmp.file("a"));
  CHECK(ff.domain.kind == DomainKind::Annulus);
  CHECK(ff.domain.r_inner == 0.25);
  CHECK(ff.domain.r_outer == 1.25);
  REQUIRE(ff.field.n_r == 12);
  REQUIRE(ff.field.n_theta == 16);
  for (int n = 0; n < g.size(); ++n) {
    std::uint64_t orig, back;
    std::memcpy(&orig, &f.v[n], 8);
    std::memcpy(&back, &ff.field.v[n], 8);
    CHECK(orig == back);  // bit pattern, not just value
  }
  // loading through the header path spelling works too
  FieldFile ff2 = load_field(tmp.file("a.json"));
  CHECK(ff2.field.v == ff.field.v);
}

TEST_CASE("save twice produces byte-identical files") {
  TempDir tmp;
  PolarGrid g = make_grid({DomainKind::Disk, 0.0, 1.0}, 8, 8);
  Field f = oracles::random_field(g, 77);
  save_field(tmp.file("x"), g.domain, f);
  save_field(tmp.file("y"), g.domain, f);
  CHECK(read_text_file(tmp.file("x.json")) == read_text_file(tmp.file("y.json")));
  CHECK(read_text_file(tmp.file("x.f64")) == read_text_file(tmp.file("y.f64")));
}

TEST_CASE("truncated payload is detected") {
  TempDir tmp;
  PolarGrid g = make_grid({DomainKind::Disk, 0.0, 1.0}, 6, 8);
  Field f = oracles::random_field(g, 5);
  save_field(tmp.file("t"), g.domain, f);
  // chop the payload
  std::string raw = read_text_file(tmp.file("t.f64"));
  write_text_file(tmp.file("t.f64"), raw.substr(0, raw.size() - 8));
  CHECK_THROWS_AS(load_field(tmp.file("t")), TruncatedPayload);
}

TEST_CASE("header validation failures name the offending field") {
  TempDir tmp;
  PolarGrid g = make_grid({DomainKind::Disk, 0.0, 1.0}, 4, 4);
  Field f = oracles::random_field(g, 6);

  auto corrupt = [&](const std::string& from, const std::string& to) {
    save_field(tmp.file("h"), g.domain, f);
    std::string header = read_text_file(tmp.file("h.json"));
    const auto at = header.find(from);
    REQUIRE(at != std::string::npos);
    header.replace(at, from.size(), to);
    write_text_file(tmp.file("h.json"), header);
  };

  corrupt("\"format_version\": 1", "\"format_version\": 2");
  CHECK_THROWS_AS(load_field(tmp.file("h")), FormatError);

  corrupt("\"byte_order\": \"little\"", "\"byte_order\": \"big\"");
  CHECK_THROWS_AS(load_field(tmp.file("h")), FormatError);

  corrupt("\"dtype\": \"float64\"", "\"dtype\": \"float32\"");
  CHECK_THROWS_AS(load_field(tmp.file("h")), FormatError);

  corrupt("\"N_r\": 4", "\"N_r\": 8");  // count no longer matches the shape
  CHECK_THROWS_AS(load_field(tmp.file("h")), FormatError);

  corrupt("\"count\": 16", "\"count\": 16, \"extra\": 3");
  CHECK_THROWS_AS(load_field(tmp.file("h")), FormatError);

  save_field(tmp.file("h"), g.domain, f);
  write_text_file(tmp.file("h.json"), "not json at all");
  CHECK_THROWS_AS(load_field(tmp.file("h")), FormatError);

  CHECK_THROWS_AS(load_field(tmp.file("missing")), IoError);
}

TEST_CASE("graymap output: shape, scaling, radial columns") {
  TempDir tmp;
  PolarGrid g = make_grid({DomainKind::Disk, 0.0, 1.0}, 10, 6);
  Field f(g);
  for (int i = 0; i < g.n_r; ++i)
    for (int j = 0; j < g.n_theta; ++j) f.at(i, j) = g.r[i];  // radial ramp
  write_pgm(tmp.file("r.pgm"), f);
  std::string pgm = read_text_file(tmp.file("r.pgm"));
  const std::string header = "P5\n10 6\n255\n";
  REQUIRE(pgm.substr(0, header.size()) == header);
  REQUIRE(pgm.size() == header.size() + 60);
  const unsigned char* px =
      reinterpret_cast<const unsigned char*>(pgm.data() + header.size());
  // radial field: every column constant down the rows
  for (int i = 0; i < 10; ++i)
    for (int j = 1; j < 6; ++j) CHECK(px[j * 10 + i] == px[i]);
  // min-max scaling: first column 0, last column 255
  CHECK(px[0] == 0);
  CHECK(px[9] == 255);

  Field c(g);
  c.v.setConstant(3.5);
  write_pgm(tmp.file("c.pgm"), c);
  std::string cpgm = read_text_file(tmp.file("c.pgm"));
  for (size_t i = header.size(); i < cpgm.size(); ++i)
    CHECK(static_cast<unsigned char>(cpgm[i]) == 0);  // constant maps to black
}

TEST_CASE("format_double round-trips exactly") {
  for (double x : {0.1, 1.0 / 3.0, 5.783185962946783, -0.0, 1e-308, 2e300}) {
    const std::string s = format_double(x);
    // strtod, not std::stod: the latter throws out_of_range on subnormal
    // results even though the conversion itself is exact.
    char* end = nullptr;
    const double back = std::strtod(s.c_str(), &end);
    CHECK(back == x);
    CHECK(*end == '\0');
  }
  CHECK(std::signbit(std::strtod(format_double(-0.0).c_str(), nullptr)));
}

TEST_CASE("valid scenario parses with all fields") {
  Scenario sc = parse_scenario(kValidScenario);
  CHECK(sc.domain.kind == DomainKind::Annulus);
  CHECK(sc.domain.r_inner == 0.5);
  CHECK(sc.n_r == 32);
  CHECK(sc.n_theta == 24);
  CHECK(sc.nonlin.kind == NonlinKind::Henon);
  CHECK(sc.nonlin.p == 4.0);
  CHECK(sc.nonlin.alpha == 8.0);
  CHECK(sc.experiment == Experiment::Classify);
  CHECK(sc.k_list == std::vector<int>{1, 2});
  CHECK(sc.seeds == std::vector<std::string>{"radial", "cos-mode"});
  CHECK(sc.mode == NehariMode::Positive);
  CHECK(sc.num_eigs == 4);
  CHECK(sc.tol.newton_tol == 1e-9);
  CHECK_NOTHROW(sc.validate());
}

TEST_CASE("scenario defaults: grid 128x128, radial seed, positive mode") {
  Scenario sc = parse_scenario(R"({
    "domain": {"kind": "Disk", "r_outer": 1.0},
    "nonlinearity": {"kind": "LaneEmden", "p": 3.0},
    "experiment": "Solve",
    "k_list": [1]
  })");
  CHECK(sc.n_r == 128);
  CHECK(sc.n_theta == 128);
  CHECK(sc.seeds == std::vector<std::string>{"radial"});
  CHECK(sc.mode == NehariMode::Positive);
}

TEST_CASE("malformed scenario corpus is rejected with field paths") {
  auto reject = [](const std::string& body, const std::string& needle) {
    try {
      Scenario sc = parse_scenario(body);
      sc.validate();
      FAIL("accepted: " << body);
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find(needle) != std::string::npos);
    }
  };
  // unknown root key
  reject(R"({"domain": {"kind": "Disk", "r_outer": 1}, "nonlinearity":
    {"kind": "LaneEmden", "p": 3}, "experiment": "Solve", "k_list": [1],
    "sneaky": 1})",
         "sneaky");
  // missing required block
  reject(R"({"nonlinearity": {"kind": "LaneEmden", "p": 3},
    "experiment": "Solve", "k_list": [1]})",
         "domain");
  // unknown domain kind
  reject(R"({"domain": {"kind": "Square", "r_outer": 1}, "nonlinearity":
    {"kind": "LaneEmden", "p": 3}, "experiment": "Solve", "k_list": [1]})",
         "domain.kind");
  // wrong-kind parameter
  reject(R"({"domain": {"kind": "Disk", "r_outer": 1}, "nonlinearity":
    {"kind": "LaneEmden", "p": 3, "alpha": 2}, "experiment": "Solve",
    "k_list": [1]})",
         "alpha");
  // invalid exponent
  reject(R"({"domain": {"kind": "Disk", "r_outer": 1}, "nonlinearity":
    {"kind": "LaneEmden", "p": 1.0}, "experiment": "Solve", "k_list": [1]})",
         "p");
  // unknown experiment
  reject(R"({"domain": {"kind": "Disk", "r_outer": 1}, "nonlinearity":
    {"kind": "LaneEmden", "p": 3}, "experiment": "Dance", "k_list": [1]})",
         "experiment");
  // empty k_list
  reject(R"({"domain": {"kind": "Disk", "r_outer": 1}, "nonlinearity":
    {"kind": "LaneEmden", "p": 3}, "experiment": "Solve", "k_list": []})",
         "k_list");
  // duplicate k
  reject(R"({"domain": {"kind": "Disk", "r_outer": 1}, "nonlinearity":
    {"kind": "LaneEmden", "p": 3}, "experiment": "Solve", "k_list": [2, 2]})",
         "k_list");
  // grid not divisible by 2 lcm(k_list)
  reject(R"({"domain": {"kind": "Disk", "r_outer": 1}, "grid":
    {"n_r": 16, "n_theta": 16}, "nonlinearity": {"kind": "LaneEmden", "p": 3},
    "experiment": "Solve", "k_list": [3]})",
         "n_theta");
  // unresolvable seed name
  reject(R"({"domain": {"kind": "Disk", "r_outer": 1}, "nonlinearity":
    {"kind": "LaneEmden", "p": 3}, "experiment": "Solve", "k_list": [1],
    "seeds": ["swirl"]})",
         "seeds");
  // bad mode
  reject(R"({"domain": {"kind": "Disk", "r_outer": 1}, "nonlinearity":
    {"kind": "LaneEmden", "p": 3}, "experiment": "Solve", "k_list": [1],
    "mode": "both"})",
         "mode");
  // annulus without inner radius
  reject(R"({"domain": {"kind": "Annulus", "r_outer": 1}, "nonlinearity":
    {"kind": "LaneEmden", "p": 3}, "experiment": "Solve", "k_list": [1]})",
         "r_inner");
  // grid block must carry both sizes
  reject(R"({"domain": {"kind": "Disk", "r_outer": 1}, "grid": {"n_r": 32},
    "nonlinearity": {"kind": "LaneEmden", "p": 3}, "experiment": "Solve",
    "k_list": [1]})",
         "grid");
  // not JSON at all
  CHECK_THROWS_AS(parse_scenario("]["), ConfigError);
}

TEST_CASE("content hash is deterministic and sensitive") {
  const std::string a = content_hash(kValidScenario);
  CHECK(a == content_hash(kValidScenario));
  CHECK(a.rfind("fnv1a:", 0) == 0);
  CHECK(a.size() == 6 + 16);
  std::string other(kValidScenario);
  other[other.find("4.0")] = '5';
  CHECK(content_hash(other) != a);
}

TEST_CASE("load_scenario reads from disk") {
  TempDir tmp;
  write_text_file(tmp.file("s.json"), kValidScenario);
  Scenario sc = load_scenario(tmp.file("s.json"));
  CHECK(sc.experiment == Experiment::Classify);
  CHECK_THROWS_AS(load_scenario(tmp.file("absent.json")), IoError);
}

#include <doctest.h>

#include "hsys/cli.hpp"
#include "hsys/poisson.hpp"
#include "hsys/tduality.hpp"
#include "hsys/version.hpp"

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace hsys;
using namespace hsys::cli;
namespace fs = std::filesystem;

namespace {

const fs::path kData = HSYS_DATA_DIR;

struct TempDir {
  fs::path path;
  TempDir() {
    std::random_device rd;
    path = fs::temp_directory_path() / ("hsys_cli_" + std::to_string(rd()) + std::to_string(rd()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json read_json(const fs::path& p) { return Json::parse(slurp(p)); }

fs::path write_file(const fs::path& dir, const std::string& name, const std::string& text) {
  std::ofstream(dir / name) << text;
  return dir / name;
}

const char* kPmBox = R"(
[search]
kappa1 = ["e1 - f1", "-e1 + f1", "e2 - f2", "-e2 + f2", "e3 - f3", "-e3 + f3"]
kappa2 = ["e1 - f1", "-e1 + f1", "e2 - f2", "-e2 + f2", "e3 - f3", "-e3 + f3"]
t = [1]
alpha = [2, -2]
r = [1, 24]
)";

}  // namespace

TEST_CASE("check: r = 22 valid, r = 23 fails rank-bound, malformed input is a usage error") {
  TempDir tmp;
  auto ok = run({"--out", tmp.path.string(), "check", (kData / "params_r22.json").string()});
  CHECK(ok.code == kExitOk);
  const auto cert = read_json(tmp.path / "certificate.json");
  CHECK(cert["valid"] == true);
  CHECK(cert["version"] == kVersion);

  auto bad = run({"--out", tmp.path.string(), "--json", "check", (kData / "params_r23.json").string()});
  CHECK(bad.code == kExitDomain);
  const auto j = Json::parse(bad.out);
  std::vector<std::string> failing;
  for (const auto& c : j["checks"])
    if (!c["ok"].get<bool>()) failing.push_back(c["name"]);
  REQUIRE(!failing.empty());
  CHECK(std::find(failing.begin(), failing.end(), "rank-bound") != failing.end());

  const auto junk = write_file(tmp.path, "junk.json", "{ not json");
  CHECK(run({"--out", tmp.path.string(), "check", junk.string()}).code == kExitUsage);
  const auto missing = write_file(tmp.path, "missing.json", R"({"kappa1": "e1-f1"})");
  CHECK(run({"--out", tmp.path.string(), "check", missing.string()}).code == kExitUsage);
  CHECK(run({"check", (tmp.path / "absent.json").string()}).code == kExitUsage);
}

TEST_CASE("check: certificate file round-trips") {
  TempDir tmp;
  REQUIRE(run({"--out", tmp.path.string(), "check", (kData / "params_r22.json").string()}).code == kExitOk);
  const auto j = read_json(tmp.path / "certificate.json");
  CHECK(anomaly::to_json(anomaly::certificate_from_json(j)) == j);
}

TEST_CASE("usage errors") {
  CHECK(run({}).code == kExitUsage);
  CHECK(run({"bogus"}).code == kExitUsage);
  CHECK(run({"check"}).code == kExitUsage);
  CHECK(run({"--threads", "0", "verify-forms"}).code == kExitUsage);
  CHECK(run({"--help"}).code == kExitOk);
  const auto v = run({"--version"});
  CHECK(v.code == kExitOk);
  CHECK(v.out.find(kVersion) != std::string::npos);
}

TEST_CASE("config: parsing and validation") {
  const auto c = parse_config(R"(
seed = 5
threads = 3
[search]
blocks = ["U1", "U2"]
box = 2
t = [1, "1/2"]
alpha = ["-2", 4]
r = [3, 7]
[grid]
dims = [8, 8]
lengths = [2.0, 1.0]
[tolerances]
residual = 1e-6
[orbit]
max_nodes = 10
denominator_bound = 3
)");
  CHECK(c.seed == 5);
  CHECK(c.threads == 3);
  CHECK(c.search.blocks == std::vector<std::string>{"U1", "U2"});
  CHECK(c.search.box == 2);
  CHECK(c.search.t == std::vector<Rational>{Rational(1), Rational(1, 2)});
  CHECK(c.search.alpha == std::vector<Rational>{Rational(-2), Rational(4)});
  CHECK(c.search.r_min == 3);
  CHECK(c.search.r_max == 7);
  CHECK(c.grid.dims == std::vector<std::size_t>{8, 8});
  CHECK(c.tolerances.residual == 1e-6);
  CHECK(c.tolerances.solvability == 1e-12);
  CHECK(c.orbit_max_nodes == 10);
  CHECK(c.denominator_bound == 3);

  CHECK_THROWS_AS(parse_config("[search\n"), ParseError);
  CHECK_THROWS_AS(parse_config("[search]\nblocks = [\"U9\"]\n"), ParseError);
  CHECK_THROWS_AS(parse_config("[search]\nalpha = [0]\n"), ParseError);
  CHECK_THROWS_AS(parse_config("[search]\nt = [\"1/0\"]\n"), ParseError);
  CHECK_THROWS_AS(parse_config("[search]\nmax_cells = inf\n"), ParseError);
  CHECK_THROWS_AS(parse_config("[tolerances]\nresidual = -1.0\n"), ParseError);
  CHECK_THROWS_AS(parse_config("[tolerances]\nresidual = nan\n"), ParseError);
  CHECK_THROWS_AS(parse_config("[grid]\ndims = [12, 16]\n"), ParseError);
  CHECK_THROWS_AS(parse_config("[search]\nkappa1 = [\"e1 + q\"]\n"), ParseError);
}

TEST_CASE("search: box enumeration and cell count") {
  SearchBounds b;
  b.blocks = {"U1"};
  b.box = 1;
  const auto cls = search_classes(b, 1);
  CHECK(cls.size() == 9);
  for (const auto& c : cls)
    for (std::size_t i = 2; i < lattice::kRank; ++i) CHECK(c.coords()[i] == 0);
  b.blocks = {"E8a", "U3"};
  b.box = 0;
  CHECK(search_classes(b, 2).size() == 1);
  b.box = 1;
  b.r_min = 1;
  b.r_max = 2;
  CHECK(cell_count(b) == doctest::Approx(std::pow(3.0, 20) * 2));
  b.max_cells = 1e6;
  CHECK_THROWS_AS(run_search(b, 1), std::invalid_argument);
  CHECK_THROWS_AS(block_indices("E8c"), std::invalid_argument);
}

TEST_CASE("search: +-(e_i - f_i) box with alpha = 2 is valid exactly for r <= 22") {
  const auto cfg = parse_config(kPmBox);
  const auto res = run_search(cfg.search, 4);
  CHECK(res.evaluated == 6 * 6 * 2 * 24);
  std::size_t alpha2 = 0;
  for (const auto& c : res.valid) {
    const auto& p = c.params;
    // Q(+-(e_i - f_i)) = -2, so c2(W) = 24 + (t / alpha)(-4).
    const Rational expected = Rational(24) + p.t() / p.alpha() * Rational(-4);
    CHECK(c.c2W == expected);
    if (p.alpha() == 2) {
      ++alpha2;
      CHECK(p.r() <= 22);
    }
  }
  CHECK(alpha2 == 36 * 22);
  for (const auto& [k, n] : res.summary)
    if (k.c2W == 22) CHECK(k.r <= 22);
}

TEST_CASE("search: alpha = 3 cells fail integrality") {
  auto cfg = parse_config(R"(
[search]
kappa1 = ["e1 - f1"]
kappa2 = ["e2 - f2"]
t = [1]
alpha = [3]
r = [1, 24]
)");
  const auto res = run_search(cfg.search, 2);
  CHECK(res.evaluated == 24);
  CHECK(res.valid.empty());
  const auto cert = anomaly::build_certificate(anomaly::SolutionParams(
      lattice::LatticeClass::parse("e1-f1"), lattice::LatticeClass::parse("e2-f2"), 1, 3, 10));
  bool integrality_failed = false;
  for (const auto& c : cert.checks)
    if (c.name == "integrality") integrality_failed = !c.ok;
  CHECK(integrality_failed);
}

TEST_CASE("search command: archive, empty box, determinism") {
  TempDir a, b, c;
  const auto cfg = write_file(a.path, "box.toml", kPmBox);
  const auto r1 = run({"--config", cfg.string(), "--out", a.path.string(), "--threads", "1", "search"});
  REQUIRE(r1.code == kExitOk);
  const auto r2 = run({"--config", cfg.string(), "--out", b.path.string(), "--threads", "7", "search"});
  REQUIRE(r2.code == kExitOk);
  const auto archive = slurp(a.path / "certificates.json");
  CHECK(archive == slurp(b.path / "certificates.json"));
  CHECK(r1.out == r2.out);
  const auto j = Json::parse(archive);
  CHECK(j["version"] == kVersion);
  CHECK(j["valid_count"] == j["certificates"].size());
  CHECK(!j.contains("timestamp"));
  CHECK(read_json(a.path / "certificates.meta.json").contains("timestamp"));
  for (const auto& cj : j["certificates"]) CHECK(anomaly::to_json(anomaly::certificate_from_json(cj)) == cj);

  const auto empty = write_file(c.path, "empty.toml", "[search]\nkappa1 = [\"e1-f1\"]\nkappa2 = [\"e2-f2\"]\nr = [5, 4]\n");
  const auto re = run({"--config", empty.string(), "--out", c.path.string(), "search"});
  CHECK(re.code == kExitOk);
  CHECK(read_json(c.path / "certificates.json")["certificates"].empty());

  const auto huge = write_file(c.path, "huge.toml", "[search]\nblocks = [\"E8a\", \"E8b\"]\nbox = 3\n");
  CHECK(run({"--config", huge.string(), "--out", c.path.string(), "search"}).code == kExitUsage);
  CHECK(run({"--out", c.path.string(), "search"}).code == kExitUsage);
  const auto broken = write_file(c.path, "broken.toml", "[search\n");
  CHECK(run({"--config", broken.string(), "search"}).code == kExitUsage);
}

TEST_CASE("dualize command: t = 2 invariants equal; failing precondition is a domain error") {
  TempDir tmp;
  const auto r = run({"--out", tmp.path.string(), "dualize", (kData / "params_t2.json").string()});
  CHECK(r.code == kExitOk);
  const auto dual = read_json(tmp.path / "dual_params.json");
  CHECK(dual["version"] == kVersion);
  const auto dp = anomaly::params_from_json(dual);
  CHECK(dp.t() == Rational(1, 2));
  CHECK(dp.kappa1() == lattice::LatticeClass::parse("-2e1+2f1"));
  CHECK(read_json(tmp.path / "invariance.json")["all_equal"] == true);

  const auto half = write_file(tmp.path, "half.json",
                               R"({"kappa1": "e1 - f1", "kappa2": "e2 - f2", "t": "1/2", "alpha": 1, "r": 20})");
  const auto f = run({"--out", tmp.path.string(), "dualize", half.string()});
  CHECK(f.code == kExitDomain);
  CHECK(f.err.find("e1") != std::string::npos);
}

TEST_CASE("orbit command: files agree with the library") {
  TempDir tmp;
  const auto r = run({"--out", tmp.path.string(), "--json", "orbit", (kData / "params_t2.json").string(),
                      "--denominator-bound", "2", "--max-nodes", "16"});
  REQUIRE(r.code == kExitOk);
  const auto j = read_json(tmp.path / "orbit.json");
  CHECK(Json::parse(r.out) == j);
  CHECK(j["nodes"].size() == 4);
  CHECK(j["truncated"] == false);
  const auto dot = slurp(tmp.path / "orbit.dot");
  CHECK(dot.rfind("digraph orbit {", 0) == 0);
  const auto p = tduality::extended_from_json(read_json(kData / "params_t2.json"));
  CHECK(tduality::to_json(tduality::orbit(p, 16, Integer(2), 1)) == j);
}

TEST_CASE("solve command") {
  TempDir tmp;
  const std::string out = tmp.path.string();
  const auto m = run({"--out", out, "solve", "--manufactured"});
  CHECK(m.code == kExitOk);
  const auto rep = read_json(tmp.path / "solve_report.json");
  CHECK(rep["ok"] == true);
  CHECK(rep["max_error"].get<double>() <= 1e-8);
  CHECK(rep["residual"]["geometry"] == "proxy");
  const auto u = poisson::read_field(tmp.path / "u.bin");
  CHECK(u.grid.dims() == std::vector<std::size_t>{32, 32, 32, 32});

  const auto t = run({"--out", out, "--json", "solve", (kData / "source_spec_t2.json").string(), "--transport"});
  CHECK(t.code == kExitOk);
  const auto tj = Json::parse(t.out);
  CHECK(tj["transport"]["bitwise_equal"] == true);
  CHECK(tj["transport"]["mutation_detected"] == true);
  CHECK(tj == read_json(tmp.path / "solve_report.json"));

  const auto v = run({"--out", out, "solve", (kData / "source_spec_violating.json").string()});
  CHECK(v.code == kExitDomain);
  CHECK(v.err.find("solvability") != std::string::npos);

  CHECK(run({"--out", out, "solve", (kData / "source_spec.json").string(), "--gauge", "1e-9"}).code == kExitDomain);
  CHECK(run({"--out", out, "solve"}).code == kExitUsage);

  const auto cfg = write_file(tmp.path, "coarse.toml", "[grid]\ndims = [8, 8]\nlengths = [1.0, 1.0]\n");
  CHECK(run({"--config", cfg.string(), "--out", out, "solve", (kData / "source_spec.json").string()}).code ==
        kExitDomain);
}

TEST_CASE("verify-forms command: 5/5 pass table and JSON report") {
  TempDir tmp;
  const auto r = run({"--out", tmp.path.string(), "verify-forms"});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("5/5 pass") != std::string::npos);
  const auto j = read_json(tmp.path / "forms_report.json");
  CHECK(j["identities"].size() == 5);
  for (const auto& i : j["identities"]) {
    CHECK(i["pass"] == true);
    CHECK(i["witness"].is_null());
  }
  const auto again = run({"--out", tmp.path.string(), "verify-forms"});
  CHECK(again.out == r.out);
}

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "specloc/cli.hpp"
#include "specloc/io.hpp"

using namespace specloc;
using io::json;

namespace {

namespace fs = std::filesystem;

fs::path scratch_dir() {
  const fs::path d = fs::temp_directory_path() / "specloc_cli_tests";
  fs::create_directories(d);
  return d;
}

fs::path write_temp(const std::string& name, const std::string& text) {
  const fs::path p = scratch_dir() / name;
  std::ofstream(p) << text;
  return p;
}

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  Run r;
  r.code = cli::run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

const char* kSmallSpec = R"({
  "schemaVersion": 1,
  "dimension": 6,
  "G": {"rays": [{"theta": 0.0, "radii": [1, 4, 9]}, {"theta": 3.141592653589793, "radii": [1, 4, 9]}]},
  "S": {"kind": "randomGaussian", "seed": 3, "scale": 0.4},
  "p": 0.5,
  "gapModel": {"l": 0.5, "p": 0.5, "asymptotic": {"c": 1, "q": 2}, "window": [1, 50]},
  "projection": {"theta": 0.0, "abscissas": [2.5, 6.5, 12.5], "alpha": 0.6}
})";

std::string docs(const std::string& name) { return std::string(SPECLOC_DOCS_DIR) + "/specs/" + name; }

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("subcommands emit schema-valid reports") {
  const auto spec = write_temp("small.json", kSmallSpec).string();
  for (const char* cmd : {"subord", "enclosure", "gaps", "project", "rieszconst"}) {
    CAPTURE(cmd);
    const auto r = run({cmd, "--input", spec, "--no-timestamp"});
    CHECK(r.code == 0);
    const json rep = json::parse(r.out);
    CHECK_NOTHROW(io::validate_run_report(rep));
    CHECK(rep["command"] == cmd);
    CHECK(rep["schemaVersion"] == 1);
    CHECK(rep["passed"] == true);
    CHECK(rep["inputsDigest"].get<std::string>().size() == 64);
    CHECK_FALSE(rep.contains("timestamp"));
    CHECK(json::parse(rep.dump()) == rep);
  }
}

TEST_CASE("timestamps appear unless suppressed") {
  const auto spec = write_temp("small.json", kSmallSpec).string();
  const auto r = run({"subord", "--input", spec});
  REQUIRE(r.code == 0);
  const json rep = json::parse(r.out);
  CHECK(rep.contains("timestamp"));
  CHECK(rep.contains("wallTimeSeconds"));
  CHECK_NOTHROW(io::validate_run_report(rep));
}

TEST_CASE("reports are deterministic without timestamps") {
  const auto spec = write_temp("small.json", kSmallSpec).string();
  const auto a = run({"enclosure", "--input", spec, "--no-timestamp", "--seed", "5"});
  const auto b = run({"enclosure", "--input", spec, "--no-timestamp", "--seed", "5"});
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  const auto s1 = run({"sweep", "--suite", "projection", "--seeds", "0..2", "--no-timestamp"});
  const auto s2 = run({"sweep", "--suite", "projection", "--seeds", "0..2", "--no-timestamp"});
  CHECK(s1.code == 0);
  CHECK(s1.out == s2.out);
}

TEST_CASE("report file and point cloud outputs") {
  const auto spec = write_temp("small.json", kSmallSpec).string();
  const auto outPath = (scratch_dir() / "report.json").string();
  const auto ptsPath = (scratch_dir() / "encl.csv").string();
  const auto r = run({"enclosure", "--input", spec, "--out", outPath, "--points", ptsPath, "--no-timestamp"});
  REQUIRE(r.code == 0);
  CHECK_NOTHROW(io::validate_run_report(json::parse(io::read_file(outPath))));
  std::ifstream pts(ptsPath);
  std::string header;
  std::getline(pts, header);
  CHECK(header == "re,im");
  CHECK(fs::exists(scratch_dir() / "encl.lobes.csv"));
}

TEST_CASE("sample specs in docs run") {
  CHECK(run({"blockop", "--input", docs("hamiltonian.json"), "--no-timestamp"}).code == 0);
  CHECK(run({"project", "--input", docs("two_rays.json"), "--no-timestamp"}).code == 0);
  CHECK(run({"demo", "figure2", "--no-timestamp"}).code == 0);
}

TEST_CASE("input errors exit with 2") {
  const auto spec = write_temp("small.json", kSmallSpec).string();
  auto r = run({"subord", "--input", spec, "--bogus"});
  CHECK(r.code == 2);
  r = run({"subord", "--input", (scratch_dir() / "missing.json").string()});
  CHECK(r.code == 2);
  r = run({"subord"});
  CHECK(r.code == 2);
  CHECK(r.err.find("--input") != std::string::npos);

  std::string bad = kSmallSpec;
  bad.replace(bad.find("\"p\": 0.5,"), 9, "\"p\": \"half\",");
  r = run({"subord", "--input", write_temp("bad.json", bad).string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("spec.p") != std::string::npos);

  r = run({"subord", "--input", write_temp("broken.json", "{\"schemaVersion\": 1,").string()});
  CHECK(r.code == 2);
  r = run({"sweep", "--seeds", "9..3", "--no-timestamp"});
  CHECK(r.code == 2);
  r = run({"demo", "figure9"});
  CHECK(r.code == 2);
}

TEST_CASE("help exits 0") {
  CHECK(run({"--help"}).code == 0);
  CHECK(run({"subord", "--help"}).code == 0);
}

TEST_CASE("sha256 known vectors") {
  CHECK(io::sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(io::sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("spec parsing errors name the field") {
  auto expect = [](const std::string& text, const std::string& needle) {
    try {
      io::parse_system_spec(json::parse(text));
      FAIL("expected InputError for ", text);
    } catch (const InputError& e) {
      CHECK_MESSAGE(std::string(e.what()).find(needle) != std::string::npos, e.what());
    }
  };
  expect(R"({"schemaVersion": 2})", "schemaVersion");
  expect(R"({"schemaVersion": 1, "dimension": 2, "G": {"rays": [{"theta": 0, "radii": [1]}]},
            "S": {"kind": "dense", "entries": [[0, 0], [0, 0]]}, "p": 0})", "dimension");
  expect(R"({"schemaVersion": 1, "dimension": 1, "G": {"rays": [{"theta": 0, "radii": [1]}]},
            "S": {"kind": "sparkly"}, "p": 0})", "S");
  expect(R"({"schemaVersion": 1, "dimension": 1, "G": {"rays": [{"theta": 0, "radii": [1]}]},
            "S": {"kind": "dense", "entries": [[0]]}, "p": 2})", "spec.p");
  expect(R"({"schemaVersion": 1, "projection": {"theta": 0, "abscissas": [3, 1], "alpha": 1}})", "abscissas");
}

TEST_CASE("report validation rejects schema drift") {
  json rep = {{"command", "subord"},
              {"schemaVersion", 1},
              {"inputsDigest", std::string(64, 'a')},
              {"seed", 0},
              {"results", json::object()},
              {"passed", true}};
  CHECK_NOTHROW(io::validate_run_report(rep));
  json extra = rep;
  extra["surprise"] = 1;
  CHECK_THROWS_AS(io::validate_run_report(extra), InputError);
  json shortDigest = rep;
  shortDigest["inputsDigest"] = "abc";
  CHECK_THROWS_AS(io::validate_run_report(shortDigest), InputError);
  json missing = rep;
  missing.erase("results");
  CHECK_THROWS_AS(io::validate_run_report(missing), InputError);
}

}

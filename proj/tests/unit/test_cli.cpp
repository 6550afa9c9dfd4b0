#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "nonlocal_cli/app.hpp"

namespace fs = std::filesystem;
using nonlocal::cli::Json;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

class Workspace {
 public:
  explicit Workspace(const std::string& name)
      : dir_(fs::temp_directory_path() / ("nonlocal_cli_" + name)) {
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  ~Workspace() { fs::remove_all(dir_); }

  std::string write(const std::string& file, const std::string& text) const {
    std::ofstream(dir_ / file) << text;
    return (dir_ / file).string();
  }
  std::string path(const std::string& file) const { return (dir_ / file).string(); }

  Json report(const std::string& out) const {
    std::ifstream in(fs::path(out) / "report.json");
    return Json::parse(in);
  }

 private:
  fs::path dir_;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "nonlocal");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code =
      nonlocal::cli::runCli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

const char* kAffine = R"({"dimension": 2, "s": 0.5,
  "measure": {"family": "uniform", "mass": 1},
  "field": {"family": "affine", "slope": [1, -2], "offset": 3},
  "eval": {"points": [[0, 0], [1, 2], [100, -3]], "expected": 0}})";

}  // namespace

TEST_CASE("eval of an affine field passes") {
  Workspace ws("eval");
  const auto cfg = ws.write("c.json", kAffine);
  const auto out = ws.path("out");
  const Run r = run({"eval", "--config", cfg, "--out", out});
  CHECK(r.code == 0);
  CHECK(r.out.find("eval: PASS") != std::string::npos);
  const Json rep = ws.report(out);
  CHECK(rep["command"] == "eval");
  CHECK(rep["pass"] == true);
  CHECK(rep["result"]["evaluations"].size() == 3);
  CHECK(rep["config"]["tolerance"]["abs"] == 1e-9);
  CHECK(fs::exists(fs::path(out) / "sweep.csv"));
  CHECK(slurp(out + "/sweep.csv").rfind("x0,x1,", 0) == 0);
}

TEST_CASE("reports are deterministic") {
  Workspace ws("determinism");
  const auto cfg = ws.write("c.json", kAffine);
  REQUIRE(run({"eval", "--config", cfg, "--out", ws.path("a")}).code == 0);
  REQUIRE(run({"eval", "--config", cfg, "--out", ws.path("b")}).code == 0);
  CHECK(slurp(ws.path("a") + "/report.json") == slurp(ws.path("b") + "/report.json"));
  CHECK(slurp(ws.path("a") + "/sweep.csv") == slurp(ws.path("b") + "/sweep.csv"));
}

TEST_CASE("lemma with an exponent outside (0, 2s) is rejected") {
  Workspace ws("lemma");
  const auto cfg = ws.write("c.json", R"({"dimension": 2, "s": 0.5,
    "measure": {"family": "uniform", "mass": 1},
    "lemma": {"gamma": 1.2}})");
  const Run r = run({"lemma", "--id", "P2", "--config", cfg, "--out", ws.path("o")});
  CHECK(r.code == 2);
  CHECK(r.err.find("γ ∈ (0, 2s)") != std::string::npos);
}

TEST_CASE("replay of a constant solution") {
  Workspace ws("replay");
  const auto cfg = ws.write("c.json", R"({"dimension": 2, "s": 0.5,
    "measure": {"family": "atomic", "atoms": [{"direction": [1, 0], "weight": 1},
                                              {"direction": [0, 1], "weight": 1}]},
    "field": {"family": "constant", "value": 1},
    "nonlinearity": {"family": "linear", "slope": 1, "offset": -1},
    "replay": {"x0": [0.3, -0.2], "certifiedC": 10}})");
  const auto out = ws.path("o");
  const Run r = run({"replay", "--config", cfg, "--out", out});
  CHECK(r.code == 0);
  const Json rep = ws.report(out);
  REQUIRE(rep["result"]["reports"].size() == 4);
  for (const Json& e : rep["result"]["reports"]) {
    CHECK(e["consistent"] == true);
    CHECK(e["bracket"].is_array());
  }
}

TEST_CASE("one-sided replay needs a side") {
  Workspace ws("side");
  const auto cfg = ws.write("c.json", R"({"dimension": 1, "s": 0.5})");
  CHECK(run({"one-sided", "--config", cfg}).code == 2);
  CHECK(run({"one-sided", "--side", "middle", "--config", cfg}).code == 2);
}

TEST_CASE("invalid input exits with status 2") {
  Workspace ws("invalid");
  const auto broken = ws.write("broken.json", "{\"dimension\": 2,");
  CHECK(run({"eval", "--config", broken, "--out", ws.path("o")}).code == 2);

  const auto unknown = ws.write("unknown.json", R"({"dimension": 2, "s": 0.5,
    "measure": {"family": "uniform"},
    "field": {"family": "sawtooth"}})");
  const Run r = run({"eval", "--config", unknown, "--out", ws.path("o")});
  CHECK(r.code == 2);
  CHECK(r.err.find("/field/family") != std::string::npos);

  const auto badS = ws.write("s.json", R"({"dimension": 2, "s": 1.5})");
  CHECK(run({"lambda", "--config", badS, "--out", ws.path("o")}).code == 2);

  CHECK(run({"lemma", "--config", badS}).code == 2);
  CHECK(run({"eval", "--config", ws.path("missing.json")}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
}

TEST_CASE("a failing check exits with status 1 and still writes the report") {
  Workspace ws("fail");
  const auto cfg = ws.write("c.json", R"({"dimension": 1, "s": 0.5,
    "measure": {"family": "atomic", "atoms": [{"direction": [1], "weight": 1}]},
    "field": {"family": "cosine", "frequency": [1], "amplitude": 1, "phase": 0},
    "eval": {"points": [[0]], "expected": 0}})");
  const auto out = ws.path("o");
  const Run r = run({"eval", "--config", cfg, "--out", out});
  CHECK(r.code == 1);
  CHECK(r.out.find("eval: FAIL") != std::string::npos);
  CHECK(ws.report(out)["pass"] == false);
}

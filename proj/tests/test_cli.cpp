// End-to-end tests of the expcli binary: spawns the tool, checks exit codes,
// output schemas and byte-for-byte determinism.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

#ifndef EXPCLI_PATH
#error "EXPCLI_PATH must be defined by the build"
#endif

const char* cli_path() { return EXPCLI_PATH; }

int run_cli(const std::string& args) {
  const std::string cmd = std::string(cli_path()) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path fresh_dir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() / ("expcli_test_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json equilibrium_config() {
  return json::parse(R"({
    "version": 1,
    "model": {"type": "at", "tau": 0.7},
    "potential": {"type": "repulsive_attractive", "k": 1.0, "r0": 1.0},
    "agents": {"n": 2, "d": 2},
    "initial": {"type": "table",
                "x": [[0.5, 0.0], [-0.5, 0.0]],
                "v": [[0.0, 0.0], [0.0, 0.0]]},
    "integrator": {"h": 0.01, "t_end": 1.0, "sample_stride": 10},
    "output": {"csv": "run.csv", "summary": "summary.json"}
  })");
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("simulate: equilibrium run produces constant rows and exit 0") {
  const fs::path dir = fresh_dir("equilibrium");
  write(dir / "cfg.json", equilibrium_config().dump());
  const int code =
      run_cli("simulate --config " + (dir / "cfg.json").string() + " --out " + dir.string() +
              " --quiet");
  CHECK(code == 0);
  const std::string csv = slurp(dir / "run.csv");
  CHECK(csv.rfind("t,E,cal_E,dE,d_cal_E,enstrophy,X,X_tau,Vmax,E_hat\n", 0) == 0);
  // all data rows identical except the leading time column
  std::istringstream lines(csv);
  std::string line, tail;
  std::getline(lines, line);  // header
  bool first = true;
  while (std::getline(lines, line)) {
    const std::string rest = line.substr(line.find(','));
    if (first) {
      tail = rest;
      first = false;
    } else {
      CHECK(rest == tail);
    }
  }
  const json sum = json::parse(slurp(dir / "summary.json"));
  CHECK(sum["exit_code"] == 0);
}

TEST_CASE("simulate: same config twice gives bitwise-identical outputs") {
  const fs::path dir1 = fresh_dir("det1");
  const fs::path dir2 = fresh_dir("det2");
  json cfg = json::parse(R"({
    "version": 1,
    "model": {"type": "phiu", "tau": 0.4},
    "potential": {"type": "power_law", "a": 1.0, "beta": 0.3},
    "kernel": {"type": "scalar_fat_tail", "phi_minus": 0.8, "gamma": 0.4},
    "agents": {"n": 12, "d": 3},
    "initial": {"type": "random", "seed": 2024, "position_scale": 2.0,
                "velocity_scale": 1.0},
    "integrator": {"h": 0.01, "t_end": 2.0, "sample_stride": 5},
    "output": {"csv": "run.csv", "summary": "summary.json"}
  })");
  write(dir1 / "cfg.json", cfg.dump());
  write(dir2 / "cfg.json", cfg.dump());
  CHECK(run_cli("simulate --config " + (dir1 / "cfg.json").string() + " --out " +
                dir1.string() + " --quiet") == 0);
  CHECK(run_cli("simulate --config " + (dir2 / "cfg.json").string() + " --out " +
                dir2.string() + " --quiet") == 0);
  CHECK(slurp(dir1 / "run.csv") == slurp(dir2 / "run.csv"));
  CHECK(slurp(dir1 / "summary.json") == slurp(dir2 / "summary.json"));
}

TEST_CASE("simulate: guard trip exits 2 and still writes the partial CSV") {
  const fs::path dir = fresh_dir("blowup");
  json cfg = equilibrium_config();
  cfg["initial"]["v"] = json::array({json::array({50.0, 0.0}), json::array({-50.0, 0.0})});
  cfg["integrator"] = {{"h", 0.01}, {"t_end", 50.0}, {"blowup_guard", 20.0}};
  write(dir / "cfg.json", cfg.dump());
  const int code = run_cli("simulate --config " + (dir / "cfg.json").string() + " --out " +
                           dir.string() + " --quiet");
  CHECK(code == 2);
  const json sum = json::parse(slurp(dir / "summary.json"));
  CHECK_FALSE(sum["blowup"].is_null());
  CHECK(std::count(slurp(dir / "run.csv").begin(), slurp(dir / "run.csv").end(), '\n') >= 2);
}

TEST_CASE("simulate: malformed configs exit 1") {
  const fs::path dir = fresh_dir("badcfg");
  write(dir / "bad.json", "{\"version\": 1}");
  CHECK(run_cli("simulate --config " + (dir / "bad.json").string() + " --out " +
                dir.string() + " --quiet") == 1);
  write(dir / "worse.json", "this is not json");
  CHECK(run_cli("simulate --config " + (dir / "worse.json").string() + " --out " +
                dir.string() + " --quiet") == 1);
  CHECK(run_cli("simulate --config " + (dir / "missing.json").string() + " --out " +
                dir.string() + " --quiet") == 1);
}

TEST_CASE("sweep: grid of one cell reproduces the plain simulate output") {
  const fs::path dir = fresh_dir("sweep1");
  json cfg = equilibrium_config();
  cfg["sweep"] = {{"axes", json::array({json::object(
                              {{"path", "model.tau"}, {"values", json::array({0.7})}})})}};
  write(dir / "cfg.json", cfg.dump());
  CHECK(run_cli("sweep --config " + (dir / "cfg.json").string() + " --out " + dir.string() +
                " --quiet") == 0);

  const fs::path plain = fresh_dir("sweep1_plain");
  write(plain / "cfg.json", equilibrium_config().dump());
  CHECK(run_cli("simulate --config " + (plain / "cfg.json").string() + " --out " +
                plain.string() + " --quiet") == 0);

  CHECK(slurp(dir / "cells/cell_000/run.csv") == slurp(plain / "run.csv"));
  const std::string agg = slurp(dir / "sweep.csv");
  CHECK(agg.rfind("cell,model_tau,status,", 0) == 0);
  CHECK(std::count(agg.begin(), agg.end(), '\n') == 2);  // header + one cell
}

TEST_CASE("sweep: beta grid records one row per cell and continues on failure") {
  const fs::path dir = fresh_dir("sweepbeta");
  json cfg = json::parse(R"({
    "version": 1,
    "model": {"type": "at", "tau": 0.5},
    "potential": {"type": "power_law", "a": 1.0, "beta": 0.1},
    "agents": {"n": 6, "d": 2},
    "initial": {"type": "random", "seed": 7, "position_scale": 1.0,
                "velocity_scale": 0.5},
    "integrator": {"h": 0.02, "t_end": 1.0},
    "output": {"csv": "run.csv", "summary": "summary.json"},
    "sweep": {"axes": [{"path": "potential.beta", "values": [0.1, 0.2, 1.7]}]}
  })");
  write(dir / "cfg.json", cfg.dump());
  CHECK(run_cli("sweep --config " + (dir / "cfg.json").string() + " --out " + dir.string() +
                " --quiet") == 0);
  const std::string agg = slurp(dir / "sweep.csv");
  CHECK(std::count(agg.begin(), agg.end(), '\n') == 4);
  CHECK(agg.find(",error,") != std::string::npos);  // beta = 1.7 cell is invalid
  CHECK(fs::exists(dir / "cells/cell_000/summary.json"));
  CHECK(fs::exists(dir / "cells/cell_001/summary.json"));
  CHECK_FALSE(fs::exists(dir / "cells/cell_002/summary.json"));
}

TEST_CASE("polar: equilibrium start stays identically at rest") {
  const fs::path dir = fresh_dir("polar");
  const json cfg = json::parse(R"({
    "version": 1,
    "potential": {"type": "repulsive_attractive", "k": 1.0, "r0": 1.0},
    "tau": 1.0,
    "initial": {"kr": 0.0, "vr": 0.0, "vtheta": 0.0},
    "integrator": {"h": 0.01, "t_end": 1.0, "sample_stride": 10},
    "output": {"csv": "polar.csv", "summary": "polar_summary.json"}
  })");
  write(dir / "cfg.json", cfg.dump());
  CHECK(run_cli("polar --config " + (dir / "cfg.json").string() + " --out " + dir.string() +
                " --quiet") == 0);
  const std::string csv = slurp(dir / "polar.csv");
  CHECK(csv.rfind("t,kr,vr,vtheta\n", 0) == 0);
  std::istringstream lines(csv);
  std::string line;
  std::getline(lines, line);
  while (std::getline(lines, line))
    CHECK(line.substr(line.find(',')) == ",0,0,0");
}

TEST_CASE("hydro1d: sub-critical profile reports the invariant region") {
  const fs::path dir = fresh_dir("hydro");
  const json cfg = json::parse(R"({
    "version": 1,
    "potential": {"type": "quadratic", "a": 1.0},
    "tau": 2.0,
    "particles": 16,
    "profile": {"x": [-1.0, 1.0], "u": [0.9, -0.9], "m": [0.5, 0.5]},
    "integrator": {"h": 0.001, "t_end": 5.0, "sample_stride": 100},
    "output": {"csv": "hydro.csv", "summary": "hydro_summary.json"}
  })");
  write(dir / "cfg.json", cfg.dump());
  CHECK(run_cli("hydro1d --config " + (dir / "cfg.json").string() + " --out " + dir.string() +
                " --quiet") == 0);
  const json sum = json::parse(slurp(dir / "hydro_summary.json"));
  CHECK(sum["m0"] == doctest::Approx(1.0));
  CHECK(sum["threshold"] == doctest::Approx(-1.0));
  CHECK(sum["blowup"].is_null());
  CHECK(sum["invariant_region"]["ok"].get<bool>());
  const std::string csv = slurp(dir / "hydro.csv");
  CHECK(csv.rfind("t,min_dslope,max_abs_dslope,mass,momentum\n", 0) == 0);
}

TEST_CASE("hydro1d: super-critical control case exits 2") {
  const fs::path dir = fresh_dir("hydroblow");
  const json cfg = json::parse(R"({
    "version": 1,
    "potential": {"type": "quadratic", "a": 1.0},
    "tau": 0.0,
    "particles": 8,
    "profile": {"x": [-1.0, 1.0], "u": [3.0, -3.0], "m": [0.5, 0.5]},
    "integrator": {"h": 0.0001, "t_end": 4.0, "sample_stride": 100},
    "output": {"csv": "hydro.csv", "summary": "hydro_summary.json"}
  })");
  write(dir / "cfg.json", cfg.dump());
  CHECK(run_cli("hydro1d --config " + (dir / "cfg.json").string() + " --out " + dir.string() +
                " --quiet") == 2);
  const json sum = json::parse(slurp(dir / "hydro_summary.json"));
  CHECK_FALSE(sum["blowup"].is_null());
  CHECK(sum["blowup"]["t"].get<double>() < 3.141592653589793);
}

TEST_CASE("classify-potential writes the audit report") {
  const fs::path dir = fresh_dir("classify");
  const json cfg = json::parse(R"({
    "version": 1,
    "potential": {"type": "repulsive_attractive", "k": 1.0, "r0": 1.0},
    "classify": {"r_max": 10.0, "n_samples": 2001},
    "output": {"summary": "classify.json"}
  })");
  write(dir / "cfg.json", cfg.dump());
  CHECK(run_cli("classify-potential --config " + (dir / "cfg.json").string() + " --out " +
                dir.string() + " --quiet") == 0);
  const json sum = json::parse(slurp(dir / "classify.json"));
  CHECK_FALSE(sum["convex"]["pass"].get<bool>());
  CHECK(sum["confining"]["pass"].get<bool>());
  CHECK(sum["bounded"]["pass"].get<bool>());
}

TEST_CASE("means-check reports zero violations") {
  const fs::path dir = fresh_dir("means");
  CHECK(run_cli("means-check --seed 5 --instances 2000 --n-max 12 --d-max 3 --out " +
                dir.string() + " --summary means.json --quiet") == 0);
  const json sum = json::parse(slurp(dir / "means.json"));
  CHECK(sum["violations"] == 0);
  CHECK(sum["worst_margin"].get<double>() <= 1.0);
  CHECK(sum["pass"].get<bool>());
}

TEST_CASE("unknown subcommands and missing flags exit nonzero") {
  CHECK(run_cli("frobnicate") != 0);
  CHECK(run_cli("simulate") != 0);  // --config required
}

}  // TEST_SUITE

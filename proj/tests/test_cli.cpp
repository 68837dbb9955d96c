#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

const std::string kCli = RCLF_CLI_PATH;
const std::string kConfigs = RCLF_CONFIG_DIR;

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("rclf_cli_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

struct Run {
  int code;
  std::string err;
};

Run run(const std::string& args, const fs::path& dir) {
  const fs::path err = dir / "stderr.txt";
  const std::string cmd = kCli + " " + args + " --quiet 2> " + err.string();
  const int status = std::system(cmd.c_str());
  std::ifstream in(err);
  std::stringstream ss;
  ss << in.rdbuf();
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, ss.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

nlohmann::json load(const fs::path& p) { return nlohmann::json::parse(slurp(p)); }

fs::path write_config(const fs::path& dir, const std::string& text) {
  const fs::path p = dir / "scenario.toml";
  std::ofstream(p) << text;
  return p;
}

const char* kGrowth = R"(
[growth]
kind = "haldane"
mu_max = 75.0
K1 = 100.0
K2 = 0.025
)";

std::vector<std::vector<double>> read_csv(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

TEST_CASE("missing growth section exits 2 naming the section") {
  const auto dir = scratch("missing_growth");
  const auto cfg = write_config(dir, "[chemostat]\nS_i = 600.0\nS_s = 500.0\n");
  const auto r = run("simulate --config " + cfg.string() + " --out " + dir.string(), dir);
  CHECK(r.code == 2);
  CHECK(r.err.find("[growth]") != std::string::npos);
  CHECK(run("simulate --config " + (dir / "absent.toml").string(), dir).code == 2);
}

TEST_CASE("simulate the demo scenario") {
  const auto dir = scratch("simulate");
  const auto r = run("simulate --config " + kConfigs + "/demo.toml --seed 42 --out " + dir.string(), dir);
  REQUIRE(r.code == 0);
  for (const char* f : {"simulate_transformed.csv", "simulate_physical.csv", "simulate.svg", "simulate.json"})
    CHECK(fs::exists(dir / f));
  const auto js = load(dir / "simulate.json");
  const double S = js["final_physical"]["S"], X = js["final_physical"]["X"];
  const double S_s = js["scenario"]["S_s"], X_s = js["scenario"]["X_s"];
  CHECK(std::abs(S - S_s) <= 0.01 * S_s);
  CHECK(std::abs(X - X_s) <= 0.01 * X_s);
  CHECK(slurp(dir / "simulate_physical.csv").rfind("t,X,S,D\n", 0) == 0);
  CHECK(slurp(dir / "simulate.svg").find("<svg") != std::string::npos);
}

TEST_CASE("equilibrium start without uncertainty gives a constant trajectory") {
  const auto dir = scratch("constant");
  const auto cfg = write_config(dir, std::string(kGrowth) + R"(
[chemostat]
S_i = 600.0
K = 2.0
b = 0.1
m = 0.1
S_s = 506.72
[uncertainty]
a = 0.0
[integrator]
step = 1e-2
horizon = 5.0
initial = [0.0, 0.0]
)");
  REQUIRE(run("simulate --config " + cfg.string() + " --out " + dir.string(), dir).code == 0);
  const auto rows = read_csv(dir / "simulate_transformed.csv");
  REQUIRE(rows.size() == 501);
  for (const auto& row : rows) {
    CHECK(row[1] == 0.0);
    CHECK(row[2] == 0.0);
  }
}

TEST_CASE("verify passes on the demo and round-trips its JSON") {
  const auto dir = scratch("verify");
  const std::string cmd = "verify --config " + kConfigs + "/demo.toml --out " + dir.string();
  REQUIRE(run(cmd, dir).code == 0);
  const std::string first = slurp(dir / "verify.json");
  const auto js = nlohmann::ordered_json::parse(first);
  CHECK(js["passed"] == true);
  for (const auto& r : js["reports"]) {
    CHECK(r.contains("region"));
    CHECK(r.contains("grid"));
    CHECK(r.contains("worst_margin"));
    CHECK(r.contains("witness"));
    CHECK(r["passed"] == true);
  }
  CHECK(js.dump(2) + "\n" == first);
  REQUIRE(run(cmd, dir).code == 0);
  CHECK(slurp(dir / "verify.json") == first);
}

TEST_CASE("verify fails when S2 cannot hold") {
  const auto dir = scratch("verify_s2");
  const auto cfg = write_config(dir, std::string(kGrowth) + R"(
[chemostat]
S_i = 600.0
K = 2.0
b = 0.1
m = 9.74
S_s = 506.72
)");
  const auto r = run("verify --config " + cfg.string() + " --out " + dir.string(), dir);
  CHECK(r.code == 4);
  CHECK(r.err.find("S2") != std::string::npos);
  CHECK(load(dir / "verify.json")["passed"] == false);

  const auto over = write_config(dir, std::string(kGrowth) + "[chemostat]\nS_i = 600.0\nb = 20.0\nS_s = 506.72\n");
  const auto r2 = run("verify --config " + over.string() + " --out " + dir.string(), dir);
  CHECK(r2.code != 0);
  CHECK(r2.err.find("S2") != std::string::npos);
}

TEST_CASE("counterexample reports two roots and washout") {
  const auto dir = scratch("counterexample");
  REQUIRE(run("counterexample --config " + kConfigs + "/washout.toml --out " + dir.string(), dir).code == 0);
  const auto js = load(dir / "counterexample.json");
  CHECK(js["result"]["S1"].get<double>() < js["result"]["S2"].get<double>());
  CHECK(js["result"]["washout"] == true);
  CHECK(fs::exists(dir / "washout.csv"));
}

TEST_CASE("backstep with zero disturbance from the origin stays at rest") {
  const auto dir = scratch("backstep_rest");
  const auto cfg = write_config(dir, R"(
[feedback]
family = "backstepping"
[backstepping]
n = 2
disturbance_level = 0.0
c_tilde = [0.03, 0.0]
eta_factor = [1.2, 2.0]
initial = [0.0, 0.0]
trials = 2
horizon = 1.0
init_radius = 0.0
)");
  REQUIRE(run("backstep --config " + cfg.string() + " --out " + dir.string(), dir).code == 0);
  const auto rows = read_csv(dir / "backstep.csv");
  REQUIRE(rows.size() > 100);
  for (const auto& row : rows) {
    CHECK(row[1] == 0.0);
    CHECK(row[2] == 0.0);
    CHECK(row[3] == 0.0);
  }
  const auto js = load(dir / "backstep.json");
  CHECK(js["input_bounded"] == true);
  CHECK(js["gain_margin"].get<double>() >= 1.1 * (1.0 - 1e-12));
}

TEST_CASE("sweep produces one converged report per level") {
  const auto dir = scratch("sweep");
  REQUIRE(run("sweep --config " + kConfigs + "/demo.toml --trials 10 --out " + dir.string(), dir).code == 0);
  const auto js = load(dir / "sweep.json");
  REQUIRE(js["entries"].size() == 4);
  for (const auto& e : js["entries"]) CHECK(e["report"]["converged_fraction"] == 1.0);
  CHECK(js["law_identical"] == true);
}

TEST_CASE("urgas reports are byte-identical for the same seed") {
  const auto dir_a = scratch("urgas_a");
  const auto dir_b = scratch("urgas_b");
  const auto cfg = write_config(dir_a, std::string(kGrowth) + R"(
[chemostat]
S_i = 600.0
K = 2.0
b = 0.1
m = 0.1
S_s = 506.72
[uncertainty]
a = 0.05
[integrator]
horizon = 20.0
warmup = [[0.01, 1e-5], [0.1, 1e-4]]
[harness]
trials = 4
delta_probes = 2
delta_bisections = 3
entry_trials = 0
)");
  REQUIRE(run("urgas --config " + cfg.string() + " --seed 9 --out " + dir_a.string(), dir_a).code == 0);
  REQUIRE(run("urgas --config " + cfg.string() + " --seed 9 --out " + dir_b.string(), dir_b).code == 0);
  CHECK(slurp(dir_a / "urgas.json") == slurp(dir_b / "urgas.json"));
}

TEST_CASE("usage errors exit 2") {
  const auto dir = scratch("usage");
  CHECK(run("--config x.toml", dir).code == 2);
  CHECK(run("frobnicate --config x.toml", dir).code == 2);
}

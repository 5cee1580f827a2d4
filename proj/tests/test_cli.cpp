#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

using nlohmann::json;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string output;  // stdout + stderr
};

RunResult run_cli(const std::string& args, const std::string& env_prefix = "") {
  const std::string cmd = env_prefix + std::string(STEINLAB_CLI_PATH) + " " + args + " 2>&1";
  RunResult r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof(buf), p)) > 0) r.output.append(buf, n);
  const int rc = pclose(p);
  REQUIRE(rc != -1);
  r.exit_code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  return r;
}

std::string temp_path(const std::string& stem) {
  return (std::filesystem::temp_directory_path() /
          ("steinlab_test_" + std::to_string(::getpid()) + "_" + stem))
      .string();
}

}  // namespace

TEST_CASE("verify subcommand reproduces the documented scaled-gaussian run") {
  RunResult r = run_cli("verify --kind hsi --target gaussian-scale:2");
  CHECK(r.exit_code == 0);
  json out = json::parse(r.output);
  CHECK(out["tool_version"] == "steinlab 1.0.0");
  CHECK(out["config_echo"]["command"] == "verify");
  REQUIRE(out["reports"].size() == 1);
  const auto& rep = out["reports"][0];
  CHECK(rep["kind"] == "hsi");
  CHECK(rep["holds"] == true);
  CHECK(std::fabs(rep["lhs"].get<double>() - 0.153426) < 1e-4);
  CHECK(std::fabs(rep["rhs"].get<double>() - 0.202733) < 1e-4);
}

TEST_CASE("invalid inputs exit with code 2 and print usage") {
  RunResult r = run_cli("verify --kind nonsense --target uniform");
  CHECK(r.exit_code == 2);
  CHECK(r.output.find("Usage") != std::string::npos);

  CHECK(run_cli("definitely-not-a-subcommand").exit_code == 2);
  CHECK(run_cli("verify --no-such-flag 1").exit_code == 2);
  CHECK(run_cli("compute --target mixture:10").exit_code == 2);  // wrong arity
  CHECK(run_cli("--help").exit_code == 0);
}

TEST_CASE("evolve writes the decay curves CSV") {
  const std::string csv = temp_path("curves.csv");
  RunResult r = run_cli("evolve --target gaussian-scale:2 --times 0,0.5,1 --out " + csv);
  CHECK(r.exit_code == 0);
  json out = json::parse(r.output);
  CHECK(out["curves_path"] == csv);

  std::ifstream f(csv);
  REQUIRE(f.good());
  std::string line;
  REQUIRE(std::getline(f, line));
  CHECK(line ==
        "t,H,I,S,bound_I_lsi,bound_I_stein,bound_I_improved,bound_H_exp,"
        "bound_H_hsi1,bound_H_hsi2");
  int rows = 0;
  while (std::getline(f, line))
    if (!line.empty()) ++rows;
  CHECK(rows == 3);
  std::filesystem::remove(csv);
}

TEST_CASE("compute reports the five functionals for a centered gamma") {
  RunResult r = run_cli("compute --target centered-gamma:3");
  CHECK(r.exit_code == 0);
  json out = json::parse(r.output);
  REQUIRE(out["reports"].size() == 5);
  double H = -1.0, S = -1.0;
  for (const auto& rep : out["reports"]) {
    if (rep["kind"] == "H") H = rep["value"].get<double>();
    if (rep["kind"] == "S") S = rep["value"].get<double>();
  }
  CHECK(std::fabs(H - 0.5713600228677) < 1e-6);
  CHECK(std::fabs(S - std::sqrt(7.0)) < 1e-6);
}

TEST_CASE("repeated runs with one seed are byte-identical") {
  const std::string args = "concentration --law gaussian --ps 2,4 --samples 20000 --seed 5";
  RunResult a = run_cli(args);
  RunResult b = run_cli(args);
  CHECK(a.exit_code == 0);
  CHECK(a.output == b.output);
  CHECK(!a.output.empty());
}

TEST_CASE("the seed environment variable is honored when no flag is given") {
  RunResult r = run_cli("clt --target centered-gamma:3 --n 4", "STEINLAB_SEED=999 ");
  CHECK(r.exit_code == 0);
  json out = json::parse(r.output);
  CHECK(out["config_echo"]["seed"] == 999);

  RunResult s = run_cli("clt --target centered-gamma:3 --n 4 --seed 7",
                        "STEINLAB_SEED=999 ");
  json out2 = json::parse(s.output);
  CHECK(out2["config_echo"]["seed"] == 7);  // explicit flag wins
}

TEST_CASE("config files supply defaults that flags override") {
  const std::string cfgp = temp_path("config.json");
  {
    std::ofstream f(cfgp);
    f << R"({"verify": {"kind": "hsi", "target": "gaussian-scale:2"}})";
  }
  RunResult r = run_cli("verify --config " + cfgp);
  CHECK(r.exit_code == 0);
  json out = json::parse(r.output);
  CHECK(out["reports"][0]["kind"] == "hsi");

  RunResult s = run_cli("verify --config " + cfgp + " --kind lsi");
  json out2 = json::parse(s.output);
  CHECK(out2["reports"][0]["kind"] == "lsi");
  std::filesystem::remove(cfgp);
}

TEST_CASE("sweep rows all hold and are reported") {
  RunResult r = run_cli("sweep --ns 100");
  CHECK(r.exit_code == 0);
  json out = json::parse(r.output);
  REQUIRE(out["reports"].size() == 1);
  CHECK(out["reports"][0]["hsi_holds"] == true);
  CHECK(out["reports"][0]["hwi_holds"] == true);
}

TEST_CASE("functional subcommand: exact chaos comparison through the parser") {
  RunResult r = run_cli(
      "functional --expr \"0.7071067811865476*x1^2 - 0.7071067811865476\" "
      "--dim 1 --op fourth-moment --k 2");
  CHECK(r.exit_code == 0);
  json out = json::parse(r.output);
  CHECK(std::fabs(out["reports"][0]["V2"].get<double>() - 2.0) < 1e-9);
  CHECK(std::fabs(out["reports"][0]["bound"].get<double>() - 2.0) < 1e-9);
}

TEST_CASE("gamma-calc passes on model constants and fails on broken ones") {
  RunResult r = run_cli("gamma-calc --model ou --draws 200");
  CHECK(r.exit_code == 0);
  RunResult s = run_cli("gamma-calc --model log-concave:0,0,0.5 --check conditions --c 2");
  CHECK(s.exit_code == 2);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

#include "slipns/critical.hpp"

namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string(SLIPNS_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string fresh_dir(const std::string& name) {
  const auto d = fs::temp_directory_path() / ("slipns_cli_" + name);
  fs::remove_all(d);
  return d.string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("exit codes") {
  CHECK(run("--help") == 0);
  CHECK(run("critical --bogus") == 2);
  CHECK(run("") == 2);
  CHECK(run("--out " + fresh_dir("stable") + " experiment --mu 2 --xi 1 1") == 3);
  CHECK(run("--out " + fresh_dir("badxi") + " critical --xi -1 1") == 1);
}

TEST_CASE("critical writes the curve and the global threshold") {
  const auto out = fresh_dir("critical");
  REQUIRE(run("--out " + out + " critical --xi 0.5 2 --k 0.1 10 --points 20") == 0);
  std::ifstream in(out + "/critical.csv");
  std::string line;
  std::getline(in, line);
  CHECK(line == "k,mu_c");
  int rows = 0;
  double prev = 1e300;
  std::string footer;
  while (std::getline(in, line)) {
    if (line.rfind("#", 0) == 0) {
      footer = line;
      continue;
    }
    const double mu = std::stod(line.substr(line.find(',') + 1));
    CHECK(mu < prev);
    prev = mu;
    ++rows;
  }
  CHECK(rows == 20);
  REQUIRE(footer.rfind("# mu_c_global=", 0) == 0);
  CHECK(std::stod(footer.substr(14)) == doctest::Approx(slipns::critical::mu_c_global({0.5, 2})).epsilon(1e-15));
  CHECK(fs::exists(out + "/manifest.json"));

  const auto zero = fresh_dir("critical0");
  REQUIRE(run("--out " + zero + " critical --xi 0 0 --points 5") == 0);
  std::ifstream z(zero + "/critical.csv");
  std::getline(z, line);
  while (std::getline(z, line))
    if (line[0] != '#') CHECK(line.substr(line.find(',') + 1) == "0");
}

TEST_CASE("spectrum report agrees with the determinant") {
  const auto out = fresh_dir("spectrum");
  REQUIRE(run("--out " + out + " spectrum --k 1 --mu 0.1 --xi 1 1") == 0);
  const auto j = nlohmann::json::parse(slurp(out + "/spectrum_report.json"));
  CHECK(j["passed"] == true);
  CHECK(j["positive_count_galerkin"] == j["positive_count_oracle"]);
  CHECK(j["positive_count_galerkin"].get<int>() >= 2);
  CHECK(fs::exists(out + "/eigenfunction_1.csv"));

  const auto sup = fresh_dir("spectrum_sup");
  REQUIRE(run("--out " + sup + " spectrum --k 1 --mu 0.7 --xi 1 1") == 0);
  const auto s = nlohmann::json::parse(slurp(sup + "/spectrum_report.json"));
  CHECK(s["positive_count_galerkin"] == 0);
  CHECK(s["positive_count_oracle"] == 0);
}

TEST_CASE("environment overrides reach the run") {
  const auto out = fresh_dir("env");
  setenv("SLIPNS_VISCOSITY", "0.25", 1);
  const int rc = run("--out " + out + " critical --points 3");
  unsetenv("SLIPNS_VISCOSITY");
  REQUIRE(rc == 0);
  const auto m = nlohmann::json::parse(slurp(out + "/manifest.json"));
  CHECK(m.dump().find("0.25") != std::string::npos);
}

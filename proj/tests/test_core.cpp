#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "slipns/config.hpp"
#include "slipns/core.hpp"
#include "slipns/csv.hpp"
#include "slipns/manifest.hpp"

using namespace slipns;

namespace {

std::string message_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const std::exception& e) {
    return e.what();
  }
  return {};
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("validate_problem accepts valid input unchanged") {
  const ModeProblem p{1.0, 0.1, {1, 1}};
  CHECK(validate_problem(p) == p);
  CHECK(validate_problem(validate_problem(p)) == p);
}

TEST_CASE("validate_problem names the violated invariant") {
  CHECK(message_of([] { validate_problem({-1.0, 0.1, {1, 1}}); }) == "wavenumber must be positive");
  CHECK(message_of([] { validate_problem({1.0, 0.1, {-1, 1}}); }) == "slip coefficients must be nonnegative");
  CHECK(message_of([] { validate_problem({1.0, 0.0, {1, 1}}); }) == "viscosity must be positive");
  CHECK_THROWS_AS(validate_problem({0.0, 0.1, {1, 1}}), ValidationError);
}

TEST_CASE("lattice construction gives k = n / L with one division") {
  const ChannelConfig c{3.0, 0.5};
  for (int n = 1; n < 20; ++n) {
    const auto p = ModeProblem::on_lattice(c, n, {1, 2});
    CHECK(p.wavenumber == static_cast<double>(n) / 3.0);
    CHECK(p.viscosity == 0.5);
  }
  CHECK_THROWS_AS(ModeProblem::on_lattice(c, 0, {1, 1}), ValidationError);
  CHECK_THROWS_AS(ModeProblem::on_lattice({0.0, 1.0}, 1, {1, 1}), ValidationError);
}

TEST_CASE("slip with one zero wall is allowed") {
  CHECK_NOTHROW(validate_slip({0.0, 1.0}));
  CHECK_NOTHROW(validate_slip({0.0, 0.0}));
}

TEST_CASE("config parses nested keys and names offending keys") {
  const auto cfg = parse_config(nlohmann::json::parse(
      R"({"period_length": 2, "viscosity": 0.3, "slip": {"xi_minus": 1, "xi_plus": 3},
          "simulation": {"fourier_modes": 8}})"));
  CHECK(cfg.channel.period_length == 2.0);
  CHECK(cfg.channel.viscosity == 0.3);
  CHECK(cfg.slip == SlipPair{1, 3});
  CHECK(cfg.simulation.fourier_modes == 8);
  CHECK(cfg.simulation.cheb_degree == 64);

  CHECK(message_of([] { parse_config(nlohmann::json::parse(R"({"viscosity": "x"})")); }).find("'viscosity'") !=
        std::string::npos);
  CHECK(message_of([] { parse_config(nlohmann::json::parse(R"({"slip": {"xi_minus": -1}})")); })
            .find("'slip.xi_minus'") != std::string::npos);
  CHECK(message_of([] { parse_config(nlohmann::json::parse(R"({"slip": {"bogus": 1}})")); }).find("'slip.bogus'") !=
        std::string::npos);
  CHECK_THROWS_AS(parse_config(nlohmann::json::parse(R"({"period_length": 0})")), ConfigError);
}

TEST_CASE("config round trips through JSON and the digest is stable") {
  AppConfig cfg;
  cfg.channel.viscosity = 0.5;
  cfg.slip = {1, 2};
  cfg.experiment.epsilon0 = 0.01;
  const auto back = parse_config(to_json(cfg));
  CHECK(to_json(back) == to_json(cfg));
  CHECK(config_digest(back) == config_digest(cfg));
  AppConfig other = cfg;
  other.slip.xi_plus = 2.5;
  CHECK(config_digest(other) != config_digest(cfg));
  CHECK(config_digest(cfg).size() == 64);
}

TEST_CASE("sha256 matches the standard test vector") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("overrides address nested keys with a double underscore") {
  nlohmann::json doc = nlohmann::json::object();
  apply_overrides(doc, {{"VISCOSITY", "0.25"}, {"SLIP__XI_PLUS", "2"}, {"SIMULATION__DEALIAS", "false"}});
  const auto cfg = parse_config(doc);
  CHECK(cfg.channel.viscosity == 0.25);
  CHECK(cfg.slip.xi_plus == 2.0);
  CHECK_FALSE(cfg.simulation.dealias);
}

TEST_CASE("environment variables override config files") {
  const auto dir = std::filesystem::temp_directory_path() / "slipns_test_env";
  std::filesystem::create_directories(dir);
  const auto path = (dir / "cfg.json").string();
  io::write_text(path, R"({"viscosity": 0.7, "slip": {"xi_minus": 1, "xi_plus": 1}})");
  ::setenv("SLIPNS_VISCOSITY", "0.2", 1);
  ::setenv("SLIPNS_SLIP__XI_MINUS", "3", 1);
  const auto cfg = load_config(path);
  ::unsetenv("SLIPNS_VISCOSITY");
  ::unsetenv("SLIPNS_SLIP__XI_MINUS");
  CHECK(cfg.channel.viscosity == 0.2);
  CHECK(cfg.slip.xi_minus == 3.0);
  CHECK(load_config(path).channel.viscosity == 0.7);
  CHECK_THROWS_AS(load_config((dir / "missing.json").string()), ConfigError);
}

TEST_CASE("csv formatting is locale free with 17 digits") {
  CHECK(io::format_double(0.1) == "0.10000000000000001");
  CHECK(io::format_double(1.0) == "1");
  CHECK(io::format_double(-0.0) == "0");
  CHECK(io::format_double(1e-300) == "1e-300");
  CHECK(io::format_double(std::nan("")) == "nan");
  for (double v : {M_PI, 1.0 / 3.0, 6.02214076e23, -2.5e-7}) CHECK(std::stod(io::format_double(v)) == v);

  const auto dir = std::filesystem::temp_directory_path() / "slipns_test_csv";
  std::filesystem::create_directories(dir);
  const auto path = (dir / "a.csv").string();
  io::CsvWriter w(path, {"k", "mu_c"});
  w.row({1.0, 0.5});
  w.comment("footer");
  w.close();
  CHECK(read_file(path) == "k,mu_c\n1,0.5\n# footer\n");
  io::CsvWriter bad(path, {"a", "b"});
  CHECK_THROWS_AS(bad.row({1.0}), std::logic_error);
}

TEST_CASE("manifest keeps timings in a sidecar") {
  const auto dir = std::filesystem::temp_directory_path() / "slipns_test_manifest";
  io::RunManifest m;
  m.command = "critical";
  m.config_digest = "abc";
  m.outputs = {"critical.csv"};
  {
    io::StageTimer t(m, "stage");
  }
  CHECK(m.timings.count("stage") == 1);
  io::write_manifest(dir.string(), m);
  const auto j = nlohmann::json::parse(read_file(dir / "manifest.json"));
  CHECK(j["command"] == "critical");
  CHECK(j["tool_version"] == io::kToolVersion);
  CHECK_FALSE(j.contains("timings"));
  CHECK(nlohmann::json::parse(read_file(dir / "timings.json")).contains("stage"));
  const std::string first = read_file(dir / "manifest.json");
  m.timings["stage"] = 123.0;
  io::write_manifest(dir.string(), m);
  CHECK(read_file(dir / "manifest.json") == first);
}

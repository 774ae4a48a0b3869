#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

#include "spdc/commands.hpp"
#include "spdc/errors.hpp"

using namespace spdc;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string output;
};

RunResult run_cli(const std::string& args) {
  const std::string cmd = std::string(SPDC_CLI_PATH) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  RunResult result;
  char buf[512];
  while (size_t n = fread(buf, 1, sizeof(buf), pipe)) result.output.append(buf, n);
  const int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

fs::path workspace() {
  const fs::path dir = fs::temp_directory_path() / "spdc_cli_test";
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

void put(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

RunConfig small_slm_config() {
  RunConfig config;
  config.waists = {4e-4, 4e-4};
  config.slm.width_px = 512;
  config.slm.height_px = 512;
  return config;
}

}  // namespace

TEST_CASE("config round trip is the identity") {
  RunConfig config;
  config.pump = {{hg(0, 0), complexd(0.6, 0)}, {hg(2, 0), complexd(0, -0.8)}};
  config.waists = {1.0e-3, 5.0e-4};
  config.quadrature = {QuadratureScheme::RiemannGrid, 128};
  config.basis = Basis::LG;
  config.truncation_order = 3;
  config.angles = {0.1, 0.2, 0.3, 0.4};
  config.noise = PoissonNoiseSpec{75.0, 10, 2.5};
  config.slm = SlmSpec{1024, 768, 8e-6, 1.28e-4, 512};
  config.seed = 99;
  CHECK(parse_config(emit_config(config)) == config);

  const RunConfig defaults;
  CHECK(parse_config(emit_config(defaults)) == defaults);
  CHECK(parse_config("{}") == defaults);
  // emission itself is stable
  CHECK(emit_config(parse_config(emit_config(config))) == emit_config(config));
}

TEST_CASE("config parsing rejects malformed documents") {
  CHECK_THROWS_AS(parse_config("not json"), ConfigError);
  CHECK_THROWS_AS(parse_config("[1,2]"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"pumps": []})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"pump": []})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"x({"pump": [{"mode": "HG(0,0)"}]})x"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"x({"pump": [{"mode": "QQ(0,0)", "weight": [1,0]}]})x"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config(R"x({"pump": [{"mode": "HG(0,0)", "weight": 1}]})x"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"truncation_order": 0})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"seed": -5})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"waists": {"pump": -1.0}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"quadrature": {"scheme": "simpson"}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"noise": {"trials": 0}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"basis": "XY"})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"slm": {"grating_period": 1e-6}})"), ConfigError);
}

TEST_CASE("mode labels parse in both accepted spellings") {
  CHECK(parse_mode_label("HG(0,1)") == hg(0, 1));
  CHECK(parse_mode_label("HG01") == hg(0, 1));
  CHECK(parse_mode_label("LG(1,-2)") == lg(1, -2));
  CHECK(parse_mode_label("LG12") == lg(1, 2));
  CHECK_THROWS_AS(parse_mode_label("HG(-1,0)"), ConfigError);
  CHECK_THROWS_AS(parse_mode_label("XX(0,0)"), ConfigError);
  CHECK_THROWS_AS(parse_mode_label("HG(0;1)"), ConfigError);
  CHECK_THROWS_AS(parse_mode_label(""), ConfigError);
}

TEST_CASE("real formatting is compact and 12-digit stable") {
  CHECK(format_real(0.5) == "0.5");
  CHECK(format_real(2.0) == "2");
  CHECK(format_real(1.0 / 3.0) == "0.333333333333");
  CHECK(format_real(-0.0078125) == "-0.0078125");
  CHECK(format_real(2.5e-07) == "2.5e-07");
}

TEST_CASE("cli spectrum: files, header, normalization, embedded config") {
  const fs::path dir = workspace();
  put(dir / "config.json", emit_config(RunConfig{}));
  const RunResult run = run_cli("spectrum --config " + (dir / "config.json").string() +
                                " --out-dir " + (dir / "out").string());
  CAPTURE(run.output);
  REQUIRE(run.exit_code == 0);

  const std::string csv = slurp(dir / "out" / "spectrum.csv");
  CHECK(csv.rfind("signal_mode,HG(0,0),HG(0,1),HG(1,0),HG(0,2),HG(1,1),HG(2,0)\n", 0) ==
        0);

  const json meta = json::parse(slurp(dir / "out" / "spectrum.json"));
  CHECK(meta["command"] == "spectrum");
  CHECK(std::abs(meta["probability_sum"].get<double>() - 1.0) < 1e-9);
  CHECK(meta["config"]["seed"] == 1);
  CHECK(meta["config"]["truncation_order"] == 2);
}

TEST_CASE("cli chsh: ideal defaults give the Tsirelson value") {
  const fs::path dir = workspace();
  RunConfig config;
  config.pump = {{hg(1, 1), complexd(1, 0)}};
  put(dir / "config.json", emit_config(config));
  const RunResult run = run_cli("chsh --config " + (dir / "config.json").string() +
                                " --out-dir " + (dir / "out").string());
  CAPTURE(run.output);
  REQUIRE(run.exit_code == 0);
  const json record = json::parse(slurp(dir / "out" / "chsh.json"));
  CHECK(std::abs(record["s"].get<double>() - 2.0 * std::sqrt(2.0)) < 1e-9);
  CHECK(record["s_uncertainty"].get<double>() == 0.0);
  const std::string csv = slurp(dir / "out" / "chsh_curve.csv");
  CHECK(csv.rfind("theta_b,", 0) == 0);
}

TEST_CASE("cli chsh: seeded noise reruns are byte-identical") {
  const fs::path dir = workspace();
  RunConfig config;
  config.pump = {{hg(1, 1), complexd(1, 0)}};
  put(dir / "config.json", emit_config(config));
  const std::string base = "chsh --config " + (dir / "config.json").string() +
                           " --noise-counts 50 --trials 3 --seed 7 --out-dir ";
  REQUIRE(run_cli(base + (dir / "a").string()).exit_code == 0);
  REQUIRE(run_cli(base + (dir / "b").string()).exit_code == 0);
  CHECK(slurp(dir / "a" / "chsh.json") == slurp(dir / "b" / "chsh.json"));
  CHECK(slurp(dir / "a" / "chsh_curve.csv") == slurp(dir / "b" / "chsh_curve.csv"));

  const json record = json::parse(slurp(dir / "a" / "chsh.json"));
  CHECK(record["raw_counts_trial0"].size() == 4);
  CHECK(record["s_propagated_sigma"].get<double>() > 0.05);
}

TEST_CASE("cli exit codes distinguish config and convergence failures") {
  const fs::path dir = workspace();
  CHECK(run_cli("spectrum --config " + (dir / "missing.json").string()).exit_code == 2);

  put(dir / "bad_key.json", R"({"pumps": []})");
  CHECK(run_cli("spectrum --config " + (dir / "bad_key.json").string() +
                " --out-dir " + (dir / "o1").string())
            .exit_code == 2);

  put(dir / "empty_pump.json", R"({"pump": []})");
  CHECK(run_cli("spectrum --config " + (dir / "empty_pump.json").string() +
                " --out-dir " + (dir / "o2").string())
            .exit_code == 2);

  put(dir / "coarse.json", R"({"quadrature": {"scheme": "riemann-grid", "nodes": 8}})");
  CHECK(run_cli("spectrum --config " + (dir / "coarse.json").string() + " --out-dir " +
                (dir / "o3").string())
            .exit_code == 3);

  CHECK(run_cli("design --coeffs 0,0,0,0,0,0,0,0 --out-dir " + (dir / "o4").string())
            .exit_code == 2);
  CHECK(run_cli("design --target nonsense --out-dir " + (dir / "o5").string())
            .exit_code == 2);
}

TEST_CASE("cli design: odd Bell target lands on the HG11 pump") {
  const fs::path dir = workspace();
  const RunResult run = run_cli("design --target psi+ --out-dir " + (dir / "out").string());
  CAPTURE(run.output);
  REQUIRE(run.exit_code == 0);
  const json sol = json::parse(slurp(dir / "out" / "design.json"));
  CHECK(sol["low_fidelity"] == false);
  CHECK(sol["achieved_fidelity"].get<double>() > 0.99);
  const auto w = sol["pump_weights"][4];  // HG(1,1) in the order-<=2 basis
  const double mag = std::hypot(w[0].get<double>(), w[1].get<double>());
  CHECK(mag > 0.999);
  CHECK(sol["pump_basis"][4] == "HG(1,1)");
}

TEST_CASE("cli convert: both-basis report classifies the Gaussian-pump state") {
  const fs::path dir = workspace();
  const RunResult run = run_cli("convert --out-dir " + (dir / "out").string());
  CAPTURE(run.output);
  REQUIRE(run.exit_code == 0);
  const json report = json::parse(slurp(dir / "out" / "convert.json"));
  CHECK(report["hg"]["classification"]["state"] == to_string(BellState::PhiPlus));
  CHECK(report["hg"]["classification"]["fidelity"].get<double>() ==
        doctest::Approx(1.0).epsilon(1e-9));
  CHECK(report["lg"]["classification"]["state"] == to_string(BellState::PsiPlus));
  CHECK(report["lg"]["classification"]["fidelity"].get<double>() ==
        doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("cli hologram: writes a verifiable PGM") {
  const fs::path dir = workspace();
  put(dir / "config.json", emit_config(small_slm_config()));
  const RunResult run = run_cli("hologram --config " + (dir / "config.json").string() +
                                " --out-dir " + (dir / "out").string());
  CAPTURE(run.output);
  REQUIRE(run.exit_code == 0);
  const std::string pgm = slurp(dir / "out" / "hologram.pgm");
  CHECK(pgm.rfind("P5\n512 512\n255\n", 0) == 0);
  const json meta = json::parse(slurp(dir / "out" / "hologram.json"));
  CHECK(meta["first_order_fidelity"].get<double>() > 0.95);
}

TEST_CASE("command-level design request validation") {
  DesignRequest request;
  request.custom_coeffs = {complexd(0, 0), complexd(0, 0), complexd(0, 0),
                           complexd(0, 0)};
  CHECK_THROWS_AS(cmd_design(RunConfig{}, request,
                             (fs::temp_directory_path() / "spdc_design_zero").string()),
                  ConfigError);
}

#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "bgrecon/experiments.hpp"

using namespace bgrecon;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "bgrecon_experiment_test" / name;
  fs::remove_all(p);
  fs::create_directories(p.parent_path());
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(BGRECON_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::map<std::string, std::string> manifest_fields(const fs::path& dir) {
  std::map<std::string, std::string> fields;
  std::istringstream in(slurp(dir / "manifest.txt"));
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("file ", 0) == 0) {
      const auto name_end = line.find(' ', 5);
      fields["file:" + line.substr(5, name_end - 5)] = line.substr(name_end + 1);
    } else if (const auto eq = line.find(" = "); eq != std::string::npos) {
      fields[line.substr(0, eq)] = line.substr(eq + 3);
    }
  }
  return fields;
}

}  // namespace

TEST_CASE("test functions") {
  CHECK(evaluate(TestFunctionId::x_a, 0.25) == doctest::Approx(0.125));
  CHECK(evaluate(TestFunctionId::x_a, 0.75) == doctest::Approx(0.5));
  CHECK(evaluate(TestFunctionId::x_b, 0.5) == doctest::Approx(1.0));
  CHECK(evaluate(TestFunctionId::x_b, 0.75) == doctest::Approx(0.5));
  CHECK(evaluate(TestFunctionId::x_c, 0.5) == 1.0);
  CHECK(evaluate(TestFunctionId::x_c, 0.1) == 0.0);
  CHECK(evaluate(TestFunctionId::x_lin2t, 0.3) == doctest::Approx(0.6));
  CHECK(evaluate(TestFunctionId::x_sq, 0.3) == doctest::Approx(0.09));
  for (auto id : {TestFunctionId::x_a, TestFunctionId::x_b, TestFunctionId::x_c}) {
    CHECK(parse_test_function(to_string(id)) == id);
  }
  CHECK_FALSE(parse_test_function("x_z").has_value());
}

TEST_CASE("experiment ids round-trip") {
  for (auto name : experiment_names()) {
    const auto id = parse_experiment_id(name);
    REQUIRE(id.has_value());
    CHECK(to_string(*id) == name);
  }
  CHECK(experiment_names().size() == 8);
  CHECK_FALSE(parse_experiment_id("fig7").has_value());
}

TEST_CASE("log-log slope of an exact power law") {
  const std::vector<int> n = {10, 20, 40};
  const std::vector<double> e = {1.0, 0.25, 0.0625};
  CHECK(loglog_slope(n, e) == doctest::Approx(-2.0));
  CHECK_THROWS_AS(loglog_slope({10}, {1.0}), std::invalid_argument);
}

TEST_CASE("configuration defaults and validation") {
  ExperimentConfig c;
  c.id = ExperimentId::fig3;
  CHECK(c.resolved_n() == 50);
  c.id = ExperimentId::table1;
  CHECK(c.resolved_n() == 128);
  c.id = ExperimentId::fig2;
  CHECK(c.resolved_eps() == 0.01);
  c.id = ExperimentId::fig5;
  CHECK(c.resolved_nu() == 0.01);
  c.id = ExperimentId::fig1;
  CHECK(c.resolved_n() == 25);
  CHECK(c.resolved_nu() == 0.0);
  c.n = 3;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c.n = 10;
  c.nu = -1.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c.nu.reset();
  c.id = ExperimentId::fig6;
  c.n = 30;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c.n = 32;
  CHECK_NOTHROW(c.validate());
}

TEST_CASE("config file parsing") {
  const fs::path dir = scratch("config");
  fs::create_directories(dir);
  const fs::path file = dir / "run.cfg";
  std::ofstream(file) << "# comment\n id = fig4 \n\nn=30\nnu = 0.5 # trailing\nseed=7\nout=results\n";
  const auto kv = read_config_file(file);
  ExperimentConfig c;
  for (const auto& [k, v] : kv) apply_config_value(c, k, v);
  CHECK(c.id == ExperimentId::fig4);
  CHECK(c.n == 30);
  CHECK(c.nu == 0.5);
  CHECK(c.seed == 7);
  CHECK(c.out == fs::path("results"));

  CHECK_THROWS_AS(apply_config_value(c, "colour", "red"), std::invalid_argument);
  CHECK_THROWS_AS(apply_config_value(c, "n", "many"), std::invalid_argument);
  CHECK_THROWS_AS(apply_config_value(c, "id", "fig9"), UnknownExperiment);
  std::ofstream(dir / "bad.cfg") << "no equals sign\n";
  CHECK_THROWS_AS(read_config_file(dir / "bad.cfg"), std::invalid_argument);
  CHECK_THROWS_AS(read_config_file(dir / "absent.cfg"), std::invalid_argument);
}

TEST_CASE("crc32 check value") {
  CHECK(crc32_of("123456789") == 0xCBF43926u);
  CHECK(crc32_of("") == 0u);
}

TEST_CASE("hadamard run writes csv, svg and a manifest with checksums") {
  ExperimentConfig c;
  c.id = ExperimentId::hadamard;
  c.n = 6;
  c.out = scratch("hadamard");
  const ExperimentResult r = run_experiment(c);
  CHECK(fs::exists(c.out / "hadamard.csv"));
  CHECK(fs::exists(c.out / "hadamard.svg"));
  const auto fields = manifest_fields(c.out);
  CHECK(fields.at("experiment") == "hadamard");
  CHECK(fields.at("n") == "6");
  for (const auto& a : r.artifacts) {
    const std::string bytes = slurp(c.out / a.name);
    CHECK(a.bytes == bytes.size());
    CHECK(a.crc32 == crc32_of(bytes));
    char expect[64];
    std::snprintf(expect, sizeof expect, "bytes=%zu crc32=%08x", bytes.size(), crc32_of(bytes));
    CHECK(fields.at("file:" + a.name) == expect);
  }
}

TEST_CASE("reruns are byte-identical") {
  ExperimentConfig c;
  c.id = ExperimentId::fig2;
  c.n = 12;
  c.seed = 5;
  const fs::path dir_a = scratch("rerun_a"), dir_b = scratch("rerun_b");
  c.out = dir_a;
  const auto a = run_experiment(c);
  c.out = dir_b;
  const auto b = run_experiment(c);
  REQUIRE(a.artifacts.size() == b.artifacts.size());
  for (std::size_t i = 0; i < a.artifacts.size(); ++i) {
    CHECK(a.artifacts[i].name == b.artifacts[i].name);
    CHECK(a.artifacts[i].crc32 == b.artifacts[i].crc32);
  }
  CHECK(slurp(dir_a / "manifest.txt") == slurp(dir_b / "manifest.txt"));
}

TEST_CASE("different seeds change the noisy data") {
  ExperimentConfig c;
  c.id = ExperimentId::fig2;
  c.n = 12;
  c.seed = 1;
  c.out = scratch("seed_1");
  const auto a = run_experiment(c);
  c.seed = 2;
  c.out = scratch("seed_2");
  const auto b = run_experiment(c);
  CHECK(a.artifacts.front().crc32 != b.artifacts.front().crc32);
}

TEST_CASE("unwritable output directory") {
  ExperimentConfig c;
  c.id = ExperimentId::hadamard;
  c.out = "/proc/bgrecon_cannot_write_here";
  CHECK_THROWS_AS(run_experiment(c), OutputError);
}

TEST_CASE("command-line exit codes") {
  const fs::path out = scratch("cli");
  CHECK(run_cli("hadamard --n 4 --out " + out.string()) == 0);
  CHECK(fs::exists(out / "manifest.txt"));
  CHECK(run_cli("fig9 --out " + out.string()) == 2);
  CHECK(run_cli("hadamard --out /proc/bgrecon_cannot_write_here") == 4);
  CHECK(run_cli("fig5 --nu 50 --out " + out.string()) == 3);
  CHECK(run_cli("fig1 --n 2 --out " + out.string()) != 0);
  CHECK(run_cli("") != 0);
}

TEST_CASE("command-line flags override the config file") {
  const fs::path dir = scratch("cli_cfg");
  fs::create_directories(dir);
  std::ofstream(dir / "run.cfg") << "n = 4\nout = " << (dir / "from_file").string() << "\n";
  CHECK(run_cli("hadamard --config " + (dir / "run.cfg").string()) == 0);
  CHECK(manifest_fields(dir / "from_file").at("n") == "4");
  CHECK(run_cli("hadamard --config " + (dir / "run.cfg").string() + " --n 5 --out " +
                (dir / "from_flag").string()) == 0);
  CHECK(manifest_fields(dir / "from_flag").at("n") == "5");
  CHECK_FALSE(fs::exists(dir / "from_flag" / "from_file"));
}

// Command-line driver: bgrecon <experiment-id> [--n N] [--nu NU] [--eps EPS]
//                              [--seed S] [--out DIR] [--config FILE]

#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "bgrecon/experiments.hpp"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitUnknownId = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitOutput = 4;

std::string id_list() {
  std::string names;
  for (auto n : bgrecon::experiment_names()) names += (names.empty() ? "" : ", ") + std::string(n);
  return names;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Backus-Gilbert reconstruction experiments"};
  std::string id_text;
  std::string config_path;
  std::optional<int> n;
  std::optional<double> nu, eps;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;

  app.add_option("experiment-id", id_text, "one of: " + id_list())->required();
  app.add_option("--n", n, "problem size N (angular count for fig6/table1, k_max for hadamard)");
  app.add_option("--nu", nu, "weight of the quadratic term");
  app.add_option("--eps", eps, "relative noise level");
  app.add_option("--seed", seed, "noise seed");
  app.add_option("--out", out, "output directory");
  app.add_option("--config", config_path, "key=value file; command-line flags override it");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitUsage;
  }

  bgrecon::ExperimentConfig config;
  try {
    if (!config_path.empty()) {
      for (const auto& [key, value] : bgrecon::read_config_file(config_path)) {
        if (key != "id") bgrecon::apply_config_value(config, key, value);
      }
    }
    bgrecon::apply_config_value(config, "id", id_text);
  } catch (const bgrecon::UnknownExperiment& e) {
    std::cerr << "bgrecon: " << e.what() << " (expected one of: " << id_list() << ")\n";
    return kExitUnknownId;
  } catch (const std::exception& e) {
    std::cerr << "bgrecon: " << e.what() << '\n';
    return kExitUsage;
  }
  if (n) config.n = n;
  if (nu) config.nu = nu;
  if (eps) config.eps = eps;
  if (seed) config.seed = *seed;
  if (out) config.out = *out;

  try {
    const auto result = bgrecon::run_experiment(config);
    for (const auto& line : result.summary) std::cout << line << '\n';
    std::cout << "wrote " << result.artifacts.size() << " files and manifest.txt to "
              << config.out.string() << '\n';
    return 0;
  } catch (const bgrecon::NumericalError& e) {
    std::cerr << "bgrecon: numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const bgrecon::OutputError& e) {
    std::cerr << "bgrecon: " << e.what() << '\n';
    return kExitOutput;
  } catch (const std::invalid_argument& e) {
    std::cerr << "bgrecon: " << e.what() << '\n';
    return kExitUsage;
  }
}

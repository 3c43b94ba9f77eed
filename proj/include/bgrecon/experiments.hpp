#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "bgrecon/backus_gilbert.hpp"
#include "bgrecon/bspline.hpp"
#include "bgrecon/grid.hpp"
#include "bgrecon/volterra.hpp"

namespace bgrecon {

// ---- test functions of the moment-problem experiments ----

enum class TestFunctionId { x_a, x_b, x_c, x_lin2t, x_sq };

/// x_a: t/2 then t − 1/4 (kink at 1/2); x_b: hat 2t, 2 − 2t; x_c: indicator of
/// [1/4, 3/4]; x_lin2t: 2t; x_sq: t².
double evaluate(TestFunctionId id, double t);
std::function<double(double)> test_function(TestFunctionId id);
std::string_view to_string(TestFunctionId id);
std::optional<TestFunctionId> parse_test_function(std::string_view name);

// ---- shared Volterra setup ----

/// Quadrature nodes per B-spline interval; data and weights share this grid.
inline constexpr int kQuadratureRefinement = 8;

/// Everything needed to reconstruct point values from N measurements at t_i = i/N
/// for the operator with kernel x⁰(t) = t.
struct VolterraSetup {
  UniformGrid grid;
  DiscreteForwardMap map;
  CubicBSplineBasis basis;
  SampledFunction x0;

  [[nodiscard]] std::vector<double> data_for(const std::function<double(double)>& x) const;
};

VolterraSetup make_volterra_setup(int n, double nu);

/// Open-interval sup error on (0.1, 0.9); the spline basis is truncated at the
/// ends of [0,1], so the boundary layers are excluded.
double interior_sup_error(const Profile& profile, const std::function<double(double)>& truth);

/// Least-squares slope of log(error) against log(n).
double loglog_slope(const std::vector<int>& n, const std::vector<double>& error);

// ---- experiment harness ----

enum class ExperimentId { fig1, fig2, fig3, fig4, fig5, fig6, table1, hadamard };

std::string_view to_string(ExperimentId id);
std::optional<ExperimentId> parse_experiment_id(std::string_view name);
std::vector<std::string_view> experiment_names();

/// Unset optionals fall back to the per-experiment defaults (see resolved()).
struct ExperimentConfig {
  ExperimentId id = ExperimentId::fig1;
  std::optional<int> n;
  std::optional<double> nu;
  std::optional<double> eps;
  std::uint64_t seed = 1;
  std::filesystem::path out = "out";

  /// Throws std::invalid_argument if N < 4, ν < 0 or ε < 0.
  void validate() const;
  [[nodiscard]] int resolved_n() const;
  [[nodiscard]] double resolved_nu() const;
  [[nodiscard]] double resolved_eps() const;
};

/// Reads flat key=value lines ('#' starts a comment). Recognised keys: id, n,
/// nu, eps, seed, out. Unknown keys and malformed values throw
/// std::invalid_argument; an unknown id throws UnknownExperiment.
std::map<std::string, std::string> read_config_file(const std::filesystem::path& path);
void apply_config_value(ExperimentConfig& config, const std::string& key, const std::string& value);

class UnknownExperiment : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The output directory or one of its files could not be written.
class OutputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ArtifactRecord {
  std::string name;
  std::uintmax_t bytes = 0;
  std::uint32_t crc32 = 0;
};

struct ExperimentResult {
  std::vector<ArtifactRecord> artifacts;  ///< everything written except the manifest
  std::vector<std::string> summary;       ///< human-readable lines for the console
};

/// Runs one experiment and writes its CSV files, an SVG plot and manifest.txt
/// into config.out. Throws NumericalError, OutputError or std::invalid_argument.
ExperimentResult run_experiment(const ExperimentConfig& config);

std::uint32_t crc32_of(std::string_view bytes);

}  // namespace bgrecon

#include "bgrecon/experiments.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include <boost/crc.hpp>

#include "bgrecon/annulus.hpp"
#include "bgrecon/hadamard.hpp"
#include "bgrecon/plot.hpp"

namespace bgrecon {

double evaluate(TestFunctionId id, double t) {
  switch (id) {
    case TestFunctionId::x_a: return t <= 0.5 ? 0.5 * t : t - 0.25;
    case TestFunctionId::x_b: return t <= 0.5 ? 2.0 * t : 2.0 - 2.0 * t;
    case TestFunctionId::x_c: return (t >= 0.25 && t <= 0.75) ? 1.0 : 0.0;
    case TestFunctionId::x_lin2t: return 2.0 * t;
    case TestFunctionId::x_sq: return t * t;
  }
  return 0.0;
}

std::function<double(double)> test_function(TestFunctionId id) {
  return [id](double t) { return evaluate(id, t); };
}

std::string_view to_string(TestFunctionId id) {
  switch (id) {
    case TestFunctionId::x_a: return "x_a";
    case TestFunctionId::x_b: return "x_b";
    case TestFunctionId::x_c: return "x_c";
    case TestFunctionId::x_lin2t: return "x_lin2t";
    case TestFunctionId::x_sq: return "x_sq";
  }
  return "?";
}

std::optional<TestFunctionId> parse_test_function(std::string_view name) {
  for (auto id : {TestFunctionId::x_a, TestFunctionId::x_b, TestFunctionId::x_c,
                  TestFunctionId::x_lin2t, TestFunctionId::x_sq}) {
    if (to_string(id) == name) return id;
  }
  return std::nullopt;
}

std::vector<double> VolterraSetup::data_for(const std::function<double(double)>& x) const {
  return map.forward_data(SampledFunction::sample(map.op().grid(), x));
}

VolterraSetup make_volterra_setup(int n, double nu) {
  const UniformGrid grid(n);
  const UniformGrid quadrature = grid.refined(kQuadratureRefinement);
  const SampledFunction kernel = SampledFunction::sample(quadrature, [](double t) { return t; });
  QuadraticVolterraOperator op(kernel, nu);
  return {grid, DiscreteForwardMap::uniform(op, n), CubicBSplineBasis(grid), kernel};
}

double interior_sup_error(const Profile& profile, const std::function<double(double)>& truth) {
  constexpr double lo = 0.1, hi = 0.9, slack = 1e-12;
  double worst = 0.0;
  for (const auto& p : profile) {
    if (p.t > lo + slack && p.t < hi - slack) worst = std::max(worst, std::abs(p.value - truth(p.t)));
  }
  return worst;
}

double loglog_slope(const std::vector<int>& n, const std::vector<double>& error) {
  if (n.size() != error.size() || n.size() < 2) {
    throw std::invalid_argument("loglog_slope: need at least two matching samples");
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(n.size());
  for (std::size_t i = 0; i < n.size(); ++i) {
    const double x = std::log(static_cast<double>(n[i]));
    const double y = std::log(error[i]);
    sx += x, sy += y, sxx += x * x, sxy += x * y;
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

namespace {

constexpr std::array<ExperimentId, 8> kAllExperiments = {
    ExperimentId::fig1, ExperimentId::fig2, ExperimentId::fig3,   ExperimentId::fig4,
    ExperimentId::fig5, ExperimentId::fig6, ExperimentId::table1, ExperimentId::hadamard};

}  // namespace

std::string_view to_string(ExperimentId id) {
  switch (id) {
    case ExperimentId::fig1: return "fig1";
    case ExperimentId::fig2: return "fig2";
    case ExperimentId::fig3: return "fig3";
    case ExperimentId::fig4: return "fig4";
    case ExperimentId::fig5: return "fig5";
    case ExperimentId::fig6: return "fig6";
    case ExperimentId::table1: return "table1";
    case ExperimentId::hadamard: return "hadamard";
  }
  return "?";
}

std::optional<ExperimentId> parse_experiment_id(std::string_view name) {
  for (auto id : kAllExperiments) {
    if (to_string(id) == name) return id;
  }
  return std::nullopt;
}

std::vector<std::string_view> experiment_names() {
  std::vector<std::string_view> names;
  for (auto id : kAllExperiments) names.push_back(to_string(id));
  return names;
}

void ExperimentConfig::validate() const {
  if (n && *n < 4) throw std::invalid_argument("N must be at least 4");
  if (nu && !(*nu >= 0.0 && std::isfinite(*nu))) throw std::invalid_argument("nu must be >= 0");
  if (eps && !(*eps >= 0.0 && std::isfinite(*eps))) throw std::invalid_argument("eps must be >= 0");
  if (id == ExperimentId::fig3 && resolved_n() < 12) {
    throw std::invalid_argument("fig3 sweeps N = 10..n and needs n >= 12");
  }
  if ((id == ExperimentId::fig6 || id == ExperimentId::table1) &&
      (resolved_n() < 8 || resolved_n() % 4 != 0)) {
    throw std::invalid_argument("annulus experiments need an angular count n divisible by 4");
  }
}

int ExperimentConfig::resolved_n() const {
  if (n) return *n;
  switch (id) {
    case ExperimentId::fig3: return 50;
    case ExperimentId::fig6:
    case ExperimentId::table1: return 128;
    case ExperimentId::hadamard: return 10;
    default: return 25;
  }
}

double ExperimentConfig::resolved_nu() const {
  if (nu) return *nu;
  return id == ExperimentId::fig5 ? 0.01 : 0.0;
}

double ExperimentConfig::resolved_eps() const {
  if (eps) return *eps;
  return id == ExperimentId::fig2 ? 0.01 : 0.0;
}

namespace {

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <class T>
T parse_number(const std::string& key, const std::string& value) {
  std::istringstream in(value);
  T result{};
  in >> result;
  if (!in || !(in >> std::ws).eof()) {
    throw std::invalid_argument("config: bad value '" + value + "' for key '" + key + "'");
  }
  return result;
}

}  // namespace

std::map<std::string, std::string> read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open " + path.string());
  std::map<std::string, std::string> values;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config: line " + std::to_string(number) + " has no '='");
    }
    values[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return values;
}

void apply_config_value(ExperimentConfig& config, const std::string& key, const std::string& value) {
  if (key == "id") {
    const auto id = parse_experiment_id(value);
    if (!id) throw UnknownExperiment("unknown experiment id '" + value + "'");
    config.id = *id;
  } else if (key == "n") {
    config.n = parse_number<int>(key, value);
  } else if (key == "nu") {
    config.nu = parse_number<double>(key, value);
  } else if (key == "eps") {
    config.eps = parse_number<double>(key, value);
  } else if (key == "seed") {
    config.seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "out") {
    config.out = value;
  } else {
    throw std::invalid_argument("config: unknown key '" + key + "'");
  }
}

std::uint32_t crc32_of(std::string_view bytes) {
  boost::crc_32_type crc;
  crc.process_bytes(bytes.data(), bytes.size());
  return crc.checksum();
}

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string short_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

/// Writes files into the output directory and remembers their checksums.
class ArtifactWriter {
 public:
  explicit ArtifactWriter(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec || !std::filesystem::is_directory(dir_)) {
      throw OutputError("cannot create output directory " + dir_.string() +
                        (ec ? ": " + ec.message() : ""));
    }
  }

  [[nodiscard]] std::filesystem::path path_of(const std::string& name) const { return dir_ / name; }

  void write(const std::string& name, const std::string& content, bool record = true) {
    std::ofstream file(path_of(name), std::ios::binary | std::ios::trunc);
    file << content;
    file.close();
    if (!file) throw OutputError("cannot write " + path_of(name).string());
    if (record) records_.push_back({name, content.size(), crc32_of(content)});
  }

  void plot(const std::string& name, std::vector<PlotSeries> series, const PlotOptions& options) {
    for (auto& s : series) s.csv = path_of(s.csv.string());
    write(name, render_plot(series, options));
  }

  [[nodiscard]] const std::vector<ArtifactRecord>& records() const noexcept { return records_; }

 private:
  std::filesystem::path dir_;
  std::vector<ArtifactRecord> records_;
};

std::string profile_csv(const Profile& profile, const std::function<double(double)>& truth) {
  std::ostringstream out;
  write_profile_csv(out, profile, truth);
  return out.str();
}

const std::array<TestFunctionId, 3> kFigureOneFunctions = {TestFunctionId::x_a, TestFunctionId::x_b,
                                                           TestFunctionId::x_c};

void run_profiles(const ExperimentConfig& config, const std::string& prefix,
                  const std::vector<int>& sizes, ArtifactWriter& writer,
                  std::vector<std::string>& summary) {
  const double nu = config.resolved_nu();
  const double eps = config.resolved_eps();
  std::vector<PlotSeries> series;
  std::ostringstream table;
  table << "n,function,interior_sup_error\n";
  for (int n : sizes) {
    const VolterraSetup setup = make_volterra_setup(n, nu);
    const auto targets = nodes_and_midpoints(setup.grid);
    const BackusGilbertReconstructor rec(setup.map, setup.basis, setup.x0);
    const auto weights = rec.weights(targets);
    for (auto fn : kFigureOneFunctions) {
      auto truth = test_function(fn);
      std::vector<double> y = setup.data_for(truth);
      if (eps > 0.0) y = add_relative_noise(y, NoiseSpec{eps, config.seed});
      const Profile profile = apply_weights(weights, targets, y);
      const std::string name = prefix + "_n" + std::to_string(n) + "_" + std::string(to_string(fn)) + ".csv";
      writer.write(name, profile_csv(profile, truth));
      const double err = interior_sup_error(profile, truth);
      table << n << ',' << to_string(fn) << ',' << num(err) << '\n';
      summary.push_back("N=" + std::to_string(n) + " " + std::string(to_string(fn)) +
                        ": interior sup error " + short_num(err));
      if (n == sizes.front()) {
        series.push_back({std::string(to_string(fn)) + " reconstructed", name, 1});
        series.push_back({std::string(to_string(fn)) + " exact", name, 2});
      }
    }
  }
  writer.write(prefix + "_summary.csv", table.str());
  PlotOptions opt;
  opt.title = prefix + ": point-value reconstruction, N=" + std::to_string(sizes.front()) +
              ", nu=" + short_num(nu) + ", eps=" + short_num(eps);
  writer.plot(prefix + ".svg", series, opt);
}

void run_fig3(const ExperimentConfig& config, ArtifactWriter& writer,
              std::vector<std::string>& summary) {
  const double nu = config.resolved_nu();
  const auto lin = test_function(TestFunctionId::x_lin2t);
  const auto hat = test_function(TestFunctionId::x_b);
  std::ostringstream csv;
  csv << "n,parity,error_x_lin2t,error_x_b\n";
  std::vector<int> even_n;
  std::vector<double> even_lin, even_hat;
  for (int n = 10; n <= config.resolved_n(); ++n) {
    const VolterraSetup setup = make_volterra_setup(n, nu);
    const BackusGilbertReconstructor rec(setup.map, setup.basis, setup.x0);
    const WeightVector w = rec.weights(0.5);
    const double e_lin = std::abs(reconstruct_value(w, setup.data_for(lin)) - lin(0.5));
    const double e_hat = std::abs(reconstruct_value(w, setup.data_for(hat)) - hat(0.5));
    csv << n << ',' << (n % 2 == 0 ? "even" : "odd") << ',' << num(e_lin) << ',' << num(e_hat)
        << '\n';
    if (n % 2 == 0) {
      even_n.push_back(n);
      even_lin.push_back(e_lin);
      even_hat.push_back(e_hat);
    }
  }
  writer.write("fig3.csv", csv.str());

  const double s_lin = loglog_slope(even_n, even_lin);
  const double s_hat = loglog_slope(even_n, even_hat);
  std::ostringstream slopes;
  slopes << "function,slope_even_n\n"
         << "x_lin2t," << num(s_lin) << '\n'
         << "x_b," << num(s_hat) << '\n';
  writer.write("fig3_slopes.csv", slopes.str());
  summary.push_back("log-log slope over even N: x_lin2t " + short_num(s_lin) + ", x_b " +
                    short_num(s_hat));

  PlotOptions opt;
  opt.title = "fig3: error at t=1/2 versus N";
  opt.x_label = "N";
  opt.y_label = "error";
  opt.log_x = opt.log_y = true;
  writer.plot("fig3.svg", {{"x_lin2t = 2t", "fig3.csv", 2}, {"x_b (hat)", "fig3.csv", 3}}, opt);
}

void run_fig4(const ExperimentConfig& config, ArtifactWriter& writer,
              std::vector<std::string>& summary) {
  const int n = config.resolved_n();
  const auto truth = test_function(TestFunctionId::x_sq);
  std::vector<PlotSeries> series;
  std::ostringstream table;
  table << "nu,interior_sup_error\n";
  for (double nu : {0.01, 0.1, 1.0}) {
    const VolterraSetup setup = make_volterra_setup(n, nu);
    const auto targets = nodes_and_midpoints(setup.grid);
    const Profile profile =
        reconstruct_profile(setup.map, setup.basis, setup.x0, setup.data_for(truth), targets);
    const std::string name = "fig4_nu" + short_num(nu) + ".csv";
    writer.write(name, profile_csv(profile, truth));
    const double err = interior_sup_error(profile, truth);
    table << num(nu) << ',' << num(err) << '\n';
    summary.push_back("nu=" + short_num(nu) + ": interior sup error " + short_num(err));
    series.push_back({"nu=" + short_num(nu), name, 1});
  }
  series.push_back({"t^2", series.front().csv, 2});
  writer.write("fig4_summary.csv", table.str());
  PlotOptions opt;
  opt.title = "fig4: reconstructing t^2, N=" + std::to_string(n);
  writer.plot("fig4.svg", series, opt);
}

void run_fig5(const ExperimentConfig& config, ArtifactWriter& writer,
              std::vector<std::string>& summary) {
  const int n = config.resolved_n();
  const double nu = config.resolved_nu();
  const VolterraSetup setup = make_volterra_setup(n, nu);
  const auto targets = nodes_and_midpoints(setup.grid);
  std::vector<PlotSeries> series;
  for (auto fn : {TestFunctionId::x_b, TestFunctionId::x_c}) {
    const auto truth = test_function(fn);
    const auto rounds =
        iterative_refinement(setup.map, setup.basis, setup.x0, setup.data_for(truth), targets, 2);
    std::ostringstream csv;
    csv << "t,reconstructed,refined,truth\n";
    for (std::size_t i = 0; i < targets.size(); ++i) {
      const double refined = rounds.back()[i].value;
      csv << num(targets[i]) << ',' << num(rounds.front()[i].value) << ',' << num(refined) << ','
          << num(truth(targets[i])) << '\n';
    }
    const std::string name = "fig5_" + std::string(to_string(fn)) + ".csv";
    writer.write(name, csv.str());
    summary.push_back(std::string(to_string(fn)) + ": interior sup error " +
                      short_num(interior_sup_error(rounds.front(), truth)) + " (round 1), " +
                      short_num(interior_sup_error(rounds.back(), truth)) + " (round " +
                      std::to_string(rounds.size()) + ")");
    series.push_back({std::string(to_string(fn)) + " reconstructed", name, 1});
    series.push_back({std::string(to_string(fn)) + " exact", name, 3});
  }
  PlotOptions opt;
  opt.title = "fig5: nu=" + short_num(nu) + ", exact data, N=" + std::to_string(n);
  writer.plot("fig5.svg", series, opt);
}

/// Grid for the annulus experiments: n angular nodes, n/4 + 1 radial nodes.
AnnulusGrid annulus_grid_for(const ExperimentConfig& config) {
  const int angular = config.resolved_n();
  return AnnulusGrid(angular / 4 + 1, angular);
}

constexpr int kSweeps = 100;
constexpr double kSweepTolerance = 1e-10;

void run_fig6(const ExperimentConfig& config, ArtifactWriter& writer,
              std::vector<std::string>& summary) {
  const AnnulusGrid grid = annulus_grid_for(config);
  const AnnulusCauchyProblem problem(grid);
  const BoundaryTrace mu =
      -1.0 * problem.apply_A_sharp(BoundaryTrace::constant(grid, Segment::left, 1.0));
  const KozlovMazyaResult km = problem.kozlov_mazya_solve(mu, kSweeps, kSweepTolerance);

  std::vector<std::size_t> shown;
  for (std::size_t k : {std::size_t{1}, std::size_t{5}, std::size_t{20}, km.iterates.size() - 1}) {
    if (k < km.iterates.size() && std::find(shown.begin(), shown.end(), k) == shown.end()) {
      shown.push_back(k);
    }
  }
  std::ostringstream csv;
  csv << "node,t";
  for (auto k : shown) csv << ",psi_" << k;
  csv << '\n';
  for (int j = 0; j < grid.segment_size(Segment::left); ++j) {
    csv << j << ',' << num(grid.segment_parameter(Segment::left, j));
    for (auto k : shown) csv << ',' << num(km.iterates[k].values[j]);
    csv << '\n';
  }
  writer.write("fig6_iterates.csv", csv.str());

  std::ostringstream res;
  res << "k,residual\n";
  for (std::size_t k = 0; k < km.residuals.size(); ++k) res << k << ',' << num(km.residuals[k]) << '\n';
  writer.write("fig6_residuals.csv", res.str());

  summary.push_back("Kozlov-Maz'ya sweeps: " + std::to_string(km.residuals.size() - 1) +
                    ", residual " + short_num(km.residuals[1]) + " (k=1) -> " +
                    short_num(km.residuals.back()) + " (k=" +
                    std::to_string(km.residuals.size() - 1) + ")");
  if (!km.diagnostic.empty()) summary.push_back("note: " + km.diagnostic);

  std::vector<PlotSeries> series;
  for (std::size_t i = 0; i < shown.size(); ++i) {
    series.push_back({"psi_" + std::to_string(shown[i]), "fig6_iterates.csv", static_cast<int>(i) + 2});
  }
  PlotOptions opt;
  opt.title = "fig6: iterates psi_k on the left half (node 0 = (0,-1))";
  opt.x_label = "node";
  writer.plot("fig6.svg", series, opt);
}

void run_table1(const ExperimentConfig& config, ArtifactWriter& writer,
                std::vector<std::string>& summary) {
  using std::numbers::pi;
  const AnnulusGrid grid = annulus_grid_for(config);
  const AnnulusCauchyProblem problem(grid);
  const BoundaryTrace mu =
      -1.0 * problem.apply_A_sharp(BoundaryTrace::constant(grid, Segment::left, 1.0));
  const KozlovMazyaResult km = problem.kozlov_mazya_solve(mu, kSweeps, kSweepTolerance);

  struct Case {
    const char* label;
    std::function<double(double)> phi;
    double a, b;
  };
  const std::array<Case, 2> cases = {
      Case{"phi1", [](double t) { return (t - pi / 2) * (t - pi / 2); }, pi * pi / 4, pi * pi / 4},
      Case{"phi2", [](double t) { return pi - 2.0 * std::abs(t - pi / 2); }, 0.0, 0.0}};

  std::ostringstream csv;
  csv << "phi,mu_phi,psi_f,psi_f_minus_r,relative_error\n";
  for (const auto& c : cases) {
    const BoundaryTrace phi = BoundaryTrace::sample(grid, Segment::right, c.phi);
    const BoundaryTrace f = problem.apply_A(phi);
    const double truth = trace_inner_product(grid, mu, phi);
    const double raw = trace_inner_product(grid, km.psi, f);
    const double corrected = problem.sentinel_reconstruct(km.psi, f, c.a, c.b);
    const double rel = std::abs(corrected - truth) / std::abs(truth);
    csv << c.label << ',' << num(truth) << ',' << num(raw) << ',' << num(corrected) << ','
        << num(rel) << '\n';
    summary.push_back(std::string(c.label) + ": <mu,phi> " + short_num(truth) + ", <psi,f> " +
                      short_num(raw) + ", corrected " + short_num(corrected) +
                      ", relative error " + short_num(rel));
  }
  writer.write("table1.csv", csv.str());

  std::ostringstream psi_csv, mu_csv;
  write_trace_csv(psi_csv, grid, km.psi);
  write_trace_csv(mu_csv, grid, mu);
  writer.write("table1_psi.csv", psi_csv.str());
  writer.write("table1_mu.csv", mu_csv.str());
  PlotOptions opt;
  opt.title = "table1: sentinel mu on the right half and psi on the left half";
  opt.x_label = "node";
  writer.plot("table1.svg", {{"mu", "table1_mu.csv", 2}, {"psi", "table1_psi.csv", 2}}, opt);
}

void run_hadamard(const ExperimentConfig& config, ArtifactWriter& writer,
                  std::vector<std::string>& summary) {
  const auto rows = hadamard::amplification_table(config.resolved_n());
  std::ostringstream csv;
  hadamard::write_amplification_csv(csv, rows);
  writer.write("hadamard.csv", csv.str());
  for (const auto& r : rows) {
    if (r.ratio > 1e6) {
      summary.push_back("amplification first exceeds 1e6 at k=" + std::to_string(r.k));
      break;
    }
  }
  summary.push_back("k=" + std::to_string(rows.back().k) + ": ratio " + short_num(rows.back().ratio));
  PlotOptions opt;
  opt.title = "hadamard: data-to-solution amplification";
  opt.x_label = "k";
  opt.log_y = true;
  writer.plot("hadamard.svg",
              {{"sup|u_k| / sup|phi_k|", "hadamard.csv", 3}, {"sup|phi_k|", "hadamard.csv", 1}}, opt);
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  ArtifactWriter writer(config.out);
  ExperimentResult result;
  auto& summary = result.summary;
  switch (config.id) {
    case ExperimentId::fig1:
      run_profiles(config, "fig1", {config.resolved_n(), 2 * config.resolved_n()}, writer, summary);
      break;
    case ExperimentId::fig2:
      run_profiles(config, "fig2", {config.resolved_n()}, writer, summary);
      break;
    case ExperimentId::fig3: run_fig3(config, writer, summary); break;
    case ExperimentId::fig4: run_fig4(config, writer, summary); break;
    case ExperimentId::fig5: run_fig5(config, writer, summary); break;
    case ExperimentId::fig6: run_fig6(config, writer, summary); break;
    case ExperimentId::table1: run_table1(config, writer, summary); break;
    case ExperimentId::hadamard: run_hadamard(config, writer, summary); break;
  }
  result.artifacts = writer.records();

  std::ostringstream manifest;
  manifest << "experiment = " << to_string(config.id) << '\n'
           << "n = " << config.resolved_n() << '\n'
           << "nu = "
           << (config.id == ExperimentId::fig4 ? std::string("0.01,0.1,1") : num(config.resolved_nu()))
           << '\n'
           << "eps = " << num(config.resolved_eps()) << '\n'
           << "seed = " << config.seed << '\n';
  for (const auto& a : result.artifacts) {
    char crc[16];
    std::snprintf(crc, sizeof crc, "%08x", static_cast<unsigned>(a.crc32));
    manifest << "file " << a.name << " bytes=" << a.bytes << " crc32=" << crc << '\n';
  }
  writer.write("manifest.txt", manifest.str(), false);
  return result;
}

}  // namespace bgrecon

#include "bgrecon/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <random>

namespace bgrecon {

UniformGrid::UniformGrid(int intervals) : intervals_(intervals) {
  if (intervals < 1) {
    throw std::invalid_argument("UniformGrid: interval count must be positive");
  }
}

std::vector<double> UniformGrid::nodes() const {
  std::vector<double> t(node_count());
  for (int j = 0; j <= intervals_; ++j) t[j] = node(j);
  return t;
}

int UniformGrid::node_index(double t) const noexcept {
  const double scaled = t * intervals_;
  const double nearest = std::round(scaled);
  if (std::abs(scaled - nearest) > 1e-9 || nearest < 0 || nearest > intervals_) return -1;
  return static_cast<int>(nearest);
}

UniformGrid UniformGrid::refined(int factor) const {
  if (factor < 1) throw std::invalid_argument("UniformGrid::refined: factor must be positive");
  return UniformGrid(intervals_ * factor);
}

SampledFunction::SampledFunction(UniformGrid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.node_count()) {
    throw std::invalid_argument("SampledFunction: value count " + std::to_string(values_.size()) +
                                " does not match node count " +
                                std::to_string(grid_.node_count()));
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw std::invalid_argument("SampledFunction: non-finite value");
  }
}

SampledFunction SampledFunction::sample(const UniformGrid& grid,
                                        const std::function<double(double)>& fn) {
  std::vector<double> v(grid.node_count());
  for (int j = 0; j <= grid.intervals(); ++j) v[j] = fn(grid.node(j));
  return {grid, std::move(v)};
}

SampledFunction SampledFunction::constant(const UniformGrid& grid, double value) {
  return {grid, std::vector<double>(grid.node_count(), value)};
}

double SampledFunction::operator()(double t) const {
  const int n = grid_.intervals();
  const double scaled = std::clamp(t, 0.0, 1.0) * n;
  const int exact = grid_.node_index(t);
  if (exact >= 0) return values_[exact];
  const int left = std::min(static_cast<int>(std::floor(scaled)), n - 1);
  const double w = scaled - left;
  return (1.0 - w) * values_[left] + w * values_[left + 1];
}

SampledFunction SampledFunction::resampled(const UniformGrid& target) const {
  return sample(target, [this](double t) { return (*this)(t); });
}

namespace {

void require_same_grid(const SampledFunction& a, const SampledFunction& b, const char* what) {
  if (a.grid() != b.grid()) throw std::invalid_argument(std::string(what) + ": grid mismatch");
}

template <class Op>
SampledFunction combine(const SampledFunction& a, const SampledFunction& b, Op op,
                        const char* what) {
  require_same_grid(a, b, what);
  std::vector<double> v(a.size());
  for (std::size_t j = 0; j < v.size(); ++j) v[j] = op(a[j], b[j]);
  return {a.grid(), std::move(v)};
}

}  // namespace

SampledFunction operator+(const SampledFunction& a, const SampledFunction& b) {
  return combine(a, b, std::plus<>{}, "operator+");
}

SampledFunction operator-(const SampledFunction& a, const SampledFunction& b) {
  return combine(a, b, std::minus<>{}, "operator-");
}

SampledFunction operator*(double s, const SampledFunction& f) {
  std::vector<double> v(f.values().begin(), f.values().end());
  for (double& x : v) x *= s;
  return {f.grid(), std::move(v)};
}

double trapezoid(const UniformGrid& grid, double a, double b,
                 const std::function<double(double)>& integrand) {
  if (a > b) throw std::invalid_argument("trapezoid: lower limit exceeds upper limit");
  if (a < 0.0 || b > 1.0) throw std::invalid_argument("trapezoid: limits outside [0,1]");
  if (a == b) return 0.0;

  const int n = grid.intervals();
  // first node strictly above a, last node strictly below b
  int first = static_cast<int>(std::floor(a * n)) + 1;
  if (grid.node_index(a) >= 0) first = grid.node_index(a) + 1;
  int last = static_cast<int>(std::ceil(b * n)) - 1;
  if (grid.node_index(b) >= 0) last = grid.node_index(b) - 1;

  double sum = 0.0;
  double prev_t = a;
  double prev_f = integrand(a);
  for (int j = first; j <= last; ++j) {
    const double t = grid.node(j);
    const double f = integrand(t);
    sum += 0.5 * (t - prev_t) * (prev_f + f);
    prev_t = t;
    prev_f = f;
  }
  sum += 0.5 * (b - prev_t) * (prev_f + integrand(b));
  return sum;
}

double quad_weighted_integral(const SampledFunction& f, double a, double b) {
  return trapezoid(f.grid(), a, b, [&f](double s) { return f(s); });
}

double inner_product(const SampledFunction& f, const SampledFunction& g) {
  require_same_grid(f, g, "inner_product");
  const std::size_t last = f.size() - 1;
  double sum = 0.5 * (f[0] * g[0] + f[last] * g[last]);
  for (std::size_t j = 1; j < last; ++j) sum += f[j] * g[j];
  return sum * f.grid().spacing();
}

double l2_norm(const SampledFunction& f) { return std::sqrt(inner_product(f, f)); }

double sup_error(const SampledFunction& f, const SampledFunction& g) {
  require_same_grid(f, g, "sup_error");
  double worst = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) worst = std::max(worst, std::abs(f[j] - g[j]));
  return worst;
}

std::vector<double> noise_direction(std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<double> u(count);
  for (double& x : u) x = unit(rng);
  return u;
}

std::vector<double> add_relative_noise(std::span<const double> y, const NoiseSpec& spec) {
  if (spec.level < 0.0) throw std::invalid_argument("add_relative_noise: negative noise level");
  std::vector<double> out(y.begin(), y.end());
  if (spec.level == 0.0) return out;
  const auto u = noise_direction(y.size(), spec.seed);
  for (std::size_t j = 0; j < out.size(); ++j) out[j] += y[j] * spec.level * u[j];
  return out;
}

SampledFunction add_relative_noise(const SampledFunction& y, const NoiseSpec& spec) {
  return {y.grid(), add_relative_noise(y.values(), spec)};
}

void write_csv(std::ostream& out, const SampledFunction& f) {
  out << "t,value\n";
  char line[96];
  for (int j = 0; j <= f.grid().intervals(); ++j) {
    std::snprintf(line, sizeof line, "%.17g,%.17g\n", f.grid().node(j), f[j]);
    out << line;
  }
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace bgrecon

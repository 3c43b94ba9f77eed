#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace bgrecon {

/// Raised when a numerical routine cannot deliver a trustworthy result
/// (singular systems, stalled iterations, non-finite values).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Uniform partition of [0,1] into n subintervals with nodes t_j = j/n.
class UniformGrid {
 public:
  explicit UniformGrid(int intervals);

  [[nodiscard]] int intervals() const noexcept { return intervals_; }
  [[nodiscard]] std::size_t node_count() const noexcept {
    return static_cast<std::size_t>(intervals_) + 1;
  }
  [[nodiscard]] double spacing() const noexcept { return 1.0 / intervals_; }
  [[nodiscard]] double node(int j) const noexcept {
    return static_cast<double>(j) / intervals_;
  }
  [[nodiscard]] std::vector<double> nodes() const;

  /// Index of the node equal to t (up to rounding), or -1.
  [[nodiscard]] int node_index(double t) const noexcept;

  /// Grid with `factor` times as many intervals; every node of *this is a node of the result.
  [[nodiscard]] UniformGrid refined(int factor) const;

  friend bool operator==(const UniformGrid&, const UniformGrid&) = default;

 private:
  int intervals_;
};

/// Values of a real function at the nodes of a UniformGrid.
/// Off-node evaluation is by linear interpolation.
class SampledFunction {
 public:
  SampledFunction(UniformGrid grid, std::vector<double> values);

  static SampledFunction sample(const UniformGrid& grid,
                                const std::function<double(double)>& fn);
  static SampledFunction constant(const UniformGrid& grid, double value);

  [[nodiscard]] const UniformGrid& grid() const noexcept { return grid_; }
  [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
  [[nodiscard]] double operator[](std::size_t j) const { return values_[j]; }
  [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }

  /// Piecewise-linear interpolant at t in [0,1].
  [[nodiscard]] double operator()(double t) const;

  /// Same function resampled on another grid by linear interpolation.
  [[nodiscard]] SampledFunction resampled(const UniformGrid& target) const;

 private:
  UniformGrid grid_;
  std::vector<double> values_;
};

SampledFunction operator+(const SampledFunction& a, const SampledFunction& b);
SampledFunction operator-(const SampledFunction& a, const SampledFunction& b);
SampledFunction operator*(double s, const SampledFunction& f);

/// Composite trapezoid rule on the breakpoints {a} ∪ (grid nodes in (a,b)) ∪ {b}.
/// The integrand is sampled at those points only.
double trapezoid(const UniformGrid& grid, double a, double b,
                 const std::function<double(double)>& integrand);

/// ∫_a^b f(s) ds for the piecewise-linear interpolant of f.
double quad_weighted_integral(const SampledFunction& f, double a, double b);

/// Trapezoid approximation of ∫_0^1 f g ds (product sampled at the nodes).
double inner_product(const SampledFunction& f, const SampledFunction& g);

/// Trapezoid approximation of the L² norm on [0,1].
double l2_norm(const SampledFunction& f);

/// max_j |f_j − g_j|; both functions must live on the same grid.
double sup_error(const SampledFunction& f, const SampledFunction& g);

/// Bounded multiplicative noise: y_j ↦ y_j (1 + level·u_j), u_j ~ U[−1,1].
struct NoiseSpec {
  double level = 0.0;
  std::uint64_t seed = 0;
};

/// Seeded draws u_j ∈ [−1,1], one per entry.
std::vector<double> noise_direction(std::size_t count, std::uint64_t seed);

std::vector<double> add_relative_noise(std::span<const double> y, const NoiseSpec& spec);
SampledFunction add_relative_noise(const SampledFunction& y, const NoiseSpec& spec);

/// Two-column CSV with header "t,value".
void write_csv(std::ostream& out, const SampledFunction& f);

double dot(std::span<const double> a, std::span<const double> b);

}  // namespace bgrecon

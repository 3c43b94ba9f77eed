#pragma once

#include <span>
#include <vector>

#include "bgrecon/grid.hpp"

namespace bgrecon {

/// (Ax)(t) = ∫_0^t k(t−s) x(s) ds + ν ∫_0^t x(t−s) x(s) ds  on L²(0,1).
///
/// The kernel fixes the quadrature grid: every function handed to the operator
/// must be sampled on kernel().grid(). Integrals use the trapezoid rule on that
/// grid with linear interpolation for off-node arguments.
class QuadraticVolterraOperator {
 public:
  QuadraticVolterraOperator(SampledFunction kernel, double nu);

  [[nodiscard]] const SampledFunction& kernel() const noexcept { return kernel_; }
  [[nodiscard]] const UniformGrid& grid() const noexcept { return kernel_.grid(); }
  [[nodiscard]] double nu() const noexcept { return nu_; }

  /// A₀x(t): the linear convolution part.
  [[nodiscard]] double apply_linear(const SampledFunction& x, double t) const;
  /// A₁x(t) = ∫_0^t x(t−s) x(s) ds (without the factor ν).
  [[nodiscard]] double apply_quadratic(const SampledFunction& x, double t) const;
  /// A x(t) = A₀x(t) + ν A₁x(t).
  [[nodiscard]] double apply(const SampledFunction& x, double t) const;

  /// dA(x)f at t: ∫_0^t [k(t−s) + 2ν x(t−s)] f(s) ds.
  [[nodiscard]] double apply_derivative(const SampledFunction& x, const SampledFunction& f,
                                        double t) const;

 private:
  void require_on_grid(const SampledFunction& f) const;

  SampledFunction kernel_;
  double nu_;
};

/// ∫_0^t a(t−s) b(s) ds by the trapezoid rule on the common grid of a and b.
double convolve_at(const SampledFunction& a, const SampledFunction& b, double t);

/// P_h A: the operator observed at measurement nodes t_1 < ... < t_N in (0,1].
class DiscreteForwardMap {
 public:
  /// Measurement nodes must be quadrature-grid nodes.
  DiscreteForwardMap(QuadraticVolterraOperator op, std::vector<double> nodes);

  /// Nodes t_i = i/N for i = 1..N on the operator's quadrature grid.
  static DiscreteForwardMap uniform(QuadraticVolterraOperator op, int measurements);

  [[nodiscard]] const QuadraticVolterraOperator& op() const noexcept { return op_; }
  [[nodiscard]] std::span<const double> nodes() const noexcept { return nodes_; }
  [[nodiscard]] std::size_t size() const noexcept { return nodes_.size(); }

  /// [A x(t_i)]_i
  [[nodiscard]] std::vector<double> forward_data(const SampledFunction& x) const;
  /// [A₁ x(t_i)]_i
  [[nodiscard]] std::vector<double> quadratic_part(const SampledFunction& x) const;
  /// [dA(x)f (t_i)]_i
  [[nodiscard]] std::vector<double> derivative(const SampledFunction& x,
                                               const SampledFunction& f) const;

  /// (P_h dA(x))* w : s ↦ Σ_i w_i [k(t_i−s) + 2ν x(t_i−s)] χ_[0,t_i](s).
  /// The indicator takes the value 1/2 at s = t_i, which makes the result the
  /// exact trapezoid-rule adjoint of derivative().
  [[nodiscard]] SampledFunction derivative_adjoint(const SampledFunction& x,
                                                   std::span<const double> w) const;

 private:
  QuadraticVolterraOperator op_;
  std::vector<double> nodes_;
  std::vector<int> node_index_;
};

}  // namespace bgrecon

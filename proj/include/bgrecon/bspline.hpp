#pragma once

#include <span>
#include <vector>

#include "bgrecon/grid.hpp"

namespace bgrecon {

/// Cubic B-splines S_0..S_{N-1} on the uniform grid t_j = j/N.
///
/// S_j is centred at t_j with support [t_{j-2}, t_{j+2}] and is scaled so that
/// S_j(t_j) = 1 and S_j(t_{j±1}) = 1/4. Members near the ends overhang [0,1];
/// they are evaluated as-is and simply truncated to the interval.
class CubicBSplineBasis {
 public:
  explicit CubicBSplineBasis(UniformGrid grid) : grid_(grid) {}

  [[nodiscard]] const UniformGrid& grid() const noexcept { return grid_; }
  [[nodiscard]] int size() const noexcept { return grid_.intervals(); }
  [[nodiscard]] double spacing() const noexcept { return grid_.spacing(); }

  /// S_j(t). Throws std::out_of_range for j outside [0, N-1].
  [[nodiscard]] double eval(int j, double t) const;

  /// Σ_j coefficients[j] S_j(t).
  [[nodiscard]] double eval_combination(std::span<const double> coefficients, double t) const;

  /// S_j sampled on an arbitrary (typically finer) quadrature grid.
  [[nodiscard]] SampledFunction sampled(int j, const UniformGrid& on) const;

  /// Spline combination sampled on `on`.
  [[nodiscard]] SampledFunction sampled_combination(std::span<const double> coefficients,
                                                    const UniformGrid& on) const;

 private:
  UniformGrid grid_;
};

/// Moments ⟨δ(t0 − ·), S_j⟩ = S_j(t0), j = 0..N-1.
std::vector<double> delta_moments(const CubicBSplineBasis& basis, double t0);

/// Coefficients c with Σ_j c_j S_j(t_i) = samples(t_i) at the collocation nodes t_0..t_{N-1}.
/// `samples` may live on any grid; it is read at the basis nodes.
std::vector<double> interpolate(const CubicBSplineBasis& basis, const SampledFunction& samples);

}  // namespace bgrecon

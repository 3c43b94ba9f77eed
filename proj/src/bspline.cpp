#include "bgrecon/bspline.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>

namespace bgrecon {

double CubicBSplineBasis::eval(int j, double t) const {
  if (j < 0 || j >= size()) {
    throw std::out_of_range("CubicBSplineBasis::eval: index " + std::to_string(j) +
                            " outside [0, " + std::to_string(size() - 1) + "]");
  }
  const double h = spacing();
  const double tj = grid_.node(j);
  const double u = (t - tj) / h;  // offset in units of h
  if (u <= -2.0 || u >= 2.0) return 0.0;

  const double h3 = h * h * h;
  double value = 0.0;
  if (u < -1.0) {
    const double d = t - (tj - 2.0 * h);
    value = d * d * d;
  } else if (u < 0.0) {
    const double d = t - (tj - h);
    value = h3 + 3.0 * h * h * d + 3.0 * h * d * d - 3.0 * d * d * d;
  } else if (u < 1.0) {
    const double d = (tj + h) - t;
    value = h3 + 3.0 * h * h * d + 3.0 * h * d * d - 3.0 * d * d * d;
  } else {
    const double d = (tj + 2.0 * h) - t;
    value = d * d * d;
  }
  return value / (4.0 * h3);
}

double CubicBSplineBasis::eval_combination(std::span<const double> coefficients, double t) const {
  if (static_cast<int>(coefficients.size()) != size()) {
    throw std::invalid_argument("eval_combination: coefficient count does not match basis size");
  }
  const double h = spacing();
  const int centre = static_cast<int>(std::floor(t / h));
  double sum = 0.0;
  for (int j = std::max(0, centre - 2); j <= std::min(size() - 1, centre + 2); ++j) {
    sum += coefficients[j] * eval(j, t);
  }
  return sum;
}

SampledFunction CubicBSplineBasis::sampled(int j, const UniformGrid& on) const {
  return SampledFunction::sample(on, [this, j](double t) { return eval(j, t); });
}

SampledFunction CubicBSplineBasis::sampled_combination(std::span<const double> coefficients,
                                                       const UniformGrid& on) const {
  return SampledFunction::sample(
      on, [this, coefficients](double t) { return eval_combination(coefficients, t); });
}

std::vector<double> delta_moments(const CubicBSplineBasis& basis, double t0) {
  if (t0 < 0.0 || t0 > 1.0) throw std::invalid_argument("delta_moments: t0 outside [0,1]");
  std::vector<double> m(basis.size());
  for (int j = 0; j < basis.size(); ++j) m[j] = basis.eval(j, t0);
  return m;
}

std::vector<double> interpolate(const CubicBSplineBasis& basis, const SampledFunction& samples) {
  const int n = basis.size();
  Eigen::MatrixXd colloc = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd rhs(n);
  for (int i = 0; i < n; ++i) {
    const double ti = basis.grid().node(i);
    for (int j = std::max(0, i - 1); j <= std::min(n - 1, i + 1); ++j) colloc(i, j) = basis.eval(j, ti);
    rhs(i) = samples(ti);
  }
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(colloc);
  Eigen::VectorXd c = lu.solve(rhs);
  const double residual = (colloc * c - rhs).norm();
  if (!c.allFinite() || residual > 1e-10 * std::max(1.0, rhs.norm())) {
    throw NumericalError("interpolate: collocation solve failed (residual " +
                         std::to_string(residual) + ")");
  }
  return {c.data(), c.data() + n};
}

}  // namespace bgrecon

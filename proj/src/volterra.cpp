#include "bgrecon/volterra.hpp"

#include <cmath>
#include <string>

namespace bgrecon {

double convolve_at(const SampledFunction& a, const SampledFunction& b, double t) {
  if (a.grid() != b.grid()) throw std::invalid_argument("convolve_at: grid mismatch");
  if (t < 0.0 || t > 1.0) throw std::invalid_argument("convolve_at: t outside [0,1]");

  const int i = a.grid().node_index(t);
  if (i >= 0) {
    // node fast path: every sample a(t_i - s_k) = a_{i-k} is a grid value
    if (i == 0) return 0.0;
    double sum = 0.5 * (a[i] * b[0] + a[0] * b[i]);
    for (int k = 1; k < i; ++k) sum += a[i - k] * b[k];
    return sum * a.grid().spacing();
  }
  return trapezoid(a.grid(), 0.0, t, [&](double s) { return a(t - s) * b(s); });
}

QuadraticVolterraOperator::QuadraticVolterraOperator(SampledFunction kernel, double nu)
    : kernel_(std::move(kernel)), nu_(nu) {
  if (!(nu_ >= 0.0) || !std::isfinite(nu_)) {
    throw std::invalid_argument("QuadraticVolterraOperator: nu must be a finite nonnegative number");
  }
}

void QuadraticVolterraOperator::require_on_grid(const SampledFunction& f) const {
  if (f.grid() != grid()) {
    throw std::invalid_argument("QuadraticVolterraOperator: function sampled on " +
                                std::to_string(f.grid().intervals()) +
                                " intervals, operator grid has " +
                                std::to_string(grid().intervals()));
  }
}

double QuadraticVolterraOperator::apply_linear(const SampledFunction& x, double t) const {
  require_on_grid(x);
  return convolve_at(kernel_, x, t);
}

double QuadraticVolterraOperator::apply_quadratic(const SampledFunction& x, double t) const {
  require_on_grid(x);
  return convolve_at(x, x, t);
}

double QuadraticVolterraOperator::apply(const SampledFunction& x, double t) const {
  const double linear = apply_linear(x, t);
  return nu_ == 0.0 ? linear : linear + nu_ * apply_quadratic(x, t);
}

double QuadraticVolterraOperator::apply_derivative(const SampledFunction& x,
                                                   const SampledFunction& f, double t) const {
  require_on_grid(x);
  require_on_grid(f);
  const double linear = convolve_at(kernel_, f, t);
  return nu_ == 0.0 ? linear : linear + 2.0 * nu_ * convolve_at(x, f, t);
}

DiscreteForwardMap::DiscreteForwardMap(QuadraticVolterraOperator op, std::vector<double> nodes)
    : op_(std::move(op)), nodes_(std::move(nodes)) {
  node_index_.reserve(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (!(nodes_[i] > 0.0 && nodes_[i] <= 1.0)) {
      throw std::invalid_argument("DiscreteForwardMap: measurement node outside (0,1]");
    }
    if (i > 0 && nodes_[i] <= nodes_[i - 1]) {
      throw std::invalid_argument("DiscreteForwardMap: measurement nodes must increase strictly");
    }
    const int k = op_.grid().node_index(nodes_[i]);
    if (k < 0) {
      throw std::invalid_argument("DiscreteForwardMap: measurement node is not a quadrature node");
    }
    node_index_.push_back(k);
  }
}

DiscreteForwardMap DiscreteForwardMap::uniform(QuadraticVolterraOperator op, int measurements) {
  if (measurements < 1) throw std::invalid_argument("DiscreteForwardMap: need at least one node");
  std::vector<double> t(measurements);
  for (int i = 1; i <= measurements; ++i) t[i - 1] = static_cast<double>(i) / measurements;
  return {std::move(op), std::move(t)};
}

std::vector<double> DiscreteForwardMap::forward_data(const SampledFunction& x) const {
  std::vector<double> y(nodes_.size());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = op_.apply(x, nodes_[i]);
  return y;
}

std::vector<double> DiscreteForwardMap::quadratic_part(const SampledFunction& x) const {
  std::vector<double> y(nodes_.size());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = op_.apply_quadratic(x, nodes_[i]);
  return y;
}

std::vector<double> DiscreteForwardMap::derivative(const SampledFunction& x,
                                                   const SampledFunction& f) const {
  std::vector<double> y(nodes_.size());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = op_.apply_derivative(x, f, nodes_[i]);
  return y;
}

SampledFunction DiscreteForwardMap::derivative_adjoint(const SampledFunction& x,
                                                       std::span<const double> w) const {
  if (w.size() != nodes_.size()) {
    throw std::invalid_argument("derivative_adjoint: weight count does not match node count");
  }
  if (x.grid() != op_.grid()) throw std::invalid_argument("derivative_adjoint: grid mismatch");

  const auto& k = op_.kernel();
  const double two_nu = 2.0 * op_.nu();
  const int last = op_.grid().intervals();
  std::vector<double> g(op_.grid().node_count(), 0.0);
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (w[i] == 0.0) continue;
    const int ti = node_index_[i];
    for (int s = 0; s <= ti; ++s) {
      const double kern = k[ti - s] + two_nu * x[ti - s];
      // the indicator jumps at s = t_i unless t_i = 1 closes the domain
      const double chi = (s == ti && ti != last) ? 0.5 : 1.0;
      g[s] += chi * w[i] * kern;
    }
  }
  return {op_.grid(), std::move(g)};
}

}  // namespace bgrecon

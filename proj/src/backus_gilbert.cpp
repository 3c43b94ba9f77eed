#include "bgrecon/backus_gilbert.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace bgrecon {

namespace {

std::vector<SampledFunction> sampled_basis(const CubicBSplineBasis& basis, const UniformGrid& on) {
  std::vector<SampledFunction> splines;
  splines.reserve(basis.size());
  for (int r = 0; r < basis.size(); ++r) splines.push_back(basis.sampled(r, on));
  return splines;
}

double condition_number(const Eigen::MatrixXd& block) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(block);
  const auto& s = svd.singularValues();
  if (s.size() == 0) return 0.0;
  const double smallest = s(s.size() - 1);
  return smallest > 0.0 ? s(0) / smallest : std::numeric_limits<double>::infinity();
}

std::string delta_label(double t0) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "delta(%.17g)", t0);
  return buf;
}

}  // namespace

Eigen::MatrixXd assemble_adjoint_matrix(const DiscreteForwardMap& map,
                                        const CubicBSplineBasis& basis,
                                        const SampledFunction& x0) {
  const int n = basis.size();
  if (static_cast<int>(map.size()) != n) {
    throw std::invalid_argument("assemble_adjoint_system: " + std::to_string(map.size()) +
                                " measurements for a basis of size " + std::to_string(n));
  }
  const auto& quad = map.op().grid();
  const auto splines = sampled_basis(basis, quad);

  Eigen::MatrixXd m(n + 1, n);
  std::vector<double> unit(n, 0.0);
  for (int i = 0; i < n; ++i) {
    unit[i] = 1.0;
    const SampledFunction back_projected = map.derivative_adjoint(x0, unit);
    unit[i] = 0.0;
    for (int r = 0; r < n; ++r) m(r, i) = inner_product(back_projected, splines[r]);
  }

  const auto ax0 = map.forward_data(x0);
  const auto dax0 = map.derivative(x0, x0);
  for (int i = 0; i < n; ++i) m(n, i) = ax0[i] - dax0[i];
  return m;
}

AssembledSystem assemble_adjoint_system(const DiscreteForwardMap& map,
                                        const CubicBSplineBasis& basis,
                                        const SampledFunction& x0,
                                        std::span<const double> mu_moments) {
  const int n = basis.size();
  if (static_cast<int>(mu_moments.size()) != n) {
    throw std::invalid_argument("assemble_adjoint_system: moment vector has wrong length");
  }
  AssembledSystem sys;
  sys.matrix = assemble_adjoint_matrix(map, basis, x0);
  sys.rhs = Eigen::VectorXd::Zero(n + 1);
  for (int r = 0; r < n; ++r) sys.rhs(r) = mu_moments[r];
  sys.condition = condition_number(sys.matrix.topRows(n));
  if (!(sys.condition <= kConditionLimit)) {
    throw NumericalError("assemble_adjoint_system: moment block is numerically singular "
                         "(condition " + std::to_string(sys.condition) + ")");
  }
  return sys;
}

WeightSolver::WeightSolver(Eigen::MatrixXd matrix)
    : matrix_(std::move(matrix)), decomposition_(matrix_) {}

WeightVector WeightSolver::solve(const Eigen::VectorXd& rhs, std::string target) const {
  if (rhs.size() != matrix_.rows()) {
    throw std::invalid_argument("WeightSolver::solve: right-hand side has wrong length");
  }
  const Eigen::VectorXd phi = decomposition_.solve(rhs);
  if (!phi.allFinite()) throw NumericalError("WeightSolver::solve: non-finite weights");
  WeightVector w;
  w.coefficients.assign(phi.data(), phi.data() + phi.size());
  w.target = std::move(target);
  w.residual = (matrix_ * phi - rhs).norm();
  w.rank = rank();
  return w;
}

WeightVector solve_weights(const AssembledSystem& system) {
  return WeightSolver(system.matrix).solve(system.rhs, "moments");
}

double reconstruct_value(const WeightVector& phi, std::span<const double> y) {
  if (phi.coefficients.size() != y.size()) {
    throw std::invalid_argument("reconstruct_value: weight and data lengths differ");
  }
  return dot(phi.coefficients, y);
}

BackusGilbertReconstructor::BackusGilbertReconstructor(DiscreteForwardMap map,
                                                       CubicBSplineBasis basis,
                                                       SampledFunction x0)
    : map_(std::move(map)),
      basis_(basis),
      x0_(std::move(x0)),
      condition_(0.0),
      solver_(assemble_adjoint_matrix(map_, basis_, x0_)) {
  condition_ = condition_number(solver_.matrix().topRows(basis_.size()));
  if (!(condition_ <= kConditionLimit)) {
    throw NumericalError("BackusGilbertReconstructor: moment block is numerically singular "
                         "(condition " + std::to_string(condition_) + ")");
  }
}

WeightVector BackusGilbertReconstructor::weights(double t0) const {
  const auto moments = delta_moments(basis_, t0);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(basis_.size() + 1);
  for (int r = 0; r < basis_.size(); ++r) rhs(r) = moments[r];
  return solver_.solve(rhs, delta_label(t0));
}

std::vector<WeightVector> BackusGilbertReconstructor::weights(
    std::span<const double> targets) const {
  std::vector<WeightVector> out;
  out.reserve(targets.size());
  for (double t0 : targets) out.push_back(weights(t0));
  return out;
}

Profile apply_weights(std::span<const WeightVector> weights, std::span<const double> targets,
                      std::span<const double> y) {
  if (weights.size() != targets.size()) {
    throw std::invalid_argument("apply_weights: one weight vector per target required");
  }
  Profile p;
  p.reserve(targets.size());
  for (std::size_t k = 0; k < targets.size(); ++k) {
    p.push_back({targets[k], reconstruct_value(weights[k], y)});
  }
  return p;
}

Profile reconstruct_profile(const DiscreteForwardMap& map, const CubicBSplineBasis& basis,
                            const SampledFunction& x0, std::span<const double> y,
                            std::span<const double> targets) {
  if (targets.empty()) return {};
  const BackusGilbertReconstructor rec(map, basis, x0);
  const auto w = rec.weights(targets);
  return apply_weights(w, targets, y);
}

std::vector<double> nodes_and_midpoints(const UniformGrid& grid) {
  std::vector<double> t;
  t.reserve(2 * grid.node_count() - 1);
  for (int j = 0; j < grid.intervals(); ++j) {
    t.push_back(grid.node(j));
    t.push_back(0.5 * (grid.node(j) + grid.node(j + 1)));
  }
  t.push_back(1.0);
  return t;
}

double profile_sup_error(const Profile& profile, const std::function<double(double)>& truth,
                         double lo, double hi) {
  double worst = 0.0;
  for (const auto& p : profile) {
    if (p.t < lo - 1e-12 || p.t > hi + 1e-12) continue;
    worst = std::max(worst, std::abs(p.value - truth(p.t)));
  }
  return worst;
}

void write_profile_csv(std::ostream& out, const Profile& profile,
                       const std::function<double(double)>& truth) {
  out << (truth ? "t,reconstructed,truth\n" : "t,reconstructed\n");
  char line[128];
  for (const auto& p : profile) {
    if (truth) {
      std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g\n", p.t, p.value, truth(p.t));
    } else {
      std::snprintf(line, sizeof line, "%.17g,%.17g\n", p.t, p.value);
    }
    out << line;
  }
}

std::vector<Profile> iterative_refinement(const DiscreteForwardMap& map,
                                          const CubicBSplineBasis& basis,
                                          const SampledFunction& x0_init,
                                          std::span<const double> y,
                                          std::span<const double> targets, int rounds) {
  if (rounds < 1) throw std::invalid_argument("iterative_refinement: rounds must be >= 1");
  const auto grid_nodes = basis.grid().nodes();
  const auto& quad = map.op().grid();

  std::vector<Profile> history;
  SampledFunction x0 = x0_init;
  double first_scale = 0.0;
  for (int round = 0; round < rounds; ++round) {
    const BackusGilbertReconstructor rec(map, basis, x0);
    Profile profile = apply_weights(rec.weights(targets), targets, y);

    double scale = 0.0;
    for (const auto& p : profile) scale = std::max(scale, std::abs(p.value));
    if (round == 0) {
      first_scale = scale;
    } else if (scale > 1e3 * std::max(first_scale, 1e-300)) {
      throw NumericalError("iterative_refinement: profile magnitude grew from " +
                           std::to_string(first_scale) + " to " + std::to_string(scale) +
                           " in round " + std::to_string(round + 1));
    }

    bool converged = false;
    if (!history.empty()) {
      double change = 0.0;
      for (std::size_t k = 0; k < profile.size(); ++k) {
        change = std::max(change, std::abs(profile[k].value - history.back()[k].value));
      }
      converged = change < 1e-8;
    }
    history.push_back(std::move(profile));
    if (converged || round + 1 == rounds) break;

    const Profile at_nodes = apply_weights(rec.weights(grid_nodes), grid_nodes, y);
    std::vector<double> node_values(at_nodes.size());
    for (std::size_t j = 0; j < at_nodes.size(); ++j) node_values[j] = at_nodes[j].value;
    const auto coeffs = interpolate(basis, SampledFunction(basis.grid(), std::move(node_values)));
    x0 = basis.sampled_combination(coeffs, quad);
  }
  return history;
}

WeightVector classical_bg_weights(std::span<const SampledFunction> kernels, double t0) {
  const auto n = static_cast<Eigen::Index>(kernels.size());
  if (n == 0) throw std::invalid_argument("classical_bg_weights: no kernels");
  if (t0 < 0.0 || t0 > 1.0) throw std::invalid_argument("classical_bg_weights: t0 outside [0,1]");
  const UniformGrid& grid = kernels.front().grid();
  for (const auto& k : kernels) {
    if (k.grid() != grid) throw std::invalid_argument("classical_bg_weights: grid mismatch");
  }

  const auto spread = SampledFunction::sample(grid, [t0](double s) { return (t0 - s) * (t0 - s); });
  Eigen::MatrixXd gram(n, n);
  Eigen::VectorXd mass(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    std::vector<double> weighted(grid.node_count());
    for (std::size_t k = 0; k < weighted.size(); ++k) weighted[k] = spread[k] * kernels[i][k];
    const SampledFunction wi(grid, std::move(weighted));
    for (Eigen::Index j = 0; j <= i; ++j) gram(i, j) = gram(j, i) = inner_product(wi, kernels[j]);
    mass(i) = quad_weighted_integral(kernels[i], 0.0, 1.0);
  }

  Eigen::FullPivLU<Eigen::MatrixXd> lu(gram);
  lu.setThreshold(1e-13);
  if (lu.rank() < n) {
    throw NumericalError("classical_bg_weights: spread Gram matrix is singular (rank " +
                         std::to_string(lu.rank()) + " of " + std::to_string(n) + ")");
  }
  const Eigen::VectorXd z = lu.solve(mass);
  const double denom = mass.dot(z);
  if (!(std::abs(denom) > 1e-300) || !std::isfinite(denom)) {
    throw NumericalError("classical_bg_weights: unit-integral constraint is infeasible");
  }
  const Eigen::VectorXd phi = z / denom;

  WeightVector w;
  w.coefficients.assign(phi.data(), phi.data() + n);
  w.target = delta_label(t0);
  w.residual = std::abs(mass.dot(phi) - 1.0);
  w.rank = static_cast<int>(n);
  return w;
}

WeightVector extended_bg_weights(const Eigen::MatrixXd& bgh, std::span<const double> a_row) {
  const Eigen::Index n = bgh.rows();
  if (bgh.cols() != n || static_cast<Eigen::Index>(a_row.size()) != n) {
    throw std::invalid_argument("extended_bg_weights: dimension mismatch");
  }
  const Eigen::Map<const Eigen::VectorXd> a(a_row.data(), n);
  if (a.norm() == 0.0) throw NumericalError("extended_bg_weights: constraint row is zero");

  // Q = 𝓑², 𝓑 symmetric: keep the nonnegative part of the symmetrised matrix
  const Eigen::MatrixXd sym = 0.5 * (bgh + bgh.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
  const Eigen::VectorXd clamped = eig.eigenvalues().cwiseMax(0.0);
  const Eigen::MatrixXd q = eig.eigenvectors() * clamped.asDiagonal() * eig.eigenvectors().transpose();

  Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(n + 1, n + 1);
  kkt.topLeftCorner(n, n) = 2.0 * q;
  kkt.topRightCorner(n, 1) = a;
  kkt.bottomLeftCorner(1, n) = a.transpose();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + 1);
  rhs(n) = 1.0;
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(kkt);
  const Eigen::VectorXd sol = cod.solve(rhs);

  WeightVector w;
  w.coefficients.assign(sol.data(), sol.data() + n);
  w.target = "extended";
  w.residual = std::abs(a.dot(sol.head(n)) - 1.0);
  w.rank = static_cast<int>(cod.rank());
  if (!sol.allFinite() || w.residual > 1e-8) {
    throw NumericalError("extended_bg_weights: constraint could not be satisfied");
  }
  return w;
}

std::vector<double> unit_integral_row(const DiscreteForwardMap& map, const SampledFunction& x0) {
  return map.derivative(x0, SampledFunction::constant(map.op().grid(), 1.0));
}

ErrorBudget error_budget(const BudgetInputs& in) {
  const auto& map = in.map;
  const auto& phi = in.phi.coefficients;
  if (in.y.size() != phi.size() || in.y_eps.size() != phi.size()) {
    throw std::invalid_argument("error_budget: data length does not match weights");
  }
  ErrorBudget b;
  b.epsilon = in.epsilon;

  std::vector<double> diff(phi.size());
  for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = in.y[i] - in.y_eps[i];
  b.noise = std::abs(dot(phi, diff));

  const auto ax_star = map.forward_data(in.x_star);
  const auto ax0 = map.forward_data(in.x0);
  const auto d_step = map.derivative(in.x0, in.x_star - in.x0);
  for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = ax_star[i] - ax0[i] - d_step[i];
  b.linearization = std::abs(dot(phi, diff));

  const auto dax0 = map.derivative(in.x0, in.x0);
  for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = ax0[i] - dax0[i];
  b.constraint = std::abs(dot(phi, diff));

  const auto dx_star = map.derivative(in.x0, in.x_star);
  b.adjoint_defect = std::abs(dot(phi, dx_star) - in.mu(in.x_star));

  // moment residual of the back-projected kernel
  const auto& quad = map.op().grid();
  const SampledFunction back = map.derivative_adjoint(in.x0, phi);
  double sq = 0.0;
  for (int r = 0; r < in.basis.size(); ++r) {
    const double m = inner_product(back, in.basis.sampled(r, quad));
    const double target = r < static_cast<int>(in.mu_moments.size()) ? in.mu_moments[r] : 0.0;
    sq += (m - target) * (m - target);
  }
  b.dist_mu = std::sqrt(sq);

  // trapezoid-weighted least squares of x* onto the spline span
  const auto nq = static_cast<Eigen::Index>(quad.node_count());
  Eigen::MatrixXd design(nq, in.basis.size());
  Eigen::VectorXd target(nq);
  for (Eigen::Index k = 0; k < nq; ++k) {
    const double w = std::sqrt(quad.spacing() * ((k == 0 || k == nq - 1) ? 0.5 : 1.0));
    const double s = quad.node(static_cast<int>(k));
    for (int r = 0; r < in.basis.size(); ++r) design(k, r) = w * in.basis.eval(r, s);
    target(k) = w * in.x_star[static_cast<std::size_t>(k)];
  }
  const Eigen::VectorXd coeff = design.colPivHouseholderQr().solve(target);
  b.dist_x = (design * coeff - target).norm();
  b.projector_norm = 1.0;
  return b;
}

void write_budget(std::ostream& out, const ErrorBudget& b) {
  char line[96];
  const auto emit = [&](const char* key, double v) {
    std::snprintf(line, sizeof line, "%s = %.17g\n", key, v);
    out << line;
  };
  emit("epsilon", b.epsilon);
  emit("noise", b.noise);
  emit("linearization", b.linearization);
  emit("constraint", b.constraint);
  emit("adjoint_defect", b.adjoint_defect);
  emit("total", b.total());
  emit("dist_mu", b.dist_mu);
  emit("dist_x", b.dist_x);
  emit("projector_norm", b.projector_norm);
}

}  // namespace bgrecon

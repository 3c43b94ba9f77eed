#pragma once

#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bgrecon/bspline.hpp"
#include "bgrecon/grid.hpp"
#include "bgrecon/volterra.hpp"

namespace bgrecon {

/// Data weights φ of a reconstruction functional f_φ = ⟨φ, y⟩.
struct WeightVector {
  std::vector<double> coefficients;
  std::string target;    ///< e.g. "delta(0.5)" or "moments"
  double residual = 0.;  ///< Euclidean residual of the system the weights solve
  int rank = 0;          ///< numerical rank of that system
};

/// Adjoint moment system with the affine-consistency row appended.
///
/// Rows 0..N-1 hold ⟨(P_h dA(x0))* e_i, S_r⟩ for spline r (row) and measurement
/// i (column); row N holds [A x0 − dA(x0) x0](t_i). The right-hand side is the
/// moment vector [⟨μ, S_r⟩] followed by 0.
struct AssembledSystem {
  Eigen::MatrixXd matrix;
  Eigen::VectorXd rhs;
  double condition = 0.;  ///< 2-norm condition number of the top N×N block

  [[nodiscard]] Eigen::Index unknowns() const { return matrix.cols(); }
  [[nodiscard]] auto moment_block() const { return matrix.topRows(matrix.cols()); }
  [[nodiscard]] auto constraint_row() const { return matrix.row(matrix.rows() - 1); }
};

/// Above this condition number the moment block is treated as singular.
inline constexpr double kConditionLimit = 1e12;

Eigen::MatrixXd assemble_adjoint_matrix(const DiscreteForwardMap& map,
                                        const CubicBSplineBasis& basis,
                                        const SampledFunction& x0);

AssembledSystem assemble_adjoint_system(const DiscreteForwardMap& map,
                                        const CubicBSplineBasis& basis,
                                        const SampledFunction& x0,
                                        std::span<const double> mu_moments);

/// Least-squares solver for a fixed system matrix; reused across right-hand sides.
class WeightSolver {
 public:
  explicit WeightSolver(Eigen::MatrixXd matrix);

  [[nodiscard]] WeightVector solve(const Eigen::VectorXd& rhs, std::string target = {}) const;
  [[nodiscard]] int rank() const { return static_cast<int>(decomposition_.rank()); }
  [[nodiscard]] const Eigen::MatrixXd& matrix() const noexcept { return matrix_; }

 private:
  Eigen::MatrixXd matrix_;
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> decomposition_;
};

/// Minimum-norm least-squares solution over all N+1 rows.
WeightVector solve_weights(const AssembledSystem& system);

/// f_φ = ⟨φ, y⟩
double reconstruct_value(const WeightVector& phi, std::span<const double> y);

struct ProfilePoint {
  double t;
  double value;
};
using Profile = std::vector<ProfilePoint>;

/// Point-evaluation reconstructions x(t0) ≈ ⟨φ_{t0}, y⟩ from a fixed
/// linearisation point. The system matrix is factorised once; weights depend
/// only on the target, never on the data.
class BackusGilbertReconstructor {
 public:
  BackusGilbertReconstructor(DiscreteForwardMap map, CubicBSplineBasis basis, SampledFunction x0);

  [[nodiscard]] const DiscreteForwardMap& map() const noexcept { return map_; }
  [[nodiscard]] const CubicBSplineBasis& basis() const noexcept { return basis_; }
  [[nodiscard]] const SampledFunction& linearization_point() const noexcept { return x0_; }
  [[nodiscard]] double condition() const noexcept { return condition_; }
  [[nodiscard]] const WeightSolver& solver() const noexcept { return solver_; }

  [[nodiscard]] WeightVector weights(double t0) const;
  [[nodiscard]] std::vector<WeightVector> weights(std::span<const double> targets) const;

 private:
  DiscreteForwardMap map_;
  CubicBSplineBasis basis_;
  SampledFunction x0_;
  double condition_;
  WeightSolver solver_;
};

/// Reconstructs ⟨δ(t0 − ·), x⟩ for every target from data y.
Profile reconstruct_profile(const DiscreteForwardMap& map, const CubicBSplineBasis& basis,
                            const SampledFunction& x0, std::span<const double> y,
                            std::span<const double> targets);

Profile apply_weights(std::span<const WeightVector> weights, std::span<const double> targets,
                      std::span<const double> y);

/// Grid nodes t_j and midpoints (t_j + t_{j+1})/2 in increasing order.
std::vector<double> nodes_and_midpoints(const UniformGrid& grid);

/// max |value − truth(t)| over profile points with t in [lo, hi].
double profile_sup_error(const Profile& profile, const std::function<double(double)>& truth,
                         double lo = 0.0, double hi = 1.0);

/// CSV with header "t,reconstructed,truth"; the truth column is omitted when absent.
void write_profile_csv(std::ostream& out, const Profile& profile,
                       const std::function<double(double)>& truth = {});

/// Re-linearisation loop: reconstruct at the grid nodes, interpolate the values
/// by B-splines, and use the interpolant as the next linearisation point.
/// Returns one profile over `targets` per completed round; stops early once two
/// consecutive profiles differ by less than 1e-8.
std::vector<Profile> iterative_refinement(const DiscreteForwardMap& map,
                                          const CubicBSplineBasis& basis,
                                          const SampledFunction& x0_init,
                                          std::span<const double> y,
                                          std::span<const double> targets, int rounds);

/// Classical Backus–Gilbert weights: minimise ∫(t0−s)² φ(s)² ds over
/// φ = Σ φ_i K_i subject to ∫ φ = 1.
WeightVector classical_bg_weights(std::span<const SampledFunction> kernels, double t0);

/// Extended Backus–Gilbert weights: minimise φᵀQφ subject to a·φ = 1, where Q
/// is the symmetrised `bgh` with negative eigenvalues clamped to zero.
WeightVector extended_bg_weights(const Eigen::MatrixXd& bgh, std::span<const double> a_row);

/// a_i = ⟨dA(x0)* e_i, 1⟩, the unit-integral constraint row.
std::vector<double> unit_integral_row(const DiscreteForwardMap& map, const SampledFunction& x0);

/// Addends of the a-priori error bound for |⟨μ,x*⟩ − ⟨φ,y_ε⟩|, plus the
/// pieces of the linear-case bound evaluated with L²/ℝᴺ surrogate norms.
struct ErrorBudget {
  double noise = 0.;           ///< |⟨φ, y − y_ε⟩|
  double linearization = 0.;   ///< |⟨φ, Ax* − Ax0 − dA(x0)(x* − x0)⟩|
  double constraint = 0.;      ///< |⟨φ, Ax0 − dA(x0)x0⟩|
  double adjoint_defect = 0.;  ///< |⟨dA(x0)*φ − μ, x*⟩|
  double dist_mu = 0.;         ///< moment residual ‖[⟨dA(x0)*φ − μ, S_j⟩]_j‖₂
  double dist_x = 0.;          ///< L² distance from x* to span{S_j}
  double projector_norm = 1.;  ///< norm of the L²-orthogonal projector onto span{S_j}
  double epsilon = 0.;         ///< relative noise level the data carries

  [[nodiscard]] double total() const {
    return noise + linearization + constraint + adjoint_defect;
  }
};

struct BudgetInputs {
  const DiscreteForwardMap& map;
  const CubicBSplineBasis& basis;
  const SampledFunction& x_star;
  const SampledFunction& x0;
  const WeightVector& phi;
  std::function<double(const SampledFunction&)> mu;  ///< x ↦ ⟨μ, x⟩
  std::span<const double> mu_moments;
  std::span<const double> y;
  std::span<const double> y_eps;
  double epsilon = 0.;
};

ErrorBudget error_budget(const BudgetInputs& in);

/// Flat "key = value" lines.
void write_budget(std::ostream& out, const ErrorBudget& budget);

}  // namespace bgrecon

#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <array>
#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "bgrecon/grid.hpp"

namespace bgrecon {

/// Boundary parts of the annulus 1/2 < r < 1.
///   right : outer circle, x ≥ 0   (accessible data side)
///   left  : outer circle, x ≤ 0
///   inner : circle r = 1/2
/// The outer halves meet at the contact points P1 = (0,−1) and P2 = (0,1).
enum class Segment { right, left, inner };

/// Uniform polar grid on the annulus.
///
/// Angles are θ_m = −π/2 + m·2π/n_θ, so node m = 0 is P1 and m = n_θ/2 is P2.
/// Both outer halves are parameterised by t ∈ [0, π] measured from P1:
/// right-half node j sits at θ = −π/2 + t_j, left-half node j at θ = −π/2 − t_j.
class AnnulusGrid {
 public:
  static constexpr double kInnerRadius = 0.5;
  static constexpr double kOuterRadius = 1.0;

  AnnulusGrid(int radial, int angular);

  [[nodiscard]] int radial() const noexcept { return radial_; }
  [[nodiscard]] int angular() const noexcept { return angular_; }
  [[nodiscard]] double dr() const noexcept { return dr_; }
  [[nodiscard]] double dtheta() const noexcept { return dtheta_; }
  [[nodiscard]] double radius(int k) const noexcept { return kInnerRadius + k * dr_; }
  [[nodiscard]] double angle(int m) const noexcept;
  [[nodiscard]] std::size_t node_count() const noexcept {
    return static_cast<std::size_t>(radial_) * angular_;
  }
  [[nodiscard]] int index(int k, int m) const noexcept { return k * angular_ + m; }

  /// Nodes on a boundary segment (n_θ/2 + 1 for the outer halves, n_θ for the inner circle).
  [[nodiscard]] int segment_size(Segment s) const noexcept;
  /// Angular index m of the j-th node of segment s.
  [[nodiscard]] int segment_angle_index(Segment s, int j) const noexcept;
  /// Arc parameter of the j-th node: t ∈ [0,π] on the outer halves, θ on the inner circle.
  [[nodiscard]] double segment_parameter(Segment s, int j) const noexcept;
  [[nodiscard]] std::vector<double> segment_parameters(Segment s) const;

  /// Same radial/angular refinement ratio, doubled in each direction (radial intervals doubled).
  [[nodiscard]] AnnulusGrid refined() const { return AnnulusGrid(2 * radial_ - 1, 2 * angular_); }

  friend bool operator==(const AnnulusGrid&, const AnnulusGrid&) = default;

 private:
  int radial_;
  int angular_;
  double dr_;
  double dtheta_;
};

/// Values on the nodes of one boundary segment.
struct BoundaryTrace {
  Segment segment;
  std::vector<double> values;

  static BoundaryTrace sample(const AnnulusGrid& grid, Segment s,
                              const std::function<double(double)>& fn);
  static BoundaryTrace constant(const AnnulusGrid& grid, Segment s, double value);
};

BoundaryTrace operator+(const BoundaryTrace& a, const BoundaryTrace& b);
BoundaryTrace operator-(const BoundaryTrace& a, const BoundaryTrace& b);
BoundaryTrace operator*(double s, const BoundaryTrace& a);
double sup_norm(const BoundaryTrace& a);

/// Trapezoid rule over arc length; endpoints of the outer halves get half weight.
double trace_inner_product(const AnnulusGrid& grid, const BoundaryTrace& a, const BoundaryTrace& b);

enum class ConditionKind { dirichlet, neumann };

/// Per-segment boundary data; the Neumann datum is the outward normal derivative.
struct BoundaryCondition {
  ConditionKind kind = ConditionKind::neumann;
  std::vector<double> values;  ///< empty means homogeneous
};

struct MixedBvpSpec {
  BoundaryCondition right;
  BoundaryCondition left;
  BoundaryCondition inner;

  [[nodiscard]] const BoundaryCondition& on(Segment s) const;
};

/// Nodal values u(r_k, θ_m) of a discrete harmonic function.
class AnnulusField {
 public:
  AnnulusField(const AnnulusGrid& grid, Eigen::VectorXd values);

  [[nodiscard]] const AnnulusGrid& grid() const noexcept { return grid_; }
  [[nodiscard]] double at(int k, int m) const { return values_(grid_.index(k, m)); }
  [[nodiscard]] const Eigen::VectorXd& values() const noexcept { return values_; }

  [[nodiscard]] BoundaryTrace trace(Segment s) const;
  /// Outward normal derivative by second-order one-sided radial differences.
  [[nodiscard]] BoundaryTrace normal_derivative(Segment s) const;

 private:
  AnnulusGrid grid_;
  Eigen::VectorXd values_;
};

/// Five-point polar Laplacian with a fixed Dirichlet/Neumann layout, factorised
/// once and reused for any boundary data with that layout. Neumann data are
/// imposed by second-order one-sided differences; at P1, P2 a Dirichlet condition on either
/// adjacent half takes precedence.
class MixedBvpSolver {
 public:
  MixedBvpSolver(const AnnulusGrid& grid, ConditionKind right, ConditionKind left,
                 ConditionKind inner);

  [[nodiscard]] const AnnulusGrid& grid() const noexcept { return grid_; }
  [[nodiscard]] AnnulusField solve(const MixedBvpSpec& spec) const;

 private:
  enum class NodeKind { interior, dirichlet, neumann_outer, neumann_inner };

  [[nodiscard]] Eigen::VectorXd assemble_rhs(const MixedBvpSpec& spec) const;

  AnnulusGrid grid_;
  std::array<ConditionKind, 3> kinds_;
  std::vector<NodeKind> node_kind_;
  Eigen::SparseMatrix<double> matrix_;
  std::unique_ptr<Eigen::SparseLU<Eigen::SparseMatrix<double>>> lu_;
};

/// One-shot solve; builds and factorises a MixedBvpSolver.
AnnulusField solve_mixed_bvp(const AnnulusGrid& grid, const MixedBvpSpec& spec);

/// Iterate record of the alternating Cauchy solver.
struct KozlovMazyaResult {
  enum class Status { converged, max_iterations, stalled };

  BoundaryTrace psi;                    ///< final iterate on the left half
  std::vector<BoundaryTrace> iterates;  ///< η_0, η_1, ... (η_0 = 0)
  std::vector<double> residuals;        ///< ‖A♯η_k + μ‖_∞ for each stored iterate
  Status status = Status::max_iterations;
  std::string diagnostic;
};

/// Operators of the Cauchy problem with data on the right half:
///   A  : φ on Γ_r ↦ w|Γ_l,  Δw = 0, w = φ on Γ_r, w_ν = 0 on Γ_l ∪ Γ_i
///   A♯ : ψ on Γ_l ↦ v_ν|Γ_r, Δv = 0, v = 0 on Γ_r, v_ν = ψ on Γ_l, v_ν = 0 on Γ_i
/// Both share one factorisation; the Kozlov–Maz'ya sweep uses a second one
/// (Dirichlet on Γ_l, Neumann on Γ_r).
class AnnulusCauchyProblem {
 public:
  explicit AnnulusCauchyProblem(const AnnulusGrid& grid);

  [[nodiscard]] const AnnulusGrid& grid() const noexcept { return grid_; }

  [[nodiscard]] BoundaryTrace apply_A(const BoundaryTrace& phi) const;
  [[nodiscard]] BoundaryTrace apply_A_sharp(const BoundaryTrace& psi) const;

  /// Smooth blend η_{a,b}(t) = a cos²(t/2) + b sin²(t/2) on the right half.
  [[nodiscard]] BoundaryTrace eta(double a, double b) const;

  /// ⟨Aφ, ψ⟩_Γl + ⟨φ, A♯ψ⟩_Γr; by the corrected Green formula this depends on φ
  /// only through φ(P1), φ(P2).
  [[nodiscard]] double green_defect(const BoundaryTrace& phi, const BoundaryTrace& psi) const;

  /// r_{a,b}(ψ) = green_defect(η_{a,b}, ψ).
  [[nodiscard]] double correction_functional(const BoundaryTrace& psi, double a, double b) const;

  /// Sentinel estimate of ⟨μ, φ⟩ from data f = Aφ: ⟨ψ, f⟩ − r_{a,b}(ψ).
  [[nodiscard]] double sentinel_reconstruct(const BoundaryTrace& psi, const BoundaryTrace& f,
                                            double a, double b) const;

  /// Solves −A♯ψ = μ by alternating Dirichlet/Neumann sweeps starting from ψ = 0.
  /// Stops at the first iterate with residual ≤ tol or after max_iter sweeps. Ten
  /// consecutive sweeps that each remove less than 0.1% of the residual (or
  /// increase it) mark the run as stalled, probably inconsistent data, without
  /// stopping it.
  [[nodiscard]] KozlovMazyaResult kozlov_mazya_solve(const BoundaryTrace& mu, int max_iter,
                                                     double tol) const;

 private:
  AnnulusGrid grid_;
  MixedBvpSolver dirichlet_right_;
  MixedBvpSolver dirichlet_left_;
};

void write_trace_csv(std::ostream& out, const AnnulusGrid& grid, const BoundaryTrace& trace);
void write_field_csv(std::ostream& out, const AnnulusField& field);

}  // namespace bgrecon

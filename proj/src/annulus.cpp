#include "bgrecon/annulus.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <string>

namespace bgrecon {

namespace {

constexpr double kPi = std::numbers::pi;

double condition_value(const BoundaryCondition& c, int j) {
  return c.values.empty() ? 0.0 : c.values[j];
}

void check_trace(const AnnulusGrid& grid, const BoundaryTrace& t, Segment expected,
                 const char* what) {
  if (t.segment != expected) throw std::invalid_argument(std::string(what) + ": wrong segment");
  if (static_cast<int>(t.values.size()) != grid.segment_size(expected)) {
    throw std::invalid_argument(std::string(what) + ": trace length does not match the grid");
  }
}

}  // namespace

AnnulusGrid::AnnulusGrid(int radial, int angular)
    : radial_(radial),
      angular_(angular),
      dr_((kOuterRadius - kInnerRadius) / (radial - 1)),
      dtheta_(2.0 * kPi / angular) {
  if (radial < 3) throw std::invalid_argument("AnnulusGrid: need at least 3 radial nodes");
  if (angular < 8 || angular % 2 != 0) {
    throw std::invalid_argument("AnnulusGrid: angular count must be even and at least 8");
  }
}

double AnnulusGrid::angle(int m) const noexcept { return -0.5 * kPi + m * dtheta_; }

int AnnulusGrid::segment_size(Segment s) const noexcept {
  return s == Segment::inner ? angular_ : angular_ / 2 + 1;
}

int AnnulusGrid::segment_angle_index(Segment s, int j) const noexcept {
  switch (s) {
    case Segment::right: return j;
    case Segment::left: return (angular_ - j) % angular_;
    case Segment::inner: return j;
  }
  return j;
}

double AnnulusGrid::segment_parameter(Segment s, int j) const noexcept {
  return s == Segment::inner ? angle(j) : j * dtheta_;
}

std::vector<double> AnnulusGrid::segment_parameters(Segment s) const {
  std::vector<double> t(segment_size(s));
  for (int j = 0; j < segment_size(s); ++j) t[j] = segment_parameter(s, j);
  return t;
}

BoundaryTrace BoundaryTrace::sample(const AnnulusGrid& grid, Segment s,
                                    const std::function<double(double)>& fn) {
  BoundaryTrace t{s, std::vector<double>(grid.segment_size(s))};
  for (int j = 0; j < grid.segment_size(s); ++j) t.values[j] = fn(grid.segment_parameter(s, j));
  return t;
}

BoundaryTrace BoundaryTrace::constant(const AnnulusGrid& grid, Segment s, double value) {
  return {s, std::vector<double>(grid.segment_size(s), value)};
}

namespace {

template <class Op>
BoundaryTrace combine(const BoundaryTrace& a, const BoundaryTrace& b, Op op) {
  if (a.segment != b.segment || a.values.size() != b.values.size()) {
    throw std::invalid_argument("BoundaryTrace: segment mismatch");
  }
  BoundaryTrace out{a.segment, a.values};
  for (std::size_t j = 0; j < out.values.size(); ++j) out.values[j] = op(a.values[j], b.values[j]);
  return out;
}

}  // namespace

BoundaryTrace operator+(const BoundaryTrace& a, const BoundaryTrace& b) {
  return combine(a, b, std::plus<>{});
}

BoundaryTrace operator-(const BoundaryTrace& a, const BoundaryTrace& b) {
  return combine(a, b, std::minus<>{});
}

BoundaryTrace operator*(double s, const BoundaryTrace& a) {
  BoundaryTrace out = a;
  for (double& v : out.values) v *= s;
  return out;
}

double sup_norm(const BoundaryTrace& a) {
  double m = 0.0;
  for (double v : a.values) m = std::max(m, std::abs(v));
  return m;
}

double trace_inner_product(const AnnulusGrid& grid, const BoundaryTrace& a,
                           const BoundaryTrace& b) {
  if (a.segment != b.segment || a.values.size() != b.values.size()) {
    throw std::invalid_argument("trace_inner_product: segment mismatch");
  }
  const std::size_t n = a.values.size();
  double sum = 0.0;
  if (a.segment == Segment::inner) {
    for (std::size_t j = 0; j < n; ++j) sum += a.values[j] * b.values[j];
    return sum * grid.dtheta() * AnnulusGrid::kInnerRadius;
  }
  for (std::size_t j = 0; j < n; ++j) {
    const double w = (j == 0 || j + 1 == n) ? 0.5 : 1.0;
    sum += w * a.values[j] * b.values[j];
  }
  return sum * grid.dtheta() * AnnulusGrid::kOuterRadius;
}

const BoundaryCondition& MixedBvpSpec::on(Segment s) const {
  switch (s) {
    case Segment::right: return right;
    case Segment::left: return left;
    case Segment::inner: return inner;
  }
  return inner;
}

AnnulusField::AnnulusField(const AnnulusGrid& grid, Eigen::VectorXd values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != static_cast<Eigen::Index>(grid_.node_count())) {
    throw std::invalid_argument("AnnulusField: value count does not match the grid");
  }
}

BoundaryTrace AnnulusField::trace(Segment s) const {
  const int k = s == Segment::inner ? 0 : grid_.radial() - 1;
  BoundaryTrace t{s, std::vector<double>(grid_.segment_size(s))};
  for (int j = 0; j < grid_.segment_size(s); ++j) t.values[j] = at(k, grid_.segment_angle_index(s, j));
  return t;
}

BoundaryTrace AnnulusField::normal_derivative(Segment s) const {
  const double h2 = 2.0 * grid_.dr();
  const int last = grid_.radial() - 1;
  BoundaryTrace t{s, std::vector<double>(grid_.segment_size(s))};
  for (int j = 0; j < grid_.segment_size(s); ++j) {
    const int m = grid_.segment_angle_index(s, j);
    if (s == Segment::inner) {
      t.values[j] = (3.0 * at(0, m) - 4.0 * at(1, m) + at(2, m)) / h2;
    } else {
      t.values[j] = (3.0 * at(last, m) - 4.0 * at(last - 1, m) + at(last - 2, m)) / h2;
    }
  }
  return t;
}

MixedBvpSolver::MixedBvpSolver(const AnnulusGrid& grid, ConditionKind right, ConditionKind left,
                               ConditionKind inner)
    : grid_(grid), kinds_{right, left, inner} {
  const int nr = grid_.radial();
  const int nt = grid_.angular();
  const int half = nt / 2;
  node_kind_.assign(grid_.node_count(), NodeKind::interior);

  const auto outer_kind = [&](int m) {
    const bool on_right = m <= half;
    const bool on_left = m == 0 || m >= half;
    const bool dirichlet = (on_right && right == ConditionKind::dirichlet) ||
                           (on_left && left == ConditionKind::dirichlet);
    return dirichlet ? NodeKind::dirichlet : NodeKind::neumann_outer;
  };
  for (int m = 0; m < nt; ++m) {
    node_kind_[grid_.index(nr - 1, m)] = outer_kind(m);
    node_kind_[grid_.index(0, m)] =
        inner == ConditionKind::dirichlet ? NodeKind::dirichlet : NodeKind::neumann_inner;
  }
  if (std::none_of(node_kind_.begin(), node_kind_.end(),
                   [](NodeKind k) { return k == NodeKind::dirichlet; })) {
    throw std::invalid_argument("MixedBvpSolver: pure Neumann problem is singular");
  }

  const double dr = grid_.dr();
  const double dt = grid_.dtheta();
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(5 * grid_.node_count());
  for (int k = 0; k < nr; ++k) {
    const double r = grid_.radius(k);
    // interior rows scaled by dr², Neumann rows by dr
    const double up = 1.0 + 0.5 * dr / r;
    const double down = 1.0 - 0.5 * dr / r;
    const double side = dr * dr / (r * r * dt * dt);
    for (int m = 0; m < nt; ++m) {
      const int row = grid_.index(k, m);
      const NodeKind kind = node_kind_[row];
      switch (kind) {
        case NodeKind::dirichlet:
          entries.emplace_back(row, row, 1.0);
          break;
        case NodeKind::interior:
          entries.emplace_back(row, row, -2.0 - 2.0 * side);
          entries.emplace_back(row, grid_.index(k, (m + 1) % nt), side);
          entries.emplace_back(row, grid_.index(k, (m + nt - 1) % nt), side);
          entries.emplace_back(row, grid_.index(k + 1, m), up);
          entries.emplace_back(row, grid_.index(k - 1, m), down);
          break;
        // Neumann rows use the same one-sided difference as normal_derivative(),
        // so extracting a flux and imposing it again reproduces the field.
        case NodeKind::neumann_outer:
          entries.emplace_back(row, row, 1.5);
          entries.emplace_back(row, grid_.index(k - 1, m), -2.0);
          entries.emplace_back(row, grid_.index(k - 2, m), 0.5);
          break;
        case NodeKind::neumann_inner:
          entries.emplace_back(row, row, 1.5);
          entries.emplace_back(row, grid_.index(k + 1, m), -2.0);
          entries.emplace_back(row, grid_.index(k + 2, m), 0.5);
          break;
      }
    }
  }
  matrix_.resize(static_cast<Eigen::Index>(grid_.node_count()),
                 static_cast<Eigen::Index>(grid_.node_count()));
  matrix_.setFromTriplets(entries.begin(), entries.end());
  matrix_.makeCompressed();

  lu_ = std::make_unique<Eigen::SparseLU<Eigen::SparseMatrix<double>>>();
  lu_->analyzePattern(matrix_);
  lu_->factorize(matrix_);
  if (lu_->info() != Eigen::Success) {
    throw NumericalError("MixedBvpSolver: factorisation failed: " + lu_->lastErrorMessage());
  }
}

Eigen::VectorXd MixedBvpSolver::assemble_rhs(const MixedBvpSpec& spec) const {
  for (Segment s : {Segment::right, Segment::left, Segment::inner}) {
    const auto& c = spec.on(s);
    if (c.kind != kinds_[static_cast<int>(s)]) {
      throw std::invalid_argument("MixedBvpSolver: boundary layout differs from the factorised one");
    }
    if (!c.values.empty() && static_cast<int>(c.values.size()) != grid_.segment_size(s)) {
      throw std::invalid_argument("MixedBvpSolver: boundary data length does not match the grid");
    }
  }

  const int nr = grid_.radial();
  const int nt = grid_.angular();
  const int half = nt / 2;
  const double dr = grid_.dr();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(grid_.node_count()));

  // outer circle: collect the conditions of every half that owns the node
  for (int m = 0; m < nt; ++m) {
    const int row = grid_.index(nr - 1, m);
    double dir_sum = 0.0, neu_sum = 0.0;
    int dir_count = 0, neu_count = 0;
    const auto take = [&](const BoundaryCondition& c, int j) {
      if (c.kind == ConditionKind::dirichlet) {
        dir_sum += condition_value(c, j);
        ++dir_count;
      } else {
        neu_sum += condition_value(c, j);
        ++neu_count;
      }
    };
    if (m <= half) take(spec.right, m);
    if (m == 0 || m >= half) take(spec.left, (nt - m) % nt);

    rhs(row) = node_kind_[row] == NodeKind::dirichlet ? dir_sum / dir_count
                                                       : dr * (neu_sum / neu_count);
  }
  for (int m = 0; m < nt; ++m) {
    const int row = grid_.index(0, m);
    const double value = condition_value(spec.inner, m);
    rhs(row) = node_kind_[row] == NodeKind::dirichlet ? value : dr * value;
  }
  return rhs;
}

AnnulusField MixedBvpSolver::solve(const MixedBvpSpec& spec) const {
  const Eigen::VectorXd rhs = assemble_rhs(spec);
  Eigen::VectorXd u = lu_->solve(rhs);
  if (lu_->info() != Eigen::Success || !u.allFinite()) {
    throw NumericalError("MixedBvpSolver: back-substitution failed");
  }
  const double scale = std::max(1.0, rhs.lpNorm<Eigen::Infinity>());
  double residual = (matrix_ * u - rhs).lpNorm<Eigen::Infinity>();
  if (residual > 1e-10 * scale) {
    // one step of iterative refinement before giving up
    u += lu_->solve(rhs - matrix_ * u);
    residual = (matrix_ * u - rhs).lpNorm<Eigen::Infinity>();
    if (residual > 1e-10 * scale) {
      throw NumericalError("MixedBvpSolver: residual " + std::to_string(residual) +
                           " above tolerance");
    }
  }
  return {grid_, std::move(u)};
}

AnnulusField solve_mixed_bvp(const AnnulusGrid& grid, const MixedBvpSpec& spec) {
  return MixedBvpSolver(grid, spec.right.kind, spec.left.kind, spec.inner.kind).solve(spec);
}

AnnulusCauchyProblem::AnnulusCauchyProblem(const AnnulusGrid& grid)
    : grid_(grid),
      dirichlet_right_(grid, ConditionKind::dirichlet, ConditionKind::neumann,
                       ConditionKind::neumann),
      dirichlet_left_(grid, ConditionKind::neumann, ConditionKind::dirichlet,
                      ConditionKind::neumann) {}

BoundaryTrace AnnulusCauchyProblem::apply_A(const BoundaryTrace& phi) const {
  check_trace(grid_, phi, Segment::right, "apply_A");
  MixedBvpSpec spec;
  spec.right = {ConditionKind::dirichlet, phi.values};
  return dirichlet_right_.solve(spec).trace(Segment::left);
}

BoundaryTrace AnnulusCauchyProblem::apply_A_sharp(const BoundaryTrace& psi) const {
  check_trace(grid_, psi, Segment::left, "apply_A_sharp");
  MixedBvpSpec spec;
  spec.right = {ConditionKind::dirichlet, {}};
  spec.left = {ConditionKind::neumann, psi.values};
  return dirichlet_right_.solve(spec).normal_derivative(Segment::right);
}

BoundaryTrace AnnulusCauchyProblem::eta(double a, double b) const {
  return BoundaryTrace::sample(grid_, Segment::right, [a, b](double t) {
    const double c = std::cos(0.5 * t);
    const double s = std::sin(0.5 * t);
    return a * c * c + b * s * s;
  });
}

double AnnulusCauchyProblem::green_defect(const BoundaryTrace& phi, const BoundaryTrace& psi) const {
  return trace_inner_product(grid_, apply_A(phi), psi) +
         trace_inner_product(grid_, phi, apply_A_sharp(psi));
}

double AnnulusCauchyProblem::correction_functional(const BoundaryTrace& psi, double a,
                                                   double b) const {
  if (a == 0.0 && b == 0.0) return 0.0;
  return green_defect(eta(a, b), psi);
}

double AnnulusCauchyProblem::sentinel_reconstruct(const BoundaryTrace& psi,
                                                  const BoundaryTrace& f, double a,
                                                  double b) const {
  check_trace(grid_, psi, Segment::left, "sentinel_reconstruct");
  check_trace(grid_, f, Segment::left, "sentinel_reconstruct");
  return trace_inner_product(grid_, psi, f) - correction_functional(psi, a, b);
}

namespace {
constexpr double kStallDecrease = 1e-3;
}  // namespace

KozlovMazyaResult AnnulusCauchyProblem::kozlov_mazya_solve(const BoundaryTrace& mu, int max_iter,
                                                           double tol) const {
  check_trace(grid_, mu, Segment::right, "kozlov_mazya_solve");
  if (max_iter < 0) throw std::invalid_argument("kozlov_mazya_solve: negative iteration count");

  const BoundaryTrace minus_mu = -1.0 * mu;
  KozlovMazyaResult result;
  BoundaryTrace eta_k = BoundaryTrace::constant(grid_, Segment::left, 0.0);
  int stalled_steps = 0;

  for (int k = 0;; ++k) {
    // Dirichlet sweep: v = 0 on Γ_r, v_ν = η_k on Γ_l
    MixedBvpSpec first;
    first.right = {ConditionKind::dirichlet, {}};
    first.left = {ConditionKind::neumann, eta_k.values};
    const AnnulusField v = dirichlet_right_.solve(first);
    const double residual = sup_norm(v.normal_derivative(Segment::right) + mu);

    result.iterates.push_back(eta_k);
    result.residuals.push_back(residual);
    // A step makes no progress if it removes less than 0.1% of the residual.
    if (k > 0 && residual > (1.0 - kStallDecrease) * result.residuals[k - 1]) {
      ++stalled_steps;
    } else {
      stalled_steps = 0;
    }

    if (residual <= tol) {
      result.status = KozlovMazyaResult::Status::converged;
      break;
    }
    if (stalled_steps >= 10 && result.diagnostic.empty()) {
      result.diagnostic = "residual made no progress for 10 consecutive iterations (at k=" +
                          std::to_string(k) + ", residual " + std::to_string(residual) +
                          "); the data are probably not in the range of A#";
    }
    if (k == max_iter) {
      result.status = result.diagnostic.empty() ? KozlovMazyaResult::Status::max_iterations
                                                : KozlovMazyaResult::Status::stalled;
      break;
    }

    // Neumann sweep: u = v on Γ_l, u_ν = −μ on Γ_r
    MixedBvpSpec second;
    second.right = {ConditionKind::neumann, minus_mu.values};
    second.left = {ConditionKind::dirichlet, v.trace(Segment::left).values};
    eta_k = dirichlet_left_.solve(second).normal_derivative(Segment::left);
    // The contact nodes are Dirichlet nodes in the first sweep, so the discrete
    // problem never reads η there; the one-sided difference at those nodes only
    // samples the corner singularity. Extend from the neighbours instead.
    const std::size_t last = eta_k.values.size() - 1;
    eta_k.values[0] = eta_k.values[1];
    eta_k.values[last] = eta_k.values[last - 1];
  }
  result.psi = result.iterates.back();
  return result;
}

void write_trace_csv(std::ostream& out, const AnnulusGrid& grid, const BoundaryTrace& trace) {
  out << "node,t,value\n";
  char line[96];
  for (std::size_t j = 0; j < trace.values.size(); ++j) {
    std::snprintf(line, sizeof line, "%zu,%.17g,%.17g\n", j,
                  grid.segment_parameter(trace.segment, static_cast<int>(j)), trace.values[j]);
    out << line;
  }
}

void write_field_csv(std::ostream& out, const AnnulusField& field) {
  out << "r,theta,value\n";
  char line[96];
  const auto& g = field.grid();
  for (int k = 0; k < g.radial(); ++k) {
    for (int m = 0; m < g.angular(); ++m) {
      std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g\n", g.radius(k), g.angle(m),
                    field.at(k, m));
      out << line;
    }
  }
}

}  // namespace bgrecon

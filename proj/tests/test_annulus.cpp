#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "bgrecon/annulus.hpp"

using namespace bgrecon;
using std::numbers::pi;

namespace {

template <class U, class Ur>
double harmonic_error(const AnnulusGrid& g, U u, Ur u_r) {
  MixedBvpSpec s;
  s.right = {ConditionKind::dirichlet,
             BoundaryTrace::sample(g, Segment::right, [&](double t) { return u(1.0, -pi / 2 + t); }).values};
  s.left = {ConditionKind::dirichlet,
            BoundaryTrace::sample(g, Segment::left, [&](double t) { return u(1.0, -pi / 2 - t); }).values};
  // outward normal on the inner circle points towards the centre
  s.inner = {ConditionKind::neumann,
             BoundaryTrace::sample(g, Segment::inner, [&](double th) { return -u_r(0.5, th); }).values};
  const AnnulusField f = solve_mixed_bvp(g, s);
  double e = 0.0;
  for (int k = 0; k < g.radial(); ++k)
    for (int m = 0; m < g.angular(); ++m) e = std::max(e, std::abs(f.at(k, m) - u(g.radius(k), g.angle(m))));
  return e;
}

}  // namespace

TEST_CASE("grid layout") {
  const AnnulusGrid g(17, 64);
  CHECK(g.dr() == doctest::Approx(0.5 / 16));
  CHECK(g.angle(0) == doctest::Approx(-pi / 2));
  CHECK(g.angle(32) == doctest::Approx(pi / 2));
  CHECK(g.segment_size(Segment::right) == 33);
  CHECK(g.segment_size(Segment::left) == 33);
  CHECK(g.segment_size(Segment::inner) == 64);
  // both halves start at P1 and end at P2
  CHECK(g.segment_angle_index(Segment::right, 0) == g.segment_angle_index(Segment::left, 0));
  CHECK(g.segment_angle_index(Segment::right, 32) == g.segment_angle_index(Segment::left, 32));
  CHECK(g.segment_angle_index(Segment::left, 1) == 63);
  CHECK(g.refined() == AnnulusGrid(33, 128));
  CHECK_THROWS_AS(AnnulusGrid(2, 64), std::invalid_argument);
  CHECK_THROWS_AS(AnnulusGrid(9, 31), std::invalid_argument);
}

TEST_CASE("boundary lengths from the trace inner product") {
  const AnnulusGrid g(9, 32);
  const auto r1 = BoundaryTrace::constant(g, Segment::right, 1.0);
  const auto i1 = BoundaryTrace::constant(g, Segment::inner, 1.0);
  CHECK(trace_inner_product(g, r1, r1) == doctest::Approx(pi).epsilon(1e-14));
  CHECK(trace_inner_product(g, i1, i1) == doctest::Approx(pi).epsilon(1e-14));
  CHECK_THROWS_AS(trace_inner_product(g, r1, i1), std::invalid_argument);
}

TEST_CASE("constant Dirichlet data with zero flux elsewhere give a constant") {
  const AnnulusGrid g(9, 32);
  MixedBvpSpec s;
  s.right = {ConditionKind::dirichlet, BoundaryTrace::constant(g, Segment::right, 2.5).values};
  const AnnulusField f = solve_mixed_bvp(g, s);
  CHECK((f.values().array() - 2.5).abs().maxCoeff() <= 1e-8);
}

TEST_CASE("zero data give the zero field") {
  const AnnulusGrid g(9, 32);
  MixedBvpSpec s;
  s.right = {ConditionKind::dirichlet, {}};
  CHECK(solve_mixed_bvp(g, s).values().cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("pure Neumann layout and mismatched data are rejected") {
  const AnnulusGrid g(9, 32);
  CHECK_THROWS_AS(MixedBvpSolver(g, ConditionKind::neumann, ConditionKind::neumann, ConditionKind::neumann),
                  std::invalid_argument);
  const MixedBvpSolver solver(g, ConditionKind::dirichlet, ConditionKind::neumann, ConditionKind::neumann);
  MixedBvpSpec wrong_kind;
  wrong_kind.right = {ConditionKind::neumann, {}};
  CHECK_THROWS_AS((void)solver.solve(wrong_kind), std::invalid_argument);
  MixedBvpSpec wrong_length;
  wrong_length.right = {ConditionKind::dirichlet, std::vector<double>(5, 1.0)};
  CHECK_THROWS_AS((void)solver.solve(wrong_length), std::invalid_argument);
}

TEST_CASE("second-order convergence for harmonic polynomials and log r") {
  const auto ux = [](double r, double th) { return r * std::cos(th); };
  const auto ux_r = [](double, double th) { return std::cos(th); };
  const auto ul = [](double r, double) { return std::log(r); };
  const auto ul_r = [](double r, double) { return 1.0 / r; };
  std::vector<double> ex, el;
  for (AnnulusGrid g(9, 32); g.angular() <= 128; g = g.refined()) {
    ex.push_back(harmonic_error(g, ux, ux_r));
    el.push_back(harmonic_error(g, ul, ul_r));
  }
  const double slope_x = std::log2(ex.front() / ex.back()) / 2.0;
  const double slope_l = std::log2(el.front() / el.back()) / 2.0;
  CHECK(slope_x >= 1.6);
  CHECK(slope_x <= 2.4);
  CHECK(slope_l >= 1.6);
  CHECK(slope_l <= 2.4);
}

TEST_CASE("discrete maximum principle") {
  const AnnulusGrid g(17, 64);
  MixedBvpSpec s;
  const auto data = [](double t) { return std::sin(3 * t) + 0.5 * std::cos(t); };
  s.right = {ConditionKind::dirichlet, BoundaryTrace::sample(g, Segment::right, data).values};
  s.left = {ConditionKind::dirichlet, BoundaryTrace::sample(g, Segment::left, data).values};
  const AnnulusField f = solve_mixed_bvp(g, s);
  const auto r = f.trace(Segment::right), l = f.trace(Segment::left);
  double lo = 1e300, hi = -1e300;
  for (double v : r.values) lo = std::min(lo, v), hi = std::max(hi, v);
  for (double v : l.values) lo = std::min(lo, v), hi = std::max(hi, v);
  CHECK(f.values().minCoeff() >= lo - 1e-12);
  CHECK(f.values().maxCoeff() <= hi + 1e-12);
}

TEST_CASE("normal derivative reproduces imposed flux") {
  const AnnulusGrid g(17, 64);
  MixedBvpSpec s;
  s.right = {ConditionKind::dirichlet, {}};
  const auto flux = BoundaryTrace::sample(g, Segment::left, [](double t) { return std::sin(t); });
  s.left = {ConditionKind::neumann, flux.values};
  const auto back = solve_mixed_bvp(g, s).normal_derivative(Segment::left);
  for (int j = 1; j + 1 < g.segment_size(Segment::left); ++j) {
    CHECK(back.values[j] == doctest::Approx(flux.values[j]).epsilon(1e-9));
  }
}

TEST_CASE("A maps constants to constants and is linear") {
  const AnnulusGrid g(17, 64);
  const AnnulusCauchyProblem p(g);
  const auto c = p.apply_A(BoundaryTrace::constant(g, Segment::right, 1.7));
  CHECK(c.segment == Segment::left);
  for (double v : c.values) CHECK(v == doctest::Approx(1.7).epsilon(1e-10));

  const auto f1 = BoundaryTrace::sample(g, Segment::right, [](double t) { return t * t; });
  const auto f2 = BoundaryTrace::sample(g, Segment::right, [](double t) { return std::cos(5 * t); });
  const auto lhs = p.apply_A(2.0 * f1 + (-3.0) * f2);
  const auto rhs = 2.0 * p.apply_A(f1) + (-3.0) * p.apply_A(f2);
  CHECK(sup_norm(lhs - rhs) <= 1e-8);
  CHECK_THROWS_AS((void)p.apply_A(BoundaryTrace::constant(g, Segment::left, 1.0)), std::invalid_argument);
}

TEST_CASE("A applied to the trace of x") {
  const AnnulusGrid g(17, 64);
  const AnnulusCauchyProblem p(g);
  // x = r cos θ = sin t on the right half; on the left half x = −sin t, but the
  // zero-flux conditions change the field, so the image differs from that trace.
  const auto out = p.apply_A(BoundaryTrace::sample(g, Segment::right, [](double t) { return std::sin(t); }));
  CHECK(out.values[0] == doctest::Approx(0.0));
  CHECK(out.values[8] == doctest::Approx(0.236704801017).epsilon(1e-9));
  CHECK(out.values[16] == doctest::Approx(0.239325296172).epsilon(1e-9));
  CHECK(out.values[24] == doctest::Approx(out.values[8]).epsilon(1e-12));
  CHECK(std::abs(out.values[16] - (-1.0)) > 0.5);
}

TEST_CASE("A-sharp of zero and of the constant one") {
  const AnnulusGrid g(17, 64);
  const AnnulusCauchyProblem p(g);
  CHECK(sup_norm(p.apply_A_sharp(BoundaryTrace::constant(g, Segment::left, 0.0))) == 0.0);
  const auto mu = p.apply_A_sharp(BoundaryTrace::constant(g, Segment::left, 1.0));
  CHECK(mu.segment == Segment::right);
  CHECK(mu.values[0] == doctest::Approx(-5.946227409504).epsilon(1e-9));
  CHECK(mu.values[16] == doctest::Approx(-0.108973967535).epsilon(1e-9));
  CHECK(mu.values[32] == doctest::Approx(mu.values[0]).epsilon(1e-12));
  CHECK(trace_inner_product(g, mu, BoundaryTrace::constant(g, Segment::right, 1.0)) ==
        doctest::Approx(-2.459648372344).epsilon(1e-9));
}

TEST_CASE("Green defect vanishes for traces that are zero at the contact points") {
  // With one-sided Neumann rows the discrete Green identity holds exactly.
  std::vector<double> d;
  for (AnnulusGrid g(9, 32); g.angular() <= 128; g = g.refined()) {
    const AnnulusCauchyProblem p(g);
    const auto phi = BoundaryTrace::sample(g, Segment::right, [](double t) { return std::pow(std::sin(t), 2); });
    const auto psi = BoundaryTrace::sample(g, Segment::left, [](double t) { return 1.0 + 0.5 * std::cos(t); });
    d.push_back(std::abs(p.green_defect(phi, psi)));
  }
  for (double v : d) CHECK(v <= 1e-12);
}

TEST_CASE("defect depends only on the contact values") {
  const AnnulusGrid g(17, 64);
  const AnnulusCauchyProblem p(g);
  const double a = 0.7, b = -0.4;
  const auto psi = BoundaryTrace::constant(g, Segment::left, 1.0);
  const auto phi1 = p.eta(a, b);
  const auto phi2 = phi1 + BoundaryTrace::sample(g, Segment::right, [](double t) { return 2 * std::sin(t); });
  const double d1 = p.green_defect(phi1, psi);
  const double d2 = p.green_defect(phi2, psi);
  CHECK(std::abs(d1 - d2) <= 1e-10);

  // a different smooth blend with the same end values
  const auto linear = BoundaryTrace::sample(g, Segment::right, [&](double t) { return a + (b - a) * t / pi; });
  CHECK(std::abs(p.green_defect(linear, psi) - p.correction_functional(psi, a, b)) <= 1e-10);
}

TEST_CASE("correction functional") {
  const AnnulusGrid g(17, 64);
  const AnnulusCauchyProblem p(g);
  const auto psi = BoundaryTrace::sample(g, Segment::left, [](double t) { return std::exp(-t); });
  CHECK(p.correction_functional(psi, 0.0, 0.0) == 0.0);
  const auto eta = p.eta(1.0, 3.0);
  CHECK(eta.values.front() == doctest::Approx(1.0));
  CHECK(eta.values.back() == doctest::Approx(3.0));
  // linear in (a, b)
  const double r1 = p.correction_functional(psi, 1.0, 0.0);
  const double r2 = p.correction_functional(psi, 0.0, 1.0);
  CHECK(p.correction_functional(psi, 2.0, -1.0) == doctest::Approx(2 * r1 - r2).epsilon(1e-10));
}

TEST_CASE("sentinel reconstruction with zero weight") {
  const AnnulusGrid g(9, 32);
  const AnnulusCauchyProblem p(g);
  const auto zero = BoundaryTrace::constant(g, Segment::left, 0.0);
  const auto f = BoundaryTrace::constant(g, Segment::left, 3.0);
  CHECK(p.sentinel_reconstruct(zero, f, 1.0, 2.0) == 0.0);
}

TEST_CASE("alternating method with zero data stops at once") {
  const AnnulusGrid g(9, 32);
  const AnnulusCauchyProblem p(g);
  const auto km = p.kozlov_mazya_solve(BoundaryTrace::constant(g, Segment::right, 0.0), 50, 1e-12);
  CHECK(km.status == KozlovMazyaResult::Status::converged);
  CHECK(km.iterates.size() == 1);
  CHECK(sup_norm(km.psi) == 0.0);
  CHECK_THROWS_AS((void)p.kozlov_mazya_solve(BoundaryTrace::constant(g, Segment::left, 0.0), 5, 0.0),
                  std::invalid_argument);
}

TEST_CASE("alternating method on consistent data") {
  const AnnulusGrid g(33, 128);
  const AnnulusCauchyProblem p(g);
  const auto one = BoundaryTrace::constant(g, Segment::left, 1.0);
  const auto mu = -1.0 * p.apply_A_sharp(one);
  const auto km = p.kozlov_mazya_solve(mu, 300, 0.0);
  REQUIRE(km.residuals.size() == 301);
  CHECK(km.status == KozlovMazyaResult::Status::max_iterations);
  CHECK(km.diagnostic.empty());
  // slow but steady: a tenfold reduction takes a few hundred sweeps on this grid
  CHECK(km.residuals[300] <= 0.1 * km.residuals[1]);
  for (std::size_t k = 20; k < km.residuals.size(); ++k) CHECK(km.residuals[k] <= km.residuals[k - 1]);
  CHECK(sup_norm(km.iterates[300] - one) < sup_norm(km.iterates[20] - one));
}

TEST_CASE("alternating method reports a spike as inconsistent") {
  const AnnulusGrid g(17, 64);
  const AnnulusCauchyProblem p(g);
  auto spike = BoundaryTrace::constant(g, Segment::right, 0.0);
  spike.values[16] = 1.0 / g.dtheta();
  const auto km = p.kozlov_mazya_solve(spike, 60, 1e-10);
  CHECK(km.status == KozlovMazyaResult::Status::stalled);
  CHECK_FALSE(km.diagnostic.empty());
  CHECK(km.residuals.back() > 0.9 * km.residuals[1]);
}

TEST_CASE("sentinel correction for the two reference traces") {
  const AnnulusGrid g(33, 128);
  const AnnulusCauchyProblem p(g);
  const auto mu = -1.0 * p.apply_A_sharp(BoundaryTrace::constant(g, Segment::left, 1.0));
  const auto km = p.kozlov_mazya_solve(mu, 100, 1e-10);

  // φ₂ vanishes at both contact points: no correction
  const auto phi2 = BoundaryTrace::sample(g, Segment::right, [](double t) { return pi - 2 * std::abs(t - pi / 2); });
  const auto f2 = p.apply_A(phi2);
  CHECK(std::abs(p.correction_functional(km.psi, 0.0, 0.0)) <= 1e-8);
  CHECK(p.sentinel_reconstruct(km.psi, f2, 0.0, 0.0) == trace_inner_product(g, km.psi, f2));

  // φ₁ equals π²/4 at both ends: the corrected value is closer to the truth
  const double c = pi * pi / 4;
  const auto phi1 = BoundaryTrace::sample(g, Segment::right, [](double t) { return (t - pi / 2) * (t - pi / 2); });
  const auto f1 = p.apply_A(phi1);
  const double truth = trace_inner_product(g, mu, phi1);
  const double raw = trace_inner_product(g, km.psi, f1);
  const double corrected = p.sentinel_reconstruct(km.psi, f1, c, c);
  CHECK(std::abs(corrected - truth) < std::abs(raw - truth));
}

TEST_CASE("csv writers") {
  const AnnulusGrid g(3, 8);
  std::ostringstream t, f;
  write_trace_csv(t, g, BoundaryTrace::constant(g, Segment::right, 1.0));
  CHECK(t.str().rfind("node,t,value\n", 0) == 0);
  write_field_csv(f, AnnulusField(g, Eigen::VectorXd::Zero(24)));
  const std::string field = f.str();
  CHECK(field.rfind("r,theta,value\n", 0) == 0);
  CHECK(std::count(field.begin(), field.end(), '\n') == 25);
}

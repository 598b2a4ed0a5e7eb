#include "rellich/rellich.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace rellich;

TEST(RadialGrid, UniformNodesAreCellMidpoints) {
  const auto g = build_radial_grid(5, 1.0, 4, Spacing::uniform);
  const double expected[] = {0.125, 0.375, 0.625, 0.875};
  for (int i = 0; i < 4; ++i) {
    EXPECT_DOUBLE_EQ(g.nodes[i], expected[i]);
    EXPECT_DOUBLE_EQ(g.widths[i], 0.25);
  }
  EXPECT_DOUBLE_EQ(g.faces[0], 0.0);
  EXPECT_DOUBLE_EQ(g.faces[4], 1.0);
}

// Midpoint rule for sigma r^4 dr; at n = 4 it is 5% low, so the 1% closeness
// is only reached from n = 16 on. The error must decay like n^-2.
TEST(RadialGrid, WeightsApproachBallVolume) {
  const double exact = 8.0 * pi * pi / 15.0;
  EXPECT_NEAR(ball_volume(5, 1.0), exact, 1e-14);
  double previous = infinity;
  for (int n : {4, 16, 64, 256}) {
    const auto g = build_radial_grid(5, 1.0, n, Spacing::uniform);
    const double err = std::abs(g.weights.sum() - exact) / exact;
    if (n >= 16) EXPECT_LE(err, 0.01) << "n = " << n;
    EXPECT_LE(err, 1.0 / (n * n) + 1e-15) << "n = " << n;
    EXPECT_LT(err, previous);
    previous = err;
  }
}

TEST(RadialGrid, LogGridCoversOriginAndMeasure) {
  const auto g = build_radial_grid(7, 5.0, 800, Spacing::log, 1e-6);
  EXPECT_EQ(g.faces[0], 0.0);
  EXPECT_DOUBLE_EQ(g.faces[800], 5.0);
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    EXPECT_GT(g.nodes[i], g.faces[i]);
    EXPECT_LT(g.nodes[i], g.faces[i + 1]);
  }
  EXPECT_NEAR(g.weights.sum() / ball_volume(7, 5.0), 1.0, 1e-3);
}

TEST(RadialGrid, RejectsLowDimensionAndBadInput) {
  EXPECT_THROW(build_radial_grid(4, 1.0, 16, Spacing::uniform), PreconditionError);
  EXPECT_THROW(build_radial_grid(5, -1.0, 16, Spacing::uniform), PreconditionError);
  EXPECT_THROW(build_radial_grid(5, 1.0, 3, Spacing::uniform), PreconditionError);
  EXPECT_THROW(build_box_grid(4, 8, 1.0), PreconditionError);
  EXPECT_THROW(build_box_grid(5, 7, 1.0), PreconditionError);
  EXPECT_THROW(parse_spacing("cubic"), PreconditionError);
}

TEST(RadialGrid, HashIsContentAddressed) {
  const auto a = build_radial_grid(5, 2.0, 32, Spacing::uniform);
  const auto b = build_radial_grid(5, 2.0, 32, Spacing::uniform);
  const auto c = build_radial_grid(5, 2.0, 33, Spacing::uniform);
  EXPECT_EQ(a.hash(), b.hash());
  EXPECT_NE(a.hash(), c.hash());
}

TEST(BoxGrid, StaggeredAndSymmetric) {
  const auto g = build_box_grid(5, 6, 1.5);
  EXPECT_EQ(g.size(), 6 * 6 * 6 * 6 * 6);
  EXPECT_DOUBLE_EQ(g.spacing, 0.5);
  EXPECT_DOUBLE_EQ(g.axis.front(), -1.25);
  EXPECT_DOUBLE_EQ(g.axis.back(), 1.25);
  for (Eigen::Index i = 0; i < g.size(); ++i) EXPECT_GT(g.radius(i), 0.0);
}

TEST(LpNorm, ConstantOnBallIsMeasure) {
  const auto g = build_radial_grid(6, 1.0, 64, Spacing::uniform);
  const RealVector one = RealVector::Ones(g.size());
  EXPECT_DOUBLE_EQ(lp_norm(g, one, 1.0), g.weights.sum());
  EXPECT_NEAR(lp_norm(g, one, 1.0) / ball_volume(6, 1.0), 1.0, 1e-3);
  EXPECT_DOUBLE_EQ(lp_norm(g, one, infinity), 1.0);
}

TEST(LpNorm, IndicatorGivesSqrtWeight) {
  const auto g = build_radial_grid(5, 3.0, 40, Spacing::log);
  for (Eigen::Index i : {Eigen::Index(0), Eigen::Index(17), Eigen::Index(39)}) {
    const RealVector e = RealVector::Unit(g.size(), i);
    EXPECT_NEAR(lp_norm(g, e, 2.0), std::sqrt(g.weights[i]), 1e-15 * std::sqrt(g.weights[i]) * 4);
  }
}

TEST(LpNorm, MatchesInnerProductAndOracle) {
  const auto g = build_radial_grid(5, 3.0, 50, Spacing::uniform);
  Rng rng(11);
  const ComplexVector u = random_unit_vector(g, rng);
  const Complex ip = inner_product(g, u, u);
  EXPECT_NEAR(lp_norm(g, u, 2.0), std::sqrt(ip.real()), 1e-14);
  EXPECT_NEAR(ip.imag(), 0.0, 1e-15);
  const RealVector v = u.real();
  for (double p : {1.0, 1.5, 3.0, infinity})
    EXPECT_NEAR(lp_norm(g, v, p), oracle::weighted_lp(v, g.weights, p), 1e-13 * oracle::weighted_lp(v, g.weights, p));
  EXPECT_THROW(lp_norm(g, v, 0.5), PreconditionError);
}

TEST(Dilation, UnitFactorIsIdentity) {
  const auto g = build_radial_grid(5, 4.0, 64, Spacing::uniform);
  Rng rng(3);
  const ComplexVector u = random_unit_vector(g, rng);
  EXPECT_EQ((dilate(g, u, 1.0) - u).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_THROW(dilate(g, u, 0.0), PreconditionError);
  EXPECT_THROW(dilate(g, u, 1.5), PreconditionError);
}

// D_{1/2} e^{-r^2} = e^{-r^2/4}: the interpolation error is second order.
TEST(Dilation, GaussianResampleConverges) {
  double previous = infinity;
  for (int n : {64, 256, 1024}) {
    const auto g = build_radial_grid(5, 8.0, n, Spacing::uniform);
    ComplexVector u(g.size());
    for (Eigen::Index i = 0; i < g.size(); ++i) u[i] = std::exp(-g.nodes[i] * g.nodes[i]);
    const ComplexVector d = dilate(g, u, 0.5);
    double err = 0.0;
    for (Eigen::Index i = 0; i < g.size(); ++i)
      err = std::max(err, std::abs(d[i] - std::exp(-0.25 * g.nodes[i] * g.nodes[i])));
    EXPECT_LT(err, previous);
    if (previous < infinity) EXPECT_LT(err, 0.35 * previous);
    previous = err;
  }
  EXPECT_LT(previous, 1e-4);
}

TEST(Dilation, SupNormKeptForMonotoneRadial) {
  const auto g = build_radial_grid(5, 6.0, 128, Spacing::uniform);
  ComplexVector u(g.size());
  for (Eigen::Index i = 0; i < g.size(); ++i) u[i] = 1.0 / (1.0 + g.nodes[i]);
  for (double s : {0.9, 0.5, 0.1}) EXPECT_DOUBLE_EQ(lp_norm(g, dilate(g, u, s), infinity), lp_norm(g, u, infinity));
}

TEST(Probes, DeterministicBoundedAndVanishing) {
  const auto g = build_radial_grid(5, 8.0, 400, Spacing::uniform);
  const auto a = probe_functions(g, 9, 42);
  const auto b = probe_functions(g, 9, 42);
  const auto op = assemble_sector(std::make_shared<RadialGrid>(g), 0, 1.0);
  ASSERT_EQ(a.size(), 9u);
  for (std::size_t k = 0; k < a.size(); ++k) {
    EXPECT_EQ((a[k] - b[k]).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_LE(std::abs(a[k][g.size() - 1]), 1e-10);
    EXPECT_TRUE(std::isfinite(op.energy(a[k])));
  }
  EXPECT_THROW(probe_functions(g, 0, 1), PreconditionError);
}

TEST(Probes, GaussianMassMatchesClosedForm) {
  for (int N : {5, 6, 8}) {
    const auto g = build_radial_grid(N, 8.0, 400, Spacing::uniform);
    const ComplexVector u = probe_functions(g, 1, 5).front();
    const double exact = std::pow(pi / 2.0, N / 2.0);
    EXPECT_NEAR(std::pow(lp_norm(g, u, 2.0), 2) / exact, 1.0, 0.01) << "N = " << N;
  }
}

TEST(Phi, LinearLimitForLargeSteepness) {
  std::vector<double> e(5, 0.0);
  e[0] = 1.0;
  const auto phi = make_phi(e, 1e6, 0.0);
  const auto g = build_box_grid(5, 4, 2.0);
  const auto s = evaluate_phi_derivatives(phi, g);
  for (Eigen::Index i = 0; i < g.size(); ++i) EXPECT_NEAR(s.value[i], g.coordinate(i, 0), 1e-10);
}

TEST(Phi, DerivativeBoundsHoldOnRandomMembers) {
  const auto g = build_box_grid(5, 6, 3.0);
  Rng rng(99);
  for (int k = 0; k < 100; ++k) {
    std::vector<double> e(5);
    double n = 0.0;
    for (auto& x : e) n += (x = rng.normal()) * x;
    for (auto& x : e) x /= std::sqrt(n);
    const double s = rng.uniform(tanh_curvature_bound, 20.0);
    const auto phi = make_phi(e, s, rng.uniform(-3.0, 3.0));
    EXPECT_TRUE(phi_bounds_hold(phi, g));
    const auto samples = evaluate_phi_derivatives(phi, g);
    for (const auto& grad : samples.gradient) EXPECT_LE(grad.cwiseAbs().maxCoeff(), 1.0);
  }
  EXPECT_THROW(make_phi({1.0, 1.0, 0.0, 0.0, 0.0}, 1.0, 0.0), PreconditionError);
  EXPECT_THROW(make_phi({1.0, 0.0, 0.0, 0.0, 0.0}, 0.5, 0.0), PreconditionError);
}

// max_t |d^2/dt^2 tanh t| = max 2 sech^2 t |tanh t|, found numerically.
TEST(Phi, CurvatureBoundMatchesNumericalMaximum) {
  const double t_star = oracle::ternary_minimize(
      [](double t) {
        const double th = std::tanh(t);
        return -2.0 * (1.0 - th * th) * th;
      },
      0.0, 3.0);
  const double th = std::tanh(t_star);
  const double numeric = 2.0 * (1.0 - th * th) * th;
  EXPECT_NEAR(numeric, 0.7698, 5e-5);
  EXPECT_NEAR(numeric, tanh_curvature_bound, 1e-12);
  const auto phi = make_phi({1.0, 0.0, 0.0, 0.0, 0.0}, 1.0, 0.0);
  EXPECT_NEAR(phi.hessian_bound(), numeric, 1e-12);
}

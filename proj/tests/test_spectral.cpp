#include "rellich/rellich.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace rellich;

namespace {

struct Fixture {
  std::shared_ptr<const RadialGrid> grid;
  SectorOperator op;
  std::shared_ptr<const SpectralDecomposition> d;
  SemigroupEvaluator ev;

  Fixture(double c, int n = 160, double R = 20.0)
      : grid(std::make_shared<RadialGrid>(build_radial_grid(5, R, n, Spacing::uniform))),
        op(grid, 0, c),
        d(std::make_shared<SpectralDecomposition>(eigendecompose(op))),
        ev(SemigroupEvaluator::spectral(d)) {}
};

double rel(const ComplexVector& a, const ComplexVector& b) { return (a - b).norm() / b.norm(); }

}  // namespace

TEST(Eigendecompose, WeightedOrthonormalAndAccurate) {
  for (double c : {0.0, 1.0}) {
    Fixture f(c);
    EXPECT_LE(f.d->orthonormality_error(), 1e-10);
    const double top = f.d->eigenvalues().maxCoeff();
    EXPECT_LE(f.d->max_residual([&](const RealVector& q) { return RealVector(f.op.apply(q)); }), 1e-9 * top);
    for (Eigen::Index j = 1; j < f.d->size(); ++j) EXPECT_GE(f.d->eigenvalues()[j], f.d->eigenvalues()[j - 1]);
  }
}

TEST(Eigendecompose, PositiveAtSubcriticalCoupling) {
  Fixture f(1.0, 512, 50.0);
  EXPECT_GT(f.d->eigenvalues()[0], 0.0);
}

// The direct symmetric solver is accurate to eps * mu_max in absolute terms;
// both routes must agree at that level.
TEST(Eigendecompose, FactoredRouteAgreesWithDirectSolver) {
  Fixture f(1.0);
  const SpectralDecomposition direct(f.op.symmetric_operator(), f.op.sqrt_weights(), f.op.hash());
  const double top = direct.eigenvalues().maxCoeff();
  for (Eigen::Index j = 0; j < direct.size(); ++j)
    EXPECT_NEAR(f.d->eigenvalues()[j], direct.eigenvalues()[j], 1e-10 * top);
}

TEST(Semigroup, ZeroTimeIsIdentityAndEigenvectorsDecay) {
  Fixture f(1.0);
  Rng rng(1);
  const ComplexVector u = random_unit_vector(*f.grid, rng);
  EXPECT_LE(rel(f.ev.apply(0.0, u), u), 1e-12);
  for (Eigen::Index j : {Eigen::Index(0), Eigen::Index(5), Eigen::Index(40)}) {
    const ComplexVector q = f.d->eigenvector(j).cast<Complex>();
    for (double t : {0.01, 0.3, 2.0}) {
      const ComplexVector expected = std::exp(-t * f.d->eigenvalues()[j]) * q;
      EXPECT_LE((f.ev.apply(t, q) - expected).norm(), 1e-10 * q.norm());
    }
  }
}

TEST(Semigroup, LawHoldsForRealAndComplexTimes) {
  Fixture f(1.0);
  Rng rng(2);
  for (int k = 0; k < 5; ++k) {
    const ComplexVector u = random_unit_vector(*f.grid, rng);
    const Complex t(0.2, 0.1), s(0.5, -0.3);
    EXPECT_LE(rel(f.ev.apply(t, f.ev.apply(s, u)), f.ev.apply(t + s, u)), 1e-9);
    EXPECT_LE(rel(f.ev.apply(0.7, f.ev.apply(0.4, u)), f.ev.apply(1.1, u)), 1e-9);
  }
  Rng r2(3);
  const ComplexVector u = random_unit_vector(*f.grid, r2);
  EXPECT_THROW(f.ev.apply(Complex(-0.1, 0.0), u), PreconditionError);
}

TEST(Semigroup, ContractiveForSubcriticalCoupling) {
  Fixture f(1.0);
  for (double t : {0.0, 0.01, 1.0, 100.0}) {
    const RealMatrix m = f.d->matrix_function([t](double mu) { return std::exp(-t * mu); });
    EXPECT_LE(weighted_spectral_norm(m, f.op.weights()), 1.0 + 1e-12);
  }
}

// One-dimensional sector driven through the matrix-free Krylov route.
TEST(Semigroup, KrylovAgreesWithDenseSpectralRoute) {
  Fixture f(1.0);
  const auto kr = SemigroupEvaluator::krylov(weighted_action(f.op));
  Rng rng(4);
  const ComplexVector u = random_unit_vector(*f.grid, rng);
  for (double t : {1e-3, 0.1, 1.0}) EXPECT_LE(rel(kr.apply(t, u), f.ev.apply(t, u)), 1e-8) << "t = " << t;
  EXPECT_THROW(kr.apply(Complex(0.1, 0.1), u), PreconditionError);
}

TEST(Kernel, ReproducesActionAndIsSymmetric) {
  Fixture f(1.0);
  const KernelMatrix k = semigroup_kernel(f.ev, 0.3);
  EXPECT_LE(k.symmetry_error(), 1e-8);
  Rng rng(5);
  for (int s = 0; s < 5; ++s) {
    const RealVector u = random_unit_vector(*f.grid, rng).real();
    const ComplexVector direct = f.ev.apply(0.3, u.cast<Complex>());
    EXPECT_LE((k.apply(u) - direct.real()).norm(), 1e-9 * direct.norm());
  }
}

TEST(Kernel, SquaringRouteMatchesSpectralRoute) {
  Fixture f(0.0);
  for (double t : {0.05, 1.0}) {
    const KernelMatrix a = semigroup_kernel(f.ev, t), b = squaring_kernel(f.op, t);
    EXPECT_LE((a.entries - b.entries).cwiseAbs().maxCoeff(), 1e-9 * a.entries.cwiseAbs().maxCoeff()) << "t = " << t;
  }
}

TEST(Kernel, LargeTimeApproachesRankOneProfile) {
  Fixture f(1.0, 96, 10.0);
  const double gap = f.d->eigenvalues()[1] - f.d->eigenvalues()[0];
  const double t = 40.0 / gap;
  const KernelMatrix k = semigroup_kernel(f.ev, t);
  const RealVector q = f.d->eigenvector(0);
  const RealMatrix rank_one = std::exp(-t * f.d->eigenvalues()[0]) * q * q.transpose();
  EXPECT_LE((k.entries - rank_one).cwiseAbs().maxCoeff(), 1e-12 * rank_one.cwiseAbs().maxCoeff());
}

// Free kernel on the diagonal at the origin scales like t^{-N/4}.
TEST(Kernel, DiagonalNearOriginScalesLikeTimeToMinusFiveQuarters) {
  Fixture f(0.0, 512, 50.0);
  std::vector<double> ts = geometric_sequence(0.1, 1.0, 5), ks;
  for (double t : ts) ks.push_back(semigroup_kernel(f.ev, t).entries(0, 0));
  const FitResult fit = power_law_fit(ts, ks);
  EXPECT_NEAR(fit.exponent / -1.25, 1.0, 0.15);
}

TEST(InvSqrt, EigenvectorsAndIdentitySeam) {
  Fixture f(1.0);
  for (Eigen::Index j : {Eigen::Index(0), Eigen::Index(10)}) {
    const ComplexVector q = f.d->eigenvector(j).cast<Complex>();
    const ComplexVector expected = q / std::sqrt(f.d->eigenvalues()[j]);
    EXPECT_LE(rel(inv_sqrt_apply(*f.d, q, InvSqrtRoute::spectral), expected), 1e-10);
  }
  const Eigen::Index n = 12;
  const SpectralDecomposition identity(RealMatrix::Identity(n, n), RealVector::Ones(n), "identity");
  ComplexVector u(n);
  for (Eigen::Index i = 0; i < n; ++i) u[i] = Complex(1.0 + i, -0.5 * i);
  EXPECT_LE(rel(inv_sqrt_apply(identity, u, InvSqrtRoute::spectral), u), 1e-14);
  // Default node count resolves the scalar integral to about 1e-8.
  EXPECT_LE(rel(inv_sqrt_apply(identity, u, InvSqrtRoute::quadrature), u), 1e-7);
}

TEST(InvSqrt, QuadratureMatchesSpectralAndSquaresToInverse) {
  Fixture f(1.0);
  Rng rng(6);
  const ComplexVector u = random_unit_vector(*f.grid, rng);
  const ComplexVector spectral = inv_sqrt_apply(*f.d, u, InvSqrtRoute::spectral);
  EXPECT_LE(rel(inv_sqrt_apply(*f.d, u, InvSqrtRoute::quadrature, 200), spectral), 1e-6);
  // A^{-1/2} A^{-1/2} = A^{-1}. Compared in the eigenbasis: going back through
  // A itself would amplify roundoff by the condition number (~1e9 here).
  const ComplexVector x = inv_sqrt_apply(*f.d, spectral, InvSqrtRoute::spectral);
  EXPECT_LE(rel(x, f.d->apply_function([](double mu) { return Complex(1.0 / mu); }, u)), 1e-10);
  // Scalar quadrature against 1/sqrt(mu) over the spectrum.
  const auto q = make_inv_sqrt_quadrature(spectral_bounds(*f.d));
  for (double mu : {f.d->eigenvalues()[0], f.d->eigenvalues()[f.d->size() - 1]})
    EXPECT_NEAR(q.evaluate(mu) * std::sqrt(mu), 1.0, 1e-7);
  const SpectralDecomposition negative(-RealMatrix::Identity(3, 3), RealVector::Ones(3), "neg");
  EXPECT_THROW(inv_sqrt_apply(negative, ComplexVector::Ones(3), InvSqrtRoute::spectral), PreconditionError);
}

TEST(Riesz, FreeOperatorHasUnitNorm) {
  Fixture f(0.0, 256, 20.0);
  const RealMatrix r = riesz_matrix(f.op, *f.d);
  EXPECT_NEAR(weighted_spectral_norm(r, f.op.weights()), 1.0, 1e-8);
}

TEST(Riesz, BoundedByCoercivityAndRoutesAgree) {
  Fixture f(1.0);
  const double eta = coercivity_eta(1.0, sector_rellich_quotient(f.grid, 0));
  Rng rng(7);
  for (int k = 0; k < 100; ++k) {
    const ComplexVector u = random_unit_vector(*f.grid, rng);
    const ComplexVector ru = riesz_apply(f.op, *f.d, u);
    EXPECT_LE(lp_norm(*f.grid, ru, 2.0), (1.0 + 1e-10) / std::sqrt(eta));
    if (k < 5) EXPECT_LE(rel(riesz_apply(f.op, *f.d, u, InvSqrtRoute::quadrature), ru), 1e-6);
  }
}

TEST(SectorAngle, ZeroTwistIsRealAndShiftMakesQuotientsAccretive) {
  Fixture f(1.0, 96, 10.0);
  const auto phi = make_radial_phi(1.0, 3.0);
  Rng rng(8);
  std::vector<ComplexVector> samples;
  for (int k = 0; k < 100; ++k) samples.push_back(random_unit_vector(*f.grid, rng));
  const auto zero = sector_angle(TwistedOperator<SectorOperator>(f.op, 0.0, phi), 0.0, samples);
  EXPECT_LE(zero.half_angle, 1e-12);
  const double k = 2624400.0;
  for (double lambda : {0.5, 1.0, 2.0}) {
    const auto est = sector_angle(TwistedOperator<SectorOperator>(f.op, lambda, phi), k, samples);
    EXPECT_EQ(est.quotients.size(), samples.size());
    EXPECT_GT(est.min_real_part, 0.0);
    EXPECT_LT(est.half_angle, pi / 2.0);
  }
}

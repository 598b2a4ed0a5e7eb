#include "rellich/rellich.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

using namespace rellich;

namespace {

std::shared_ptr<const RadialGrid> uniform_grid(int N, double R, int n) {
  return std::make_shared<RadialGrid>(build_radial_grid(N, R, n, Spacing::uniform));
}

}  // namespace

TEST(SectorOperator, FluxMatrixIsExactlySymmetric) {
  for (int ell : {0, 1, 3}) {
    const SectorOperator op(uniform_grid(6, 10.0, 64), ell, 1.0);
    const RealMatrix wl = op.weights().asDiagonal() * op.laplacian_matrix();
    // Rebuilt from the stored flux entries: symmetric by construction.
    RealMatrix flux = RealMatrix::Zero(op.size(), op.size());
    flux.diagonal() = op.flux_diagonal();
    for (Eigen::Index i = 0; i + 1 < op.size(); ++i) flux(i, i + 1) = flux(i + 1, i) = op.flux_offdiagonal()[i];
    EXPECT_EQ((flux - flux.transpose()).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_LE((wl - flux).cwiseAbs().maxCoeff(), 1e-13 * flux.cwiseAbs().maxCoeff());
  }
}

TEST(SectorOperator, LaplacianIsWeightedSelfAdjoint) {
  const SectorOperator op(uniform_grid(5, 8.0, 80), 2, 0.5);
  Rng rng(5);
  const auto& g = op.grid();
  for (int k = 0; k < 10; ++k) {
    const ComplexVector u = random_unit_vector(g, rng), v = random_unit_vector(g, rng);
    const Complex a = inner_product(g, op.apply_laplacian(u), v);
    const Complex b = inner_product(g, u, op.apply_laplacian(v));
    EXPECT_LE(std::abs(a - b), 1e-12 * std::abs(a) + 1e-12);
  }
}

TEST(SectorOperator, FormMatchesOperatorAction) {
  const SectorOperator op(uniform_grid(5, 8.0, 120), 0, 1.2);
  Rng rng(8);
  const auto& g = op.grid();
  for (int k = 0; k < 10; ++k) {
    const ComplexVector u = random_unit_vector(g, rng), v = random_unit_vector(g, rng);
    const Complex via_form = op.form(u, v);
    const Complex via_apply = inner_product(g, ComplexVector(op.apply(u)), v);
    EXPECT_LE(std::abs(via_form - via_apply), 1e-10 * std::abs(via_form));
    EXPECT_NEAR(op.form(u, u).imag(), 0.0, 1e-12 * std::abs(op.form(u, u)));
  }
}

TEST(SectorOperator, FreeSpectrumIsSquaredLaplacianSpectrum) {
  const SectorOperator op(uniform_grid(5, 20.0, 200), 0, 0.0);
  const Eigen::SelfAdjointEigenSolver<RealMatrix> lap(-op.symmetric_laplacian(), Eigen::EigenvaluesOnly);
  const RealVector nu = lap.eigenvalues();
  const SpectralDecomposition d = eigendecompose(op);
  for (Eigen::Index j = 0; j < op.size(); ++j)
    EXPECT_NEAR(d.eigenvalues()[j] / (nu[j] * nu[j]), 1.0, 1e-8) << "j = " << j;
}

TEST(SectorOperator, SubcriticalCouplingIsPositiveDefinite) {
  const auto grid = std::make_shared<RadialGrid>(build_radial_grid(5, 50.0, 512, Spacing::log));
  const SectorOperator op(grid, 0, 1.0);
  EXPECT_TRUE(op.positive_definite());
  const SpectralDecomposition d = eigendecompose(op);
  EXPECT_GT(d.eigenvalues()[0], 0.0);
  // Beyond the discrete constant the band Cholesky test must fail.
  const double cstar_h = sector_rellich_quotient(grid, 0);
  EXPECT_FALSE(SectorOperator(grid, 0, 1.01 * cstar_h).positive_definite());
}

// Coercivity: a(u) >= eta_h ||L u||^2 with eta_h = 1 - c / C*_h.
TEST(SectorOperator, FormDominatesEtaTimesLaplacianEnergy) {
  const auto grid = uniform_grid(5, 10.0, 300);
  const double cstar_h = rellich_constant(grid, 3).minimum;
  const double c = 1.0;
  const double eta = coercivity_eta(c, cstar_h);
  EXPECT_NEAR(eta, 1.0 - c / cstar_h, 1e-15);
  EXPECT_DOUBLE_EQ(coercivity_eta(-2.0, cstar_h), 1.0);
  const SectorOperator op(grid, 0, c);
  const auto probes = probe_functions(*grid, 12, 4);
  for (const auto& u : probes) {
    const double lu2 = std::pow(lp_norm(*grid, ComplexVector(op.apply_laplacian(u)), 2.0), 2);
    EXPECT_GE(op.energy(u), eta * lu2 * (1.0 - 1e-12));
  }
  // The Gaussian member, c = 1: eta = 1 - 16/25 = 0.36 at the exact constant.
  const double lu2 = std::pow(lp_norm(*grid, ComplexVector(op.apply_laplacian(probes[0])), 2.0), 2);
  EXPECT_GE(op.energy(probes[0]), 0.36 * lu2);
}

// Tensor products of sin(k pi (i+1)/(m+1)) diagonalise the Dirichlet stencil.
TEST(BoxOperator, FreeModesAreEigenvectors) {
  const auto grid = std::make_shared<BoxGrid>(build_box_grid(5, 6, 1.5));
  const BoxOperator op(grid, 0.0);
  const int m = grid->per_axis;
  const double h = grid->spacing;
  const int modes[5] = {1, 2, 1, 3, 5};
  RealVector u(grid->size());
  double lambda = 0.0;
  for (int ax = 0; ax < 5; ++ax) lambda += (2.0 * std::cos(modes[ax] * pi / (m + 1)) - 2.0) / (h * h);
  for (Eigen::Index node = 0; node < grid->size(); ++node) {
    double v = 1.0;
    for (int ax = 0; ax < 5; ++ax) v *= std::sin(modes[ax] * pi * (grid->index_along(node, ax) + 1) / (m + 1));
    u[node] = v;
  }
  const RealVector au = op.apply(u);
  EXPECT_LE((au - lambda * lambda * u).cwiseAbs().maxCoeff(), 1e-10 * lambda * lambda);
}

TEST(BoxOperator, SymmetricOnRandomPairs) {
  const auto grid = std::make_shared<BoxGrid>(build_box_grid(5, 6, 2.0));
  const BoxOperator op(grid, 1.0);
  Rng rng(21);
  for (int k = 0; k < 20; ++k) {
    RealVector u(grid->size()), v(grid->size());
    for (Eigen::Index i = 0; i < u.size(); ++i) {
      u[i] = rng.normal();
      v[i] = rng.normal();
    }
    const double a = u.dot(RealVector(op.apply(v))), b = v.dot(RealVector(op.apply(u)));
    EXPECT_LE(std::abs(a - b), 1e-11 * std::max(std::abs(a), 1.0));
  }
}

TEST(BoxOperator, DenseMatrixAgreesWithFormAndIsPositive) {
  const auto grid = std::make_shared<BoxGrid>(build_box_grid(5, 4, 1.0));
  const BoxOperator op(grid, 1.0);
  const RealMatrix a = op.dense_matrix();
  EXPECT_LE((a - a.transpose()).cwiseAbs().maxCoeff(), 1e-10 * a.cwiseAbs().maxCoeff());
  const Eigen::SelfAdjointEigenSolver<RealMatrix> eig(a, Eigen::EigenvaluesOnly);
  EXPECT_GT(eig.eigenvalues()[0], 0.0);
  const auto [lo, hi] = box_extremal_eigenvalues(op);
  EXPECT_NEAR(lo / eig.eigenvalues()[0], 1.0, 1e-6);
  EXPECT_NEAR(hi / eig.eigenvalues()[a.rows() - 1], 1.0, 1e-8);
}

TEST(BoxOperator, LanczosSmallestRitzValuePositiveAtM12) {
  const auto grid = std::make_shared<BoxGrid>(build_box_grid(5, 12, 3.0));
  const BoxOperator op(grid, 1.0);
  const auto [lo, hi] = box_extremal_eigenvalues(op);
  EXPECT_GT(lo, 0.0);
  EXPECT_GT(hi, lo);
}

TEST(TwistedOperator, SimilarityPreservesSpectrum) {
  const SectorOperator op(uniform_grid(5, 6.0, 48), 0, 1.0);
  const auto phi = make_radial_phi(1.0, 2.0);
  const Eigen::SelfAdjointEigenSolver<RealMatrix> base(op.symmetric_operator(), Eigen::EigenvaluesOnly);
  for (double lambda : {0.5, 1.0}) {
    const TwistedOperator<SectorOperator> tw(op, lambda, phi);
    Eigen::EigenSolver<RealMatrix> es(twisted_dense_matrix(tw), false);
    std::vector<double> re;
    for (Eigen::Index j = 0; j < es.eigenvalues().size(); ++j) {
      EXPECT_LE(std::abs(es.eigenvalues()[j].imag()), 1e-8 * std::abs(es.eigenvalues()[j]));
      re.push_back(es.eigenvalues()[j].real());
    }
    std::sort(re.begin(), re.end());
    for (Eigen::Index j = 0; j < base.eigenvalues().size(); ++j)
      EXPECT_NEAR(re[j] / base.eigenvalues()[j], 1.0, 1e-8) << "lambda " << lambda << " j " << j;
  }
}

TEST(TwistedOperator, FormPairingMatchesApplication) {
  const SectorOperator op(uniform_grid(5, 8.0, 100), 0, 1.0);
  const TwistedOperator<SectorOperator> tw(op, 1.5, make_radial_phi(2.0, 3.0));
  Rng rng(17);
  for (int k = 0; k < 10; ++k) {
    const ComplexVector u = random_unit_vector(op.grid(), rng), v = random_unit_vector(op.grid(), rng);
    // a_{lambda phi}(u, v) = (A e^{-lambda phi} u, e^{lambda phi} v)_W = (A_{lambda phi} u, v)_W.
    const Complex direct = inner_product(op.grid(), tw.apply(u), v);
    const Complex via_form = tw.form(u, v);
    EXPECT_LE(std::abs(direct - via_form), 1e-10 * std::abs(via_form));
  }
}

TEST(TwistedOperator, ZeroTwistIsBaseForm) {
  const auto grid = std::make_shared<BoxGrid>(build_box_grid(5, 6, 2.0));
  const BoxOperator op(grid, 1.0);
  Rng rng(2);
  const ComplexVector u = random_unit_vector(*grid, rng);
  const auto phi = make_phi({1.0, 0.0, 0.0, 0.0, 0.0}, 1.0, 0.3);
  const auto t0 = twisted_form_terms(op, u, 0.0, phi);
  for (const auto& term : t0.terms) EXPECT_EQ(std::abs(term), 0.0);
  EXPECT_LE(std::abs(t0.twisted - t0.base), 1e-14 * std::abs(t0.base));
  // tanh saturates: phi is constant to machine precision, so every term vanishes.
  const double e = 1.0 / std::sqrt(5.0);
  const auto flat = make_phi({e, e, e, e, e}, 1.0, 1e3);
  const auto tc = twisted_form_terms(op, u, 0.7, flat);
  for (const auto& term : tc.terms) EXPECT_LE(std::abs(term), 1e-300);
  EXPECT_LE(std::abs(tc.twisted - tc.base), 1e-12 * std::abs(tc.base));
}

// The discrete product rule differs from the continuum one at O(h^2); the
// residual of the eight-term expansion must shrink under refinement.
TEST(TwistedOperator, TermExpansionResidualShrinksUnderRefinement) {
  const double e = 1.0 / std::sqrt(5.0);
  const auto phi = make_phi({e, e, e, e, e}, 1.0, 0.2);
  std::vector<double> residual;
  for (int m : {8, 12}) {
    const auto grid = std::make_shared<BoxGrid>(build_box_grid(5, m, 3.0));
    const BoxOperator op(grid, 1.0);
    ComplexVector u(grid->size());
    for (Eigen::Index i = 0; i < u.size(); ++i) u[i] = std::exp(-grid->radius(i) * grid->radius(i));
    const auto t = twisted_form_terms(op, u, 1.0, phi);
    residual.push_back(t.discrepancy / std::abs(t.twisted - t.base));
  }
  EXPECT_LT(residual[1], 0.75 * residual[0]);
}

TEST(TwistedOperator, RejectsExponentOverflow) {
  const SectorOperator op(uniform_grid(5, 8.0, 32), 0, 0.0);
  EXPECT_THROW(TwistedOperator<SectorOperator>(op, 400.0, make_radial_phi(1.0, 2.0)), PreconditionError);
}

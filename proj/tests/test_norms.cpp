#include "rellich/rellich.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace rellich;

namespace {

KernelMatrix random_kernel(int n, std::uint64_t seed, bool weighted = true) {
  Rng rng(seed);
  KernelMatrix k;
  k.entries.resize(n, n);
  k.row_weights.resize(n);
  k.column_weights.resize(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) k.entries(i, j) = rng.normal();
  for (int i = 0; i < n; ++i) {
    k.row_weights[i] = weighted ? rng.uniform(0.5, 1.5) : 1.0;
    k.column_weights[i] = weighted ? rng.uniform(0.5, 1.5) : 1.0;
  }
  return k;
}

}  // namespace

TEST(Opnorm, IdentityHasUnitNorms) {
  const int n = 10;
  const KernelMatrix k = kernel_from_nodal_matrix(RealMatrix::Identity(n, n), RealVector::Ones(n));
  for (auto [p, q] : std::vector<std::pair<double, double>>{{1, 1}, {2, 2}, {1, infinity}, {2, infinity}, {infinity, infinity}, {1.5, 3}}) {
    const NormEstimate e = opnorm(k, p, q);
    EXPECT_NEAR(e.lower, 1.0, 1e-12) << p << "->" << q;
    EXPECT_NEAR(e.upper, 1.0, 1e-12) << p << "->" << q;
  }
}

TEST(Opnorm, DiagonalTwoTwoIsMaxEntry) {
  Rng rng(3);
  const int n = 15;
  RealVector d(n), w(n);
  for (int i = 0; i < n; ++i) {
    d[i] = rng.normal();
    w[i] = rng.uniform(0.1, 3.0);
  }
  const KernelMatrix k = kernel_from_nodal_matrix(RealMatrix(d.asDiagonal()), w);
  const NormEstimate e = opnorm(k, 2.0, 2.0);
  EXPECT_TRUE(e.exact);
  EXPECT_NEAR(e.upper, d.cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_NEAR(e.lower, d.cwiseAbs().maxCoeff(), 1e-12);
}

// Closed-form corners written out directly from the kernel entries.
TEST(Opnorm, ExactCornersMatchDirectFormulas) {
  const KernelMatrix k = random_kernel(9, 4);
  const RealMatrix& K = k.entries;
  const RealVector& wr = k.row_weights;
  const RealVector& wc = k.column_weights;
  EXPECT_NEAR(opnorm(k, 1.0, infinity).upper, K.cwiseAbs().maxCoeff(), 1e-12);
  double one_one = 0.0, inf_inf = 0.0, two_inf = 0.0;
  for (int j = 0; j < 9; ++j) one_one = std::max(one_one, (wr.array() * K.col(j).array().abs()).sum());
  for (int i = 0; i < 9; ++i) {
    inf_inf = std::max(inf_inf, (K.row(i).transpose().array().abs() * wc.array()).sum());
    two_inf = std::max(two_inf, std::sqrt((K.row(i).transpose().array().square() * wc.array()).sum()));
  }
  EXPECT_NEAR(opnorm(k, 1.0, 1.0).upper, one_one, 1e-12 * one_one);
  EXPECT_NEAR(opnorm(k, infinity, infinity).upper, inf_inf, 1e-12 * inf_inf);
  EXPECT_NEAR(opnorm(k, 2.0, infinity).upper, two_inf, 1e-12 * two_inf);
  for (auto [p, q] : std::vector<std::pair<double, double>>{{1, 1}, {1, 2}, {2, infinity}, {1, infinity}, {2, 2}}) {
    const NormEstimate e = opnorm(k, p, q);
    EXPECT_TRUE(e.exact);
    EXPECT_LE(std::abs(e.upper - e.lower), 1e-10 * e.upper) << p << "->" << q;
  }
}

TEST(Opnorm, RandomEightByEightAgainstBruteForce) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const KernelMatrix k = random_kernel(8, seed);
    const NormEstimate e = opnorm(k, 1.5, 3.0);
    EXPECT_LE(e.lower, e.upper);
    const auto bf = oracle::brute_force_norm(k.entries, k.row_weights, k.column_weights, 1.5, 3.0, 200000, 4, 3000, 77);
    EXPECT_GE(bf.value, e.lower - 1e-6) << "seed " << seed;
    EXPECT_LE(bf.value, e.upper * (1.0 + 1e-12)) << "seed " << seed;
  }
}

TEST(Opnorm, WitnessReproducesLowerBound) {
  const KernelMatrix k = random_kernel(12, 9);
  for (auto [p, q] : std::vector<std::pair<double, double>>{{1.5, 3}, {10.0 / 9.0, 2}, {2, 10}, {2, 2}, {1, infinity}}) {
    const NormEstimate e = opnorm(k, p, q);
    const double r = oracle::kernel_ratio(k.entries, k.row_weights, k.column_weights, e.witness, p, q);
    EXPECT_NEAR(r, e.lower, 1e-10 * e.lower) << p << "->" << q;
  }
}

// log U is convex along segments in the (1/p, 1/q) plane.
TEST(Opnorm, InterpolatedUpperIsLogConvexAlongSegments) {
  const KernelMatrix k = random_kernel(10, 12);
  const auto corners = corner_norms(k);
  auto upper = [&](double x, double y) { return interpolated_upper(corners, 1.0 / x, y == 0.0 ? infinity : 1.0 / y); };
  const std::vector<std::array<double, 4>> segments = {
      {0.9, 0.3, 0.55, 0.2}, {0.8, 0.6, 0.6, 0.1}, {0.95, 0.5, 0.52, 0.45}};
  for (const auto& s : segments) {
    const double a = std::log(upper(s[0], s[1]));
    const double b = std::log(upper(s[2], s[3]));
    const double m = std::log(upper(0.5 * (s[0] + s[2]), 0.5 * (s[1] + s[3])));
    EXPECT_LE(m, 0.5 * (a + b) + 1e-12);
  }
}

TEST(Opnorm, RejectsDecreasingExponentPair) {
  const KernelMatrix k = random_kernel(5, 1);
  EXPECT_THROW(opnorm(k, 3.0, 2.0), PreconditionError);
  EXPECT_THROW(opnorm(k, 0.5, 2.0), PreconditionError);
}

TEST(Opnorm, ActionOnlyLowerMatchesKernelLower) {
  const KernelMatrix k = random_kernel(10, 21);
  const NormEstimate a = opnorm(k, 1.5, 3.0);
  const NormEstimate b = opnorm(as_operator(k), 1.5, 3.0);
  EXPECT_TRUE(std::isinf(b.upper));
  EXPECT_LE(b.lower, a.upper * (1.0 + 1e-12));
  EXPECT_GT(b.lower, 0.0);
}

TEST(Opnorm, RestrictionToEverythingIsThePlainNorm) {
  const KernelMatrix k = random_kernel(10, 5);
  const RealVector all = RealVector::Ones(10);
  const KernelMatrix r = restrict_kernel(k, all, all);
  EXPECT_EQ(opnorm(r, 1.0, infinity).upper, opnorm(k, 1.0, infinity).upper);
  EXPECT_EQ(opnorm(r, 2.0, 10.0).upper, opnorm(k, 2.0, 10.0).upper);
}

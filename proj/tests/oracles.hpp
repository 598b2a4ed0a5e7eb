#pragma once

// Independent reference computations for the test suite. Nothing here calls
// the library routine it is used to check.

#include "rellich/rellich.hpp"

#include <Eigen/Eigenvalues>

#include <random>
#include <vector>

namespace oracle {

using rellich::RealMatrix;
using rellich::RealVector;

inline double weighted_lp(const RealVector& v, const RealVector& w, double p) {
  if (std::isinf(p)) return v.cwiseAbs().maxCoeff();
  double s = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) s += w[i] * std::pow(std::abs(v[i]), p);
  return std::pow(s, 1.0 / p);
}

/// ||K diag(wc) u||_{q, wr} / ||u||_{p, wc}.
inline double kernel_ratio(const RealMatrix& k, const RealVector& wr, const RealVector& wc, const RealVector& u,
                           double p, double q) {
  const RealVector image = k * wc.cwiseProduct(u);
  return weighted_lp(image, wr, q) / weighted_lp(u, wc, p);
}

struct BruteForceResult {
  double value = 0.0;
  RealVector witness;
};

/// Random directions on the unit p-sphere (Gaussian and sparse draws), then
/// random-perturbation hill climbing from the best few with a shrinking step.
inline BruteForceResult brute_force_norm(const RealMatrix& k, const RealVector& wr, const RealVector& wc, double p,
                                         double q, int directions, int climbs, int climb_steps, unsigned seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_int_distribution<Eigen::Index> pick(0, k.cols() - 1);
  const Eigen::Index n = k.cols();
  std::vector<std::pair<double, RealVector>> best;
  auto consider = [&](const RealVector& u) {
    const double r = kernel_ratio(k, wr, wc, u, p, q);
    if (!std::isfinite(r)) return;
    if (static_cast<int>(best.size()) < climbs) {
      best.emplace_back(r, u);
    } else {
      auto worst = std::min_element(best.begin(), best.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
      if (r > worst->first) *worst = {r, u};
    }
  };
  for (int d = 0; d < directions; ++d) {
    RealVector u(n);
    if (d % 4 == 3) {
      u.setZero();
      for (int j = 0; j < 3; ++j) u[pick(gen)] = normal(gen);
      if (u.cwiseAbs().maxCoeff() == 0.0) u[0] = 1.0;
    } else {
      for (Eigen::Index i = 0; i < n; ++i) u[i] = normal(gen);
    }
    consider(u);
  }
  for (Eigen::Index i = 0; i < n; ++i) consider(RealVector::Unit(n, i));

  BruteForceResult out;
  for (auto& [value, u] : best) {
    double step = 0.5;
    RealVector x = u / weighted_lp(u, wc, p);
    double fx = value;
    for (int s = 0; s < climb_steps && step > 1e-13; ++s) {
      RealVector y = x;
      if (s % 2 == 0) {
        y[pick(gen)] += step * normal(gen);
      } else {
        for (Eigen::Index i = 0; i < n; ++i) y[i] += step * normal(gen) / std::sqrt(static_cast<double>(n));
      }
      const double norm = weighted_lp(y, wc, p);
      if (!(norm > 0.0)) continue;
      y /= norm;
      const double fy = kernel_ratio(k, wr, wc, y, p, q);
      if (fy > fx) {
        x = y;
        fx = fy;
        step *= 1.2;
      } else {
        step *= 0.97;
      }
    }
    // Polish by projected gradient ascent on log ratio with backtracking.
    if (!std::isinf(q) && p > 1.0) {
      double step_g = 0.1;
      for (int it = 0; it < climb_steps; ++it) {
        const RealVector image = k * wc.cwiseProduct(x);
        const double nq = weighted_lp(image, wr, q), np = weighted_lp(x, wc, p);
        RealVector a(image.size()), b(n);
        for (Eigen::Index i = 0; i < image.size(); ++i)
          a[i] = wr[i] * std::pow(std::abs(image[i]), q - 1.0) * (image[i] < 0 ? -1.0 : 1.0);
        for (Eigen::Index j = 0; j < n; ++j) b[j] = wc[j] * std::pow(std::abs(x[j]), p - 1.0) * (x[j] < 0 ? -1.0 : 1.0);
        const RealVector grad = wc.cwiseProduct(k.transpose() * a) / std::pow(nq, q) - b / std::pow(np, p);
        bool moved = false;
        while (step_g > 1e-16) {
          RealVector y = x + step_g * grad / std::max(grad.norm(), 1e-300);
          y /= weighted_lp(y, wc, p);
          const double fy = kernel_ratio(k, wr, wc, y, p, q);
          if (fy > fx) {
            x = y;
            fx = fy;
            step_g *= 1.5;
            moved = true;
            break;
          }
          step_g *= 0.5;
        }
        if (!moved) break;
      }
    }
    if (fx > out.value) {
      out.value = fx;
      out.witness = x;
    }
  }
  return out;
}

/// Smallest eigenvalue of the pencil (P, D), D diagonal positive, by a
/// dense generalized symmetric eigensolver.
inline double smallest_generalized_eigenvalue(const RealMatrix& p, const RealVector& d) {
  Eigen::GeneralizedSelfAdjointEigenSolver<RealMatrix> solver(p, RealMatrix(d.asDiagonal()), Eigen::EigenvaluesOnly);
  return solver.eigenvalues()[0];
}

/// exp(-t S) for symmetric S from its dense eigendecomposition.
inline RealMatrix symmetric_expm(const RealMatrix& s, double t) {
  Eigen::SelfAdjointEigenSolver<RealMatrix> eig(s);
  const RealVector e = (-t * eig.eigenvalues().array()).exp().matrix();
  return eig.eigenvectors() * e.asDiagonal() * eig.eigenvectors().transpose();
}

/// Golden-section free 1-D minimiser: dense sampling plus ternary search,
/// used to cross-check closed-form minimisers.
template <class F>
double ternary_minimize(F f, double lo, double hi, int samples = 2000) {
  double best_x = lo, best_f = f(lo);
  for (int i = 1; i <= samples; ++i) {
    const double x = lo + (hi - lo) * i / samples;
    const double v = f(x);
    if (v < best_f) {
      best_f = v;
      best_x = x;
    }
  }
  double a = std::max(lo, best_x - (hi - lo) / samples), b = std::min(hi, best_x + (hi - lo) / samples);
  for (int it = 0; it < 300; ++it) {
    const double m1 = a + (b - a) / 3.0, m2 = b - (b - a) / 3.0;
    if (f(m1) < f(m2)) b = m2;
    else a = m1;
  }
  return 0.5 * (a + b);
}

}  // namespace oracle

#pragma once

#include "rellich/core.hpp"

#include <functional>
#include <vector>

namespace rellich {

/// Real linear action u -> A u, self-adjoint in the inner product
/// (u, v) = sum_i w_i u_i v_i.
struct WeightedAction {
  std::function<RealVector(const RealVector&)> apply;
  RealVector weights;

  Eigen::Index size() const { return weights.size(); }
  double dot(const RealVector& a, const RealVector& b) const {
    return (weights.array() * a.array() * b.array()).sum();
  }
  double norm(const RealVector& a) const { return std::sqrt(dot(a, a)); }
};

struct KrylovOptions {
  double tolerance = 1e-12;
  int max_dimension = 80;
  int max_restarts = 4096;
};

/// Lanczos tridiagonalization with full reorthogonalization in the weighted
/// inner product. Stops early on breakdown.
struct LanczosBasis {
  std::vector<RealVector> vectors;
  std::vector<double> alpha;
  std::vector<double> beta;  // beta[j] couples vectors j and j+1
  double start_norm = 0.0;

  int dimension() const { return static_cast<int>(alpha.size()); }

  RealMatrix tridiagonal(int m) const {
    RealMatrix t = RealMatrix::Zero(m, m);
    for (int j = 0; j < m; ++j) {
      t(j, j) = alpha[j];
      if (j + 1 < m) t(j, j + 1) = t(j + 1, j) = beta[j];
    }
    return t;
  }
};

class Lanczos {
 public:
  Lanczos(const WeightedAction& op, const RealVector& start) : op_(op) {
    basis_.start_norm = op_.norm(start);
    require(basis_.start_norm > 0.0, "Lanczos start vector is zero");
    basis_.vectors.push_back(start / basis_.start_norm);
  }

  /// Adds one vector; false on invariant-subspace breakdown.
  bool extend() {
    if (broken_) return false;
    const int j = basis_.dimension();
    RealVector w = op_.apply(basis_.vectors[j]);
    const double a = op_.dot(w, basis_.vectors[j]);
    basis_.alpha.push_back(a);
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& v : basis_.vectors) w -= op_.dot(w, v) * v;
    const double b = op_.norm(w);
    basis_.beta.push_back(b);
    const double scale = std::abs(a) + (j > 0 ? basis_.beta[j - 1] : 0.0);
    if (b <= 1e-14 * std::max(scale, 1e-300)) {
      broken_ = true;
      return true;
    }
    basis_.vectors.push_back(w / b);
    return true;
  }

  bool broken() const { return broken_; }
  const LanczosBasis& basis() const { return basis_; }

  /// ||start|| * V_m f(T_m) e_1 together with the a-posteriori estimate
  /// beta_m |e_m^T f(T_m) e_1| ||start||.
  template <class F>
  std::pair<RealVector, double> apply_function(F f) const {
    const int m = basis_.dimension();
    Eigen::SelfAdjointEigenSolver<RealMatrix> eig(basis_.tridiagonal(m));
    RealVector coeff = RealVector::Zero(m);
    for (int k = 0; k < m; ++k) coeff += eig.eigenvectors().col(k) * (f(eig.eigenvalues()[k]) * eig.eigenvectors()(0, k));
    RealVector out = RealVector::Zero(op_.size());
    for (int j = 0; j < m; ++j) out += coeff[j] * basis_.vectors[j];
    out *= basis_.start_norm;
    const double estimate = broken_ ? 0.0 : std::abs(basis_.beta[m - 1] * coeff[m - 1]) * basis_.start_norm;
    return {out, estimate};
  }

  RealVector ritz_values() const {
    Eigen::SelfAdjointEigenSolver<RealMatrix> eig(basis_.tridiagonal(basis_.dimension()), Eigen::EigenvaluesOnly);
    return eig.eigenvalues();
  }

 private:
  const WeightedAction& op_;
  LanczosBasis basis_;
  bool broken_ = false;
};

/// Extremal Ritz values after `steps` Lanczos iterations.
inline std::pair<double, double> lanczos_extremal(const WeightedAction& op, const RealVector& start, int steps) {
  Lanczos lz(op, start);
  for (int j = 0; j < steps && !lz.broken(); ++j) lz.extend();
  const RealVector ritz = lz.ritz_values();
  return {ritz.minCoeff(), ritz.maxCoeff()};
}

/// e^{-tA} v by Lanczos, restarted in time: the interval is split into
/// sub-steps each converging within the subspace budget.
inline RealVector krylov_expm(const WeightedAction& op, const RealVector& v, double t,
                              const KrylovOptions& options = {}) {
  require(t >= 0.0, "krylov_expm needs t >= 0");
  if (t == 0.0 || op.norm(v) == 0.0) return v;
  RealVector x = v;
  double remaining = t;
  // The residual estimate is blind to low modes the subspace has not found yet
  // once e^{-h theta} underflows on every Ritz value, so h is capped a priori:
  // for a spectrum in [0, W] the Lanczos error is below 10 exp(-4 m^2 / (5 W h)).
  const double width = 1.1 * lanczos_extremal(op, v, 30).second;
  const double budget = 0.75 * options.max_dimension;
  const double h_max = 4.0 * budget * budget / (5.0 * width * std::log(10.0 / options.tolerance));
  double step = std::min(t, h_max);
  int restarts = 0;
  while (remaining > 0.0) {
    const double h = std::min(step, remaining);
    Lanczos lz(op, x);
    const double target = options.tolerance * op.norm(x);
    bool converged = false;
    RealVector next;
    for (int m = 1; m <= options.max_dimension; ++m) {
      lz.extend();
      if (m % 4 != 0 && !lz.broken() && m != options.max_dimension) continue;
      auto [value, estimate] = lz.apply_function([h](double theta) { return std::exp(-h * theta); });
      if (estimate <= target) {
        converged = true;
        next = std::move(value);
        break;
      }
      if (lz.broken()) break;
    }
    if (!converged) {
      if (++restarts > options.max_restarts) throw ConvergenceError("krylov_expm: restart budget exhausted");
      step = h / 2.0;
      continue;
    }
    x = std::move(next);
    remaining -= h;
    if (remaining < 1e-15 * t) remaining = 0.0;
  }
  return x;
}

/// f(A) v for a general scalar function by Lanczos, stopping once two
/// successive subspace sizes agree to the tolerance.
template <class F>
RealVector krylov_function(const WeightedAction& op, const RealVector& v, F f, const KrylovOptions& options) {
  Lanczos lz(op, v);
  RealVector previous;
  for (int m = 1; m <= options.max_dimension; ++m) {
    lz.extend();
    if (m % 5 != 0 && !lz.broken() && m != options.max_dimension) continue;
    auto [value, estimate] = lz.apply_function(f);
    if (previous.size() > 0 && op.norm(value - previous) <= options.tolerance * op.norm(value)) return value;
    if (lz.broken()) return value;
    previous = std::move(value);
  }
  throw ConvergenceError("krylov_function: subspace budget exhausted");
}

}  // namespace rellich

#pragma once

#include "rellich/core.hpp"

#include <optional>
#include <vector>

namespace rellich {

/// Symmetric band matrix stored by lower diagonals: band(k)[i] = M(i+k, i).
class SymmetricBand {
 public:
  SymmetricBand(Eigen::Index size, int bandwidth)
      : size_(size), bands_(bandwidth + 1, RealVector::Zero(size)) {}

  Eigen::Index size() const { return size_; }
  int bandwidth() const { return static_cast<int>(bands_.size()) - 1; }
  RealVector& band(int k) { return bands_[k]; }
  const RealVector& band(int k) const { return bands_[k]; }

  double operator()(Eigen::Index i, Eigen::Index j) const {
    if (i < j) std::swap(i, j);
    const auto k = i - j;
    return k > bandwidth() ? 0.0 : bands_[k][j];
  }

  RealVector multiply(const RealVector& x) const {
    RealVector y = bands_[0].cwiseProduct(x);
    for (int k = 1; k <= bandwidth(); ++k)
      for (Eigen::Index j = 0; j + k < size_; ++j) {
        y[j + k] += bands_[k][j] * x[j];
        y[j] += bands_[k][j] * x[j + k];
      }
    return y;
  }

  RealMatrix dense() const {
    RealMatrix m = RealMatrix::Zero(size_, size_);
    for (int k = 0; k <= bandwidth(); ++k)
      for (Eigen::Index j = 0; j + k < size_; ++j) m(j + k, j) = m(j, j + k) = bands_[k][j];
    return m;
  }

 private:
  Eigen::Index size_;
  std::vector<RealVector> bands_;
};

/// Band Cholesky factor L (M = L L^T). Construction fails (nullopt) exactly
/// when a pivot is not positive, i.e. M is not positive definite.
class BandCholesky {
 public:
  static std::optional<BandCholesky> factor(const SymmetricBand& m) {
    BandCholesky c(m);
    const auto n = m.size();
    const int b = m.bandwidth();
    auto& L = c.factor_;
    for (Eigen::Index j = 0; j < n; ++j) {
      double d = L.band(0)[j];
      for (int k = 1; k <= b && j - k >= 0; ++k) d -= L.band(k)[j - k] * L.band(k)[j - k];
      if (!(d > 0.0)) return std::nullopt;
      d = std::sqrt(d);
      L.band(0)[j] = d;
      for (int k = 1; k <= b && j + k < n; ++k) {
        // L(j+k, j) = (M(j+k, j) - sum_l L(j+k, l) L(j, l)) / L(j, j)
        double s = L.band(k)[j];
        for (int l = 1; l + k <= b && j - l >= 0; ++l)
          s -= L.band(k + l)[j - l] * L.band(l)[j - l];
        L.band(k)[j] = s / d;
      }
    }
    return c;
  }

  RealVector solve(RealVector x) const {
    const auto n = factor_.size();
    const int b = factor_.bandwidth();
    for (Eigen::Index i = 0; i < n; ++i) {
      double s = x[i];
      for (int k = 1; k <= b && i - k >= 0; ++k) s -= factor_.band(k)[i - k] * x[i - k];
      x[i] = s / factor_.band(0)[i];
    }
    for (Eigen::Index i = n - 1; i >= 0; --i) {
      double s = x[i];
      for (int k = 1; k <= b && i + k < n; ++k) s -= factor_.band(k)[i] * x[i + k];
      x[i] = s / factor_.band(0)[i];
    }
    return x;
  }

 private:
  explicit BandCholesky(const SymmetricBand& m) : factor_(m) {}
  SymmetricBand factor_;
};

}  // namespace rellich

#pragma once

#include "rellich/banded.hpp"
#include "rellich/grid.hpp"

#include <memory>
#include <optional>
#include <tuple>
#include <vector>

namespace rellich {

/// Spherical-harmonic sector ell of A = Delta^2 - c|x|^-4 on a radial grid.
///
/// The radial Laplacian is assembled in flux form,
///   (W L u)_i = F_{i+1/2}(u_{i+1}-u_i)/(r_{i+1}-r_i) - F_{i-1/2}(u_i-u_{i-1})/(r_i-r_{i-1})
///               - w_i ell(ell+N-2)/r_i^2 u_i,
/// with F = sigma r^{N-1} at the faces, zero flux at the origin and a
/// Dirichlet ghost at the outer radius. The flux matrix W L is symmetric by
/// construction, so L is W-self-adjoint. A is defined through its form
///   a(u, v) = (L u, L v)_W - c (V u, v)_W,
/// which gives A = L^2 - c V.
class SectorOperator {
 public:
  SectorOperator(std::shared_ptr<const RadialGrid> grid, int ell, double coupling)
      : grid_(std::move(grid)), ell_(ell), coupling_(coupling) {
    require(grid_ != nullptr, "sector operator needs a grid");
    require(ell >= 0, "angular index must be non-negative");
    const auto& g = *grid_;
    const auto n = g.size();
    const int N = g.dimension;
    const double sigma = unit_sphere_area(N);
    flux_diag_ = RealVector::Zero(n);
    flux_off_ = RealVector::Zero(n - 1);
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
      const double face = g.faces[i + 1];
      const double k = sigma * std::pow(face, N - 1) / (g.nodes[i + 1] - g.nodes[i]);
      flux_off_[i] = k;
      flux_diag_[i] -= k;
      flux_diag_[i + 1] -= k;
    }
    flux_diag_[n - 1] -= sigma * std::pow(g.outer_radius, N - 1) / (g.outer_radius - g.nodes[n - 1]);
    const double angular = ell * (ell + N - 2.0);
    potential_.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double r = g.nodes[i];
      flux_diag_[i] -= g.weights[i] * angular / (r * r);
      potential_[i] = 1.0 / (r * r * r * r);
    }
    sqrt_weights_ = g.weights.cwiseSqrt();
    definite_ = form_cholesky(0.0).has_value();
  }

  const RadialGrid& grid() const { return *grid_; }
  const std::shared_ptr<const RadialGrid>& grid_ptr() const { return grid_; }
  int dimension() const { return grid_->dimension; }
  int ell() const { return ell_; }
  double coupling() const { return coupling_; }
  Eigen::Index size() const { return grid_->size(); }
  const RealVector& weights() const { return grid_->weights; }
  const RealVector& sqrt_weights() const { return sqrt_weights_; }
  const RealVector& potential() const { return potential_; }

  /// Symmetric tridiagonal flux matrix W L (diagonal and first off-diagonal).
  const RealVector& flux_diagonal() const { return flux_diag_; }
  const RealVector& flux_offdiagonal() const { return flux_off_; }

  /// False when A_h has a non-positive eigenvalue (e.g. c >= C*_h).
  bool positive_definite() const { return definite_; }

  template <class Derived>
  auto apply_laplacian(const Eigen::MatrixBase<Derived>& u) const {
    using Scalar = typename Derived::Scalar;
    const auto n = size();
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> out(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      Scalar s = flux_diag_[i] * u[i];
      if (i > 0) s += flux_off_[i - 1] * u[i - 1];
      if (i + 1 < n) s += flux_off_[i] * u[i + 1];
      out[i] = s / grid_->weights[i];
    }
    return out;
  }

  template <class Derived>
  auto apply(const Eigen::MatrixBase<Derived>& u) const {
    auto lu = apply_laplacian(u);
    auto out = apply_laplacian(lu);
    out -= coupling_ * potential_.cwiseProduct(u.derived()).eval();
    return out;
  }

  /// a_h(u, v) = (L u, L v)_W - c (V u, v)_W.
  Complex form(const ComplexVector& u, const ComplexVector& v) const {
    require(u.size() == size() && v.size() == size(), "form: vector length does not match grid");
    const ComplexVector lu = apply_laplacian(u);
    const ComplexVector lv = apply_laplacian(v);
    Complex s = 0.0;
    for (Eigen::Index i = 0; i < size(); ++i)
      s += grid_->weights[i] * (lu[i] * std::conj(lv[i]) - coupling_ * potential_[i] * u[i] * std::conj(v[i]));
    return s;
  }

  double energy(const ComplexVector& u) const { return form(u, u).real(); }

  /// Dense L.
  RealMatrix laplacian_matrix() const {
    const auto n = size();
    RealMatrix m = RealMatrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      m(i, i) = flux_diag_[i] / grid_->weights[i];
      if (i > 0) m(i, i - 1) = flux_off_[i - 1] / grid_->weights[i];
      if (i + 1 < n) m(i, i + 1) = flux_off_[i] / grid_->weights[i];
    }
    return m;
  }

  /// W^{1/2} L W^{-1/2}, symmetric.
  RealMatrix symmetric_laplacian() const {
    const auto n = size();
    RealMatrix m = RealMatrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      m(i, i) = flux_diag_[i] / grid_->weights[i];
      if (i + 1 < n) m(i, i + 1) = m(i + 1, i) = flux_off_[i] / (sqrt_weights_[i] * sqrt_weights_[i + 1]);
    }
    return m;
  }

  /// W^{1/2} A W^{-1/2} = Ls^2 - c V, symmetric pentadiagonal.
  RealMatrix symmetric_operator() const {
    const RealMatrix ls = symmetric_laplacian();
    RealMatrix s = ls * ls;
    s.diagonal() -= coupling_ * potential_;
    return s;
  }

  /// Pentadiagonal matrix of the form, W^{1/2} S W^{1/2} = (WL) W^{-1} (WL) - c W V,
  /// optionally shifted by -shift * W V (used for Rellich quotients).
  SymmetricBand form_band(double extra_potential = 0.0) const {
    const auto n = size();
    const auto& w = grid_->weights;
    SymmetricBand b(n, 2);
    auto t = [&](Eigen::Index i, Eigen::Index j) -> double {
      if (i == j) return flux_diag_[i];
      if (j == i + 1) return flux_off_[i];
      if (i == j + 1) return flux_off_[j];
      return 0.0;
    };
    for (Eigen::Index j = 0; j < n; ++j)
      for (int k = 0; k <= 2 && j + k < n; ++k) {
        double s = 0.0;
        for (Eigen::Index l = std::max<Eigen::Index>(0, j + k - 1); l <= std::min(n - 1, j + 1); ++l)
          s += t(j + k, l) * t(l, j) / w[l];
        if (k == 0) s -= (coupling_ + extra_potential) * w[j] * potential_[j];
        b.band(k)[j] = s;
      }
    return b;
  }

  /// Non-zero entries (row, col, value) of L.
  std::vector<std::tuple<Eigen::Index, Eigen::Index, double>> laplacian_triplets() const {
    std::vector<std::tuple<Eigen::Index, Eigen::Index, double>> out;
    const auto n = size();
    for (Eigen::Index i = 0; i < n; ++i) {
      if (i > 0) out.emplace_back(i, i - 1, flux_off_[i - 1] / grid_->weights[i]);
      out.emplace_back(i, i, flux_diag_[i] / grid_->weights[i]);
      if (i + 1 < n) out.emplace_back(i, i + 1, flux_off_[i] / grid_->weights[i]);
    }
    return out;
  }

  std::string hash() const {
    Fnv1a h;
    for (char ch : grid_->hash()) h.add(ch);
    h.add(ell_);
    h.add(coupling_);
    return h.hex();
  }

 private:
  std::optional<BandCholesky> form_cholesky(double extra) const {
    // Scale by (W V)^{-1/2} on both sides; positivity is unchanged.
    SymmetricBand b = form_band(extra);
    const RealVector scale = (grid_->weights.cwiseProduct(potential_)).cwiseSqrt().cwiseInverse();
    for (int k = 0; k <= 2; ++k)
      for (Eigen::Index j = 0; j + k < size(); ++j) b.band(k)[j] *= scale[j] * scale[j + k];
    return BandCholesky::factor(b);
  }

  std::shared_ptr<const RadialGrid> grid_;
  int ell_;
  double coupling_;
  RealVector flux_diag_;
  RealVector flux_off_;
  RealVector potential_;
  RealVector sqrt_weights_;
  bool definite_ = false;
};

inline SectorOperator assemble_sector(std::shared_ptr<const RadialGrid> grid, int ell, double coupling) {
  return SectorOperator(std::move(grid), ell, coupling);
}

}  // namespace rellich

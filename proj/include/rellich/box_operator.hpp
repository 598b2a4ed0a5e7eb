#pragma once

#include "rellich/grid.hpp"

#include <memory>
#include <vector>

namespace rellich {

/// A = Delta^2 - c|x|^-4 on a box grid through the form
/// (L u, L v) - c (V u, v) with the (2N+1)-point Laplacian L and zero
/// exterior values. Only matrix-free actions are provided.
class BoxOperator {
 public:
  BoxOperator(std::shared_ptr<const BoxGrid> grid, double coupling)
      : grid_(std::move(grid)), coupling_(coupling) {
    require(grid_ != nullptr, "box operator needs a grid");
    potential_.resize(grid_->size());
    for (Eigen::Index i = 0; i < grid_->size(); ++i) potential_[i] = std::pow(grid_->radius(i), -4);
  }

  const BoxGrid& grid() const { return *grid_; }
  const std::shared_ptr<const BoxGrid>& grid_ptr() const { return grid_; }
  int dimension() const { return grid_->dimension; }
  double coupling() const { return coupling_; }
  Eigen::Index size() const { return grid_->size(); }
  const RealVector& potential() const { return potential_; }
  double weight() const { return grid_->weight(0); }

  template <class Derived>
  auto apply_laplacian(const Eigen::MatrixBase<Derived>& u) const {
    using Scalar = typename Derived::Scalar;
    const auto& g = *grid_;
    const int m = g.per_axis;
    const double inv_h2 = 1.0 / (g.spacing * g.spacing);
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> out = (-2.0 * g.dimension * inv_h2) * u;
    for (int ax = 0; ax < g.dimension; ++ax)
      for_each_line(ax, [&](Eigen::Index base, Eigen::Index stride) {
        for (int k = 0; k < m; ++k) {
          const Eigen::Index node = base + k * stride;
          Scalar s = Scalar(0);
          if (k > 0) s += u[node - stride];
          if (k + 1 < m) s += u[node + stride];
          out[node] += inv_h2 * s;
        }
      });
    return out;
  }

  template <class Derived>
  auto apply(const Eigen::MatrixBase<Derived>& u) const {
    auto out = apply_laplacian(apply_laplacian(u).eval());
    out -= coupling_ * potential_.cwiseProduct(u.derived()).eval();
    return out;
  }

  /// Centred difference along one axis; second-order one-sided at the faces.
  template <class Derived>
  auto gradient(const Eigen::MatrixBase<Derived>& u, int ax) const {
    using Scalar = typename Derived::Scalar;
    const auto& g = *grid_;
    const int m = g.per_axis;
    const double inv_2h = 0.5 / g.spacing;
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> out(u.size());
    for_each_line(ax, [&](Eigen::Index base, Eigen::Index stride) {
      for (int k = 0; k < m; ++k) {
        const Eigen::Index node = base + k * stride;
        if (k == 0)
          out[node] = inv_2h * (-3.0 * u[node] + 4.0 * u[node + stride] - u[node + 2 * stride]);
        else if (k == m - 1)
          out[node] = inv_2h * (3.0 * u[node] - 4.0 * u[node - stride] + u[node - 2 * stride]);
        else
          out[node] = inv_2h * (u[node + stride] - u[node - stride]);
      }
    });
    return out;
  }

  Complex form(const ComplexVector& u, const ComplexVector& v) const {
    require(u.size() == size() && v.size() == size(), "form: vector length does not match grid");
    const ComplexVector lu = apply_laplacian(u);
    const ComplexVector lv = apply_laplacian(v);
    Complex s = 0.0;
    for (Eigen::Index i = 0; i < size(); ++i)
      s += lu[i] * std::conj(lv[i]) - coupling_ * potential_[i] * u[i] * std::conj(v[i]);
    return weight() * s;
  }

  double energy(const ComplexVector& u) const { return form(u, u).real(); }

  /// Dense matrix of A (small grids only, for cross-checks).
  RealMatrix dense_matrix() const {
    require(size() <= 8192, "dense box matrix limited to 8192 nodes");
    RealMatrix a(size(), size());
    RealVector e = RealVector::Zero(size());
    for (Eigen::Index j = 0; j < size(); ++j) {
      e[j] = 1.0;
      a.col(j) = apply(e);
      e[j] = 0.0;
    }
    return a;
  }

  std::string hash() const {
    Fnv1a h;
    for (char ch : grid_->hash()) h.add(ch);
    h.add(coupling_);
    return h.hex();
  }

 private:
  // Calls f(first node, stride) for every grid line parallel to axis ax.
  template <class F>
  void for_each_line(int ax, F f) const {
    const auto& g = *grid_;
    const Eigen::Index stride = g.stride[ax];
    const Eigen::Index block = stride * g.per_axis;
    for (Eigen::Index outer = 0; outer < g.size(); outer += block)
      for (Eigen::Index inner = 0; inner < stride; ++inner) f(outer + inner, stride);
  }

  std::shared_ptr<const BoxGrid> grid_;
  double coupling_;
  RealVector potential_;
};

inline BoxOperator assemble_box(std::shared_ptr<const BoxGrid> grid, double coupling) {
  return BoxOperator(std::move(grid), coupling);
}

}  // namespace rellich

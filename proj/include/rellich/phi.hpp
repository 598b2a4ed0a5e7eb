#pragma once

#include "rellich/grid.hpp"

#include <vector>

namespace rellich {

/// Largest value of |d^2/dt^2 tanh(t)| = 4/(3 sqrt 3).
inline const double tanh_curvature_bound = 4.0 / (3.0 * std::sqrt(3.0));

/// Weight functions phi(x) = s tanh((e.x + b)/s) (planar) or
/// s tanh((|x| - r0)/s) (radial). Planar members satisfy |D^a phi| <= 1 for
/// 1 <= |a| <= 2 whenever |e| = 1 and s >= 4/(3 sqrt 3); |phi| <= s.
struct PhiFamily {
  enum class Kind { planar, radial };

  Kind kind = Kind::planar;
  std::vector<double> direction;  // planar only
  double steepness = 1.0;
  double shift = 0.0;  // b for planar, r0 for radial

  double argument(const double* x, int dim) const {
    if (kind == Kind::radial) {
      double r2 = 0.0;
      for (int k = 0; k < dim; ++k) r2 += x[k] * x[k];
      return (std::sqrt(r2) - shift) / steepness;
    }
    double t = shift;
    for (int k = 0; k < dim; ++k) t += direction[k] * x[k];
    return t / steepness;
  }

  double radial_value(double r) const { return steepness * std::tanh((r - shift) / steepness); }
  double radial_derivative(double r) const {
    const double c = std::cosh((r - shift) / steepness);
    return 1.0 / (c * c);
  }

  /// Analytic bounds: sup|phi|, sup|d phi|, sup|d^2 phi|.
  double value_bound() const { return steepness; }
  double gradient_bound() const {
    if (kind == Kind::radial) return 1.0;
    double m = 0.0;
    for (double e : direction) m = std::max(m, std::abs(e));
    return m;
  }
  double hessian_bound() const {
    const double g = gradient_bound();
    return tanh_curvature_bound / steepness * g * g;
  }
};

inline PhiFamily make_phi(std::vector<double> direction, double steepness, double shift) {
  double norm2 = 0.0;
  for (double e : direction) norm2 += e * e;
  require(!direction.empty() && std::abs(std::sqrt(norm2) - 1.0) <= 1e-12,
          "phi direction must be a unit vector");
  require(steepness >= tanh_curvature_bound,
          "phi steepness below 4/(3 sqrt 3) violates the second-derivative bound");
  PhiFamily phi;
  phi.kind = PhiFamily::Kind::planar;
  phi.direction = std::move(direction);
  phi.steepness = steepness;
  phi.shift = shift;
  return phi;
}

inline PhiFamily make_radial_phi(double steepness, double centre_radius) {
  require(steepness >= tanh_curvature_bound,
          "phi steepness below 4/(3 sqrt 3) violates the second-derivative bound");
  PhiFamily phi;
  phi.kind = PhiFamily::Kind::radial;
  phi.steepness = steepness;
  phi.shift = centre_radius;
  return phi;
}

/// phi sampled at the nodes of a radial grid (radial members only).
inline RealVector evaluate_phi(const PhiFamily& phi, const RadialGrid& grid) {
  require(phi.kind == PhiFamily::Kind::radial, "radial grids support radial phi only");
  RealVector out(grid.size());
  for (Eigen::Index i = 0; i < grid.size(); ++i) out[i] = phi.radial_value(grid.nodes[i]);
  return out;
}

/// Node-wise derivatives of phi on a box grid.
struct PhiSamples {
  RealVector value;
  std::vector<RealVector> gradient;  // one vector per axis
  RealVector laplacian;
  double max_hessian_entry = 0.0;
};

inline PhiSamples evaluate_phi_derivatives(const PhiFamily& phi, const BoxGrid& grid) {
  const int dim = grid.dimension;
  const auto n = grid.size();
  PhiSamples out;
  out.value.resize(n);
  out.laplacian.resize(n);
  out.gradient.assign(dim, RealVector(n));
  std::vector<double> x(dim);
  for (Eigen::Index node = 0; node < n; ++node) {
    for (int ax = 0; ax < dim; ++ax) x[ax] = grid.coordinate(node, ax);
    const double t = phi.argument(x.data(), dim);
    const double th = std::tanh(t);
    const double sech2 = 1.0 - th * th;
    out.value[node] = phi.steepness * th;
    if (phi.kind == PhiFamily::Kind::planar) {
      double e2 = 0.0;
      for (int ax = 0; ax < dim; ++ax) {
        out.gradient[ax][node] = phi.direction[ax] * sech2;
        e2 += phi.direction[ax] * phi.direction[ax];
      }
      const double curvature = -2.0 / phi.steepness * th * sech2;
      out.laplacian[node] = curvature * e2;
      for (int a = 0; a < dim; ++a)
        for (int b = 0; b < dim; ++b)
          out.max_hessian_entry =
              std::max(out.max_hessian_entry, std::abs(curvature * phi.direction[a] * phi.direction[b]));
    } else {
      double r = 0.0;
      for (int ax = 0; ax < dim; ++ax) r += x[ax] * x[ax];
      r = std::sqrt(r);
      const double d1 = sech2;
      const double d2 = -2.0 / phi.steepness * th * sech2;
      for (int ax = 0; ax < dim; ++ax) out.gradient[ax][node] = d1 * x[ax] / r;
      out.laplacian[node] = d2 + (dim - 1) * d1 / r;
      // Hessian = d2 xx^T/r^2 + d1/r (I - xx^T/r^2)
      for (int a = 0; a < dim; ++a)
        for (int b = 0; b < dim; ++b) {
          const double xx = x[a] * x[b] / (r * r);
          const double h = d2 * xx + d1 / r * ((a == b ? 1.0 : 0.0) - xx);
          out.max_hessian_entry = std::max(out.max_hessian_entry, std::abs(h));
        }
    }
  }
  return out;
}

/// Node-wise check of the three membership bounds on a box grid.
inline bool phi_bounds_hold(const PhiFamily& phi, const BoxGrid& grid, double slack = 1e-12) {
  const PhiSamples s = evaluate_phi_derivatives(phi, grid);
  if (s.value.cwiseAbs().maxCoeff() > phi.steepness + slack) return false;
  for (const auto& g : s.gradient)
    if (g.cwiseAbs().maxCoeff() > 1.0 + slack) return false;
  return s.max_hessian_entry <= 1.0 + slack;
}

/// Radial members: |phi'| <= 1, |phi''| <= 1 and the tangential curvature
/// phi'(r)/r <= 1 at every node of the grid.
inline bool phi_bounds_hold(const PhiFamily& phi, const RadialGrid& grid, double slack = 1e-12) {
  require(phi.kind == PhiFamily::Kind::radial, "radial grids support radial phi only");
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    const double r = grid.nodes[i];
    const double d1 = phi.radial_derivative(r);
    const double t = std::tanh((r - phi.shift) / phi.steepness);
    const double d2 = 2.0 / phi.steepness * std::abs(t) * d1;
    if (std::abs(phi.radial_value(r)) > phi.steepness + slack) return false;
    if (d1 > 1.0 + slack || d2 > 1.0 + slack || d1 / r > 1.0 + slack) return false;
  }
  return true;
}

}  // namespace rellich

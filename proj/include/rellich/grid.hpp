#pragma once

#include "rellich/core.hpp"

#include <algorithm>
#include <array>
#include <memory>
#include <vector>

namespace rellich {

enum class Spacing { uniform, log };

inline const char* to_string(Spacing s) { return s == Spacing::uniform ? "uniform" : "log"; }

inline Spacing parse_spacing(const std::string& text) {
  if (text == "uniform") return Spacing::uniform;
  if (text == "log") return Spacing::log;
  throw PreconditionError("unknown spacing mode '" + text + "' (expected uniform|log)");
}

/// Staggered radial discretization of R^N. Node i sits inside the cell
/// [faces[i], faces[i+1]]; faces[0] = 0 so no node touches the origin.
/// Weights carry the measure sigma_{N-1} r^{N-1} dr.
struct RadialGrid {
  int dimension = 5;
  double outer_radius = 1.0;
  Spacing spacing = Spacing::uniform;
  RealVector nodes;
  RealVector faces;
  RealVector widths;
  RealVector weights;

  Eigen::Index size() const { return nodes.size(); }
  double weight(Eigen::Index i) const { return weights[i]; }
  double radius(Eigen::Index i) const { return nodes[i]; }

  /// Largest cell width; the scale h of the reliable time window.
  double resolution() const { return widths.maxCoeff(); }

  std::string hash() const {
    Fnv1a h;
    h.add(dimension);
    h.add(outer_radius);
    h.add(static_cast<int>(spacing));
    h.add(nodes);
    h.add(weights);
    return h.hex();
  }
};

/// Radial grid with n cells on [0, R]. Uniform mode uses n equal cells;
/// log mode uses geometric faces on [inner_ratio * R, R] with the innermost
/// cell extended down to the origin.
inline RadialGrid build_radial_grid(int dimension, double outer_radius, int cells,
                                    Spacing spacing, double inner_ratio = 1e-6) {
  require_dimension(dimension);
  require(outer_radius > 0.0, "outer radius must be positive");
  require(cells >= 4, "radial grid needs at least 4 cells");
  require(inner_ratio > 0.0 && inner_ratio < 1.0, "inner_ratio must lie in (0,1)");

  RadialGrid g;
  g.dimension = dimension;
  g.outer_radius = outer_radius;
  g.spacing = spacing;
  g.faces.resize(cells + 1);
  g.nodes.resize(cells);
  if (spacing == Spacing::uniform) {
    const double delta = outer_radius / cells;
    for (int k = 0; k <= cells; ++k) g.faces[k] = k * delta;
    g.faces[cells] = outer_radius;
    for (int i = 0; i < cells; ++i) g.nodes[i] = (i + 0.5) * delta;
  } else {
    const double inner = inner_ratio * outer_radius;
    const double log_ratio = std::log(outer_radius / inner);
    for (int k = 0; k <= cells; ++k) g.faces[k] = inner * std::exp(log_ratio * k / cells);
    g.faces[cells] = outer_radius;
    for (int i = 0; i < cells; ++i) g.nodes[i] = std::sqrt(g.faces[i] * g.faces[i + 1]);
    g.faces[0] = 0.0;
  }
  g.widths = g.faces.tail(cells) - g.faces.head(cells);
  const double sigma = unit_sphere_area(dimension);
  g.weights.resize(cells);
  for (int i = 0; i < cells; ++i)
    g.weights[i] = sigma * std::pow(g.nodes[i], dimension - 1) * g.widths[i];
  return g;
}

/// Tensor grid of m^N nodes on the cube [-a, a]^N, offset by h/2 from the
/// origin; values outside the cube are zero.
struct BoxGrid {
  int dimension = 5;
  int per_axis = 8;
  double half_width = 1.0;
  double spacing = 0.25;
  std::vector<double> axis;     // node coordinates along one axis
  std::vector<Eigen::Index> stride;  // last axis is contiguous

  Eigen::Index size() const { return stride[0] * per_axis; }
  double weight(Eigen::Index) const { return std::pow(spacing, dimension); }

  int index_along(Eigen::Index node, int ax) const {
    return static_cast<int>((node / stride[ax]) % per_axis);
  }
  double coordinate(Eigen::Index node, int ax) const { return axis[index_along(node, ax)]; }

  double radius(Eigen::Index node) const {
    double r2 = 0.0;
    for (int ax = 0; ax < dimension; ++ax) {
      const double x = coordinate(node, ax);
      r2 += x * x;
    }
    return std::sqrt(r2);
  }

  double resolution() const { return spacing; }

  std::string hash() const {
    Fnv1a h;
    h.add(dimension);
    h.add(per_axis);
    h.add(half_width);
    return h.hex();
  }
};

inline BoxGrid build_box_grid(int dimension, int per_axis, double half_width) {
  require_dimension(dimension);
  require(per_axis >= 4 && per_axis % 2 == 0, "box grid needs an even node count per axis, at least 4");
  require(half_width > 0.0, "box half width must be positive");
  BoxGrid g;
  g.dimension = dimension;
  g.per_axis = per_axis;
  g.half_width = half_width;
  g.spacing = 2.0 * half_width / per_axis;
  g.axis.resize(per_axis);
  for (int i = 0; i < per_axis; ++i) g.axis[i] = (i + 0.5) * g.spacing - half_width;
  g.stride.assign(dimension, 1);
  for (int ax = dimension - 2; ax >= 0; --ax) g.stride[ax] = g.stride[ax + 1] * per_axis;
  const double nodes = std::pow(static_cast<double>(per_axis), dimension);
  require(nodes <= 5e7, "box grid too large");
  return g;
}

/// Complex samples of a function on a grid.
template <class Grid>
class GridFunction {
 public:
  GridFunction(std::shared_ptr<const Grid> grid, ComplexVector values)
      : grid_(std::move(grid)), values_(std::move(values)) {
    require(grid_ != nullptr, "grid function needs a grid");
    require(values_.size() == grid_->size(), "grid function length does not match grid");
  }

  const Grid& grid() const { return *grid_; }
  const std::shared_ptr<const Grid>& grid_ptr() const { return grid_; }
  const ComplexVector& values() const { return values_; }
  Eigen::Index size() const { return values_.size(); }

 private:
  std::shared_ptr<const Grid> grid_;
  ComplexVector values_;
};

/// (sum_i w_i |v_i|^p)^{1/p}, or max_i |v_i| for p = inf.
template <class Grid, class Derived>
double lp_norm(const Grid& grid, const Eigen::MatrixBase<Derived>& values, double p) {
  require(p >= 1.0, "lp_norm requires p >= 1");
  require(values.size() == grid.size(), "lp_norm: length does not match grid");
  if (std::isinf(p)) return values.cwiseAbs().maxCoeff();
  double sum = 0.0;
  for (Eigen::Index i = 0; i < values.size(); ++i)
    sum += grid.weight(i) * std::pow(std::abs(values[i]), p);
  return std::pow(sum, 1.0 / p);
}

template <class Grid>
double lp_norm(const GridFunction<Grid>& u, double p) {
  return lp_norm(u.grid(), u.values(), p);
}

/// Weighted inner product (u, v) = sum_i w_i u_i conj(v_i).
template <class Grid, class A, class B>
auto inner_product(const Grid& grid, const Eigen::MatrixBase<A>& u, const Eigen::MatrixBase<B>& v) {
  using Scalar = decltype(u[0] * v[0]);
  Scalar sum{};
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    if constexpr (std::is_same_v<Scalar, Complex>)
      sum += grid.weight(i) * u[i] * std::conj(v[i]);
    else
      sum += grid.weight(i) * u[i] * v[i];
  }
  return sum;
}

/// Linear interpolation of radial samples at radius r; constant below the
/// first node, zero beyond the outer radius.
template <class Derived>
auto interpolate_radial(const RadialGrid& grid, const Eigen::MatrixBase<Derived>& values, double r) {
  using Scalar = typename Derived::Scalar;
  const auto n = grid.size();
  if (r <= grid.nodes[0]) return Scalar(values[0]);
  if (r >= grid.outer_radius) return Scalar(0);
  if (r >= grid.nodes[n - 1]) {
    const double t = (r - grid.nodes[n - 1]) / (grid.outer_radius - grid.nodes[n - 1]);
    return Scalar((1.0 - t) * values[n - 1]);
  }
  const double* begin = grid.nodes.data();
  const auto upper = std::upper_bound(begin, begin + n, r) - begin;
  const auto lo = upper - 1;
  const double t = (r - grid.nodes[lo]) / (grid.nodes[upper] - grid.nodes[lo]);
  return Scalar((1.0 - t) * values[lo] + t * values[upper]);
}

/// D_s u(x) = u(s x) for s in (0, 1].
inline ComplexVector dilate(const RadialGrid& grid, const ComplexVector& values, double s) {
  require(s > 0.0 && s <= 1.0, "dilation factor must lie in (0, 1]");
  require(values.size() == grid.size(), "dilate: length does not match grid");
  if (s == 1.0) return values;
  ComplexVector out(values.size());
  for (Eigen::Index i = 0; i < values.size(); ++i)
    out[i] = interpolate_radial(grid, values, s * grid.nodes[i]);
  return out;
}

/// Multilinear interpolation version of D_s on a box grid.
inline ComplexVector dilate(const BoxGrid& grid, const ComplexVector& values, double s) {
  require(s > 0.0 && s <= 1.0, "dilation factor must lie in (0, 1]");
  require(values.size() == grid.size(), "dilate: length does not match grid");
  if (s == 1.0) return values;
  const int dim = grid.dimension;
  const int m = grid.per_axis;
  ComplexVector out(values.size());
  std::vector<int> lo(dim);
  std::vector<double> frac(dim);
  for (Eigen::Index node = 0; node < values.size(); ++node) {
    for (int ax = 0; ax < dim; ++ax) {
      // Position in index units; s*x stays inside the node hull for s <= 1.
      const double pos = (s * grid.coordinate(node, ax) + grid.half_width) / grid.spacing - 0.5;
      int base = static_cast<int>(std::floor(pos));
      base = std::clamp(base, 0, m - 2);
      lo[ax] = base;
      frac[ax] = pos - base;
    }
    Complex acc = 0.0;
    for (int corner = 0; corner < (1 << dim); ++corner) {
      double weight = 1.0;
      Eigen::Index idx = 0;
      for (int ax = 0; ax < dim; ++ax) {
        const int bit = (corner >> ax) & 1;
        weight *= bit ? frac[ax] : 1.0 - frac[ax];
        idx += (lo[ax] + bit) * grid.stride[ax];
      }
      if (weight != 0.0) acc += weight * values[idx];
    }
    out[node] = acc;
  }
  return out;
}

template <class Grid>
GridFunction<Grid> dilate(const GridFunction<Grid>& u, double s) {
  return GridFunction<Grid>(u.grid_ptr(), dilate(u.grid(), u.values(), s));
}

}  // namespace rellich

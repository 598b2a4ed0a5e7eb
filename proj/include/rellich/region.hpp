#pragma once

#include "rellich/grid.hpp"

#include <vector>

namespace rellich {

/// Ball B(c, r), axis-aligned box, or origin-centred annulus {a <= |x| <= b}.
struct Region {
  enum class Kind { ball, box, annulus };

  Kind kind = Kind::ball;
  std::vector<double> centre;  // ball
  double radius = 0.0;         // ball
  std::vector<double> lower, upper;  // box
  double inner = 0.0, outer = 0.0;   // annulus

  static Region ball(std::vector<double> centre, double radius) {
    require(radius > 0.0, "ball radius must be positive");
    Region r;
    r.kind = Kind::ball;
    r.centre = std::move(centre);
    r.radius = radius;
    return r;
  }
  static Region box(std::vector<double> lower, std::vector<double> upper) {
    require(lower.size() == upper.size() && !lower.empty(), "box corners must match");
    for (std::size_t k = 0; k < lower.size(); ++k)
      require(lower[k] <= upper[k], "box corners must be ordered");
    Region r;
    r.kind = Kind::box;
    r.lower = std::move(lower);
    r.upper = std::move(upper);
    return r;
  }
  static Region annulus(double inner, double outer) {
    require(inner >= 0.0 && outer > inner, "annulus needs 0 <= a < b");
    Region r;
    r.kind = Kind::annulus;
    r.inner = inner;
    r.outer = outer;
    return r;
  }

  /// Annuli with a hole are not convex; a solid annulus {|x| <= b} is a ball.
  bool convex() const { return kind != Kind::annulus || inner == 0.0; }

  bool contains(const double* x, int dim) const {
    switch (kind) {
      case Kind::ball: {
        double d2 = 0.0;
        for (int k = 0; k < dim; ++k) d2 += (x[k] - centre[k]) * (x[k] - centre[k]);
        return d2 <= radius * radius;
      }
      case Kind::box:
        for (int k = 0; k < dim; ++k)
          if (x[k] < lower[k] || x[k] > upper[k]) return false;
        return true;
      case Kind::annulus: {
        double r2 = 0.0;
        for (int k = 0; k < dim; ++k) r2 += x[k] * x[k];
        const double r = std::sqrt(r2);
        return r >= inner && r <= outer;
      }
    }
    return false;
  }

  /// min and max of e.x over a convex region.
  std::pair<double, double> support(const std::vector<double>& e) const {
    require(convex(), "support function needs a convex region");
    if (kind == Kind::ball) {
      double ec = 0.0, norm2 = 0.0;
      for (std::size_t k = 0; k < e.size(); ++k) {
        ec += e[k] * centre[k];
        norm2 += e[k] * e[k];
      }
      const double reach = radius * std::sqrt(norm2);
      return {ec - reach, ec + reach};
    }
    if (kind == Kind::annulus) {
      double norm2 = 0.0;
      for (double v : e) norm2 += v * v;
      return {-outer * std::sqrt(norm2), outer * std::sqrt(norm2)};
    }
    double lo = 0.0, hi = 0.0;
    for (std::size_t k = 0; k < e.size(); ++k) {
      lo += std::min(e[k] * lower[k], e[k] * upper[k]);
      hi += std::max(e[k] * lower[k], e[k] * upper[k]);
    }
    return {lo, hi};
  }

  /// Euclidean distance between two balls (0 when they meet).
  static double ball_distance(const Region& a, const Region& b) {
    require(a.kind == Kind::ball && b.kind == Kind::ball, "ball_distance needs two balls");
    double d2 = 0.0;
    for (std::size_t k = 0; k < a.centre.size(); ++k)
      d2 += (a.centre[k] - b.centre[k]) * (a.centre[k] - b.centre[k]);
    return std::max(0.0, std::sqrt(d2) - a.radius - b.radius);
  }
};

inline RealVector indicator(const Region& region, const RadialGrid& grid) {
  RealVector chi(grid.size());
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    const double r = grid.nodes[i];
    bool inside = false;
    if (region.kind == Region::Kind::annulus) {
      inside = r >= region.inner && r <= region.outer;
    } else if (region.kind == Region::Kind::ball) {
      for (double c : region.centre)
        require(c == 0.0, "radial grids support only origin-centred balls");
      inside = r <= region.radius;
    } else {
      throw PreconditionError("radial grids do not support box regions");
    }
    chi[i] = inside ? 1.0 : 0.0;
  }
  return chi;
}

inline RealVector indicator(const Region& region, const BoxGrid& grid) {
  RealVector chi(grid.size());
  std::vector<double> x(grid.dimension);
  for (Eigen::Index node = 0; node < grid.size(); ++node) {
    for (int ax = 0; ax < grid.dimension; ++ax) x[ax] = grid.coordinate(node, ax);
    chi[node] = region.contains(x.data(), grid.dimension) ? 1.0 : 0.0;
  }
  return chi;
}

}  // namespace rellich

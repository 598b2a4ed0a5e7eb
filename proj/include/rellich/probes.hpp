#pragma once

#include "rellich/grid.hpp"

#include <vector>

namespace rellich {

namespace detail {

// exp(-a d^2) <= 1e-10 at distance d needs a >= ln(1e10)/d^2.
inline double decay_rate_for(double distance) {
  return std::log(1e10) / (distance * distance);
}

// Cycles Gaussian, polynomial bump, oscillatory profile. Member 0 is the
// Gaussian exp(-|x|^2) whenever the domain is wide enough for it.
template <class RadiusFn>
ComplexVector probe_profile(int member, Rng& rng, Eigen::Index size, double reach, RadiusFn radius) {
  const double min_rate = decay_rate_for(reach);
  ComplexVector u(size);
  const int kind = member % 3;
  if (kind == 0) {
    const double rate = member == 0 ? std::max(1.0, min_rate) : std::max(min_rate, rng.uniform(0.2, 3.0));
    for (Eigen::Index i = 0; i < size; ++i) u[i] = std::exp(-rate * std::pow(radius(i), 2));
  } else if (kind == 1) {
    const double support = reach * rng.uniform(0.3, 0.9);
    for (Eigen::Index i = 0; i < size; ++i) {
      const double t = radius(i) / support;
      u[i] = t < 1.0 ? std::pow(1.0 - t * t, 4) : 0.0;
    }
  } else {
    const double rate = std::max(min_rate, rng.uniform(0.3, 2.0));
    const double wave = rng.uniform(0.5, 4.0);
    for (Eigen::Index i = 0; i < size; ++i) {
      const double r = radius(i);
      u[i] = std::cos(wave * r) * std::exp(-rate * r * r);
    }
  }
  return u;
}

}  // namespace detail

/// Deterministic family of smooth test functions that vanish (to 1e-10)
/// at the outer boundary.
inline std::vector<ComplexVector> probe_functions(const RadialGrid& grid, int count, std::uint64_t seed) {
  require(count >= 1, "probe_functions needs count >= 1");
  std::vector<ComplexVector> out;
  for (int member = 0; member < count; ++member) {
    Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(member));
    out.push_back(detail::probe_profile(member, rng, grid.size(), grid.outer_radius,
                                        [&](Eigen::Index i) { return grid.nodes[i]; }));
  }
  return out;
}

/// Box variant: profiles are centred at random points near the origin.
inline std::vector<ComplexVector> probe_functions(const BoxGrid& grid, int count, std::uint64_t seed) {
  require(count >= 1, "probe_functions needs count >= 1");
  std::vector<ComplexVector> out;
  const int dim = grid.dimension;
  for (int member = 0; member < count; ++member) {
    Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(member));
    std::vector<double> centre(dim, 0.0);
    double offset = 0.0;
    if (member > 0) {
      for (auto& c : centre) {
        c = rng.uniform(-0.15, 0.15) * grid.half_width;
        offset = std::max(offset, std::abs(c));
      }
    }
    const double reach = grid.half_width - offset;
    auto radius = [&](Eigen::Index node) {
      double r2 = 0.0;
      for (int ax = 0; ax < dim; ++ax) {
        const double x = grid.coordinate(node, ax) - centre[ax];
        r2 += x * x;
      }
      return std::sqrt(r2);
    };
    out.push_back(detail::probe_profile(member, rng, grid.size(), reach, radius));
  }
  return out;
}

/// Random complex vector with unit weighted 2-norm.
template <class Grid>
ComplexVector random_unit_vector(const Grid& grid, Rng& rng) {
  ComplexVector u(grid.size());
  for (Eigen::Index i = 0; i < u.size(); ++i) u[i] = Complex(rng.normal(), rng.normal());
  return u / lp_norm(grid, u, 2.0);
}

}  // namespace rellich

#pragma once

#include "rellich/fit.hpp"
#include "rellich/norms.hpp"
#include "rellich/parallel.hpp"
#include "rellich/probes.hpp"
#include "rellich/region.hpp"
#include "rellich/twisted.hpp"

#include <array>
#include <functional>
#include <string>
#include <vector>

namespace rellich {

// ---------------------------------------------------------------- Rellich

/// Smallest generalized eigenvalue of (L u, L u)_W against (|x|^-4 u, u)_W
/// in one sector, by inverse iteration on the band Cholesky factor.
inline double sector_rellich_quotient(const std::shared_ptr<const RadialGrid>& grid, int ell,
                                      int max_iterations = 50000, double tolerance = 1e-14) {
  const SectorOperator op(grid, ell, 0.0);
  const auto n = op.size();
  SymmetricBand band = op.form_band(0.0);
  const RealVector g = grid->weights.cwiseProduct(op.potential());
  const RealVector scale = g.cwiseSqrt().cwiseInverse();
  for (int k = 0; k <= 2; ++k)
    for (Eigen::Index j = 0; j + k < n; ++j) band.band(k)[j] *= scale[j] * scale[j + k];
  const auto chol = BandCholesky::factor(band);
  require(chol.has_value(), "Rellich form matrix is not positive definite");

  // Quotient ||W^{-1/2} (W L) G^{-1/2} x||^2 / ||x||^2 avoids cancellation.
  auto quotient = [&](const RealVector& x) {
    const RealVector y = scale.cwiseProduct(x);
    const auto& d = op.flux_diagonal();
    const auto& o = op.flux_offdiagonal();
    double num = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      double z = d[i] * y[i];
      if (i > 0) z += o[i - 1] * y[i - 1];
      if (i + 1 < n) z += o[i] * y[i + 1];
      num += z * z / grid->weights[i];
    }
    return num / x.squaredNorm();
  };

  RealVector x = RealVector::Ones(n);
  double value = quotient(x);
  for (int it = 0; it < max_iterations; ++it) {
    x = chol->solve(x);
    x.normalize();
    const double next = quotient(x);
    const bool done = std::abs(next - value) <= tolerance * next;
    value = next;
    if (done && it > 10) return value;
  }
  throw ConvergenceError("Rellich inverse iteration did not converge within the iteration budget");
}

struct RellichResult {
  std::vector<double> per_sector;
  double minimum = infinity;
  int minimizing_sector = 0;
  double target = 0.0;
  bool higher_sector_wins() const { return minimizing_sector != 0; }
  double relative_error() const { return std::abs(minimum - target) / target; }
};

inline RellichResult rellich_constant(const std::shared_ptr<const RadialGrid>& grid, int ell_max, int threads = 1) {
  require(ell_max >= 0, "ell_max must be non-negative");
  RellichResult r;
  r.target = rellich_constant_exact(grid->dimension);
  r.per_sector = parallel_map<double>(static_cast<std::size_t>(ell_max + 1), threads,
                                      [&](std::size_t ell) { return sector_rellich_quotient(grid, static_cast<int>(ell)); });
  for (int ell = 0; ell <= ell_max; ++ell)
    if (r.per_sector[ell] < r.minimum) {
      r.minimum = r.per_sector[ell];
      r.minimizing_sector = ell;
    }
  return r;
}

/// 1 - max(c, 0)/C*_h.
inline double coercivity_eta(double coupling, double discrete_rellich) {
  return 1.0 - std::max(coupling, 0.0) / discrete_rellich;
}

// ---------------------------------------------------------------- windows

/// Times where neither the mesh (t ~ h^4) nor the truncation (t ~ R^4)
/// dominates: [(3h)^4, (R/8)^4].
struct TimeWindow {
  double lower = 0.0;
  double upper = 0.0;
  bool contains(double t) const { return t >= lower && t <= upper; }
};

inline TimeWindow reliable_window(double resolution, double outer_radius) {
  return {std::pow(3.0 * resolution, 4), std::pow(outer_radius / 8.0, 4)};
}

// ---------------------------------------------------------------- decay

struct DecayPoint {
  double t = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  bool in_window = true;
};

struct DecayReport {
  double p = 2.0, q = 2.0;
  double target_slope = 0.0;  // -gamma_pq
  TimeWindow window;
  std::vector<DecayPoint> points;
  FitResult fit;
  double relative_slope_error() const { return std::abs(fit.exponent - target_slope) / std::abs(target_slope); }
};

using KernelSource = std::function<KernelMatrix(double)>;

inline DecayReport decay_fit(const KernelSource& kernels, int dimension, double p, double q,
                             const std::vector<double>& t_list, const TimeWindow& window, int threads = 1) {
  require(p <= q, "decay fit needs p <= q");
  DecayReport rep;
  rep.p = p;
  rep.q = q;
  rep.window = window;
  rep.target_slope = -decay_exponent(dimension, p, q);
  rep.points = parallel_map<DecayPoint>(t_list.size(), threads, [&](std::size_t i) {
    const KernelMatrix k = kernels(t_list[i]);
    const NormEstimate e = opnorm(k, p, q);
    return DecayPoint{t_list[i], e.lower, e.upper, window.contains(t_list[i])};
  });
  std::vector<double> ts, ys;
  for (const auto& pt : rep.points)
    if (pt.in_window) {
      ts.push_back(pt.t);
      ys.push_back(pt.upper);
    }
  require(ts.size() >= 5, "decay fit needs at least 5 t-points inside the reliable window");
  rep.fit = power_law_fit(ts, ys);
  return rep;
}

// ---------------------------------------------------------------- off-diagonal

struct OffdiagPoint {
  double distance = 0.0;  // Euclidean distance between E and F
  double t = 0.0;
  double local = 0.0;     // ||chi_F T chi_E||
  double global = 0.0;    // ||T||
  double ratio = 0.0;
  bool underflow = false;
};

struct OffdiagReport {
  double p = 1.0, q = infinity;
  std::vector<OffdiagPoint> points;
  std::vector<FitResult> distance_fits;  // one per t: log(-log ratio) vs log d
  std::vector<FitResult> time_fits;      // one per d: log(-log ratio) vs log t
  FitResult joint;                       // ratio ~ c1 exp(-c2 d^{4/3}/t^{1/3})
  // log(-log ratio) = a + alpha log d + beta log t over all usable points.
  double pooled_distance_exponent = 0.0;
  double pooled_time_exponent = 0.0;
  double pooled_residual = 0.0;  // max |log| misfit of -log ratio
  std::size_t excluded = 0;
};

/// Least squares for y = a + alpha x1 + beta x2; returns (a, alpha, beta).
inline std::array<double, 3> bilinear_regression(const std::vector<double>& x1, const std::vector<double>& x2,
                                                 const std::vector<double>& y) {
  require(x1.size() == y.size() && x2.size() == y.size() && y.size() >= 3, "bilinear regression needs 3+ points");
  RealMatrix design(static_cast<Eigen::Index>(y.size()), 3);
  RealVector rhs(static_cast<Eigen::Index>(y.size()));
  for (std::size_t i = 0; i < y.size(); ++i) {
    design.row(static_cast<Eigen::Index>(i)) << 1.0, x1[i], x2[i];
    rhs[static_cast<Eigen::Index>(i)] = y[i];
  }
  const RealVector c = design.colPivHouseholderQr().solve(rhs);
  return {c[0], c[1], c[2]};
}

/// E = {|x| <= inner_radius}, F_d = {|x| >= d}; the distance is d - inner_radius.
inline OffdiagReport offdiag_fit(const KernelSource& kernels, const RadialGrid& grid, double inner_radius,
                                 const std::vector<double>& outer_starts, const std::vector<double>& t_list,
                                 double p = 1.0, double q = infinity, int threads = 1) {
  OffdiagReport rep;
  rep.p = p;
  rep.q = q;
  const RealVector chi_e = indicator(Region::ball(std::vector<double>(grid.dimension, 0.0), inner_radius), grid);
  const auto per_t = parallel_map<std::vector<OffdiagPoint>>(t_list.size(), threads, [&](std::size_t it) {
    const KernelMatrix k = kernels(t_list[it]);
    const double global = opnorm(k, p, q).upper;
    std::vector<OffdiagPoint> pts;
    for (double d : outer_starts) {
      const RealVector chi_f = indicator(Region::annulus(d, grid.outer_radius), grid);
      const double local = opnorm(restrict_kernel(k, chi_f, chi_e), p, q).upper;
      OffdiagPoint pt;
      pt.distance = d - inner_radius;
      pt.t = t_list[it];
      pt.local = local;
      pt.global = global;
      pt.ratio = local / global;
      pt.underflow = !(local > 1e-300) || pt.ratio >= 1.0;
      pts.push_back(pt);
    }
    return pts;
  });
  for (const auto& v : per_t)
    for (const auto& pt : v) {
      rep.points.push_back(pt);
      if (pt.underflow) ++rep.excluded;
    }
  auto usable = [](const OffdiagPoint& pt) { return !pt.underflow; };
  for (double t : t_list) {
    std::vector<double> x, y;
    for (const auto& pt : rep.points)
      if (pt.t == t && usable(pt)) {
        x.push_back(pt.distance);
        y.push_back(-std::log(pt.ratio));
      }
    if (x.size() >= 2) rep.distance_fits.push_back(power_law_fit(x, y));
  }
  for (double d : outer_starts) {
    std::vector<double> x, y;
    for (const auto& pt : rep.points)
      if (pt.distance == d - inner_radius && usable(pt)) {
        x.push_back(pt.t);
        y.push_back(-std::log(pt.ratio));
      }
    if (x.size() >= 2) rep.time_fits.push_back(power_law_fit(x, y));
  }
  std::vector<double> xi, y;
  for (const auto& pt : rep.points)
    if (usable(pt)) {
      xi.push_back(std::pow(pt.distance, 4.0 / 3.0) / std::cbrt(pt.t));
      y.push_back(pt.ratio);
    }
  if (xi.size() >= 2) rep.joint = stretched_exponential_fit(xi, y);

  std::vector<double> ld, lt, ly;
  for (const auto& pt : rep.points)
    if (usable(pt)) {
      ld.push_back(std::log(pt.distance));
      lt.push_back(std::log(pt.t));
      ly.push_back(std::log(-std::log(pt.ratio)));
    }
  if (ly.size() >= 3) {
    const auto [a, alpha, beta] = bilinear_regression(ld, lt, ly);
    rep.pooled_distance_exponent = alpha;
    rep.pooled_time_exponent = beta;
    for (std::size_t i = 0; i < ly.size(); ++i)
      rep.pooled_residual = std::max(rep.pooled_residual, std::abs(ly[i] - (a + alpha * ld[i] + beta * lt[i])));
  }
  return rep;
}

// ---------------------------------------------------------------- Davies distance

struct DistanceEstimate {
  double euclidean = 0.0;
  double lower = 0.0;  // inf_E phi - sup_F phi for the best phi found
  double bracket_low = 0.0;
  double bracket_high = 0.0;
  PhiFamily best;
};

struct DistanceBudget {
  int directions = 64;
  int refinements = 200;
  std::vector<double> steepness = {1.0, 10.0, 100.0, 1000.0, 10000.0};
  std::uint64_t seed = 1;
};

namespace detail {

inline std::vector<double> region_centre(const Region& r, int dim) {
  if (r.kind == Region::Kind::ball) return r.centre;
  if (r.kind == Region::Kind::box) {
    std::vector<double> c(dim);
    for (int k = 0; k < dim; ++k) c[k] = 0.5 * (r.lower[k] + r.upper[k]);
    return c;
  }
  return std::vector<double>(dim, 0.0);
}

// Golden-section maximisation of a unimodal function on [a, b].
template <class F>
std::pair<double, double> golden_maximize(F f, double a, double b, double tolerance = 1e-12) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  while (std::abs(b - a) > tolerance * (1.0 + std::abs(a) + std::abs(b))) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  const double x = 0.5 * (a + b);
  return {x, f(x)};
}

}  // namespace detail

/// inf_E phi - sup_F phi for phi = s tanh((e.x + b)/s), exact through the
/// support functions of the convex regions.
inline double phi_separation(const Region& e_region, const Region& f_region, const std::vector<double>& e, double s,
                             double b) {
  const double lo_e = e_region.support(e).first;
  const double hi_f = f_region.support(e).second;
  return s * (std::tanh((lo_e + b) / s) - std::tanh((hi_f + b) / s));
}

inline DistanceEstimate davies_distance(const Region& e_region, const Region& f_region, int dimension,
                                        const DistanceBudget& budget = {}) {
  require(e_region.convex() && f_region.convex(), "Davies distance needs convex regions");
  DistanceEstimate est;
  if (e_region.kind == Region::Kind::ball && f_region.kind == Region::Kind::ball)
    est.euclidean = Region::ball_distance(e_region, f_region);
  else
    throw PreconditionError("Euclidean distance implemented for ball pairs only");
  est.bracket_low = est.euclidean;
  est.bracket_high = std::sqrt(static_cast<double>(dimension)) * est.euclidean;

  auto unit = [](std::vector<double> v) {
    double n = 0.0;
    for (double x : v) n += x * x;
    n = std::sqrt(n);
    for (double& x : v) x /= n;
    return v;
  };
  // Best shift b for direction e and steepness s.
  auto best_for = [&](const std::vector<double>& e, double s) {
    const double lo_e = e_region.support(e).first;
    const double hi_f = f_region.support(e).second;
    const double mid = -0.5 * (lo_e + hi_f);
    const double span = std::abs(lo_e - hi_f) + 4.0 * s;
    auto [b, value] = detail::golden_maximize([&](double bb) { return phi_separation(e_region, f_region, e, s, bb); },
                                              mid - span, mid + span);
    return std::make_pair(value, b);
  };

  std::vector<std::vector<double>> candidates;
  const auto ce = detail::region_centre(e_region, dimension);
  const auto cf = detail::region_centre(f_region, dimension);
  std::vector<double> diff(dimension);
  for (int k = 0; k < dimension; ++k) diff[k] = ce[k] - cf[k];
  if (std::any_of(diff.begin(), diff.end(), [](double v) { return v != 0.0; })) candidates.push_back(unit(diff));
  for (int k = 0; k < dimension; ++k)
    for (double sign : {1.0, -1.0}) {
      std::vector<double> e(dimension, 0.0);
      e[k] = sign;
      candidates.push_back(e);
    }
  Rng rng(budget.seed);
  for (int k = 0; k < budget.directions; ++k) {
    std::vector<double> e(dimension);
    for (auto& x : e) x = rng.normal();
    candidates.push_back(unit(e));
  }

  double best_value = 0.0;
  std::vector<double> best_e = candidates.front();
  double best_s = budget.steepness.front(), best_b = 0.0;
  for (const auto& e : candidates)
    for (double s : budget.steepness) {
      auto [value, b] = best_for(e, s);
      if (value > best_value) {
        best_value = value;
        best_e = e;
        best_s = s;
        best_b = b;
      }
    }
  // Local refinement of the direction by shrinking random perturbations.
  double step = 0.2;
  for (int it = 0; it < budget.refinements; ++it) {
    std::vector<double> e = best_e;
    for (auto& x : e) x += step * rng.normal();
    e = unit(e);
    auto [value, b] = best_for(e, best_s);
    if (value > best_value) {
      best_value = value;
      best_e = e;
      best_b = b;
    } else {
      step *= 0.97;
    }
  }
  est.lower = std::max(0.0, best_value);
  est.best = make_phi(best_e, best_s, best_b);
  return est;
}

/// 2^{-1/3}|x-y|^{4/3} - (2r)^{4/3} for balls of common radius r.
inline double remark_lower_bound(double centre_distance, double radius) {
  return std::pow(2.0, -1.0 / 3.0) * std::pow(centre_distance, 4.0 / 3.0) - std::pow(2.0 * radius, 4.0 / 3.0);
}

// ---------------------------------------------------------------- twisted semigroup

struct TwistedDecayPoint {
  double lambda = 0.0;
  double t = 0.0;
  double semigroup_norm = 0.0;  // ||e^{lambda phi} e^{-tA} e^{-lambda phi}||_{2->2}
  double growth_bound = 0.0;    // e^{2 k (1 + lambda^4) t}
  double laplacian_norm = 0.0;  // ||L e^{lambda phi} e^{-tA} e^{-lambda phi}||_{2->2}
  bool contractive_ok = false;
};

struct TwistedDecayReport {
  double k = 0.0;
  double gamma = 0.0;
  double eta = 0.0;
  std::vector<TwistedDecayPoint> points;
  double fitted_constant = 0.0;  // smallest M with the Laplacian bound on all points
  double half_angle = 0.0;       // empirical numerical-range half angle
  double holomorphy_angle = 0.0; // pi/2 - half_angle
  double closed_form_constant = 0.0;
  bool all_contractive() const {
    return std::all_of(points.begin(), points.end(), [](const auto& p) { return p.contractive_ok; });
  }
};

/// 1/sqrt((1 - gamma) eta sin(Theta/4)).
inline double holomorphy_constant(double gamma, double eta, double theta) {
  return 1.0 / std::sqrt((1.0 - gamma) * eta * std::sin(theta / 4.0));
}

inline TwistedDecayReport twisted_decay_suite(const SectorOperator& op, const SpectralDecomposition& d,
                                              const std::vector<double>& lambdas, const PhiFamily& phi,
                                              const std::vector<double>& t_list, double k, double gamma,
                                              double eta, const std::vector<ComplexVector>& angle_samples,
                                              int threads = 1) {
  TwistedDecayReport rep;
  rep.k = k;
  rep.gamma = gamma;
  rep.eta = eta;
  const RealMatrix lap = op.laplacian_matrix();
  struct Job {
    double lambda, t;
  };
  std::vector<Job> jobs;
  for (double l : lambdas)
    for (double t : t_list) jobs.push_back({l, t});
  rep.points = parallel_map<TwistedDecayPoint>(jobs.size(), threads, [&](std::size_t j) {
    const TwistedOperator<SectorOperator> tw(op, jobs[j].lambda, phi);
    const double t = jobs[j].t;
    const RealMatrix semigroup = d.matrix_function([t](double mu) { return std::exp(-t * mu); });
    const RealMatrix twisted = tw.up().asDiagonal() * semigroup * tw.down().asDiagonal();
    TwistedDecayPoint pt;
    pt.lambda = jobs[j].lambda;
    pt.t = t;
    pt.semigroup_norm = weighted_spectral_norm(twisted, op.weights());
    pt.growth_bound = std::exp(2.0 * k * (1.0 + std::pow(pt.lambda, 4)) * t);
    pt.laplacian_norm = weighted_spectral_norm(lap * twisted, op.weights());
    pt.contractive_ok = pt.semigroup_norm <= pt.growth_bound * (1.0 + 1e-12);
    return pt;
  });
  for (const auto& pt : rep.points)
    rep.fitted_constant = std::max(rep.fitted_constant, pt.laplacian_norm * std::sqrt(pt.t) / pt.growth_bound);
  for (double l : lambdas) {
    const TwistedOperator<SectorOperator> tw(op, l, phi);
    rep.half_angle = std::max(rep.half_angle, sector_angle(tw, k, angle_samples).half_angle);
  }
  rep.holomorphy_angle = pi / 2.0 - rep.half_angle;
  rep.closed_form_constant = holomorphy_constant(gamma, eta, rep.holomorphy_angle);
  return rep;
}

// ---------------------------------------------------------------- extrapolation

struct ExtrapolationRow {
  double p = 2.0;
  double t = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  bool in_window = true;
};

struct ExtrapolationReport {
  std::vector<ExtrapolationRow> rows;
  std::vector<double> p_list;
  std::vector<double> spread;  // per p: max/min of the upper bracket over t in the window
};

inline ExtrapolationReport extrapolation_check(const KernelSource& kernels, int dimension,
                                               const std::vector<double>& p_list, const std::vector<double>& t_list,
                                               const TimeWindow& window, int threads = 1) {
  const double p0 = critical_exponent(dimension);
  const double p0d = critical_dual_exponent(dimension);
  for (double p : p_list) require(p >= p0d - 1e-12 && p <= p0 + 1e-12, "extrapolation p must lie in [p0', p0]");
  ExtrapolationReport rep;
  rep.p_list = p_list;
  const auto per_t = parallel_map<std::vector<ExtrapolationRow>>(t_list.size(), threads, [&](std::size_t it) {
    const KernelMatrix k = kernels(t_list[it]);
    std::vector<ExtrapolationRow> rows;
    for (double p : p_list) {
      const NormEstimate e = opnorm(k, p, p);
      rows.push_back({p, t_list[it], e.lower, e.upper, window.contains(t_list[it])});
    }
    return rows;
  });
  for (double p : p_list) {
    double lo = infinity, hi = 0.0;
    for (const auto& rows : per_t)
      for (const auto& r : rows)
        if (r.p == p && r.in_window) {
          lo = std::min(lo, r.upper);
          hi = std::max(hi, r.upper);
        }
    rep.spread.push_back(hi / lo);
  }
  for (std::size_t i = 0; i < p_list.size(); ++i)
    for (const auto& rows : per_t) rep.rows.push_back(rows[i]);
  return rep;
}

// ---------------------------------------------------------------- Riesz

struct RieszRow {
  double p = 2.0;
  double lower = 0.0;
  double upper = 0.0;
};

inline std::vector<RieszRow> riesz_pnorm_sweep(const SectorOperator& op, const SpectralDecomposition& d,
                                               const std::vector<double>& p_list, int threads = 1) {
  const double p0d = critical_dual_exponent(op.dimension());
  for (double p : p_list) require(p > p0d && p <= 2.0, "Riesz sweep needs p in (p0', 2]");
  const KernelMatrix k = kernel_from_nodal_matrix(riesz_matrix(op, d), op.weights());
  return parallel_map<RieszRow>(p_list.size(), threads, [&](std::size_t i) {
    const NormEstimate e = opnorm(k, p_list[i], p_list[i]);
    return RieszRow{p_list[i], e.lower, e.upper};
  });
}

// ---------------------------------------------------------------- parabolic

struct TrajectoryRow {
  double t = 0.0;
  double norm = 0.0;            // ||u(t)||_p
  double laplacian_norm = 0.0;  // ||L u(t)||_p
};

struct Trajectory {
  std::vector<ComplexVector> states;
  std::vector<TrajectoryRow> rows;
};

inline Trajectory solve_parabolic(const SectorOperator& op, const SemigroupEvaluator& evaluator, const ComplexVector& f,
                                  const std::vector<double>& t_grid, double p) {
  require(p > critical_dual_exponent(op.dimension()) && p <= 2.0, "solve_parabolic needs p in (p0', 2]");
  Trajectory out;
  for (double t : t_grid) {
    ComplexVector u = evaluator.apply(t, f);
    out.rows.push_back({t, lp_norm(op.grid(), u, p), lp_norm(op.grid(), op.apply_laplacian(u), p)});
    out.states.push_back(std::move(u));
  }
  return out;
}

// ---------------------------------------------------------------- lambda choice

struct LambdaCheck {
  double lambda_closed = 0.0;
  double lambda_numeric = 0.0;
  double c_omega = 0.0;          // 3/(4 (4 omega)^{1/3})
  double c_omega_numeric = 0.0;  // -min / (d^{4/3} |z|^{-1/3})
  double minimum = 0.0;
  double relative_error() const {
    return std::max(std::abs(lambda_numeric - lambda_closed) / lambda_closed,
                    std::abs(c_omega_numeric - c_omega) / c_omega);
  }
};

/// Minimiser of lambda -> -lambda d + omega lambda^4 |z|, closed form and by
/// golden-section search on an expanding bracket.
inline LambdaCheck lambda_optimizer_check(double omega, double d, double z_abs) {
  require(omega > 0.0 && d > 0.0 && z_abs > 0.0, "lambda optimizer needs omega, d, |z| > 0");
  LambdaCheck c;
  c.lambda_closed = std::cbrt(d / (4.0 * omega * z_abs));
  c.c_omega = 3.0 / (4.0 * std::cbrt(4.0 * omega));
  auto f = [&](double l) { return -l * d + omega * std::pow(l, 4) * z_abs; };
  double hi = 1.0;
  while (f(hi) <= f(0.5 * hi)) hi *= 2.0;
  double lo = 0.0;
  auto [x, value] = detail::golden_maximize([&](double l) { return -f(l); }, lo, hi, 1e-15);
  c.lambda_numeric = x;
  c.minimum = -value;
  c.c_omega_numeric = -c.minimum * std::cbrt(z_abs) / std::pow(d, 4.0 / 3.0);
  return c;
}

}  // namespace rellich

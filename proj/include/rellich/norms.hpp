#pragma once

#include "rellich/spectral.hpp"

#include <functional>
#include <string>
#include <vector>

namespace rellich {

/// Bracket [lower, upper] for ||T||_{L^p_w -> L^q_w}. The lower bound is
/// attained by `witness`; `exact` marks pairs computed by closed formulas.
struct NormEstimate {
  double p = 2.0;
  double q = 2.0;
  double lower = 0.0;
  double upper = infinity;
  bool exact = false;
  RealVector witness;
  std::string method;
};

/// Kernel of a nodal matrix M with respect to the weights: K = M W^{-1}.
inline KernelMatrix kernel_from_nodal_matrix(const RealMatrix& m, const RealVector& weights) {
  KernelMatrix k;
  k.entries = m * weights.cwiseInverse().asDiagonal();
  k.row_weights = weights;
  k.column_weights = weights;
  return k;
}

/// chi_F T chi_E as a rectangular kernel between the selected nodes.
inline KernelMatrix restrict_kernel(const KernelMatrix& k, const RealVector& row_indicator,
                                    const RealVector& column_indicator) {
  std::vector<Eigen::Index> rows, cols;
  for (Eigen::Index i = 0; i < row_indicator.size(); ++i)
    if (row_indicator[i] != 0.0) rows.push_back(i);
  for (Eigen::Index j = 0; j < column_indicator.size(); ++j)
    if (column_indicator[j] != 0.0) cols.push_back(j);
  require(!rows.empty() && !cols.empty(), "restricted kernel would be empty");
  KernelMatrix out;
  out.t = k.t;
  out.entries.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  out.row_weights.resize(out.entries.rows());
  out.column_weights.resize(out.entries.cols());
  for (std::size_t a = 0; a < rows.size(); ++a) out.row_weights[a] = k.row_weights[rows[a]];
  for (std::size_t b = 0; b < cols.size(); ++b) out.column_weights[b] = k.column_weights[cols[b]];
  for (std::size_t b = 0; b < cols.size(); ++b)
    for (std::size_t a = 0; a < rows.size(); ++a) out.entries(a, b) = k.entries(rows[a], cols[b]);
  return out;
}

namespace detail {

inline double inverse_exponent(double p) { return std::isinf(p) ? 0.0 : 1.0 / p; }

inline double weighted_norm(const RealVector& v, const RealVector& w, double p) {
  if (std::isinf(p)) return v.cwiseAbs().maxCoeff();
  double s = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) s += w[i] * std::pow(std::abs(v[i]), p);
  return std::pow(s, 1.0 / p);
}

inline double ratio(const KernelMatrix& k, const RealVector& u, double p, double q) {
  const double nu = weighted_norm(u, k.column_weights, p);
  return nu > 0.0 ? weighted_norm(k.apply(u), k.row_weights, q) / nu : 0.0;
}

// ||T||_{1 -> q}: extreme points of the unit L^1_w ball are delta_j / w_j.
inline std::pair<double, Eigen::Index> one_to_q(const KernelMatrix& k, double q) {
  double best = -1.0;
  Eigen::Index arg = 0;
  for (Eigen::Index j = 0; j < k.entries.cols(); ++j) {
    const double v = weighted_norm(k.entries.col(j), k.row_weights, q);
    if (v > best) {
      best = v;
      arg = j;
    }
  }
  return {best, arg};
}

// ||T||_{p -> inf} = max_i ||K_i.||_{p', w}.
inline std::pair<double, Eigen::Index> p_to_inf(const KernelMatrix& k, double p) {
  const double pd = dual_exponent(p);
  double best = -1.0;
  Eigen::Index arg = 0;
  for (Eigen::Index i = 0; i < k.entries.rows(); ++i) {
    const double v = weighted_norm(k.entries.row(i).transpose(), k.column_weights, pd);
    if (v > best) {
      best = v;
      arg = i;
    }
  }
  return {best, arg};
}

inline RealMatrix weighted_two_two(const KernelMatrix& k) {
  return k.row_weights.cwiseSqrt().asDiagonal() * k.entries * k.column_weights.cwiseSqrt().asDiagonal();
}

}  // namespace detail

/// Exact norm for p = 1, q = inf or p = q = 2, with an attaining witness.
inline std::optional<NormEstimate> exact_norm(const KernelMatrix& k, double p, double q) {
  NormEstimate e;
  e.p = p;
  e.q = q;
  e.exact = true;
  double closed = 0.0;
  if (p == 1.0) {
    auto [value, j] = detail::one_to_q(k, q);
    closed = value;
    e.witness = RealVector::Zero(k.entries.cols());
    e.witness[j] = 1.0 / k.column_weights[j];
    e.method = "exact column";
  } else if (std::isinf(q)) {
    auto [value, i] = detail::p_to_inf(k, p);
    closed = value;
    const RealVector row = k.entries.row(i).transpose();
    e.witness.resize(row.size());
    if (std::isinf(p)) {
      for (Eigen::Index j = 0; j < row.size(); ++j) e.witness[j] = row[j] >= 0.0 ? 1.0 : -1.0;
    } else {
      const double pd = dual_exponent(p);
      for (Eigen::Index j = 0; j < row.size(); ++j)
        e.witness[j] = (row[j] >= 0.0 ? 1.0 : -1.0) * std::pow(std::abs(row[j]), pd - 1.0);
    }
    e.method = "exact row";
  } else if (p == 2.0 && q == 2.0) {
    Eigen::BDCSVD<RealMatrix> svd(detail::weighted_two_two(k), Eigen::ComputeThinV);
    closed = svd.singularValues()[0];
    e.witness = svd.matrixV().col(0).cwiseQuotient(k.column_weights.cwiseSqrt());
    e.method = "exact svd";
  } else {
    return std::nullopt;
  }
  const double nu = detail::weighted_norm(e.witness, k.column_weights, p);
  if (nu > 0.0) e.witness /= nu;
  e.lower = detail::ratio(k, e.witness, p, q);
  e.upper = std::max(closed, e.lower);
  return e;
}

/// One computable corner norm at (1/p, 1/q).
struct CornerNorm {
  double x = 0.0;  // 1/p
  double y = 0.0;  // 1/q
  double value = 0.0;
};

/// Exact corners on the edges p = 1 and q = inf (21 points each) plus (2,2).
inline std::vector<CornerNorm> corner_norms(const KernelMatrix& k) {
  std::vector<CornerNorm> out;
  for (int s = 0; s <= 20; ++s) {
    const double y = s / 20.0;
    const double q = y == 0.0 ? infinity : 1.0 / y;
    out.push_back({1.0, y, detail::one_to_q(k, q).first});
  }
  for (int s = 0; s < 20; ++s) {
    const double x = s / 20.0;
    const double p = x == 0.0 ? infinity : 1.0 / x;
    out.push_back({x, 0.0, detail::p_to_inf(k, p).first});
  }
  out.push_back({0.5, 0.5, Eigen::BDCSVD<RealMatrix>(detail::weighted_two_two(k)).singularValues()[0]});
  return out;
}

/// Riesz-Thorin upper bound: the smallest prod corner^theta over corner
/// pairs and triples whose convex hull contains (1/p, 1/q). This is the
/// lower convex envelope of log-norms, hence log-convex along segments.
inline double interpolated_upper(const std::vector<CornerNorm>& corners, double p, double q) {
  const double x = detail::inverse_exponent(p);
  const double y = detail::inverse_exponent(q);
  const double tol = 1e-12;
  double best = infinity;
  auto logv = [&](std::size_t a) { return std::log(std::max(corners[a].value, 1e-300)); };
  for (std::size_t a = 0; a < corners.size(); ++a) {
    if (std::abs(corners[a].x - x) <= tol && std::abs(corners[a].y - y) <= tol) best = std::min(best, corners[a].value);
    for (std::size_t b = a + 1; b < corners.size(); ++b) {
      // Segment a-b containing the target.
      const double dx = corners[b].x - corners[a].x, dy = corners[b].y - corners[a].y;
      const double len2 = dx * dx + dy * dy;
      if (len2 > 0.0) {
        const double theta = ((x - corners[a].x) * dx + (y - corners[a].y) * dy) / len2;
        const double px = corners[a].x + theta * dx, py = corners[a].y + theta * dy;
        if (theta >= -tol && theta <= 1.0 + tol && std::hypot(px - x, py - y) <= 1e-12) {
          const double th = std::clamp(theta, 0.0, 1.0);
          best = std::min(best, std::exp((1.0 - th) * logv(a) + th * logv(b)));
        }
      }
      for (std::size_t c = b + 1; c < corners.size(); ++c) {
        const double x1 = corners[a].x, y1 = corners[a].y;
        const double det = (corners[b].x - x1) * (corners[c].y - y1) - (corners[c].x - x1) * (corners[b].y - y1);
        if (std::abs(det) < 1e-14) continue;
        const double l2 = ((x - x1) * (corners[c].y - y1) - (corners[c].x - x1) * (y - y1)) / det;
        const double l3 = ((corners[b].x - x1) * (y - y1) - (x - x1) * (corners[b].y - y1)) / det;
        const double l1 = 1.0 - l2 - l3;
        if (l1 < -tol || l2 < -tol || l3 < -tol) continue;
        best = std::min(best, std::exp(std::max(l1, 0.0) * logv(a) + std::max(l2, 0.0) * logv(b) +
                                       std::max(l3, 0.0) * logv(c)));
      }
    }
  }
  return best;
}

/// Matrix-free operator between weighted spaces with its adjoint
/// ((T u, v)_{row} = (u, T* v)_{col}).
struct WeightedOperator {
  std::function<RealVector(const RealVector&)> apply;
  std::function<RealVector(const RealVector&)> adjoint;
  RealVector row_weights;
  RealVector column_weights;
};

inline WeightedOperator as_operator(const KernelMatrix& k) {
  return {[&k](const RealVector& u) -> RealVector { return k.apply(u); },
          [&k](const RealVector& v) -> RealVector {
            return k.entries.transpose() * k.row_weights.cwiseProduct(v);
          },
          k.row_weights, k.column_weights};
}

struct BoydOptions {
  int starts = 8;
  int max_iterations = 500;
  double tolerance = 1e-13;
  std::uint64_t seed = 1;
  std::vector<RealVector> extra_starts;  // original coordinates, tried after the random starts
};

/// Boyd fixed-point ascent for max ||T u||_q / ||u||_p over 1 < p <= q < inf.
/// Returns the best value and its witness (original coordinates, unit L^p_w).
inline std::pair<double, RealVector> boyd_lower_bound(const WeightedOperator& t, double p, double q,
                                                      const BoydOptions& options = {}) {
  require(p > 1.0 && !std::isinf(q), "Boyd iteration needs 1 < p and q < inf");
  const auto& wr = t.row_weights;
  const auto& wc = t.column_weights;
  const double pd = dual_exponent(p);
  const auto n = wc.size();
  // Unweighted B = W_r^{1/q} K W_c^{1-1/p} with x = W_c^{1/p} u.
  const RealVector to_u = wc.array().pow(-1.0 / p);
  const RealVector row_scale = wr.array().pow(1.0 / q);
  auto b_apply = [&](const RealVector& x) -> RealVector { return row_scale.cwiseProduct(t.apply(to_u.cwiseProduct(x))); };
  // B^T y = W_c^{1-1/p} K^T W_r^{1/q} y and K^T z = T*(z / w_r).
  const RealVector col_scale = wc.array().pow(1.0 - 1.0 / p);
  auto bt_apply = [&](const RealVector& y) -> RealVector {
    return col_scale.cwiseProduct(t.adjoint(row_scale.cwiseProduct(y).cwiseQuotient(wr))).cwiseQuotient(wc);
  };
  auto lp = [](const RealVector& v, double e) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) s += std::pow(std::abs(v[i]), e);
    return std::pow(s, 1.0 / e);
  };
  auto signed_power = [](const RealVector& v, double e, RealVector& sign) {
    RealVector out(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      if (v[i] > 0.0)
        sign[i] = 1.0;
      else if (v[i] < 0.0)
        sign[i] = -1.0;
      out[i] = sign[i] * std::pow(std::abs(v[i]), e);
    }
    return out;
  };

  double best = 0.0;
  RealVector best_x = RealVector::Zero(n);
  const int total = options.starts + static_cast<int>(options.extra_starts.size());
  for (int start = 0; start < total; ++start) {
    RealVector x(n);
    if (start < options.starts) {
      Rng rng = Rng::stream(options.seed, static_cast<std::uint64_t>(start));
      for (Eigen::Index i = 0; i < n; ++i) x[i] = rng.normal();
    } else {
      x = options.extra_starts[start - options.starts].cwiseQuotient(to_u);
    }
    if (!(lp(x, p) > 0.0)) continue;
    x /= lp(x, p);
    RealVector ysign = RealVector::Ones(wr.size());
    RealVector xsign = RealVector::Ones(n);
    for (Eigen::Index i = 0; i < n; ++i) xsign[i] = x[i] >= 0.0 ? 1.0 : -1.0;
    double value = lp(b_apply(x), q);
    for (int it = 0; it < options.max_iterations; ++it) {
      const RealVector y = b_apply(x);
      const RealVector dual_y = signed_power(y, q - 1.0, ysign);
      const RealVector z = bt_apply(dual_y);
      RealVector next = signed_power(z, pd - 1.0, xsign);
      const double nn = lp(next, p);
      if (!(nn > 0.0)) break;
      next /= nn;
      const double next_value = lp(b_apply(next), q);
      const bool done = std::abs(next_value - value) <= options.tolerance * std::max(value, 1e-300);
      if (next_value >= value) {
        x = std::move(next);
        value = next_value;
      }
      if (done) break;
    }
    if (value > best) {
      best = value;
      best_x = x;
    }
  }
  return {best, to_u.cwiseProduct(best_x)};
}

/// Bracket for a kernel operator: exact where a closed formula exists,
/// otherwise Boyd lower bound and Riesz-Thorin upper bound.
inline NormEstimate opnorm(const KernelMatrix& k, double p, double q, const BoydOptions& options = {}) {
  require(p >= 1.0 && q >= 1.0, "opnorm needs p, q >= 1");
  require(p <= q, "opnorm supports p <= q only");
  if (auto e = exact_norm(k, p, q)) return *e;
  NormEstimate e;
  e.p = p;
  e.q = q;
  e.upper = interpolated_upper(corner_norms(k), p, q);
  const WeightedOperator op = as_operator(k);
  // The 2->2 maximiser is a good additional start near p = q = 2.
  BoydOptions opts = options;
  opts.extra_starts.push_back(exact_norm(k, 2.0, 2.0)->witness);
  auto [value, witness] = boyd_lower_bound(op, p, q, opts);
  e.witness = witness;
  e.lower = detail::ratio(k, witness, p, q);
  e.method = "boyd + riesz-thorin";
  if (e.lower > e.upper) e.upper = e.lower;  // cannot happen beyond round-off
  return e;
}

/// Action-only operators: lower bound only (upper stays infinite).
inline NormEstimate opnorm(const WeightedOperator& t, double p, double q, const BoydOptions& options = {}) {
  require(p >= 1.0 && q >= 1.0, "opnorm needs p, q >= 1");
  require(p <= q, "opnorm supports p <= q only");
  NormEstimate e;
  e.p = p;
  e.q = q;
  auto [value, witness] = boyd_lower_bound(t, p, q, options);
  e.witness = witness;
  const double nu = detail::weighted_norm(witness, t.column_weights, p);
  e.lower = nu > 0.0 ? detail::weighted_norm(t.apply(witness), t.row_weights, q) / nu : 0.0;
  e.method = "boyd (action only)";
  return e;
}

}  // namespace rellich

#pragma once

#include "rellich/core.hpp"

#include <algorithm>
#include <string>
#include <vector>

namespace rellich {

/// Least-squares fit in log space with its declared data range.
struct FitResult {
  std::string model;  // "power-law" or "stretched-exponential"
  double exponent = 0.0;   // power law: slope; stretched: rate c2
  double prefactor = 0.0;  // c1
  double residual = 0.0;   // max |log(model) - log(data)|
  double range_min = 0.0;
  double range_max = 0.0;
  std::size_t points = 0;
};

namespace detail {

inline std::pair<double, double> linear_regression(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  require(sxx > 0.0, "fit needs at least two distinct abscissae");
  const double slope = sxy / sxx;
  return {slope, my - slope * mx};
}

}  // namespace detail

/// y ~ c x^alpha.
inline FitResult power_law_fit(const std::vector<double>& x, const std::vector<double>& y) {
  require(x.size() == y.size() && x.size() >= 2, "power-law fit needs matching data with >= 2 points");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    require(x[i] > 0.0 && y[i] > 0.0, "power-law fit needs positive data");
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  auto [slope, intercept] = detail::linear_regression(lx, ly);
  FitResult f;
  f.model = "power-law";
  f.exponent = slope;
  f.prefactor = std::exp(intercept);
  for (std::size_t i = 0; i < x.size(); ++i)
    f.residual = std::max(f.residual, std::abs(intercept + slope * lx[i] - ly[i]));
  f.range_min = *std::min_element(x.begin(), x.end());
  f.range_max = *std::max_element(x.begin(), x.end());
  f.points = x.size();
  return f;
}

/// y ~ c1 exp(-c2 xi) with xi = d^{4/3} / t^{1/3} supplied by the caller.
inline FitResult stretched_exponential_fit(const std::vector<double>& xi, const std::vector<double>& y) {
  require(xi.size() == y.size() && xi.size() >= 2, "stretched fit needs matching data with >= 2 points");
  std::vector<double> ly;
  for (double v : y) {
    require(v > 0.0, "stretched fit needs positive data");
    ly.push_back(std::log(v));
  }
  auto [slope, intercept] = detail::linear_regression(xi, ly);
  FitResult f;
  f.model = "stretched-exponential";
  f.exponent = -slope;
  f.prefactor = std::exp(intercept);
  for (std::size_t i = 0; i < xi.size(); ++i)
    f.residual = std::max(f.residual, std::abs(intercept + slope * xi[i] - ly[i]));
  f.range_min = *std::min_element(xi.begin(), xi.end());
  f.range_max = *std::max_element(xi.begin(), xi.end());
  f.points = xi.size();
  return f;
}

inline std::vector<double> geometric_sequence(double first, double last, int count) {
  require(count >= 2 && first > 0.0 && last > 0.0, "geometric sequence needs count >= 2 and positive ends");
  std::vector<double> out(count);
  for (int k = 0; k < count; ++k) out[k] = first * std::pow(last / first, static_cast<double>(k) / (count - 1));
  out.back() = last;
  return out;
}

}  // namespace rellich

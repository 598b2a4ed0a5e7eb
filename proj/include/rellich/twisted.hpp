#pragma once

#include "rellich/box_operator.hpp"
#include "rellich/phi.hpp"
#include "rellich/sector_operator.hpp"

#include <array>
#include <vector>

namespace rellich {

inline RealVector phi_values(const PhiFamily& phi, const RadialGrid& grid) { return evaluate_phi(phi, grid); }
inline RealVector phi_values(const PhiFamily& phi, const BoxGrid& grid) {
  return evaluate_phi_derivatives(phi, grid).value;
}

/// Largest admissible |lambda| max|phi| before the conjugation weights
/// e^{+-lambda phi} risk overflow.
inline constexpr double exponent_clamp = 300.0;

/// A_{lambda phi} = e^{lambda phi} A e^{-lambda phi}, realised as a diagonal
/// conjugation of the base operator.
template <class Op>
class TwistedOperator {
 public:
  TwistedOperator(const Op& base, double lambda, PhiFamily phi)
      : base_(base), lambda_(lambda), phi_(std::move(phi)) {
    phi_nodes_ = phi_values(phi_, base_.grid());
    const double exponent = std::abs(lambda_) * phi_nodes_.cwiseAbs().maxCoeff();
    require(exponent <= exponent_clamp, "twist rejected: |lambda| max|phi| exceeds the exponent clamp 300");
    up_ = (lambda_ * phi_nodes_).array().exp();
    down_ = (-lambda_ * phi_nodes_).array().exp();
  }

  const Op& base() const { return base_; }
  double lambda() const { return lambda_; }
  const PhiFamily& phi() const { return phi_; }
  const RealVector& phi_nodes() const { return phi_nodes_; }
  const RealVector& up() const { return up_; }
  const RealVector& down() const { return down_; }

  ComplexVector apply(const ComplexVector& v) const {
    const ComplexVector inner = down_.cast<Complex>().cwiseProduct(v);
    return up_.cast<Complex>().cwiseProduct(base_.apply(inner));
  }

  /// a_{lambda phi}(u, v) = a_h(e^{-lambda phi} u, e^{lambda phi} v).
  Complex form(const ComplexVector& u, const ComplexVector& v) const {
    return base_.form(down_.cast<Complex>().cwiseProduct(u), up_.cast<Complex>().cwiseProduct(v));
  }

  Complex energy(const ComplexVector& u) const { return form(u, u); }

 private:
  Op base_;
  double lambda_;
  PhiFamily phi_;
  RealVector phi_nodes_;
  RealVector up_;
  RealVector down_;
};

template <class Op>
TwistedOperator<Op> twist(const Op& op, double lambda, const PhiFamily& phi) {
  return TwistedOperator<Op>(op, lambda, phi);
}

/// Dense A_{lambda phi} on a sector (non-symmetric).
inline RealMatrix twisted_dense_matrix(const TwistedOperator<SectorOperator>& tw) {
  const auto& op = tw.base();
  const RealMatrix l = op.laplacian_matrix();
  RealMatrix a = l * l;
  a.diagonal() -= op.coupling() * op.potential();
  return tw.up().asDiagonal() * a * tw.down().asDiagonal();
}

/// Symmetric matrix H with Re a_{lambda phi}(u) = x^T H x for x = W^{1/2} u
/// (real part of u; the imaginary part contributes the same way):
/// H_ij = S_ij cosh(lambda (phi_i - phi_j)).
inline RealMatrix twisted_hermitian_part(const TwistedOperator<SectorOperator>& tw) {
  RealMatrix s = tw.base().symmetric_operator();
  const auto& phi = tw.phi_nodes();
  for (Eigen::Index j = 0; j < s.cols(); ++j)
    for (Eigen::Index i = 0; i < s.rows(); ++i)
      if (s(i, j) != 0.0) s(i, j) *= std::cosh(tw.lambda() * (phi[i] - phi[j]));
  return s;
}

/// Minimum of Re a_{lambda phi}(u)/||u||^2 and a minimiser (original coordinates).
inline std::pair<double, ComplexVector> twisted_real_part_minimum(const TwistedOperator<SectorOperator>& tw) {
  Eigen::SelfAdjointEigenSolver<RealMatrix> eig(twisted_hermitian_part(tw));
  const RealVector x = eig.eigenvectors().col(0);
  const RealVector u = x.cwiseQuotient(tw.base().sqrt_weights());
  return {eig.eigenvalues()[0], u.cast<Complex>()};
}

/// Eight correction terms of a_{lambda phi}(u) - a(u) evaluated with the
/// grid's Laplacian, centred gradients and analytic derivatives of phi.
struct TwistedFormTerms {
  std::array<Complex, 8> terms{};
  Complex sum = 0.0;
  Complex base = 0.0;     // a_h(u)
  Complex twisted = 0.0;  // a_{lambda phi, h}(u)
  double discrepancy = 0.0;  // |twisted - base - sum|
};

inline TwistedFormTerms twisted_form_terms(const BoxOperator& op, const ComplexVector& u, double lambda,
                                           const PhiFamily& phi) {
  const auto& g = op.grid();
  const int dim = g.dimension;
  const double w = op.weight();
  const PhiSamples ps = evaluate_phi_derivatives(phi, g);
  require(std::abs(lambda) * ps.value.cwiseAbs().maxCoeff() <= exponent_clamp,
          "twist rejected: |lambda| max|phi| exceeds the exponent clamp 300");

  const ComplexVector lu = op.apply_laplacian(u);
  ComplexVector dphi_du = ComplexVector::Zero(u.size());  // grad phi . grad u
  RealVector grad2 = RealVector::Zero(u.size());          // |grad phi|^2
  for (int ax = 0; ax < dim; ++ax) {
    const ComplexVector du = op.gradient(u, ax);
    dphi_du += ps.gradient[ax].cast<Complex>().cwiseProduct(du);
    grad2 += ps.gradient[ax].cwiseAbs2();
  }
  const RealVector& lphi = ps.laplacian;

  Complex s1 = 0, s2 = 0, s3 = 0, s4 = 0, s5 = 0, s6 = 0, s7 = 0, s8 = 0;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    const double u2 = std::norm(u[i]);
    const Complex gbar = std::conj(dphi_du[i]);
    s1 += grad2[i] * grad2[i] * u2;
    s2 += lphi[i] * lphi[i] * u2;
    s3 += grad2[i] * gbar * u[i];
    s4 += grad2[i] * u[i] * std::conj(lu[i]);
    s5 += lphi[i] * gbar * u[i];
    s6 += lphi[i] * std::conj(u[i]) * lu[i];
    s7 += std::norm(dphi_du[i]);
    s8 += gbar * lu[i];
  }
  const Complex I(0.0, 1.0);
  const double l2 = lambda * lambda;
  TwistedFormTerms out;
  out.terms = {Complex(l2 * l2 * w * s1.real()),
               Complex(-l2 * w * s2.real()),
               4.0 * l2 * lambda * I * (w * s3).imag(),
               Complex(2.0 * l2 * (w * s4).real()),
               Complex(-4.0 * l2 * (w * s5).real()),
               2.0 * lambda * I * (w * s6).imag(),
               Complex(-4.0 * l2 * w * s7.real()),
               4.0 * lambda * I * (w * s8).imag()};
  for (const auto& t : out.terms) out.sum += t;
  out.base = op.form(u, u);
  out.twisted = TwistedOperator<BoxOperator>(op, lambda, phi).energy(u);
  out.discrepancy = std::abs(out.twisted - out.base - out.sum);
  return out;
}

/// e^{lambda phi} L e^{-lambda phi} w split as
/// (lambda^2 |grad phi|^2 - lambda Delta phi) w - 2 lambda grad phi . grad w + L w,
/// with w = e^{-z A_{lambda phi}} u supplied by the caller.
struct ConjugatedLaplacianTerms {
  ComplexVector potential_term;
  ComplexVector drift_term;
  ComplexVector laplacian_term;
  ComplexVector direct;  // left side evaluated by conjugation
  double discrepancy = 0.0;  // weighted 2-norm of direct - sum of terms
};

inline ConjugatedLaplacianTerms conjugated_laplacian_terms(const BoxOperator& op, const ComplexVector& w,
                                                           double lambda, const PhiFamily& phi) {
  const auto& g = op.grid();
  const PhiSamples ps = evaluate_phi_derivatives(phi, g);
  require(std::abs(lambda) * ps.value.cwiseAbs().maxCoeff() <= exponent_clamp,
          "twist rejected: |lambda| max|phi| exceeds the exponent clamp 300");
  ConjugatedLaplacianTerms out;
  RealVector grad2 = RealVector::Zero(w.size());
  out.drift_term = ComplexVector::Zero(w.size());
  for (int ax = 0; ax < g.dimension; ++ax) {
    out.drift_term += ps.gradient[ax].cast<Complex>().cwiseProduct(op.gradient(w, ax));
    grad2 += ps.gradient[ax].cwiseAbs2();
  }
  out.drift_term *= -2.0 * lambda;
  const RealVector coeff = lambda * lambda * grad2 - lambda * ps.laplacian;
  out.potential_term = coeff.cast<Complex>().cwiseProduct(w);
  out.laplacian_term = op.apply_laplacian(w);
  const RealVector up = (lambda * ps.value).array().exp();
  const RealVector down = (-lambda * ps.value).array().exp();
  out.direct = up.cast<Complex>().cwiseProduct(op.apply_laplacian(down.cast<Complex>().cwiseProduct(w)));
  const ComplexVector diff = out.direct - out.potential_term - out.drift_term - out.laplacian_term;
  out.discrepancy = lp_norm(g, diff, 2.0);
  return out;
}

/// Constants of the twisted-form inequality obtained from a free epsilon:
/// gamma = 9 eps^2 / eta, k = 18 N^2 eps^-6.
struct FormeConstants {
  double epsilon = 0.0;
  double gamma = 0.0;
  double k = 0.0;
};

inline FormeConstants forme_constants(int dimension, double eta, double epsilon) {
  require(eta > 0.0 && eta <= 1.0, "eta must lie in (0, 1]");
  require(epsilon > 0.0, "epsilon must be positive");
  return {epsilon, 9.0 * epsilon * epsilon / eta, 18.0 * dimension * dimension * std::pow(epsilon, -6)};
}

/// Epsilon that makes gamma = 9 eps^2 / eta equal to the requested value.
inline double forme_epsilon(double eta, double gamma) { return std::sqrt(gamma * eta / 9.0); }

struct FormeSample {
  ComplexVector u;
  double lambda = 0.0;
  PhiFamily phi;
};

struct FormeViolation {
  std::size_t index = 0;
  double lambda = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
};

struct FormeReport {
  double gamma = 0.0;
  double k = 0.0;
  std::size_t samples = 0;
  std::vector<double> lhs, energy, mass, required_k;
  std::vector<FormeViolation> violations;
  double empirical_k = 0.0;  // smallest k that makes every sample pass at this gamma

  bool all_pass() const { return violations.empty(); }
};

/// |a_{lambda phi}(u) - a(u)| <= gamma a(u) + k (1 + lambda^4) ||u||^2 on each sample.
template <class Op>
FormeReport forme_inequality_check(const Op& op, const std::vector<FormeSample>& samples, double gamma,
                                   double k) {
  require(gamma > 0.0 && gamma < 1.0, "gamma must lie in (0, 1)");
  FormeReport report;
  report.gamma = gamma;
  report.k = k;
  report.samples = samples.size();
  for (std::size_t s = 0; s < samples.size(); ++s) {
    const auto& sample = samples[s];
    const double base = op.energy(sample.u);
    const Complex tw = TwistedOperator<Op>(op, sample.lambda, sample.phi).energy(sample.u);
    const double lhs = std::abs(tw - base);
    const double mass = std::pow(lp_norm(op.grid(), sample.u, 2.0), 2);
    const double growth = 1.0 + std::pow(sample.lambda, 4);
    const double rhs = gamma * base + k * growth * mass;
    const double needed = std::max(0.0, (lhs - gamma * base) / (growth * mass));
    report.lhs.push_back(lhs);
    report.energy.push_back(base);
    report.mass.push_back(mass);
    report.required_k.push_back(needed);
    report.empirical_k = std::max(report.empirical_k, needed);
    if (lhs > rhs) report.violations.push_back({s, sample.lambda, lhs, rhs});
  }
  return report;
}

/// Sampled numerical range of A_{lambda phi} + 2k(1 + lambda^4).
struct NumericalRangeEstimate {
  double shift = 0.0;
  std::vector<Complex> quotients;
  double half_angle = 0.0;
  double min_real_part = infinity;

  double holomorphy_margin() const { return pi / 2.0 - half_angle; }
};

template <class Op>
NumericalRangeEstimate sector_angle(const TwistedOperator<Op>& tw, double k, const std::vector<ComplexVector>& samples) {
  NumericalRangeEstimate est;
  est.shift = 2.0 * k * (1.0 + std::pow(tw.lambda(), 4));
  for (const auto& u : samples) {
    const double mass = std::pow(lp_norm(tw.base().grid(), u, 2.0), 2);
    if (!(mass > 0.0)) continue;
    const Complex q = tw.energy(u) / mass + est.shift;
    est.quotients.push_back(q);
    est.half_angle = std::max(est.half_angle, std::abs(std::arg(q)));
    est.min_real_part = std::min(est.min_real_part, q.real());
  }
  return est;
}

}  // namespace rellich

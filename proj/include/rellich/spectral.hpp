#pragma once

#include "rellich/box_operator.hpp"
#include "rellich/krylov.hpp"
#include "rellich/sector_operator.hpp"

#include <memory>
#include <optional>
#include <variant>

namespace rellich {

/// Eigenpairs of a W-self-adjoint matrix A, stored through the symmetric
/// form S = W^{1/2} A W^{-1/2} = Y diag(mu) Y^T. Eigenvectors of A are
/// q_j = W^{-1/2} y_j and are W-orthonormal.
class SpectralDecomposition {
 public:
  SpectralDecomposition(const RealMatrix& symmetric, RealVector sqrt_weights, std::string source_hash)
      : sqrt_weights_(std::move(sqrt_weights)), source_hash_(std::move(source_hash)) {
    require(symmetric.rows() == symmetric.cols() && symmetric.rows() == sqrt_weights_.size(),
            "eigendecompose: matrix and weights disagree in size");
    Eigen::SelfAdjointEigenSolver<RealMatrix> eig(symmetric);
    if (eig.info() != Eigen::Success) throw ConvergenceError("eigendecompose: symmetric eigensolver failed");
    values_ = eig.eigenvalues();
    basis_ = eig.eigenvectors();
  }

  /// Precomputed ascending eigenvalues and orthonormal symmetric basis.
  SpectralDecomposition(RealVector values, RealMatrix basis, RealVector sqrt_weights, std::string source_hash)
      : values_(std::move(values)), basis_(std::move(basis)), sqrt_weights_(std::move(sqrt_weights)),
        source_hash_(std::move(source_hash)) {
    require(basis_.rows() == basis_.cols() && basis_.cols() == values_.size() && values_.size() == sqrt_weights_.size(),
            "eigendecompose: basis, values and weights disagree in size");
  }

  Eigen::Index size() const { return values_.size(); }
  const RealVector& eigenvalues() const { return values_; }
  const RealMatrix& symmetric_basis() const { return basis_; }
  const RealVector& sqrt_weights() const { return sqrt_weights_; }
  const std::string& source_hash() const { return source_hash_; }

  RealVector eigenvector(Eigen::Index j) const { return basis_.col(j).cwiseQuotient(sqrt_weights_); }

  /// f(A) u = W^{-1/2} Y f(mu) Y^T W^{1/2} u.
  template <class F>
  ComplexVector apply_function(F f, const ComplexVector& u) const {
    require(u.size() == size(), "spectral apply: length does not match");
    const ComplexVector x = sqrt_weights_.cast<Complex>().cwiseProduct(u);
    ComplexVector c = basis_.transpose() * x;
    for (Eigen::Index j = 0; j < size(); ++j) c[j] *= Complex(f(values_[j]));
    ComplexVector out = basis_ * c;
    return out.cwiseQuotient(sqrt_weights_.cast<Complex>());
  }

  /// Kernel of f(A) with respect to the weighted measure:
  /// W^{-1/2} Y f(mu) Y^T W^{-1/2}.
  template <class F>
  RealMatrix kernel_function(F f) const {
    RealMatrix scaled = basis_;
    for (Eigen::Index j = 0; j < size(); ++j) scaled.col(j) *= f(values_[j]);
    RealMatrix k = scaled * basis_.transpose();
    return sqrt_weights_.cwiseInverse().asDiagonal() * k * sqrt_weights_.cwiseInverse().asDiagonal();
  }

  /// Matrix of f(A) acting on nodal values: W^{-1/2} Y f(mu) Y^T W^{1/2}.
  template <class F>
  RealMatrix matrix_function(F f) const {
    RealMatrix scaled = basis_;
    for (Eigen::Index j = 0; j < size(); ++j) scaled.col(j) *= f(values_[j]);
    RealMatrix m = scaled * basis_.transpose();
    return sqrt_weights_.cwiseInverse().asDiagonal() * m * sqrt_weights_.asDiagonal();
  }

  /// max_j ||A q_j - mu_j q_j||_W for a W-self-adjoint action.
  template <class Apply>
  double max_residual(Apply apply) const {
    double worst = 0.0;
    for (Eigen::Index j = 0; j < size(); ++j) {
      const RealVector q = eigenvector(j);
      const RealVector r = apply(q) - values_[j] * q;
      worst = std::max(worst, r.cwiseProduct(sqrt_weights_).norm());
    }
    return worst;
  }

  /// ||Q^T W Q - I||_max.
  double orthonormality_error() const {
    RealMatrix q = sqrt_weights_.cwiseInverse().asDiagonal() * basis_;
    RealMatrix g = q.transpose() * sqrt_weights_.cwiseAbs2().asDiagonal() * q;
    g.diagonal().array() -= 1.0;
    return g.cwiseAbs().maxCoeff();
  }

 private:
  RealVector values_;
  RealMatrix basis_;
  RealVector sqrt_weights_;
  std::string source_hash_;
};

/// Eigenpairs of S = B^2 - cV, B = W^{1/2} L W^{-1/2}, through S = B M B
/// with M = I - c B^{-1} V B^{-1}. The SVD of F = M^{-1/2} B^{-1}
/// (S^{-1} = F^T F) resolves the small eigenvalues to relative accuracy,
/// which a solver applied to S itself (condition ~ h^{-4}) cannot. Falls
/// back to the direct solver when M is not positive definite.
inline SpectralDecomposition eigendecompose(const SectorOperator& op) {
  require(op.size() <= 8192, "dense eigendecomposition limited to 8192 nodes");
  const Eigen::Index n = op.size();
  const RealVector& sw = op.sqrt_weights();
  RealMatrix b = sw.asDiagonal() * op.laplacian_matrix() * sw.cwiseInverse().asDiagonal();
  b = 0.5 * (b + b.transpose()).eval();
  const Eigen::PartialPivLU<RealMatrix> lu(b);
  RealMatrix b_inv = lu.inverse();
  b_inv = 0.5 * (b_inv + b_inv.transpose()).eval();
  RealMatrix m = RealMatrix::Identity(n, n);
  if (op.coupling() != 0.0) m -= op.coupling() * b_inv * op.potential().asDiagonal() * b_inv;
  m = 0.5 * (m + m.transpose()).eval();
  const Eigen::SelfAdjointEigenSolver<RealMatrix> em(m);
  if (em.info() != Eigen::Success || !(em.eigenvalues()[0] > 0.0) || !b_inv.allFinite())
    return SpectralDecomposition(op.symmetric_operator(), sw, op.hash());
  const RealMatrix m_inv_sqrt =
      em.eigenvectors() * em.eigenvalues().cwiseInverse().cwiseSqrt().asDiagonal() * em.eigenvectors().transpose();
  const Eigen::BDCSVD<RealMatrix> svd(m_inv_sqrt * b_inv, Eigen::ComputeFullV);
  if (svd.info() != Eigen::Success) throw ConvergenceError("eigendecompose: SVD failed");
  // Singular values descend, so mu = s^{-2} ascends.
  return SpectralDecomposition(svd.singularValues().cwiseAbs2().cwiseInverse(), svd.matrixV(), sw, op.hash());
}

/// Weighted action of a box operator for the Krylov routines.
inline WeightedAction weighted_action(const BoxOperator& op) {
  return {[&op](const RealVector& u) -> RealVector { return op.apply(u); },
          RealVector::Constant(op.size(), op.weight())};
}

inline WeightedAction weighted_action(const SectorOperator& op) {
  return {[&op](const RealVector& u) -> RealVector { return op.apply(u); }, op.weights()};
}

/// Smallest and largest eigenvalue of a box operator from Lanczos Ritz values.
inline std::pair<double, double> box_extremal_eigenvalues(const BoxOperator& op, int steps = 120,
                                                          std::uint64_t seed = 1) {
  Rng rng(seed);
  RealVector start(op.size());
  for (Eigen::Index i = 0; i < start.size(); ++i) start[i] = rng.normal();
  return lanczos_extremal(weighted_action(op), start, steps);
}

/// Positive lower and upper spectral bounds used to size quadrature ranges.
struct SpectralBounds {
  double lower = 0.0;
  double upper = 0.0;
};

/// e^{-zA} either by dense spectral calculus (complex z) or by a Krylov
/// applicator on a box operator (real t only).
class SemigroupEvaluator {
 public:
  static SemigroupEvaluator spectral(std::shared_ptr<const SpectralDecomposition> decomposition) {
    require(decomposition != nullptr, "spectral evaluator needs a decomposition");
    SemigroupEvaluator e;
    e.decomposition_ = std::move(decomposition);
    return e;
  }

  static SemigroupEvaluator krylov(WeightedAction action, KrylovOptions options = {}) {
    SemigroupEvaluator e;
    e.action_ = std::move(action);
    e.options_ = options;
    return e;
  }

  bool is_spectral() const { return decomposition_ != nullptr; }
  const SpectralDecomposition& decomposition() const {
    require(is_spectral(), "evaluator has no spectral decomposition");
    return *decomposition_;
  }
  const KrylovOptions& krylov_options() const { return options_; }
  const RealVector& weights() const { return is_spectral() ? weights_cache() : action_.weights; }
  const WeightedAction& action() const { return action_; }
  Eigen::Index size() const { return is_spectral() ? decomposition_->size() : action_.size(); }

  std::string route() const { return is_spectral() ? "spectral" : "krylov"; }

  ComplexVector apply(Complex z, const ComplexVector& u) const {
    require(z.real() >= 0.0, "semigroup needs Re z >= 0");
    if (is_spectral())
      return decomposition_->apply_function([z](double mu) { return std::exp(-z * mu); }, u);
    require(z.imag() == 0.0, "complex time is supported on spectral (sector) evaluators only");
    const double t = z.real();
    const RealVector re = krylov_expm(action_, u.real(), t, options_);
    const RealVector im = u.imag().isZero(0.0) ? RealVector::Zero(u.size()) : krylov_expm(action_, u.imag(), t, options_);
    ComplexVector out(u.size());
    out.real() = re;
    out.imag() = im;
    return out;
  }

 private:
  const RealVector& weights_cache() const {
    if (weights_.size() == 0) weights_ = decomposition_->sqrt_weights().cwiseAbs2();
    return weights_;
  }

  std::shared_ptr<const SpectralDecomposition> decomposition_;
  WeightedAction action_;
  KrylovOptions options_;
  mutable RealVector weights_;
};

inline ComplexVector semigroup_apply(const SemigroupEvaluator& evaluator, Complex z, const ComplexVector& u) {
  return evaluator.apply(z, u);
}

/// Kernel of e^{-tA} with respect to the weighted measure:
/// (e^{-tA} u)_i = sum_j K_ij w_j u_j. Box kernels hold selected columns.
struct KernelMatrix {
  double t = 0.0;
  RealMatrix entries;
  RealVector row_weights;
  RealVector column_weights;
  std::vector<Eigen::Index> columns;  // empty: all columns

  RealVector apply(const RealVector& u) const { return entries * column_weights.cwiseProduct(u); }

  double symmetry_error() const {
    require(entries.rows() == entries.cols(), "symmetry check needs a square kernel");
    const double scale = entries.cwiseAbs().maxCoeff();
    return scale == 0.0 ? 0.0 : (entries - entries.transpose()).cwiseAbs().maxCoeff() / scale;
  }
};

inline KernelMatrix semigroup_kernel(const SemigroupEvaluator& evaluator, double t,
                                     const std::vector<Eigen::Index>& columns = {}) {
  require(t >= 0.0, "semigroup kernel needs t >= 0");
  KernelMatrix k;
  k.t = t;
  k.row_weights = evaluator.weights();
  if (evaluator.is_spectral()) {
    require(columns.empty(), "sector kernels are always full");
    k.entries = evaluator.decomposition().kernel_function([t](double mu) { return std::exp(-t * mu); });
    k.column_weights = k.row_weights;
    return k;
  }
  require(!columns.empty() || evaluator.size() <= 100000,
          "full kernel on box grids above 1e5 nodes rejected; request columns");
  std::vector<Eigen::Index> cols = columns;
  if (cols.empty())
    for (Eigen::Index j = 0; j < evaluator.size(); ++j) cols.push_back(j);
  k.columns = cols;
  k.entries.resize(evaluator.size(), static_cast<Eigen::Index>(cols.size()));
  k.column_weights.resize(static_cast<Eigen::Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) {
    RealVector delta = RealVector::Zero(evaluator.size());
    delta[cols[c]] = 1.0 / k.row_weights[cols[c]];
    k.entries.col(static_cast<Eigen::Index>(c)) = krylov_expm(evaluator.action(), delta, t, evaluator.krylov_options());
    k.column_weights[static_cast<Eigen::Index>(c)] = k.row_weights[cols[c]];
  }
  return k;
}

/// e^{-M} for symmetric M by scaling and squaring of a Taylor polynomial.
/// Entry-wise it keeps small far-off-diagonal values of heat kernels with
/// good relative accuracy, unlike the eigenvector sum.
inline RealMatrix expm_squaring(const RealMatrix& m) {
  const double norm = m.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  if (norm > 0.25) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.25)));
  const RealMatrix scaled = -m / std::ldexp(1.0, squarings);
  const auto n = m.rows();
  RealMatrix result = RealMatrix::Identity(n, n);
  RealMatrix term = RealMatrix::Identity(n, n);
  for (int k = 1; k <= 18; ++k) {
    term = term * scaled / static_cast<double>(k);
    result += term;
    if (term.cwiseAbs().maxCoeff() < 1e-18 * result.cwiseAbs().maxCoeff()) break;
  }
  for (int s = 0; s < squarings; ++s) result = result * result;
  return result;
}

/// Sector kernel of e^{-tA} computed by scaling and squaring.
inline KernelMatrix squaring_kernel(const SectorOperator& op, double t) {
  require(t >= 0.0, "semigroup kernel needs t >= 0");
  require(op.size() <= 8192, "dense kernel limited to 8192 nodes");
  KernelMatrix k;
  k.t = t;
  k.row_weights = op.weights();
  k.column_weights = op.weights();
  const RealMatrix e = expm_squaring(t * op.symmetric_operator());
  const RealVector inv = op.sqrt_weights().cwiseInverse();
  k.entries = inv.asDiagonal() * e * inv.asDiagonal();
  k.entries = 0.5 * (k.entries + k.entries.transpose()).eval();
  return k;
}

enum class InvSqrtRoute { spectral, quadrature };

/// Trapezoid nodes for A^{-1/2} = pi^{-1/2} int_R e^{s/2} e^{-e^s A} ds.
struct InvSqrtQuadrature {
  double s_min = 0.0;
  double s_max = 0.0;
  int nodes = 200;

  double step() const { return (s_max - s_min) / (nodes - 1); }
  double node(int k) const { return s_min + k * step(); }
  double weight(int k) const {
    const double end = (k == 0 || k == nodes - 1) ? 0.5 : 1.0;
    return end * step() * std::exp(0.5 * node(k)) / std::sqrt(pi);
  }

  /// Scalar version applied to one eigenvalue.
  double evaluate(double mu) const {
    double sum = 0.0;
    for (int k = 0; k < nodes; ++k) sum += weight(k) * std::exp(-std::exp(node(k)) * mu);
    return sum;
  }
};

/// Range from spectral bounds: the head int_0^{t_min} t^{-1/2} dt and the
/// tail beyond 40/mu_1 both stay below 1e-8 relative.
inline InvSqrtQuadrature make_inv_sqrt_quadrature(const SpectralBounds& bounds, int nodes = 200) {
  require(bounds.lower > 0.0, "A^{-1/2} needs a positive definite operator (mu_1 > 0)");
  require(bounds.upper >= bounds.lower, "spectral bounds are inverted");
  require(nodes >= 3, "quadrature needs at least 3 nodes");
  InvSqrtQuadrature q;
  q.nodes = nodes;
  q.s_max = std::log(40.0 / bounds.lower);
  q.s_min = std::log(1e-16 / bounds.upper);
  return q;
}

inline SpectralBounds spectral_bounds(const SpectralDecomposition& d) {
  return {d.eigenvalues()[0], d.eigenvalues()[d.size() - 1]};
}

inline ComplexVector inv_sqrt_apply(const SpectralDecomposition& d, const ComplexVector& u,
                                    InvSqrtRoute route, int nodes = 200) {
  require(d.eigenvalues()[0] > 0.0, "A^{-1/2} needs a positive definite operator (mu_1 > 0)");
  if (route == InvSqrtRoute::spectral)
    return d.apply_function([](double mu) { return 1.0 / std::sqrt(mu); }, u);
  const InvSqrtQuadrature q = make_inv_sqrt_quadrature(spectral_bounds(d), nodes);
  const auto evaluator = SemigroupEvaluator::spectral(std::make_shared<const SpectralDecomposition>(d));
  ComplexVector sum = ComplexVector::Zero(u.size());
  for (int k = 0; k < q.nodes; ++k) sum += q.weight(k) * evaluator.apply(std::exp(q.node(k)), u);
  return sum;
}

/// Box route: the spectral variant evaluates x^{-1/2} on the Lanczos
/// tridiagonal; the quadrature variant sums Krylov semigroup actions.
inline ComplexVector inv_sqrt_apply(const BoxOperator& op, const ComplexVector& u, InvSqrtRoute route,
                                    const KrylovOptions& options = {}, int nodes = 200) {
  const WeightedAction action = weighted_action(op);
  auto [lo, hi] = box_extremal_eigenvalues(op);
  require(lo > 0.0, "A^{-1/2} needs a positive definite operator (mu_1 > 0)");
  auto apply_real = [&](const RealVector& v) -> RealVector {
    if (v.isZero(0.0)) return v;
    if (route == InvSqrtRoute::spectral)
      return krylov_function(action, v, [](double x) { return 1.0 / std::sqrt(x); }, options);
    const InvSqrtQuadrature q = make_inv_sqrt_quadrature({0.5 * lo, 2.0 * hi}, nodes);
    RealVector sum = RealVector::Zero(v.size());
    for (int k = 0; k < q.nodes; ++k) sum += q.weight(k) * krylov_expm(action, v, std::exp(q.node(k)), options);
    return sum;
  };
  ComplexVector out(u.size());
  out.real() = apply_real(u.real());
  out.imag() = apply_real(u.imag());
  return out;
}

/// R = L A^{-1/2}.
inline ComplexVector riesz_apply(const SectorOperator& op, const SpectralDecomposition& d, const ComplexVector& u,
                                 InvSqrtRoute route = InvSqrtRoute::spectral, int nodes = 200) {
  return op.apply_laplacian(inv_sqrt_apply(d, u, route, nodes));
}

inline ComplexVector riesz_apply(const BoxOperator& op, const ComplexVector& u,
                                 InvSqrtRoute route = InvSqrtRoute::spectral, const KrylovOptions& options = {}) {
  return op.apply_laplacian(inv_sqrt_apply(op, u, route, options));
}

/// Dense matrix of R acting on nodal values.
inline RealMatrix riesz_matrix(const SectorOperator& op, const SpectralDecomposition& d) {
  require(d.eigenvalues()[0] > 0.0, "A^{-1/2} needs a positive definite operator (mu_1 > 0)");
  return op.laplacian_matrix() * d.matrix_function([](double mu) { return 1.0 / std::sqrt(mu); });
}

/// Weighted 2->2 norm of a nodal matrix: || W^{1/2} M W^{-1/2} ||_2.
inline double weighted_spectral_norm(const RealMatrix& m, const RealVector& weights) {
  const RealVector s = weights.cwiseSqrt();
  const RealMatrix b = s.asDiagonal() * m * s.cwiseInverse().asDiagonal();
  Eigen::BDCSVD<RealMatrix> svd(b);
  return svd.singularValues()[0];
}

}  // namespace rellich

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <type_traits>

namespace rellich {

using Complex = std::complex<double>;
using RealVector = Eigen::VectorXd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using ComplexMatrix = Eigen::MatrixXcd;

inline constexpr double pi = std::numbers::pi;
inline constexpr double infinity = std::numeric_limits<double>::infinity();

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a documented precondition of an operation is violated.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Raised when an iterative method exhausts its budget.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw PreconditionError(message);
}

inline void require_dimension(int dimension) {
  require(dimension >= 5, "N >= 5 required");
}

/// Sharp constant (N(N-4)/4)^2 of the Rellich inequality on R^N.
inline double rellich_constant_exact(int dimension) {
  require_dimension(dimension);
  const double a = dimension * (dimension - 4) / 4.0;
  return a * a;
}

/// Upper Sobolev exponent p0 = 2N/(N-4).
inline double critical_exponent(int dimension) {
  require_dimension(dimension);
  return 2.0 * dimension / (dimension - 4.0);
}

/// Hoelder conjugate p' = p/(p-1), with 1' = inf and inf' = 1.
inline double dual_exponent(double p) {
  if (p == 1.0) return infinity;
  if (std::isinf(p)) return 1.0;
  return p / (p - 1.0);
}

/// Lower Sobolev exponent p0' = 2N/(N+4).
inline double critical_dual_exponent(int dimension) {
  return dual_exponent(critical_exponent(dimension));
}

/// gamma_pq = N/4 (1/p - 1/q); 1/inf is taken as 0.
inline double decay_exponent(int dimension, double p, double q) {
  auto inv = [](double x) { return std::isinf(x) ? 0.0 : 1.0 / x; };
  return dimension / 4.0 * (inv(p) - inv(q));
}

/// Surface area of the unit sphere S^{N-1}.
inline double unit_sphere_area(int dimension) {
  return 2.0 * std::pow(pi, dimension / 2.0) / std::tgamma(dimension / 2.0);
}

inline double ball_volume(int dimension, double radius) {
  return unit_sphere_area(dimension) * std::pow(radius, dimension) / dimension;
}

/// Splitmix-seeded xoshiro256** generator with platform-independent
/// uniform and normal draws, so sampled families are bit-reproducible.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    for (auto& s : state_) s = splitmix(seed);
  }

  /// Independent stream derived from (seed, task index).
  static Rng stream(std::uint64_t seed, std::uint64_t task) {
    std::uint64_t mixed = seed ^ (0x9e3779b97f4a7c15ULL * (task + 1));
    return Rng(splitmix(mixed));
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    spare_ = radius * std::sin(2.0 * pi * u2);
    has_spare_ = true;
    return radius * std::cos(2.0 * pi * u2);
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  static std::uint64_t splitmix(std::uint64_t& x) {
    std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t state_[4]{};
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// FNV-1a, used for content hashes of grids and operators.
class Fnv1a {
 public:
  void add_bytes(const void* data, std::size_t size) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < size; ++i) {
      hash_ ^= bytes[i];
      hash_ *= 0x100000001b3ULL;
    }
  }
  template <class T>
    requires std::is_arithmetic_v<T> || std::is_enum_v<T>
  void add(const T& value) {
    add_bytes(&value, sizeof(T));
  }
  template <class Derived>
  void add(const Eigen::DenseBase<Derived>& values) {
    for (Eigen::Index i = 0; i < values.size(); ++i) add(static_cast<double>(values.derived().coeff(i)));
  }
  void add(const std::string& text) { add_bytes(text.data(), text.size()); }
  std::string hex() const {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 0; i < 16; ++i) out[15 - i] = digits[(hash_ >> (4 * i)) & 0xf];
    return out;
  }

 private:
  std::uint64_t hash_ = 0xcbf29ce484222325ULL;
};

}  // namespace rellich

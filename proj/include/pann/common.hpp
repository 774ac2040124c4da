#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace pann {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Invalid configuration supplied to a library surface (wrong dimensions,
/// unknown enum names, inconsistent spec fields).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed or unusable input data (CSV files, datasets).
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Unexpected internal inconsistency; indicates a bug, not a user error.
class InternalError : public std::logic_error {
 public:
  explicit InternalError(const std::string& msg) : std::logic_error(msg) {}
};

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}
}  // namespace detail

/// Derive an independent stream seed from a base seed, e.g. one per trial.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  return detail::splitmix64(base ^ detail::splitmix64(stream + 1));
}

/// Deterministic uniform RNG. The [0,1) mapping is spelled out explicitly so
/// that streams are reproducible across standard library implementations
/// (std::uniform_real_distribution is not portable bit-for-bit).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    // splitmix64 stream; quality is ample for sampling and initialization.
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform on [0,1) with 53 random bits.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform on [lo,hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0,n).
  std::uint64_t uniform_index(std::uint64_t n) {
    // Rejection-free modulo is fine here; n is tiny relative to 2^64.
    return next_u64() % n;
  }

 private:
  std::uint64_t state_;
};

}  // namespace pann

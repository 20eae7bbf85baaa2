#pragma once

#include <complex>
#include <cstdint>

namespace qkrspb {

/// Stateless counter-based generator: the n-th draw of stream `seed` is a
/// pure function of (seed, n), so output never depends on call order or on
/// which thread produced it. Mixing uses the SplitMix64 finalizer.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) noexcept : seed_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }

  std::uint64_t bits(std::uint64_t counter) const noexcept;

  /// Uniform on [0, 1) with 53 random bits.
  double uniform(std::uint64_t counter) const noexcept;

  /// Uniform on (0, 1]; safe as a logarithm argument.
  double uniform_open_low(std::uint64_t counter) const noexcept;

  /// Standard complex Gaussian built from two independent N(0,1) reals via
  /// Box-Muller on counters 2k and 2k+1. E|z|^2 = 2.
  std::complex<double> gaussian_pair(std::uint64_t k) const noexcept;

  /// Single N(0,1) real: draw k is the real (even k) or imaginary (odd k)
  /// part of `gaussian_pair(k / 2)`.
  double gaussian(std::uint64_t k) const noexcept;

 private:
  std::uint64_t seed_;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Per-trajectory seed: stream `index` of master seed `master`.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept;

}  // namespace qkrspb

#include "qkrspb/rng.hpp"

#include <cmath>
#include <numbers>

namespace qkrspb {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept {
  return splitmix64(splitmix64(master) ^ splitmix64(index + 0x6A09E667F3BCC909ULL));
}

std::uint64_t CounterRng::bits(std::uint64_t counter) const noexcept {
  // Two rounds so that adjacent counters under adjacent seeds do not collide.
  return splitmix64(splitmix64(seed_) + splitmix64(counter));
}

double CounterRng::uniform(std::uint64_t counter) const noexcept {
  return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
}

double CounterRng::uniform_open_low(std::uint64_t counter) const noexcept {
  return (static_cast<double>(bits(counter) >> 11) + 1.0) * 0x1.0p-53;
}

std::complex<double> CounterRng::gaussian_pair(std::uint64_t k) const noexcept {
  const double u1 = uniform_open_low(2 * k);
  const double u2 = uniform(2 * k + 1);
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double phi = 2.0 * std::numbers::pi * u2;
  return {r * std::cos(phi), r * std::sin(phi)};
}

double CounterRng::gaussian(std::uint64_t k) const noexcept {
  const auto z = gaussian_pair(k >> 1);
  return (k & 1U) ? z.imag() : z.real();
}

}  // namespace qkrspb

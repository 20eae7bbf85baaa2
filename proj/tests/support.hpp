#pragma once

#include <cmath>
#include <cstdint>

#include "qkrspb/hilbert.hpp"
#include "qkrspb/rng.hpp"

namespace qkrspb::test {

inline Matrix random_hermitian(int d, std::uint64_t seed) {
  const CounterRng rng(seed);
  Matrix G(d, d);
  std::uint64_t k = 0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) G(i, j) = rng.gaussian_pair(k++);
  return 0.5 * (G + G.adjoint());
}

inline Matrix random_unitary(int d, std::uint64_t seed) {
  return unitary_from_generator(random_hermitian(d, seed));
}

/// Random full-rank density matrix W W^dagger / tr.
inline Matrix random_density(int d, std::uint64_t seed) {
  const CounterRng rng(seed);
  Matrix W(d, d);
  std::uint64_t k = 0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) W(i, j) = rng.gaussian_pair(k++);
  Matrix rho = W * W.adjoint();
  rho /= rho.trace().real();
  return 0.5 * (rho + rho.adjoint());
}

inline StateVector random_state(int d_S, int d_E, std::uint64_t seed) {
  const auto v = haar_random_env(d_S * d_E, seed);
  return StateVector::unflatten(Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size())), d_S, d_E);
}

inline double max_abs(const Matrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace qkrspb::test

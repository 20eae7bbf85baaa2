#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "qkrspb/hilbert.hpp"
#include "qkrspb/metrics.hpp"

namespace qkrspb {

/// Rows of independent complex Gaussians; row i has E|X_in|^2 = sigma_i^2
/// with real and imaginary parts of variance sigma_i^2 / 2 each.
struct CoefficientEnsemble {
  int d = 0;
  std::vector<double> sigmas;
  RowMajorMatrix X;  ///< sigmas.size() x d
  std::uint64_t seed = 0;
};

CoefficientEnsemble make_ensemble(int d, const std::vector<double>& sigmas, std::uint64_t seed);

enum class SpectrumKind {
  BoundedRandom,  ///< uniform on [-1, 1], seeded
  Cosine,         ///< cos(2 pi n / d)
  Constant,       ///< c
  PowerLaw,       ///< (n / d)^exponent: rescaled slowly growing sequence
};

struct SpectrumSpec {
  SpectrumKind kind = SpectrumKind::Cosine;
  double constant = 1.0;
  double exponent = 0.25;
  std::uint64_t seed = 0;

  static SpectrumSpec bounded_random(std::uint64_t seed) { return {SpectrumKind::BoundedRandom, 1.0, 0.25, seed}; }
  static SpectrumSpec cosine() { return {SpectrumKind::Cosine, 1.0, 0.25, 0}; }
  static SpectrumSpec constant_value(double c) { return {SpectrumKind::Constant, c, 0.25, 0}; }
  static SpectrumSpec power_law(double exponent) { return {SpectrumKind::PowerLaw, 1.0, exponent, 0}; }

  /// h_n for n = 1..d (stored at n - 1).
  std::vector<double> values(int d) const;
};

/// (1/d) sum_n h_n conj(X_jn) X_in.
Complex weighted_quadratic(const CoefficientEnsemble& ensemble, const std::vector<double>& h, int i, int j);
Complex weighted_quadratic(const CoefficientEnsemble& ensemble, const SpectrumSpec& spectrum, int i, int j);

/// RMS over `trials` of |weighted_quadratic - analytic mean| for each d,
/// fitted against d on log-log axes. Analytic mean is
/// sigma_i^2 (sum_n h_n) / d for i == j and 0 otherwise.
ScalingFit convergence_scan(const SpectrumSpec& spectrum, const std::vector<double>& sigmas,
                            const std::vector<int>& dims, int trials, std::pair<int, int> pair,
                            std::uint64_t master_seed);

/// (1/d) sum_n conj(X_jn) X_in; tends to sigma_i^2 delta_ij.
Complex gram_limit_check(const CoefficientEnsemble& ensemble, std::pair<int, int> pair);

struct RotationStatistics {
  RowMajorMatrix rotated;            ///< X_row -> U X_row for every row
  std::vector<Complex> row_mean;     ///< (1/d) sum_n Y_in
  std::vector<double> row_variance;  ///< (1/d) sum_n |Y_in - mean_i|^2
  Matrix covariance;                 ///< (1/d) sum_n Y_in conj(Y_jn)
};

/// Rotates each coefficient row by the d x d unitary and reports empirical
/// moments of the rotated components.
RotationStatistics basis_rotation_invariance(const CoefficientEnsemble& ensemble, const Matrix& unitary);

/// Unitary discrete Fourier matrix F(m, n) = d^{-1/2} exp(-2 pi i m n / d).
Matrix fourier_matrix(int d);

}  // namespace qkrspb

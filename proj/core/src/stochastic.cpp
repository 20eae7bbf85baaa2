#include "qkrspb/stochastic.hpp"

#include <cmath>
#include <numbers>

#include "qkrspb/error.hpp"
#include "qkrspb/rng.hpp"

namespace qkrspb {

CoefficientEnsemble make_ensemble(int d, const std::vector<double>& sigmas, std::uint64_t seed) {
  if (d < 1) throw InvalidInput("ensemble dimension must be positive");
  if (sigmas.empty()) throw InvalidInput("ensemble needs at least one row");
  CoefficientEnsemble e;
  e.d = d;
  e.sigmas = sigmas;
  e.seed = seed;
  e.X.resize(static_cast<Eigen::Index>(sigmas.size()), d);
  for (std::size_t i = 0; i < sigmas.size(); ++i) {
    const CounterRng rng(derive_seed(seed, i));
    // gaussian_pair has E|z|^2 = 2.
    const double s = sigmas[i] / std::sqrt(2.0);
    for (int n = 0; n < d; ++n) e.X(static_cast<Eigen::Index>(i), n) = s * rng.gaussian_pair(static_cast<std::uint64_t>(n));
  }
  return e;
}

std::vector<double> SpectrumSpec::values(int d) const {
  std::vector<double> h(static_cast<std::size_t>(d));
  switch (kind) {
    case SpectrumKind::BoundedRandom: {
      const CounterRng rng(seed);
      for (int n = 0; n < d; ++n) h[n] = 2.0 * rng.uniform(static_cast<std::uint64_t>(n)) - 1.0;
      break;
    }
    case SpectrumKind::Cosine:
      for (int n = 1; n <= d; ++n) h[n - 1] = std::cos(2.0 * std::numbers::pi * n / d);
      break;
    case SpectrumKind::Constant:
      for (auto& v : h) v = constant;
      break;
    case SpectrumKind::PowerLaw:
      for (int n = 1; n <= d; ++n) h[n - 1] = std::pow(static_cast<double>(n) / d, exponent);
      break;
  }
  return h;
}

Complex weighted_quadratic(const CoefficientEnsemble& ensemble, const std::vector<double>& h, int i, int j) {
  const auto rows = static_cast<int>(ensemble.X.rows());
  if (i < 0 || j < 0 || i >= rows || j >= rows) throw InvalidInput("weighted_quadratic: row index out of range");
  if (static_cast<int>(h.size()) != ensemble.d) throw InvalidInput("weighted_quadratic: spectrum length mismatch");
  Complex acc = 0.0;
  for (int n = 0; n < ensemble.d; ++n) acc += h[n] * std::conj(ensemble.X(j, n)) * ensemble.X(i, n);
  return acc / static_cast<double>(ensemble.d);
}

Complex weighted_quadratic(const CoefficientEnsemble& ensemble, const SpectrumSpec& spectrum, int i, int j) {
  return weighted_quadratic(ensemble, spectrum.values(ensemble.d), i, j);
}

ScalingFit convergence_scan(const SpectrumSpec& spectrum, const std::vector<double>& sigmas,
                            const std::vector<int>& dims, int trials, std::pair<int, int> pair,
                            std::uint64_t master_seed) {
  if (trials < 30) throw InvalidInput("convergence_scan needs at least 30 trials");
  if (dims.size() < 3) throw InvalidInput("convergence_scan needs at least three dimensions");
  for (std::size_t k = 1; k < dims.size(); ++k)
    if (dims[k] <= dims[k - 1]) throw InvalidInput("convergence_scan dims must increase");
  const auto [i, j] = pair;
  if (i < 0 || j < 0 || i >= static_cast<int>(sigmas.size()) || j >= static_cast<int>(sigmas.size()))
    throw InvalidInput("convergence_scan: pair out of range");

  std::vector<std::pair<double, double>> points;
  for (std::size_t dk = 0; dk < dims.size(); ++dk) {
    const int d = dims[dk];
    const auto h = spectrum.values(d);
    double hsum = 0.0;
    for (double v : h) hsum += v;
    const Complex mean = (i == j) ? Complex(sigmas[i] * sigmas[i] * hsum / d, 0.0) : Complex(0.0, 0.0);
    double ms = 0.0;
    for (int t = 0; t < trials; ++t) {
      const auto seed = derive_seed(derive_seed(master_seed, static_cast<std::uint64_t>(d)), static_cast<std::uint64_t>(t));
      const auto e = make_ensemble(d, sigmas, seed);
      ms += std::norm(weighted_quadratic(e, h, i, j) - mean);
    }
    points.emplace_back(static_cast<double>(d), std::sqrt(ms / trials));
  }
  return loglog_slope(points);
}

Complex gram_limit_check(const CoefficientEnsemble& ensemble, std::pair<int, int> pair) {
  return weighted_quadratic(ensemble, std::vector<double>(static_cast<std::size_t>(ensemble.d), 1.0), pair.first,
                            pair.second);
}

RotationStatistics basis_rotation_invariance(const CoefficientEnsemble& ensemble, const Matrix& unitary) {
  const int d = ensemble.d;
  if (unitary.rows() != d || unitary.cols() != d) throw InvalidInput("rotation must be d x d");
  if ((unitary.adjoint() * unitary - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() > 1e-10)
    throw InvalidInput("rotation is not unitary");
  RotationStatistics out;
  out.rotated = ensemble.X * unitary.transpose();
  const auto rows = out.rotated.rows();
  for (Eigen::Index i = 0; i < rows; ++i) {
    const Complex mean = out.rotated.row(i).sum() / static_cast<double>(d);
    out.row_mean.push_back(mean);
    out.row_variance.push_back((out.rotated.row(i).array() - mean).abs2().sum() / d);
  }
  out.covariance = out.rotated * out.rotated.adjoint() / static_cast<double>(d);
  return out;
}

Matrix fourier_matrix(int d) {
  Matrix F(d, d);
  const double s = 1.0 / std::sqrt(static_cast<double>(d));
  for (int m = 0; m < d; ++m)
    for (int n = 0; n < d; ++n) F(m, n) = std::polar(s, -2.0 * std::numbers::pi * ((static_cast<long>(m) * n) % d) / d);
  return F;
}

}  // namespace qkrspb

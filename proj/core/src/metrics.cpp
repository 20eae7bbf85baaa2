#include "qkrspb/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "qkrspb/error.hpp"

namespace qkrspb {

double trace_distance(const DensityMatrix& A, const DensityMatrix& B) {
  if (A.dim() != B.dim()) throw InvalidInput("trace_distance: dimension mismatch");
  const Matrix diff = A.matrix() - B.matrix();
  Eigen::SelfAdjointEigenSolver<Matrix> solver(diff, Eigen::EigenvaluesOnly);
  return 0.5 * solver.eigenvalues().cwiseAbs().sum();
}

std::vector<double> f_channel(const MetricSeries& series, const DensityMatrix& reference) {
  if (!series.has_snapshots()) throw InvalidInput("series carries no RDM snapshots");
  std::vector<double> out;
  out.reserve(series.size());
  for (const auto& s : series.snapshots()) out.push_back(trace_distance(s, reference));
  return out;
}

namespace {

struct MeanStd {
  double mean;
  double stddev;
};

MeanStd population_stats(const std::vector<double>& xs) {
  CompensatedSum s;
  for (double x : xs) s.add(x);
  const double mean = s.value() / static_cast<double>(xs.size());
  CompensatedSum v;
  for (double x : xs) v.add((x - mean) * (x - mean));
  return {mean, std::sqrt(v.value() / static_cast<double>(xs.size()))};
}

}  // namespace

Fluctuation fbar_and_fluct(const MetricSeries& series, const WindowSpec& window) {
  const DensityMatrix rho_bar = time_average(series, window);
  const auto picks = series.select(window);
  std::vector<double> f;
  f.reserve(picks.size());
  for (auto p : picks) f.push_back(trace_distance(series.snapshots()[p], rho_bar));
  const auto st = population_stats(f);
  return {st.mean, st.stddev};
}

double offdiag_deviation(const MetricSeries& series, int i, int j, const WindowSpec& window, const Basis& basis) {
  if (!series.has_snapshots()) throw InvalidInput("offdiag_deviation: series carries no RDM snapshots");
  const int d = basis.dim();
  if (i == j || i < 0 || j < 0 || i >= d || j >= d) throw InvalidInput("offdiag_deviation: invalid element index");
  const auto picks = series.select(window);
  std::vector<Complex> values;
  values.reserve(picks.size());
  CompensatedSum re, im;
  for (auto p : picks) {
    const Complex v = basis.vector(i).dot(series.snapshots()[p].matrix() * basis.vector(j));
    values.push_back(v);
    re.add(v.real());
    im.add(v.imag());
  }
  const double n = static_cast<double>(values.size());
  const Complex mean(re.value() / n, im.value() / n);
  CompensatedSum var;
  for (const auto& v : values) var.add(std::norm(v - mean));
  return std::sqrt(var.value() / n);
}

double offdiag_deviation(const MetricSeries& series, int i, int j, const WindowSpec& window) {
  if (!series.has_snapshots()) throw InvalidInput("offdiag_deviation: series carries no RDM snapshots");
  return offdiag_deviation(series, i, j, window, Basis::computational(series.snapshots().front().dim()));
}

double g_energy_diag(const DensityMatrix& rho_bar, const Basis& basis) {
  return trace_distance(rho_bar, diagonal_part(rho_bar, basis));
}

namespace {
void check_sigmas(const std::vector<double>& sigmas) {
  double s2 = 0.0;
  for (double s : sigmas) s2 += s * s;
  if (std::abs(s2 - 1.0) > 1e-8) throw InvalidInput("sigmas must satisfy sum sigma_i^2 = 1");
}
}  // namespace

double g_rms_qubit(const std::vector<double>& sigmas, int d_E, long N_T) {
  if (sigmas.size() != 2) throw InvalidInput("g_rms_qubit needs two sigmas");
  if (d_E < 1 || N_T < 1) throw InvalidInput("g_rms_qubit: d_E and N_T must be positive");
  return sigmas[0] * sigmas[1] / std::sqrt(static_cast<double>(d_E) * static_cast<double>(N_T));
}

double g_bound_model2(const std::vector<double>& sigmas, int d_S, int d_E, long N_T) {
  check_sigmas(sigmas);
  if (d_S < 1 || d_E < 1 || N_T < 1) throw InvalidInput("g_bound_model2: dimensions must be positive");
  double cross = 0.0;
  for (std::size_t i = 0; i < sigmas.size(); ++i)
    for (std::size_t j = 0; j < sigmas.size(); ++j)
      if (i != j) cross += sigmas[i] * sigmas[i] * sigmas[j] * sigmas[j];
  return 0.5 * std::sqrt(static_cast<double>(d_S) / (static_cast<double>(N_T) * d_E)) * std::sqrt(cross);
}

namespace {
// overlaps(k, k') = |<rho_k|eta_k'>|^2
Eigen::MatrixXd overlap_probabilities(const DensityMatrix& rho_t, const Basis& basis) {
  if (rho_t.dim() != basis.dim()) throw InvalidInput("basis dimension does not match the density matrix");
  const auto eig = hermitian_eig(rho_t.matrix());
  const Matrix amp = eig.vectors.adjoint() * basis.columns();
  return amp.cwiseAbs2();
}
}  // namespace

double basis_distance_d(const DensityMatrix& rho_t, const Basis& basis) {
  if (rho_t.dim() != 2) throw InvalidInput("basis_distance_d is defined for d_S = 2; use entropy_width_D");
  const Eigen::MatrixXd P = overlap_probabilities(rho_t, basis);
  // Row 0 sums to one, so some k' reaches 1/2; ties go to the smaller k'.
  const int kp = P(0, 0) >= P(0, 1) ? 0 : 1;
  return std::clamp(1.0 - P(0, kp), 0.0, 0.5);
}

double entropy_width_D(const DensityMatrix& rho_t, const Basis& basis) {
  const Eigen::MatrixXd P = overlap_probabilities(rho_t, basis);
  double best = 0.0;
  for (Eigen::Index k = 0; k < P.rows(); ++k) {
    double h = 0.0;
    for (Eigen::Index kp = 0; kp < P.cols(); ++kp) {
      const double p = std::clamp(P(k, kp), 0.0, 1.0);
      if (p > 0.0) h -= p * std::log(p);
    }
    best = std::max(best, h);
  }
  return best;
}

bool eigen_degenerate(const DensityMatrix& rho, double gap_tol) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(rho.matrix(), Eigen::EigenvaluesOnly);
  const auto& ev = solver.eigenvalues();
  for (Eigen::Index k = 1; k < ev.size(); ++k)
    if (ev(k) - ev(k - 1) < gap_tol) return true;
  return false;
}

double time_averaged_metric(const MetricSeries& series, const std::string& channel, const WindowSpec& window) {
  const auto& values = series.channel(channel);
  const auto picks = series.select(window);
  CompensatedSum s;
  for (auto p : picks) s.add(values[p]);
  return s.value() / static_cast<double>(picks.size());
}

double depolarization_distance(const DensityMatrix& rho_bar) {
  return trace_distance(rho_bar, DensityMatrix::identity_over_d(rho_bar.dim()));
}

ScalingFit loglog_slope(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 3) throw InvalidInput("loglog_slope needs at least three points");
  ScalingFit fit;
  for (const auto& [x, y] : points) {
    if (!(x > 0.0) || !(y > 0.0)) throw InvalidInput("loglog_slope requires positive values");
    fit.points.emplace_back(std::log2(x), std::log2(y));
  }
  const double n = static_cast<double>(fit.points.size());
  double mx = 0.0, my = 0.0;
  for (const auto& [lx, ly] : fit.points) {
    mx += lx;
    my += ly;
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [lx, ly] : fit.points) {
    sxx += (lx - mx) * (lx - mx);
    sxy += (lx - mx) * (ly - my);
  }
  if (sxx == 0.0) throw InvalidInput("loglog_slope needs at least two distinct abscissae");
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss = 0.0;
  for (const auto& [lx, ly] : fit.points) {
    const double r = ly - (fit.intercept + fit.slope * lx);
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / n);
  return fit;
}

}  // namespace qkrspb

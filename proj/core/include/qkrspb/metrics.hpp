#pragma once

#include <string>
#include <utility>
#include <vector>

#include "qkrspb/hilbert.hpp"
#include "qkrspb/rdm.hpp"
#include "qkrspb/series.hpp"

namespace qkrspb {

/// 1/2 sum_k |mu_k| over the eigenvalues of (A - B).
double trace_distance(const DensityMatrix& A, const DensityMatrix& B);

struct Fluctuation {
  double fbar = 0.0;
  double delta_f = 0.0;
};

/// f(t) = trace_distance(rho(t), rho_bar) over the window, rho_bar being the
/// window average; returns its mean and population standard deviation.
Fluctuation fbar_and_fluct(const MetricSeries& series, const WindowSpec& window);

/// Per-record f(t) against a given reference (all records of the series).
std::vector<double> f_channel(const MetricSeries& series, const DensityMatrix& reference);

/// sqrt(mean |rho_ij - mean rho_ij|^2) over the window, elements taken in
/// `basis` (0-based i, j).
double offdiag_deviation(const MetricSeries& series, int i, int j, const WindowSpec& window, const Basis& basis);
double offdiag_deviation(const MetricSeries& series, int i, int j, const WindowSpec& window);

/// Trace distance between rho_bar and its diagonal part in `basis`.
double g_energy_diag(const DensityMatrix& rho_bar, const Basis& basis);

/// Random-coefficient RMS estimate sigma_1 sigma_2 / sqrt(d_E N_T) of g for
/// a qubit.
double g_rms_qubit(const std::vector<double>& sigmas, int d_E, long N_T);

/// (1/2) sqrt(d_S / (N_T d_E)) sqrt(sum_{i != j} sigma_i^2 sigma_j^2).
double g_bound_model2(const std::vector<double>& sigmas, int d_S, int d_E, long N_T);

/// 1 - |<rho_k|eta_k'>|^2 for the pair with overlap >= 1/2 (qubit only).
double basis_distance_d(const DensityMatrix& rho_t, const Basis& basis);

/// max_k of the Shannon entropy of |<eta_k'|rho_k>|^2 over k'.
double entropy_width_D(const DensityMatrix& rho_t, const Basis& basis);

/// True when the two largest eigenvalues of rho are closer than `gap_tol`;
/// the RDM eigenbasis (and thus d or D) is then ill defined.
bool eigen_degenerate(const DensityMatrix& rho, double gap_tol = 1e-12);

double time_averaged_metric(const MetricSeries& series, const std::string& channel, const WindowSpec& window);

/// trace_distance(rho_bar, I / d_S).
double depolarization_distance(const DensityMatrix& rho_bar);

struct ScalingFit {
  std::vector<std::pair<double, double>> points;  ///< (log2 x, log2 y)
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  ///< RMS of fit residuals in log2 units
};

/// Least-squares line through (log2 x, log2 y); needs >= 3 positive points.
ScalingFit loglog_slope(const std::vector<std::pair<double, double>>& points);

}  // namespace qkrspb

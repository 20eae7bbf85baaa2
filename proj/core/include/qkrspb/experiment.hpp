#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qkrspb/config.hpp"
#include "qkrspb/metrics.hpp"
#include "qkrspb/qkr_model.hpp"
#include "qkrspb/rdm.hpp"

namespace qkrspb {

/// Window statistics of one trajectory.
struct TrajectorySummary {
  int d_S = 0;
  int d_E = 0;
  double lambda = 0.0;
  std::uint64_t seed = 0;
  long N_T = 0;
  double fbar = 0.0;
  double delta_f = 0.0;
  double delta_rho_offdiag = 0.0;
  double delta_rho_prediction = 0.0;  ///< sigma_i sigma_j / sqrt(d_E)
  double g = 0.0;                     ///< energy-basis diagonality of rho_bar
  double g_bound = 0.0;
  std::vector<double> sigmas;  ///< energy basis, ascending energy
  double dbar_or_Dbar = 0.0;
  double depol = 0.0;
  double max_norm_drift = 0.0;
  double degenerate_fraction = 0.0;
  Matrix rho_bar;         ///< analysis basis
  Eigen::MatrixXd mean_abs;  ///< window mean of |rho_ij(t)|, analysis basis
};

struct Trajectory {
  TrajectorySummary summary;
  MetricSeries series;  ///< snapshots in the computational basis plus channels
  Basis analysis_basis = Basis::computational(1);
};

/// Basis used for reported RDM elements: the system energy eigenbasis or the
/// computational basis.
Basis analysis_basis(const ModelParams& params, AnalysisBasis kind);

/// Evolves one trajectory for config.n_kicks kicks with the model and seed
/// given, records from config.record_from and analyzes the window. Channels
/// attached to the series: f, d_or_D, depol.
Trajectory simulate(const RunConfig& config, const ModelParams& params, std::uint64_t seed);

/// Window analysis of an already recorded series.
TrajectorySummary analyze(MetricSeries& series, const RunConfig& config, const ModelParams& params,
                          const Basis& basis);

/// Column names of timeseries.csv for d_S system levels.
std::vector<std::string> timeseries_header(int d_S);

void write_timeseries_csv(const std::filesystem::path& path, const Trajectory& trajectory, const RunConfig& config);

struct SweepPoint {
  double grid_value = 0.0;
  std::optional<TrajectorySummary> summary;
  std::string error;  ///< set when the grid point failed
};

struct SweepResult {
  std::vector<SweepPoint> points;  ///< sorted by grid value
  std::map<std::string, ScalingFit> fits;  ///< dim sweeps only
  bool ok() const;
};

/// Runs every grid point, up to config.workers concurrently. Point i uses
/// seed derive_seed(config.seed, i) with i the position in the config grid.
SweepResult sweep(const RunConfig& config, const std::filesystem::path& out_dir = {});

struct RhsCheck {
  int d_S = 0, d_E = 0, terms = 0;
  double rel_error = 0.0;
  double trace_error = 0.0;
  double hermiticity_error = 0.0;
  bool pass = false;
};

struct RenormInstance {
  double bare_median = 0.0;
  double renorm_median = 0.0;
};

struct RenormCheck {
  std::vector<RenormInstance> instances;
  int wins = 0;
  std::vector<int> dims;
  std::vector<double> renorm_by_dim;  ///< mean over seeds of the window median
  std::vector<double> bare_by_dim;
  ScalingFit fit;
  bool wins_pass = false;
  bool slope_pass = false;
};

struct DenseCheck {
  std::string model;
  int d_E = 0;
  double max_error = 0.0;
  bool pass = false;
};

struct OracleReport {
  std::vector<RhsCheck> rhs;
  std::optional<RenormCheck> renorm;
  std::vector<DenseCheck> dense;
  double rhs_max_error = 0.0;
  bool ok() const;
};

OracleReport run_oracle_suite(const OracleSuiteConfig& config, std::uint64_t seed);

struct ScanResult {
  std::string name;
  ScalingFit fit;
  bool pass = false;
};

struct StochasticReport {
  std::vector<ScanResult> scans;
  bool ok() const;
};

StochasticReport run_stochastic_suite(const StochasticSuiteConfig& config, std::uint64_t seed);

/// Runs the configured experiment and writes its result files into
/// config.output. Returns the process exit status: 0 on success, 1 when a
/// check, scan or sweep point failed.
int run_evolve(const RunConfig& config);
int run_sweep(const RunConfig& config);
int run_oracle(const RunConfig& config);
int run_stochastic(const RunConfig& config);
int run_experiment(const RunConfig& config);

/// First line of every CSV: "# qkrspb <version> config=<echo>".
std::string provenance_line(const RunConfig& config);

}  // namespace qkrspb

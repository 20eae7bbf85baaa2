#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qkrspb/qkr_model.hpp"
#include "qkrspb/series.hpp"

namespace qkrspb {

enum class ExperimentKind { Evolve, SweepLambda, SweepDim, Oracle, Stochastic };

const char* to_string(ExperimentKind kind) noexcept;
ExperimentKind experiment_from_string(std::string_view name);

/// Basis in which RDM elements, sigmas and the off-diagonal deviation are
/// reported.
enum class AnalysisBasis { Energy, Computational };

struct OracleSuiteConfig {
  std::vector<std::string> checks{"rhs", "renormalization", "dense_equivalence"};

  // rhs_elements vs finite differences of exact evolution
  int rhs_instances = 50;
  std::vector<int> rhs_d_S{2, 4};
  std::vector<int> rhs_d_E{8, 16, 32};
  int rhs_max_terms = 3;
  double rhs_rel_tol = 1e-6;

  // renormalized vs bare commutator on GOE environments
  int renorm_instances = 20;
  int renorm_d_E = 256;
  std::vector<int> renorm_dims{64, 128, 256, 512};
  int renorm_seeds_per_dim = 3;
  int renorm_times = 100;
  double renorm_trace_offset = 0.8;
  double renorm_coupling = 0.5;
  double renorm_win_fraction = 0.9;
  double renorm_slope_lo = -0.7;
  double renorm_slope_hi = -0.3;

  // split-operator vs explicit Floquet matrix
  std::vector<int> dense_d_E{4, 8};
  int dense_states = 10;
  int dense_kicks = 5;
  double dense_tol = 1e-10;
};

struct StochasticSuiteConfig {
  std::vector<std::string> scans{"bounded_ii", "bounded_ij", "cosine_ii",  "cosine_ij",         "constant_ii",
                                 "constant_ij", "gram_ii",   "gram_ij",    "rotated_cosine_ij", "power_law_ii"};
  int trials = 100;
  int log2_min = 6;
  int log2_max = 16;
  int rotated_log2_max = 11;  ///< dense rotations cost O(d^2)
  std::vector<double> sigmas{0.5477225575051661, 0.8366600265340756};  // sqrt(0.3), sqrt(0.7)
  double slope_target = -0.5;
  double slope_tol = 0.05;
};

struct RunConfig {
  ExperimentKind experiment = ExperimentKind::Evolve;
  ModelParams model{};
  long n_kicks = 40000;
  WindowSpec window{30001, 40000, 1};
  long record_from = 30001;  ///< first kick written to timeseries.csv
  std::uint64_t seed = 1;
  std::vector<double> lambda_grid;
  std::vector<int> dim_grid;
  std::string output = "out";
  std::vector<std::string> record{"timeseries"};
  AnalysisBasis basis = AnalysisBasis::Energy;
  std::pair<int, int> offdiag_pair{0, 1};  ///< 0-based; config files use 1-based
  std::vector<Complex> system_state;       ///< empty: uniform superposition
  int workers = 1;
  OracleSuiteConfig oracle{};
  StochasticSuiteConfig stochastic{};

  bool records(std::string_view channel) const;
  void validate() const;
};

/// Parses and validates a JSON config; missing fields take defaults (K = 90,
/// window [30001, 40000], n_kicks = 40000, frequencies of the reference
/// figures). Errors carry the line number or the offending key.
RunConfig parse_config(std::string_view json_text, const std::string& source = "<string>");
RunConfig load_config(const std::filesystem::path& path);

/// Full JSON serialization; parse_config(config_to_json(c)) reproduces c.
std::string config_to_json(const RunConfig& config, int indent = 2);
void save_config(const RunConfig& config, const std::filesystem::path& path);

/// Compact echo of everything that influences results (omits output
/// location and worker count).
std::string config_echo(const RunConfig& config);

std::string version_string();

}  // namespace qkrspb

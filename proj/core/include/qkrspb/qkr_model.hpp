#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "qkrspb/hilbert.hpp"
#include "qkrspb/series.hpp"

namespace qkrspb {

enum class ModelKind {
  Qubit,     ///< one qubit, sigma_z coupled to cos(theta)
  TwoQubit,  ///< qubits s and A, only sigma_z^A coupled; d_S = 4 ordered s (x) A
};

/// How the s-A coupling constant is interpreted for the two-qubit model.
enum class EpsilonUnits {
  HbarEff,   ///< epsilon counts units of hbar_eff like the Omegas
  Absolute,  ///< epsilon enters the Floquet exponent as given
};

/// Frequencies in units of hbar_eff: the exponent coefficient of each Pauli
/// term in the system Floquet factor is value * hbar_eff.
struct QubitFrequencies {
  double x_S = 800.0;
  double z_S = 800.0;
};

struct TwoQubitFrequencies {
  double x_s = 500.0;
  double z_s = 1000.0;
  double x_A = 1500.0;
  double epsilon = 1000.0;
  EpsilonUnits epsilon_units = EpsilonUnits::HbarEff;
};

struct ModelParams {
  ModelKind model = ModelKind::Qubit;
  int d_E = 4096;
  double K = 90.0;  ///< stochasticity k * hbar_eff
  double lambda = 0.15;
  QubitFrequencies qubit{};
  TwoQubitFrequencies two_qubit{};

  int d_S() const noexcept { return model == ModelKind::Qubit ? 2 : 4; }
  double hbar_eff() const noexcept;
  void validate() const;
};

/// Dimensionless system generator Lambda with U_sys = exp(-i Lambda); equals
/// H_S / hbar_eff.
Matrix system_generator(const ModelParams& params);

/// sigma_z eigenvalue (+1 / -1) of the coupled qubit for system basis index i.
double coupled_branch_sign(ModelKind model, int i);

/// theta_n = 2 pi n / d_E for n = 1..d_E, stored at index n - 1.
std::vector<double> theta_grid(int d_E);

/// Momentum label of FFT bin k on the symmetric grid {-d_E/2, ..., d_E/2-1}.
inline long momentum_of_bin(long k, long d_E) noexcept { return k < d_E / 2 ? k : k - d_E; }

/// Precomputed one-period propagator
///   U_T = U_sys * IFFT * diag(free) * FFT * diag(kick_b),
/// applied right to left. Immutable once built; floquet_step may be called
/// concurrently on distinct states.
class FloquetModel {
 public:
  explicit FloquetModel(ModelParams params);
  ~FloquetModel();
  FloquetModel(FloquetModel&&) noexcept;
  FloquetModel& operator=(FloquetModel&&) noexcept;
  FloquetModel(const FloquetModel&) = delete;
  FloquetModel& operator=(const FloquetModel&) = delete;

  const ModelParams& params() const noexcept { return params_; }
  int d_S() const noexcept { return params_.d_S(); }
  int d_E() const noexcept { return params_.d_E; }

  /// exp(-i (k + lambda z_b) cos theta_n), row b, column n - 1.
  const RowMajorMatrix& kick_phases() const noexcept { return kick_phases_; }
  /// exp(-i hbar_eff m^2 / 2) indexed by FFT bin.
  const Vector& free_phases() const noexcept { return free_phases_; }
  const Matrix& system_unitary() const noexcept { return system_unitary_; }
  const Matrix& system_generator() const noexcept { return generator_; }

  void step(StateVector& state) const;

 private:
  struct FftPlans;
  ModelParams params_;
  RowMajorMatrix kick_phases_;
  Vector free_phases_;
  Vector free_phases_scaled_;  // includes the 1/d_E of the unnormalized FFT pair
  Matrix generator_;
  Matrix system_unitary_;
  std::unique_ptr<FftPlans> plans_;
};

FloquetModel build_model(const ModelParams& params);

/// One period of evolution; norm-preserving.
StateVector floquet_step(const FloquetModel& model, StateVector state);

/// Which kicks to snapshot and whether to audit the norm at every step.
struct RecorderSpec {
  long record_from = 1;  ///< first kick to snapshot
  long record_to = -1;   ///< last kick to snapshot; -1 means n_kicks
  long stride = 1;
  bool audit_norm = false;
};

struct EvolveResult {
  MetricSeries series;
  StateVector final_state;
  double max_norm_drift = 0.0;  ///< max |norm - norm0| over audited steps
};

EvolveResult evolve(const FloquetModel& model, StateVector state, long n_kicks, const RecorderSpec& record);

/// Default initial condition: uniform system superposition times a seeded
/// Haar-random environment vector.
StateVector default_initial_state(const ModelParams& params, std::uint64_t seed);

}  // namespace qkrspb

#pragma once

#include <cstdint>
#include <vector>

#include "qkrspb/hilbert.hpp"
#include "qkrspb/qkr_model.hpp"
#include "qkrspb/rdm.hpp"

namespace qkrspb {

/// Largest total dimension d_S * d_E the dense machinery will diagonalize.
inline constexpr int kMaxDenseDimension = 4096;

struct InteractionTerm {
  Matrix system;       ///< H^{IS}_eta, d_S x d_S
  Matrix environment;  ///< H^{IE}_eta, d_E x d_E
};

/// H = H_S (x) I + I (x) H_E + sum_eta H^{IS}_eta (x) H^{IE}_eta.
struct StaticTotalHamiltonian {
  Matrix H_S;
  Matrix H_E;
  std::vector<InteractionTerm> terms;
  double hbar = 1.0;

  int d_S() const noexcept { return static_cast<int>(H_S.rows()); }
  int d_E() const noexcept { return static_cast<int>(H_E.rows()); }
  void validate(double tol = 1e-12) const;
  /// Dense total matrix, system index major (row i * d_E + n).
  Matrix total() const;
};

/// Real symmetric Gaussian matrix: off-diagonal variance scale^2, diagonal
/// variance 2 scale^2.
Matrix random_goe(int d, double scale, std::uint64_t seed);

/// Diagonalizes the total Hamiltonian once and propagates any state to any
/// time: psi(t) = V exp(-i E t / hbar) V^dagger psi0.
class ExactPropagator {
 public:
  explicit ExactPropagator(const StaticTotalHamiltonian& H);
  StateVector evolve(const StateVector& psi0, double t) const;
  const RealVector& energies() const noexcept { return energies_; }
  /// (E_max - E_min) / (D - 1).
  double mean_level_spacing() const;

 private:
  int d_S_, d_E_;
  double hbar_;
  RealVector energies_;
  Matrix vectors_;
};

StateVector exact_evolve(const StaticTotalHamiltonian& H, const StateVector& psi0, double t);

/// d rho^S_ij / dt in `basis`, assembled from the commutator with H_S plus the
/// interaction contributions built from the state's environment components
/// |E_i> = sum_a conj(B_ai) |row_a>.
Matrix rhs_elements(const StateVector& state, const StaticTotalHamiltonian& H, const Basis& basis);

/// rho^S in `basis` (matrix elements <b_i|rho^S|b_j>).
Matrix rdm_in_basis(const StateVector& state, const Basis& basis);

struct RenormalizedSplit {
  std::vector<double> h_bar;  ///< Tr(H^{IE}_eta) / d_E
  Matrix H_S_tilde;
  std::vector<InteractionTerm> terms_tilde;  ///< traceless environment factors

  /// Reassembled total matrix of H_S_tilde, H_E and terms_tilde.
  Matrix total(const Matrix& H_E) const;
};

RenormalizedSplit renormalize(const StaticTotalHamiltonian& H);

/// Hilbert-Schmidt norm of [A, rho].
double commutator_norm(const Matrix& A, const DensityMatrix& rho);

/// 20 hbar / (mean level spacing): stand-in for the randomization time.
double default_burn_in(const ExactPropagator& prop, double hbar = 1.0);

struct StationarityScanSpec {
  std::vector<double> times;
  double burn_in = 0.0;
  bool use_renormalized = false;
};

/// ||[H_S or H_S_tilde, rho^S(t)]|| at every requested time.
std::vector<double> stationarity_scan(const StaticTotalHamiltonian& H, const StateVector& psi0,
                                      const StationarityScanSpec& spec);
/// Same with a prebuilt propagator; returns bare and renormalized norms.
struct StationarityPair {
  std::vector<double> bare;
  std::vector<double> renormalized;
};
StationarityPair stationarity_scan_pair(const StaticTotalHamiltonian& H, const ExactPropagator& prop,
                                        const StateVector& psi0, const StationarityScanSpec& spec);

/// Explicit (d_S d_E)^2 one-period Floquet matrix built from the kick,
/// discrete Fourier and system factors by direct summation (no FFT).
Matrix dense_floquet_matrix(const FloquetModel& model);

}  // namespace qkrspb

#pragma once

#include <string>
#include <vector>

#include "qkrspb/hilbert.hpp"
#include "qkrspb/series.hpp"

namespace qkrspb {

enum class BasisKind { SystemEigenbasis, InteractionEigenbasis, Computational, Explicit };

/// Fixed orthonormal system basis {|b_k>}, stored as the columns of a
/// unitary matrix in the computational basis.
class Basis {
 public:
  /// Eigenbasis of a system Hamiltonian, ordered by ascending energy, with
  /// the hermitian_eig phase convention.
  static Basis system_eigenbasis(const Matrix& H_S);
  /// Eigenbasis of the system factor of the interaction. Both kicked-rotor
  /// couplings are diagonal in the computational product basis.
  static Basis interaction_eigenbasis(int d_S);
  static Basis computational(int d);
  static Basis explicit_columns(const Matrix& columns, double tol = 1e-10);

  BasisKind kind() const noexcept { return kind_; }
  int dim() const noexcept { return static_cast<int>(columns_.cols()); }
  const Matrix& columns() const noexcept { return columns_; }
  Vector vector(int k) const { return columns_.col(k); }

 private:
  Basis(BasisKind kind, Matrix columns) : kind_(kind), columns_(std::move(columns)) {}
  BasisKind kind_;
  Matrix columns_;
};

/// <b_i| rho |b_j> for all i, j.
Matrix elements_in_basis(const DensityMatrix& rho, const Basis& basis);

/// rho_ij = sum_n amps(i, n) conj(amps(j, n)).
DensityMatrix partial_trace_env(const StateVector& state);

enum class Qubit { s, A };

/// One-qubit RDM of the two-qubit (s (x) A) system after tracing out the
/// other qubit and the environment. Requires d_S == 4.
DensityMatrix partial_trace_keep(const StateVector& state, Qubit keep);

/// Traces the other qubit out of a 4x4 s (x) A density matrix.
DensityMatrix partial_trace_qubit(const DensityMatrix& rho_sA, Qubit keep);

/// Compensated elementwise mean of the snapshots selected by `window`.
DensityMatrix time_average(const MetricSeries& series, const WindowSpec& window);

/// sum_k <b_k|rho|b_k> |b_k><b_k| in the computational basis.
DensityMatrix diagonal_part(const DensityMatrix& rho, const Basis& basis);

/// sigma_i = sqrt(<b_i|rho_bar|b_i>).
std::vector<double> measured_sigmas(const DensityMatrix& rho_bar, const Basis& basis);

}  // namespace qkrspb

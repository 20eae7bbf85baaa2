#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace qkrspb {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using RowMajorMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Bipartite pure state |psi> = sum_{i,n} amps(i, n) |i>|n>. Row i holds the
/// (unnormalized) environment component attached to system basis state i.
/// Rows are contiguous so per-branch transforms work in place.
class StateVector {
 public:
  StateVector(int d_S, int d_E);
  explicit StateVector(RowMajorMatrix amps);

  int d_S() const noexcept { return static_cast<int>(amps_.rows()); }
  int d_E() const noexcept { return static_cast<int>(amps_.cols()); }

  const RowMajorMatrix& amps() const noexcept { return amps_; }
  RowMajorMatrix& amps() noexcept { return amps_; }

  Complex operator()(int i, int n) const { return amps_(i, n); }
  Complex& operator()(int i, int n) { return amps_(i, n); }

  StateVector scaled(Complex factor) const;

  /// Flattened amplitudes, system index major: component i*d_E + n.
  Vector flatten() const;
  static StateVector unflatten(const Vector& v, int d_S, int d_E);

 private:
  RowMajorMatrix amps_;
};

/// Small dense Hermitian matrix. Construction validates Hermiticity and then
/// stores the exactly Hermitian part.
class DensityMatrix {
 public:
  DensityMatrix() = default;
  explicit DensityMatrix(const Matrix& elems, double hermitian_tol = 1e-10);

  static DensityMatrix identity_over_d(int d);
  static DensityMatrix pure(const Vector& psi);
  static DensityMatrix diagonal(std::span<const double> values);

  int dim() const noexcept { return static_cast<int>(elems_.rows()); }
  const Matrix& matrix() const noexcept { return elems_; }
  Complex operator()(int i, int j) const { return elems_(i, j); }
  Complex trace() const { return elems_.trace(); }
  double purity() const;

 private:
  Matrix elems_;
};

struct HermitianEig {
  RealVector values;  ///< descending
  Matrix vectors;     ///< column k pairs with values[k]
};

StateVector make_product_state(std::span<const Complex> system_amps,
                               std::span<const Complex> env_amps);

/// Haar-random environment vector: d_E i.i.d. standard complex Gaussians from
/// the counter stream `seed`, normalized.
std::vector<Complex> haar_random_env(int d_E, std::uint64_t seed);

double norm(const StateVector& state);

/// Eigendecomposition with a reproducible gauge: values descending, the
/// largest-modulus component of each vector real positive, and within a
/// degenerate cluster the vectors are rebuilt by Gram-Schmidt on projected
/// standard basis vectors taken in index order.
HermitianEig hermitian_eig(const Matrix& M, double hermitian_tol = 1e-8);

/// Relative Hermiticity defect max|M - M^dagger| / max(1, max|M|).
double hermiticity_defect(const Matrix& M);

/// Fixes the phase of v so that its largest-modulus entry (first on ties) is
/// real and positive.
void canonicalize_phase(Eigen::Ref<Vector> v);

/// exp(-i H) for Hermitian H.
Matrix unitary_from_generator(const Matrix& H);

namespace pauli {
Matrix x();
Matrix y();
Matrix z();
Matrix identity(int d);
Matrix kron(const Matrix& a, const Matrix& b);
}  // namespace pauli

}  // namespace qkrspb

#include "qkrspb/hilbert.hpp"

#include <algorithm>
#include <cmath>

#include "qkrspb/error.hpp"
#include "qkrspb/rng.hpp"

namespace qkrspb {

StateVector::StateVector(int d_S, int d_E) {
  if (d_S < 1 || d_E < 1) throw InvalidInput("StateVector dimensions must be positive");
  amps_ = RowMajorMatrix::Zero(d_S, d_E);
}

StateVector::StateVector(RowMajorMatrix amps) : amps_(std::move(amps)) {
  if (amps_.rows() < 1 || amps_.cols() < 1) throw InvalidInput("StateVector dimensions must be positive");
}

StateVector StateVector::scaled(Complex factor) const {
  return StateVector(RowMajorMatrix(amps_ * factor));
}

Vector StateVector::flatten() const {
  Vector v(amps_.size());
  for (Eigen::Index i = 0; i < amps_.rows(); ++i)
    v.segment(i * amps_.cols(), amps_.cols()) = amps_.row(i).transpose();
  return v;
}

StateVector StateVector::unflatten(const Vector& v, int d_S, int d_E) {
  if (v.size() != static_cast<Eigen::Index>(d_S) * d_E)
    throw InvalidInput("unflatten: length does not match d_S * d_E");
  RowMajorMatrix amps(d_S, d_E);
  for (int i = 0; i < d_S; ++i) amps.row(i) = v.segment(static_cast<Eigen::Index>(i) * d_E, d_E).transpose();
  return StateVector(std::move(amps));
}

double hermiticity_defect(const Matrix& M) {
  if (M.rows() != M.cols()) return INFINITY;
  if (M.size() == 0) return 0.0;
  const double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
  return (M - M.adjoint()).cwiseAbs().maxCoeff() / scale;
}

DensityMatrix::DensityMatrix(const Matrix& elems, double hermitian_tol) {
  if (elems.rows() != elems.cols() || elems.rows() == 0)
    throw InvalidInput("DensityMatrix must be square and non-empty");
  if (hermiticity_defect(elems) > hermitian_tol) throw InvalidInput("DensityMatrix is not Hermitian");
  elems_ = 0.5 * (elems + elems.adjoint());
}

DensityMatrix DensityMatrix::identity_over_d(int d) {
  return DensityMatrix(Matrix(Matrix::Identity(d, d) / static_cast<double>(d)));
}

DensityMatrix DensityMatrix::pure(const Vector& psi) {
  return DensityMatrix(Matrix(psi * psi.adjoint()));
}

DensityMatrix DensityMatrix::diagonal(std::span<const double> values) {
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(values.size()), static_cast<Eigen::Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
  return DensityMatrix(m);
}

double DensityMatrix::purity() const {
  return (elems_ * elems_).trace().real();
}

StateVector make_product_state(std::span<const Complex> system_amps, std::span<const Complex> env_amps) {
  if (system_amps.empty() || env_amps.empty()) throw InvalidState("empty factor in product state");
  double ns = 0.0, ne = 0.0;
  for (const auto& a : system_amps) ns += std::norm(a);
  for (const auto& a : env_amps) ne += std::norm(a);
  if (ns == 0.0 || ne == 0.0) throw InvalidState("zero-norm factor in product state");
  const double inv = 1.0 / std::sqrt(ns * ne);
  const int d_S = static_cast<int>(system_amps.size());
  const int d_E = static_cast<int>(env_amps.size());
  RowMajorMatrix amps(d_S, d_E);
  for (int i = 0; i < d_S; ++i)
    for (int n = 0; n < d_E; ++n) amps(i, n) = system_amps[i] * env_amps[n] * inv;
  return StateVector(std::move(amps));
}

std::vector<Complex> haar_random_env(int d_E, std::uint64_t seed) {
  if (d_E < 1) throw InvalidInput("haar_random_env: d_E must be positive");
  const CounterRng rng(seed);
  std::vector<Complex> out(static_cast<std::size_t>(d_E));
  double n2 = 0.0;
  for (int n = 0; n < d_E; ++n) {
    out[n] = rng.gaussian_pair(static_cast<std::uint64_t>(n));
    n2 += std::norm(out[n]);
  }
  const double inv = 1.0 / std::sqrt(n2);
  for (auto& c : out) c *= inv;
  return out;
}

double norm(const StateVector& state) {
  return state.amps().norm();
}

void canonicalize_phase(Eigen::Ref<Vector> v) {
  Eigen::Index best = 0;
  double best_abs = -1.0;
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    // Strictly greater with a relative guard keeps "first on ties" stable
    // against last-bit noise.
    const double a = std::abs(v(k));
    if (a > best_abs * (1.0 + 1e-12)) {
      best_abs = a;
      best = k;
    }
  }
  if (best_abs <= 0.0) return;
  v *= std::conj(v(best)) / best_abs;
  v(best) = Complex(best_abs, 0.0);
}

namespace {

// Rebuilds an orthonormal basis of span(cols) from the standard basis vectors
// projected onto that span, taken in index order.
Matrix canonical_subspace_basis(const Matrix& cols) {
  const Eigen::Index d = cols.rows();
  const Eigen::Index m = cols.cols();
  const Matrix proj = cols * cols.adjoint();
  Matrix out(d, m);
  Eigen::Index found = 0;
  std::vector<bool> used(static_cast<std::size_t>(d), false);

  auto residual = [&](Eigen::Index j) {
    Vector w = proj.col(j);
    for (Eigen::Index q = 0; q < found; ++q) w -= out.col(q) * out.col(q).dot(w);
    return w;
  };

  for (Eigen::Index j = 0; j < d && found < m; ++j) {
    Vector w = residual(j);
    const double nw = w.norm();
    if (nw > 1e-3) {
      out.col(found++) = w / nw;
      used[j] = true;
    }
  }
  while (found < m) {
    Eigen::Index best = -1;
    double best_norm = 0.0;
    for (Eigen::Index j = 0; j < d; ++j) {
      if (used[j]) continue;
      const double nw = residual(j).norm();
      if (nw > best_norm) {
        best_norm = nw;
        best = j;
      }
    }
    if (best < 0 || best_norm == 0.0) throw NumericalError("degenerate eigenspace basis reconstruction failed");
    Vector w = residual(best);
    out.col(found++) = w / w.norm();
    used[best] = true;
  }
  return out;
}

}  // namespace

HermitianEig hermitian_eig(const Matrix& M, double hermitian_tol) {
  if (M.rows() != M.cols() || M.rows() == 0) throw InvalidInput("hermitian_eig: matrix must be square");
  if (hermiticity_defect(M) > hermitian_tol) throw InvalidInput("hermitian_eig: matrix is not Hermitian");
  const Matrix H = 0.5 * (M + M.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(H);
  if (solver.info() != Eigen::Success) throw NumericalError("hermitian_eig: eigensolver did not converge");

  const Eigen::Index d = H.rows();
  HermitianEig out;
  out.values = solver.eigenvalues().reverse();
  out.vectors = solver.eigenvectors().rowwise().reverse();

  const double scale = std::max(1.0, out.values.cwiseAbs().maxCoeff());
  const double cluster_tol = 1e-12 * scale;
  Eigen::Index start = 0;
  while (start < d) {
    Eigen::Index end = start + 1;
    while (end < d && out.values(end - 1) - out.values(end) <= cluster_tol) ++end;
    if (end - start > 1) {
      out.vectors.middleCols(start, end - start) =
          canonical_subspace_basis(out.vectors.middleCols(start, end - start));
    }
    start = end;
  }
  for (Eigen::Index k = 0; k < d; ++k) canonicalize_phase(out.vectors.col(k));
  return out;
}

Matrix unitary_from_generator(const Matrix& H) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (H + H.adjoint()));
  const Matrix& v = solver.eigenvectors();
  Vector phases(v.cols());
  for (Eigen::Index k = 0; k < v.cols(); ++k) phases(k) = std::polar(1.0, -solver.eigenvalues()(k));
  return v * phases.asDiagonal() * v.adjoint();
}

namespace pauli {
Matrix x() {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}
Matrix y() {
  Matrix m(2, 2);
  m << 0, Complex(0, -1), Complex(0, 1), 0;
  return m;
}
Matrix z() {
  Matrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}
Matrix identity(int d) { return Matrix::Identity(d, d); }
Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}
}  // namespace pauli

}  // namespace qkrspb

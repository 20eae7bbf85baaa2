#include "qkrspb/rdm.hpp"

#include <cmath>

#include "qkrspb/error.hpp"

namespace qkrspb {

Basis Basis::system_eigenbasis(const Matrix& H_S) {
  auto eig = hermitian_eig(H_S);
  // hermitian_eig is descending; energy levels are numbered from the bottom.
  Matrix cols = eig.vectors.rowwise().reverse();
  return Basis(BasisKind::SystemEigenbasis, std::move(cols));
}

Basis Basis::interaction_eigenbasis(int d_S) {
  if (d_S < 1) throw InvalidInput("basis dimension must be positive");
  return Basis(BasisKind::InteractionEigenbasis, Matrix::Identity(d_S, d_S));
}

Basis Basis::computational(int d) {
  if (d < 1) throw InvalidInput("basis dimension must be positive");
  return Basis(BasisKind::Computational, Matrix::Identity(d, d));
}

Basis Basis::explicit_columns(const Matrix& columns, double tol) {
  if (columns.rows() != columns.cols() || columns.rows() == 0)
    throw InvalidInput("explicit basis must be a square matrix of columns");
  const Matrix overlap = columns.adjoint() * columns;
  const double defect = (overlap - Matrix::Identity(columns.cols(), columns.cols())).cwiseAbs().maxCoeff();
  if (defect > tol) throw InvalidInput("explicit basis columns are not orthonormal");
  return Basis(BasisKind::Explicit, columns);
}

Matrix elements_in_basis(const DensityMatrix& rho, const Basis& basis) {
  if (rho.dim() != basis.dim()) throw InvalidInput("basis dimension does not match the density matrix");
  return basis.columns().adjoint() * rho.matrix() * basis.columns();
}

DensityMatrix partial_trace_env(const StateVector& state) {
  const auto& a = state.amps();
  Matrix rho = a * a.adjoint();
  return DensityMatrix(rho);
}

DensityMatrix partial_trace_qubit(const DensityMatrix& rho_sA, Qubit keep) {
  if (rho_sA.dim() != 4) throw InvalidInput("partial_trace_qubit requires a 4x4 s(x)A matrix");
  Matrix out = Matrix::Zero(2, 2);
  const auto& m = rho_sA.matrix();
  // index = 2 * s + a
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int t = 0; t < 2; ++t) {
        if (keep == Qubit::s)
          out(x, y) += m(2 * x + t, 2 * y + t);
        else
          out(x, y) += m(2 * t + x, 2 * t + y);
      }
  return DensityMatrix(out);
}

DensityMatrix partial_trace_keep(const StateVector& state, Qubit keep) {
  if (state.d_S() != 4) throw InvalidInput("partial_trace_keep requires the two-qubit (d_S = 4) layout");
  return partial_trace_qubit(partial_trace_env(state), keep);
}

DensityMatrix time_average(const MetricSeries& series, const WindowSpec& window) {
  if (!series.has_snapshots()) throw InvalidInput("series carries no RDM snapshots");
  const auto picks = series.select(window);
  CompensatedMatrixSum acc;
  for (auto p : picks) acc.add(series.snapshots()[p].matrix());
  return DensityMatrix(Matrix(acc.value() / static_cast<double>(picks.size())));
}

DensityMatrix diagonal_part(const DensityMatrix& rho, const Basis& basis) {
  const Matrix elems = elements_in_basis(rho, basis);
  const Matrix& B = basis.columns();
  Matrix out = Matrix::Zero(rho.dim(), rho.dim());
  for (int k = 0; k < basis.dim(); ++k) out += elems(k, k).real() * (B.col(k) * B.col(k).adjoint());
  return DensityMatrix(out);
}

std::vector<double> measured_sigmas(const DensityMatrix& rho_bar, const Basis& basis) {
  const Complex tr = rho_bar.trace();
  if (std::abs(tr - 1.0) > 1e-8) throw InvalidInput("measured_sigmas requires unit trace");
  const Matrix elems = elements_in_basis(rho_bar, basis);
  std::vector<double> out(static_cast<std::size_t>(basis.dim()));
  for (int i = 0; i < basis.dim(); ++i) {
    const double p = elems(i, i).real();
    if (p < -1e-10) throw NumericalError("negative diagonal element " + std::to_string(p));
    out[i] = std::sqrt(std::max(p, 0.0));
  }
  return out;
}

}  // namespace qkrspb

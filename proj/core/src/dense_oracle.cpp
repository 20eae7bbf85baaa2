#include "qkrspb/dense_oracle.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <numbers>

#include "qkrspb/error.hpp"
#include "qkrspb/rng.hpp"

namespace qkrspb {

void StaticTotalHamiltonian::validate(double tol) const {
  if (H_S.rows() == 0 || H_S.rows() != H_S.cols()) throw InvalidInput("H_S must be square");
  if (H_E.rows() == 0 || H_E.rows() != H_E.cols()) throw InvalidInput("H_E must be square");
  if (hermiticity_defect(H_S) > tol || hermiticity_defect(H_E) > tol) throw InvalidInput("H_S and H_E must be Hermitian");
  for (const auto& t : terms) {
    if (t.system.rows() != H_S.rows() || t.system.cols() != H_S.cols() || t.environment.rows() != H_E.rows() ||
        t.environment.cols() != H_E.cols())
      throw InvalidInput("interaction term dimensions do not match H_S / H_E");
    if (hermiticity_defect(t.system) > tol || hermiticity_defect(t.environment) > tol)
      throw InvalidInput("interaction factors must be Hermitian");
  }
  if (!(hbar > 0.0)) throw InvalidInput("hbar must be positive");
}

Matrix StaticTotalHamiltonian::total() const {
  validate();
  const int dS = d_S(), dE = d_E();
  Matrix H = pauli::kron(H_S, Matrix::Identity(dE, dE)) + pauli::kron(Matrix::Identity(dS, dS), H_E);
  for (const auto& t : terms) H += pauli::kron(t.system, t.environment);
  return H;
}

Matrix random_goe(int d, double scale, std::uint64_t seed) {
  if (d < 2) throw InvalidInput("random_goe requires d >= 2");
  const CounterRng rng(seed);
  Matrix H = Matrix::Zero(d, d);
  std::uint64_t counter = 0;
  for (int i = 0; i < d; ++i) {
    H(i, i) = std::sqrt(2.0) * scale * rng.gaussian(counter++);
    for (int j = i + 1; j < d; ++j) {
      const double v = scale * rng.gaussian(counter++);
      H(i, j) = v;
      H(j, i) = v;
    }
  }
  return H;
}

ExactPropagator::ExactPropagator(const StaticTotalHamiltonian& H) : d_S_(H.d_S()), d_E_(H.d_E()), hbar_(H.hbar) {
  if (static_cast<long>(d_S_) * d_E_ > kMaxDenseDimension)
    throw RefuseTooLarge("dense evolution limited to d_S * d_E <= " + std::to_string(kMaxDenseDimension));
  Eigen::SelfAdjointEigenSolver<Matrix> solver(H.total());
  if (solver.info() != Eigen::Success) throw NumericalError("total Hamiltonian diagonalization failed");
  energies_ = solver.eigenvalues();
  vectors_ = solver.eigenvectors();
}

StateVector ExactPropagator::evolve(const StateVector& psi0, double t) const {
  if (psi0.d_S() != d_S_ || psi0.d_E() != d_E_) throw InvalidInput("state dimensions do not match the Hamiltonian");
  Vector c = vectors_.adjoint() * psi0.flatten();
  for (Eigen::Index k = 0; k < c.size(); ++k) c(k) *= std::polar(1.0, -energies_(k) * t / hbar_);
  return StateVector::unflatten(vectors_ * c, d_S_, d_E_);
}

double ExactPropagator::mean_level_spacing() const {
  const auto n = energies_.size();
  if (n < 2) return 0.0;
  return (energies_(n - 1) - energies_(0)) / static_cast<double>(n - 1);
}

StateVector exact_evolve(const StaticTotalHamiltonian& H, const StateVector& psi0, double t) {
  return ExactPropagator(H).evolve(psi0, t);
}

Matrix rdm_in_basis(const StateVector& state, const Basis& basis) {
  if (basis.dim() != state.d_S()) throw InvalidInput("basis dimension does not match d_S");
  const Matrix E = basis.columns().adjoint() * state.amps();
  return E * E.adjoint();
}

Matrix rhs_elements(const StateVector& state, const StaticTotalHamiltonian& H, const Basis& basis) {
  if (state.d_S() != H.d_S() || state.d_E() != H.d_E()) throw InvalidInput("state dimensions do not match the Hamiltonian");
  if (basis.dim() != H.d_S()) throw InvalidInput("basis dimension does not match d_S");
  const Matrix& B = basis.columns();
  // Row i of E is the environment component |E_i> in the chosen basis.
  const Matrix E = B.adjoint() * state.amps();
  const Matrix rho = E * E.adjoint();
  const Matrix hs = B.adjoint() * H.H_S * B;
  Matrix W = rho * hs - hs * rho;

  for (const auto& term : H.terms) {
    const Matrix his = B.adjoint() * term.system * B;
    // hie(i, j) = <E_i| H^{IE} |E_j>
    const Matrix hie = E.conjugate() * term.environment * E.transpose();
    W += hie.transpose() * his - his * hie.transpose();
  }
  return Complex(0.0, 1.0 / H.hbar) * W;
}

Matrix RenormalizedSplit::total(const Matrix& H_E) const {
  const int dS = static_cast<int>(H_S_tilde.rows());
  const int dE = static_cast<int>(H_E.rows());
  Matrix H = pauli::kron(H_S_tilde, Matrix::Identity(dE, dE)) + pauli::kron(Matrix::Identity(dS, dS), H_E);
  for (const auto& t : terms_tilde) H += pauli::kron(t.system, t.environment);
  return H;
}

RenormalizedSplit renormalize(const StaticTotalHamiltonian& H) {
  RenormalizedSplit out;
  out.H_S_tilde = H.H_S;
  const int dE = H.d_E();
  for (const auto& t : H.terms) {
    const double hbar_eta = t.environment.trace().real() / dE;
    out.h_bar.push_back(hbar_eta);
    out.H_S_tilde += hbar_eta * t.system;
    out.terms_tilde.push_back({t.system, t.environment - hbar_eta * Matrix::Identity(dE, dE)});
  }
  return out;
}

double commutator_norm(const Matrix& A, const DensityMatrix& rho) {
  if (A.rows() != rho.dim() || A.cols() != rho.dim()) throw InvalidInput("commutator_norm: dimension mismatch");
  return (A * rho.matrix() - rho.matrix() * A).norm();
}

double default_burn_in(const ExactPropagator& prop, double hbar) {
  const double spacing = prop.mean_level_spacing();
  if (!(spacing > 0.0)) return 0.0;
  return 20.0 * hbar / spacing;
}

StationarityPair stationarity_scan_pair(const StaticTotalHamiltonian& H, const ExactPropagator& prop,
                                        const StateVector& psi0, const StationarityScanSpec& spec) {
  for (double t : spec.times)
    if (t < spec.burn_in) throw InvalidInput("stationarity_scan: requested time precedes the burn-in");
  const Matrix H_tilde = renormalize(H).H_S_tilde;
  StationarityPair out;
  for (double t : spec.times) {
    const DensityMatrix rho = partial_trace_env(prop.evolve(psi0, t));
    out.bare.push_back(commutator_norm(H.H_S, rho));
    out.renormalized.push_back(commutator_norm(H_tilde, rho));
  }
  return out;
}

std::vector<double> stationarity_scan(const StaticTotalHamiltonian& H, const StateVector& psi0,
                                      const StationarityScanSpec& spec) {
  const ExactPropagator prop(H);
  auto pair = stationarity_scan_pair(H, prop, psi0, spec);
  return spec.use_renormalized ? pair.renormalized : pair.bare;
}

Matrix dense_floquet_matrix(const FloquetModel& model) {
  const auto& p = model.params();
  const int dS = p.d_S();
  const int dE = p.d_E;
  const long total = static_cast<long>(dS) * dE;
  if (total > kMaxDenseDimension) throw RefuseTooLarge("dense Floquet matrix too large");

  const double pi = std::numbers::pi;
  const double hbar = 2.0 * pi / dE;
  const double k = p.K / hbar;

  // F(m, n) = d^{-1/2} exp(-i m theta_n), m on the symmetric momentum grid.
  Matrix F(dE, dE);
  RealVector m_of(dE);
  for (int r = 0; r < dE; ++r) m_of(r) = -dE / 2 + r;
  for (int r = 0; r < dE; ++r)
    for (int n = 1; n <= dE; ++n) F(r, n - 1) = std::polar(1.0 / std::sqrt(static_cast<double>(dE)), -m_of(r) * 2.0 * pi * n / dE);
  Vector free(dE);
  for (int r = 0; r < dE; ++r) free(r) = std::polar(1.0, -hbar * m_of(r) * m_of(r) / 2.0);
  const Matrix rotor = F.adjoint() * free.asDiagonal() * F;

  Matrix branch = Matrix::Zero(total, total);
  for (int b = 0; b < dS; ++b) {
    const double z = coupled_branch_sign(p.model, b);
    Vector kick(dE);
    for (int n = 1; n <= dE; ++n) kick(n - 1) = std::polar(1.0, -(k + p.lambda * z) * std::cos(2.0 * pi * n / dE));
    branch.block(static_cast<Eigen::Index>(b) * dE, static_cast<Eigen::Index>(b) * dE, dE, dE) = rotor * kick.asDiagonal();
  }
  const Matrix gen = system_generator(p);
  const Matrix u_sys = (Complex(0.0, -1.0) * gen).exp();
  return pauli::kron(u_sys, Matrix::Identity(dE, dE)) * branch;
}

}  // namespace qkrspb

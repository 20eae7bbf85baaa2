#include <doctest.h>

#include <cmath>
#include <numbers>
#include <thread>

#include "qkrspb/dense_oracle.hpp"
#include "qkrspb/error.hpp"
#include "qkrspb/qkr_model.hpp"
#include "qkrspb/rdm.hpp"
#include "support.hpp"

using namespace qkrspb;
using qkrspb::test::max_abs;
using qkrspb::test::random_state;

namespace {

ModelParams qubit(int d_E, double lambda) {
  ModelParams p;
  p.d_E = d_E;
  p.lambda = lambda;
  return p;
}

ModelParams two_qubit(int d_E, double lambda) {
  ModelParams p;
  p.model = ModelKind::TwoQubit;
  p.d_E = d_E;
  p.lambda = lambda;
  return p;
}

}  // namespace

TEST_CASE("ModelParams validation") {
  CHECK_NOTHROW(qubit(4096, 0.15).validate());
  CHECK_THROWS_AS(qubit(100, 0.1).validate(), ConfigError);
  CHECK_THROWS_AS(qubit(1, 0.1).validate(), ConfigError);
  auto p = qubit(64, 0.1);
  p.K = -1.0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p.K = 0.0;
  CHECK_NOTHROW(p.validate());
  CHECK(two_qubit(64, 0).d_S() == 4);
  CHECK(qubit(4096, 0).hbar_eff() == doctest::Approx(2.0 * std::numbers::pi / 4096));
}

TEST_CASE("build_model: reference qubit configuration") {
  const auto m = build_model(qubit(4096, 0.15));
  CHECK(m.d_S() == 2);
  CHECK(m.d_E() == 4096);
  const double hb = 2.0 * std::numbers::pi / 4096;
  const Matrix expected = 800.0 * hb * (pauli::x() + pauli::z());
  CHECK(max_abs(m.system_generator() - expected) < 1e-12);
  CHECK(max_abs(m.system_unitary().adjoint() * m.system_unitary() - Matrix::Identity(2, 2)) < 1e-13);
  for (int n = 0; n < 4096; n += 511) CHECK(std::abs(std::abs(m.kick_phases()(0, n)) - 1.0) < 1e-14);
}

TEST_CASE("build_model: decoupled and trivial limits") {
  const auto m = build_model(qubit(256, 0.0));
  CHECK(max_abs(Matrix(m.kick_phases().row(0) - m.kick_phases().row(1))) == 0.0);

  auto p = qubit(64, 0.3);
  p.qubit = {0.0, 0.0};
  CHECK(max_abs(build_model(p).system_unitary() - Matrix::Identity(2, 2)) < 1e-15);

  auto q = two_qubit(64, 0.3);
  q.two_qubit = {0.0, 0.0, 0.0, 0.0, EpsilonUnits::HbarEff};
  CHECK(max_abs(build_model(q).system_unitary() - Matrix::Identity(4, 4)) < 1e-15);
}

TEST_CASE("two-qubit generator and epsilon units") {
  auto p = two_qubit(256, 0.1);
  const double hb = p.hbar_eff();
  using namespace pauli;
  const Matrix I2 = identity(2);
  const Matrix base = hb * (500.0 * kron(x(), I2) + 1000.0 * kron(z(), I2) + 1500.0 * kron(I2, x()));
  CHECK(max_abs(system_generator(p) - (base + 1000.0 * hb * kron(z(), z()))) < 1e-12);
  p.two_qubit.epsilon_units = EpsilonUnits::Absolute;
  CHECK(max_abs(system_generator(p) - (base + 1000.0 * kron(z(), z()))) < 1e-9);
  // only sigma_z^A couples: branch sign follows the A index
  CHECK(coupled_branch_sign(ModelKind::TwoQubit, 0) == 1.0);
  CHECK(coupled_branch_sign(ModelKind::TwoQubit, 1) == -1.0);
  CHECK(coupled_branch_sign(ModelKind::TwoQubit, 2) == 1.0);
  CHECK(coupled_branch_sign(ModelKind::TwoQubit, 3) == -1.0);
}

TEST_CASE("floquet_step: free rotor momentum eigenstate picks up exp(-i hbar m^2 / 2)") {
  const int d = 64;
  auto p = qubit(d, 0.0);
  p.K = 0.0;
  p.qubit = {0.0, 0.0};
  const auto model = build_model(p);
  const auto th = theta_grid(d);
  for (int m : {-32, -5, 0, 3, 31}) {
    StateVector psi(2, d);
    for (int n = 0; n < d; ++n) psi(0, n) = std::polar(1.0 / std::sqrt(d), m * th[n]);
    const auto out = floquet_step(model, psi);
    const Complex phase = std::polar(1.0, -p.hbar_eff() * m * m / 2.0);
    CHECK(max_abs(Matrix(out.amps() - phase * psi.amps())) < 1e-13);
  }
}

TEST_CASE("floquet_step preserves the norm and matches the dense matrix") {
  for (auto p : {qubit(8, 0.15), two_qubit(8, 0.1), qubit(4, 0.7), two_qubit(4, 0.2)}) {
    const auto model = build_model(p);
    const Matrix U = dense_floquet_matrix(model);
    CHECK(max_abs(U.adjoint() * U - Matrix::Identity(U.rows(), U.cols())) < 1e-12);
    for (int s = 0; s < 5; ++s) {
      const auto psi = random_state(p.d_S(), p.d_E, 100 + s);
      const auto out = floquet_step(model, psi);
      CHECK(std::abs(norm(out) - norm(psi)) < 1e-12);
      CHECK((out.flatten() - U * psi.flatten()).cwiseAbs().maxCoeff() < 1e-10);
    }
  }
}

TEST_CASE("floquet_step rejects mismatched states") {
  const auto model = build_model(qubit(16, 0.1));
  CHECK_THROWS_AS(floquet_step(model, StateVector(2, 8)), InvalidInput);
  CHECK_THROWS_AS(floquet_step(model, StateVector(4, 16)), InvalidInput);
}

TEST_CASE("lambda = 0: RDM evolves by conjugation with the system unitary") {
  const auto model = build_model(qubit(128, 0.0));
  auto psi = random_state(2, 128, 3);
  Matrix rho = partial_trace_env(psi).matrix();
  const Matrix& U = model.system_unitary();
  for (int t = 0; t < 20; ++t) {
    model.step(psi);
    rho = U * rho * U.adjoint();
    CHECK(max_abs(partial_trace_env(psi).matrix() - rho) < 1e-12);
  }
}

TEST_CASE("lambda = 0: environment stays pure for a product initial state") {
  for (auto p : {qubit(64, 0.0), two_qubit(64, 0.0)}) {
    const auto model = build_model(p);
    std::vector<Complex> sys(static_cast<std::size_t>(p.d_S()), 1.0);
    auto psi = make_product_state(sys, haar_random_env(64, 9));
    for (int t = 0; t < 50; ++t) {
      model.step(psi);
      // reduced environment purity equals the system purity for a pure total state
      CHECK(std::abs(partial_trace_env(psi).purity() - 1.0) < 1e-10);
    }
  }
}

TEST_CASE("Omega_x = 0: sigma_z eigenstate is conserved") {
  auto p = qubit(256, 0.5);
  p.qubit.x_S = 0.0;
  const auto model = build_model(p);
  const std::vector<Complex> up{1.0, 0.0};
  auto psi = make_product_state(up, haar_random_env(256, 4));
  for (int t = 0; t < 200; ++t) {
    model.step(psi);
    const Matrix rho = partial_trace_env(psi).matrix();
    REQUIRE(std::abs(rho(0, 0) - 1.0) < 1e-10);
    REQUIRE(std::abs(rho(0, 1)) < 1e-10);
  }
}

TEST_CASE("evolve") {
  const auto model = build_model(qubit(64, 0.0));
  const auto psi = random_state(2, 64, 1);

  SUBCASE("n_kicks = 0") {
    const auto r = evolve(model, psi, 0, {});
    CHECK(r.series.empty());
    CHECK(r.final_state.amps() == psi.amps());
  }
  SUBCASE("lambda = 0 keeps the RDM spectrum") {
    RecorderSpec rec;
    rec.audit_norm = true;
    const auto r = evolve(model, psi, 100, rec);
    REQUIRE(r.series.size() == 100);
    const auto ev0 = hermitian_eig(r.series.snapshots().front().matrix()).values;
    for (const auto& s : r.series.snapshots()) CHECK((hermitian_eig(s.matrix()).values - ev0).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(r.max_norm_drift < 1e-12);
  }
  SUBCASE("recorder window and stride") {
    RecorderSpec rec;
    rec.record_from = 10;
    rec.record_to = 30;
    rec.stride = 5;
    const auto r = evolve(model, psi, 40, rec);
    CHECK(r.series.kicks() == std::vector<long>{10, 15, 20, 25, 30});
  }
  SUBCASE("matches repeated floquet_step") {
    auto a = psi;
    for (int t = 0; t < 7; ++t) a = floquet_step(model, a);
    CHECK(evolve(model, psi, 7, {}).final_state.amps() == a.amps());
  }
}

TEST_CASE("floquet_step is deterministic across threads") {
  const auto model = build_model(two_qubit(1024, 0.1));
  const auto psi0 = random_state(4, 1024, 77);
  auto ref = psi0;
  for (int t = 0; t < 10; ++t) model.step(ref);
  std::vector<StateVector> out(3, psi0);
  std::vector<std::thread> pool;
  for (int k = 0; k < 3; ++k)
    pool.emplace_back([&, k] {
      for (int t = 0; t < 10; ++t) model.step(out[k]);
    });
  for (auto& th : pool) th.join();
  for (const auto& o : out) CHECK(o.amps() == ref.amps());
}

TEST_CASE("default initial state") {
  const auto p = two_qubit(64, 0.1);
  const auto psi = default_initial_state(p, 5);
  CHECK(norm(psi) == doctest::Approx(1.0).epsilon(1e-14));
  const Matrix rho = partial_trace_env(psi).matrix();
  CHECK(max_abs(rho - Matrix::Constant(4, 4, 0.25)) < 1e-14);
  CHECK(default_initial_state(p, 5).amps() == psi.amps());
}

TEST_CASE("momentum_of_bin") {
  CHECK(momentum_of_bin(0, 8) == 0);
  CHECK(momentum_of_bin(3, 8) == 3);
  CHECK(momentum_of_bin(4, 8) == -4);
  CHECK(momentum_of_bin(7, 8) == -1);
}

#include <doctest.h>

#include <cmath>
#include <numbers>

#include "qkrspb/error.hpp"
#include "qkrspb/metrics.hpp"
#include "qkrspb/rng.hpp"
#include "support.hpp"

using namespace qkrspb;
using qkrspb::test::max_abs;
using qkrspb::test::random_density;
using qkrspb::test::random_unitary;

namespace {

DensityMatrix diag(std::initializer_list<double> v) {
  std::vector<double> d(v);
  return DensityMatrix::diagonal(d);
}

Matrix rotation(double phi) {
  Matrix R(2, 2);
  R << std::cos(phi), -std::sin(phi), std::sin(phi), std::cos(phi);
  return R;
}

// rho with eigenvectors given by the columns of V and eigenvalues (0.8, 0.2)
DensityMatrix with_eigenbasis(const Matrix& V) {
  Vector ev(2);
  ev << 0.8, 0.2;
  return DensityMatrix(Matrix(V * ev.asDiagonal() * V.adjoint()));
}

}  // namespace

TEST_CASE("trace_distance") {
  const DensityMatrix r(random_density(3, 1));
  CHECK(trace_distance(r, r) < 1e-15);
  CHECK(trace_distance(diag({1, 0}), diag({0, 1})) == doctest::Approx(1.0));
  CHECK(trace_distance(diag({0.75, 0.25}), DensityMatrix::identity_over_d(2)) == doctest::Approx(0.25));
  CHECK_THROWS_AS(trace_distance(diag({1, 0}), DensityMatrix::identity_over_d(3)), InvalidInput);
}

TEST_CASE("trace_distance is a metric on 1000 random triples") {
  double worst_sym = 0.0, worst_tri = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const int d = 2 + t % 3;
    const DensityMatrix a(random_density(d, 3 * t)), b(random_density(d, 3 * t + 1)), c(random_density(d, 3 * t + 2));
    const double ab = trace_distance(a, b), ba = trace_distance(b, a);
    worst_sym = std::max(worst_sym, std::abs(ab - ba));
    worst_tri = std::max(worst_tri, ab - trace_distance(a, c) - trace_distance(c, b));
    REQUIRE(ab >= 0.0);
    REQUIRE(ab <= 1.0 + 1e-12);
  }
  CHECK(worst_sym < 1e-15);
  CHECK(worst_tri < 1e-10);
}

TEST_CASE("fbar_and_fluct") {
  SUBCASE("constant series") {
    MetricSeries s;
    for (int t = 1; t <= 10; ++t) s.push(t, DensityMatrix::identity_over_d(2));
    const auto f = fbar_and_fluct(s, {1, 10, 1});
    CHECK(f.fbar < 1e-15);
    CHECK(f.delta_f < 1e-15);
  }
  SUBCASE("alternating populations") {
    MetricSeries s;
    for (int t = 1; t <= 10; ++t) s.push(t, t % 2 ? diag({1, 0}) : diag({0, 1}));
    const auto f = fbar_and_fluct(s, {1, 10, 1});
    CHECK(f.fbar == doctest::Approx(0.5));
    CHECK(f.delta_f < 1e-15);
  }
  SUBCASE("empty window") {
    MetricSeries s;
    s.push(1, diag({1, 0}));
    s.push(5, diag({1, 0}));
    CHECK_THROWS_AS(fbar_and_fluct(s, {2, 4, 1}), InvalidInput);
  }
}

TEST_CASE("offdiag_deviation") {
  SUBCASE("constant series") {
    MetricSeries s;
    for (int t = 1; t <= 10; ++t) s.push(t, DensityMatrix(random_density(2, 4)));
    CHECK(offdiag_deviation(s, 0, 1, {1, 10, 1}) < 1e-15);
  }
  SUBCASE("calibration on Gaussian off-diagonals") {
    const double v = 1e-4;
    const CounterRng rng(3);
    MetricSeries s;
    for (int t = 1; t <= 10000; ++t) {
      Matrix m = 0.5 * Matrix::Identity(2, 2);
      m(0, 1) = std::sqrt(v / 2.0) * rng.gaussian_pair(t);
      m(1, 0) = std::conj(m(0, 1));
      s.push(t, DensityMatrix(m));
    }
    CHECK(offdiag_deviation(s, 0, 1, {1, 10000, 1}) == doctest::Approx(std::sqrt(v)).epsilon(0.05));
  }
  SUBCASE("basis and index checks") {
    MetricSeries s;
    s.push(1, diag({1, 0}));
    CHECK_THROWS_AS(offdiag_deviation(s, 0, 0, {1, 1, 1}), InvalidInput);
    CHECK_THROWS_AS(offdiag_deviation(s, 0, 2, {1, 1, 1}), InvalidInput);
    MetricSeries bare;
    bare.push_kick(1);
    CHECK_THROWS_AS(offdiag_deviation(bare, 0, 1, {1, 1, 1}), InvalidInput);
  }
}

TEST_CASE("g_energy_diag") {
  const Basis z = Basis::computational(2);
  CHECK(g_energy_diag(diag({0.3, 0.7}), z) < 1e-15);
  Matrix m = diag({0.6, 0.4}).matrix();
  m(0, 1) = m(1, 0) = 0.1;
  CHECK(g_energy_diag(DensityMatrix(m), z) == doctest::Approx(0.1).epsilon(1e-13));

  SUBCASE("qubit closed form: g = |off-diagonal| in the basis") {
    double worst = 0.0;
    for (int t = 0; t < 200; ++t) {
      const DensityMatrix rho(random_density(2, 40 + t));
      const Basis b = Basis::explicit_columns(random_unitary(2, 900 + t));
      worst = std::max(worst, std::abs(g_energy_diag(rho, b) - std::abs(elements_in_basis(rho, b)(0, 1))));
    }
    CHECK(worst < 1e-12);
  }
  SUBCASE("zero iff rho commutes with the basis projectors") {
    const Matrix U = random_unitary(4, 5);
    const Basis b = Basis::explicit_columns(U);
    Vector p(4);
    p << 0.4, 0.3, 0.2, 0.1;
    const DensityMatrix commuting(Matrix(U * p.asDiagonal() * U.adjoint()));
    CHECK(g_energy_diag(commuting, b) < 1e-10);
    const DensityMatrix generic(random_density(4, 6));
    CHECK(g_energy_diag(generic, b) > 1e-10);
  }
}

TEST_CASE("g bounds") {
  CHECK(g_bound_model2({1, 0, 0, 0}, 4, 4096, 10000) == 0.0);
  const std::vector<double> q{0.5, 0.5, 0.5, 0.5};
  const double b = g_bound_model2(q, 4, 4096, 10000);
  CHECK(b == doctest::Approx(0.5 * std::sqrt(4.0 / (1e4 * 4096)) * std::sqrt(12.0 / 16.0)));
  CHECK(b == doctest::Approx(1.35e-4).epsilon(0.01));
  CHECK(g_bound_model2(q, 4, 4096, 20000) == doctest::Approx(b / std::sqrt(2.0)));
  CHECK_THROWS_AS(g_bound_model2({0.5, 0.5}, 2, 16, 10), InvalidInput);

  const std::vector<double> s{std::sqrt(0.5), std::sqrt(0.5)};
  CHECK(g_rms_qubit(s, 4096, 10000) == doctest::Approx(0.5 / std::sqrt(4096.0 * 1e4)));
  CHECK(g_rms_qubit(s, 4096, 10000) == doctest::Approx(7.8e-5).epsilon(0.01));
}

TEST_CASE("basis_distance_d") {
  const Basis z = Basis::computational(2);
  CHECK(basis_distance_d(with_eigenbasis(Matrix::Identity(2, 2)), z) < 1e-15);
  CHECK(basis_distance_d(with_eigenbasis(rotation(std::numbers::pi / 4)), z) == doctest::Approx(0.5));
  for (double phi : {0.1, 0.3, 0.6, 0.75}) {
    CHECK(basis_distance_d(with_eigenbasis(rotation(phi)), z) == doctest::Approx(std::pow(std::sin(phi), 2)).epsilon(1e-12));
  }
  SUBCASE("invariant under phases and relabeling of the eta basis") {
    const auto rho = with_eigenbasis(rotation(0.4));
    const double ref = basis_distance_d(rho, z);
    Matrix phased = Matrix::Identity(2, 2);
    phased(0, 0) = std::polar(1.0, 0.7);
    phased(1, 1) = std::polar(1.0, -2.1);
    Matrix swapped = Matrix::Zero(2, 2);
    swapped(0, 1) = swapped(1, 0) = 1.0;
    CHECK(basis_distance_d(rho, Basis::explicit_columns(phased)) == doctest::Approx(ref).epsilon(1e-13));
    CHECK(basis_distance_d(rho, Basis::explicit_columns(swapped)) == doctest::Approx(ref).epsilon(1e-13));
    Matrix rho_phase = with_eigenbasis(rotation(0.4) * phased).matrix();
    CHECK(basis_distance_d(DensityMatrix(rho_phase), z) == doctest::Approx(ref).epsilon(1e-13));
  }
  CHECK_THROWS_AS(basis_distance_d(DensityMatrix::identity_over_d(4), Basis::computational(4)), InvalidInput);
}

TEST_CASE("entropy_width_D") {
  const Basis z4 = Basis::computational(4);
  Vector p(4);
  p << 0.4, 0.3, 0.2, 0.1;
  CHECK(entropy_width_D(DensityMatrix(Matrix(p.cast<Complex>().asDiagonal())), z4) < 1e-14);

  // eigenvectors = Fourier columns: every overlap 1/4
  Matrix F(4, 4);
  for (int m = 0; m < 4; ++m)
    for (int n = 0; n < 4; ++n) F(m, n) = std::polar(0.5, 2.0 * std::numbers::pi * m * n / 4);
  const DensityMatrix uni(Matrix(F * p.asDiagonal() * F.adjoint()));
  CHECK(entropy_width_D(uni, z4) == doctest::Approx(std::log(4.0)));

  const auto rho = with_eigenbasis(rotation(std::numbers::pi / 6));  // overlaps 3/4, 1/4
  CHECK(entropy_width_D(rho, Basis::computational(2)) ==
        doctest::Approx(-0.75 * std::log(0.75) - 0.25 * std::log(0.25)));
  CHECK(entropy_width_D(rho, Basis::computational(2)) == doctest::Approx(0.5623).epsilon(1e-4));

  SUBCASE("invariant under permutation and phases of the eta basis") {
    const DensityMatrix r(random_density(4, 12));
    const double ref = entropy_width_D(r, z4);
    Matrix P = Matrix::Zero(4, 4);
    P(0, 2) = std::polar(1.0, 0.3);
    P(1, 0) = std::polar(1.0, -1.0);
    P(2, 3) = 1.0;
    P(3, 1) = std::polar(1.0, 2.2);
    CHECK(entropy_width_D(r, Basis::explicit_columns(P)) == doctest::Approx(ref).epsilon(1e-12));
  }
}

TEST_CASE("eigen_degenerate") {
  CHECK(eigen_degenerate(DensityMatrix::identity_over_d(2)));
  CHECK_FALSE(eigen_degenerate(diag({0.6, 0.4})));
}

TEST_CASE("time_averaged_metric") {
  MetricSeries s;
  for (int t = 1; t <= 101; ++t) s.push_kick(t);
  s.set_channel("c", std::vector<double>(101, 0.25));
  std::vector<double> ramp;
  for (int t = 0; t <= 100; ++t) ramp.push_back(t / 100.0);
  s.set_channel("ramp", ramp);
  CHECK(time_averaged_metric(s, "c", {1, 101, 1}) == 0.25);
  CHECK(time_averaged_metric(s, "ramp", {1, 101, 1}) == doctest::Approx(0.5));
  CHECK_THROWS_AS(time_averaged_metric(s, "missing", {1, 101, 1}), InvalidInput);
}

TEST_CASE("depolarization_distance") {
  CHECK(depolarization_distance(DensityMatrix::identity_over_d(2)) < 1e-16);
  CHECK(depolarization_distance(diag({1, 0})) == doctest::Approx(0.5));
  CHECK(depolarization_distance(diag({0.9, 0.1})) == doctest::Approx(0.4));
}

TEST_CASE("loglog_slope") {
  std::vector<std::pair<double, double>> exact, flat, noisy;
  const CounterRng rng(17);
  for (int e = 6; e <= 14; ++e) {
    const double d = std::ldexp(1.0, e);
    exact.emplace_back(d, 3.0 / std::sqrt(d));
    flat.emplace_back(d, 0.7);
    noisy.emplace_back(d, 3.0 / std::sqrt(d) * (1.0 + 0.05 * (2.0 * rng.uniform(e) - 1.0)));
  }
  const auto fe = loglog_slope(exact);
  CHECK(std::abs(fe.slope + 0.5) < 1e-12);
  CHECK(fe.residual < 1e-12);
  CHECK(fe.points.front().first == doctest::Approx(6.0));
  CHECK(std::abs(loglog_slope(flat).slope) < 1e-15);
  CHECK(loglog_slope(noisy).slope == doctest::Approx(-0.5).epsilon(0.1));
  CHECK_THROWS_AS(loglog_slope({{1, 1}, {2, 1}}), InvalidInput);
  CHECK_THROWS_AS(loglog_slope({{1, 1}, {2, 0}, {4, 1}}), InvalidInput);
}

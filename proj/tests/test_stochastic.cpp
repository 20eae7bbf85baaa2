#include <doctest.h>

#include <cmath>
#include <numbers>

#include "qkrspb/error.hpp"
#include "qkrspb/experiment.hpp"
#include "qkrspb/stochastic.hpp"
#include "support.hpp"

using namespace qkrspb;

namespace {
const std::vector<double> kSigmas{std::sqrt(0.3), std::sqrt(0.7)};
}

TEST_CASE("make_ensemble") {
  const auto a = make_ensemble(256, kSigmas, 4), b = make_ensemble(256, kSigmas, 4);
  CHECK(a.X == b.X);
  CHECK(a.X.rows() == 2);
  CHECK(a.X.cols() == 256);
  CHECK_THROWS_AS(make_ensemble(0, kSigmas, 1), InvalidInput);
  CHECK_THROWS_AS(make_ensemble(4, {}, 1), InvalidInput);

  const auto big = make_ensemble(1 << 16, kSigmas, 9);
  for (int i = 0; i < 2; ++i) {
    const double m2 = big.X.row(i).cwiseAbs2().mean();
    CHECK(m2 == doctest::Approx(kSigmas[i] * kSigmas[i]).epsilon(0.02));
    const double re2 = big.X.row(i).real().cwiseAbs2().mean();
    CHECK(re2 == doctest::Approx(kSigmas[i] * kSigmas[i] / 2).epsilon(0.03));
  }
}

TEST_CASE("spectra") {
  const auto c = SpectrumSpec::cosine().values(8);
  CHECK(c[7] == doctest::Approx(1.0));
  CHECK(c[3] == doctest::Approx(-1.0));
  double s = 0.0;
  for (double v : SpectrumSpec::cosine().values(1024)) s += v;
  CHECK(std::abs(s) < 1e-10);
  for (double v : SpectrumSpec::bounded_random(3).values(1000)) {
    REQUIRE(v >= -1.0);
    REQUIRE(v <= 1.0);
  }
  CHECK(SpectrumSpec::bounded_random(3).values(50) == SpectrumSpec::bounded_random(3).values(50));
  const auto p = SpectrumSpec::power_law(0.25).values(16);
  CHECK(p[15] == doctest::Approx(1.0));
  CHECK(p[0] == doctest::Approx(std::pow(1.0 / 16, 0.25)));
  for (double v : SpectrumSpec::constant_value(2.5).values(5)) CHECK(v == 2.5);
}

TEST_CASE("weighted_quadratic") {
  SUBCASE("constant spectrum equals the Gram element") {
    const auto e = make_ensemble(512, kSigmas, 2);
    const Complex w = weighted_quadratic(e, SpectrumSpec::constant_value(1.0), 0, 0);
    CHECK(std::abs(w - e.X.row(0).cwiseAbs2().mean()) < 1e-15);
    CHECK(std::abs(w - gram_limit_check(e, {0, 0})) < 1e-15);
  }
  SUBCASE("hand computed d = 4") {
    CoefficientEnsemble e;
    e.d = 4;
    e.sigmas = {1.0, 1.0};
    e.X.resize(2, 4);
    e.X << Complex(1, 0), Complex(0, 1), Complex(2, 0), Complex(1, 1), Complex(0, 1), Complex(1, 0), Complex(1, -1),
        Complex(3, 0);
    const std::vector<double> h{0.5, -1.0, 0.25, 1.0};
    // (1/4) sum h_n conj(X_1n) X_0n
    const Complex expect = (0.5 * std::conj(Complex(0, 1)) * Complex(1, 0) - 1.0 * std::conj(Complex(1, 0)) * Complex(0, 1) +
                            0.25 * std::conj(Complex(1, -1)) * Complex(2, 0) + 1.0 * std::conj(Complex(3, 0)) * Complex(1, 1)) /
                           4.0;
    CHECK(std::abs(weighted_quadratic(e, h, 0, 1) - expect) < 1e-14);
    CHECK_THROWS_AS(weighted_quadratic(e, h, 0, 2), InvalidInput);
    CHECK_THROWS_AS(weighted_quadratic(e, std::vector<double>{1.0}, 0, 1), InvalidInput);
  }
  SUBCASE("triangle bound for |h| <= 1") {
    for (int t = 0; t < 50; ++t) {
      const int d = 16 + 7 * t;
      const auto e = make_ensemble(d, kSigmas, 100 + t);
      for (const auto& spec : {SpectrumSpec::cosine(), SpectrumSpec::bounded_random(t), SpectrumSpec::power_law(0.25)}) {
        const auto h = spec.values(d);
        double bound = 0.0;
        for (int n = 0; n < d; ++n) bound += std::abs(e.X(1, n)) * std::abs(e.X(0, n));
        bound /= d;
        REQUIRE(std::abs(weighted_quadratic(e, h, 0, 1)) <= bound * (1.0 + 1e-14));
      }
    }
  }
  SUBCASE("cosine diagonal tends to zero") {
    const auto e = make_ensemble(1 << 16, kSigmas, 5);
    CHECK(std::abs(weighted_quadratic(e, SpectrumSpec::cosine(), 1, 1)) < 0.02);
  }
}

TEST_CASE("gram_limit_check") {
  const auto e = make_ensemble(1 << 16, kSigmas, 8);
  CHECK(gram_limit_check(e, {1, 1}).real() == doctest::Approx(0.7).epsilon(0.02));
  CHECK(std::abs(gram_limit_check(e, {0, 1})) < 5.0 * std::sqrt(0.21 / (1 << 16)));
  const auto one = make_ensemble(1, kSigmas, 2);
  CHECK(std::abs(gram_limit_check(one, {0, 1}) - one.X(0, 0) * std::conj(one.X(1, 0))) < 1e-16);
}

TEST_CASE("convergence_scan at reduced size") {
  std::vector<int> dims;
  for (int e = 6; e <= 12; ++e) dims.push_back(1 << e);
  const auto f1 = convergence_scan(SpectrumSpec::cosine(), kSigmas, dims, 60, {0, 1}, 1);
  CHECK(f1.slope == doctest::Approx(-0.5).epsilon(0.2));
  const auto f2 = convergence_scan(SpectrumSpec::constant_value(1.0), kSigmas, dims, 60, {0, 0}, 2);
  CHECK(f2.slope == doctest::Approx(-0.5).epsilon(0.2));
  CHECK_THROWS_AS(convergence_scan(SpectrumSpec::cosine(), kSigmas, dims, 10, {0, 1}, 1), InvalidInput);
  CHECK_THROWS_AS(convergence_scan(SpectrumSpec::cosine(), kSigmas, {64, 32, 128}, 40, {0, 1}, 1), InvalidInput);
  CHECK_THROWS_AS(convergence_scan(SpectrumSpec::cosine(), kSigmas, dims, 40, {0, 5}, 1), InvalidInput);
}

TEST_CASE("basis_rotation_invariance") {
  const int d = 256;
  const auto e = make_ensemble(d, kSigmas, 21);
  SUBCASE("identity") {
    const auto r = basis_rotation_invariance(e, Matrix::Identity(d, d));
    CHECK(r.rotated == e.X);
  }
  SUBCASE("permutation") {
    Matrix P = Matrix::Zero(d, d);
    for (int n = 0; n < d; ++n) P((n * 37) % d, n) = 1.0;
    const auto r = basis_rotation_invariance(e, P);
    for (int n = 0; n < d; ++n) REQUIRE(r.rotated(1, (n * 37) % d) == e.X(1, n));
  }
  SUBCASE("Fourier rotation keeps the component variance") {
    const auto big = make_ensemble(2048, kSigmas, 22);
    const auto r = basis_rotation_invariance(big, fourier_matrix(2048));
    for (int i = 0; i < 2; ++i) {
      const double s2 = kSigmas[i] * kSigmas[i];
      // |Y|^2 is exponential with mean s2: standard error s2 / sqrt(d)
      CHECK(std::abs(r.row_variance[i] - s2) < 3.0 * s2 / std::sqrt(2048.0) + std::norm(r.row_mean[i]));
    }
    CHECK(std::abs(r.covariance(0, 1)) < 4.0 * std::sqrt(0.21 / 2048));
  }
  SUBCASE("non-unitary input") {
    CHECK_THROWS_AS(basis_rotation_invariance(e, 2.0 * Matrix::Identity(d, d)), InvalidInput);
  }
}

TEST_CASE("fourier_matrix is unitary") {
  const Matrix F = fourier_matrix(16);
  CHECK(qkrspb::test::max_abs(F.adjoint() * F - Matrix::Identity(16, 16)) < 1e-14);
  CHECK(std::abs(F(1, 1) - std::polar(0.25, -2.0 * std::numbers::pi / 16)) < 1e-15);
}

TEST_CASE("stochastic suite at reduced size") {
  StochasticSuiteConfig c;
  c.log2_max = 11;
  c.rotated_log2_max = 9;
  c.trials = 40;
  c.slope_tol = 0.1;
  const auto rep = run_stochastic_suite(c, 1);
  CHECK(rep.scans.size() == 10);
  for (const auto& s : rep.scans) {
    INFO(s.name, " slope ", s.fit.slope);
    CHECK(s.pass);
  }
}

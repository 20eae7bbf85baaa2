#include "qkrspb/qkr_model.hpp"

#include <fftw3.h>

#include <bit>
#include <cmath>
#include <mutex>
#include <numbers>

#include "qkrspb/error.hpp"
#include "qkrspb/rdm.hpp"

namespace qkrspb {

namespace {

// FFTW planning is not thread-safe; execution with the new-array interface is.
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

constexpr long double kTwoPiL = 6.283185307179586476925286766559005768L;

}  // namespace

double ModelParams::hbar_eff() const noexcept {
  return 2.0 * std::numbers::pi / static_cast<double>(d_E);
}

void ModelParams::validate() const {
  if (d_E < 2 || !std::has_single_bit(static_cast<unsigned>(d_E)))
    throw ConfigError("d_E must be a power of two >= 2, got " + std::to_string(d_E));
  if (!(K >= 0.0) || !std::isfinite(K)) throw ConfigError("K must be finite and non-negative");
  if (!std::isfinite(lambda)) throw ConfigError("lambda must be finite");
}

Matrix system_generator(const ModelParams& params) {
  const double hb = params.hbar_eff();
  using namespace pauli;
  if (params.model == ModelKind::Qubit) {
    return hb * (params.qubit.x_S * x() + params.qubit.z_S * z());
  }
  const auto& f = params.two_qubit;
  const Matrix I2 = identity(2);
  const double eps = f.epsilon_units == EpsilonUnits::HbarEff ? f.epsilon * hb : f.epsilon;
  return hb * f.x_s * kron(x(), I2) + hb * f.z_s * kron(z(), I2) + hb * f.x_A * kron(I2, x()) +
         eps * kron(z(), z());
}

double coupled_branch_sign(ModelKind model, int i) {
  if (model == ModelKind::Qubit) return i == 0 ? 1.0 : -1.0;
  // s (x) A ordering: A is the fast index.
  return (i % 2 == 0) ? 1.0 : -1.0;
}

std::vector<double> theta_grid(int d_E) {
  std::vector<double> th(static_cast<std::size_t>(d_E));
  for (int n = 1; n <= d_E; ++n) th[n - 1] = 2.0 * std::numbers::pi * n / d_E;
  return th;
}

struct FloquetModel::FftPlans {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;

  explicit FftPlans(int n) {
    std::lock_guard lock(fftw_planner_mutex());
    // FFTW_ESTIMATE keeps the algorithm choice, and thus every output bit,
    // independent of timing measurements.
    auto* scratch = fftw_alloc_complex(static_cast<std::size_t>(n));
    forward = fftw_plan_dft_1d(n, scratch, scratch, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    backward = fftw_plan_dft_1d(n, scratch, scratch, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(scratch);
    if (!forward || !backward) throw NumericalError("FFTW planning failed");
  }
  ~FftPlans() {
    std::lock_guard lock(fftw_planner_mutex());
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
  }
  FftPlans(const FftPlans&) = delete;
  FftPlans& operator=(const FftPlans&) = delete;
};

FloquetModel::FloquetModel(ModelParams params) : params_(params) {
  params_.validate();
  const int dS = params_.d_S();
  const int dE = params_.d_E;

  const long double k = static_cast<long double>(params_.K) * dE / kTwoPiL;
  kick_phases_.resize(dS, dE);
  for (int b = 0; b < dS; ++b) {
    const long double coeff = k + static_cast<long double>(params_.lambda) * coupled_branch_sign(params_.model, b);
    for (int n = 1; n <= dE; ++n) {
      const long double c = std::cos(kTwoPiL * n / dE);
      long double arg = coeff * c;
      arg -= kTwoPiL * std::nearbyint(arg / kTwoPiL);
      kick_phases_(b, n - 1) = std::polar(1.0, -static_cast<double>(arg));
    }
  }

  free_phases_.resize(dE);
  free_phases_scaled_.resize(dE);
  const long twice = 2L * dE;
  for (long bin = 0; bin < dE; ++bin) {
    const long m = momentum_of_bin(bin, dE);
    // hbar_eff m^2 / 2 = pi m^2 / d_E, reduced exactly modulo 2 pi.
    const long r = (m * m) % twice;
    const double phase = std::numbers::pi * static_cast<double>(r) / dE;
    free_phases_(bin) = std::polar(1.0, -phase);
    free_phases_scaled_(bin) = free_phases_(bin) / static_cast<double>(dE);
  }

  generator_ = qkrspb::system_generator(params_);
  system_unitary_ = unitary_from_generator(generator_);
  plans_ = std::make_unique<FftPlans>(dE);
}

FloquetModel::~FloquetModel() = default;
FloquetModel::FloquetModel(FloquetModel&&) noexcept = default;
FloquetModel& FloquetModel::operator=(FloquetModel&&) noexcept = default;

void FloquetModel::step(StateVector& state) const {
  const int dS = d_S();
  const int dE = d_E();
  if (state.d_S() != dS || state.d_E() != dE) throw InvalidInput("state dimensions do not match the model");

  auto& amps = state.amps();
  for (int b = 0; b < dS; ++b) {
    auto row = amps.row(b);
    row.array() *= kick_phases_.row(b).array();
    auto* data = reinterpret_cast<fftw_complex*>(row.data());
    fftw_execute_dft(plans_->forward, data, data);
    row.array() *= free_phases_scaled_.transpose().array();
    fftw_execute_dft(plans_->backward, data, data);
  }

  Complex column[4];
  Complex mixed[4];
  for (int n = 0; n < dE; ++n) {
    for (int i = 0; i < dS; ++i) column[i] = amps(i, n);
    for (int i = 0; i < dS; ++i) {
      Complex acc = 0.0;
      for (int j = 0; j < dS; ++j) acc += system_unitary_(i, j) * column[j];
      mixed[i] = acc;
    }
    for (int i = 0; i < dS; ++i) amps(i, n) = mixed[i];
  }
}

FloquetModel build_model(const ModelParams& params) {
  return FloquetModel(params);
}

StateVector floquet_step(const FloquetModel& model, StateVector state) {
  model.step(state);
  return state;
}

EvolveResult evolve(const FloquetModel& model, StateVector state, long n_kicks, const RecorderSpec& record) {
  if (n_kicks < 0) throw InvalidInput("n_kicks must be non-negative");
  if (record.stride < 1) throw InvalidInput("recorder stride must be positive");
  const long last = record.record_to < 0 ? n_kicks : record.record_to;

  EvolveResult out{MetricSeries{}, std::move(state), 0.0};
  const double norm0 = record.audit_norm ? norm(out.final_state) : 0.0;
  for (long t = 1; t <= n_kicks; ++t) {
    model.step(out.final_state);
    if (record.audit_norm) {
      out.max_norm_drift = std::max(out.max_norm_drift, std::abs(norm(out.final_state) - norm0));
    }
    if (t >= record.record_from && t <= last && (t - record.record_from) % record.stride == 0) {
      out.series.push(t, partial_trace_env(out.final_state));
    }
  }
  return out;
}

StateVector default_initial_state(const ModelParams& params, std::uint64_t seed) {
  const int dS = params.d_S();
  std::vector<Complex> sys(static_cast<std::size_t>(dS), Complex(1.0 / std::sqrt(static_cast<double>(dS)), 0.0));
  const auto env = haar_random_env(params.d_E, seed);
  return make_product_state(sys, env);
}

}  // namespace qkrspb

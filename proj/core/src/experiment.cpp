#include "qkrspb/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <numeric>
#include <thread>

#include <nlohmann/json.hpp>

#include "qkrspb/dense_oracle.hpp"
#include "qkrspb/error.hpp"
#include "qkrspb/rng.hpp"
#include "qkrspb/stochastic.hpp"

namespace qkrspb {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void check_finite(const std::vector<double>& xs, const char* name) {
  for (double x : xs)
    if (!std::isfinite(x)) throw NumericalError(std::string("non-finite value in channel ") + name);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
}

json matrix_json(const Matrix& m) {
  json re = json::array(), im = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json r = json::array(), c = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      r.push_back(m(i, j).real());
      c.push_back(m(i, j).imag());
    }
    re.push_back(r);
    im.push_back(c);
  }
  return {{"re", re}, {"im", im}};
}

json real_matrix_json(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json r = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) r.push_back(m(i, j));
    out.push_back(r);
  }
  return out;
}

json fit_json(const ScalingFit& f) {
  json pts = json::array();
  for (const auto& [x, y] : f.points) pts.push_back({x, y});
  return {{"slope", f.slope}, {"intercept", f.intercept}, {"residual", f.residual}, {"log2_points", pts}};
}

json summary_json(const TrajectorySummary& s, const RunConfig& config) {
  const bool qubit = s.d_S == 2;
  json j;
  j["d_E"] = s.d_E;
  j["lambda"] = s.lambda;
  j["seed"] = s.seed;
  j["N_T"] = s.N_T;
  j["fbar"] = s.fbar;
  j["delta_f"] = s.delta_f;
  j["offdiag_pair"] = {config.offdiag_pair.first + 1, config.offdiag_pair.second + 1};
  j["delta_rho_offdiag"] = s.delta_rho_offdiag;
  j["delta_rho_prediction"] = s.delta_rho_prediction;
  j["g"] = s.g;
  j["g_bound"] = s.g_bound;
  j["sigmas"] = s.sigmas;
  j["dbar_or_Dbar"] = s.dbar_or_Dbar;
  j[qubit ? "dbar" : "Dbar"] = s.dbar_or_Dbar;
  j["depol"] = s.depol;
  j["max_norm_drift"] = s.max_norm_drift;
  j["degenerate_fraction"] = s.degenerate_fraction;
  j["rho_bar"] = matrix_json(s.rho_bar);
  j["mean_abs_rho"] = real_matrix_json(s.mean_abs);
  return j;
}

json header_json(const RunConfig& config) {
  return {{"config", json::parse(config_echo(config))}, {"version", version_string()}};
}

void mark_incomplete(const fs::path& dir, const std::string& why) {
  try {
    write_text(dir / "INCOMPLETE", why + "\n");
  } catch (const Error&) {
  }
}

}  // namespace

std::string provenance_line(const RunConfig& config) {
  return "# " + version_string() + " config=" + config_echo(config);
}

Basis analysis_basis(const ModelParams& params, AnalysisBasis kind) {
  if (kind == AnalysisBasis::Computational) return Basis::computational(params.d_S());
  return Basis::system_eigenbasis(system_generator(params));
}

TrajectorySummary analyze(MetricSeries& series, const RunConfig& config, const ModelParams& params,
                          const Basis& basis) {
  const WindowSpec& w = config.window;
  const auto picks = series.select(w);
  const int dS = params.d_S();
  const Basis energy = Basis::system_eigenbasis(system_generator(params));

  TrajectorySummary s;
  s.d_S = dS;
  s.d_E = params.d_E;
  s.lambda = params.lambda;
  s.N_T = static_cast<long>(picks.size());

  const DensityMatrix rho_bar = time_average(series, w);
  const auto fl = fbar_and_fluct(series, w);
  s.fbar = fl.fbar;
  s.delta_f = fl.delta_f;

  const auto& snaps = series.snapshots();
  std::vector<double> f = f_channel(series, rho_bar);
  std::vector<double> dD, depol;
  dD.reserve(snaps.size());
  depol.reserve(snaps.size());
  const DensityMatrix mixed = DensityMatrix::identity_over_d(dS);
  for (const auto& r : snaps) {
    dD.push_back(dS == 2 ? basis_distance_d(r, energy) : entropy_width_D(r, energy));
    depol.push_back(trace_distance(r, mixed));
  }
  check_finite(f, "f");
  check_finite(dD, "d_or_D");
  check_finite(depol, "depol");
  series.set_channel("f", std::move(f));
  series.set_channel("d_or_D", std::move(dD));
  series.set_channel("depol", std::move(depol));

  long degenerate = 0;
  s.mean_abs = Eigen::MatrixXd::Zero(dS, dS);
  for (auto p : picks) {
    if (eigen_degenerate(snaps[p])) ++degenerate;
    s.mean_abs += elements_in_basis(snaps[p], basis).cwiseAbs();
  }
  s.mean_abs /= static_cast<double>(picks.size());
  s.degenerate_fraction = static_cast<double>(degenerate) / static_cast<double>(picks.size());

  s.sigmas = measured_sigmas(rho_bar, energy);
  s.g = g_energy_diag(rho_bar, energy);
  s.g_bound = dS == 2 ? g_rms_qubit(s.sigmas, params.d_E, s.N_T) : g_bound_model2(s.sigmas, dS, params.d_E, s.N_T);

  const auto [i, j] = config.offdiag_pair;
  s.delta_rho_offdiag = offdiag_deviation(series, i, j, w, basis);
  const auto sig_b = measured_sigmas(rho_bar, basis);
  s.delta_rho_prediction = sig_b[i] * sig_b[j] / std::sqrt(static_cast<double>(params.d_E));

  s.dbar_or_Dbar = time_averaged_metric(series, "d_or_D", w);
  s.depol = depolarization_distance(rho_bar);
  s.rho_bar = elements_in_basis(rho_bar, basis);

  for (double v : {s.fbar, s.delta_f, s.g, s.delta_rho_offdiag, s.dbar_or_Dbar, s.depol})
    if (!std::isfinite(v)) throw NumericalError("non-finite window statistic");
  return s;
}

Trajectory simulate(const RunConfig& config, const ModelParams& params, std::uint64_t seed) {
  params.validate();
  const FloquetModel model(params);
  StateVector psi0 = config.system_state.empty()
                         ? default_initial_state(params, seed)
                         : make_product_state(config.system_state, haar_random_env(params.d_E, seed));
  if (!config.system_state.empty()) psi0 = psi0.scaled(1.0 / norm(psi0));

  RecorderSpec rec;
  rec.record_from = config.record_from;
  rec.audit_norm = true;
  auto evo = evolve(model, std::move(psi0), config.n_kicks, rec);

  Trajectory t;
  t.analysis_basis = analysis_basis(params, config.basis);
  t.series = std::move(evo.series);
  t.summary = analyze(t.series, config, params, t.analysis_basis);
  t.summary.seed = seed;
  t.summary.max_norm_drift = evo.max_norm_drift;
  return t;
}

std::vector<std::string> timeseries_header(int d_S) {
  std::vector<std::string> h{"kick", "f"};
  for (int i = 1; i <= d_S; ++i) h.push_back("rho" + std::to_string(i) + std::to_string(i));
  for (int i = 1; i <= d_S; ++i)
    for (int j = i + 1; j <= d_S; ++j) {
      const auto ij = std::to_string(i) + std::to_string(j);
      h.push_back("re_rho" + ij);
      h.push_back("im_rho" + ij);
    }
  h.push_back("d_or_D");
  h.push_back("depol");
  return h;
}

void write_timeseries_csv(const fs::path& path, const Trajectory& trajectory, const RunConfig& config) {
  const auto& series = trajectory.series;
  const int dS = trajectory.summary.d_S;
  std::string out = provenance_line(config) + "\n";
  const auto header = timeseries_header(dS);
  for (std::size_t k = 0; k < header.size(); ++k) out += (k ? "," : "") + header[k];
  out += "\n";
  const auto& f = series.channel("f");
  const auto& dD = series.channel("d_or_D");
  const auto& depol = series.channel("depol");
  for (std::size_t r = 0; r < series.size(); ++r) {
    const Matrix m = elements_in_basis(series.snapshots()[r], trajectory.analysis_basis);
    out += std::to_string(series.kicks()[r]) + "," + fmt(f[r]);
    for (int i = 0; i < dS; ++i) out += "," + fmt(m(i, i).real());
    for (int i = 0; i < dS; ++i)
      for (int j = i + 1; j < dS; ++j) out += "," + fmt(m(i, j).real()) + "," + fmt(m(i, j).imag());
    out += "," + fmt(dD[r]) + "," + fmt(depol[r]) + "\n";
  }
  write_text(path, out);
}

bool SweepResult::ok() const {
  return std::all_of(points.begin(), points.end(), [](const SweepPoint& p) { return p.summary.has_value(); });
}

SweepResult sweep(const RunConfig& config, const fs::path& out_dir) {
  const bool by_lambda = config.experiment == ExperimentKind::SweepLambda;
  std::vector<double> grid;
  if (by_lambda)
    grid = config.lambda_grid;
  else
    for (int d : config.dim_grid) grid.push_back(d);
  if (grid.empty()) throw ConfigError("sweep grid is empty");

  std::vector<SweepPoint> points(grid.size());
  std::atomic<std::size_t> next{0};
  std::mutex io_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < grid.size(); i = next++) {
      SweepPoint& pt = points[i];
      pt.grid_value = grid[i];
      try {
        ModelParams p = config.model;
        if (by_lambda)
          p.lambda = grid[i];
        else
          p.d_E = static_cast<int>(grid[i]);
        auto traj = simulate(config, p, derive_seed(config.seed, i));
        if (!out_dir.empty() && config.records("timeseries")) {
          char name[32];
          std::snprintf(name, sizeof name, "point_%03zu", i);
          std::lock_guard lock(io_mutex);
          ensure_dir(out_dir / name);
          write_timeseries_csv(out_dir / name / "timeseries.csv", traj, config);
        }
        pt.summary = std::move(traj.summary);
      } catch (const std::exception& e) {
        pt.error = e.what();
      }
    }
  };
  const auto n_workers = std::min<std::size_t>(static_cast<std::size_t>(std::max(1, config.workers)), grid.size());
  if (n_workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t k = 0; k < n_workers; ++k) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  SweepResult result;
  result.points = std::move(points);
  std::stable_sort(result.points.begin(), result.points.end(),
                   [](const SweepPoint& a, const SweepPoint& b) { return a.grid_value < b.grid_value; });

  if (!by_lambda) {
    std::vector<std::pair<double, double>> fb, df, dr;
    for (const auto& p : result.points)
      if (p.summary) {
        fb.emplace_back(p.grid_value, p.summary->fbar);
        df.emplace_back(p.grid_value, p.summary->delta_f);
        dr.emplace_back(p.grid_value, p.summary->delta_rho_offdiag);
      }
    if (fb.size() >= 3) {
      result.fits["fbar"] = loglog_slope(fb);
      result.fits["delta_f"] = loglog_slope(df);
      result.fits["delta_rho_offdiag"] = loglog_slope(dr);
    }
  }
  return result;
}

namespace {

Matrix random_hermitian(int d, std::uint64_t seed) {
  const CounterRng rng(seed);
  Matrix G(d, d);
  std::uint64_t k = 0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) G(i, j) = 0.5 * rng.gaussian_pair(k++);
  return 0.5 * (G + G.adjoint());
}

StateVector random_state(int d_S, int d_E, std::uint64_t seed) {
  const auto v = haar_random_env(d_S * d_E, seed);
  return StateVector::unflatten(Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size())), d_S, d_E);
}

double median(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const auto n = xs.size();
  return n % 2 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

RhsCheck rhs_instance(const OracleSuiteConfig& c, int t, std::uint64_t seed) {
  const int nS = static_cast<int>(c.rhs_d_S.size());
  const int nE = static_cast<int>(c.rhs_d_E.size());
  RhsCheck r;
  r.d_S = c.rhs_d_S[t % nS];
  r.d_E = c.rhs_d_E[(t / nS) % nE];
  r.terms = 1 + (t / (nS * nE)) % c.rhs_max_terms;
  const auto s = [&](int k) { return derive_seed(seed, static_cast<std::uint64_t>(t) * 16 + k); };

  StaticTotalHamiltonian H;
  H.H_S = random_hermitian(r.d_S, s(0));
  H.H_E = random_hermitian(r.d_E, s(1)) / std::sqrt(static_cast<double>(r.d_E));
  for (int k = 0; k < r.terms; ++k) {
    Matrix env = random_hermitian(r.d_E, s(2 + 2 * k)) / std::sqrt(static_cast<double>(r.d_E));
    env += 0.5 * Matrix::Identity(r.d_E, r.d_E);
    H.terms.push_back({random_hermitian(r.d_S, s(3 + 2 * k)), env});
  }
  const Basis basis = t % 3 == 0   ? Basis::computational(r.d_S)
                      : t % 3 == 1 ? Basis::system_eigenbasis(H.H_S)
                                   : Basis::explicit_columns(hermitian_eig(random_hermitian(r.d_S, s(15))).vectors);

  const ExactPropagator prop(H);
  const StateVector psi0 = random_state(r.d_S, r.d_E, s(14));
  const double t0 = 0.7;
  const double h_norm = prop.energies().cwiseAbs().maxCoeff();
  const double delta = 1e-5 / h_norm;
  const Matrix fd = (rdm_in_basis(prop.evolve(psi0, t0 + delta), basis) -
                     rdm_in_basis(prop.evolve(psi0, t0 - delta), basis)) /
                    (2.0 * delta);
  const Matrix rhs = rhs_elements(prop.evolve(psi0, t0), H, basis);
  const double scale = fd.norm();
  r.rel_error = (rhs - fd).norm() / scale;
  r.trace_error = std::abs(rhs.trace()) / scale;
  r.hermiticity_error = (rhs - rhs.adjoint()).norm() / scale;
  r.pass = r.rel_error < c.rhs_rel_tol && r.trace_error < c.rhs_rel_tol && r.hermiticity_error < c.rhs_rel_tol;
  return r;
}

// Qubit H_S = 0.3 sx + 0.5 sz, GOE environment and one sigma_z coupling
// whose environment factor has trace offset * d_E.
RenormInstance renorm_instance(const OracleSuiteConfig& c, int d_E, std::uint64_t seed) {
  StaticTotalHamiltonian H;
  H.H_S = 0.3 * pauli::x() + 0.5 * pauli::z();
  const double scale = 1.0 / std::sqrt(static_cast<double>(d_E));
  H.H_E = random_goe(d_E, scale, derive_seed(seed, 0));
  Matrix env = c.renorm_coupling * random_goe(d_E, scale, derive_seed(seed, 1));
  env += c.renorm_trace_offset * Matrix::Identity(d_E, d_E);
  H.terms.push_back({pauli::z(), env});

  const ExactPropagator prop(H);
  const auto env_state = haar_random_env(d_E, derive_seed(seed, 2));
  const std::vector<Complex> up{1.0, 0.0};
  const StateVector psi0 = make_product_state(up, env_state);

  StationarityScanSpec spec;
  spec.burn_in = default_burn_in(prop);
  const int n = std::max(2, c.renorm_times);
  for (int k = 0; k < n; ++k) spec.times.push_back(spec.burn_in * (1.0 + static_cast<double>(k) / (n - 1)));
  const auto pair = stationarity_scan_pair(H, prop, psi0, spec);
  return {median(pair.bare), median(pair.renormalized)};
}

RenormCheck renorm_check(const OracleSuiteConfig& c, std::uint64_t seed) {
  RenormCheck r;
  for (int k = 0; k < c.renorm_instances; ++k) {
    r.instances.push_back(renorm_instance(c, c.renorm_d_E, derive_seed(seed, static_cast<std::uint64_t>(k))));
    if (r.instances.back().renorm_median < r.instances.back().bare_median) ++r.wins;
  }
  r.wins_pass = r.wins >= static_cast<int>(std::ceil(c.renorm_win_fraction * c.renorm_instances - 1e-9));
  std::vector<std::pair<double, double>> pts;
  const std::uint64_t scan_seed = derive_seed(seed, 1u << 20);
  for (int d : c.renorm_dims) {
    double sr = 0.0, sb = 0.0;
    for (int k = 0; k < c.renorm_seeds_per_dim; ++k) {
      const auto inst = renorm_instance(c, d, derive_seed(derive_seed(scan_seed, static_cast<std::uint64_t>(d)), k));
      sr += inst.renorm_median;
      sb += inst.bare_median;
    }
    r.dims.push_back(d);
    r.renorm_by_dim.push_back(sr / c.renorm_seeds_per_dim);
    r.bare_by_dim.push_back(sb / c.renorm_seeds_per_dim);
    pts.emplace_back(d, r.renorm_by_dim.back());
  }
  r.fit = loglog_slope(pts);
  r.slope_pass = r.fit.slope >= c.renorm_slope_lo && r.fit.slope <= c.renorm_slope_hi;
  return r;
}

DenseCheck dense_check(const OracleSuiteConfig& c, ModelKind kind, int d_E, std::uint64_t seed) {
  ModelParams p;
  p.model = kind;
  p.d_E = d_E;
  p.lambda = kind == ModelKind::Qubit ? 0.15 : 0.1;
  const FloquetModel model(p);
  const Matrix U = dense_floquet_matrix(model);
  DenseCheck r;
  r.model = kind == ModelKind::Qubit ? "qubit" : "two_qubit";
  r.d_E = d_E;
  for (int s = 0; s < c.dense_states; ++s) {
    StateVector psi = random_state(p.d_S(), d_E, derive_seed(seed, static_cast<std::uint64_t>(s)));
    Vector v = psi.flatten();
    for (int k = 0; k < c.dense_kicks; ++k) {
      model.step(psi);
      v = U * v;
      r.max_error = std::max(r.max_error, (psi.flatten() - v).cwiseAbs().maxCoeff());
    }
  }
  r.pass = r.max_error < c.dense_tol;
  return r;
}

bool selected(const std::vector<std::string>& list, const std::string& name) {
  return std::find(list.begin(), list.end(), name) != list.end();
}

}  // namespace

bool OracleReport::ok() const {
  for (const auto& r : rhs)
    if (!r.pass) return false;
  for (const auto& d : dense)
    if (!d.pass) return false;
  return !renorm || (renorm->wins_pass && renorm->slope_pass);
}

OracleReport run_oracle_suite(const OracleSuiteConfig& c, std::uint64_t seed) {
  OracleReport rep;
  if (selected(c.checks, "rhs")) {
    if (c.rhs_d_S.empty() || c.rhs_d_E.empty() || c.rhs_max_terms < 1)
      throw ConfigError("field 'oracle': rhs check needs dimensions and max_terms >= 1");
    const auto s = derive_seed(seed, 1);
    for (int t = 0; t < c.rhs_instances; ++t) {
      rep.rhs.push_back(rhs_instance(c, t, s));
      rep.rhs_max_error = std::max(rep.rhs_max_error, rep.rhs.back().rel_error);
    }
  }
  if (selected(c.checks, "renormalization")) rep.renorm = renorm_check(c, derive_seed(seed, 2));
  if (selected(c.checks, "dense_equivalence")) {
    const auto s = derive_seed(seed, 3);
    for (auto kind : {ModelKind::Qubit, ModelKind::TwoQubit})
      for (int d : c.dense_d_E)
        rep.dense.push_back(dense_check(c, kind, d, derive_seed(s, static_cast<std::uint64_t>(d) * 2 + (kind == ModelKind::TwoQubit))));
  }
  return rep;
}

namespace {

const std::vector<std::string>& all_scans() {
  static const std::vector<std::string> names{"bounded_ii",  "bounded_ij", "cosine_ii", "cosine_ij",         "constant_ii",
                                              "constant_ij", "gram_ii",    "gram_ij",   "rotated_cosine_ij", "power_law_ii"};
  return names;
}

std::vector<int> pow2_dims(int lo, int hi) {
  std::vector<int> d;
  for (int e = lo; e <= hi; ++e) d.push_back(1 << e);
  return d;
}

// RMS deviation of gram_limit_check from sigma_i^2 delta_ij.
ScalingFit gram_scan(const StochasticSuiteConfig& c, std::pair<int, int> pair, std::uint64_t master) {
  std::vector<std::pair<double, double>> pts;
  const auto [i, j] = pair;
  const Complex target = i == j ? Complex(c.sigmas[i] * c.sigmas[i], 0.0) : Complex(0.0, 0.0);
  for (int d : pow2_dims(c.log2_min, c.log2_max)) {
    double ms = 0.0;
    for (int t = 0; t < c.trials; ++t) {
      const auto e = make_ensemble(d, c.sigmas, derive_seed(derive_seed(master, static_cast<std::uint64_t>(d)), t));
      ms += std::norm(gram_limit_check(e, pair) - target);
    }
    pts.emplace_back(d, std::sqrt(ms / c.trials));
  }
  return loglog_slope(pts);
}

// Cosine-weighted cross term after rotating every coefficient row by the
// discrete Fourier matrix.
ScalingFit rotated_scan(const StochasticSuiteConfig& c, std::uint64_t master) {
  std::vector<std::pair<double, double>> pts;
  const auto spec = SpectrumSpec::cosine();
  for (int d : pow2_dims(c.log2_min, std::min(c.log2_max, c.rotated_log2_max))) {
    const Matrix Ft = fourier_matrix(d).transpose();
    const auto h = spec.values(d);
    double ms = 0.0;
    for (int t = 0; t < c.trials; ++t) {
      auto e = make_ensemble(d, c.sigmas, derive_seed(derive_seed(master, static_cast<std::uint64_t>(d)), t));
      e.X = e.X * Ft;
      ms += std::norm(weighted_quadratic(e, h, 0, 1));
    }
    pts.emplace_back(d, std::sqrt(ms / c.trials));
  }
  return loglog_slope(pts);
}

}  // namespace

bool StochasticReport::ok() const {
  return std::all_of(scans.begin(), scans.end(), [](const ScanResult& s) { return s.pass; });
}

StochasticReport run_stochastic_suite(const StochasticSuiteConfig& c, std::uint64_t seed) {
  StochasticReport rep;
  const auto dims = pow2_dims(c.log2_min, c.log2_max);
  const auto& names = all_scans();
  for (std::size_t k = 0; k < names.size(); ++k) {
    const auto& name = names[k];
    if (!selected(c.scans, name)) continue;
    const auto master = derive_seed(seed, k);
    const std::pair<int, int> pair = name.ends_with("_ii") ? std::pair{0, 0} : std::pair{0, 1};
    ScanResult r;
    r.name = name;
    if (name.starts_with("bounded"))
      r.fit = convergence_scan(SpectrumSpec::bounded_random(derive_seed(master, 1u << 30)), c.sigmas, dims, c.trials, pair,
                               master);
    else if (name.starts_with("cosine"))
      r.fit = convergence_scan(SpectrumSpec::cosine(), c.sigmas, dims, c.trials, pair, master);
    else if (name.starts_with("constant"))
      r.fit = convergence_scan(SpectrumSpec::constant_value(1.0), c.sigmas, dims, c.trials, pair, master);
    else if (name.starts_with("gram"))
      r.fit = gram_scan(c, pair, master);
    else if (name == "rotated_cosine_ij")
      r.fit = rotated_scan(c, master);
    else if (name == "power_law_ii")
      r.fit = convergence_scan(SpectrumSpec::power_law(0.25), c.sigmas, dims, c.trials, pair, master);
    r.pass = std::abs(r.fit.slope - c.slope_target) <= c.slope_tol;
    rep.scans.push_back(std::move(r));
  }
  return rep;
}

int run_evolve(const RunConfig& config) {
  const fs::path dir = config.output;
  ensure_dir(dir);
  const auto traj_seed = derive_seed(config.seed, 0);
  Trajectory traj;
  try {
    traj = simulate(config, config.model, traj_seed);
  } catch (const NumericalError& e) {
    mark_incomplete(dir, e.what());
    throw;
  }
  if (config.records("timeseries")) write_timeseries_csv(dir / "timeseries.csv", traj, config);
  json j = header_json(config);
  j["seeds"] = {{"master", config.seed}, {"trajectory", traj_seed}};
  j.update(summary_json(traj.summary, config));
  write_text(dir / "summary.json", j.dump(2) + "\n");
  return 0;
}

int run_sweep(const RunConfig& config) {
  const fs::path dir = config.output;
  ensure_dir(dir);
  const auto res = sweep(config, dir);

  const int dS = config.model.d_S();
  std::string csv = provenance_line(config) + "\n" +
                    "grid_value,fbar,delta_f,delta_rho_offdiag,g,g_bound,dbar_or_Dbar,depol";
  for (int i = 1; i <= dS; ++i) csv += ",sigma" + std::to_string(i);
  csv += "\n";

  json points = json::array(), failures = json::array();
  json fbar = json::array(), delta_f = json::array(), g = json::array(), g_bound = json::array(),
       sigmas = json::array();
  std::vector<std::uint64_t> seeds;
  bool nan_seen = false;
  for (const auto& p : res.points) {
    if (!p.summary) {
      failures.push_back({{"grid_value", p.grid_value}, {"error", p.error}});
      if (p.error.find("non-finite") != std::string::npos) nan_seen = true;
      continue;
    }
    const auto& s = *p.summary;
    csv += fmt(p.grid_value) + "," + fmt(s.fbar) + "," + fmt(s.delta_f) + "," + fmt(s.delta_rho_offdiag) + "," +
           fmt(s.g) + "," + fmt(s.g_bound) + "," + fmt(s.dbar_or_Dbar) + "," + fmt(s.depol);
    for (double v : s.sigmas) csv += "," + fmt(v);
    csv += "\n";
    json pj = summary_json(s, config);
    pj["grid_value"] = p.grid_value;
    points.push_back(pj);
    fbar.push_back(s.fbar);
    delta_f.push_back(s.delta_f);
    g.push_back(s.g);
    g_bound.push_back(s.g_bound);
    sigmas.push_back(s.sigmas);
    seeds.push_back(s.seed);
  }
  write_text(dir / "sweep.csv", csv);

  json j = header_json(config);
  j["grid"] = config.experiment == ExperimentKind::SweepLambda ? "lambda" : "d_E";
  j["seeds"] = {{"master", config.seed}, {"points", seeds}};
  j["fbar"] = fbar;
  j["delta_f"] = delta_f;
  j["g"] = g;
  j["g_bound"] = g_bound;
  j["sigmas"] = sigmas;
  j["points"] = points;
  j["failures"] = failures;
  if (!res.fits.empty()) {
    json slope, fits;
    for (const auto& [name, f] : res.fits) {
      slope[name] = f.slope;
      fits[name] = fit_json(f);
    }
    j["slope"] = slope;
    j["fits"] = fits;
  }
  write_text(dir / "summary.json", j.dump(2) + "\n");
  if (nan_seen) mark_incomplete(dir, "a grid point produced non-finite values");
  return res.ok() ? 0 : 1;
}

int run_oracle(const RunConfig& config) {
  const fs::path dir = config.output;
  ensure_dir(dir);
  const auto rep = run_oracle_suite(config.oracle, config.seed);
  json j = header_json(config);
  j["seeds"] = {{"master", config.seed}};
  if (!rep.rhs.empty()) {
    json inst = json::array();
    int passed = 0;
    for (const auto& r : rep.rhs) {
      inst.push_back({{"d_S", r.d_S},
                      {"d_E", r.d_E},
                      {"terms", r.terms},
                      {"rel_error", r.rel_error},
                      {"trace_error", r.trace_error},
                      {"hermiticity_error", r.hermiticity_error},
                      {"pass", r.pass}});
      passed += r.pass;
    }
    j["rhs"] = {{"instances", inst},
                {"max_rel_error", rep.rhs_max_error},
                {"tolerance", config.oracle.rhs_rel_tol},
                {"passed", passed},
                {"pass", passed == static_cast<int>(rep.rhs.size())}};
  }
  if (rep.renorm) {
    const auto& r = *rep.renorm;
    json inst = json::array();
    for (const auto& i : r.instances) inst.push_back({{"bare_median", i.bare_median}, {"renormalized_median", i.renorm_median}});
    j["renormalization"] = {{"instances", inst},
                            {"wins", r.wins},
                            {"wins_pass", r.wins_pass},
                            {"dims", r.dims},
                            {"renormalized_by_dim", r.renorm_by_dim},
                            {"bare_by_dim", r.bare_by_dim},
                            {"fit", fit_json(r.fit)},
                            {"slope_pass", r.slope_pass},
                            {"pass", r.wins_pass && r.slope_pass}};
  }
  if (!rep.dense.empty()) {
    json arr = json::array();
    bool all = true;
    for (const auto& d : rep.dense) {
      arr.push_back({{"model", d.model}, {"d_E", d.d_E}, {"max_error", d.max_error}, {"pass", d.pass}});
      all = all && d.pass;
    }
    j["dense_equivalence"] = {{"cases", arr}, {"tolerance", config.oracle.dense_tol}, {"pass", all}};
  }
  j["pass"] = rep.ok();
  write_text(dir / "oracle_report.json", j.dump(2) + "\n");
  return rep.ok() ? 0 : 1;
}

int run_stochastic(const RunConfig& config) {
  const fs::path dir = config.output;
  ensure_dir(dir);
  const auto rep = run_stochastic_suite(config.stochastic, config.seed);
  json j = header_json(config);
  j["seeds"] = {{"master", config.seed}};
  json scans = json::object();
  for (const auto& s : rep.scans) {
    json f = fit_json(s.fit);
    f["pass"] = s.pass;
    scans[s.name] = f;
  }
  j["scans"] = scans;
  j["slope_target"] = config.stochastic.slope_target;
  j["slope_tol"] = config.stochastic.slope_tol;
  j["pass"] = rep.ok();
  write_text(dir / "stochastic_report.json", j.dump(2) + "\n");
  return rep.ok() ? 0 : 1;
}

int run_experiment(const RunConfig& config) {
  config.validate();
  switch (config.experiment) {
    case ExperimentKind::Evolve: return run_evolve(config);
    case ExperimentKind::SweepLambda:
    case ExperimentKind::SweepDim: return run_sweep(config);
    case ExperimentKind::Oracle: return run_oracle(config);
    case ExperimentKind::Stochastic: return run_stochastic(config);
  }
  return 1;
}

}  // namespace qkrspb

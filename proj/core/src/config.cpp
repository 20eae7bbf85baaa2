#include "qkrspb/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "qkrspb/error.hpp"

#ifndef QKRSPB_VERSION
#define QKRSPB_VERSION "0.0.0"
#endif

namespace qkrspb {

using nlohmann::json;

std::string version_string() {
  return std::string("qkrspb ") + QKRSPB_VERSION;
}

const char* to_string(ExperimentKind kind) noexcept {
  switch (kind) {
    case ExperimentKind::Evolve: return "evolve";
    case ExperimentKind::SweepLambda: return "sweep-lambda";
    case ExperimentKind::SweepDim: return "sweep-dim";
    case ExperimentKind::Oracle: return "oracle";
    case ExperimentKind::Stochastic: return "stochastic";
  }
  return "unknown";
}

ExperimentKind experiment_from_string(std::string_view name) {
  for (auto k : {ExperimentKind::Evolve, ExperimentKind::SweepLambda, ExperimentKind::SweepDim, ExperimentKind::Oracle,
                 ExperimentKind::Stochastic})
    if (name == to_string(k)) return k;
  throw ConfigError("field 'experiment': unknown experiment '" + std::string(name) + "'");
}

bool RunConfig::records(std::string_view channel) const {
  return std::find(record.begin(), record.end(), channel) != record.end();
}

void RunConfig::validate() const {
  try {
    model.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("field 'model': ") + e.what());
  }
  const bool physics = experiment == ExperimentKind::Evolve || experiment == ExperimentKind::SweepLambda ||
                       experiment == ExperimentKind::SweepDim;
  if (physics) {
    if (n_kicks < 1) throw ConfigError("field 'n_kicks' must be >= 1");
    if (window.t_a < 1 || window.t_b < window.t_a || window.t_b > n_kicks)
      throw ConfigError("field 'window' must satisfy 1 <= t_a <= t_b <= n_kicks");
    if (window.stride < 1) throw ConfigError("field 'stride' must be >= 1");
    if (record_from < 1 || record_from > window.t_a) throw ConfigError("field 'record_from' must lie in [1, t_a]");
    const int dS = model.d_S();
    if (offdiag_pair.first == offdiag_pair.second || offdiag_pair.first < 0 || offdiag_pair.second < 0 ||
        offdiag_pair.first >= dS || offdiag_pair.second >= dS)
      throw ConfigError("field 'offdiag_pair' must name two distinct system levels");
    if (!system_state.empty() && static_cast<int>(system_state.size()) != dS)
      throw ConfigError("field 'system_state' must have d_S entries");
  }
  if (experiment == ExperimentKind::SweepLambda && lambda_grid.empty())
    throw ConfigError("field 'lambda_grid' must be non-empty for sweep-lambda");
  if (experiment == ExperimentKind::SweepDim) {
    if (dim_grid.empty()) throw ConfigError("field 'dim_grid' must be non-empty for sweep-dim");
    for (int d : dim_grid) {
      ModelParams p = model;
      p.d_E = d;
      try {
        p.validate();
      } catch (const ConfigError& e) {
        throw ConfigError(std::string("field 'dim_grid': ") + e.what());
      }
    }
  }
  if (experiment == ExperimentKind::Oracle && oracle.checks.empty())
    throw ConfigError("field 'oracle.checks' selects no checks");
  if (experiment == ExperimentKind::Stochastic && stochastic.scans.empty())
    throw ConfigError("field 'stochastic.scans' selects no scans");
  if (workers < 1) throw ConfigError("field 'workers' must be >= 1");
}

namespace {

template <typename T>
T get_field(const json& j, const char* key, const std::string& path) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError("field '" + path + key + "': " + e.what());
  }
}

template <typename T>
void read_if(const json& j, const char* key, T& out, const std::string& path = "") {
  if (j.contains(key)) out = get_field<T>(j, key, path);
}

void reject_unknown(const json& j, std::initializer_list<const char*> known, const std::string& path) {
  std::set<std::string> ok(known.begin(), known.end());
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!ok.count(it.key())) throw ConfigError("field '" + path + it.key() + "' is not recognized");
}

ModelKind model_from_json(const json& j) {
  if (j.is_number_integer()) {
    const int m = j.get<int>();
    if (m == 1) return ModelKind::Qubit;
    if (m == 2) return ModelKind::TwoQubit;
  } else if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "qubit" || s == "model1") return ModelKind::Qubit;
    if (s == "two_qubit" || s == "model2") return ModelKind::TwoQubit;
  }
  throw ConfigError("field 'model' must be \"qubit\" or \"two_qubit\"");
}

Complex complex_from_json(const json& j, const std::string& field) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  throw ConfigError("field '" + field + "' entries must be numbers or [re, im] pairs");
}

OracleSuiteConfig oracle_from_json(const json& j) {
  OracleSuiteConfig o;
  if (!j.is_object()) throw ConfigError("field 'oracle' must be an object");
  reject_unknown(j,
                 {"checks", "rhs_instances", "rhs_d_S", "rhs_d_E", "rhs_max_terms", "rhs_rel_tol", "renorm_instances",
                  "renorm_d_E", "renorm_dims", "renorm_seeds_per_dim", "renorm_times", "renorm_trace_offset",
                  "renorm_coupling", "renorm_win_fraction", "renorm_slope_lo", "renorm_slope_hi", "dense_d_E",
                  "dense_states", "dense_kicks", "dense_tol"},
                 "oracle.");
  const std::string p = "oracle.";
  read_if(j, "checks", o.checks, p);
  read_if(j, "rhs_instances", o.rhs_instances, p);
  read_if(j, "rhs_d_S", o.rhs_d_S, p);
  read_if(j, "rhs_d_E", o.rhs_d_E, p);
  read_if(j, "rhs_max_terms", o.rhs_max_terms, p);
  read_if(j, "rhs_rel_tol", o.rhs_rel_tol, p);
  read_if(j, "renorm_instances", o.renorm_instances, p);
  read_if(j, "renorm_d_E", o.renorm_d_E, p);
  read_if(j, "renorm_dims", o.renorm_dims, p);
  read_if(j, "renorm_seeds_per_dim", o.renorm_seeds_per_dim, p);
  read_if(j, "renorm_times", o.renorm_times, p);
  read_if(j, "renorm_trace_offset", o.renorm_trace_offset, p);
  read_if(j, "renorm_coupling", o.renorm_coupling, p);
  read_if(j, "renorm_win_fraction", o.renorm_win_fraction, p);
  read_if(j, "renorm_slope_lo", o.renorm_slope_lo, p);
  read_if(j, "renorm_slope_hi", o.renorm_slope_hi, p);
  read_if(j, "dense_d_E", o.dense_d_E, p);
  read_if(j, "dense_states", o.dense_states, p);
  read_if(j, "dense_kicks", o.dense_kicks, p);
  read_if(j, "dense_tol", o.dense_tol, p);
  static const std::set<std::string> known{"rhs", "renormalization", "dense_equivalence"};
  for (const auto& c : o.checks)
    if (!known.count(c)) throw ConfigError("field 'oracle.checks': unknown check '" + c + "'");
  return o;
}

StochasticSuiteConfig stochastic_from_json(const json& j) {
  StochasticSuiteConfig s;
  if (!j.is_object()) throw ConfigError("field 'stochastic' must be an object");
  reject_unknown(j, {"scans", "trials", "log2_min", "log2_max", "rotated_log2_max", "sigmas", "slope_target", "slope_tol"},
                 "stochastic.");
  const std::string p = "stochastic.";
  read_if(j, "scans", s.scans, p);
  read_if(j, "trials", s.trials, p);
  read_if(j, "log2_min", s.log2_min, p);
  read_if(j, "log2_max", s.log2_max, p);
  read_if(j, "rotated_log2_max", s.rotated_log2_max, p);
  read_if(j, "sigmas", s.sigmas, p);
  read_if(j, "slope_target", s.slope_target, p);
  read_if(j, "slope_tol", s.slope_tol, p);
  static const std::set<std::string> known{"bounded_ii",  "bounded_ij", "cosine_ii", "cosine_ij",         "constant_ii",
                                           "constant_ij", "gram_ii",    "gram_ij",   "rotated_cosine_ij", "power_law_ii"};
  for (const auto& c : s.scans)
    if (!known.count(c)) throw ConfigError("field 'stochastic.scans': unknown scan '" + c + "'");
  if (s.trials < 30) throw ConfigError("field 'stochastic.trials' must be >= 30");
  if (s.log2_max - s.log2_min < 2) throw ConfigError("field 'stochastic.log2_max' must exceed log2_min by >= 2");
  double s2 = 0.0;
  for (double v : s.sigmas) s2 += v * v;
  if (s.sigmas.size() < 2 || std::abs(s2 - 1.0) > 1e-8)
    throw ConfigError("field 'stochastic.sigmas' needs >= 2 entries with sum of squares 1");
  return s;
}

RunConfig config_from_json_object(const json& j) {
  if (!j.is_object()) throw ConfigError("config root must be a JSON object");
  reject_unknown(j,
                 {"experiment", "model", "d_E", "K", "lambda", "omegas", "epsilon_units", "n_kicks", "window", "stride",
                  "record_from", "seed", "lambda_grid", "dim_grid", "output", "record", "basis", "offdiag_pair",
                  "system_state", "workers", "oracle", "stochastic", "version"},
                 "");
  RunConfig c;
  if (j.contains("experiment")) c.experiment = experiment_from_string(get_field<std::string>(j, "experiment", ""));
  if (j.contains("model")) c.model.model = model_from_json(j["model"]);
  read_if(j, "d_E", c.model.d_E);
  read_if(j, "K", c.model.K);
  read_if(j, "lambda", c.model.lambda);
  if (j.contains("omegas")) {
    const auto& o = j["omegas"];
    if (!o.is_object()) throw ConfigError("field 'omegas' must be an object");
    if (c.model.model == ModelKind::Qubit) {
      reject_unknown(o, {"x_S", "z_S"}, "omegas.");
      read_if(o, "x_S", c.model.qubit.x_S, "omegas.");
      read_if(o, "z_S", c.model.qubit.z_S, "omegas.");
    } else {
      reject_unknown(o, {"x_s", "z_s", "x_A", "epsilon"}, "omegas.");
      read_if(o, "x_s", c.model.two_qubit.x_s, "omegas.");
      read_if(o, "z_s", c.model.two_qubit.z_s, "omegas.");
      read_if(o, "x_A", c.model.two_qubit.x_A, "omegas.");
      read_if(o, "epsilon", c.model.two_qubit.epsilon, "omegas.");
    }
  }
  if (j.contains("epsilon_units")) {
    const auto u = get_field<std::string>(j, "epsilon_units", "");
    if (u == "hbar_eff")
      c.model.two_qubit.epsilon_units = EpsilonUnits::HbarEff;
    else if (u == "absolute")
      c.model.two_qubit.epsilon_units = EpsilonUnits::Absolute;
    else
      throw ConfigError("field 'epsilon_units' must be \"hbar_eff\" or \"absolute\"");
  }
  read_if(j, "n_kicks", c.n_kicks);
  if (j.contains("window")) {
    const auto w = get_field<std::vector<long>>(j, "window", "");
    if (w.size() != 2) throw ConfigError("field 'window' must be [t_a, t_b]");
    c.window.t_a = w[0];
    c.window.t_b = w[1];
  }
  read_if(j, "stride", c.window.stride);
  c.record_from = c.window.t_a;
  read_if(j, "record_from", c.record_from);
  read_if(j, "seed", c.seed);
  read_if(j, "lambda_grid", c.lambda_grid);
  read_if(j, "dim_grid", c.dim_grid);
  read_if(j, "output", c.output);
  read_if(j, "record", c.record);
  for (const auto& r : c.record)
    if (r != "timeseries" && r != "snapshots") throw ConfigError("field 'record': unknown channel '" + r + "'");
  if (j.contains("basis")) {
    const auto b = get_field<std::string>(j, "basis", "");
    if (b == "energy")
      c.basis = AnalysisBasis::Energy;
    else if (b == "computational")
      c.basis = AnalysisBasis::Computational;
    else
      throw ConfigError("field 'basis' must be \"energy\" or \"computational\"");
  }
  if (c.model.model == ModelKind::TwoQubit) c.offdiag_pair = {0, 2};
  if (j.contains("offdiag_pair")) {
    const auto p = get_field<std::vector<int>>(j, "offdiag_pair", "");
    if (p.size() != 2) throw ConfigError("field 'offdiag_pair' must be [i, j]");
    c.offdiag_pair = {p[0] - 1, p[1] - 1};
  }
  if (j.contains("system_state")) {
    const auto& s = j["system_state"];
    if (!s.is_array()) throw ConfigError("field 'system_state' must be an array");
    for (const auto& v : s) c.system_state.push_back(complex_from_json(v, "system_state"));
  }
  read_if(j, "workers", c.workers);
  if (j.contains("oracle")) c.oracle = oracle_from_json(j["oracle"]);
  if (j.contains("stochastic")) c.stochastic = stochastic_from_json(j["stochastic"]);
  c.validate();
  return c;
}

json config_json(const RunConfig& c, bool full) {
  json j;
  j["experiment"] = to_string(c.experiment);
  j["model"] = c.model.model == ModelKind::Qubit ? "qubit" : "two_qubit";
  j["d_E"] = c.model.d_E;
  j["K"] = c.model.K;
  j["lambda"] = c.model.lambda;
  if (c.model.model == ModelKind::Qubit) {
    j["omegas"] = {{"x_S", c.model.qubit.x_S}, {"z_S", c.model.qubit.z_S}};
  } else {
    const auto& f = c.model.two_qubit;
    j["omegas"] = {{"x_s", f.x_s}, {"z_s", f.z_s}, {"x_A", f.x_A}, {"epsilon", f.epsilon}};
    j["epsilon_units"] = f.epsilon_units == EpsilonUnits::HbarEff ? "hbar_eff" : "absolute";
  }
  j["n_kicks"] = c.n_kicks;
  j["window"] = {c.window.t_a, c.window.t_b};
  j["stride"] = c.window.stride;
  j["record_from"] = c.record_from;
  j["seed"] = c.seed;
  j["lambda_grid"] = c.lambda_grid;
  j["dim_grid"] = c.dim_grid;
  j["record"] = c.record;
  j["basis"] = c.basis == AnalysisBasis::Energy ? "energy" : "computational";
  j["offdiag_pair"] = {c.offdiag_pair.first + 1, c.offdiag_pair.second + 1};
  json st = json::array();
  for (const auto& v : c.system_state) st.push_back({v.real(), v.imag()});
  j["system_state"] = st;
  if (c.experiment == ExperimentKind::Oracle || full) {
    const auto& o = c.oracle;
    j["oracle"] = {{"checks", o.checks},
                   {"rhs_instances", o.rhs_instances},
                   {"rhs_d_S", o.rhs_d_S},
                   {"rhs_d_E", o.rhs_d_E},
                   {"rhs_max_terms", o.rhs_max_terms},
                   {"rhs_rel_tol", o.rhs_rel_tol},
                   {"renorm_instances", o.renorm_instances},
                   {"renorm_d_E", o.renorm_d_E},
                   {"renorm_dims", o.renorm_dims},
                   {"renorm_seeds_per_dim", o.renorm_seeds_per_dim},
                   {"renorm_times", o.renorm_times},
                   {"renorm_trace_offset", o.renorm_trace_offset},
                   {"renorm_coupling", o.renorm_coupling},
                   {"renorm_win_fraction", o.renorm_win_fraction},
                   {"renorm_slope_lo", o.renorm_slope_lo},
                   {"renorm_slope_hi", o.renorm_slope_hi},
                   {"dense_d_E", o.dense_d_E},
                   {"dense_states", o.dense_states},
                   {"dense_kicks", o.dense_kicks},
                   {"dense_tol", o.dense_tol}};
  }
  if (c.experiment == ExperimentKind::Stochastic || full) {
    const auto& s = c.stochastic;
    j["stochastic"] = {{"scans", s.scans},
                       {"trials", s.trials},
                       {"log2_min", s.log2_min},
                       {"log2_max", s.log2_max},
                       {"rotated_log2_max", s.rotated_log2_max},
                       {"sigmas", s.sigmas},
                       {"slope_target", s.slope_target},
                       {"slope_tol", s.slope_tol}};
  }
  if (full) {
    j["output"] = c.output;
    j["workers"] = c.workers;
  }
  return j;
}

}  // namespace

RunConfig parse_config(std::string_view json_text, const std::string& source) {
  json j;
  try {
    j = json::parse(json_text.begin(), json_text.end());
  } catch (const json::parse_error& e) {
    const auto upto = std::min<std::size_t>(e.byte, json_text.size());
    const auto line = 1 + std::count(json_text.begin(), json_text.begin() + static_cast<std::ptrdiff_t>(upto), '\n');
    throw ConfigError(source + ":" + std::to_string(line) + ": JSON parse error: " + e.what());
  }
  return config_from_json_object(j);
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.string());
}

std::string config_to_json(const RunConfig& config, int indent) {
  return config_json(config, true).dump(indent);
}

void save_config(const RunConfig& config, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write config file " + path.string());
  out << config_to_json(config) << '\n';
  if (!out) throw IoError("write failed for " + path.string());
}

std::string config_echo(const RunConfig& config) {
  return config_json(config, false).dump();
}

}  // namespace qkrspb

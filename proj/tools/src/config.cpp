#include "cavityxy_cli/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

namespace cavityxy::cli {

using nlohmann::json;

std::string to_string(Protocol p) {
  switch (p) {
    case Protocol::Quench: return "QUENCH";
    case Protocol::PrepQuench: return "PREP_QUENCH";
    case Protocol::DriveSweep: return "DRIVE_SWEEP";
    case Protocol::DetuningSweep: return "DETUNING_SWEEP";
    case Protocol::PhaseDiagram: return "PHASE_DIAGRAM";
    case Protocol::Basin: return "BASIN";
    case Protocol::Echo: return "ECHO";
  }
  return "QUENCH";
}

Protocol protocol_from_string(const std::string& s) {
  for (Protocol p : {Protocol::Quench, Protocol::PrepQuench, Protocol::DriveSweep,
                     Protocol::DetuningSweep, Protocol::PhaseDiagram, Protocol::Basin,
                     Protocol::Echo}) {
    if (to_string(p) == s) return p;
  }
  throw ConfigError("protocol: unknown value '" + s + "'");
}

std::string to_string(OutputFormat f) {
  return f == OutputFormat::Csv ? "csv" : f == OutputFormat::Json ? "json" : "both";
}

OutputFormat format_from_string(const std::string& s) {
  if (s == "csv") return OutputFormat::Csv;
  if (s == "json") return OutputFormat::Json;
  if (s == "both") return OutputFormat::Both;
  throw ConfigError("format: expected csv, json or both, got '" + s + "'");
}

std::vector<double> Range::values() const { return analysis::linear_grid(start, stop, step); }

analysis::Estimator EstimatorConfig::build() const {
  return kind == analysis::Estimator::Kind::Snapshot
             ? analysis::Estimator::snapshot(t0_us * 1e-6)
             : analysis::Estimator::window(t0_us * 1e-6, t1_us * 1e-6);
}

ExperimentSettings RunConfig::settings() const {
  ExperimentSettings s;
  s.model = model;
  ModelParams& p = s.params;
  p = ModelParams{};
  p.g = hz_to_angular(g_hz);
  p.kappa = hz_to_angular(kappa_hz);
  p.gamma = hz_to_angular(gamma_hz);
  p.gamma_el = hz_to_angular(gamma_el_hz);
  p.Delta = hz_to_angular(Delta_hz);
  p.N = N;
  p.lambda_L = lambda_L_m;
  p.lambda_c = lambda_c_m;
  p.temperature = temperature_K;
  p.waist = waist_m;
  p.sigma_th = sigma_th_m;
  if (trap) {
    p.trap = TrapParams::from_frequency(hz_to_angular(trap->frequency_hz), lambda_L_m,
                                        trap->mass_amu * kAtomicMassUnit, trap->n_max);
  }
  if (chiN_hz) s.chiN_override = hz_to_angular(*chiN_hz);
  s.n_sim = n_sim;
  s.commensurate = commensurate;
  s.lattice_sites = lattice_sites;
  s.n_shots = n_shots;
  s.fluctuation_rms = fluctuation_rms;
  s.seed = seed;
  s.t_final = t_final_us * 1e-6;
  s.dt_out = dt_out_us * 1e-6;
  s.tol = {rtol, atol};
  s.ordering_correction = ordering_correction;
  s.frozen_motion = frozen_motion;
  s.interactions = interactions;
  s.prep_ratio = prep_ratio;
  return s;
}

json RunConfig::effective_values() const {
  const ExperimentSettings s = settings();
  json j;
  j["g_rad_s"] = s.params.g;
  j["kappa_rad_s"] = s.params.kappa;
  j["gamma_rad_s"] = s.params.gamma;
  j["gamma_el_rad_s"] = s.params.gamma_el;
  j["Delta_rad_s"] = s.params.Delta;
  j["chiN_rad_s"] = nominal_chiN(s);
  j["omega_rad_s"] = omega_over_chiN * nominal_chiN(s);
  j["delta_rad_s"] = delta_over_chiN * nominal_chiN(s);
  if (s.params.trap) {
    j["trap_frequency_rad_s"] = hz_to_angular(trap->frequency_hz);
    j["trap_depth_J"] = s.params.trap->V0;
  }
  return j;
}

namespace {

void require(bool ok, const std::string& key, const std::string& what) {
  if (!ok) throw ConfigError(key + ": " + what);
}

}  // namespace

void RunConfig::validate() const {
  require(N >= 1.0 && std::isfinite(N), "N", "must be >= 1");
  for (auto [v, k] : {std::pair{g_hz, "g_hz"}, {kappa_hz, "kappa_hz"}, {gamma_hz, "gamma_hz"},
                      {gamma_el_hz, "gamma_el_hz"}, {temperature_K, "temperature_K"},
                      {waist_m, "waist_m"}, {sigma_th_m, "sigma_th_m"},
                      {fluctuation_rms, "fluctuation_rms"}}) {
    require(v >= 0.0 && std::isfinite(v), k, "must be >= 0");
  }
  require(Delta_hz != 0.0 && std::isfinite(Delta_hz), "Delta_hz", "must be nonzero");
  require(lambda_L_m > 0.0, "lambda_L_m", "must be > 0");
  require(lambda_c_m > 0.0, "lambda_c_m", "must be > 0");
  require(!chiN_hz || model == ModelKind::Collective, "chiN_hz",
          "only allowed for the COLLECTIVE model");
  require(!chiN_hz || std::isfinite(*chiN_hz), "chiN_hz", "must be finite");
  require(n_sim >= 1, "n_sim", "must be >= 1");
  require(lattice_sites >= 1, "lattice_sites", "must be >= 1");
  require(n_shots >= 1, "n_shots", "must be >= 1");
  require(t_final_us > 0.0, "t_final_us", "must be > 0");
  require(dt_out_us > 0.0, "dt_out_us", "must be > 0");
  require(rtol > 0.0 && atol > 0.0, "rtol", "tolerances must be > 0");
  require(prep_ratio > 0.0, "prep_ratio", "must be > 0");
  require(prep_r >= 0.0 && prep_r <= 1.0, "prep_r", "must lie in [0, 1]");
  require(threshold >= 0.0, "threshold", "must be >= 0");
  require(jump_threshold > 0.0, "jump_threshold", "must be > 0");
  require(basin_r_points >= 2, "basin_r_points", "must be >= 2");
  require(basin_dphi_points >= 2, "basin_dphi_points", "must be >= 2");
  require(model != ModelKind::Motion || trap.has_value(), "trap", "required for the MOTION model");
  if (trap) {
    require(trap->frequency_hz > 0.0, "trap.frequency_hz", "must be > 0");
    require(trap->n_max >= 0, "trap.n_max", "must be >= 0");
    require(trap->mass_amu > 0.0, "trap.mass_amu", "must be > 0");
  }
  for (auto [r, k] : {std::pair{&omega_grid, "omega_grid"}, {&delta_grid, "delta_grid"},
                      {&echo_grid_us, "echo_grid_us"}}) {
    require(r->step > 0.0, std::string(k) + ".step", "must be > 0");
    require(r->stop >= r->start, std::string(k) + ".stop", "must be >= start");
  }
  if (estimator.kind == analysis::Estimator::Kind::Window) {
    require(estimator.t1_us > estimator.t0_us, "estimator.t1_us", "must exceed t0_us");
    require(estimator.t1_us <= t_final_us * (1 + 1e-12), "estimator.t1_us",
            "window extends past t_final_us");
  } else {
    require(estimator.t0_us <= t_final_us * (1 + 1e-12), "estimator.t0_us",
            "snapshot after t_final_us");
  }
  require(estimator.t0_us >= 0.0, "estimator.t0_us", "must be >= 0");
  if (!chiN_hz && model == ModelKind::Collective) {
    // chi N derived from the cavity; must be nonzero for ratio controls to mean anything.
    require(g_hz > 0.0, "g_hz", "must be > 0 unless chiN_hz is given");
  }
  require(!output_stem.empty() && output_stem.find('/') == std::string::npos, "output.stem",
          "must be a plain file name");
}

bool operator==(const RunConfig& a, const RunConfig& b) {
  return config_to_json(a) == config_to_json(b);
}

namespace {

// Reads keys out of an object, remembering which ones were consumed.
class Reader {
 public:
  Reader(const json& j, std::string prefix) : j_(j), prefix_(std::move(prefix)) {
    if (!j_.is_object()) throw ConfigError(name("") + "expected an object");
  }

  template <class T>
  bool get(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return false;
    const json& v = j_.at(key);
    try {
      if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) throw ConfigError(name(key) + ": expected a boolean");
      } else if constexpr (std::is_arithmetic_v<T>) {
        if (!v.is_number()) throw ConfigError(name(key) + ": expected a number");
        if constexpr (std::is_integral_v<T>) {
          if (!v.is_number_integer()) throw ConfigError(name(key) + ": expected an integer");
          if constexpr (std::is_unsigned_v<T>) {
            if (!v.is_number_unsigned() && v.get<std::int64_t>() < 0) {
              throw ConfigError(name(key) + ": must be >= 0");
            }
          }
        }
      } else {
        if (!v.is_string()) throw ConfigError(name(key) + ": expected a string");
      }
      out = v.get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(name(key) + ": " + e.what());
    }
    return true;
  }

  const json* child(const char* key) {
    seen_.insert(key);
    return j_.contains(key) ? &j_.at(key) : nullptr;
  }

  std::string name(const std::string& key) const { return prefix_ + key; }

  void reject_unknown() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) throw ConfigError(name(it.key()) + ": unknown key");
    }
  }

 private:
  const json& j_;
  std::string prefix_;
  std::set<std::string> seen_;
};

Range read_range(const json& j, const std::string& key, Range def) {
  Reader r(j, key + ".");
  r.get("start", def.start);
  r.get("stop", def.stop);
  r.get("step", def.step);
  r.reject_unknown();
  return def;
}

json range_json(const Range& r) { return {{"start", r.start}, {"stop", r.stop}, {"step", r.step}}; }

}  // namespace

RunConfig config_from_json(const json& j) {
  RunConfig c;
  Reader r(j, "");
  std::string s;
  if (r.get("model", s)) {
    try {
      c.model = model_kind_from_string(s);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("model: ") + e.what());
    }
  }
  if (r.get("protocol", s)) c.protocol = protocol_from_string(s);
  r.get("N", c.N);
  r.get("g_hz", c.g_hz);
  r.get("kappa_hz", c.kappa_hz);
  r.get("gamma_hz", c.gamma_hz);
  r.get("gamma_el_hz", c.gamma_el_hz);
  r.get("Delta_hz", c.Delta_hz);
  double chiN = 0.0;
  if (r.get("chiN_hz", chiN)) c.chiN_hz = chiN;
  r.get("lambda_L_m", c.lambda_L_m);
  r.get("lambda_c_m", c.lambda_c_m);
  r.get("temperature_K", c.temperature_K);
  r.get("waist_m", c.waist_m);
  r.get("sigma_th_m", c.sigma_th_m);
  if (const json* t = r.child("trap")) {
    if (t->is_null()) {
      c.trap.reset();
    } else {
      Reader tr(*t, "trap.");
      TrapConfig tc;
      tr.get("frequency_hz", tc.frequency_hz);
      tr.get("n_max", tc.n_max);
      tr.get("mass_amu", tc.mass_amu);
      tr.reject_unknown();
      c.trap = tc;
    }
  }
  r.get("omega_over_chiN", c.omega_over_chiN);
  r.get("delta_over_chiN", c.delta_over_chiN);
  r.get("n_sim", c.n_sim);
  r.get("commensurate", c.commensurate);
  r.get("lattice_sites", c.lattice_sites);
  r.get("n_shots", c.n_shots);
  r.get("fluctuation_rms", c.fluctuation_rms);
  c.seed_defaulted = !r.get("seed", c.seed);
  r.get("t_final_us", c.t_final_us);
  r.get("dt_out_us", c.dt_out_us);
  r.get("rtol", c.rtol);
  r.get("atol", c.atol);
  r.get("ordering_correction", c.ordering_correction);
  r.get("frozen_motion", c.frozen_motion);
  r.get("interactions", c.interactions);
  r.get("prep_ratio", c.prep_ratio);
  r.get("prep_r", c.prep_r);
  r.get("prep_dphi", c.prep_dphi);
  if (const json* e = r.child("estimator")) {
    Reader er(*e, "estimator.");
    std::string kind;
    if (er.get("kind", kind)) {
      if (kind == "WINDOW") {
        c.estimator.kind = analysis::Estimator::Kind::Window;
      } else if (kind == "SNAPSHOT") {
        c.estimator.kind = analysis::Estimator::Kind::Snapshot;
      } else {
        throw ConfigError("estimator.kind: expected WINDOW or SNAPSHOT");
      }
    }
    er.get("t0_us", c.estimator.t0_us);
    er.get("t1_us", c.estimator.t1_us);
    er.reject_unknown();
  }
  r.get("threshold", c.threshold);
  r.get("jump_threshold", c.jump_threshold);
  if (const json* g = r.child("omega_grid")) c.omega_grid = read_range(*g, "omega_grid", c.omega_grid);
  if (const json* g = r.child("delta_grid")) c.delta_grid = read_range(*g, "delta_grid", c.delta_grid);
  if (const json* g = r.child("echo_grid_us")) {
    c.echo_grid_us = read_range(*g, "echo_grid_us", c.echo_grid_us);
  }
  r.get("basin_r_points", c.basin_r_points);
  r.get("basin_dphi_points", c.basin_dphi_points);
  if (const json* o = r.child("output")) {
    Reader orr(*o, "output.");
    orr.get("stem", c.output_stem);
    std::string f;
    if (orr.get("format", f)) c.format = format_from_string(f);
    orr.reject_unknown();
  }
  r.reject_unknown();
  c.validate();
  return c;
}

json config_to_json(const RunConfig& c) {
  json j;
  j["model"] = std::string(to_string(c.model));
  j["protocol"] = to_string(c.protocol);
  j["N"] = c.N;
  j["g_hz"] = c.g_hz;
  j["kappa_hz"] = c.kappa_hz;
  j["gamma_hz"] = c.gamma_hz;
  j["gamma_el_hz"] = c.gamma_el_hz;
  j["Delta_hz"] = c.Delta_hz;
  if (c.chiN_hz) j["chiN_hz"] = *c.chiN_hz;
  j["lambda_L_m"] = c.lambda_L_m;
  j["lambda_c_m"] = c.lambda_c_m;
  j["temperature_K"] = c.temperature_K;
  j["waist_m"] = c.waist_m;
  j["sigma_th_m"] = c.sigma_th_m;
  if (c.trap) {
    j["trap"] = {{"frequency_hz", c.trap->frequency_hz},
                 {"n_max", c.trap->n_max},
                 {"mass_amu", c.trap->mass_amu}};
  } else {
    j["trap"] = nullptr;
  }
  j["omega_over_chiN"] = c.omega_over_chiN;
  j["delta_over_chiN"] = c.delta_over_chiN;
  j["n_sim"] = c.n_sim;
  j["commensurate"] = c.commensurate;
  j["lattice_sites"] = c.lattice_sites;
  j["n_shots"] = c.n_shots;
  j["fluctuation_rms"] = c.fluctuation_rms;
  j["seed"] = c.seed;
  j["t_final_us"] = c.t_final_us;
  j["dt_out_us"] = c.dt_out_us;
  j["rtol"] = c.rtol;
  j["atol"] = c.atol;
  j["ordering_correction"] = c.ordering_correction;
  j["frozen_motion"] = c.frozen_motion;
  j["interactions"] = c.interactions;
  j["prep_ratio"] = c.prep_ratio;
  j["prep_r"] = c.prep_r;
  j["prep_dphi"] = c.prep_dphi;
  j["estimator"] = {
      {"kind", c.estimator.kind == analysis::Estimator::Kind::Window ? "WINDOW" : "SNAPSHOT"},
      {"t0_us", c.estimator.t0_us},
      {"t1_us", c.estimator.t1_us}};
  j["threshold"] = c.threshold;
  j["jump_threshold"] = c.jump_threshold;
  j["omega_grid"] = range_json(c.omega_grid);
  j["delta_grid"] = range_json(c.delta_grid);
  j["echo_grid_us"] = range_json(c.echo_grid_us);
  j["basin_r_points"] = c.basin_r_points;
  j["basin_dphi_points"] = c.basin_dphi_points;
  j["output"] = {{"stem", c.output_stem}, {"format", to_string(c.format)}};
  return j;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError("config is not valid JSON: " + std::string(e.what()));
  }
  return config_from_json(j);
}

void save_config(const RunConfig& c, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << config_to_json(c).dump(2) << '\n';
}

}  // namespace cavityxy::cli

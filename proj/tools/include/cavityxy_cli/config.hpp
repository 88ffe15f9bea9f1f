#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "cavityxy/analysis.hpp"
#include "cavityxy/experiment.hpp"

namespace cavityxy::cli {

// Schema violation; the message names the offending key.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Protocol { Quench, PrepQuench, DriveSweep, DetuningSweep, PhaseDiagram, Basin, Echo };
std::string to_string(Protocol p);
Protocol protocol_from_string(const std::string& s);

enum class OutputFormat { Csv, Json, Both };
std::string to_string(OutputFormat f);
OutputFormat format_from_string(const std::string& s);

struct Range {
  double start = 0.0;
  double stop = 0.0;
  double step = 1.0;
  std::vector<double> values() const;
  bool operator==(const Range&) const = default;
};

struct TrapConfig {
  double frequency_hz = 200e3;
  int n_max = 10;
  double mass_amu = 87.9056122571;
  bool operator==(const TrapConfig&) const = default;
};

struct EstimatorConfig {
  analysis::Estimator::Kind kind = analysis::Estimator::Kind::Window;
  double t0_us = 0.0;
  double t1_us = 6.0;
  analysis::Estimator build() const;
  bool operator==(const EstimatorConfig&) const = default;
};

// Everything a run needs, in the units users write: Hz, microseconds, ratios to chi N.
struct RunConfig {
  ModelKind model = ModelKind::Collective;
  Protocol protocol = Protocol::Quench;

  double N = 950e3;
  double g_hz = 10.9e3;
  double kappa_hz = 153e3;
  double gamma_hz = 7.5e3;
  double gamma_el_hz = 40e3;
  double Delta_hz = 50e6;
  std::optional<double> chiN_hz;  // collective model only
  double lambda_L_m = 813e-9;
  double lambda_c_m = 689e-9;
  double temperature_K = 14e-6;
  double waist_m = 0.0;
  double sigma_th_m = 0.0;
  std::optional<TrapConfig> trap = TrapConfig{};

  double omega_over_chiN = 0.0;
  double delta_over_chiN = 0.0;

  std::size_t n_sim = 1000;
  bool commensurate = false;
  std::int64_t lattice_sites = 10000;
  std::size_t n_shots = 12;
  double fluctuation_rms = 0.05;
  std::uint64_t seed = 0;
  bool seed_defaulted = true;  // not serialized

  double t_final_us = 6.0;
  double dt_out_us = 0.01;
  double rtol = 1e-10;
  double atol = 1e-12;
  bool ordering_correction = false;
  bool frozen_motion = false;
  bool interactions = true;
  double prep_ratio = 10.0;
  double prep_r = 0.0;
  double prep_dphi = 0.0;

  EstimatorConfig estimator;
  double threshold = analysis::kDefaultThreshold;
  double jump_threshold = 0.3;
  Range omega_grid{0.0, 1.0, 0.01};
  Range delta_grid{-0.5, 0.5, 0.01};
  int basin_r_points = 50;
  int basin_dphi_points = 50;
  Range echo_grid_us{0.0, 3.0, 0.25};

  std::string output_stem = "run";
  OutputFormat format = OutputFormat::Csv;

  ExperimentSettings settings() const;
  // Angular-frequency values actually used, for the metadata sidecar.
  nlohmann::json effective_values() const;
  void validate() const;
};

bool operator==(const RunConfig& a, const RunConfig& b);

// Unknown keys, wrong types and out-of-range values raise ConfigError.
RunConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const RunConfig& c);

RunConfig load_config(const std::filesystem::path& path);
void save_config(const RunConfig& c, const std::filesystem::path& path);

}  // namespace cavityxy::cli

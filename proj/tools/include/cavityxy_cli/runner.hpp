#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cavityxy/analysis.hpp"
#include "cavityxy/trajectory.hpp"
#include "cavityxy_cli/config.hpp"

namespace cavityxy::cli {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Command { Simulate, SweepDrive, SweepDetuning, PhaseDiagram, Basin, Echo, FitPeriod };
std::string to_string(Command c);

struct ResultBundle {
  RunConfig config;
  Command command = Command::Simulate;
  std::string version;
  double wall_time_s = 0.0;
  std::vector<std::string> warnings;
  // "ok" or "integration_failure"; failed runs keep whatever was computed.
  std::string status = "ok";
  std::string error;

  std::optional<Trajectory> trajectory;
  std::optional<analysis::SweepResult> sweep;
  std::optional<analysis::PhaseDiagram> diagram;
  std::optional<analysis::BasinMap> basin;
  std::vector<std::pair<double, double>> echo;  // (t_echo in us, revival)
  std::optional<analysis::PeriodFit> fit;
  nlohmann::json summary = nlohmann::json::object();
};

// Warnings that depend only on the configuration (dispersive hierarchy, thermal truncation).
std::vector<std::string> config_warnings(const RunConfig& c);

// Runs one subcommand. Identical configs give identical payloads for any thread count.
ResultBundle run_command(Command cmd, const RunConfig& c, unsigned threads);

// Creates the directory if needed and checks that files can be written there.
void preflight_output(const std::filesystem::path& dir);

// Writes <stem>.csv and/or <stem>.json, <stem>.config.json and <stem>.meta.json (plus
// ridge.json for phase diagrams). Returns the paths written.
std::vector<std::filesystem::path> write_results(const ResultBundle& b,
                                                 const std::filesystem::path& dir);

// CSV writers with the fixed column sets.
void write_sweep_csv(std::ostream& os, const analysis::SweepResult& s);
void write_phase_diagram_csv(std::ostream& os, const analysis::PhaseDiagram& d);
void write_basin_csv(std::ostream& os, const analysis::BasinMap& m);
void write_echo_csv(std::ostream& os, const std::vector<std::pair<double, double>>& echo);

}  // namespace cavityxy::cli

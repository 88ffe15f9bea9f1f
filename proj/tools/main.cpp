#include <exception>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "cavityxy_cli/config.hpp"
#include "cavityxy_cli/oracle_check.hpp"
#include "cavityxy_cli/runner.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitConfig = 2;
constexpr int kExitIntegration = 3;
constexpr int kExitIo = 4;

}  // namespace

int main(int argc, char** argv) {
  using namespace cavityxy::cli;

  CLI::App app{"Cavity-mediated XY spin model simulator"};
  app.require_subcommand(1);
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  unsigned threads = 1;
  std::string format;

  const std::map<std::string, Command> commands = {
      {"simulate", Command::Simulate},          {"sweep-drive", Command::SweepDrive},
      {"sweep-detuning", Command::SweepDetuning}, {"phase-diagram", Command::PhaseDiagram},
      {"basin", Command::Basin},                {"echo", Command::Echo},
      {"fit-period", Command::FitPeriod}};
  const std::map<std::string, std::string> descriptions = {
      {"simulate", "single quench trajectory"},
      {"sweep-drive", "order parameter against drive strength"},
      {"sweep-detuning", "order parameter against detuning"},
      {"phase-diagram", "drive x detuning grid with ridge and jump lines"},
      {"basin", "ferromagnetic basin of prepared initial states"},
      {"echo", "drive reversal revival against echo time"},
      {"fit-period", "oscillation period of a weak-drive quench"}};
  for (const auto& [name, cmd] : commands) {
    CLI::App* sub = app.add_subcommand(name, descriptions.at(name));
    sub->add_option("--config", config_path, "JSON run configuration");
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--seed", seed, "64-bit seed, overrides the config");
    sub->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--format", format, "csv, json or both")
        ->check(CLI::IsMember({"csv", "json", "both"}));
  }
  CLI::App* check = app.add_subcommand("oracle-check", "compare models with exact solutions");
  check->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  if (check->parsed()) {
    return report_checks(std::cout, run_oracle_checks(threads)) ? kExitOk : kExitCheckFailed;
  }

  Command command = Command::Simulate;
  for (const auto& [name, cmd] : commands) {
    if (app.got_subcommand(name)) command = cmd;
  }

  RunConfig config;
  try {
    if (!config_path.empty()) config = load_config(config_path);
    if (seed) {
      config.seed = *seed;
      config.seed_defaulted = false;
    }
    if (!format.empty()) config.format = format_from_string(format);
    config.validate();
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    preflight_output(out_dir);
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kExitIo;
  }

  ResultBundle bundle;
  try {
    bundle = run_command(command, config, threads);
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
  for (const auto& w : bundle.warnings) std::cerr << "warning: " << w << '\n';

  try {
    for (const auto& p : write_results(bundle, out_dir)) std::cout << p.string() << '\n';
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kExitIo;
  }
  if (bundle.status != "ok") {
    std::cerr << "integration failure: " << bundle.error << '\n';
    return kExitIntegration;
  }
  return kExitOk;
}

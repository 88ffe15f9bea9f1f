#include "cavityxy_cli/runner.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include "cavityxy/experiment.hpp"
#include "cavityxy/motion.hpp"
#include "cavityxy/parallel.hpp"

#ifndef CAVITYXY_VERSION
#define CAVITYXY_VERSION "unknown"
#endif

namespace cavityxy::cli {

using nlohmann::json;

std::string to_string(Command c) {
  switch (c) {
    case Command::Simulate: return "simulate";
    case Command::SweepDrive: return "sweep-drive";
    case Command::SweepDetuning: return "sweep-detuning";
    case Command::PhaseDiagram: return "phase-diagram";
    case Command::Basin: return "basin";
    case Command::Echo: return "echo";
    case Command::FitPeriod: return "fit-period";
  }
  return "simulate";
}

std::vector<std::string> config_warnings(const RunConfig& c) {
  std::vector<std::string> w;
  const ExperimentSettings s = c.settings();
  if (!c.chiN_hz && !s.params.dispersive_ok()) {
    w.push_back("dispersive hierarchy violated: need |Delta| > 10 g sqrt(N) and |Delta| > 10 kappa");
  }
  if (c.model == ModelKind::Motion && s.params.trap) {
    const TrapParams& trap = *s.params.trap;
    const auto occ = motion::thermal_populations(
        s.params.temperature, motion::trap_frequency(trap.V0, trap.recoil_k, trap.mass), trap.n_max);
    if (occ.warning) {
      w.push_back("thermal weight above n_max is " + format_double(occ.truncated_weight) +
                  "; raise trap.n_max");
    }
  }
  return w;
}

namespace {

json critical_json(const analysis::CriticalPoint& cp) {
  return {{"value", cp.value},
          {"method", std::string(analysis::to_string(cp.method))},
          {"uncertainty", cp.uncertainty},
          {"strength", cp.strength}};
}

std::vector<double> basin_r(int n) {
  std::vector<double> r(n);
  for (int i = 0; i < n; ++i) r[i] = static_cast<double>(i) / (n - 1);
  return r;
}

std::vector<double> basin_dphi(int n) {
  std::vector<double> p(n);
  for (int j = 0; j < n; ++j) p[j] = -kPi + kTwoPi * j / n;
  return p;
}

void run_payload(ResultBundle& b, Command cmd, const RunConfig& c, unsigned threads) {
  const Experiment ex(c.settings());
  const analysis::Estimator est = c.estimator.build();
  switch (cmd) {
    case Command::Simulate: {
      if (c.protocol == Protocol::PrepQuench) {
        b.trajectory = ex.prep_quench(c.omega_over_chiN, c.prep_r, c.prep_dphi, threads);
      } else {
        b.trajectory = ex.quench(c.omega_over_chiN, c.delta_over_chiN, threads);
      }
      b.summary["jz_bar"] = analysis::order_parameter(*b.trajectory, est).jz_bar;
      break;
    }
    case Command::FitPeriod: {
      b.trajectory = ex.quench(c.omega_over_chiN, c.delta_over_chiN, threads);
      b.fit = analysis::fit_period(*b.trajectory);
      b.summary["period_s"] = b.fit->period;
      b.summary["amplitude"] = b.fit->amplitude;
      b.summary["phase"] = b.fit->phase;
      b.summary["offset"] = b.fit->offset;
      b.summary["slope_per_s"] = b.fit->slope;
      b.summary["residual_rms"] = b.fit->residual_rms;
      b.summary["oscillating"] = b.fit->oscillating;
      break;
    }
    case Command::SweepDrive: {
      const auto grid = c.omega_grid.values();
      b.sweep = analysis::sweep(
          grid, [&](double w) { return ex.quench(w, c.delta_over_chiN); }, est, c.threshold,
          threads, c.delta_over_chiN);
      if (grid.size() >= 3) {
        b.summary["critical_max_gradient"] = critical_json(analysis::critical_drive(*b.sweep));
        b.summary["critical_jump"] =
            critical_json(analysis::critical_drive(*b.sweep, analysis::CriticalMethod::Jump));
      }
      break;
    }
    case Command::SweepDetuning: {
      const auto grid = c.delta_grid.values();
      b.sweep = analysis::sweep(
          grid, [&](double d) { return ex.quench(c.omega_over_chiN, d); }, est, c.threshold,
          threads, c.omega_over_chiN);
      if (grid.size() >= 3 && grid.front() < 0.0 && grid.back() > 0.0) {
        const auto dc = analysis::critical_detuning(*b.sweep);
        b.summary["critical_negative"] = critical_json(dc.negative);
        b.summary["critical_positive"] = critical_json(dc.positive);
      }
      break;
    }
    case Command::PhaseDiagram: {
      b.diagram = analysis::phase_diagram(
          c.delta_grid.values(), c.omega_grid.values(),
          [&](double w, double d) { return ex.quench(w, d); }, est, c.threshold, threads,
          c.jump_threshold);
      break;
    }
    case Command::Basin: {
      const auto r = basin_r(c.basin_r_points);
      const auto p = basin_dphi(c.basin_dphi_points);
      analysis::BasinReference ref;
      if (c.model == ModelKind::Collective) {
        ref = [&](double rr, double pp) { return ex.basin_reference(c.omega_over_chiN, rr, pp); };
      }
      b.basin = analysis::basin_map(
          r, p, [&](double rr, double pp) {
            return ex.basin_cell(c.omega_over_chiN, rr, pp, est, c.threshold);
          },
          ref, threads);
      b.summary["ferromagnetic_fraction"] = b.basin->ferromagnetic_fraction();
      if (ref) {
        b.summary["analytic_ferromagnetic_fraction"] = b.basin->analytic_ferromagnetic_fraction();
        b.summary["mismatches_away_from_boundary"] =
            analysis::basin_mismatches_away_from_boundary(*b.basin);
      }
      break;
    }
    case Command::Echo: {
      const auto grid = c.echo_grid_us.values();
      const auto z = parallel_map<double>(grid.size(), threads, [&](std::size_t i) {
        return ex.echo(c.omega_over_chiN, grid[i] * 1e-6);
      });
      for (std::size_t i = 0; i < grid.size(); ++i) b.echo.emplace_back(grid[i], z[i]);
      break;
    }
  }
}

}  // namespace

ResultBundle run_command(Command cmd, const RunConfig& c, unsigned threads) {
  ResultBundle b;
  b.config = c;
  b.command = cmd;
  b.version = CAVITYXY_VERSION;
  b.warnings = config_warnings(c);
  if (c.seed_defaulted) b.warnings.push_back("seed not given; using the default seed 0");
  const auto t0 = std::chrono::steady_clock::now();
  try {
    run_payload(b, cmd, c, threads);
  } catch (const IntegrationError& e) {
    b.status = "integration_failure";
    b.error = e.what();
  }
  b.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return b;
}

void preflight_output(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw IoError("cannot create output directory '" + dir.string() + "'");
  }
  const auto probe = dir / ".cavityxy_write_probe";
  {
    std::ofstream out(probe);
    if (!out) throw IoError("output directory '" + dir.string() + "' is not writable");
  }
  std::filesystem::remove(probe, ec);
}

void write_sweep_csv(std::ostream& os, const analysis::SweepResult& s) {
  os << "control_1,control_2,jz_bar,phase_label,gradient\r\n";
  for (std::size_t i = 0; i < s.size(); ++i) {
    os << format_double(s.control[i]) << ',' << format_double(s.control_2) << ','
       << format_double(s.jz_bar[i]) << ',' << to_string(s.labels[i]) << ','
       << format_double(s.gradient[i]) << "\r\n";
  }
}

void write_phase_diagram_csv(std::ostream& os, const analysis::PhaseDiagram& d) {
  os << "control_1,control_2,jz_bar,phase_label,gradient\r\n";
  for (std::size_t i = 0; i < d.omega.size(); ++i) {
    for (std::size_t j = 0; j < d.delta.size(); ++j) {
      os << format_double(d.delta[j]) << ',' << format_double(d.omega[i]) << ','
         << format_double(d.jz_bar[i][j]) << ',' << to_string(d.labels[i][j]) << ','
         << format_double(d.gradient[i][j]) << "\r\n";
    }
  }
}

void write_basin_csv(std::ostream& os, const analysis::BasinMap& m) {
  const bool ref = !m.analytic.empty();
  os << "r,dphi,jz_bar,phase_label";
  if (ref) os << ",analytic_label";
  os << "\r\n";
  for (std::size_t i = 0; i < m.r.size(); ++i) {
    for (std::size_t j = 0; j < m.dphi.size(); ++j) {
      os << format_double(m.r[i]) << ',' << format_double(m.dphi[j]) << ','
         << format_double(m.jz_bar[i][j]) << ',' << to_string(m.simulated[i][j]);
      if (ref) os << ',' << to_string(m.analytic[i][j]);
      os << "\r\n";
    }
  }
}

void write_echo_csv(std::ostream& os, const std::vector<std::pair<double, double>>& echo) {
  os << "t_echo_us,jz_norm_revival\r\n";
  for (const auto& [t, z] : echo) os << format_double(t) << ',' << format_double(z) << "\r\n";
}

namespace {

json payload_json(const ResultBundle& b) {
  json j;
  if (b.trajectory) {
    const Trajectory& t = *b.trajectory;
    j["trajectory"] = {{"t_s", t.t}, {"x_norm", t.x}, {"y_norm", t.y}, {"z_norm", t.z},
                       {"energy", t.energy}};
    if (t.has_cavity_columns()) {
      j["trajectory"]["beta_re"] = t.beta_re;
      j["trajectory"]["beta_im"] = t.beta_im;
      j["trajectory"]["n_sim"] = t.n_sim;
      j["trajectory"]["n_phys_shot"] = t.n_phys;
    }
  }
  auto labels = [](const std::vector<Phase>& v) {
    std::vector<std::string> out;
    for (Phase p : v) out.emplace_back(to_string(p));
    return out;
  };
  if (b.sweep) {
    j["sweep"] = {{"control_1", b.sweep->control}, {"control_2", b.sweep->control_2},
                  {"jz_bar", b.sweep->jz_bar}, {"phase_label", labels(b.sweep->labels)},
                  {"gradient", b.sweep->gradient}};
    if (!b.sweep->spread.empty()) j["sweep"]["spread"] = b.sweep->spread;
  }
  if (b.diagram) {
    json rows = json::array();
    for (std::size_t i = 0; i < b.diagram->omega.size(); ++i) rows.push_back(labels(b.diagram->labels[i]));
    j["phase_diagram"] = {{"delta_over_chiN", b.diagram->delta},
                          {"omega_over_chiN", b.diagram->omega},
                          {"jz_bar", b.diagram->jz_bar},
                          {"phase_label", rows},
                          {"gradient", b.diagram->gradient}};
  }
  if (b.basin) {
    json sim = json::array(), ana = json::array();
    for (const auto& row : b.basin->simulated) sim.push_back(labels(row));
    for (const auto& row : b.basin->analytic) ana.push_back(labels(row));
    j["basin"] = {{"r", b.basin->r}, {"dphi", b.basin->dphi}, {"jz_bar", b.basin->jz_bar},
                  {"simulated", sim}, {"analytic", ana}};
  }
  if (!b.echo.empty()) {
    json e = json::array();
    for (const auto& [t, z] : b.echo) e.push_back({{"t_echo_us", t}, {"jz_norm_revival", z}});
    j["echo"] = e;
  }
  if (!b.summary.empty()) j["summary"] = b.summary;
  return j;
}

json polyline(const std::vector<std::pair<double, double>>& pts) {
  json a = json::array();
  for (const auto& [d, w] : pts) a.push_back({d, w});
  return a;
}

void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw IoError("cannot write '" + p.string() + "'");
  out << text;
  if (!out) throw IoError("write failed for '" + p.string() + "'");
}

}  // namespace

std::vector<std::filesystem::path> write_results(const ResultBundle& b,
                                                 const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> written;
  const std::string stem = b.config.output_stem;
  const bool csv = b.config.format != OutputFormat::Json;
  const bool js = b.config.format != OutputFormat::Csv;

  if (csv) {
    std::ostringstream os;
    if (b.sweep) {
      write_sweep_csv(os, *b.sweep);
    } else if (b.diagram) {
      write_phase_diagram_csv(os, *b.diagram);
    } else if (b.basin) {
      write_basin_csv(os, *b.basin);
    } else if (!b.echo.empty()) {
      write_echo_csv(os, b.echo);
    } else if (b.trajectory) {
      write_trajectory_csv(os, *b.trajectory);
    }
    if (!os.str().empty()) {
      written.push_back(dir / (stem + ".csv"));
      write_text(written.back(), os.str());
    }
  }
  if (js) {
    written.push_back(dir / (stem + ".json"));
    write_text(written.back(), payload_json(b).dump(2) + "\n");
  }
  if (b.diagram) {
    const json ridge = {{"jump_line", polyline(b.diagram->jump_line)},
                        {"ridge", polyline(b.diagram->ridge)},
                        {"jump_threshold", b.diagram->jump_threshold}};
    written.push_back(dir / "ridge.json");
    write_text(written.back(), ridge.dump(2) + "\n");
  }
  written.push_back(dir / (stem + ".config.json"));
  write_text(written.back(), config_to_json(b.config).dump(2) + "\n");

  json meta;
  meta["command"] = to_string(b.command);
  meta["version"] = b.version;
  meta["wall_time_s"] = b.wall_time_s;
  meta["status"] = b.status;
  if (!b.error.empty()) meta["error"] = b.error;
  meta["warnings"] = b.warnings;
  meta["config"] = config_to_json(b.config);
  meta["effective"] = b.config.effective_values();
  if (!b.summary.empty()) meta["summary"] = b.summary;
  written.push_back(dir / (stem + ".meta.json"));
  write_text(written.back(), meta.dump(2) + "\n");
  return written;
}

}  // namespace cavityxy::cli

#include "cavityxy/experiment.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "cavityxy/ensemble.hpp"
#include "cavityxy/motion.hpp"
#include "cavityxy/oracle.hpp"
#include "cavityxy/parallel.hpp"

namespace cavityxy {

std::string_view to_string(ModelKind m) {
  switch (m) {
    case ModelKind::Collective: return "COLLECTIVE";
    case ModelKind::EnsembleAdiabatic: return "ENSEMBLE_ADIABATIC";
    case ModelKind::EnsembleFullCavity: return "ENSEMBLE_FULL_CAVITY";
    case ModelKind::Motion: return "MOTION";
  }
  return "COLLECTIVE";
}

ModelKind model_kind_from_string(std::string_view s) {
  for (ModelKind m : {ModelKind::Collective, ModelKind::EnsembleAdiabatic,
                      ModelKind::EnsembleFullCavity, ModelKind::Motion}) {
    if (to_string(m) == s) return m;
  }
  throw std::invalid_argument("unknown model '" + std::string(s) + "'");
}

void ExperimentSettings::validate() const {
  params.validate();
  if (n_sim == 0) throw std::invalid_argument("n_sim must be >= 1");
  if (lattice_sites < 1) throw std::invalid_argument("lattice_sites must be >= 1");
  if (n_shots == 0) throw std::invalid_argument("n_shots must be >= 1");
  if (!(fluctuation_rms >= 0.0)) throw std::invalid_argument("fluctuation_rms must be >= 0");
  if (!(t_final > 0.0)) throw std::invalid_argument("t_final must be > 0");
  if (!(dt_out > 0.0)) throw std::invalid_argument("dt_out must be > 0");
  if (!(prep_ratio > 0.0)) throw std::invalid_argument("prep_ratio must be > 0");
  if (model == ModelKind::Motion && !params.trap) {
    throw std::invalid_argument("the MOTION model needs trap parameters");
  }
  if (chiN_override && model != ModelKind::Collective) {
    throw std::invalid_argument("chiN can only be set directly for the COLLECTIVE model");
  }
}

double nominal_chiN(const ExperimentSettings& s) {
  if (s.chiN_override) return *s.chiN_override;
  return chi_from_cavity(s.params.g, s.params.Delta, s.params.kappa) * s.params.N;
}

Experiment::Experiment(ExperimentSettings s) : s_(std::move(s)) {
  s_.validate();
  chiN_ = nominal_chiN(s_);
}

Trajectory Experiment::run_shot(std::span<const Segment> segments, std::size_t shot,
                                double n_phys) const {
  const double scale = n_phys / s_.params.N;
  if (s_.model == ModelKind::Collective) {
    collective::Params p;
    p.chiN = s_.interactions ? chiN_ * scale : 0.0;
    p.n_atoms = n_phys;
    p.ordering_correction = s_.ordering_correction;
    return collective::run_segments(p, collective::south_pole(), segments, s_.dt_out, s_.tol);
  }
  ModelParams p = s_.params;
  p.N = n_phys;
  const ensemble::Lattice lattice{s_.lattice_sites, s_.commensurate};
  ensemble::SiteConfig sites = ensemble::sample_site_couplings(s_.seed, s_.n_sim, p, lattice, shot);
  if (s_.model == ModelKind::Motion) {
    const TrapParams& trap = *p.trap;
    const double omega_T = motion::trap_frequency(trap.V0, trap.recoil_k, trap.mass);
    const motion::EtaMatrices eta =
        s_.frozen_motion ? motion::eta_frozen(trap.n_max)
                         : motion::eta_coefficients(omega_T, trap.mass, p.lambda_c, trap.n_max);
    motion::Model m = motion::make_model(p, sites, eta, lattice, omega_T);
    m.interactions = s_.interactions;
    const auto pops = motion::thermal_populations(p.temperature, omega_T, trap.n_max);
    return motion::run_segments(m, motion::thermal_ground_state(m, pops.p), segments, s_.dt_out,
                                s_.tol);
  }
  const auto mode = s_.model == ModelKind::EnsembleFullCavity ? ensemble::CavityMode::Explicit
                                                              : ensemble::CavityMode::Adiabatic;
  ensemble::Model m = ensemble::make_model(p, std::move(sites), mode);
  m.interactions = s_.interactions;
  return ensemble::run_segments(m, ensemble::ground_state(s_.n_sim), segments, s_.dt_out, s_.tol);
}

Trajectory Experiment::run(std::span<const Segment> segments, unsigned threads) const {
  if (s_.n_shots == 1 && s_.fluctuation_rms == 0.0) return run_shot(segments, 0, s_.params.N);
  auto summary = ensemble::run_shots(
      [&](std::size_t shot, double n_phys) { return run_shot(segments, shot, n_phys); },
      s_.n_shots, s_.fluctuation_rms, s_.params.N, s_.seed, threads);
  return std::move(summary.mean);
}

Trajectory Experiment::quench_absolute(std::complex<double> drive, double delta,
                                       unsigned threads) const {
  const Segment seg{s_.t_final, drive, delta, true};
  return run(std::span<const Segment>(&seg, 1), threads);
}

Trajectory Experiment::quench(double omega_ratio, double delta_ratio, unsigned threads) const {
  return quench_absolute({omega_ratio * chiN_, 0.0}, delta_ratio * chiN_, threads);
}

namespace {
// Sign of the quench drive, falling back to the sign of chi N.
double drive_sign(double omega_ratio, double chiN) {
  const double v = omega_ratio * chiN;
  if (v != 0.0) return v > 0.0 ? 1.0 : -1.0;
  return chiN < 0.0 ? -1.0 : 1.0;
}
}  // namespace

std::vector<Segment> Experiment::prep_segments(double omega_ratio, double r, double dphi) const {
  if (!(r >= 0.0 && r <= 1.0)) throw std::invalid_argument("prep: r must lie in [0, 1]");
  if (chiN_ == 0.0) throw std::invalid_argument("prep: needs a nonzero chi N");
  const double sign = drive_sign(omega_ratio, chiN_);
  const double strength = s_.prep_ratio * std::abs(chiN_);
  const double angle = std::asin(r);
  std::vector<Segment> segs;
  if (angle > 0.0) segs.push_back({angle / strength, {sign * strength, 0.0}, 0.0, false});
  // F = Omega - i Omega': a phase jump dphi turns the drive vector (Omega, Omega') by dphi.
  const std::complex<double> drive = omega_ratio * chiN_ * std::polar(1.0, -dphi);
  segs.push_back({s_.t_final, drive, 0.0, true});
  return segs;
}

Trajectory Experiment::prep_quench(double omega_ratio, double r, double dphi,
                                   unsigned threads) const {
  const auto segs = prep_segments(omega_ratio, r, dphi);
  return run(segs, threads);
}

std::pair<double, double> Experiment::prepared_angles(double omega_ratio, double r,
                                                      double dphi) const {
  const double sign = drive_sign(omega_ratio, chiN_);
  // Rotation about the drive axis from the south pole lands at azimuth +-pi/2.
  const double theta = kPi - std::asin(r);
  const double phi_state = sign * 0.5 * kPi;
  // The signed drive vector points along azimuth dphi; rotate it onto x.
  return {theta, std::remainder(phi_state - dphi, kTwoPi)};
}

Phase Experiment::basin_reference(double omega_ratio, double r, double dphi) const {
  const auto [theta, phi] = prepared_angles(omega_ratio, r, dphi);
  const double N = s_.params.N;
  return oracle::basin_boundary_exact(N, chiN_ / N, omega_ratio * chiN_, theta, phi);
}

analysis::BasinCell Experiment::basin_cell(double omega_ratio, double r, double dphi,
                                           const analysis::Estimator& est,
                                           double threshold) const {
  const auto segs = prep_segments(omega_ratio, r, dphi);
  if (s_.model == ModelKind::Collective && s_.n_shots == 1) {
    collective::Params p;
    p.chiN = chiN_;
    p.n_atoms = s_.params.N;
    p.ordering_correction = s_.ordering_correction;
    collective::BlochState start = collective::south_pole();
    if (segs.size() > 1) {
      collective::Params prep = p;
      prep.omega = segs.front().drive.real();
      start = collective::evolve(prep, start, segs.front().duration, s_.tol);
      start.t = 0.0;
    }
    const Segment& q = segs.back();
    p.omega = q.drive.real();
    p.omega_prime = -q.drive.imag();
    const Phase ph = collective::classify_by_trajectory(start, p, 20.0, s_.tol);
    const Trajectory tr = collective::integrate_quench(p, start, s_.t_final, s_.dt_out, s_.tol);
    return {ph, analysis::order_parameter(tr, est).jz_bar};
  }
  const Trajectory tr = run(segs);
  const double jz = analysis::order_parameter(tr, est).jz_bar;
  return {analysis::classify_phase(jz, threshold), jz};
}

double Experiment::echo(double omega_ratio, double t_echo, unsigned threads) const {
  if (t_echo < 0.0) throw std::invalid_argument("echo: t_echo must be >= 0");
  if (t_echo == 0.0) return -1.0;
  const std::complex<double> f{omega_ratio * chiN_, 0.0};
  const Segment segs[2] = {{t_echo, f, 0.0, true}, {t_echo, -f, 0.0, true}};
  const Trajectory tr = run(segs, threads);
  return tr.z.back();
}

}  // namespace cavityxy

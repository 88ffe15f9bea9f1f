#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "cavityxy/analysis.hpp"
#include "cavityxy/collective.hpp"
#include "cavityxy/integrator.hpp"
#include "cavityxy/params.hpp"
#include "cavityxy/trajectory.hpp"

namespace cavityxy {

enum class ModelKind { Collective, EnsembleAdiabatic, EnsembleFullCavity, Motion };

std::string_view to_string(ModelKind m);
// Accepts the upper-case names COLLECTIVE, ENSEMBLE_ADIABATIC, ENSEMBLE_FULL_CAVITY, MOTION.
ModelKind model_kind_from_string(std::string_view s);

struct ExperimentSettings {
  ModelKind model = ModelKind::Collective;
  // params.N is the nominal atom number; params.delta and params.omega_p are ignored because
  // every protocol sets the drive and detuning explicitly.
  ModelParams params = reference_params();
  // Collective model only: use this chi N (rad/s) instead of the cavity-derived value.
  std::optional<double> chiN_override;
  std::size_t n_sim = 1000;
  bool commensurate = false;
  std::int64_t lattice_sites = 10000;
  std::size_t n_shots = 1;
  double fluctuation_rms = 0.0;
  std::uint64_t seed = 0;
  double t_final = 6e-6;
  double dt_out = 1e-8;
  Tolerance tol;
  bool ordering_correction = false;
  // Motion model: replace the motional overlaps by the identity.
  bool frozen_motion = false;
  bool interactions = true;
  // Strength of the state-preparation drive in units of |chi N|.
  double prep_ratio = 10.0;

  void validate() const;
};

// Signed chi N for the nominal atom number, rad/s.
double nominal_chiN(const ExperimentSettings& s);

// Runs protocols on the selected model. Drives and detunings passed as ratios are multiplied by
// the nominal signed chi N, so they stay fixed in absolute units while chi N fluctuates from
// shot to shot.
class Experiment {
 public:
  explicit Experiment(ExperimentSettings s);

  const ExperimentSettings& settings() const { return s_; }
  double chiN() const { return chiN_; }

  // Shot-averaged trajectory from the south pole; z_spread holds the shot-to-shot spread when
  // more than one shot is run.
  Trajectory run(std::span<const Segment> segments, unsigned threads = 1) const;
  // Absolute drive field (rad/s) and detuning for t_final.
  Trajectory quench_absolute(std::complex<double> drive, double delta, unsigned threads = 1) const;
  Trajectory quench(double omega_ratio, double delta_ratio, unsigned threads = 1) const;

  // A strong drive along the quench axis rotates the south pole to radial coordinate r
  // (unrecorded), then the drive phase jumps by dphi and its amplitude to omega_ratio chi N.
  std::vector<Segment> prep_segments(double omega_ratio, double r, double dphi) const;
  Trajectory prep_quench(double omega_ratio, double r, double dphi, unsigned threads = 1) const;
  // State right after an ideal, instantaneous preparation, in the quench-drive frame used by
  // the energy-shell classifier: polar angle from +z and azimuth relative to the drive.
  std::pair<double, double> prepared_angles(double omega_ratio, double r, double dphi) const;

  // Basin cell on this model. The collective model is classified by whether z crosses the
  // equator within 20 interaction periods; other models by the order parameter.
  analysis::BasinCell basin_cell(double omega_ratio, double r, double dphi,
                                 const analysis::Estimator& est,
                                 double threshold = analysis::kDefaultThreshold) const;
  // Energy-shell label for the ideally prepared state.
  Phase basin_reference(double omega_ratio, double r, double dphi) const;

  // Drive +omega for t_echo, then -omega for t_echo; shot-averaged normalized z at the end.
  double echo(double omega_ratio, double t_echo, unsigned threads = 1) const;

 private:
  Trajectory run_shot(std::span<const Segment> segments, std::size_t shot, double n_phys) const;

  ExperimentSettings s_;
  double chiN_ = 0.0;
};

}  // namespace cavityxy

#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "cavityxy/integrator.hpp"
#include "cavityxy/params.hpp"
#include "cavityxy/trajectory.hpp"

namespace cavityxy::ensemble {

enum class CavityMode { Adiabatic, Explicit };

struct Lattice {
  std::int64_t sites = 10000;
  // Lattice wavelength an even multiple of the cavity wavelength: every site at an antinode.
  bool commensurate = false;
};

struct SiteConfig {
  std::vector<std::int64_t> site;
  std::vector<double> radius;
  // cos(k j) times the radial factor; multiplies the single-atom drive.
  std::vector<double> profile;
  // Coupling with the sqrt(N_phys/N_sim) rescaling applied, rad/s.
  std::vector<double> coupling;
  double g_peak = 0.0;
  double n_phys = 1.0;

  std::size_t n_sim() const { return coupling.size(); }
};

// Draws site indices and radii for one shot. Deterministic in (seed, shot).
SiteConfig sample_site_couplings(std::uint64_t seed, std::size_t n_sim, const ModelParams& p,
                                 const Lattice& lattice = {}, std::uint64_t shot = 0);

// All sites at the antinode with zero radius.
SiteConfig uniform_sites(std::size_t n_sim, double g, double n_phys);

struct Model {
  SiteConfig sites;
  // chi_kj = chi_scale * G_k * G_j.
  double chi_scale = 0.0;
  double Delta = 0.0;
  double kappa = 0.0;
  double gamma = 0.0;
  double gamma_el = 0.0;
  // Peak transverse field F = Omega - i Omega'; site k sees F * profile_k.
  std::complex<double> drive{0.0, 0.0};
  double delta = 0.0;
  CavityMode mode = CavityMode::Adiabatic;
  bool interactions = true;

  // chi of an antinode atom at the physical atom number, rad/s.
  double chi_peak() const { return chi_scale * sites.g_peak * sites.g_peak; }
  double chiN() const { return chi_peak() * sites.n_phys; }
};

Model make_model(const ModelParams& p, SiteConfig sites, CavityMode mode = CavityMode::Adiabatic);

struct EnsembleState {
  std::vector<std::complex<double>> c;
  std::vector<double> z;
  std::complex<double> beta{0.0, 0.0};
  double t = 0.0;

  std::size_t size() const { return z.size(); }
};

EnsembleState ground_state(std::size_t n_sim);
EnsembleState product_state(std::size_t n_sim, double theta, double phi);

// Flat layout used by the integrator: Re c, Im c, z, Re beta, Im beta.
std::vector<double> pack(const EnsembleState& s);
EnsembleState unpack(std::span<const double> y, double t = 0.0);

EnsembleState site_rhs_adiabatic(const EnsembleState& s, const Model& m);
EnsembleState site_rhs_full_cavity(const EnsembleState& s, const Model& m);

// Mean-field energy in rad/s for the simulated sites.
double ensemble_energy(const EnsembleState& s, const Model& m);
// Energy scaled to the physical atom number and divided by |chi_peak| (N_phys/2)^2.
double normalized_energy(const EnsembleState& s, const Model& m);

// Largest 4|c_k|^2 + z_k^2 over sites.
double max_purity(const EnsembleState& s);
double max_purity(std::span<const double> y);

struct Collective {
  double x = 0.0, y = 0.0, z = 0.0;
};
// Site sums divided by N_sim: the normalized collective Bloch vector.
Collective collective_average(const EnsembleState& s);

class System {
 public:
  explicit System(Model m);
  void set_segment(const Segment& s);
  void operator()(double t, std::span<const double> y, std::span<double> dy) const;
  void observe(double t, const std::vector<double>& y, Trajectory& out) const;
  const Model& model() const { return m_; }

 private:
  Model m_;
};

Trajectory run_segments(const Model& m, const EnsembleState& initial,
                        std::span<const Segment> segments, double dt_out,
                        const Tolerance& tol = {}, EnsembleState* final_state = nullptr);

Trajectory integrate_quench(const Model& m, const EnsembleState& initial, double t_final,
                            double dt_out, const Tolerance& tol = {});

// N_phys for one shot: Gaussian around n_nominal with the given relative rms, clamped to
// four standard deviations and to at least one atom.
double draw_atom_number(std::uint64_t seed, std::uint64_t shot, double n_nominal,
                        double fluctuation_rms);

struct ShotSummary {
  Trajectory mean;
  // Pointwise standard deviation across shots of the normalized components.
  std::vector<double> x_std, y_std, z_std;
  std::vector<double> n_phys;
};

using ShotRunner = std::function<Trajectory(std::size_t shot, double n_phys)>;

ShotSummary run_shots(const ShotRunner& run, std::size_t n_shots, double fluctuation_rms,
                      double n_nominal, std::uint64_t seed, unsigned threads = 1);

}  // namespace cavityxy::ensemble

#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "cavityxy/ensemble.hpp"
#include "cavityxy/integrator.hpp"
#include "cavityxy/params.hpp"
#include "cavityxy/trajectory.hpp"

namespace cavityxy::motion {

// Two independent evaluations of the same quantity disagree.
class ConsistencyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// sqrt(4 V0 E_r)/hbar with E_r = hbar^2 k^2 / (2 m).
double trap_frequency(double V0, double recoil_k, double mass);

// k_c x0 with x0 = sqrt(hbar / (m omega_T)).
double lamb_dicke(double omega_T, double mass, double lambda_c);

struct EtaMatrices {
  Eigen::MatrixXd cos_part;  // <n| cos(k x) |m>
  Eigen::MatrixXd sin_part;  // <n| sin(k x) |m>

  int n_max() const { return static_cast<int>(cos_part.rows()) - 1; }
};

// Gauss-Hermite quadrature; order 0 selects 2 n_max + 32 nodes.
EtaMatrices eta_quadrature(double kx0, int n_max, int order = 0);
// Displacement-operator matrix elements written with associated Laguerre polynomials.
EtaMatrices eta_closed_form(double kx0, int n_max);
// Quadrature result, verified against the closed form to 1e-8.
EtaMatrices eta_coefficients(double omega_T, double mass, double lambda_c, int n_max);
EtaMatrices eta_from_lamb_dicke(double kx0, int n_max);
// The frozen-motion limit: cos part identity, sin part zero.
EtaMatrices eta_frozen(int n_max);

// g cos(k j) eta_c + g sin(k j) eta_s
Eigen::MatrixXd level_couplings(std::int64_t site, double g, const EtaMatrices& eta,
                                double lambda_L, double lambda_c);

struct ThermalOccupation {
  std::vector<double> p;
  double truncated_weight = 0.0;
  bool warning = false;  // more than 1% of the weight lies above n_max
};

ThermalOccupation thermal_populations(double temperature, double omega_T, int n_max);

struct Model {
  int n_max = 0;
  double omega_T = 0.0;
  // Dimensionless level-coupling shape per site: radial * (cos(kj) eta_c + sin(kj) eta_s).
  std::vector<Eigen::MatrixXd> shape;
  // Peak coupling with the sqrt(N_phys / N_sim) rescaling, rad/s.
  double coupling = 0.0;
  double g_peak = 0.0;
  double n_phys = 1.0;
  double chi_scale = 0.0;
  double gamma = 0.0;
  double gamma_el = 0.0;
  std::complex<double> drive{0.0, 0.0};
  double delta = 0.0;
  bool interactions = true;

  std::size_t n_sites() const { return shape.size(); }
  int dim() const { return 2 * (n_max + 1); }
  double chi_peak() const { return chi_scale * g_peak * g_peak; }
  double chiN() const { return chi_peak() * n_phys; }
};

// Uses the site positions of `sites`. Passing eta_frozen() gives the frozen-motion limit,
// which reproduces the per-site spin model.
Model make_model(const ModelParams& p, const ensemble::SiteConfig& sites, const EtaMatrices& eta,
                 const ensemble::Lattice& lattice, double omega_T);

// Per-site density matrices over (spin down, spin up) x (trap level); basis index
// spin * (n_max + 1) + n.
struct MotionState {
  std::vector<Eigen::MatrixXcd> rho;
  double t = 0.0;
};

MotionState thermal_ground_state(const Model& m, std::span<const double> populations);

std::vector<double> pack(const MotionState& s);
MotionState unpack(std::span<const double> y, std::size_t n_sites, int dim, double t = 0.0);

MotionState motion_rhs(const MotionState& s, const Model& m);

struct SiteObservables {
  std::complex<double> coherence;  // <sigma->
  double inversion = 0.0;          // <sigma_z>
  double up_population = 0.0;
  double trace = 0.0;
};
SiteObservables site_observables(const Eigen::MatrixXcd& rho, int n_max);

// Mean-field energy in rad/s for the simulated sites.
double motion_energy(const MotionState& s, const Model& m);

class System {
 public:
  explicit System(Model m);
  void set_segment(const Segment& s);
  void operator()(double t, std::span<const double> y, std::span<double> dy) const;
  // Throws IntegrationError when a site trace drifts by more than 1e-6.
  void observe(double t, const std::vector<double>& y, Trajectory& out) const;
  const Model& model() const { return m_; }

 private:
  Model m_;
  std::vector<Eigen::MatrixXd> mmt_;
  mutable std::vector<std::complex<double>> lower_;
  mutable Eigen::MatrixXcd h_, x_;
};

Trajectory run_segments(const Model& m, const MotionState& initial,
                        std::span<const Segment> segments, double dt_out,
                        const Tolerance& tol = {}, MotionState* final_state = nullptr);

// Drive with +F for t_echo, then -F for t_echo; returns <Jz>/(N/2) at 2 t_echo.
double run_echo(const Model& m, const MotionState& initial, double t_echo,
                const Tolerance& tol = {});

}  // namespace cavityxy::motion

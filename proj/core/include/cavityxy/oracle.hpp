#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <complex>
#include <span>
#include <stdexcept>
#include <vector>

#include "cavityxy/integrator.hpp"
#include "cavityxy/trajectory.hpp"

namespace cavityxy::oracle {

// The requested exact evolution would need more memory or time than a test fixture may use.
class ResourceError : public std::length_error {
 public:
  using std::length_error::length_error;
};

enum class DickeMethod { Auto, Expm, Krylov };

struct DickeOptions {
  double omega_prime = 0.0;
  DickeMethod method = DickeMethod::Auto;
  int krylov_dim = 30;
};

// Absolute expectation values <Jx>, <Jy>, <Jz> and <H> (rad/s).
struct SpinExpectations {
  std::vector<double> t, jx, jy, jz, energy, norm;
};

// Dicke-manifold Hamiltonian chi J+J- + Omega Jx + Omega' Jy - delta Jz as a tridiagonal
// matrix in the basis of m = k - N/2, k = 0..N.
Eigen::SparseMatrix<std::complex<double>> dicke_hamiltonian(int N, double chi, double omega,
                                                            double delta, double omega_prime = 0);

// Starts from |J = N/2, m = initial_up - N/2>.
SpinExpectations dicke_exact_evolve(int N, double chi, double omega, double delta, int initial_up,
                                    std::span<const double> t_grid, const DickeOptions& opt = {});

using SparseOp = Eigen::SparseMatrix<std::complex<double>>;

// Spins (site 0 is the least significant bit, 1 = up) tensored with an optional cavity Fock
// space truncated at n_photon_max photons.
class HilbertSpace {
 public:
  // n_photon_max < 0 means no cavity mode.
  HilbertSpace(int n_spins, int n_photon_max = -1);

  int n_spins() const { return n_spins_; }
  bool has_cavity() const { return n_ph_ >= 0; }
  int photon_levels() const { return has_cavity() ? n_ph_ + 1 : 1; }
  int dim() const { return (1 << n_spins_) * photon_levels(); }

  SparseOp identity() const;
  SparseOp sigma_minus(int site) const;
  SparseOp sigma_plus(int site) const;
  SparseOp sigma_z(int site) const;
  SparseOp annihilation() const;

  // Product state with every spin at polar angle theta and azimuth phi, cavity in vacuum.
  Eigen::MatrixXcd product_density(double theta, double phi) const;

 private:
  int n_spins_;
  int n_ph_;
};

struct LindbladSpec {
  SparseOp hamiltonian;
  // Jump operators with the square root of their rate folded in.
  std::vector<SparseOp> jumps;
};

struct LindbladResult {
  std::vector<double> t;
  std::vector<std::vector<double>> sz;                 // [time][site]
  std::vector<std::vector<std::complex<double>>> sm;   // [time][site]
  std::vector<std::complex<double>> a;
  std::vector<double> n_photon;
  std::vector<double> trace;
  std::vector<double> min_eigenvalue;
  Eigen::MatrixXcd final_rho;
};

// Integrates the master equation on the dense density matrix. Refuses more than 10 spins
// without a cavity, or more than 6 spins with one.
LindbladResult lindblad_exact_evolve(const HilbertSpace& space, const LindbladSpec& spec,
                                     const Eigen::MatrixXcd& rho0, std::span<const double> t_grid,
                                     const Tolerance& tol = {1e-10, 1e-12},
                                     bool check_positivity = false);

struct SpinRates {
  double gamma = 0.0;     // spontaneous emission
  double gamma_el = 0.0;  // elastic dephasing: coherence decays at gamma_el
};

// sum_kj chi_kj s+_k s-_j + sum_k (F_k s+_k + h.c.)/2 - (delta/2) sum_k s^z_k with
// chi_kj = chi_scale G_k G_j, plus single-site emission and dephasing.
LindbladSpec spin_model(const HilbertSpace& space, std::span<const double> coupling,
                        double chi_scale, std::span<const std::complex<double>> site_drive,
                        double delta, const SpinRates& rates);

// Cavity fluctuation mode at detuning cavity_detuning from the pump with linewidth kappa,
// coupled to each spin with G_k; direct spin drives F_k.
LindbladSpec spin_cavity_model(const HilbertSpace& space, std::span<const double> coupling,
                               double cavity_detuning, double kappa,
                               std::span<const std::complex<double>> site_drive, double delta,
                               const SpinRates& rates);

// Energy-shell test for spherical initial angles at zero longitudinal field.
Phase basin_boundary_exact(double N, double chi, double omega, double theta0, double phi0,
                           double delta = 0.0);

}  // namespace cavityxy::oracle

#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace cavityxy {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;
inline constexpr double kHbar = 1.054571817e-34;       // J s
inline constexpr double kBoltzmann = 1.380649e-23;     // J / K
inline constexpr double kAtomicMassUnit = 1.66053906660e-27;  // kg
inline constexpr double kSpeedOfLight = 299792458.0;   // m / s

// Thrown when an input lies outside the domain of a closed-form expression.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

inline double hz_to_angular(double hz) { return kTwoPi * hz; }
inline double angular_to_hz(double w) { return w / kTwoPi; }

struct TrapParams {
  double V0 = 0.0;        // lattice depth, J
  double recoil_k = 0.0;  // 1/m
  double mass = 0.0;      // kg
  int n_max = 10;

  // Lattice depth chosen so that the harmonic trap frequency equals omega_T.
  static TrapParams from_frequency(double omega_T, double lattice_wavelength,
                                   double mass, int n_max);
  void validate() const;
};

// All rates are angular frequencies (rad/s).
struct ModelParams {
  double g = 0.0;
  double kappa = 0.0;
  double gamma = 0.0;
  double gamma_el = 0.0;
  double Delta = 0.0;
  double delta = 0.0;
  double omega_p = 0.0;
  double phi = 0.0;
  double N = 1.0;
  double lambda_L = 813e-9;
  double lambda_c = 689e-9;
  std::optional<TrapParams> trap;
  double temperature = 0.0;
  double waist = 0.0;     // 0 disables the radial factor
  double sigma_th = 0.0;

  void validate() const;
  // |Delta| > 10 g sqrt(N) and |Delta| > 10 kappa.
  bool dispersive_ok() const;
};

struct DerivedCouplings {
  double chi = 0.0;
  double omega_drive = 0.0;
  double omega_prime = 0.0;
  double chiN = 0.0;
  std::complex<double> alpha{0.0, 0.0};
};

double chi_from_cavity(double g, double Delta, double kappa);
// The -g^2/Delta shortcut, valid for kappa << |Delta|.
double chi_dispersive(double g, double Delta);

struct TransverseDrive {
  double omega = 0.0;
  double omega_prime = 0.0;
  // Complex drive F = omega - i omega_prime; enters the Hamiltonian as (F J+ + F* J-)/2.
  std::complex<double> field() const { return {omega, -omega_prime}; }
};

TransverseDrive drive_from_pump(double g, double omega_p, double phi, double Delta,
                                double delta, double kappa);

double pump_amplitude_from_power(double power, double kappa, double T_m, double T_L,
                                 double omega_pump);

// g cos(pi lambda_L / lambda_c * j)
double coupling_profile(double g, double lambda_L, double lambda_c, std::int64_t site);

std::complex<double> classical_field(double omega_p, double Delta, double delta,
                                     double kappa);

// Time-averaged <Jz>/(N/2) of detuned Rabi flopping from the south pole.
double rabi_rms_magnetization(double omega_drive, double delta);

DerivedCouplings derive_couplings(const ModelParams& p);

// Constants of the strontium cavity experiment this toolkit targets.
ModelParams reference_params();

inline constexpr double kStrontium88Mass = 87.9056122571 * kAtomicMassUnit;

}  // namespace cavityxy

#include "cavityxy/params.hpp"

#include <cmath>

namespace cavityxy {

TrapParams TrapParams::from_frequency(double omega_T, double lattice_wavelength, double mass,
                                      int n_max) {
  if (!(omega_T > 0.0) || !(lattice_wavelength > 0.0) || !(mass > 0.0)) {
    throw DomainError("trap frequency, lattice wavelength and mass must be positive");
  }
  TrapParams t;
  t.recoil_k = kTwoPi / lattice_wavelength;
  t.mass = mass;
  t.n_max = n_max;
  const double recoil_energy = kHbar * kHbar * t.recoil_k * t.recoil_k / (2.0 * mass);
  const double hw = kHbar * omega_T;
  t.V0 = hw * hw / (4.0 * recoil_energy);
  return t;
}

void TrapParams::validate() const {
  if (n_max < 0) throw DomainError("trap.n_max must be >= 0");
  if (!(V0 > 0.0)) throw DomainError("trap.V0 must be > 0");
  if (!(recoil_k > 0.0)) throw DomainError("trap.recoil_k must be > 0");
  if (!(mass > 0.0)) throw DomainError("trap.mass must be > 0");
}

void ModelParams::validate() const {
  auto nonneg = [](double v, const char* name) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw DomainError(std::string(name) + " must be >= 0");
  };
  nonneg(g, "g");
  nonneg(kappa, "kappa");
  nonneg(gamma, "gamma");
  nonneg(gamma_el, "gamma_el");
  nonneg(temperature, "temperature");
  nonneg(waist, "waist");
  nonneg(sigma_th, "sigma_th");
  if (!(N >= 1.0)) throw DomainError("N must be >= 1");
  if (!(lambda_L > 0.0)) throw DomainError("lambda_L must be > 0");
  if (!(lambda_c > 0.0)) throw DomainError("lambda_c must be > 0");
  if (!std::isfinite(Delta) || !std::isfinite(delta) || !std::isfinite(omega_p) ||
      !std::isfinite(phi)) {
    throw DomainError("Delta, delta, omega_p and phi must be finite");
  }
  if (trap) trap->validate();
}

bool ModelParams::dispersive_ok() const {
  const double a = std::abs(Delta);
  return a > 10.0 * g * std::sqrt(N) && a > 10.0 * kappa;
}

double chi_from_cavity(double g, double Delta, double kappa) {
  if (Delta == 0.0) throw DomainError("chi_from_cavity: Delta = 0 violates the dispersive limit");
  return -g * g * Delta / (Delta * Delta + 0.25 * kappa * kappa);
}

double chi_dispersive(double g, double Delta) {
  if (Delta == 0.0) throw DomainError("chi_dispersive: Delta = 0");
  return -g * g / Delta;
}

TransverseDrive drive_from_pump(double g, double omega_p, double phi, double Delta, double delta,
                                double kappa) {
  const double d = Delta - delta;
  const double denom = d * d + 0.25 * kappa * kappa;
  if (denom == 0.0) throw DomainError("drive_from_pump: resonant pump with zero linewidth");
  const double amp = g * std::abs(omega_p) / denom;
  const double s = std::sin(phi);
  const double c = std::cos(phi);
  return {amp * (kappa * s - 2.0 * d * c), amp * (kappa * c + 2.0 * d * s)};
}

double pump_amplitude_from_power(double power, double kappa, double T_m, double T_L,
                                 double omega_pump) {
  if (power < 0.0) throw DomainError("pump_amplitude_from_power: negative power");
  if (!(T_m > 0.0) || !(T_L > 0.0)) throw DomainError("mirror transmissions must be > 0");
  if (!(omega_pump > 0.0)) throw DomainError("pump frequency must be > 0");
  const double kappa_m = kappa * T_m / (T_m + T_L);
  return std::sqrt(kappa_m * power / (2.0 * kHbar * omega_pump));
}

double coupling_profile(double g, double lambda_L, double lambda_c, std::int64_t site) {
  return g * std::cos(kPi * (lambda_L / lambda_c) * static_cast<double>(site));
}

std::complex<double> classical_field(double omega_p, double Delta, double delta, double kappa) {
  const std::complex<double> denom(2.0 * (Delta - delta), -kappa);
  if (denom == 0.0) throw DomainError("classical_field: resonant pump with zero linewidth");
  return -2.0 * omega_p / denom;
}

double rabi_rms_magnetization(double omega_drive, double delta) {
  const double w2 = omega_drive * omega_drive;
  const double d2 = delta * delta;
  if (w2 + d2 == 0.0) return -1.0;
  return -w2 / (2.0 * (d2 + w2)) - 0.5;
}

DerivedCouplings derive_couplings(const ModelParams& p) {
  DerivedCouplings d;
  d.chi = chi_from_cavity(p.g, p.Delta, p.kappa);
  d.chiN = d.chi * p.N;
  const auto drive = drive_from_pump(p.g, p.omega_p, p.phi, p.Delta, p.delta, p.kappa);
  d.omega_drive = drive.omega;
  d.omega_prime = drive.omega_prime;
  d.alpha = classical_field(p.omega_p, p.Delta, p.delta, p.kappa);
  return d;
}

ModelParams reference_params() {
  ModelParams p;
  p.g = hz_to_angular(10.9e3);
  p.kappa = hz_to_angular(153e3);
  p.gamma = hz_to_angular(7.5e3);
  p.gamma_el = hz_to_angular(40e3);
  p.Delta = hz_to_angular(50e6);
  p.delta = 0.0;
  p.N = 950e3;
  p.lambda_L = 813e-9;
  p.lambda_c = 689e-9;
  p.temperature = 14e-6;
  p.trap = TrapParams::from_frequency(hz_to_angular(200e3), p.lambda_L, kStrontium88Mass, 10);
  return p;
}

}  // namespace cavityxy

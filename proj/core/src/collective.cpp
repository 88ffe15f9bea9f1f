#include "cavityxy/collective.hpp"

#include <cmath>

#include "cavityxy/params.hpp"
#include "cavityxy/protocol.hpp"

namespace cavityxy::collective {

BlochState from_angles(double theta, double phi) {
  return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta), 0.0};
}

namespace {

// Longitudinal part of the effective field acting on the normalized vector.
double longitudinal(const Params& p, double z) {
  double h = p.chiN * z + p.delta;
  if (p.ordering_correction) h -= (p.chiN / p.n_atoms) * (1.0 + z);
  return h;
}

void flow(const Params& p, const double* u, double* du) {
  const double h = longitudinal(p, u[2]);
  du[0] = h * u[1] + p.omega_prime * u[2];
  du[1] = -h * u[0] - p.omega * u[2];
  du[2] = p.omega * u[1] - p.omega_prime * u[0];
}

}  // namespace

std::array<double, 3> bloch_rhs(const BlochState& s, const Params& p) {
  const double u[3] = {s.x, s.y, s.z};
  std::array<double, 3> du{};
  flow(p, u, du.data());
  return du;
}

double collective_energy(const BlochState& s, const Params& p) {
  const double half = 0.5 * p.n_atoms;
  const double chi = p.chiN / p.n_atoms;
  const double X = half * s.x, Y = half * s.y, Z = half * s.z;
  double e = chi * (X * X + Y * Y) + p.omega * X + p.omega_prime * Y - p.delta * Z;
  if (p.ordering_correction) e += chi * (Z + Z * Z / p.n_atoms);
  return e;
}

double normalized_energy(const BlochState& s, const Params& p) {
  const double half = 0.5 * p.n_atoms;
  const double e = collective_energy(s, p);
  if (p.chiN == 0.0) return e / half;
  return e / (std::abs(p.chiN) * half * 0.5);
}

void System::set_segment(const Segment& s) {
  p_.omega = s.drive.real();
  p_.omega_prime = -s.drive.imag();
  p_.delta = s.delta;
}

void System::operator()(double, std::span<const double> u, std::span<double> du) const {
  flow(p_, u.data(), du.data());
}

void System::observe(double t, const std::vector<double>& u, Trajectory& out) const {
  const BlochState s{u[0], u[1], u[2], t};
  out.push(t, u[0], u[1], u[2], normalized_energy(s, p_));
}

Trajectory run_segments(const Params& base, const BlochState& initial,
                        std::span<const Segment> segments, double dt_out, const Tolerance& tol,
                        BlochState* final_state) {
  System sys(base);
  std::vector<double> u{initial.x, initial.y, initial.z};
  Trajectory tr = run_protocol(sys, u, segments, dt_out, tol);
  if (final_state) *final_state = {u[0], u[1], u[2], tr.t.back()};
  return tr;
}

Trajectory integrate_quench(const Params& p, const BlochState& initial, double t_final,
                            double dt_out, const Tolerance& tol) {
  if (!(t_final > 0.0)) throw std::invalid_argument("integrate_quench: t_final must be > 0");
  const Segment seg{t_final, {p.omega, -p.omega_prime}, p.delta, true};
  return run_segments(p, initial, std::span<const Segment>(&seg, 1), dt_out, tol);
}

BlochState evolve(const Params& p, const BlochState& initial, double duration,
                  const Tolerance& tol) {
  std::vector<double> u{initial.x, initial.y, initial.z};
  if (duration <= 0.0) return initial;
  System sys(p);
  auto rhs = [&sys](double t, std::span<const double> a, std::span<double> b) { sys(t, a, b); };
  DormandPrince dp(3, tol);
  double t = initial.t;
  dp.advance(rhs, t, u, initial.t + duration);
  return {u[0], u[1], u[2], t};
}

SeparatrixResult separatrix_classify(const BlochState& s, const Params& p) {
  if (p.delta != 0.0) {
    throw UnsupportedRegime("separatrix_classify requires zero longitudinal field");
  }
  SeparatrixResult r;
  const double drive = std::hypot(p.omega, p.omega_prime);
  if (p.chiN == 0.0) {
    // Pure precession about the drive axis reaches the equator unless the drive vanishes.
    r.phase = drive > 0.0 || s.z >= 0.0 ? Phase::Paramagnetic : Phase::Ferromagnetic;
    r.margin = drive;
    return r;
  }
  // Energy per (chi N) (N/4) written in normalized components; the equator shell value is 1.
  const double w = p.omega / p.chiN;
  const double wp = p.omega_prime / p.chiN;
  const double shell = s.x * s.x + s.y * s.y + 2.0 * (w * s.x + wp * s.y);
  const double reach = 2.0 * std::hypot(w, wp);
  r.margin = reach - std::abs(shell - 1.0);
  r.phase = r.margin >= 0.0 ? Phase::Paramagnetic : Phase::Ferromagnetic;
  r.near_separatrix = std::abs(r.margin) < 1e-6;
  return r;
}

Phase classify_by_trajectory(const BlochState& initial, const Params& p, double periods,
                             const Tolerance& tol) {
  const double scale = std::abs(p.chiN) + std::hypot(p.omega, p.omega_prime) + std::abs(p.delta);
  if (scale == 0.0) return initial.z > 0.0 ? Phase::Paramagnetic : Phase::Ferromagnetic;
  const double period = kTwoPi / (p.chiN != 0.0 ? std::abs(p.chiN) : scale);
  const double dt = kTwoPi / scale / 256.0;
  const Trajectory tr = integrate_quench(p, initial, periods * period, dt, tol);
  const auto& z = tr.z;
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (z[i] > 0.0) return Phase::Paramagnetic;
    // A peak between samples: parabola through the three points around a local maximum.
    if (i > 0 && i + 1 < z.size() && z[i] >= z[i - 1] && z[i] >= z[i + 1]) {
      const double curv = z[i - 1] - 2.0 * z[i] + z[i + 1];
      if (curv < 0.0) {
        const double slope = 0.5 * (z[i + 1] - z[i - 1]);
        if (z[i] - 0.5 * slope * slope / curv > 0.0) return Phase::Paramagnetic;
      }
    }
  }
  return Phase::Ferromagnetic;
}

}  // namespace cavityxy::collective

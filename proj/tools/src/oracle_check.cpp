#include "cavityxy_cli/oracle_check.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <ostream>
#include <sstream>

#include "cavityxy/collective.hpp"
#include "cavityxy/ensemble.hpp"
#include "cavityxy/oracle.hpp"
#include "cavityxy/parallel.hpp"
#include "cavityxy/params.hpp"

namespace cavityxy::cli {

namespace {

using cd = std::complex<double>;

// Reference interaction strength used by the small-system checks, rad/s.
constexpr double kChiN = -kTwoPi * 2.25738e6;

std::vector<double> grid(double t_final, int steps) {
  std::vector<double> t(steps + 1);
  for (int i = 0; i <= steps; ++i) t[i] = t_final * i / steps;
  return t;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}

CheckResult bound(std::string name, double value, double limit) {
  return {std::move(name), value < limit, "max deviation " + fmt(value) + " < " + fmt(limit)};
}

CheckResult dicke_rabi() {
  const int N = 10;
  const double omega = kTwoPi * 1e6;
  const auto t = grid(2e-6, 80);
  const auto r = oracle::dicke_exact_evolve(N, 0.0, omega, 0.0, 0, t);
  double dev = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    dev = std::max(dev, std::abs(r.jz[i] + 0.5 * N * std::cos(omega * t[i])) / N);
  }
  return bound("dicke_rabi_limit", dev, 1e-9);
}

CheckResult dicke_undriven() {
  const int N = 12;
  const auto t = grid(2e-6, 40);
  const auto r = oracle::dicke_exact_evolve(N, kChiN / N, 0.0, kTwoPi * 1e5, 4, t);
  double dev = 0.0;
  for (double jz : r.jz) dev = std::max(dev, std::abs(jz - r.jz.front()));
  return bound("dicke_undriven_jz_constant", dev, 1e-12);
}

CheckResult dicke_energy() {
  const int N = 60;
  const auto t = grid(4.0 * kTwoPi / std::abs(kChiN), 50);
  const auto r = oracle::dicke_exact_evolve(N, kChiN / N, 0.3 * kChiN, 0.0, 0, t);
  double dev = 0.0;
  for (double e : r.energy) dev = std::max(dev, std::abs(e - r.energy.front()));
  // The south pole has zero energy; scale by the interaction energy |chi| (N/2)^2.
  const double scale = std::abs(kChiN / N) * 0.25 * N * N;
  return bound("dicke_energy_conserved", dev / scale, 1e-10);
}

// max_t |<Jz>/N exact - mean field| over one interaction period from the south pole.
double meanfield_deviation(int N, double ratio) {
  const double period = kTwoPi / std::abs(kChiN);
  const auto t = grid(period, 200);
  const auto exact = oracle::dicke_exact_evolve(N, kChiN / N, ratio * kChiN, 0.0, 0, t);
  collective::Params p;
  p.chiN = kChiN;
  p.omega = ratio * kChiN;
  p.n_atoms = N;
  const Trajectory mf = collective::integrate_quench(p, collective::south_pole(), period,
                                                     period / 200, {1e-11, 1e-13});
  double dev = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    dev = std::max(dev, std::abs(exact.jz[i] / N - 0.5 * mf.z[i]));
  }
  return dev;
}

std::vector<CheckResult> meanfield_convergence(unsigned threads) {
  const int sizes[] = {20, 50, 100, 200};
  const double ratios[] = {0.3, 0.7};
  const auto dev = parallel_map<double>(8, threads, [&](std::size_t k) {
    return meanfield_deviation(sizes[k % 4], ratios[k / 4]);
  });
  std::vector<CheckResult> out;
  for (int r = 0; r < 2; ++r) {
    bool mono = true;
    std::string detail = "deviations";
    for (int i = 0; i < 4; ++i) {
      detail += " N=" + std::to_string(sizes[i]) + ":" + fmt(dev[4 * r + i]);
      if (i > 0 && !(dev[4 * r + i] < dev[4 * r + i - 1])) mono = false;
    }
    out.push_back({"meanfield_convergence_omega_" + fmt(ratios[r]), mono, detail});
  }
  return out;
}

CheckResult lindblad_emission() {
  const double gamma = kTwoPi * 7.5e3;
  const oracle::HilbertSpace space(1);
  const double zero = 0.0;
  const auto spec = oracle::spin_model(space, std::span<const double>(&zero, 1), 0.0, {}, 0.0,
                                       {gamma, 0.0});
  const auto t = grid(50e-6, 50);
  const auto r = oracle::lindblad_exact_evolve(space, spec, space.product_density(0.0, 0.0), t);
  double dev = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    dev = std::max(dev, std::abs(r.sz[i][0] - (-1.0 + 2.0 * std::exp(-gamma * t[i]))));
  }
  return bound("lindblad_emission_decay", dev, 1e-8);
}

CheckResult lindblad_dephasing() {
  const double gamma_el = kTwoPi * 40e3;
  const oracle::HilbertSpace space(1);
  const double zero = 0.0;
  const auto spec = oracle::spin_model(space, std::span<const double>(&zero, 1), 0.0, {}, 0.0,
                                       {0.0, gamma_el});
  const auto t = grid(10e-6, 50);
  const auto r =
      oracle::lindblad_exact_evolve(space, spec, space.product_density(0.5 * kPi, 0.3), t);
  double dev = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    dev = std::max(dev, std::abs(std::abs(r.sm[i][0]) - 0.5 * std::exp(-gamma_el * t[i])));
  }
  return bound("lindblad_dephasing_decay", dev, 1e-8);
}

// A single undriven-interaction site of the per-site model against the exact master equation
// with drive, detuning, emission and dephasing.
CheckResult single_site_decoherence() {
  ModelParams p = reference_params();
  p.N = 1.0;
  ensemble::Model m = ensemble::make_model(p, ensemble::uniform_sites(1, p.g, 1.0));
  m.interactions = false;
  m.drive = cd(kTwoPi * 0.8e6, -kTwoPi * 0.3e6);
  m.delta = kTwoPi * 0.2e6;
  const double t_final = 20e-6;
  const int steps = 400;
  const Trajectory mf = ensemble::integrate_quench(m, ensemble::ground_state(1), t_final,
                                                   t_final / steps, {1e-11, 1e-13});

  const oracle::HilbertSpace space(1);
  const double zero = 0.0;
  const cd drive = m.drive;
  const auto spec = oracle::spin_model(space, std::span<const double>(&zero, 1), 0.0,
                                       std::span<const cd>(&drive, 1), m.delta,
                                       {m.gamma, m.gamma_el});
  const auto t = grid(t_final, steps);
  const auto ex = oracle::lindblad_exact_evolve(space, spec, space.product_density(kPi, 0.0), t,
                                                {1e-11, 1e-13});
  double dev = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const cd sm = ex.sm[i][0];
    dev = std::max({dev, std::abs(mf.z[i] - ex.sz[i][0]), std::abs(mf.x[i] - 2.0 * sm.real()),
                    std::abs(mf.y[i] + 2.0 * sm.imag())});
  }
  return bound("single_site_decoherence_vs_master_equation", dev, 1e-6);
}

struct CavityRun {
  std::vector<double> mean_field, eliminated, explicit_cavity;
};

// Four spins coupled to a lossy cavity mode far detuned from the spins, over one interaction
// period: the adiabatic per-site model, the exact spin-only model with the eliminated cavity,
// and the exact spin-cavity master equation.
CavityRun cavity_run(double ratio, bool with_mean_field) {
  const int n = 4;
  ModelParams p = reference_params();
  p.g = kTwoPi * 2e6;
  p.Delta = kTwoPi * 50e6;
  p.kappa = kTwoPi * 153e3;
  p.gamma = 0.0;
  p.gamma_el = 0.0;
  p.N = n;
  ensemble::Model m = ensemble::make_model(p, ensemble::uniform_sites(n, p.g, n));
  const double chiN = m.chiN();
  m.drive = cd(ratio * chiN, 0.0);
  m.delta = 0.0;
  const double period = kTwoPi / std::abs(chiN);
  const int steps = 100;
  const auto t = grid(period, steps);
  CavityRun out;
  if (with_mean_field) {
    out.mean_field = ensemble::integrate_quench(m, ensemble::ground_state(n), period,
                                                period / steps, {1e-10, 1e-12})
                         .z;
  }
  const std::vector<double> coupling(n, p.g);
  const std::vector<cd> drive(n, m.drive);
  auto mean_z = [&](const oracle::LindbladResult& r) {
    std::vector<double> z;
    for (const auto& row : r.sz) {
      double acc = 0.0;
      for (double s : row) acc += s;
      z.push_back(acc / n);
    }
    return z;
  };
  const oracle::HilbertSpace spins(n);
  out.eliminated = mean_z(oracle::lindblad_exact_evolve(
      spins, oracle::spin_model(spins, coupling, m.chi_scale, drive, 0.0, {}),
      spins.product_density(kPi, 0.0), t, {1e-10, 1e-12}));
  const oracle::HilbertSpace cavity(n, 6);
  out.explicit_cavity = mean_z(oracle::lindblad_exact_evolve(
      cavity, oracle::spin_cavity_model(cavity, coupling, p.Delta, p.kappa, drive, 0.0, {}),
      cavity.product_density(kPi, 0.0), t, {1e-9, 1e-11}));
  return out;
}

double max_gap(const std::vector<double>& a, const std::vector<double>& b) {
  double dev = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) dev = std::max(dev, std::abs(a[i] - b[i]));
  return dev;
}

std::vector<CheckResult> cavity_elimination(unsigned threads) {
  const double ratios[] = {0.1, 0.3};
  const auto runs = parallel_map<CavityRun>(2, threads, [&](std::size_t k) {
    return cavity_run(ratios[k], k == 0);
  });
  return {bound("adiabatic_ensemble_vs_four_spin_cavity", max_gap(runs[0].mean_field,
                                                                   runs[0].explicit_cavity),
                0.02),
          bound("eliminated_cavity_vs_four_spin_cavity",
                max_gap(runs[1].eliminated, runs[1].explicit_cavity), 0.02)};
}

// The uniform per-site model reproduces the collective model with the ordering term.
CheckResult uniform_ensemble_reduction() {
  const int n = 20;
  ModelParams p = reference_params();
  p.N = n;
  p.gamma = 0.0;
  p.gamma_el = 0.0;
  ensemble::Model m = ensemble::make_model(p, ensemble::uniform_sites(n, p.g, n));
  m.drive = cd(0.3 * m.chiN(), 0.0);
  m.delta = 0.0;
  collective::Params c;
  c.chiN = m.chiN();
  c.omega = m.drive.real();
  c.n_atoms = n;
  c.ordering_correction = true;
  const double t_final = 3.0 * kTwoPi / std::abs(c.chiN);
  const double dt = t_final / 300;
  const Tolerance tol{1e-12, 1e-14};
  const Trajectory a = ensemble::integrate_quench(m, ensemble::ground_state(n), t_final, dt, tol);
  const Trajectory b = collective::integrate_quench(c, collective::south_pole(), t_final, dt, tol);
  double dev = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dev = std::max({dev, std::abs(a.x[i] - b.x[i]), std::abs(a.y[i] - b.y[i]),
                    std::abs(a.z[i] - b.z[i])});
  }
  return bound("uniform_ensemble_equals_collective", dev, 1e-8);
}

CheckResult basin_limits() {
  const double N = 1000.0;
  const double chi = kChiN / N;
  const bool south = oracle::basin_boundary_exact(N, chi, 0.4 * kChiN, kPi, 0.0) ==
                     Phase::Ferromagnetic;
  bool strong = true;
  for (int i = 0; i <= 8; ++i) {
    for (int j = 0; j < 8; ++j) {
      strong = strong && oracle::basin_boundary_exact(N, chi, 2.0 * kChiN, kPi * i / 8,
                                                      kTwoPi * j / 8) == Phase::Paramagnetic;
    }
  }
  // Equator at azimuth pi/2 relative to the drive: e0 = chi (N/2)^2, the shell is saturated.
  const bool saturated = oracle::basin_boundary_exact(N, chi, 0.3 * kChiN, 0.5 * kPi, 0.5 * kPi) ==
                         Phase::Paramagnetic;
  return {"basin_boundary_limits", south && strong && saturated,
          std::string("south pole ferromagnetic: ") + (south ? "yes" : "no") +
              ", strong drive paramagnetic: " + (strong ? "yes" : "no") +
              ", saturated shell paramagnetic: " + (saturated ? "yes" : "no")};
}

}  // namespace

std::vector<CheckResult> run_oracle_checks(unsigned threads) {
  std::vector<CheckResult> out;
  out.push_back(dicke_rabi());
  out.push_back(dicke_undriven());
  out.push_back(dicke_energy());
  for (auto& c : meanfield_convergence(threads)) out.push_back(std::move(c));
  out.push_back(lindblad_emission());
  out.push_back(lindblad_dephasing());
  out.push_back(single_site_decoherence());
  for (auto& c : cavity_elimination(threads)) out.push_back(std::move(c));
  out.push_back(uniform_ensemble_reduction());
  out.push_back(basin_limits());
  return out;
}

bool report_checks(std::ostream& os, const std::vector<CheckResult>& checks) {
  bool all = true;
  for (const auto& c : checks) {
    os << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
    all = all && c.passed;
  }
  return all;
}

}  // namespace cavityxy::cli

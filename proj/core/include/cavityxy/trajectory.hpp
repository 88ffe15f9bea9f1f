#pragma once

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace cavityxy {

enum class Phase { Ferromagnetic, Paramagnetic };

std::string_view to_string(Phase p);

// Time series of the normalized collective Bloch vector (components divided by N/2).
// Energy is divided by |chi| (N/2)^2.
struct Trajectory {
  std::vector<double> t;
  std::vector<double> x, y, z;
  std::vector<double> energy;
  // Only filled by the per-site models.
  std::vector<double> beta_re, beta_im;
  // Pointwise shot-to-shot standard deviation of z; empty for single runs. Not written to CSV.
  std::vector<double> z_spread;
  std::size_t n_sim = 0;
  double n_phys = 0.0;

  std::size_t size() const { return t.size(); }
  bool has_cavity_columns() const { return n_sim > 0; }
  void reserve(std::size_t n);
  void push(double time, double xn, double yn, double zn, double e);
  void push(double time, double xn, double yn, double zn, double e, std::complex<double> beta);
};

// One piece of a piecewise-constant drive protocol. The drive is the complex field
// F = Omega - i Omega' in rad/s; the longitudinal field delta in rad/s.
struct Segment {
  double duration = 0.0;
  std::complex<double> drive{0.0, 0.0};
  double delta = 0.0;
  bool record = true;
};

// Uniform output grid 0, dt, 2 dt, ... up to and including t_final (within rounding).
std::vector<double> output_grid(double t_final, double dt_out);

// Shortest decimal representation that round-trips to the same double.
std::string format_double(double v);

void write_trajectory_csv(std::ostream& os, const Trajectory& tr);

}  // namespace cavityxy

#pragma once

#include <array>
#include <span>
#include <stdexcept>
#include <vector>

#include "cavityxy/integrator.hpp"
#include "cavityxy/trajectory.hpp"

namespace cavityxy {

class UnsupportedRegime : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

namespace collective {

// Bloch vector divided by N/2.
struct BlochState {
  double x = 0.0;
  double y = 0.0;
  double z = -1.0;
  double t = 0.0;

  double length_squared() const { return x * x + y * y + z * z; }
};

inline BlochState south_pole() { return {}; }
// Spherical angles measured from +z, azimuth from +x.
BlochState from_angles(double theta, double phi);

struct Params {
  double chiN = 0.0;         // chi * N, rad/s
  double omega = 0.0;        // rad/s
  double omega_prime = 0.0;  // rad/s
  double delta = 0.0;        // rad/s
  double n_atoms = 1.0;
  // Adds the O(1/N) term from operator ordering of J+J-, evaluated on product states.
  bool ordering_correction = false;
};

std::array<double, 3> bloch_rhs(const BlochState& s, const Params& p);

// chi (X^2 + Y^2) + Omega X + Omega' Y - delta Z in rad/s, with X, Y, Z in absolute units.
double collective_energy(const BlochState& s, const Params& p);
// The same energy divided by |chi| (N/2)^2; divided by N/2 instead when chi = 0.
double normalized_energy(const BlochState& s, const Params& p);

Trajectory integrate_quench(const Params& p, const BlochState& initial, double t_final,
                            double dt_out, const Tolerance& tol = {});

// Runs a piecewise protocol. The drive and detuning of `base` are replaced segment by segment.
Trajectory run_segments(const Params& base, const BlochState& initial,
                        std::span<const Segment> segments, double dt_out,
                        const Tolerance& tol = {}, BlochState* final_state = nullptr);

// Evolves for `duration` without sampling.
BlochState evolve(const Params& p, const BlochState& initial, double duration,
                  const Tolerance& tol = {});

struct SeparatrixResult {
  Phase phase = Phase::Ferromagnetic;
  bool near_separatrix = false;
  // Distance from the boundary in units of |chi N|; positive inside the paramagnetic region.
  double margin = 0.0;
};

// Energy-shell classification for zero longitudinal field and no decoherence. A drive with
// nonzero quadrature is handled by rotating it onto x.
SeparatrixResult separatrix_classify(const BlochState& initial, const Params& p);

// Integrates for `periods` interaction periods 2 pi/|chi N| and reports whether z ever
// crosses the equator.
Phase classify_by_trajectory(const BlochState& initial, const Params& p, double periods = 20.0,
                             const Tolerance& tol = {});

// Integration system for run_protocol.
class System {
 public:
  explicit System(const Params& p) : p_(p) {}
  void set_segment(const Segment& s);
  void operator()(double t, std::span<const double> u, std::span<double> du) const;
  void observe(double t, const std::vector<double>& u, Trajectory& out) const;
  const Params& params() const { return p_; }

 private:
  Params p_;
};

}  // namespace collective
}  // namespace cavityxy

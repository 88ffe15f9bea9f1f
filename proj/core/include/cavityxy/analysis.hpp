#pragma once

#include <functional>
#include <span>
#include <stdexcept>
#include <string_view>
#include <utility>
#include <vector>

#include "cavityxy/trajectory.hpp"

namespace cavityxy::analysis {

class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Estimator {
  enum class Kind { Snapshot, Window };
  Kind kind = Kind::Window;
  double t0 = 0.0;  // snapshot time, or window start
  double t1 = 0.0;  // window end

  static Estimator snapshot(double t) { return {Kind::Snapshot, t, t}; }
  static Estimator window(double t0, double t1) { return {Kind::Window, t0, t1}; }
};

struct OrderParameter {
  double jz_bar = 0.0;
  Estimator estimator;
};

// SNAPSHOT interpolates z linearly at t0; WINDOW is the trapezoidal mean over [t0, t1].
OrderParameter order_parameter(const Trajectory& tr, const Estimator& est);
// Same, on raw arrays.
double order_parameter(std::span<const double> t, std::span<const double> z, const Estimator& est);

inline constexpr double kDefaultThreshold = 0.1;

Phase classify_phase(double jz_bar, double threshold = kDefaultThreshold);
inline Phase classify_phase(const OrderParameter& o, double threshold = kDefaultThreshold) {
  return classify_phase(o.jz_bar, threshold);
}

// Central differences inside, one-sided at the ends.
std::vector<double> gradient(std::span<const double> x, std::span<const double> y);

struct SweepResult {
  std::vector<double> control;    // swept value (ratio to chi N)
  double control_2 = 0.0;         // the fixed second control
  std::vector<double> jz_bar;
  std::vector<double> spread;     // shot-to-shot standard deviation, empty for single runs
  std::vector<Phase> labels;
  std::vector<double> gradient;
  double threshold = kDefaultThreshold;

  std::size_t size() const { return control.size(); }
};

// Fills labels and gradient from control and jz_bar.
void finalize(SweepResult& s, double threshold = kDefaultThreshold);

enum class CriticalMethod { Jump, MaxGradient };
std::string_view to_string(CriticalMethod m);

struct CriticalPoint {
  double value = 0.0;
  CriticalMethod method = CriticalMethod::MaxGradient;
  double uncertainty = 0.0;
  // |gradient| at the point (MaxGradient) or |step| (Jump).
  double strength = 0.0;
};

CriticalPoint critical_point(std::span<const double> control, std::span<const double> values,
                             CriticalMethod method = CriticalMethod::MaxGradient);
CriticalPoint critical_drive(const SweepResult& s,
                             CriticalMethod method = CriticalMethod::MaxGradient);

struct DetuningCritical {
  CriticalPoint negative;
  CriticalPoint positive;
  // The side whose transition is steeper.
  const CriticalPoint& sharper() const {
    return negative.strength > positive.strength ? negative : positive;
  }
};

// Max-gradient location on each side of zero detuning.
DetuningCritical critical_detuning(const SweepResult& s);

struct PeriodFit {
  double period = 0.0;
  double amplitude = 0.0;
  double phase = 0.0;
  double offset = 0.0;
  double slope = 0.0;
  double residual_rms = 0.0;
  bool oscillating = true;
};

// Least squares z(t) = a sin(2 pi t / T + phase) + offset + slope t. A periodogram of the
// detrended data seeds T, which is then refined jointly with the linear parameters. Data that
// are exactly linear give amplitude 0 and oscillating = false.
PeriodFit fit_period(std::span<const double> t, std::span<const double> z);
PeriodFit fit_period(const Trajectory& tr);

using PointRunner = std::function<Trajectory(double control)>;

// Evaluates every grid point (in parallel), reduces each trajectory with `est`.
SweepResult sweep(std::span<const double> grid, const PointRunner& run, const Estimator& est,
                  double threshold = kDefaultThreshold, unsigned threads = 1,
                  double control_2 = 0.0);

// Inclusive grid start, start + step, ... up to stop (within rounding).
std::vector<double> linear_grid(double start, double stop, double step);

struct PhaseDiagram {
  std::vector<double> delta;  // columns
  std::vector<double> omega;  // rows
  std::vector<std::vector<double>> jz_bar;  // [row][column]
  std::vector<std::vector<Phase>> labels;
  std::vector<std::vector<double>> gradient;  // d jz_bar / d delta along each row
  // (delta, omega) points: first-order jumps and the smooth max-gradient ridge.
  std::vector<std::pair<double, double>> jump_line;
  std::vector<std::pair<double, double>> ridge;
  double jump_threshold = 0.3;

  SweepResult row(std::size_t i) const;
};

using GridRunner = std::function<Trajectory(double omega_ratio, double delta_ratio)>;

PhaseDiagram phase_diagram(std::span<const double> delta_grid, std::span<const double> omega_grid,
                           const GridRunner& run, const Estimator& est,
                           double threshold = kDefaultThreshold, unsigned threads = 1,
                           double jump_threshold = 0.3);

struct BasinMap {
  std::vector<double> r;
  std::vector<double> dphi;
  std::vector<std::vector<Phase>> simulated;  // [r index][dphi index]
  std::vector<std::vector<Phase>> analytic;   // empty when no analytic reference
  std::vector<std::vector<double>> jz_bar;    // empty when classification is not order-based

  double ferromagnetic_fraction() const;
  double analytic_ferromagnetic_fraction() const;
};

// Area fraction of ferromagnetic cells on a polar grid, weighting each cell by its radius.
double ferromagnetic_fraction(std::span<const double> r,
                              const std::vector<std::vector<Phase>>& labels);

struct BasinCell {
  Phase phase = Phase::Ferromagnetic;
  double jz_bar = 0.0;
};

using BasinRunner = std::function<BasinCell(double r, double dphi)>;
using BasinReference = std::function<Phase(double r, double dphi)>;

BasinMap basin_map(std::span<const double> r, std::span<const double> dphi, const BasinRunner& run,
                   const BasinReference& analytic = {}, unsigned threads = 1);

// Cells whose simulated label differs from the analytic one and that are not within `band`
// cells (Chebyshev distance, periodic in dphi) of an analytic boundary.
std::size_t basin_mismatches_away_from_boundary(const BasinMap& m, int band = 1);

}  // namespace cavityxy::analysis

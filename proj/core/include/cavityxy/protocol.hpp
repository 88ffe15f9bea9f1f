#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "cavityxy/integrator.hpp"
#include "cavityxy/trajectory.hpp"

namespace cavityxy {

// Drives any model through a piecewise-constant protocol and samples it on a uniform grid.
//
// System requirements:
//   void set_segment(const Segment&);
//   void operator()(double t, std::span<const double> y, std::span<double> dy);
//   void observe(double t, const std::vector<double>& y, Trajectory& out);
//
// Leading segments with record = false form an unrecorded preparation stage. The time
// axis starts at the first recorded segment; every later segment must be recorded.
template <class System>
Trajectory run_protocol(System& sys, std::vector<double>& y, std::span<const Segment> segments,
                        double dt_out, const Tolerance& tol) {
  if (!(dt_out > 0.0)) throw std::invalid_argument("dt_out must be > 0");
  std::size_t i = 0;
  double prep = 0.0;
  for (; i < segments.size() && !segments[i].record; ++i) prep += segments[i].duration;
  double recorded = 0.0;
  for (std::size_t k = i; k < segments.size(); ++k) {
    if (!segments[k].record) {
      throw std::invalid_argument("unrecorded segments must precede recorded ones");
    }
    if (!(segments[k].duration >= 0.0)) throw std::invalid_argument("negative segment duration");
    recorded += segments[k].duration;
  }
  if (i == segments.size() || !(recorded > 0.0)) {
    throw std::invalid_argument("protocol has no recorded time");
  }

  auto rhs = [&sys](double t, std::span<const double> u, std::span<double> du) {
    sys(t, u, du);
  };
  DormandPrince dp(y.size(), tol);
  double t = -prep;
  for (std::size_t k = 0; k < i; ++k) {
    if (segments[k].duration <= 0.0) continue;
    sys.set_segment(segments[k]);
    dp.reset();
    dp.advance(rhs, t, y, t + segments[k].duration);
  }
  t = 0.0;

  const std::vector<double> grid = output_grid(recorded, dt_out);
  Trajectory out;
  out.reserve(grid.size());
  sys.set_segment(segments[i]);
  sys.observe(0.0, y, out);

  const double eps = 1e-9 * dt_out;
  std::size_t gi = 1;
  double seg_start = 0.0;
  for (std::size_t k = i; k < segments.size(); ++k) {
    const double seg_end = k + 1 == segments.size() ? recorded : seg_start + segments[k].duration;
    if (segments[k].duration <= 0.0) continue;
    sys.set_segment(segments[k]);
    dp.reset();
    while (gi < grid.size() && grid[gi] <= seg_end + eps) {
      const double target = std::min(grid[gi], seg_end);
      dp.advance(rhs, t, y, target);
      sys.observe(grid[gi], y, out);
      ++gi;
    }
    if (t < seg_end) dp.advance(rhs, t, y, seg_end);
    seg_start = seg_end;
  }
  return out;
}

}  // namespace cavityxy

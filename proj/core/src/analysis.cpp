#include "cavityxy/analysis.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "cavityxy/parallel.hpp"
#include "cavityxy/params.hpp"

namespace cavityxy::analysis {

double order_parameter(std::span<const double> t, std::span<const double> z, const Estimator& est) {
  if (t.empty() || t.size() != z.size()) throw std::out_of_range("order_parameter: empty trajectory");
  const double lo = t.front();
  const double hi = t.back();
  const double slack = 1e-9 * std::max(std::abs(hi - lo), std::abs(hi));
  auto interp = [&](double s) {
    if (s <= t.front()) return z.front();
    if (s >= t.back()) return z.back();
    const auto it = std::upper_bound(t.begin(), t.end(), s);
    const std::size_t i = static_cast<std::size_t>(it - t.begin());
    const double w = (s - t[i - 1]) / (t[i] - t[i - 1]);
    return (1.0 - w) * z[i - 1] + w * z[i];
  };
  if (est.kind == Estimator::Kind::Snapshot) {
    if (est.t0 < lo - slack || est.t0 > hi + slack) {
      throw std::out_of_range("order_parameter: snapshot time outside trajectory");
    }
    return interp(est.t0);
  }
  if (!(est.t1 > est.t0)) throw std::out_of_range("order_parameter: empty window");
  if (est.t0 < lo - slack || est.t1 > hi + slack) {
    throw std::out_of_range("order_parameter: window outside trajectory");
  }
  const double a = std::max(est.t0, lo);
  const double b = std::min(est.t1, hi);
  // Trapezoid over the samples inside [a, b] plus interpolated end points.
  double acc = 0.0;
  double prev_t = a;
  double prev_z = interp(a);
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] <= a) continue;
    if (t[i] >= b) break;
    acc += 0.5 * (prev_z + z[i]) * (t[i] - prev_t);
    prev_t = t[i];
    prev_z = z[i];
  }
  acc += 0.5 * (prev_z + interp(b)) * (b - prev_t);
  return acc / (b - a);
}

OrderParameter order_parameter(const Trajectory& tr, const Estimator& est) {
  return {order_parameter(tr.t, tr.z, est), est};
}

Phase classify_phase(double jz_bar, double threshold) {
  return jz_bar < -threshold ? Phase::Ferromagnetic : Phase::Paramagnetic;
}

std::vector<double> gradient(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (n != y.size()) throw std::invalid_argument("gradient: size mismatch");
  std::vector<double> g(n, 0.0);
  if (n < 2) return g;
  g[0] = (y[1] - y[0]) / (x[1] - x[0]);
  g[n - 1] = (y[n - 1] - y[n - 2]) / (x[n - 1] - x[n - 2]);
  for (std::size_t i = 1; i + 1 < n; ++i) g[i] = (y[i + 1] - y[i - 1]) / (x[i + 1] - x[i - 1]);
  return g;
}

void finalize(SweepResult& s, double threshold) {
  s.threshold = threshold;
  s.labels.clear();
  for (double v : s.jz_bar) s.labels.push_back(classify_phase(v, threshold));
  s.gradient = gradient(s.control, s.jz_bar);
}

std::string_view to_string(CriticalMethod m) {
  return m == CriticalMethod::Jump ? "JUMP" : "MAX_GRADIENT";
}

CriticalPoint critical_point(std::span<const double> control, std::span<const double> values,
                             CriticalMethod method) {
  const std::size_t n = control.size();
  if (n < 3) throw std::out_of_range("critical point: need at least 3 grid points");
  if (values.size() != n) throw std::invalid_argument("critical point: size mismatch");
  for (std::size_t i = 1; i < n; ++i) {
    if (!(control[i] > control[i - 1])) {
      throw std::invalid_argument("critical point: grid must be strictly increasing");
    }
  }
  CriticalPoint cp;
  cp.method = method;
  cp.uncertainty = 0.5 * (control[n - 1] - control[0]) / static_cast<double>(n - 1);
  if (method == CriticalMethod::MaxGradient) {
    const auto g = gradient(control, values);
    std::size_t best = 0;
    for (std::size_t i = 1; i < n; ++i)
      if (std::abs(g[i]) > std::abs(g[best])) best = i;
    cp.value = control[best];
    cp.strength = std::abs(g[best]);
  } else {
    std::size_t best = 0;
    for (std::size_t i = 1; i + 1 < n; ++i)
      if (std::abs(values[i + 1] - values[i]) > std::abs(values[best + 1] - values[best])) best = i;
    cp.value = 0.5 * (control[best] + control[best + 1]);
    cp.strength = std::abs(values[best + 1] - values[best]);
  }
  return cp;
}

CriticalPoint critical_drive(const SweepResult& s, CriticalMethod method) {
  return critical_point(s.control, s.jz_bar, method);
}

DetuningCritical critical_detuning(const SweepResult& s) {
  const std::size_t n = s.size();
  if (n < 3) throw std::out_of_range("critical_detuning: need at least 3 grid points");
  if (!(s.control.front() < 0.0 && s.control.back() > 0.0)) {
    throw std::invalid_argument("critical_detuning: sweep must span both signs of detuning");
  }
  const auto g = gradient(s.control, s.jz_bar);
  const double half_step = 0.5 * (s.control.back() - s.control.front()) / static_cast<double>(n - 1);
  DetuningCritical out;
  std::size_t neg = n, pos = n;
  for (std::size_t i = 0; i < n; ++i) {
    if (s.control[i] < 0.0 && (neg == n || std::abs(g[i]) > std::abs(g[neg]))) neg = i;
    if (s.control[i] > 0.0 && (pos == n || std::abs(g[i]) > std::abs(g[pos]))) pos = i;
  }
  out.negative = {s.control[neg], CriticalMethod::MaxGradient, half_step, std::abs(g[neg])};
  out.positive = {s.control[pos], CriticalMethod::MaxGradient, half_step, std::abs(g[pos])};
  return out;
}

// --- period fitting -----------------------------------------------------------------------

namespace {

struct LinearFit {
  Eigen::VectorXd coef;
  double ss = 0.0;
};

LinearFit solve_ls(const Eigen::MatrixXd& A, const Eigen::VectorXd& y) {
  LinearFit f;
  f.coef = A.colPivHouseholderQr().solve(y);
  f.ss = (A * f.coef - y).squaredNorm();
  return f;
}

Eigen::MatrixXd sine_design(const Eigen::VectorXd& tau, double w) {
  Eigen::MatrixXd A(tau.size(), 4);
  for (Eigen::Index i = 0; i < tau.size(); ++i) {
    A(i, 0) = std::sin(w * tau(i));
    A(i, 1) = std::cos(w * tau(i));
    A(i, 2) = 1.0;
    A(i, 3) = tau(i);
  }
  return A;
}

}  // namespace

PeriodFit fit_period(std::span<const double> t, std::span<const double> z) {
  const std::size_t n = t.size();
  if (n != z.size()) throw std::invalid_argument("fit_period: size mismatch");
  if (n < 8) throw FitError("fit_period: need at least 8 samples");
  const double t_first = t.front();
  const double span = t.back() - t.front();
  if (!(span > 0.0)) throw FitError("fit_period: zero time span");

  Eigen::VectorXd tau(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    tau(i) = (t[i] - t_first) / span;
    y(i) = z[i];
  }
  Eigen::MatrixXd line(n, 2);
  line.col(0).setOnes();
  line.col(1) = tau;
  const LinearFit lf = solve_ls(line, y);
  const Eigen::VectorXd resid = y - line * lf.coef;
  const double scale = std::max(1.0, y.cwiseAbs().maxCoeff());
  const double rms = std::sqrt(resid.squaredNorm() / static_cast<double>(n));

  PeriodFit out;
  if (rms <= 1e-12 * scale) {
    out.oscillating = false;
    out.period = std::numeric_limits<double>::quiet_NaN();
    out.amplitude = 0.0;
    out.offset = lf.coef(0) - lf.coef(1) * t_first / span;
    out.slope = lf.coef(1) / span;
    out.residual_rms = rms;
    return out;
  }

  // Zero-padded periodogram over angular frequencies in units of 1/span.
  constexpr int kPad = 8;
  const int n_freq = static_cast<int>(n / 2) * kPad;
  std::vector<double> power(n_freq);
  for (int k = 1; k <= n_freq; ++k) {
    const double w = kTwoPi * k / kPad;
    double re = 0.0, im = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      re += resid(i) * std::cos(w * tau(i));
      im += resid(i) * std::sin(w * tau(i));
    }
    power[k - 1] = re * re + im * im;
  }
  const int peak = static_cast<int>(std::max_element(power.begin(), power.end()) - power.begin());
  std::vector<double> sorted = power;
  std::nth_element(sorted.begin(), sorted.begin() + n_freq / 2, sorted.end());
  const double median = sorted[n_freq / 2];
  if (!(power[peak] > 25.0 * median)) throw FitError("fit_period: no spectral peak above noise");

  // Golden-section search on the residual with the linear parameters projected out.
  const double w_peak = kTwoPi * (peak + 1) / kPad;
  const double dw = 1.5 * kTwoPi / kPad;
  auto cost = [&](double w) { return solve_ls(sine_design(tau, w), y).ss; };
  double a = std::max(1e-6, w_peak - dw), b = w_peak + dw;
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - gr * (b - a), d = a + gr * (b - a);
  double fc = cost(c), fd = cost(d);
  for (int it = 0; it < 80 && (b - a) > 1e-10 * w_peak; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = cost(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = cost(d);
    }
  }
  double w = 0.5 * (a + b);

  // Gauss-Newton on (A, B, offset, slope, w).
  LinearFit lin = solve_ls(sine_design(tau, w), y);
  Eigen::VectorXd p(5);
  p << lin.coef(0), lin.coef(1), lin.coef(2), lin.coef(3), w;
  auto residual = [&](const Eigen::VectorXd& q) {
    Eigen::VectorXd r(n);
    for (std::size_t i = 0; i < n; ++i) {
      r(i) = q(0) * std::sin(q(4) * tau(i)) + q(1) * std::cos(q(4) * tau(i)) + q(2) +
             q(3) * tau(i) - y(i);
    }
    return r;
  };
  Eigen::VectorXd r = residual(p);
  double ss = r.squaredNorm();
  for (int it = 0; it < 100; ++it) {
    Eigen::MatrixXd J(n, 5);
    for (std::size_t i = 0; i < n; ++i) {
      const double s = std::sin(p(4) * tau(i));
      const double co = std::cos(p(4) * tau(i));
      J(i, 0) = s;
      J(i, 1) = co;
      J(i, 2) = 1.0;
      J(i, 3) = tau(i);
      J(i, 4) = tau(i) * (p(0) * co - p(1) * s);
    }
    const Eigen::VectorXd step = J.colPivHouseholderQr().solve(-r);
    double lambda = 1.0;
    bool improved = false;
    for (int k = 0; k < 30; ++k) {
      const Eigen::VectorXd trial = p + lambda * step;
      const Eigen::VectorXd rt = residual(trial);
      const double st = rt.squaredNorm();
      if (st <= ss) {
        p = trial;
        r = rt;
        improved = st < ss;
        ss = st;
        break;
      }
      lambda *= 0.5;
    }
    if (!improved || std::abs(lambda * step(4)) <= 1e-15 * std::abs(p(4))) break;
  }

  w = p(4);
  const double w_t = w / span;
  out.period = kTwoPi / w_t;
  out.amplitude = std::hypot(p(0), p(1));
  out.phase = std::remainder(std::atan2(p(1), p(0)) - w_t * t_first, kTwoPi);
  out.offset = p(2) - p(3) * t_first / span;
  out.slope = p(3) / span;
  out.residual_rms = std::sqrt(ss / static_cast<double>(n));
  if (span < 1.5 * out.period) throw FitError("fit_period: fewer than two oscillation periods");
  return out;
}

PeriodFit fit_period(const Trajectory& tr) { return fit_period(tr.t, tr.z); }

// --- sweeps -------------------------------------------------------------------------------

std::vector<double> linear_grid(double start, double stop, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("linear_grid: step must be > 0");
  if (stop < start) throw std::invalid_argument("linear_grid: stop before start");
  const auto n = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9));
  std::vector<double> g(n + 1);
  for (std::size_t i = 0; i <= n; ++i) g[i] = start + static_cast<double>(i) * step;
  return g;
}

namespace {
double reduce_spread(const Trajectory& tr, const Estimator& est) {
  if (tr.z_spread.empty()) return 0.0;
  return order_parameter(tr.t, tr.z_spread, est);
}
}  // namespace

SweepResult sweep(std::span<const double> grid, const PointRunner& run, const Estimator& est,
                  double threshold, unsigned threads, double control_2) {
  struct Cell {
    double jz = 0.0, spread = 0.0;
    bool has_spread = false;
  };
  const auto cells = parallel_map<Cell>(grid.size(), threads, [&](std::size_t i) {
    const Trajectory tr = run(grid[i]);
    return Cell{order_parameter(tr, est).jz_bar, reduce_spread(tr, est), !tr.z_spread.empty()};
  });
  SweepResult s;
  s.control.assign(grid.begin(), grid.end());
  s.control_2 = control_2;
  for (const auto& c : cells) s.jz_bar.push_back(c.jz);
  if (!cells.empty() && cells.front().has_spread) {
    for (const auto& c : cells) s.spread.push_back(c.spread);
  }
  finalize(s, threshold);
  return s;
}

SweepResult PhaseDiagram::row(std::size_t i) const {
  SweepResult s;
  s.control = delta;
  s.control_2 = omega.at(i);
  s.jz_bar = jz_bar.at(i);
  s.labels = labels.at(i);
  s.gradient = gradient.at(i);
  return s;
}

PhaseDiagram phase_diagram(std::span<const double> delta_grid, std::span<const double> omega_grid,
                           const GridRunner& run, const Estimator& est, double threshold,
                           unsigned threads, double jump_threshold) {
  if (delta_grid.size() < 3 || omega_grid.empty()) {
    throw std::invalid_argument("phase_diagram: degenerate grid");
  }
  const std::size_t nd = delta_grid.size();
  const std::size_t no = omega_grid.size();
  const auto values = parallel_map<double>(nd * no, threads, [&](std::size_t k) {
    const std::size_t i = k / nd, j = k % nd;
    return order_parameter(run(omega_grid[i], delta_grid[j]), est).jz_bar;
  });
  PhaseDiagram pd;
  pd.jump_threshold = jump_threshold;
  pd.delta.assign(delta_grid.begin(), delta_grid.end());
  pd.omega.assign(omega_grid.begin(), omega_grid.end());
  for (std::size_t i = 0; i < no; ++i) {
    std::vector<double> rowv(values.begin() + static_cast<std::ptrdiff_t>(i * nd),
                             values.begin() + static_cast<std::ptrdiff_t>((i + 1) * nd));
    std::vector<Phase> lab;
    for (double v : rowv) lab.push_back(classify_phase(v, threshold));
    pd.gradient.push_back(gradient(pd.delta, rowv));
    pd.jz_bar.push_back(std::move(rowv));
    pd.labels.push_back(std::move(lab));
  }
  // Along each row and on each side of zero detuning, the steepest point is a jump when the
  // grid step across it exceeds the threshold and a ridge point otherwise.
  for (std::size_t i = 0; i < no; ++i) {
    const auto& v = pd.jz_bar[i];
    const auto& g = pd.gradient[i];
    for (int side = 0; side < 2; ++side) {
      std::size_t best = nd;
      double biggest_step = 0.0;
      for (std::size_t j = 0; j < nd; ++j) {
        const bool on_side = side == 0 ? pd.delta[j] <= 0.0 : pd.delta[j] >= 0.0;
        if (!on_side) continue;
        if (best == nd || std::abs(g[j]) > std::abs(g[best])) best = j;
        if (j + 1 < nd) biggest_step = std::max(biggest_step, std::abs(v[j + 1] - v[j]));
      }
      if (best == nd || biggest_step < 0.05) continue;
      const double left = best > 0 ? std::abs(v[best] - v[best - 1]) : 0.0;
      const double right = best + 1 < nd ? std::abs(v[best + 1] - v[best]) : 0.0;
      if (std::max(left, right) > jump_threshold) {
        const std::size_t a = left >= right ? best - 1 : best;
        pd.jump_line.emplace_back(0.5 * (pd.delta[a] + pd.delta[a + 1]), pd.omega[i]);
      } else {
        pd.ridge.emplace_back(pd.delta[best], pd.omega[i]);
      }
    }
  }
  // Jumps between adjacent rows.
  for (std::size_t i = 0; i + 1 < no; ++i) {
    for (std::size_t j = 0; j < nd; ++j) {
      if (std::abs(pd.jz_bar[i + 1][j] - pd.jz_bar[i][j]) > jump_threshold) {
        pd.jump_line.emplace_back(pd.delta[j], 0.5 * (pd.omega[i] + pd.omega[i + 1]));
      }
    }
  }
  auto by_omega = [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second < b.second : a.first < b.first;
  };
  std::sort(pd.jump_line.begin(), pd.jump_line.end(), by_omega);
  pd.jump_line.erase(std::unique(pd.jump_line.begin(), pd.jump_line.end()), pd.jump_line.end());
  std::sort(pd.ridge.begin(), pd.ridge.end(), by_omega);
  return pd;
}

// --- basins -------------------------------------------------------------------------------

double ferromagnetic_fraction(std::span<const double> r,
                              const std::vector<std::vector<Phase>>& labels) {
  double total = 0.0, ferro = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    // Cell-centred radius weight of the polar area element.
    const double w = std::max(r[i], 1e-12);
    for (Phase p : labels[i]) {
      total += w;
      if (p == Phase::Ferromagnetic) ferro += w;
    }
  }
  return total > 0.0 ? ferro / total : 0.0;
}

double BasinMap::ferromagnetic_fraction() const {
  return analysis::ferromagnetic_fraction(r, simulated);
}

double BasinMap::analytic_ferromagnetic_fraction() const {
  return analysis::ferromagnetic_fraction(r, analytic);
}

BasinMap basin_map(std::span<const double> r, std::span<const double> dphi, const BasinRunner& run,
                   const BasinReference& analytic, unsigned threads) {
  const std::size_t nr = r.size(), np = dphi.size();
  const auto cells = parallel_map<BasinCell>(nr * np, threads, [&](std::size_t k) {
    return run(r[k / np], dphi[k % np]);
  });
  BasinMap m;
  m.r.assign(r.begin(), r.end());
  m.dphi.assign(dphi.begin(), dphi.end());
  m.simulated.assign(nr, std::vector<Phase>(np));
  m.jz_bar.assign(nr, std::vector<double>(np));
  for (std::size_t k = 0; k < nr * np; ++k) {
    m.simulated[k / np][k % np] = cells[k].phase;
    m.jz_bar[k / np][k % np] = cells[k].jz_bar;
  }
  if (analytic) {
    m.analytic.assign(nr, std::vector<Phase>(np));
    for (std::size_t i = 0; i < nr; ++i)
      for (std::size_t j = 0; j < np; ++j) m.analytic[i][j] = analytic(r[i], dphi[j]);
  }
  return m;
}

std::size_t basin_mismatches_away_from_boundary(const BasinMap& m, int band) {
  if (m.analytic.empty()) throw std::invalid_argument("basin map has no analytic reference");
  const int nr = static_cast<int>(m.r.size());
  const int np = static_cast<int>(m.dphi.size());
  std::size_t count = 0;
  for (int i = 0; i < nr; ++i) {
    for (int j = 0; j < np; ++j) {
      if (m.simulated[i][j] == m.analytic[i][j]) continue;
      bool near = false;
      for (int di = -band; di <= band && !near; ++di) {
        const int ii = i + di;
        if (ii < 0 || ii >= nr) continue;
        for (int dj = -band; dj <= band; ++dj) {
          const int jj = ((j + dj) % np + np) % np;
          if (m.analytic[ii][jj] != m.analytic[i][j]) {
            near = true;
            break;
          }
        }
      }
      if (!near) ++count;
    }
  }
  return count;
}

}  // namespace cavityxy::analysis

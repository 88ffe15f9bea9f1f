#include "cavityxy/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cavityxy/parallel.hpp"
#include "cavityxy/protocol.hpp"
#include "cavityxy/rng.hpp"

namespace cavityxy::ensemble {

SiteConfig sample_site_couplings(std::uint64_t seed, std::size_t n_sim, const ModelParams& p,
                                 const Lattice& lattice, std::uint64_t shot) {
  if (n_sim == 0) throw std::invalid_argument("sample_site_couplings: N_sim must be >= 1");
  if (lattice.sites < 1) throw std::invalid_argument("sample_site_couplings: empty lattice");
  const CounterRng site_rng(seed, mix64(streams::kSiteIndex ^ shot));
  const CounterRng radius_rng(seed, mix64(streams::kRadius ^ shot));
  const double rescale = std::sqrt(p.N / static_cast<double>(n_sim));
  SiteConfig s;
  s.g_peak = p.g;
  s.n_phys = p.N;
  s.site.resize(n_sim);
  s.radius.resize(n_sim);
  s.profile.resize(n_sim);
  s.coupling.resize(n_sim);
  for (std::size_t i = 0; i < n_sim; ++i) {
    const auto j = static_cast<std::int64_t>(
        site_rng.below(i, static_cast<std::uint64_t>(lattice.sites)));
    double r = 0.0;
    if (p.sigma_th > 0.0) {
      r = p.sigma_th * std::hypot(radius_rng.normal(2 * i), radius_rng.normal(2 * i + 1));
    }
    const double axial = lattice.commensurate ? 1.0 : coupling_profile(1.0, p.lambda_L, p.lambda_c, j);
    const double radial = p.waist > 0.0 ? std::exp(-(r / p.waist) * (r / p.waist)) : 1.0;
    s.site[i] = j;
    s.radius[i] = r;
    s.profile[i] = axial * radial;
    s.coupling[i] = p.g * s.profile[i] * rescale;
  }
  return s;
}

SiteConfig uniform_sites(std::size_t n_sim, double g, double n_phys) {
  if (n_sim == 0) throw std::invalid_argument("uniform_sites: N_sim must be >= 1");
  SiteConfig s;
  s.g_peak = g;
  s.n_phys = n_phys;
  s.site.assign(n_sim, 0);
  s.radius.assign(n_sim, 0.0);
  s.profile.assign(n_sim, 1.0);
  s.coupling.assign(n_sim, g * std::sqrt(n_phys / static_cast<double>(n_sim)));
  return s;
}

Model make_model(const ModelParams& p, SiteConfig sites, CavityMode mode) {
  if (p.Delta == 0.0) throw DomainError("make_model: Delta = 0 violates the dispersive limit");
  Model m;
  m.sites = std::move(sites);
  m.chi_scale = -p.Delta / (p.Delta * p.Delta + 0.25 * p.kappa * p.kappa);
  m.Delta = p.Delta;
  m.kappa = p.kappa;
  m.gamma = p.gamma;
  m.gamma_el = p.gamma_el;
  m.drive = drive_from_pump(p.g, p.omega_p, p.phi, p.Delta, p.delta, p.kappa).field();
  m.delta = p.delta;
  m.mode = mode;
  return m;
}

EnsembleState ground_state(std::size_t n_sim) {
  EnsembleState s;
  s.c.assign(n_sim, {0.0, 0.0});
  s.z.assign(n_sim, -1.0);
  return s;
}

EnsembleState product_state(std::size_t n_sim, double theta, double phi) {
  // x = 2 Re c, y = -2 Im c.
  const double st = std::sin(theta);
  const std::complex<double> c(0.5 * st * std::cos(phi), -0.5 * st * std::sin(phi));
  EnsembleState s;
  s.c.assign(n_sim, c);
  s.z.assign(n_sim, std::cos(theta));
  return s;
}

std::vector<double> pack(const EnsembleState& s) {
  const std::size_t n = s.size();
  std::vector<double> y(3 * n + 2);
  for (std::size_t k = 0; k < n; ++k) {
    y[k] = s.c[k].real();
    y[n + k] = s.c[k].imag();
    y[2 * n + k] = s.z[k];
  }
  y[3 * n] = s.beta.real();
  y[3 * n + 1] = s.beta.imag();
  return y;
}

EnsembleState unpack(std::span<const double> y, double t) {
  if (y.size() < 2 || (y.size() - 2) % 3 != 0) throw std::invalid_argument("unpack: bad length");
  const std::size_t n = (y.size() - 2) / 3;
  EnsembleState s;
  s.c.resize(n);
  s.z.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    s.c[k] = {y[k], y[n + k]};
    s.z[k] = y[2 * n + k];
  }
  s.beta = {y[3 * n], y[3 * n + 1]};
  s.t = t;
  return s;
}

namespace {

void rhs_flat(const Model& m, const double* y, double* dy, std::size_t n) {
  const double* cr = y;
  const double* ci = y + n;
  const double* z = y + 2 * n;
  const double br = y[3 * n];
  const double bi = y[3 * n + 1];
  double* dcr = dy;
  double* dci = dy + n;
  double* dz = dy + 2 * n;
  const double* G = m.sites.coupling.data();
  const double* P = m.sites.profile.data();

  double Sr = 0.0, Si = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    Sr += G[k] * cr[k];
    Si += G[k] * ci[k];
  }
  const bool adiabatic = m.mode == CavityMode::Adiabatic;
  const bool on = m.interactions;
  const double Fr = m.drive.real();
  const double Fi = m.drive.imag();
  const double decay = 0.5 * m.gamma + m.gamma_el;
  const double cs = m.chi_scale;

  for (std::size_t k = 0; k < n; ++k) {
    double ar = 0.0, ai = 0.0, self = 0.0;
    if (on) {
      if (adiabatic) {
        ar = cs * G[k] * (Sr - G[k] * cr[k]);
        ai = cs * G[k] * (Si - G[k] * ci[k]);
        self = cs * G[k] * G[k];
      } else {
        ar = G[k] * br;
        ai = G[k] * bi;
      }
    }
    const double w = m.delta - self;
    const double fr = Fr * P[k];
    const double fi = Fi * P[k];
    dcr[k] = -w * ci[k] - ai * z[k] - 0.5 * fi * z[k] - decay * cr[k];
    dci[k] = w * cr[k] + ar * z[k] + 0.5 * fr * z[k] - decay * ci[k];
    dz[k] = 4.0 * (cr[k] * ai - ci[k] * ar) - 2.0 * (fr * ci[k] - fi * cr[k]) -
            m.gamma * (z[k] + 1.0);
  }
  if (adiabatic) {
    dy[3 * n] = 0.0;
    dy[3 * n + 1] = 0.0;
  } else {
    // d beta = -(i (Delta - delta) + kappa/2) beta - i S
    const double d = m.Delta - m.delta;
    const double h = 0.5 * m.kappa;
    const double sr = on ? Sr : 0.0;
    const double si = on ? Si : 0.0;
    dy[3 * n] = d * bi - h * br + si;
    dy[3 * n + 1] = -d * br - h * bi - sr;
  }
}

double energy_flat(const Model& m, const double* y, std::size_t n) {
  const double* cr = y;
  const double* ci = y + n;
  const double* z = y + 2 * n;
  const double* G = m.sites.coupling.data();
  const double* P = m.sites.profile.data();
  double Sr = 0.0, Si = 0.0, self_pairs = 0.0, self_energy = 0.0, single = 0.0;
  const double Fr = m.drive.real();
  const double Fi = m.drive.imag();
  for (std::size_t k = 0; k < n; ++k) {
    Sr += G[k] * cr[k];
    Si += G[k] * ci[k];
    const double g2 = G[k] * G[k];
    self_pairs += g2 * (cr[k] * cr[k] + ci[k] * ci[k]);
    self_energy += g2 * 0.5 * (1.0 + z[k]);
    single += P[k] * (Fr * cr[k] + Fi * ci[k]) - 0.5 * m.delta * z[k];
  }
  double e = single;
  if (m.interactions) e += m.chi_scale * (Sr * Sr + Si * Si - self_pairs + self_energy);
  return e;
}

}  // namespace

EnsembleState site_rhs_adiabatic(const EnsembleState& s, const Model& m) {
  if (s.beta != 0.0) throw std::invalid_argument("site_rhs_adiabatic: beta must be 0");
  Model am = m;
  am.mode = CavityMode::Adiabatic;
  const auto y = pack(s);
  std::vector<double> dy(y.size());
  rhs_flat(am, y.data(), dy.data(), s.size());
  return unpack(dy, s.t);
}

EnsembleState site_rhs_full_cavity(const EnsembleState& s, const Model& m) {
  Model fm = m;
  fm.mode = CavityMode::Explicit;
  const auto y = pack(s);
  std::vector<double> dy(y.size());
  rhs_flat(fm, y.data(), dy.data(), s.size());
  return unpack(dy, s.t);
}

double ensemble_energy(const EnsembleState& s, const Model& m) {
  const auto y = pack(s);
  return energy_flat(m, y.data(), s.size());
}

namespace {
double normalize_energy(double e, const Model& m) {
  const double n_sim = static_cast<double>(m.sites.n_sim());
  const double half = 0.5 * m.sites.n_phys;
  const double scaled = e * m.sites.n_phys / n_sim;
  const double chi = std::abs(m.chi_peak());
  if (chi == 0.0) return scaled / half;
  return scaled / (chi * half * half);
}
}  // namespace

double normalized_energy(const EnsembleState& s, const Model& m) {
  return normalize_energy(ensemble_energy(s, m), m);
}

double max_purity(std::span<const double> y) {
  const std::size_t n = (y.size() - 2) / 3;
  double best = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double p = 4.0 * (y[k] * y[k] + y[n + k] * y[n + k]) + y[2 * n + k] * y[2 * n + k];
    best = std::max(best, p);
  }
  return best;
}

double max_purity(const EnsembleState& s) {
  double best = 0.0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    best = std::max(best, 4.0 * std::norm(s.c[k]) + s.z[k] * s.z[k]);
  }
  return best;
}

Collective collective_average(const EnsembleState& s) {
  Collective c;
  for (std::size_t k = 0; k < s.size(); ++k) {
    c.x += 2.0 * s.c[k].real();
    c.y += -2.0 * s.c[k].imag();
    c.z += s.z[k];
  }
  const double n = static_cast<double>(s.size());
  c.x /= n;
  c.y /= n;
  c.z /= n;
  return c;
}

System::System(Model m) : m_(std::move(m)) {}

void System::set_segment(const Segment& s) {
  m_.drive = s.drive;
  m_.delta = s.delta;
}

void System::operator()(double, std::span<const double> y, std::span<double> dy) const {
  rhs_flat(m_, y.data(), dy.data(), m_.sites.n_sim());
}

void System::observe(double t, const std::vector<double>& y, Trajectory& out) const {
  const std::size_t n = m_.sites.n_sim();
  double sx = 0.0, sy = 0.0, sz = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    sx += 2.0 * y[k];
    sy += -2.0 * y[n + k];
    sz += y[2 * n + k];
  }
  const double nn = static_cast<double>(n);
  std::complex<double> beta(y[3 * n], y[3 * n + 1]);
  beta *= std::sqrt(m_.sites.n_phys / nn);
  out.push(t, sx / nn, sy / nn, sz / nn, normalize_energy(energy_flat(m_, y.data(), n), m_),
           beta);
  out.n_sim = n;
  out.n_phys = m_.sites.n_phys;
}

Trajectory run_segments(const Model& m, const EnsembleState& initial,
                        std::span<const Segment> segments, double dt_out, const Tolerance& tol,
                        EnsembleState* final_state) {
  if (initial.size() != m.sites.n_sim()) {
    throw std::invalid_argument("run_segments: state and site configuration sizes differ");
  }
  System sys(m);
  std::vector<double> y = pack(initial);
  Trajectory tr = run_protocol(sys, y, segments, dt_out, tol);
  if (final_state) *final_state = unpack(y, tr.t.back());
  return tr;
}

Trajectory integrate_quench(const Model& m, const EnsembleState& initial, double t_final,
                            double dt_out, const Tolerance& tol) {
  const Segment seg{t_final, m.drive, m.delta, true};
  return run_segments(m, initial, std::span<const Segment>(&seg, 1), dt_out, tol);
}

double draw_atom_number(std::uint64_t seed, std::uint64_t shot, double n_nominal,
                        double fluctuation_rms) {
  if (fluctuation_rms < 0.0) throw std::invalid_argument("fluctuation_rms must be >= 0");
  if (fluctuation_rms == 0.0) return n_nominal;
  const CounterRng rng(seed, streams::kAtomNumber);
  const double xi = std::clamp(rng.normal(shot), -4.0, 4.0);
  return std::max(1.0, n_nominal * (1.0 + fluctuation_rms * xi));
}

ShotSummary run_shots(const ShotRunner& run, std::size_t n_shots, double fluctuation_rms,
                      double n_nominal, std::uint64_t seed, unsigned threads) {
  if (n_shots == 0) throw std::invalid_argument("run_shots: n_shots must be >= 1");
  std::vector<double> n_phys(n_shots);
  for (std::size_t s = 0; s < n_shots; ++s) {
    n_phys[s] = draw_atom_number(seed, s, n_nominal, fluctuation_rms);
  }
  const auto shots = parallel_map<Trajectory>(
      n_shots, threads, [&](std::size_t s) { return run(s, n_phys[s]); });

  const std::size_t len = shots.front().size();
  for (const auto& tr : shots) {
    if (tr.size() != len) throw std::runtime_error("run_shots: shots have different lengths");
  }
  const bool cav = !shots.front().beta_re.empty();
  ShotSummary out;
  out.n_phys = n_phys;
  Trajectory& mean = out.mean;
  mean.t = shots.front().t;
  mean.x.assign(len, 0.0);
  mean.y.assign(len, 0.0);
  mean.z.assign(len, 0.0);
  mean.energy.assign(len, 0.0);
  if (cav) {
    mean.beta_re.assign(len, 0.0);
    mean.beta_im.assign(len, 0.0);
  }
  const double inv = 1.0 / static_cast<double>(n_shots);
  for (const auto& tr : shots) {
    for (std::size_t i = 0; i < len; ++i) {
      mean.x[i] += tr.x[i] * inv;
      mean.y[i] += tr.y[i] * inv;
      mean.z[i] += tr.z[i] * inv;
      mean.energy[i] += tr.energy[i] * inv;
      if (cav) {
        mean.beta_re[i] += tr.beta_re[i] * inv;
        mean.beta_im[i] += tr.beta_im[i] * inv;
      }
    }
  }
  mean.n_sim = shots.front().n_sim;
  for (double n : n_phys) mean.n_phys += n * inv;

  out.x_std.assign(len, 0.0);
  out.y_std.assign(len, 0.0);
  out.z_std.assign(len, 0.0);
  for (const auto& tr : shots) {
    for (std::size_t i = 0; i < len; ++i) {
      out.x_std[i] += (tr.x[i] - mean.x[i]) * (tr.x[i] - mean.x[i]) * inv;
      out.y_std[i] += (tr.y[i] - mean.y[i]) * (tr.y[i] - mean.y[i]) * inv;
      out.z_std[i] += (tr.z[i] - mean.z[i]) * (tr.z[i] - mean.z[i]) * inv;
    }
  }
  for (std::size_t i = 0; i < len; ++i) {
    out.x_std[i] = std::sqrt(out.x_std[i]);
    out.y_std[i] = std::sqrt(out.y_std[i]);
    out.z_std[i] = std::sqrt(out.z_std[i]);
  }
  mean.z_spread = out.z_std;
  return out;
}

}  // namespace cavityxy::ensemble

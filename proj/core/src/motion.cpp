#include "cavityxy/motion.hpp"

#include <cmath>
#include <string>

#include "cavityxy/protocol.hpp"

namespace cavityxy::motion {

double trap_frequency(double V0, double recoil_k, double mass) {
  if (V0 < 0.0) throw DomainError("trap_frequency: V0 must be >= 0");
  const double recoil_energy = kHbar * kHbar * recoil_k * recoil_k / (2.0 * mass);
  return std::sqrt(4.0 * V0 * recoil_energy) / kHbar;
}

double lamb_dicke(double omega_T, double mass, double lambda_c) {
  if (!(omega_T > 0.0)) throw DomainError("lamb_dicke: trap frequency must be > 0");
  const double x0 = std::sqrt(kHbar / (mass * omega_T));
  return kTwoPi / lambda_c * x0;
}

namespace {

struct GaussHermite {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
};

// Golub-Welsch: nodes are eigenvalues of the Jacobi matrix of the Hermite recurrence.
GaussHermite gauss_hermite(int order) {
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(order);
  Eigen::VectorXd sub(order > 1 ? order - 1 : 0);
  for (int i = 1; i < order; ++i) sub(i - 1) = std::sqrt(0.5 * i);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  GaussHermite gh;
  gh.nodes = es.eigenvalues();
  gh.weights.resize(order);
  const double sqrt_pi = std::sqrt(kPi);
  for (int i = 0; i < order; ++i) {
    const double v = es.eigenvectors()(0, i);
    gh.weights(i) = sqrt_pi * v * v;
  }
  return gh;
}

}  // namespace

EtaMatrices eta_quadrature(double kx0, int n_max, int order) {
  if (n_max < 0) throw DomainError("eta_quadrature: n_max must be >= 0");
  if (order <= 0) order = 2 * n_max + 32;
  const int L = n_max + 1;
  const GaussHermite gh = gauss_hermite(order);
  EtaMatrices eta{Eigen::MatrixXd::Zero(L, L), Eigen::MatrixXd::Zero(L, L)};
  std::vector<double> h(L);
  const double h0 = std::pow(kPi, -0.25);
  for (int q = 0; q < order; ++q) {
    const double xi = gh.nodes(q);
    // Normalized Hermite polynomials; the Gaussian factor is carried by the weight.
    h[0] = h0;
    if (L > 1) h[1] = std::sqrt(2.0) * xi * h0;
    for (int n = 1; n + 1 < L; ++n) {
      h[n + 1] = std::sqrt(2.0 / (n + 1)) * xi * h[n] - std::sqrt(static_cast<double>(n) / (n + 1)) * h[n - 1];
    }
    const double c = gh.weights(q) * std::cos(kx0 * xi);
    const double s = gh.weights(q) * std::sin(kx0 * xi);
    for (int n = 0; n < L; ++n) {
      for (int m = 0; m < L; ++m) {
        eta.cos_part(n, m) += c * h[n] * h[m];
        eta.sin_part(n, m) += s * h[n] * h[m];
      }
    }
  }
  return eta;
}

EtaMatrices eta_closed_form(double kx0, int n_max) {
  if (n_max < 0) throw DomainError("eta_closed_form: n_max must be >= 0");
  const int L = n_max + 1;
  const double eta = kx0 / std::sqrt(2.0);
  const double e2 = eta * eta;
  const double envelope = std::exp(-0.5 * e2);
  EtaMatrices out{Eigen::MatrixXd::Zero(L, L), Eigen::MatrixXd::Zero(L, L)};
  for (int n = 0; n < L; ++n) {
    for (int m = 0; m < L; ++m) {
      const int lo = std::min(n, m);
      const int hi = std::max(n, m);
      const int d = hi - lo;
      double ratio = 1.0;  // sqrt(lo! / hi!)
      for (int k = lo + 1; k <= hi; ++k) ratio /= std::sqrt(static_cast<double>(k));
      const double mag = envelope * ratio * std::pow(eta, d) *
                         std::assoc_laguerre(static_cast<unsigned>(lo), static_cast<unsigned>(d), e2);
      // (i)^d decides which of cos / sin carries the element.
      const double sign = (d / 2) % 2 == 0 ? 1.0 : -1.0;
      if (d % 2 == 0) {
        out.cos_part(n, m) = sign * mag;
      } else {
        out.sin_part(n, m) = sign * mag;
      }
    }
  }
  return out;
}

EtaMatrices eta_from_lamb_dicke(double kx0, int n_max) {
  EtaMatrices q = eta_quadrature(kx0, n_max);
  const EtaMatrices a = eta_closed_form(kx0, n_max);
  const double diff = std::max((q.cos_part - a.cos_part).cwiseAbs().maxCoeff(),
                               (q.sin_part - a.sin_part).cwiseAbs().maxCoeff());
  if (!(diff <= 1e-8)) {
    throw ConsistencyError("motional overlap quadrature disagrees with closed form by " +
                           std::to_string(diff));
  }
  return q;
}

EtaMatrices eta_coefficients(double omega_T, double mass, double lambda_c, int n_max) {
  return eta_from_lamb_dicke(lamb_dicke(omega_T, mass, lambda_c), n_max);
}

EtaMatrices eta_frozen(int n_max) {
  const int L = n_max + 1;
  return {Eigen::MatrixXd::Identity(L, L), Eigen::MatrixXd::Zero(L, L)};
}

Eigen::MatrixXd level_couplings(std::int64_t site, double g, const EtaMatrices& eta,
                                double lambda_L, double lambda_c) {
  const double phase = kPi * (lambda_L / lambda_c) * static_cast<double>(site);
  return g * std::cos(phase) * eta.cos_part + g * std::sin(phase) * eta.sin_part;
}

ThermalOccupation thermal_populations(double temperature, double omega_T, int n_max) {
  if (n_max < 0) throw DomainError("thermal_populations: n_max must be >= 0");
  if (temperature < 0.0) throw DomainError("thermal_populations: negative temperature");
  ThermalOccupation out;
  out.p.assign(n_max + 1, 0.0);
  if (temperature == 0.0) {
    out.p[0] = 1.0;
    return out;
  }
  const double q = std::exp(-kHbar * omega_T / (kBoltzmann * temperature));
  double sum = 0.0;
  for (int n = 0; n <= n_max; ++n) {
    out.p[n] = std::pow(q, n);
    sum += out.p[n];
  }
  for (double& v : out.p) v /= sum;
  // Untruncated geometric series: weight above n_max is q^(n_max + 1).
  out.truncated_weight = std::pow(q, n_max + 1);
  out.warning = out.truncated_weight > 0.01;
  return out;
}

Model make_model(const ModelParams& p, const ensemble::SiteConfig& sites, const EtaMatrices& eta,
                 const ensemble::Lattice& lattice, double omega_T) {
  if (p.Delta == 0.0) throw DomainError("motion::make_model: Delta = 0");
  Model m;
  m.n_max = eta.n_max();
  m.omega_T = omega_T;
  m.g_peak = sites.g_peak;
  m.n_phys = sites.n_phys;
  m.coupling = sites.g_peak * std::sqrt(sites.n_phys / static_cast<double>(sites.n_sim()));
  m.chi_scale = -p.Delta / (p.Delta * p.Delta + 0.25 * p.kappa * p.kappa);
  m.gamma = p.gamma;
  m.gamma_el = p.gamma_el;
  m.drive = drive_from_pump(p.g, p.omega_p, p.phi, p.Delta, p.delta, p.kappa).field();
  m.delta = p.delta;
  m.shape.reserve(sites.n_sim());
  for (std::size_t k = 0; k < sites.n_sim(); ++k) {
    const double r = sites.radius[k];
    const double radial = p.waist > 0.0 ? std::exp(-(r / p.waist) * (r / p.waist)) : 1.0;
    if (lattice.commensurate) {
      m.shape.push_back(radial * eta.cos_part);
    } else {
      m.shape.push_back(level_couplings(sites.site[k], radial, eta, p.lambda_L, p.lambda_c));
    }
  }
  return m;
}

MotionState thermal_ground_state(const Model& m, std::span<const double> populations) {
  const int L = m.n_max + 1;
  double sum = 0.0;
  for (int n = 0; n < L && n < static_cast<int>(populations.size()); ++n) sum += populations[n];
  if (!(sum > 0.0)) throw std::invalid_argument("thermal_ground_state: empty populations");
  MotionState s;
  s.rho.assign(m.n_sites(), Eigen::MatrixXcd::Zero(2 * L, 2 * L));
  for (auto& r : s.rho) {
    for (int n = 0; n < L && n < static_cast<int>(populations.size()); ++n) {
      r(n, n) = populations[n] / sum;
    }
  }
  return s;
}

std::vector<double> pack(const MotionState& s) {
  std::vector<double> y;
  if (s.rho.empty()) return y;
  const auto d2 = static_cast<std::size_t>(s.rho.front().size());
  y.resize(2 * d2 * s.rho.size());
  for (std::size_t j = 0; j < s.rho.size(); ++j) {
    const std::complex<double>* src = s.rho[j].data();
    for (std::size_t i = 0; i < d2; ++i) {
      y[2 * (j * d2 + i)] = src[i].real();
      y[2 * (j * d2 + i) + 1] = src[i].imag();
    }
  }
  return y;
}

MotionState unpack(std::span<const double> y, std::size_t n_sites, int dim, double t) {
  const auto d2 = static_cast<std::size_t>(dim) * static_cast<std::size_t>(dim);
  if (y.size() != 2 * d2 * n_sites) throw std::invalid_argument("motion::unpack: bad length");
  MotionState s;
  s.t = t;
  s.rho.assign(n_sites, Eigen::MatrixXcd(dim, dim));
  for (std::size_t j = 0; j < n_sites; ++j) {
    std::complex<double>* dst = s.rho[j].data();
    for (std::size_t i = 0; i < d2; ++i) dst[i] = {y[2 * (j * d2 + i)], y[2 * (j * d2 + i) + 1]};
  }
  return s;
}

SiteObservables site_observables(const Eigen::MatrixXcd& rho, int n_max) {
  const int L = n_max + 1;
  SiteObservables o;
  double down = 0.0, up = 0.0;
  for (int n = 0; n < L; ++n) {
    down += rho(n, n).real();
    up += rho(L + n, L + n).real();
    o.coherence += rho(L + n, n);
  }
  o.inversion = up - down;
  o.up_population = up;
  o.trace = up + down;
  return o;
}

namespace {

using CMap = Eigen::Map<const Eigen::MatrixXcd>;
using MMap = Eigen::Map<Eigen::MatrixXcd>;

const std::complex<double>* site_ptr(const double* y, std::size_t j, int d) {
  return reinterpret_cast<const std::complex<double>*>(y) + j * static_cast<std::size_t>(d) * d;
}

// <L_j> = sum_nm M_nm rho(up n, down m)
std::complex<double> lowering(const CMap& rho, const Eigen::MatrixXd& M, int L) {
  std::complex<double> acc(0.0, 0.0);
  for (int m = 0; m < L; ++m)
    for (int n = 0; n < L; ++n) acc += M(n, m) * rho(L + n, m);
  return acc;
}

void site_hamiltonian(const Model& m, const Eigen::MatrixXd& M, const Eigen::MatrixXd* mmt,
                      std::complex<double> A, Eigen::MatrixXcd& h) {
  const int L = m.n_max + 1;
  h.setZero(2 * L, 2 * L);
  for (int n = 0; n < L; ++n) {
    h(n, n) = m.omega_T * n + 0.5 * m.delta;
    h(L + n, L + n) = m.omega_T * n - 0.5 * m.delta;
  }
  h.block(L, 0, L, L) = A * M.cast<std::complex<double>>();
  h.block(0, L, L, L) = std::conj(A) * M.transpose().cast<std::complex<double>>();
  if (mmt) h.block(L, L, L, L) += (m.chi_scale * m.coupling * m.coupling) * mmt->cast<std::complex<double>>();
}

void rhs_flat(const Model& m, const std::vector<Eigen::MatrixXd>& mmt, const double* y, double* dy,
              std::vector<std::complex<double>>& lower, Eigen::MatrixXcd& h,
              Eigen::MatrixXcd& x) {
  const int L = m.n_max + 1;
  const int d = 2 * L;
  const std::size_t ns = m.n_sites();
  lower.resize(ns);
  std::complex<double> total(0.0, 0.0);
  for (std::size_t j = 0; j < ns; ++j) {
    lower[j] = lowering(CMap(site_ptr(y, j, d), d, d), m.shape[j], L);
    total += lower[j];
  }
  const double kk = m.chi_scale * m.coupling * m.coupling;
  const double coh = 0.5 * m.gamma + m.gamma_el;
  for (std::size_t j = 0; j < ns; ++j) {
    const CMap rho(site_ptr(y, j, d), d, d);
    MMap drho(reinterpret_cast<std::complex<double>*>(dy) + j * static_cast<std::size_t>(d) * d, d, d);
    std::complex<double> A = 0.5 * m.drive;
    if (m.interactions) A += kk * (total - lower[j]);
    site_hamiltonian(m, m.shape[j], m.interactions ? &mmt[j] : nullptr, A, h);
    x.noalias() = h * rho;
    drho = std::complex<double>(0.0, -1.0) * (x - x.adjoint());
    if (m.gamma != 0.0 || m.gamma_el != 0.0) {
      drho.block(0, 0, L, L) += m.gamma * rho.block(L, L, L, L);
      drho.block(L, L, L, L) -= m.gamma * rho.block(L, L, L, L);
      drho.block(L, 0, L, L) -= coh * rho.block(L, 0, L, L);
      drho.block(0, L, L, L) -= coh * rho.block(0, L, L, L);
    }
  }
}

std::vector<Eigen::MatrixXd> outer_shapes(const Model& m) {
  std::vector<Eigen::MatrixXd> out;
  out.reserve(m.n_sites());
  for (const auto& M : m.shape) out.push_back(M * M.transpose());
  return out;
}

double energy_flat(const Model& m, const std::vector<Eigen::MatrixXd>& mmt, const double* y) {
  const int L = m.n_max + 1;
  const int d = 2 * L;
  const double kk = m.chi_scale * m.coupling * m.coupling;
  std::complex<double> total(0.0, 0.0);
  double self_pairs = 0.0, e = 0.0;
  for (std::size_t j = 0; j < m.n_sites(); ++j) {
    const CMap rho(site_ptr(y, j, d), d, d);
    const std::complex<double> lj = lowering(rho, m.shape[j], L);
    total += lj;
    self_pairs += std::norm(lj);
    for (int n = 0; n < L; ++n) {
      e += (m.omega_T * n + 0.5 * m.delta) * rho(n, n).real();
      e += (m.omega_T * n - 0.5 * m.delta) * rho(L + n, L + n).real();
    }
    e += (m.drive * std::conj(lj)).real();
    if (m.interactions) {
      e += kk * (mmt[j].cast<std::complex<double>>().cwiseProduct(rho.block(L, L, L, L).transpose()))
                    .sum()
                    .real();
    }
  }
  if (m.interactions) e += kk * (std::norm(total) - self_pairs);
  return e;
}

}  // namespace

MotionState motion_rhs(const MotionState& s, const Model& m) {
  const auto y = pack(s);
  std::vector<double> dy(y.size());
  std::vector<std::complex<double>> lower;
  Eigen::MatrixXcd h, x;
  rhs_flat(m, outer_shapes(m), y.data(), dy.data(), lower, h, x);
  return unpack(dy, m.n_sites(), m.dim(), s.t);
}

double motion_energy(const MotionState& s, const Model& m) {
  const auto y = pack(s);
  return energy_flat(m, outer_shapes(m), y.data());
}

System::System(Model m) : m_(std::move(m)), mmt_(outer_shapes(m_)) {}

void System::set_segment(const Segment& s) {
  m_.drive = s.drive;
  m_.delta = s.delta;
}

void System::operator()(double, std::span<const double> y, std::span<double> dy) const {
  rhs_flat(m_, mmt_, y.data(), dy.data(), lower_, h_, x_);
}

void System::observe(double t, const std::vector<double>& y, Trajectory& out) const {
  const int d = m_.dim();
  const std::size_t ns = m_.n_sites();
  double sx = 0.0, sy = 0.0, sz = 0.0;
  std::complex<double> total(0.0, 0.0);
  for (std::size_t j = 0; j < ns; ++j) {
    const CMap rho(site_ptr(y.data(), j, d), d, d);
    const SiteObservables o = site_observables(rho, m_.n_max);
    if (std::abs(o.trace - 1.0) > 1e-6) {
      throw IntegrationError("motion: site " + std::to_string(j) + " trace drifted to " +
                                 std::to_string(o.trace),
                             t, y);
    }
    sx += 2.0 * o.coherence.real();
    sy += -2.0 * o.coherence.imag();
    sz += o.inversion;
    total += lowering(rho, m_.shape[j], m_.n_max + 1);
  }
  const double nn = static_cast<double>(ns);
  const std::complex<double> beta =
      m_.chi_scale * m_.coupling * total * std::sqrt(m_.n_phys / nn);
  const double e = energy_flat(m_, mmt_, y.data()) * m_.n_phys / nn;
  const double half = 0.5 * m_.n_phys;
  const double chi = std::abs(m_.chi_peak());
  const double en = chi == 0.0 ? e / half : e / (chi * half * half);
  out.push(t, sx / nn, sy / nn, sz / nn, en, beta);
  out.n_sim = ns;
  out.n_phys = m_.n_phys;
}

Trajectory run_segments(const Model& m, const MotionState& initial,
                        std::span<const Segment> segments, double dt_out, const Tolerance& tol,
                        MotionState* final_state) {
  if (initial.rho.size() != m.n_sites()) {
    throw std::invalid_argument("motion::run_segments: state and model sizes differ");
  }
  System sys(m);
  std::vector<double> y = pack(initial);
  Trajectory tr = run_protocol(sys, y, segments, dt_out, tol);
  if (final_state) *final_state = unpack(y, m.n_sites(), m.dim(), tr.t.back());
  return tr;
}

double run_echo(const Model& m, const MotionState& initial, double t_echo, const Tolerance& tol) {
  if (t_echo < 0.0) throw std::invalid_argument("run_echo: t_echo must be >= 0");
  if (t_echo == 0.0) {
    double z = 0.0;
    for (const auto& r : initial.rho) z += site_observables(r, m.n_max).inversion;
    return z / static_cast<double>(initial.rho.size());
  }
  const Segment segs[2] = {{t_echo, m.drive, m.delta, true}, {t_echo, -m.drive, m.delta, true}};
  const Trajectory tr = run_segments(m, initial, segs, t_echo, tol);
  return tr.z.back();
}

}  // namespace cavityxy::motion

#include "cavityxy/oracle.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <map>
#include <sstream>

#include "cavityxy/params.hpp"

namespace cavityxy::oracle {

using cd = std::complex<double>;

Eigen::SparseMatrix<cd> dicke_hamiltonian(int N, double chi, double omega, double delta,
                                          double omega_prime) {
  if (N < 1) throw std::invalid_argument("dicke_hamiltonian: N must be >= 1");
  const int dim = N + 1;
  const double J = 0.5 * N;
  const cd half_drive(0.5 * omega, -0.5 * omega_prime);
  std::vector<Eigen::Triplet<cd>> trip;
  trip.reserve(3 * dim);
  for (int k = 0; k < dim; ++k) {
    const double m = k - J;
    trip.emplace_back(k, k, chi * (J * (J + 1) - m * m + m) - delta * m);
    if (k + 1 < dim) {
      const double up = std::sqrt(J * (J + 1) - m * (m + 1));
      trip.emplace_back(k + 1, k, half_drive * up);
      trip.emplace_back(k, k + 1, std::conj(half_drive) * up);
    }
  }
  Eigen::SparseMatrix<cd> H(dim, dim);
  H.setFromTriplets(trip.begin(), trip.end());
  return H;
}

namespace {

struct DickeObs {
  double jx, jy, jz, norm;
};

DickeObs dicke_observe(const Eigen::VectorXcd& psi, int N) {
  const double J = 0.5 * N;
  DickeObs o{0, 0, 0, 0};
  cd jp(0.0, 0.0);
  for (int k = 0; k <= N; ++k) {
    const double m = k - J;
    const double p = std::norm(psi(k));
    o.jz += p * m;
    o.norm += p;
    if (k < N) jp += std::conj(psi(k + 1)) * psi(k) * std::sqrt(J * (J + 1) - m * (m + 1));
  }
  o.jx = jp.real();
  o.jy = jp.imag();
  return o;
}

// exp(-i H tau) v by Lanczos with full reorthogonalization.
Eigen::VectorXcd krylov_exp(const Eigen::SparseMatrix<cd>& H, const Eigen::VectorXcd& v, double tau,
                            int m_max) {
  const double beta0 = v.norm();
  if (beta0 == 0.0) return v;
  const int n = static_cast<int>(v.size());
  const int m_cap = std::min(m_max, n);
  Eigen::MatrixXcd V(n, m_cap);
  std::vector<double> alpha, beta;
  V.col(0) = v / beta0;
  int m = 0;
  for (; m < m_cap; ++m) {
    Eigen::VectorXcd w = H * V.col(m);
    alpha.push_back(V.col(m).dot(w).real());
    for (int pass = 0; pass < 2; ++pass) {
      for (int i = 0; i <= m; ++i) w -= V.col(i) * V.col(i).dot(w);
    }
    const double b = w.norm();
    if (m + 1 == m_cap || b < 1e-14 * beta0) {
      ++m;
      break;
    }
    beta.push_back(b);
    V.col(m + 1) = w / b;
  }
  Eigen::VectorXd d(m), e(m > 1 ? m - 1 : 0);
  for (int i = 0; i < m; ++i) d(i) = alpha[i];
  for (int i = 0; i + 1 < m; ++i) e(i) = beta[i];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(d, e, Eigen::ComputeEigenvectors);
  Eigen::VectorXcd c(m);
  for (int i = 0; i < m; ++i) {
    c(i) = std::exp(cd(0.0, -tau * es.eigenvalues()(i))) * es.eigenvectors()(0, i);
  }
  const Eigen::VectorXcd coeffs = es.eigenvectors().cast<cd>() * c;
  return beta0 * (V.leftCols(m) * coeffs);
}

double row_norm(const Eigen::SparseMatrix<cd>& H) {
  Eigen::VectorXd rows = Eigen::VectorXd::Zero(H.rows());
  for (int k = 0; k < H.outerSize(); ++k)
    for (Eigen::SparseMatrix<cd>::InnerIterator it(H, k); it; ++it) rows(it.row()) += std::abs(it.value());
  return rows.maxCoeff();
}

}  // namespace

SpinExpectations dicke_exact_evolve(int N, double chi, double omega, double delta, int initial_up,
                                    std::span<const double> t_grid, const DickeOptions& opt) {
  if (N < 1 || N > 10000) throw ResourceError("dicke_exact_evolve: N must lie in [1, 10000]");
  if (initial_up < 0 || initial_up > N) throw std::invalid_argument("initial_up out of range");
  const auto H = dicke_hamiltonian(N, chi, omega, delta, opt.omega_prime);
  const int dim = N + 1;
  DickeMethod method = opt.method;
  if (method == DickeMethod::Auto) method = dim <= 512 ? DickeMethod::Expm : DickeMethod::Krylov;

  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(dim);
  psi(initial_up) = 1.0;
  SpinExpectations out;
  const Eigen::MatrixXcd Hd = method == DickeMethod::Expm ? Eigen::MatrixXcd(H) : Eigen::MatrixXcd();
  std::map<double, Eigen::MatrixXcd> propagators;
  const double hnorm = row_norm(H);

  double t = t_grid.empty() ? 0.0 : t_grid.front();
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    const double dt = t_grid[i] - t;
    if (dt < 0.0) throw std::invalid_argument("dicke_exact_evolve: t_grid must be ascending");
    if (dt > 0.0) {
      if (method == DickeMethod::Expm) {
        auto it = propagators.find(dt);
        if (it == propagators.end()) {
          const Eigen::MatrixXcd A = cd(0.0, -dt) * Hd;
          it = propagators.emplace(dt, A.exp()).first;
        }
        psi = it->second * psi;
      } else {
        const int sub = std::max(1, static_cast<int>(std::ceil(hnorm * dt / 4.0)));
        for (int s = 0; s < sub; ++s) psi = krylov_exp(H, psi, dt / sub, opt.krylov_dim);
      }
    }
    t = t_grid[i];
    const DickeObs o = dicke_observe(psi, N);
    out.t.push_back(t);
    out.jx.push_back(o.jx);
    out.jy.push_back(o.jy);
    out.jz.push_back(o.jz);
    out.norm.push_back(o.norm);
    out.energy.push_back(psi.dot(H * psi).real());
  }
  return out;
}

// --- Lindblad ---------------------------------------------------------------------------

HilbertSpace::HilbertSpace(int n_spins, int n_photon_max) : n_spins_(n_spins), n_ph_(n_photon_max) {
  if (n_spins < 0) throw std::invalid_argument("HilbertSpace: negative spin count");
  const bool cavity = n_photon_max >= 0;
  if ((!cavity && n_spins > 10) || (cavity && n_spins > 6) || (cavity && n_photon_max > 15)) {
    const double d = std::ldexp(1.0, n_spins) * (cavity ? n_photon_max + 1 : 1);
    std::ostringstream msg;
    msg << "exact master equation for " << n_spins << " spins"
        << (cavity ? " with a cavity" : "") << " needs a " << d << " x " << d
        << " density matrix (" << d * d * 16.0 / (1 << 20)
        << " MiB per copy); limits are 10 spins alone, or 6 spins with at most 16 photon levels";
    throw ResourceError(msg.str());
  }
}

SparseOp HilbertSpace::identity() const {
  SparseOp I(dim(), dim());
  I.setIdentity();
  return I;
}

SparseOp HilbertSpace::sigma_minus(int site) const {
  if (site < 0 || site >= n_spins_) throw std::out_of_range("sigma_minus: bad site");
  std::vector<Eigen::Triplet<cd>> trip;
  const int bit = 1 << site;
  for (int i = 0; i < dim(); ++i)
    if (i & bit) trip.emplace_back(i ^ bit, i, 1.0);
  SparseOp op(dim(), dim());
  op.setFromTriplets(trip.begin(), trip.end());
  return op;
}

SparseOp HilbertSpace::sigma_plus(int site) const { return SparseOp(sigma_minus(site).adjoint()); }

SparseOp HilbertSpace::sigma_z(int site) const {
  if (site < 0 || site >= n_spins_) throw std::out_of_range("sigma_z: bad site");
  std::vector<Eigen::Triplet<cd>> trip;
  const int bit = 1 << site;
  for (int i = 0; i < dim(); ++i) trip.emplace_back(i, i, (i & bit) ? 1.0 : -1.0);
  SparseOp op(dim(), dim());
  op.setFromTriplets(trip.begin(), trip.end());
  return op;
}

SparseOp HilbertSpace::annihilation() const {
  if (!has_cavity()) throw std::logic_error("annihilation: no cavity mode");
  std::vector<Eigen::Triplet<cd>> trip;
  const int block = 1 << n_spins_;
  for (int i = 0; i < dim(); ++i) {
    const int n = i / block;
    if (n > 0) trip.emplace_back(i - block, i, std::sqrt(static_cast<double>(n)));
  }
  SparseOp op(dim(), dim());
  op.setFromTriplets(trip.begin(), trip.end());
  return op;
}

Eigen::MatrixXcd HilbertSpace::product_density(double theta, double phi) const {
  const cd up = std::cos(0.5 * theta);
  const cd down = std::exp(cd(0.0, phi)) * std::sin(0.5 * theta);
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(dim());
  for (int s = 0; s < (1 << n_spins_); ++s) {
    cd amp = 1.0;
    for (int k = 0; k < n_spins_; ++k) amp *= (s >> k) & 1 ? up : down;
    psi(s) = amp;
  }
  return psi * psi.adjoint();
}

namespace {

cd expect(const SparseOp& op, const Eigen::MatrixXcd& rho) {
  cd acc(0.0, 0.0);
  for (int k = 0; k < op.outerSize(); ++k)
    for (SparseOp::InnerIterator it(op, k); it; ++it) acc += it.value() * rho(it.col(), it.row());
  return acc;
}

}  // namespace

LindbladResult lindblad_exact_evolve(const HilbertSpace& space, const LindbladSpec& spec,
                                     const Eigen::MatrixXcd& rho0, std::span<const double> t_grid,
                                     const Tolerance& tol, bool check_positivity) {
  const int d = space.dim();
  if (rho0.rows() != d || rho0.cols() != d) throw std::invalid_argument("rho0 has the wrong size");
  if (spec.hamiltonian.rows() != d) throw std::invalid_argument("Hamiltonian has the wrong size");

  SparseOp heff = spec.hamiltonian;
  for (const auto& L : spec.jumps) heff -= cd(0.0, 0.5) * SparseOp(L.adjoint() * L);
  heff.makeCompressed();
  std::vector<SparseOp> jumps_adj;
  for (const auto& L : spec.jumps) jumps_adj.emplace_back(L.adjoint());

  Eigen::MatrixXcd X(d, d), Y(d, d);
  auto rhs = [&](double, std::span<const double> y, std::span<double> dy) {
    const Eigen::Map<const Eigen::MatrixXcd> rho(reinterpret_cast<const cd*>(y.data()), d, d);
    Eigen::Map<Eigen::MatrixXcd> drho(reinterpret_cast<cd*>(dy.data()), d, d);
    X.noalias() = heff * rho;
    X *= cd(0.0, -1.0);
    drho = X + X.adjoint();
    for (std::size_t j = 0; j < spec.jumps.size(); ++j) {
      Y.noalias() = spec.jumps[j] * rho;
      drho.noalias() += Y * jumps_adj[j];
    }
  };

  std::vector<SparseOp> sz, sm;
  for (int k = 0; k < space.n_spins(); ++k) {
    sz.push_back(space.sigma_z(k));
    sm.push_back(space.sigma_minus(k));
  }
  SparseOp a, n_op;
  if (space.has_cavity()) {
    a = space.annihilation();
    n_op = SparseOp(a.adjoint() * a);
  }

  std::vector<double> y(2 * static_cast<std::size_t>(d) * d);
  Eigen::Map<Eigen::MatrixXcd>(reinterpret_cast<cd*>(y.data()), d, d) = rho0;
  DormandPrince dp(y.size(), tol);
  LindbladResult out;
  double t = t_grid.empty() ? 0.0 : t_grid.front();
  for (double target : t_grid) {
    dp.advance(rhs, t, y, target);
    const Eigen::Map<const Eigen::MatrixXcd> rho(reinterpret_cast<const cd*>(y.data()), d, d);
    out.t.push_back(target);
    std::vector<double> zs;
    std::vector<cd> ms;
    for (int k = 0; k < space.n_spins(); ++k) {
      zs.push_back(expect(sz[k], rho).real());
      ms.push_back(expect(sm[k], rho));
    }
    out.sz.push_back(std::move(zs));
    out.sm.push_back(std::move(ms));
    if (space.has_cavity()) {
      out.a.push_back(expect(a, rho));
      out.n_photon.push_back(expect(n_op, rho).real());
    }
    out.trace.push_back(rho.trace().real());
    if (check_positivity) {
      const Eigen::MatrixXcd herm = 0.5 * (rho + rho.adjoint());
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(herm, Eigen::EigenvaluesOnly);
      out.min_eigenvalue.push_back(es.eigenvalues().minCoeff());
    }
  }
  out.final_rho = Eigen::Map<const Eigen::MatrixXcd>(reinterpret_cast<const cd*>(y.data()), d, d);
  return out;
}

namespace {

void add_spin_terms(const HilbertSpace& space, std::span<const std::complex<double>> site_drive,
                    double delta, const SpinRates& rates, LindbladSpec& spec) {
  for (int k = 0; k < space.n_spins(); ++k) {
    const SparseOp sp = space.sigma_plus(k);
    const SparseOp smk = space.sigma_minus(k);
    const cd f = k < static_cast<int>(site_drive.size()) ? site_drive[k] : cd(0.0, 0.0);
    spec.hamiltonian += 0.5 * f * sp + 0.5 * std::conj(f) * smk;
    spec.hamiltonian += cd(-0.5 * delta) * space.sigma_z(k);
    if (rates.gamma > 0.0) spec.jumps.push_back(std::sqrt(rates.gamma) * smk);
    if (rates.gamma_el > 0.0) spec.jumps.push_back(std::sqrt(0.5 * rates.gamma_el) * space.sigma_z(k));
  }
}

}  // namespace

LindbladSpec spin_model(const HilbertSpace& space, std::span<const double> coupling,
                        double chi_scale, std::span<const std::complex<double>> site_drive,
                        double delta, const SpinRates& rates) {
  if (static_cast<int>(coupling.size()) != space.n_spins()) {
    throw std::invalid_argument("spin_model: one coupling per spin required");
  }
  LindbladSpec spec;
  spec.hamiltonian = SparseOp(space.dim(), space.dim());
  // sum_kj chi_kj s+_k s-_j = chi_scale * Lg^dagger Lg with Lg = sum_j G_j s-_j.
  SparseOp lg(space.dim(), space.dim());
  for (int k = 0; k < space.n_spins(); ++k) lg += coupling[k] * space.sigma_minus(k);
  spec.hamiltonian += chi_scale * SparseOp(lg.adjoint() * lg);
  add_spin_terms(space, site_drive, delta, rates, spec);
  return spec;
}

LindbladSpec spin_cavity_model(const HilbertSpace& space, std::span<const double> coupling,
                               double cavity_detuning, double kappa,
                               std::span<const std::complex<double>> site_drive, double delta,
                               const SpinRates& rates) {
  if (!space.has_cavity()) throw std::invalid_argument("spin_cavity_model: space has no cavity");
  if (static_cast<int>(coupling.size()) != space.n_spins()) {
    throw std::invalid_argument("spin_cavity_model: one coupling per spin required");
  }
  LindbladSpec spec;
  const SparseOp a = space.annihilation();
  const SparseOp ad = a.adjoint();
  spec.hamiltonian = cavity_detuning * SparseOp(ad * a);
  for (int k = 0; k < space.n_spins(); ++k) {
    spec.hamiltonian += coupling[k] * SparseOp(ad * space.sigma_minus(k) + a * space.sigma_plus(k));
  }
  add_spin_terms(space, site_drive, delta, rates, spec);
  if (kappa > 0.0) spec.jumps.push_back(std::sqrt(kappa) * a);
  return spec;
}

Phase basin_boundary_exact(double N, double chi, double omega, double theta0, double phi0,
                           double delta) {
  if (delta != 0.0) throw std::invalid_argument("basin_boundary_exact: requires delta = 0");
  const double half = 0.5 * N;
  const double X = half * std::sin(theta0) * std::cos(phi0);
  const double Y = half * std::sin(theta0) * std::sin(phi0);
  const double e0 = chi * (X * X + Y * Y) + omega * X;
  return std::abs(e0 - chi * half * half) <= std::abs(omega) * half ? Phase::Paramagnetic
                                                                    : Phase::Ferromagnetic;
}

}  // namespace cavityxy::oracle

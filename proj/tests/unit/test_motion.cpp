#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>
#include <cmath>
#include <complex>

#include "cavityxy/ensemble.hpp"
#include "cavityxy/motion.hpp"
#include "cavityxy/params.hpp"

namespace cavityxy::motion {
namespace {

using cd = std::complex<double>;

const ModelParams& ref() {
  static const ModelParams p = reference_params();
  return p;
}

double ref_trap_frequency() {
  const TrapParams& t = *ref().trap;
  return trap_frequency(t.V0, t.recoil_k, t.mass);
}

// <n| f(k x) |m> evaluated on a large truncated oscillator basis, where x is the position
// operator in units of x0. Independent of both quadrature and the Laguerre closed form.
Eigen::MatrixXd position_function(double kx0, int n_max, bool sine) {
  const int big = 120;
  Eigen::MatrixXd X = Eigen::MatrixXd::Zero(big, big);
  for (int n = 0; n + 1 < big; ++n) X(n, n + 1) = X(n + 1, n) = std::sqrt((n + 1) / 2.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(X);
  Eigen::VectorXd f(big);
  for (int i = 0; i < big; ++i) {
    const double a = kx0 * es.eigenvalues()(i);
    f(i) = sine ? std::sin(a) : std::cos(a);
  }
  const Eigen::MatrixXd full = es.eigenvectors() * f.asDiagonal() * es.eigenvectors().transpose();
  return full.topLeftCorner(n_max + 1, n_max + 1);
}

TEST(Trap, ReferenceFrequencyAndScaling) {
  const TrapParams& t = *ref().trap;
  EXPECT_NEAR(ref_trap_frequency() / (kTwoPi * 200e3), 1.0, 1e-12);
  EXPECT_NEAR(trap_frequency(4.0 * t.V0, t.recoil_k, t.mass) / ref_trap_frequency(), 2.0, 1e-12);
  EXPECT_EQ(trap_frequency(0.0, t.recoil_k, t.mass), 0.0);
}

TEST(Eta, GroundStateOverlap) {
  for (double kx0 : {0.1, 0.35, 0.9}) {
    const auto e = eta_closed_form(kx0, 4);
    EXPECT_NEAR(e.cos_part(0, 0), std::exp(-kx0 * kx0 / 4.0), 1e-14);
    const auto q = eta_quadrature(kx0, 4);
    EXPECT_NEAR(q.cos_part(0, 0), std::exp(-kx0 * kx0 / 4.0), 1e-13);
  }
}

TEST(Eta, ParitySelectionRules) {
  const TrapParams& t = *ref().trap;
  const auto e = eta_coefficients(ref_trap_frequency(), t.mass, ref().lambda_c, 10);
  for (int n = 0; n <= 10; ++n) {
    for (int m = 0; m <= 10; ++m) {
      const double forbidden = (n + m) % 2 == 1 ? e.cos_part(n, m) : e.sin_part(n, m);
      EXPECT_LT(std::abs(forbidden), 1e-10) << n << "," << m;
    }
  }
}

TEST(Eta, QuadratureAndClosedFormMatchIndependentPositionOperator) {
  for (double kx0 : {0.05, 0.3, 0.8}) {
    const auto q = eta_quadrature(kx0, 8);
    const auto c = eta_closed_form(kx0, 8);
    const Eigen::MatrixXd cos_ref = position_function(kx0, 8, false);
    const Eigen::MatrixXd sin_ref = position_function(kx0, 8, true);
    EXPECT_LT((q.cos_part - cos_ref).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LT((q.sin_part - sin_ref).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LT((c.cos_part - cos_ref).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LT((c.sin_part - sin_ref).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(Eta, FrozenLimit) {
  const auto e = eta_quadrature(0.0, 6);
  EXPECT_LT((e.cos_part - Eigen::MatrixXd::Identity(7, 7)).cwiseAbs().maxCoeff(), 1e-13);
  EXPECT_LT(e.sin_part.cwiseAbs().maxCoeff(), 1e-13);
}

// Level-changing weight of the low rows, 1 - <n|cos kx|n>^2 without truncation. Higher rows are
// not monotone: their diagonal Laguerre factor has a zero below k x0 = 1.
TEST(Eta, OffDiagonalWeightGrowsWithLambDicke) {
  std::vector<double> last(3, -1.0);
  for (int i = 0; i <= 20; ++i) {
    const double kx0 = 0.05 * i;
    const auto e = eta_closed_form(kx0, 10);
    for (int n = 0; n < 3; ++n) {
      double w = e.sin_part.row(n).squaredNorm() + e.cos_part.row(n).squaredNorm() -
                 e.cos_part(n, n) * e.cos_part(n, n);
      EXPECT_GT(w, last[n]) << "row " << n << " at " << kx0;
      last[n] = w;
    }
    EXPECT_NEAR(last[0], 1.0 - std::exp(-0.5 * kx0 * kx0), 1e-10);
  }
}

TEST(LevelCouplings, AntinodeAndFrozen) {
  const auto e = eta_closed_form(0.4, 5);
  const double g = 3.0;
  EXPECT_LT((level_couplings(0, g, e, 813e-9, 689e-9) - g * e.cos_part).cwiseAbs().maxCoeff(),
            1e-14);
  const auto f = eta_frozen(5);
  for (std::int64_t j : {1, 17, 401}) {
    const Eigen::MatrixXd M = level_couplings(j, g, f, 813e-9, 689e-9);
    const Eigen::MatrixXd expected =
        coupling_profile(g, 813e-9, 689e-9, j) * Eigen::MatrixXd::Identity(6, 6);
    EXPECT_LT((M - expected).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Thermal, Limits) {
  const auto zero = thermal_populations(0.0, kTwoPi * 200e3, 10);
  EXPECT_EQ(zero.p[0], 1.0);
  for (int n = 1; n <= 10; ++n) EXPECT_EQ(zero.p[n], 0.0);
  const auto ref_t = thermal_populations(14e-6, kTwoPi * 200e3, 10);
  const double x = kHbar * kTwoPi * 200e3 / (kBoltzmann * 14e-6);
  EXPECT_NEAR(x, 0.686, 1e-3);
  EXPECT_NEAR(ref_t.p[1] / ref_t.p[0], std::exp(-x), 1e-12);
  EXPECT_NEAR(ref_t.p[1] / ref_t.p[0], 0.504, 1e-3);
  EXPECT_FALSE(ref_t.warning);
  const auto hot = thermal_populations(1.0, kTwoPi * 200e3, 10);
  for (double p : hot.p) EXPECT_NEAR(p, 1.0 / 11.0, 1e-3);
  EXPECT_TRUE(hot.warning);
}

ensemble::SiteConfig one_site(std::int64_t j, double n_phys) {
  ensemble::SiteConfig s;
  s.site = {j};
  s.radius = {0.0};
  s.g_peak = ref().g;
  s.n_phys = n_phys;
  s.profile = {coupling_profile(1.0, ref().lambda_L, ref().lambda_c, j)};
  s.coupling = {ref().g};
  return s;
}

// A single atom with motion, no interactions and no decoherence, against direct unitary
// evolution of the spin-oscillator state with the matrix exponential.
TEST(MotionModel, SingleSiteMatchesDenseUnitaryEvolution) {
  const int n_max = 8;
  const int L = n_max + 1;
  const double omega_T = ref_trap_frequency();
  const double kx0 = 0.6;  // strong motional coupling so that the test is sensitive
  const auto eta = eta_from_lamb_dicke(kx0, n_max);
  ModelParams p = ref();
  p.gamma = 0.0;
  p.gamma_el = 0.0;
  const std::int64_t j = 3;
  Model m = make_model(p, one_site(j, 1.0), eta, {}, omega_T);
  m.interactions = false;
  m.drive = cd(kTwoPi * 1.3e6, -kTwoPi * 0.4e6);
  m.delta = kTwoPi * 0.25e6;
  const double t_final = 4e-6;
  const int steps = 80;
  const Trajectory tr = run_segments(
      m, thermal_ground_state(m, std::vector<double>{1.0}),
      std::vector<Segment>{{t_final, m.drive, m.delta, true}}, t_final / steps, {1e-11, 1e-13});

  // Independent Hamiltonian: oscillator + spin, with the drive coupling through f(k x + phase).
  const double phase = kPi * ref().lambda_L / ref().lambda_c * static_cast<double>(j);
  const Eigen::MatrixXd M = std::cos(phase) * position_function(kx0, n_max, false) +
                            std::sin(phase) * position_function(kx0, n_max, true);
  Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(2 * L, 2 * L);
  for (int n = 0; n < L; ++n) {
    H(n, n) = omega_T * n + 0.5 * m.delta;          // spin down
    H(L + n, L + n) = omega_T * n - 0.5 * m.delta;  // spin up
  }
  H.block(L, 0, L, L) = 0.5 * m.drive * M.cast<cd>();
  H.block(0, L, L, L) = 0.5 * std::conj(m.drive) * M.transpose().cast<cd>();
  const Eigen::MatrixXcd U = (cd(0.0, -t_final / steps) * H).exp();
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(2 * L);
  psi(0) = 1.0;
  for (int i = 0; i <= steps; ++i) {
    double up = 0.0;
    cd coh(0.0, 0.0);
    for (int n = 0; n < L; ++n) {
      up += std::norm(psi(L + n));
      coh += psi(L + n) * std::conj(psi(n));
    }
    ASSERT_NEAR(tr.z[i], 2.0 * up - 1.0, 1e-8) << "t = " << tr.t[i];
    ASSERT_NEAR(tr.x[i], 2.0 * coh.real(), 1e-8);
    ASSERT_NEAR(tr.y[i], -2.0 * coh.imag(), 1e-8);
    psi = U * psi;
  }
}

TEST(MotionModel, FrozenMotionReproducesSiteModel) {
  ModelParams p = ref();
  p.N = 950e3;
  const int n_sim = 20;
  const auto sites = ensemble::sample_site_couplings(5, n_sim, p);
  const ensemble::Lattice lattice;
  Model m = make_model(p, sites, eta_frozen(3), lattice, ref_trap_frequency());
  ensemble::Model e = ensemble::make_model(p, sites);
  const cd drive(0.4 * e.chiN(), 0.1 * e.chiN());
  const double delta = 0.05 * e.chiN();
  const std::vector<Segment> segs{{2e-6, drive, delta, true}, {1e-6, -drive, 0.0, true}};
  const Tolerance tol{1e-11, 1e-13};
  const Trajectory a =
      run_segments(m, thermal_ground_state(m, std::vector<double>{1.0}), segs, 2e-8, tol);
  const Trajectory b = ensemble::run_segments(e, ensemble::ground_state(n_sim), segs, 2e-8, tol);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    ASSERT_NEAR(a.x[i], b.x[i], 1e-6);
    ASSERT_NEAR(a.y[i], b.y[i], 1e-6);
    ASSERT_NEAR(a.z[i], b.z[i], 1e-6);
  }
}

Model reference_motion(int n_sim, int n_max = 6) {
  const ModelParams& p = ref();
  const auto sites = ensemble::sample_site_couplings(2, n_sim, p);
  const double omega_T = ref_trap_frequency();
  return make_model(p, sites, eta_coefficients(omega_T, p.trap->mass, p.lambda_c, n_max), {},
                    omega_T);
}

TEST(MotionModel, UndrivenThermalStateIsStationary) {
  Model m = reference_motion(6);
  m.drive = cd(0.0, 0.0);
  m.delta = 0.0;
  const auto pops = thermal_populations(ref().temperature, m.omega_T, m.n_max);
  const MotionState s = thermal_ground_state(m, pops.p);
  const MotionState d = motion_rhs(s, m);
  for (const auto& r : d.rho) EXPECT_LT(r.cwiseAbs().maxCoeff(), 1e-6);
}

TEST(MotionModel, TracePositivityAndExcitationBookkeeping) {
  Model m = reference_motion(8);
  const auto pops = thermal_populations(ref().temperature, m.omega_T, m.n_max);
  const MotionState s0 = thermal_ground_state(m, pops.p);
  const double chiN = m.chiN();
  MotionState driven;
  run_segments(m, s0, std::vector<Segment>{{1e-6, cd(0.7 * chiN, 0.0), 0.0, true}}, 1e-7, {},
               &driven);
  for (const auto& r : driven.rho) {
    EXPECT_NEAR(r.trace().real(), 1.0, 1e-9);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (r + r.adjoint()));
    EXPECT_GE(es.eigenvalues().minCoeff(), -1e-9);
  }
  // Pump off, no decoherence: the number of spin excitations is conserved.
  Model quiet = m;
  quiet.gamma = 0.0;
  quiet.gamma_el = 0.0;
  auto up_total = [&](const MotionState& s) {
    double u = 0.0;
    for (const auto& r : s.rho) u += site_observables(r, quiet.n_max).up_population;
    return u;
  };
  MotionState after;
  run_segments(quiet, driven, std::vector<Segment>{{2e-6, cd(0.0, 0.0), 0.0, true}}, 1e-7, {},
               &after);
  EXPECT_NEAR(up_total(after), up_total(driven), 1e-7 * m.n_sites());
}

TEST(MotionModel, StrongDriveShowsMotionalDephasing) {
  const int n_sim = 10;
  Model moving = reference_motion(n_sim);
  moving.interactions = false;
  moving.gamma = 0.0;
  moving.gamma_el = 0.0;
  ModelParams p = ref();
  Model frozen = make_model(p, ensemble::sample_site_couplings(2, n_sim, p), eta_frozen(6), {},
                            moving.omega_T);
  frozen.interactions = false;
  frozen.gamma = 0.0;
  frozen.gamma_el = 0.0;
  const cd drive(10.0 * moving.omega_T, 0.0);
  const std::vector<Segment> segs{{6e-6, drive, 0.0, true}};
  const auto pops = thermal_populations(ref().temperature, moving.omega_T, moving.n_max);
  auto late_contrast = [&](const Model& m) {
    const Trajectory tr = run_segments(m, thermal_ground_state(m, pops.p), segs, 2e-9);
    double lo = 1.0, hi = -1.0;
    for (std::size_t i = 0; i < tr.size(); ++i) {
      if (tr.t[i] < 5e-6) continue;
      lo = std::min(lo, tr.z[i]);
      hi = std::max(hi, tr.z[i]);
    }
    return hi - lo;
  };
  const double c_frozen = late_contrast(frozen);
  const double c_moving = late_contrast(moving);
  EXPECT_GT(c_frozen, 0.9 * c_moving);
  EXPECT_LT(c_moving, c_frozen - 0.1);
}

TEST(Echo, ZeroDurationAndFrozenLinearRevival) {
  Model m = reference_motion(5);
  const auto pops = thermal_populations(ref().temperature, m.omega_T, m.n_max);
  const MotionState s0 = thermal_ground_state(m, pops.p);
  EXPECT_NEAR(run_echo(m, s0, 0.0), -1.0, 1e-12);
  ModelParams p = ref();
  p.gamma = 0.0;
  p.gamma_el = 0.0;
  Model f = make_model(p, ensemble::sample_site_couplings(2, 5, p), eta_frozen(6), {}, m.omega_T);
  f.interactions = false;
  f.drive = cd(0.94 * f.chiN(), 0.0);
  for (double te : {0.3e-6, 1.1e-6, 2.5e-6}) {
    EXPECT_NEAR(run_echo(f, thermal_ground_state(f, pops.p), te, {1e-11, 1e-13}), -1.0, 1e-6);
  }
}

}  // namespace
}  // namespace cavityxy::motion

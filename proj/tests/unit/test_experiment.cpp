#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "cavityxy/analysis.hpp"
#include "cavityxy/collective.hpp"
#include "cavityxy/experiment.hpp"
#include "cavityxy/params.hpp"

namespace cavityxy {
namespace {

constexpr double kChiN = -kTwoPi * 2.25738e6;

ExperimentSettings collective_settings() {
  ExperimentSettings s;
  s.model = ModelKind::Collective;
  s.params.N = 950e3;
  s.chiN_override = kChiN;
  s.t_final = 6e-6;
  s.dt_out = 2e-8;
  return s;
}

ExperimentSettings ensemble_settings(std::size_t n_sim) {
  ExperimentSettings s;
  s.model = ModelKind::EnsembleAdiabatic;
  s.params = reference_params();
  s.params.gamma = 0.0;
  s.params.gamma_el = 0.0;
  s.n_sim = n_sim;
  s.t_final = 6e-6;
  s.dt_out = 2e-8;
  return s;
}

TEST(ModelKind, NamesRoundTrip) {
  for (ModelKind m : {ModelKind::Collective, ModelKind::EnsembleAdiabatic,
                      ModelKind::EnsembleFullCavity, ModelKind::Motion}) {
    EXPECT_EQ(model_kind_from_string(to_string(m)), m);
  }
  EXPECT_THROW(model_kind_from_string("collective"), std::invalid_argument);
}

TEST(Settings, Validation) {
  ExperimentSettings s = ensemble_settings(10);
  EXPECT_NO_THROW(s.validate());
  s.n_sim = 0;
  EXPECT_THROW(s.validate(), std::invalid_argument);
  s = ensemble_settings(10);
  s.chiN_override = kChiN;
  EXPECT_THROW(s.validate(), std::invalid_argument);
  s = ensemble_settings(10);
  s.model = ModelKind::Motion;
  s.params.trap.reset();
  EXPECT_THROW(s.validate(), std::invalid_argument);
  s = ensemble_settings(10);
  s.fluctuation_rms = -0.1;
  EXPECT_THROW(s.validate(), std::invalid_argument);
  s = ensemble_settings(10);
  s.dt_out = 0.0;
  EXPECT_THROW(Experiment{s}, std::invalid_argument);
}

TEST(Experiment, NominalChiN) {
  EXPECT_EQ(Experiment(collective_settings()).chiN(), kChiN);
  const Experiment e(ensemble_settings(10));
  EXPECT_NEAR(angular_to_hz(e.chiN()) / 1e6, -2.25738, 1e-4);
}

TEST(Experiment, CollectiveQuenchIsTheBareModel) {
  const Experiment ex(collective_settings());
  const Trajectory a = ex.quench(0.3, 0.1);
  collective::Params p;
  p.chiN = kChiN;
  p.n_atoms = 950e3;
  p.omega = 0.3 * kChiN;
  p.delta = 0.1 * kChiN;
  const Trajectory b = collective::integrate_quench(p, collective::south_pole(), 6e-6, 2e-8);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a.z[i], b.z[i]);
}

TEST(Experiment, ShotAveragesAreThreadIndependent) {
  ExperimentSettings s = ensemble_settings(40);
  s.n_shots = 6;
  s.fluctuation_rms = 0.05;
  s.seed = 17;
  const Experiment ex(s);
  const Trajectory a = ex.quench(0.3, 0.0, 1);
  const Trajectory b = ex.quench(0.3, 0.0, 4);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    ASSERT_EQ(a.z[i], b.z[i]);
    ASSERT_EQ(a.z_spread[i], b.z_spread[i]);
  }
}

// Shot-to-shot scatter is largest where the response to Omega / chi N is steepest.
TEST(Experiment, SpreadPeaksAtTheCriticalDrive) {
  ExperimentSettings s = ensemble_settings(200);
  s.n_shots = 8;
  s.fluctuation_rms = 0.05;
  s.seed = 3;
  const Experiment ex(s);
  const auto est = analysis::Estimator::window(0.0, 6e-6);
  std::vector<double> band;
  for (double ratio : {0.1, 0.31, 0.7}) {
    const Trajectory tr = ex.quench(ratio, 0.0);
    band.push_back(analysis::order_parameter(tr.t, tr.z_spread, est));
  }
  EXPECT_GT(band[1], band[0]);
  EXPECT_GT(band[1], band[2]);
}

TEST(Protocol, PreparationSegments) {
  ExperimentSettings s = collective_settings();
  s.prep_ratio = 10.0;
  const Experiment ex(s);
  const auto bare = ex.prep_segments(0.3, 0.0, 0.7);
  ASSERT_EQ(bare.size(), 1u);
  const auto segs = ex.prep_segments(0.3, 0.6, 0.7);
  ASSERT_EQ(segs.size(), 2u);
  EXPECT_FALSE(segs[0].record);
  EXPECT_NEAR(std::abs(segs[0].drive), 10.0 * std::abs(kChiN), 1e-6);
  EXPECT_NEAR(segs[0].duration * 10.0 * std::abs(kChiN), std::asin(0.6), 1e-12);
  EXPECT_NEAR(std::abs(segs[1].drive), 0.3 * std::abs(kChiN), 1e-6);
  EXPECT_NEAR(std::arg(segs[1].drive / std::complex<double>(0.3 * kChiN, 0.0)), -0.7, 1e-12);
  EXPECT_THROW(ex.prep_segments(0.3, 1.2, 0.0), std::invalid_argument);
}

// A very strong preparation drive is an instantaneous rotation; the recorded start must match
// the angles used by the energy-shell reference.
TEST(Protocol, PreparedStateMatchesReferenceAngles) {
  ExperimentSettings s = collective_settings();
  s.prep_ratio = 2000.0;
  const Experiment ex(s);
  for (double r : {0.2, 0.55, 0.9}) {
    for (double dphi : {-2.5, 0.0, 1.1}) {
      const auto [theta, phi_rel] = ex.prepared_angles(0.3, r, dphi);
      const Trajectory tr = ex.prep_quench(0.3, r, dphi);
      const auto segs = ex.prep_segments(0.3, r, dphi);
      const double omega = segs.back().drive.real();
      const double omega_p = -segs.back().drive.imag();
      EXPECT_NEAR(tr.z[0], std::cos(theta), 1e-3);
      // Quench-frame energy per N/2 of the recorded start, against the reference angles with the
      // signed drive along +x.
      const double e_lab = 0.5 * kChiN * (tr.x[0] * tr.x[0] + tr.y[0] * tr.y[0]) +
                           omega * tr.x[0] + omega_p * tr.y[0];
      const double e_ref = 0.5 * kChiN * std::pow(std::sin(theta), 2) +
                           0.3 * kChiN * std::sin(theta) * std::cos(phi_rel);
      EXPECT_NEAR(e_lab / std::abs(kChiN), e_ref / std::abs(kChiN), 2e-3) << r << " " << dphi;
    }
  }
}

TEST(Echo, ReversesLinearDynamics) {
  ExperimentSettings s = collective_settings();
  EXPECT_EQ(Experiment(s).echo(0.94, 0.0), -1.0);
  EXPECT_THROW(Experiment(s).echo(0.94, -1e-6), std::invalid_argument);
  s.interactions = false;
  s.tol = {1e-12, 1e-14};
  const Experiment linear(s);
  for (double te : {0.2e-6, 1.0e-6, 2.7e-6}) EXPECT_NEAR(linear.echo(0.94, te), -1.0, 1e-8);
  // The interaction term does not change sign with the drive.
  s.interactions = true;
  EXPECT_GT(Experiment(s).echo(0.94, 1.0e-6), -0.99);
}

}  // namespace
}  // namespace cavityxy

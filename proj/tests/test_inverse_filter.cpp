#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <map>

#include "invcog/errors.hpp"
#include "invcog/finite_inverse_filter.hpp"
#include "invcog/inverse_filter.hpp"
#include "invcog/particle_inverse_filter.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace invcog;
using invcog::testing::max_rel_diff;
using invcog::testing::random_model;
using namespace invcog::testing;

namespace {

struct Engagement {
  Trajectory traj;
  AdversaryRecord adv;
};

Engagement engage(const LinearGaussianModel& m, const ActionModel& a, int n, std::uint64_t seed) {
  Engagement e{simulate(m, n, seed), {}};
  e.adv = simulate_adversary(m, a, e.traj, seed);
  return e;
}

// --- linear-Gaussian inverse filter ----------------------------------------

TEST(InverseKfParams, BlindAdversary) {
  auto m = LinearGaussianModel::scalar(0.7, 0.0, 1.0, 1.0);
  const auto track = covariance_track(m, 3);
  const auto p = inverse_kf_params(m, ActionModel{}, track, 0);
  EXPECT_DOUBLE_EQ(p.transition(0, 0), 0.7);
  EXPECT_DOUBLE_EQ(p.input(0, 0), 0.0);
  EXPECT_DOUBLE_EQ(p.process_cov(0, 0), 0.0);
}

TEST(InverseKfParams, ScalarSubstitution) {
  auto m = LinearGaussianModel::scalar(1.0, 1.0, 1.0, 1.0);
  CovarianceTrack t;
  t.filtered = {Matrix::Ones(1, 1), Matrix::Constant(1, 1, 0.5)};
  t.gain = {Matrix(), Matrix::Constant(1, 1, 0.5)};
  t.predicted = {Matrix(), Matrix::Ones(1, 1)};
  t.innov_cov = {Matrix(), Matrix::Constant(1, 1, 2.0)};
  const auto p = inverse_kf_params(m, ActionModel{PhiKind::identity, 0.3}, t, 0);
  EXPECT_DOUBLE_EQ(p.transition(0, 0), 0.5);
  EXPECT_DOUBLE_EQ(p.input(0, 0), 0.5);
  EXPECT_DOUBLE_EQ(p.process_cov(0, 0), 0.25);
  EXPECT_DOUBLE_EQ(p.observation(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(p.action_cov(0, 0), 0.3);
}

TEST(InverseKfParams, ProcessNoiseConventionsAgreeOnlyForUnitR) {
  std::mt19937_64 g(4);
  auto m = random_model(g, 2, 2);
  const auto track = covariance_track(m, 2);
  const auto a = inverse_kf_params(m, ActionModel{}, track, 0, ProcessNoiseConvention::gain_r_gain);
  const auto b = inverse_kf_params(m, ActionModel{}, track, 0, ProcessNoiseConvention::gain_gain);
  EXPECT_GT((a.process_cov - b.process_cov).cwiseAbs().maxCoeff(), 1e-6);
  m.R = Matrix::Identity(2, 2);
  const auto track2 = covariance_track(m, 2);
  const auto c = inverse_kf_params(m, ActionModel{}, track2, 0, ProcessNoiseConvention::gain_r_gain);
  const auto d = inverse_kf_params(m, ActionModel{}, track2, 0, ProcessNoiseConvention::gain_gain);
  EXPECT_LT(max_rel_diff(c.process_cov, d.process_cov), 1e-15);
}

// The adversary's estimate obeys xhat' = Abar xhat + Fbar x' + psi v'.
TEST(InverseKfParams, ReplayReproducesAdversaryRecursion) {
  std::mt19937_64 g(12);
  const auto m = random_model(g, 3, 2);
  const auto traj = simulate(m, 40, 5);
  const auto beliefs = run_kalman(m, traj.observations);
  const auto track = covariance_track(m, 40);
  for (int k = 0; k < 40; ++k) {
    const auto p = inverse_kf_params(m, ActionModel{}, track, k);
    const Vector v = traj.observations[k] - m.C * traj.states[k + 1];
    const Vector replay = p.transition * beliefs[k].mean + p.input * traj.states[k + 1] + track.gain[k + 1] * v;
    ASSERT_LT(max_rel_diff(replay, beliefs[k + 1].mean), 1e-10) << "step " << k;
    ASSERT_LT(max_rel_diff(track.filtered[k + 1], beliefs[k + 1].cov), 1e-12);
  }
}

TEST(InverseKf, NoiselessActionsRevealEstimateExactly) {
  for (const auto& m : {LinearGaussianModel::scalar(0.9, 1.5, 1.0, 1.0),
                        [] {
                          std::mt19937_64 g(6);
                          return random_model(g, 2, 2);
                        }()}) {
    const ActionModel a{PhiKind::identity, 0.0};
    const auto e = engage(m, a, 1000, 17);
    const auto est = run_inverse_kf(m, a, e.traj.states, e.adv.actions);
    double worst = 0.0;
    for (std::size_t k = 0; k < est.size(); ++k)
      worst = std::max(worst, (est[k].est_mean - e.adv.estimates[k]).cwiseAbs().maxCoeff());
    EXPECT_LT(worst, 1e-9);
  }
}

TEST(InverseKf, HugeActionNoiseFollowsUnforcedPrediction) {
  const auto m = LinearGaussianModel::scalar(0.9, 1.0, 1.0, 1.0);
  const ActionModel a{PhiKind::identity, 1e12};
  const auto e = engage(m, a, 30, 2);
  const auto track = covariance_track(m, 30);
  const auto est = run_inverse_kf(m, a, e.traj.states, e.adv.actions);
  Vector mean = m.prior_mean;
  Matrix cov = Matrix::Zero(1, 1);
  for (int k = 0; k < 30; ++k) {
    const auto p = inverse_kf_params(m, a, track, k);
    mean = p.transition * mean + p.input * e.traj.states[k + 1];
    cov = p.transition * cov * p.transition.transpose() + p.process_cov;
    EXPECT_NEAR(est[k + 1].est_mean(0), mean(0), 1e-6);
    EXPECT_NEAR(est[k + 1].est_cov(0, 0), cov(0, 0), 1e-9);
  }
}

TEST(InverseKf, EmpiricalErrorMatchesSteadyStateCovariance) {
  const auto m = LinearGaussianModel::scalar(0.9, 1.0, 1.0, 1.0);
  const ActionModel a{PhiKind::identity, 0.5};
  const int n = 10000;
  const auto e = engage(m, a, n, 2718);
  const auto est = run_inverse_kf(m, a, e.traj.states, e.adv.actions);
  double sq = 0.0;
  for (int k = 1; k <= n; ++k) sq += std::pow(est[k].est_mean(0) - e.adv.estimates[k](0), 2);
  const double steady = est.back().est_cov(0, 0);
  EXPECT_NEAR(sq / n, steady, 0.05 * steady);
}

// Inverse KF step versus a generic Kalman step on the system with the
// exogenous input removed from the observation and restored afterwards.
TEST(InverseKf, EqualsGenericKalmanFilterOnExplicitSystem) {
  std::mt19937_64 g(31);
  for (int trial = 0; trial < 20; ++trial) {
    const auto m = random_model(g, 3, 2);
    for (PhiKind phi : {PhiKind::identity, PhiKind::covariance, PhiKind::inverse_covariance}) {
      const ActionModel a{phi, 0.4};
      const auto e = engage(m, a, 15, 100 + trial);
      const auto est = run_inverse_kf(m, a, e.traj.states, e.adv.actions);
      const auto track = covariance_track(m, 15);
      GaussianBelief b{m.prior_mean, Matrix::Zero(3, 3)};
      for (int k = 0; k < 15; ++k) {
        const auto p = inverse_kf_params(m, a, track, k);
        LinearGaussianModel sys;
        sys.A = p.transition;
        sys.C = p.observation;
        sys.Q = p.process_cov;
        sys.R = p.action_cov;
        sys.prior_mean = b.mean;
        sys.prior_cov = b.cov;
        const Vector u = p.input * e.traj.states[k + 1];
        const auto upd = kalman_step(sys, b, e.adv.actions[k] - p.observation * u);
        b.mean = upd.belief.mean + u;
        b.cov = upd.belief.cov;
        ASSERT_LT(max_rel_diff(est[k + 1].est_mean, b.mean), 1e-10);
        ASSERT_LT(max_rel_diff(est[k + 1].est_cov, b.cov), 1e-10);
      }
    }
  }
}

TEST(InverseKf, CovariancesStaySymmetricPsd) {
  std::mt19937_64 g(77);
  const auto m = random_model(g, 4, 2);
  const ActionModel a{PhiKind::covariance, 0.2};
  const auto e = engage(m, a, 300, 1);
  for (const auto& s : run_inverse_kf(m, a, e.traj.states, e.adv.actions)) {
    ASSERT_EQ(s.est_cov, s.est_cov.transpose());
    ASSERT_GE(min_eigenvalue(s.est_cov), -1e-9);
    ASSERT_GE(min_eigenvalue(s.adversary_cov), -1e-9);
  }
}

// Per-step cost measured for information; see the notes in the README on
// why dense matrix products make the scaling cubic rather than quadratic.
TEST(InverseKf, StepCostScalingIsPolynomial) {
  auto time_step = [](int x) {
    std::mt19937_64 g(x);
    const auto m = random_model(g, x, x);
    const ActionModel a{PhiKind::identity, 0.5};
    const auto track = covariance_track(m, 2);
    const auto p = inverse_kf_params(m, a, track, 0);
    InverseKFState s = initial_inverse_state(m);
    s.est_cov = Matrix::Identity(x, x);
    const Vector z = Vector::Zero(x);
    const int reps = 200;
    const auto t0 = std::chrono::steady_clock::now();
    for (int r = 0; r < reps; ++r) s = inverse_kf_step(s, z, z, p, track.filtered[1], track.gain[1]);
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() / reps;
  };
  time_step(20);
  const double ratio = time_step(40) / time_step(20);
  RecordProperty("x40_over_x20", std::to_string(ratio));
  EXPECT_LT(ratio, 16.0);
}

// --- finite-alphabet inverse filter ----------------------------------------

TEST(FiniteFilter, EqualsExhaustiveEnumeration) {
  std::mt19937_64 g(2718);
  for (int trial = 0; trial < 60; ++trial) {
    const int nx = 2 + trial % 2, ny = 2 + (trial / 2) % 2, n = 1 + trial % 4;
    const auto m = random_finite(g, nx, ny, nx);
    const Vector prior = uniform_belief(nx);
    std::vector<int> xs{0}, as;
    std::uniform_int_distribution<int> ux(0, nx - 1);
    for (int k = 0; k < n; ++k) {
      xs.push_back(ux(g));
      as.push_back(ux(g));
    }
    BeliefMixture mix;
    mix.atoms.push_back({prior, 1.0});
    FiniteFilterOptions opts;
    opts.prune_tol = 0.0;
    opts.max_atoms = std::numeric_limits<std::size_t>::max();
    const auto res = inverse_filter_finite(m, mix, xs, as, opts);
    const auto ref = enumerate(m, prior, xs, as);
    for (int k = 0; k <= n; ++k) {
      ASSERT_LT((res.mean_beliefs[k] - ref.mean[k]).cwiseAbs().maxCoeff(), 1e-10);
      Matrix second = Matrix::Zero(nx, nx);
      for (const auto& a : res.mixtures[k].atoms) second += a.weight * a.belief * a.belief.transpose();
      ASSERT_LT((second - ref.second[k]).cwiseAbs().maxCoeff(), 1e-10);
      ASSERT_NEAR(res.mixtures[k].total_weight(), 1.0, 1e-10);
    }
    ASSERT_NEAR(res.log_likelihood, ref.loglik, 1e-10);
  }
}

TEST(FiniteFilter, PerfectSensorCollapsesToAdversaryBelief) {
  std::mt19937_64 g(3);
  auto m = random_finite(g, 3, 3, 3);
  m.B = Matrix::Identity(3, 3);
  m.G = Matrix::Identity(3, 3);
  const std::vector<int> xs{0, 1, 1, 2, 0};
  std::vector<int> as;
  Vector belief = uniform_belief(3);
  for (std::size_t k = 1; k < xs.size(); ++k) {
    belief = hmm_update(m, belief, xs[k]);
    as.push_back(m.policy_of(belief));
  }
  BeliefMixture mix;
  mix.atoms.push_back({uniform_belief(3), 1.0});
  const auto res = inverse_filter_finite(m, mix, xs, as);
  ASSERT_EQ(res.mixtures.back().atoms.size(), 1u);
  EXPECT_LT((res.mixtures.back().atoms[0].belief - belief).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_NEAR(res.mixtures.back().atoms[0].weight, 1.0, 1e-12);
}

TEST(FiniteFilter, ConstantPolicyMakesActionsUninformative) {
  std::mt19937_64 g(5);
  auto m = random_finite(g, 2, 3, 2);
  m.G = Matrix::Identity(2, 2);
  m.policy = [](const Vector&) { return 1; };
  const std::vector<int> xs{0, 1, 0, 1};
  const std::vector<int> as{1, 1, 1};
  BeliefMixture mix;
  mix.atoms.push_back({uniform_belief(2), 1.0});
  FiniteFilterOptions opts;
  opts.prune_tol = 0.0;
  const auto res = inverse_filter_finite(m, mix, xs, as, opts);
  EXPECT_NEAR(res.log_likelihood, 0.0, 1e-12);
  const auto ref = enumerate(m, uniform_belief(2), xs, as);
  EXPECT_LT((res.mean_beliefs.back() - ref.mean.back()).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_THROW(inverse_filter_finite(m, mix, xs, std::vector<int>{1, 0, 1}), InconsistencyError);
}

TEST(FiniteFilter, UninformativeSensorGivesPriorPrediction) {
  std::mt19937_64 g(8);
  auto m = random_finite(g, 3, 2, 3);
  m.B = Matrix::Constant(3, 2, 0.5);
  const std::vector<int> xs{0, 2, 1, 1};
  BeliefMixture mix;
  mix.atoms.push_back({uniform_belief(3), 1.0});
  std::vector<int> as;
  Vector pred = uniform_belief(3);
  for (int k = 0; k < 3; ++k) {
    pred = m.P.transpose() * pred;
    as.push_back(FiniteAdversaryModel::map_policy(pred) == 0 ? 0 : 1);
  }
  const auto res = inverse_filter_finite(m, mix, xs, as);
  Vector expect = uniform_belief(3);
  for (int k = 1; k <= 3; ++k) {
    expect = m.P.transpose() * expect;
    for (const auto& atom : res.mixtures[k].atoms)
      EXPECT_LT((atom.belief - expect).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(FiniteFilter, ImpossibleActionNamesTheStep) {
  FiniteAdversaryModel m;
  m.P = Matrix::Identity(2, 2);
  m.B = Matrix::Identity(2, 2);
  m.G = Matrix::Identity(2, 2);
  BeliefMixture mix;
  mix.atoms.push_back({uniform_belief(2), 1.0});
  try {
    inverse_filter_finite(m, mix, {0, 0, 0}, {0, 1});
    FAIL() << "expected InconsistencyError";
  } catch (const InconsistencyError& e) {
    EXPECT_NE(std::string(e.what()).find("step 2"), std::string::npos);
  }
}

TEST(FiniteFilter, ValidationRejectsNonStochasticRows) {
  FiniteAdversaryModel m;
  m.P = Matrix::Identity(2, 2);
  m.B = Matrix::Identity(2, 2);
  m.G = Matrix::Constant(2, 2, 0.6);
  EXPECT_THROW(m.validate(), ConfigError);
}

TEST(FiniteFilter, PruningKeepsWeightsNormalized) {
  std::mt19937_64 g(10);
  const auto m = random_finite(g, 3, 3, 3);
  std::vector<int> xs{0}, as;
  std::uniform_int_distribution<int> u(0, 2);
  for (int k = 0; k < 12; ++k) {
    xs.push_back(u(g));
    as.push_back(u(g));
  }
  BeliefMixture mix;
  mix.atoms.push_back({uniform_belief(3), 1.0});
  FiniteFilterOptions opts;
  opts.max_atoms = 50;
  const auto res = inverse_filter_finite(m, mix, xs, as, opts);
  for (const auto& mx : res.mixtures) {
    EXPECT_LE(mx.atoms.size(), 50u);
    EXPECT_NEAR(mx.total_weight(), 1.0, 1e-10);
  }
}

// --- particle filter ---------------------------------------------------------

TEST(ParticleFilter, AgreesWithInverseKfAcrossSeeds) {
  const auto m = LinearGaussianModel::scalar(0.9, 1.5, 1.0, 1.0);
  const ActionModel a{PhiKind::identity, 0.5};
  const int seeds = 30, n = 10;
  std::vector<double> sum(n, 0.0), sum2(n, 0.0);
  for (int s = 0; s < seeds; ++s) {
    const auto e = engage(m, a, n, 500 + s);
    const auto kf = run_inverse_kf(m, a, e.traj.states, e.adv.actions);
    const auto pf = particle_inverse_filter(m, a, e.traj.states, e.adv.actions, 2000, 900 + s);
    for (int k = 0; k < n; ++k) {
      const double d = pf[k].mean(0) - kf[k + 1].est_mean(0);
      sum[k] += d;
      sum2[k] += d * d;
    }
  }
  for (int k = 0; k < n; ++k) {
    const double mean = sum[k] / seeds;
    const double sd = std::sqrt((sum2[k] - seeds * mean * mean) / (seeds - 1));
    EXPECT_LE(std::abs(mean), 3.0 * sd / std::sqrt(seeds) + 1e-12) << "step " << k + 1;
  }
}

TEST(ParticleFilter, NoiselessActionsPinTheParticles) {
  const auto m = LinearGaussianModel::scalar(0.9, 1.5, 1.0, 1.0);
  const ActionModel a{PhiKind::identity, 0.0};
  const auto e = engage(m, a, 5, 3);
  const auto pf = particle_inverse_filter(m, a, e.traj.states, e.adv.actions, 5000, 4);
  for (int k = 0; k < 5; ++k) {
    EXPECT_TRUE(pf[k].resampled);
    EXPECT_NEAR(pf[k].mean(0), e.adv.estimates[k + 1](0), 0.05);
    EXPECT_LT(pf[k].cov(0, 0), 1e-20);
  }
}

TEST(ParticleFilter, StandardErrorShrinksLikeRootN) {
  const auto m = LinearGaussianModel::scalar(0.9, 1.5, 1.0, 1.0);
  const ActionModel a{PhiKind::identity, 0.5};
  const auto e = engage(m, a, 8, 21);
  auto spread = [&](int particles) {
    const int reps = 200;
    double s = 0.0, s2 = 0.0;
    for (int r = 0; r < reps; ++r) {
      const double v =
          particle_inverse_filter(m, a, e.traj.states, e.adv.actions, particles, 7000 + r, Exec::serial)
              .back()
              .mean(0);
      s += v;
      s2 += v * v;
    }
    return std::sqrt((s2 - s * s / reps) / (reps - 1));
  };
  const double ratio = spread(400) / spread(800);
  EXPECT_GT(ratio, std::sqrt(2.0) * 0.8);
  EXPECT_LT(ratio, std::sqrt(2.0) * 1.2);
}

TEST(ParticleFilter, CollapseIsDegeneracyError) {
  const auto m = LinearGaussianModel::scalar(0.9, 1.0, 1.0, 1.0);
  const ActionModel a{PhiKind::identity, 1e-4};
  const auto traj = simulate(m, 2, 1);
  const std::vector<Vector> actions{Vector::Constant(1, 1e6), Vector::Constant(1, 0.0)};
  EXPECT_THROW(particle_inverse_filter(m, a, traj.states, actions, 500, 1), DegeneracyError);
  EXPECT_THROW(particle_inverse_filter(m, a, traj.states, actions, 50, 1), ConfigError);
}

TEST(ParticleFilter, SerialAndParallelAreBitIdentical) {
  std::mt19937_64 g(1);
  const auto m = random_model(g, 2, 2);
  const ActionModel a{PhiKind::covariance, 0.3};
  const auto e = engage(m, a, 15, 8);
  const auto s = particle_inverse_filter(m, a, e.traj.states, e.adv.actions, 1000, 5, Exec::serial);
  const auto p = particle_inverse_filter(m, a, e.traj.states, e.adv.actions, 1000, 5, Exec::parallel);
  for (std::size_t k = 0; k < s.size(); ++k) {
    EXPECT_EQ(s[k].mean, p[k].mean);
    EXPECT_EQ(s[k].cov, p[k].cov);
  }
}

}  // namespace

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "invcog/detection.hpp"
#include "invcog/errors.hpp"
#include "invcog/spsa.hpp"

using namespace invcog;

namespace {

Matrix uniform_probes(std::mt19937_64& g, int n, int m, double lo = 0.5, double hi = 2.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  return Matrix::NullaryExpr(n, m, [&] { return u(g); });
}

ProbeResponseDataset random_dataset(std::mt19937_64& g, int n, int m) {
  return {uniform_probes(g, n, m, 0.2, 2.0), uniform_probes(g, n, m, 0.2, 2.0)};
}

TEST(Radar, CobbDouglasClosedForm) {
  const auto r = SyntheticRadar::make(UtilityKind::cobb_douglas, Vector{{1.0, 1.0}});
  const auto d = generate_radar_responses(r, Matrix{{1.0, 1.0}});
  EXPECT_DOUBLE_EQ(d.responses(0, 0), 0.5);
  EXPECT_DOUBLE_EQ(d.responses(0, 1), 0.5);
}

TEST(Radar, LinearCornerAndTies) {
  const auto r = SyntheticRadar::make(UtilityKind::linear, Vector{{1.0, 0.0}});
  const auto d = generate_radar_responses(r, Matrix{{2.0, 1.0}});
  EXPECT_DOUBLE_EQ(d.responses(0, 0), 0.5);
  EXPECT_DOUBLE_EQ(d.responses(0, 1), 0.0);
  const auto tie = generate_radar_responses(SyntheticRadar::make(UtilityKind::linear, Vector{{1.0, 1.0}}),
                                            Matrix{{1.0, 1.0}});
  EXPECT_DOUBLE_EQ(tie.responses(0, 0), 0.5);
  EXPECT_DOUBLE_EQ(tie.responses(0, 1), 0.5);
}

TEST(Radar, BudgetIsActive) {
  std::mt19937_64 g(1);
  const Matrix probes = uniform_probes(g, 200, 3);
  for (auto kind : {UtilityKind::cobb_douglas, UtilityKind::linear})
    for (bool rational : {true, false}) {
      const auto r = SyntheticRadar::make(kind, Vector{{0.2, 0.3, 0.5}}, rational);
      const auto d = generate_radar_responses(r, probes, 9);
      for (Eigen::Index n = 0; n < probes.rows(); ++n) {
        EXPECT_NEAR(probes.row(n).dot(d.responses.row(n)), 1.0, 1e-12);
        EXPECT_GE(d.responses.row(n).minCoeff(), 0.0);
      }
    }
}

TEST(Radar, Validation) {
  EXPECT_THROW(SyntheticRadar::make(UtilityKind::cobb_douglas, Vector{{1.0, 0.0}}), ConfigError);
  EXPECT_THROW(SyntheticRadar::make(UtilityKind::linear, Vector{{-1.0, 2.0}}), ConfigError);
  EXPECT_THROW(parse_utility_kind("cubic"), ConfigError);
  const auto r = SyntheticRadar::make(UtilityKind::cobb_douglas, Vector{{2.0, 6.0}});
  EXPECT_DOUBLE_EQ(r.weights(0), 0.25);
}

TEST(Radar, RationalPassesAndUniformFailsGarp) {
  std::mt19937_64 g(2);
  const auto rational = SyntheticRadar::make(UtilityKind::cobb_douglas, Vector{{0.4, 0.6}});
  const auto noise = SyntheticRadar::make(UtilityKind::cobb_douglas, Vector{{0.4, 0.6}}, false);
  int fails = 0;
  const int trials = 200;
  for (int t = 0; t < trials; ++t) {
    const Matrix probes = uniform_probes(g, 50, 2);
    ASSERT_TRUE(check_garp(generate_radar_responses(rational, probes)).passes);
    fails += !check_garp(generate_radar_responses(noise, probes, 100 + t)).passes;
  }
  EXPECT_GE(fails, 0.9 * trials);
}

TEST(Statistic, ZeroExactlyWhenGarpPasses) {
  std::mt19937_64 g(3);
  for (int t = 0; t < 500; ++t) {
    const auto d = random_dataset(g, 2 + t % 6, 1 + t % 3);
    const auto s = perturbation_statistic(d);
    ASSERT_EQ(s.radius == 0.0, check_garp(d).passes);
    ASSERT_GE(s.radius, 0.0);
    ASSERT_FALSE(s.overflow);
  }
}

TEST(Statistic, RelaxedDataPassesAtTheRadius) {
  std::mt19937_64 g(4);
  for (int t = 0; t < 200; ++t) {
    const auto d = random_dataset(g, 6, 2);
    const double r = perturbation_statistic(d).radius;
    if (r == 0.0) continue;
    const Matrix e = expenditure_matrix(d);
    const Vector l1 = d.probes.cwiseAbs().rowwise().sum();
    const Vector own = e.diagonal();
    // The radius is an infimum: at r itself a relation holds with equality.
    EXPECT_TRUE(check_garp(e, own - 2.0 * (1.000001 * r) * l1).passes);
    EXPECT_FALSE(check_garp(e, own - 2.0 * (0.999 * r) * l1).passes);
  }
}

// Smallest r on a bisection for which some grid perturbation passes GARP.
template <typename Feasible>
double bisect_radius(Feasible&& feasible, double hi) {
  double lo = 0.0;
  for (int it = 0; it < 30; ++it) {
    const double mid = 0.5 * (lo + hi);
    (feasible(mid) ? hi : lo) = mid;
  }
  return hi;
}

// With two observations GARP depends on z_1 - z_2 only, which ranges over a
// box of half-width 2r, so a fine grid on that difference is a tight oracle.
TEST(Statistic, ExactForTwoObservations) {
  std::mt19937_64 g(5);
  int checked = 0;
  while (checked < 25) {
    const auto d = random_dataset(g, 2, 2);
    if (check_garp(d).passes) continue;
    ++checked;
    const int pts = 101;
    auto feasible = [&](double r) {
      for (int i = 0; i < pts; ++i)
        for (int j = 0; j < pts; ++j) {
          auto p = d;
          p.responses(0, 0) += 2.0 * r * (2.0 * i / (pts - 1) - 1.0);
          p.responses(0, 1) += 2.0 * r * (2.0 * j / (pts - 1) - 1.0);
          if (check_garp(p).passes) return true;
        }
      return false;
    };
    const double grid = bisect_radius(feasible, 5.0);
    EXPECT_NEAR(perturbation_statistic(d).radius, grid, 0.02 * grid + 1e-6);
  }
}

// Three observations: a coarse grid over every response coordinate bounds the
// true radius from above, and the statistic must not exceed it.
TEST(Statistic, LowerBoundForThreeObservations) {
  std::mt19937_64 g(6);
  int checked = 0;
  while (checked < 6) {
    const auto d = random_dataset(g, 3, 2);
    if (check_garp(d).passes) continue;
    ++checked;
    const int pts = 5;
    auto feasible = [&](double r) {
      int idx[6] = {0, 0, 0, 0, 0, 0};
      for (;;) {
        auto p = d;
        for (int c = 0; c < 6; ++c) p.responses.data()[c] += r * (2.0 * idx[c] / (pts - 1) - 1.0);
        if (check_garp(p).passes) return true;
        int c = 0;
        while (c < 6 && ++idx[c] == pts) idx[c++] = 0;
        if (c == 6) return false;
      }
    };
    const double grid = bisect_radius(feasible, 5.0);
    EXPECT_LE(perturbation_statistic(d).radius, grid + 1e-9);
  }
}

TEST(Statistic, OverflowAtRmax) {
  const ProbeResponseDataset d{Matrix{{2, 1}, {1, 2}}, Matrix{{2, 1}, {1, 2}}};
  const auto full = perturbation_statistic(d);
  ASSERT_GT(full.radius, 0.0);
  const auto capped = perturbation_statistic(d, 0.5 * full.radius);
  EXPECT_TRUE(capped.overflow);
  EXPECT_DOUBLE_EQ(capped.radius, 0.5 * full.radius);
}

TEST(Detect, NoiselessRationalDataIsAccepted) {
  std::mt19937_64 g(7);
  const auto radar = SyntheticRadar::make(UtilityKind::cobb_douglas, Vector{{0.3, 0.7}});
  const auto d = generate_radar_responses(radar, uniform_probes(g, 50, 2));
  const auto r = detect_noisy(d, 0.05, 0.05, 99, 1);
  EXPECT_EQ(r.statistic, 0.0);
  EXPECT_FALSE(r.reject);
  EXPECT_DOUBLE_EQ(r.p_value, 1.0);
}

TEST(Detect, SizeAndPower) {
  std::mt19937_64 g(8);
  const auto rational = SyntheticRadar::make(UtilityKind::cobb_douglas, Vector{{0.3, 0.7}});
  const auto noise = SyntheticRadar::make(UtilityKind::cobb_douglas, Vector{{0.3, 0.7}}, false);
  const int trials = 150;
  int false_alarms = 0, detections = 0;
  for (int t = 0; t < trials; ++t) {
    const Matrix probes = uniform_probes(g, 50, 2);
    const auto h0 = add_response_noise(generate_radar_responses(rational, probes), 0.05, 2 * t);
    const auto h1 = add_response_noise(generate_radar_responses(noise, probes, t), 0.05, 2 * t + 1);
    false_alarms += detect_noisy(h0, 0.05, 0.05, 99, 1000 + t).reject;
    detections += detect_noisy(h1, 0.05, 0.05, 99, 5000 + t).reject;
  }
  EXPECT_LE(false_alarms, 0.1 * trials);
  EXPECT_GE(detections, 0.8 * trials);
}

TEST(Detect, Validation) {
  const ProbeResponseDataset d{Matrix{{1.0, 1.0}}, Matrix{{0.5, 0.5}}};
  EXPECT_THROW(detect_noisy(d, 0.0, 0.05, 99, 1), ConfigError);
  EXPECT_THROW(detect_noisy(d, 0.05, 1.0, 99, 1), ConfigError);
  EXPECT_THROW(detect_noisy(ProbeResponseDataset{Matrix{{0.0, 1.0}}, Matrix{{0.5, 0.5}}}, 0.05, 0.05, 99, 1),
               ConfigError);
}

TEST(Calibration, SerialMatchesParallelAndThresholdRank) {
  std::mt19937_64 g(9);
  const Matrix probes = uniform_probes(g, 30, 2);
  const auto radar = SyntheticRadar::make(UtilityKind::cobb_douglas, Vector{{0.5, 0.5}});
  const auto s = calibrate_threshold(probes, radar, 0.05, 0.1, 49, 3, Exec::serial);
  const auto p = calibrate_threshold(probes, radar, 0.05, 0.1, 49, 3, Exec::parallel);
  EXPECT_EQ(s.null_statistics, p.null_statistics);
  EXPECT_TRUE(std::is_sorted(s.null_statistics.begin(), s.null_statistics.end()));
  EXPECT_EQ(s.threshold, s.null_statistics[44]);  // ceil(0.9 * 50) = 45th
  EXPECT_TRUE(std::isinf(calibrate_threshold(probes, radar, 0.05, 0.01, 49, 3).threshold));
}

TEST(Spsa, ConvergesOnQuadratic) {
  const Vector target{{1.0, -2.0, 0.5}};
  auto f = [&](const Vector& x, std::uint64_t) { return (x - target).squaredNorm(); };
  const auto r = spsa_minimize(f, Vector::Zero(3), SpsaGains{}, 2000, 3);
  EXPECT_LT((r.x - target).cwiseAbs().maxCoeff(), 1e-2);
  EXPECT_EQ(r.trace.size(), 2001u);
  EXPECT_LT(r.trace.back(), r.trace.front());
}

TEST(Spsa, ZeroStepLeavesIterateFixed) {
  SpsaGains gains;
  gains.a = 0.0;
  auto f = [](const Vector& x, std::uint64_t) { return x.squaredNorm(); };
  const Vector x0{{0.3, 0.7}};
  const auto r = spsa_minimize(f, x0, gains, 50, 1);
  EXPECT_EQ(r.x, x0);
  for (double v : r.trace) EXPECT_EQ(v, r.trace.front());
}

TEST(Spsa, ConcurrentPairMatchesSequential) {
  auto f = [](const Vector& x, std::uint64_t seed) {
    return (x.array() - 0.5).square().sum() + 1e-3 * static_cast<double>(seed % 7);
  };
  const auto a = spsa_minimize(f, Vector::Ones(2), SpsaGains{}, 100, 4, 0.0, false);
  const auto b = spsa_minimize(f, Vector::Ones(2), SpsaGains{}, 100, 4, 0.0, true);
  EXPECT_EQ(a.x, b.x);
  EXPECT_EQ(a.trace, b.trace);
}

TEST(Spsa, ProjectionKeepsLowerBound) {
  auto f = [](const Vector& x, std::uint64_t) { return x.sum(); };
  const auto r = spsa_minimize(f, Vector::Ones(2), SpsaGains{}, 200, 2, 0.25);
  EXPECT_GE(r.x.minCoeff(), 0.25);
}

TEST(ProbeOptimization, TypeTwoErrorIsDeterministicProbability) {
  std::mt19937_64 g(10);
  const Matrix probes = uniform_probes(g, 20, 2);
  const auto radar = SyntheticRadar::make(UtilityKind::cobb_douglas, Vector{{0.5, 0.5}}, false);
  ProbeOptimizationOptions opts;
  opts.n_inner = 20;
  opts.n_calibration = 40;
  const double a = type_ii_error(probes, radar, 0.05, 0.05, 3, opts);
  EXPECT_GE(a, 0.0);
  EXPECT_LE(a, 1.0);
  EXPECT_EQ(a, type_ii_error(probes, radar, 0.05, 0.05, 3, opts));
}

TEST(ProbeOptimization, FlatObjectiveReturnsInitialProbes) {
  std::mt19937_64 g(11);
  const Matrix probes = uniform_probes(g, 100, 2);
  const auto radar = SyntheticRadar::make(UtilityKind::cobb_douglas, Vector{{0.5, 0.5}}, false);
  ProbeOptimizationOptions opts;
  opts.n_inner = 20;
  opts.n_calibration = 40;
  // Many spread probes and tiny noise: the uniform radar is caught every time.
  const auto r = optimize_probes_spsa(probes, radar, 1e-3, 0.05, 5, SpsaGains{}, 1, opts);
  EXPECT_TRUE(r.flat_objective);
  EXPECT_EQ(r.probes, probes);
}

}  // namespace

#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "invcog/exec.hpp"
#include "invcog/inverse_filter.hpp"

namespace invcog {

/// What we record about the adversary: our own states x_{0:N} and the noisy
/// actions a_{1:N}.
struct InverseData {
  std::vector<Vector> states;
  std::vector<Vector> actions;
};

/// Copy of `model` with C replaced by `theta` (row-major fill of C's shape).
LinearGaussianModel with_gain(const LinearGaussianModel& model, const Vector& theta);

/// log p(a_{1:N} | x_{0:N}, C = theta) from the inverse Kalman filter
/// innovations, constant -(N dim / 2) log 2 pi included.
double inverse_loglik(const Vector& theta, const InverseData& data, const LinearGaussianModel& model,
                      const ActionModel& action,
                      ProcessNoiseConvention conv = ProcessNoiseConvention::gain_r_gain);
double inverse_loglik(double theta, const InverseData& data, const LinearGaussianModel& model,
                      const ActionModel& action,
                      ProcessNoiseConvention conv = ProcessNoiseConvention::gain_r_gain);

/// Prediction-error log-likelihood log p(y_{1:N} | C = theta).
double classic_loglik(const Vector& theta, const std::vector<Vector>& observations,
                      const LinearGaussianModel& model);
double classic_loglik(double theta, const std::vector<Vector>& observations,
                      const LinearGaussianModel& model);

struct LikelihoodProfile {
  std::vector<double> grid;
  std::vector<double> loglik;
  double argmax = 0.0;
  double curvature_at_max = 0.0;
};

/// Evaluates `fn` on `points` equally spaced values in [lo, hi]. Curvature is
/// the negative second difference at the best interior grid point.
LikelihoodProfile likelihood_profile(const std::function<double(double)>& fn, double lo, double hi,
                                     int points);

struct MleOptions {
  int grid_points = 64;
  double tol = 1e-4;
  int max_sweeps = 50;  // coordinate-descent sweeps (multi-dimensional case)
};

struct MleResult {
  Vector theta_hat;
  double loglik = 0.0;
  LikelihoodProfile profile;  // along the first coordinate
  double curvature = 0.0;     // -d^2 L / d theta_0^2 at theta_hat (3-point)
  bool on_boundary = false;
};

/// Coarse grid scan then golden-section (scalar) or coordinate-wise
/// golden-section refinement. Deterministic.
MleResult mle(const std::function<double(const Vector&)>& loglik, const Vector& lo, const Vector& hi,
              const MleOptions& opts = {});

/// Negative 3-point second difference with step h = 1e-3 max(1, |theta|).
double observed_information(const std::function<double(double)>& loglik, double theta);

struct CrbReport {
  double theta_true = 0.0;
  int horizon = 0;
  int n_mc = 0;
  double classic_fisher = 0.0;
  double inverse_fisher = 0.0;
  double classic_bound = 0.0;
  double inverse_bound = 0.0;
  double classic_std_err = 0.0;
  double inverse_std_err = 0.0;
};

/// Simulates one engagement at gain theta and returns both data views.
struct EngagementData {
  Trajectory trajectory;
  InverseData inverse;
};
EngagementData simulate_engagement(const LinearGaussianModel& model, const ActionModel& action,
                                   double theta, int horizon, std::uint64_t seed);

/// Monte-Carlo expected Fisher information for a scalar gain, classic (from
/// y) and inverse (from x, a), on shared simulated engagements.
CrbReport crb(const LinearGaussianModel& model, const ActionModel& action, double theta_true,
              int horizon, int n_mc, std::uint64_t seed, Exec exec = Exec::parallel);

}  // namespace invcog

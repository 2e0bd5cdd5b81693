#include "invcog/identification.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "invcog/errors.hpp"
#include "invcog/rng.hpp"

namespace invcog {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;  // log(2 pi)

double gaussian_term(const Vector& innovation, const Matrix& cov) {
  const double logdet = spd_logdet(cov, "innovation covariance");
  const double quad = innovation.dot(cov.llt().solve(innovation));
  return -0.5 * (logdet + quad + innovation.size() * kLog2Pi);
}

}  // namespace

LinearGaussianModel with_gain(const LinearGaussianModel& model, const Vector& theta) {
  if (theta.size() != model.C.size())
    throw ConfigError("with_gain: theta must have one entry per element of C");
  LinearGaussianModel m = model;
  for (Eigen::Index i = 0; i < m.C.rows(); ++i)
    for (Eigen::Index j = 0; j < m.C.cols(); ++j) m.C(i, j) = theta(i * m.C.cols() + j);
  return m;
}

double inverse_loglik(const Vector& theta, const InverseData& data, const LinearGaussianModel& model,
                      const ActionModel& action, ProcessNoiseConvention conv) {
  const auto m = with_gain(model, theta);
  const auto run = run_inverse_kf(m, action, data.states, data.actions, conv);
  double ll = 0.0;
  for (std::size_t k = 1; k < run.size(); ++k) ll += gaussian_term(run[k].innovation, run[k].innov_cov);
  return ll;
}

double inverse_loglik(double theta, const InverseData& data, const LinearGaussianModel& model,
                      const ActionModel& action, ProcessNoiseConvention conv) {
  return inverse_loglik(Vector::Constant(1, theta), data, model, action, conv);
}

double classic_loglik(const Vector& theta, const std::vector<Vector>& observations,
                      const LinearGaussianModel& model) {
  const auto m = with_gain(model, theta);
  GaussianBelief b{m.prior_mean, m.prior_cov};
  double ll = 0.0;
  for (const auto& y : observations) {
    auto u = kalman_step(m, b, y);
    ll += gaussian_term(y - m.C * u.predicted_mean, u.innov_cov);
    b = std::move(u.belief);
  }
  return ll;
}

double classic_loglik(double theta, const std::vector<Vector>& observations,
                      const LinearGaussianModel& model) {
  return classic_loglik(Vector::Constant(1, theta), observations, model);
}

LikelihoodProfile likelihood_profile(const std::function<double(double)>& fn, double lo, double hi,
                                     int points) {
  if (!(hi > lo) || points < 3) throw ConfigError("likelihood_profile: need lo < hi and >= 3 points");
  LikelihoodProfile p;
  p.grid.resize(points);
  p.loglik.resize(points);
  const double step = (hi - lo) / (points - 1);
  for (int i = 0; i < points; ++i) {
    p.grid[i] = lo + step * i;
    p.loglik[i] = fn(p.grid[i]);
    if (!std::isfinite(p.loglik[i]))
      throw NumericalError("likelihood_profile: non-finite log-likelihood on the grid");
  }
  const auto best = std::max_element(p.loglik.begin(), p.loglik.end()) - p.loglik.begin();
  p.argmax = p.grid[best];
  const auto c = std::clamp<std::ptrdiff_t>(best, 1, points - 2);
  p.curvature_at_max = -(p.loglik[c + 1] - 2.0 * p.loglik[c] + p.loglik[c - 1]) / (step * step);
  return p;
}

namespace {

// Golden-section maximization on [a, b].
double golden_max(const std::function<double(double)>& f, double a, double b, double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return fc >= fd ? c : d;
}

}  // namespace

MleResult mle(const std::function<double(const Vector&)>& loglik, const Vector& lo, const Vector& hi,
              const MleOptions& opts) {
  const auto dim = lo.size();
  if (dim == 0 || hi.size() != dim || ((hi - lo).array() <= 0.0).any())
    throw ConfigError("mle: bounds must be a non-degenerate box");
  if (opts.grid_points < 3) throw ConfigError("mle: grid_points must be >= 3");

  Vector theta = 0.5 * (lo + hi);
  const Vector step = (hi - lo) / (opts.grid_points - 1);
  MleResult res;

  for (int sweep = 0; sweep < (dim == 1 ? 1 : opts.max_sweeps); ++sweep) {
    const Vector before = theta;
    for (Eigen::Index d = 0; d < dim; ++d) {
      auto along = [&](double v) {
        Vector t = theta;
        t(d) = v;
        return loglik(t);
      };
      double centre = theta(d);
      if (sweep == 0) {
        auto prof = likelihood_profile(along, lo(d), hi(d), opts.grid_points);
        if (d == 0) res.profile = prof;
        centre = prof.argmax;
      }
      const double a = std::max(lo(d), centre - step(d));
      const double b = std::min(hi(d), centre + step(d));
      theta(d) = golden_max(along, a, b, opts.tol);
    }
    if (dim == 1 || (theta - before).cwiseAbs().maxCoeff() < opts.tol) break;
  }

  res.theta_hat = theta;
  res.loglik = loglik(theta);
  for (Eigen::Index d = 0; d < dim; ++d)
    if (theta(d) - lo(d) < opts.tol || hi(d) - theta(d) < opts.tol) res.on_boundary = true;
  res.curvature = observed_information(
      [&](double v) {
        Vector t = theta;
        t(0) = v;
        return loglik(t);
      },
      theta(0));
  return res;
}

double observed_information(const std::function<double(double)>& loglik, double theta) {
  const double h = 1e-3 * std::max(1.0, std::abs(theta));
  return -(loglik(theta + h) - 2.0 * loglik(theta) + loglik(theta - h)) / (h * h);
}

EngagementData simulate_engagement(const LinearGaussianModel& model, const ActionModel& action,
                                   double theta, int horizon, std::uint64_t seed) {
  const auto m = with_gain(model, Vector::Constant(model.C.size(), theta));
  EngagementData d;
  d.trajectory = simulate(m, horizon, seed);
  auto adv = simulate_adversary(m, action, d.trajectory, seed);
  d.inverse.states = d.trajectory.states;
  d.inverse.actions = std::move(adv.actions);
  return d;
}

CrbReport crb(const LinearGaussianModel& model, const ActionModel& action, double theta_true,
              int horizon, int n_mc, std::uint64_t seed, Exec exec) {
  if (model.C.size() != 1) throw ConfigError("crb: scalar gain only");
  if (n_mc < 2) throw ConfigError("crb: n_mc must be >= 2");
  std::vector<double> classic(n_mc), inverse(n_mc);

  auto replicate = [&](int r) {
    const auto d = simulate_engagement(model, action, theta_true, horizon,
                                       splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(r))));
    classic[r] = observed_information(
        [&](double t) { return classic_loglik(t, d.trajectory.observations, model); }, theta_true);
    inverse[r] = observed_information(
        [&](double t) { return inverse_loglik(t, d.inverse, model, action); }, theta_true);
  };
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic)
    for (int r = 0; r < n_mc; ++r) replicate(r);
  } else {
    for (int r = 0; r < n_mc; ++r) replicate(r);
  }

  auto summarize = [n_mc](const std::vector<double>& v, double& fisher, double& bound, double& se) {
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= n_mc;
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    var /= (n_mc - 1);
    if (!(mean > 0.0))
      throw NumericalError("crb: estimated Fisher information is not positive; increase n_mc or N");
    fisher = mean;
    bound = 1.0 / mean;
    se = std::sqrt(var / n_mc) / (mean * mean);  // delta method
  };

  CrbReport rep;
  rep.theta_true = theta_true;
  rep.horizon = horizon;
  rep.n_mc = n_mc;
  summarize(classic, rep.classic_fisher, rep.classic_bound, rep.classic_std_err);
  summarize(inverse, rep.inverse_fisher, rep.inverse_bound, rep.inverse_std_err);
  return rep;
}

}  // namespace invcog

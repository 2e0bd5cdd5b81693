#include "invcog/particle_inverse_filter.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "invcog/errors.hpp"
#include "invcog/rng.hpp"

namespace invcog {

namespace {

std::vector<int> systematic_resample(const std::vector<double>& weights, double u0) {
  const int n = static_cast<int>(weights.size());
  std::vector<int> idx(n);
  double cum = weights[0];
  int j = 0;
  for (int i = 0; i < n; ++i) {
    const double u = (u0 + i) / n;
    while (u > cum && j < n - 1) cum += weights[++j];
    idx[i] = j;
  }
  return idx;
}

}  // namespace

std::vector<ParticleEstimate> particle_inverse_filter(const LinearGaussianModel& model,
                                                      const ActionModel& action,
                                                      const std::vector<Vector>& states,
                                                      const std::vector<Vector>& actions,
                                                      int n_particles, std::uint64_t seed,
                                                      Exec exec) {
  model.validate();
  action.validate();
  if (n_particles < 100) throw ConfigError("particle_inverse_filter: need at least 100 particles");
  if (states.size() != actions.size() + 1)
    throw ConfigError("particle_inverse_filter: need |states| = |actions| + 1");

  const int horizon = static_cast<int>(actions.size());
  const auto track = covariance_track(model, horizon);
  const auto nx = model.state_dim();
  const auto ny = model.obs_dim();
  const Matrix r_factor = psd_factor(model.R);
  const bool exact = action.noise_var == 0.0;

  std::vector<Vector> particles(n_particles, model.prior_mean);
  std::vector<double> logw(n_particles, 0.0);
  std::vector<double> w(n_particles);
  std::vector<ParticleEstimate> out;
  out.reserve(horizon);

  for (int k = 1; k <= horizon; ++k) {
    const Matrix& gain = track.gain[k];
    const Matrix transition = (Matrix::Identity(nx, nx) - gain * model.C) * model.A;
    const Matrix phi = action.apply_phi(track.filtered[k]);
    const Vector mean_obs = model.C * states[k];
    const Vector& a = actions[k - 1];

    auto propagate = [&](int i) {
      SplitMix eng = keyed_stream(seed, static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(i));
      const Vector y = mean_obs + r_factor * standard_normal(eng, ny);
      particles[i] = transition * particles[i] + gain * y;
      const double sq = (a - phi * particles[i]).squaredNorm();
      logw[i] += exact ? -sq : -0.5 * sq / action.noise_var;
    };
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
      for (int i = 0; i < n_particles; ++i) propagate(i);
    } else {
      for (int i = 0; i < n_particles; ++i) propagate(i);
    }

    const double top = *std::max_element(logw.begin(), logw.end());
    double total = 0.0;
    if (exact) {
      // Limit sigma -> 0: only the best-matching particles keep weight.
      const double tie = 1e-12 * std::max(1.0, std::abs(top));
      for (int i = 0; i < n_particles; ++i) {
        w[i] = logw[i] >= top - tie ? 1.0 : 0.0;
        total += w[i];
      }
    } else {
      for (int i = 0; i < n_particles; ++i) {
        w[i] = std::exp(logw[i] - top);
        total += w[i];
      }
    }
    double sum_sq = 0.0;
    for (int i = 0; i < n_particles; ++i) {
      w[i] /= total;
      sum_sq += w[i] * w[i];
    }

    ParticleEstimate est;
    est.ess = 1.0 / sum_sq;
    if (!exact && est.ess < 2.0) {
      std::ostringstream os;
      os << "particle_inverse_filter: weight collapse at step " << k << " (ESS " << est.ess << ")";
      throw DegeneracyError(os.str());
    }
    est.mean = Vector::Zero(nx);
    for (int i = 0; i < n_particles; ++i) est.mean += w[i] * particles[i];
    est.cov = Matrix::Zero(nx, nx);
    for (int i = 0; i < n_particles; ++i) {
      const Vector d = particles[i] - est.mean;
      est.cov += w[i] * d * d.transpose();
    }

    if (exact || est.ess < 0.5 * n_particles) {
      SplitMix eng = keyed_stream(seed, static_cast<std::uint64_t>(k), ~std::uint64_t{0});
      const double u0 = std::uniform_real_distribution<double>(0.0, 1.0)(eng);
      const auto idx = systematic_resample(w, u0);
      std::vector<Vector> next(n_particles);
      for (int i = 0; i < n_particles; ++i) next[i] = particles[idx[i]];
      particles = std::move(next);
      std::fill(logw.begin(), logw.end(), 0.0);
      est.resampled = true;
    } else {
      for (int i = 0; i < n_particles; ++i) logw[i] = std::log(w[i]);
    }
    out.push_back(std::move(est));
  }
  return out;
}

}  // namespace invcog

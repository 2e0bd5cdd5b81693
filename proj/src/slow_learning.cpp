#include "invcog/slow_learning.hpp"

#include <cmath>
#include <string>

#include "invcog/errors.hpp"
#include "invcog/rng.hpp"

namespace invcog {

void CascadeConfig::validate() const {
  if (!(obs_var > 0.0)) throw ConfigError("cascade: obs_var must be > 0");
  if (!(action_noise_var >= 0.0)) throw ConfigError("cascade: action_noise_var must be >= 0");
  if (!(prior_var > 0.0)) throw ConfigError("cascade: prior_var must be > 0");
  if (horizon < 1 || n_mc < 1) throw ConfigError("cascade: horizon and n_mc must be >= 1");
}

CascadeResult run_cascade(const CascadeConfig& cfg, Exec exec) {
  cfg.validate();
  const int K = cfg.horizon;
  const double rho = 1.0 / cfg.obs_var;  // private precision of y_k

  // Precisions are data independent: tau_k is filter 2's precision after step k.
  std::vector<double> tau(K + 1);
  tau[0] = 1.0 / cfg.prior_var;
  for (int k = 1; k <= K; ++k) {
    const double scale = (tau[k - 1] + rho) / rho;
    tau[k] = tau[k - 1] + 1.0 / (cfg.obs_var + cfg.action_noise_var * scale * scale);
  }

  std::vector<double> sq_err(static_cast<std::size_t>(cfg.n_mc) * K);
  const double sd_v = std::sqrt(cfg.obs_var);
  const double sd_e = std::sqrt(cfg.action_noise_var);
  const double sd_x = std::sqrt(cfg.prior_var);

  auto replicate = [&](int r) {
    Rng rng = substream(cfg.seed, static_cast<std::uint64_t>(r));
    std::normal_distribution<double> nd(0.0, 1.0);
    const double x0 = sd_x * nd(rng);
    double est2 = 0.0;  // filter 2 estimate, starts at the prior mean
    double* out = &sq_err[static_cast<std::size_t>(r) * K];
    for (int k = 1; k <= K; ++k) {
      const double t = tau[k - 1];
      const double y = x0 + sd_v * nd(rng);
      const double est1 = (t * est2 + rho * y) / (t + rho);
      const double a = est1 + sd_e * nd(rng);
      // a is informationally equivalent to z = y + eps (t + rho) / rho.
      const double z = (a * (t + rho) - t * est2) / rho;
      const double scale = (t + rho) / rho;
      const double r_z = cfg.obs_var + cfg.action_noise_var * scale * scale;
      est2 = (t * est2 + z / r_z) / tau[k];
      out[k - 1] = (est2 - x0) * (est2 - x0);
    }
  };
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (int r = 0; r < cfg.n_mc; ++r) replicate(r);
  } else {
    for (int r = 0; r < cfg.n_mc; ++r) replicate(r);
  }

  CascadeResult res;
  res.mse.assign(K, 0.0);
  res.reported_var.resize(K);
  for (int r = 0; r < cfg.n_mc; ++r)
    for (int k = 0; k < K; ++k) res.mse[k] += sq_err[static_cast<std::size_t>(r) * K + k];
  for (int k = 0; k < K; ++k) {
    res.mse[k] /= cfg.n_mc;
    res.reported_var[k] = 1.0 / tau[k + 1];
  }
  return res;
}

RateFit fit_rate(const std::vector<double>& cov_seq, int k_min, int k_max) {
  if (k_min < 10 || k_max <= k_min || k_max > static_cast<int>(cov_seq.size()))
    throw ConfigError("fit_rate: invalid fit range");
  const int n = k_max - k_min + 1;
  double sx = 0.0, sy = 0.0;
  for (int k = k_min; k <= k_max; ++k) {
    const double v = cov_seq[k - 1];
    if (!(v > 0.0))
      throw DataError("fit_rate: nonpositive covariance at k = " + std::to_string(k));
    sx += std::log(static_cast<double>(k));
    sy += std::log(v);
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0;
  for (int k = k_min; k <= k_max; ++k) {
    const double dx = std::log(static_cast<double>(k)) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(cov_seq[k - 1]) - my);
  }
  RateFit fit;
  fit.exponent = sxy / sxx;
  fit.k_min = k_min;
  fit.k_max = k_max;
  double rss = 0.0;
  for (int k = k_min; k <= k_max; ++k) {
    const double pred = my + fit.exponent * (std::log(static_cast<double>(k)) - mx);
    const double e = std::log(cov_seq[k - 1]) - pred;
    rss += e * e;
  }
  fit.stderr_ = n > 2 ? std::sqrt(rss / (n - 2) / sxx) : 0.0;
  return fit;
}

GameVariant parse_game_variant(const std::string& s) {
  if (s == "alternating") return GameVariant::alternating;
  if (s == "effective_only") return GameVariant::effective_only;
  throw ConfigError("unknown game variant '" + s + "' (expected alternating, effective_only)");
}

AdversaryPrior parse_adversary_prior(const std::string& s) {
  if (s == "ours") return AdversaryPrior::ours;
  if (s == "own") return AdversaryPrior::own;
  throw ConfigError("unknown adversary_prior '" + s + "' (expected ours, own)");
}

void GameConfig::validate() const {
  if (!(obs_var > 0.0)) throw ConfigError("game: obs_var must be > 0");
  if (!(action_noise_var >= 0.0)) throw ConfigError("game: action_noise_var must be >= 0");
  if (!(prior_var > 0.0)) throw ConfigError("game: prior_var must be > 0");
  if (horizon < 1 || n_mc < 1) throw ConfigError("game: horizon and n_mc must be >= 1");
}

namespace {

bool adversary_acts(const GameConfig& cfg, int k) {
  return cfg.variant == GameVariant::effective_only || (k % 2 == 1);
}

}  // namespace

GameResult run_localization_game(const GameConfig& cfg, Exec exec) {
  cfg.validate();
  const int K = cfg.horizon;
  const double s2 = cfg.action_noise_var;

  // The conditioning covariance and the gains are data independent.
  // z_k = x_0 + v_k + eps_k / psi + lag * (1 - psi) / psi * eps_{k-1}; every
  // noise term in z_k is absent from all our other observations, so exact
  // joint conditioning reduces to a sequential scalar update with this
  // variance.
  GameResult res;
  res.covariance.resize(K);
  res.gain.assign(K, 0.0);
  std::vector<double> noise_var(K);
  double sigma = cfg.prior_var;
  double adv_var = cfg.prior_var;
  for (int k = 1; k <= K; ++k) {
    double r;
    if (adversary_acts(cfg, k)) {
      const double prior = cfg.adversary_prior == AdversaryPrior::ours ? sigma : adv_var;
      const double psi = prior / (prior + cfg.obs_var);
      if (!(psi > 0.0))
        throw ProtocolError("game: adversary gain is zero at step " + std::to_string(k));
      res.gain[k - 1] = psi;
      const double lag = cfg.lag_noise ? (1.0 - psi) / psi : 0.0;
      r = cfg.obs_var + s2 / (psi * psi) + lag * lag * s2;
      if (!std::isfinite(r))
        throw ProtocolError("game: effective observation noise overflows at step " + std::to_string(k));
      adv_var = psi * cfg.obs_var;
    } else {
      r = cfg.obs_var;
    }
    noise_var[k - 1] = r;
    sigma = sigma * r / (sigma + r);
    res.covariance[k - 1] = sigma;
  }

  std::vector<double> sq_err(static_cast<std::size_t>(cfg.n_mc) * K);
  const double sd_v = std::sqrt(cfg.obs_var);
  const double sd_e = std::sqrt(s2);
  const double sd_x = std::sqrt(cfg.prior_var);

  auto replicate = [&](int rep) {
    Rng rng = substream(cfg.seed, static_cast<std::uint64_t>(rep));
    std::normal_distribution<double> nd(0.0, 1.0);
    const double x0 = sd_x * nd(rng);
    double mean = 0.0;  // our estimate; u_{k-1} = mean before step k
    double var = cfg.prior_var;
    double* out = &sq_err[static_cast<std::size_t>(rep) * K];
    for (int k = 1; k <= K; ++k) {
      double obs;
      if (adversary_acts(cfg, k)) {
        const double psi = res.gain[k - 1];
        const double u_prev = mean;
        const double seen = cfg.lag_noise ? u_prev + sd_e * nd(rng) : u_prev;  // a_{k-1}
        const double y = x0 + sd_v * nd(rng);
        const double adv_est = (1.0 - psi) * seen + psi * y;
        const double a = adv_est + sd_e * nd(rng);
        obs = a / psi - (1.0 - psi) / psi * u_prev;  // z_k
      } else {
        obs = x0 + sd_v * nd(rng);
      }
      const double r = noise_var[k - 1];
      const double g = var / (var + r);
      mean += g * (obs - mean);
      var = res.covariance[k - 1];
      out[k - 1] = (mean - x0) * (mean - x0);
    }
  };
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (int rep = 0; rep < cfg.n_mc; ++rep) replicate(rep);
  } else {
    for (int rep = 0; rep < cfg.n_mc; ++rep) replicate(rep);
  }

  res.mse.assign(K, 0.0);
  for (int rep = 0; rep < cfg.n_mc; ++rep)
    for (int k = 0; k < K; ++k) res.mse[k] += sq_err[static_cast<std::size_t>(rep) * K + k];
  for (auto& m : res.mse) m /= cfg.n_mc;
  return res;
}

}  // namespace invcog

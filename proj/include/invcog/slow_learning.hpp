#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "invcog/exec.hpp"

namespace invcog {

/// Two scalar Kalman filters in a feedback loop estimating a static x_0.
/// Filter 1 fuses y_k = x_0 + v_k with the fed-back estimate of filter 2;
/// filter 2 sees a_k = xhat_k + eps_k.
struct CascadeConfig {
  double obs_var = 1.0;           // var(v_k)
  double action_noise_var = 0.0;  // var(eps_k)
  double prior_var = 1.0;         // var(x_0)
  int horizon = 10000;
  int n_mc = 500;
  std::uint64_t seed = 0;

  void validate() const;
};

struct CascadeResult {
  std::vector<double> mse;           // empirical E(xhathat_k - x_0)^2, entry k-1 for step k
  std::vector<double> reported_var;  // filter 2's own posterior variance
};

CascadeResult run_cascade(const CascadeConfig& config, Exec exec = Exec::parallel);

struct RateFit {
  double exponent = 0.0;
  double stderr_ = 0.0;
  int k_min = 0;
  int k_max = 0;
};

/// OLS slope of log cov_seq[k-1] on log k over k in [k_min, k_max].
RateFit fit_rate(const std::vector<double>& cov_seq, int k_min, int k_max);

enum class GameVariant {
  alternating,     // adversary acts on odd steps, we measure directly on even steps
  effective_only,  // only the effective observation z_k, every step
};

/// Whose posterior variance the adversary uses as the prior variance of the
/// fed-back estimate when computing its gain psi_k.
enum class AdversaryPrior { ours, own };

GameVariant parse_game_variant(const std::string& s);
AdversaryPrior parse_adversary_prior(const std::string& s);

struct GameConfig {
  double obs_var = 1.0;
  double action_noise_var = 0.25;
  double prior_var = 1.0;
  int horizon = 2000;
  int n_mc = 500;
  std::uint64_t seed = 0;
  GameVariant variant = GameVariant::alternating;
  bool lag_noise = true;  // include eps_{k-1} (adversary's view of our action)
  AdversaryPrior adversary_prior = AdversaryPrior::ours;

  void validate() const;
};

struct GameResult {
  std::vector<double> covariance;  // our posterior variance of x_0, entry k-1 for step k
  std::vector<double> mse;         // empirical MSE over replicates
  std::vector<double> gain;        // adversary gain psi_k (0 on steps it does not act)
};

/// Sequential localization game; our posterior is exact Gaussian conditioning
/// on all direct measurements and effective observations z_k.
GameResult run_localization_game(const GameConfig& config, Exec exec = Exec::parallel);

}  // namespace invcog

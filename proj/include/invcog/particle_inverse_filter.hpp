#pragma once

#include <cstdint>
#include <vector>

#include "invcog/exec.hpp"
#include "invcog/inverse_filter.hpp"

namespace invcog {

struct ParticleEstimate {
  Vector mean;  // posterior mean of the adversary's estimate
  Matrix cov;
  double ess = 0.0;  // effective sample size before resampling
  bool resampled = false;
};

/// Sequential Monte Carlo over the adversary's belief. Each particle samples
/// y_k ~ p(y | x_k), pushes its belief through the adversary's Kalman update
/// and is weighted by p(a_k | belief). Systematic resampling when
/// ESS < n/2. With zero action noise the weights take their limiting form:
/// all mass on the particles whose predicted action is closest to a_k.
/// Returns estimates for k = 1..N.
std::vector<ParticleEstimate> particle_inverse_filter(const LinearGaussianModel& model,
                                                      const ActionModel& action,
                                                      const std::vector<Vector>& states,
                                                      const std::vector<Vector>& actions,
                                                      int n_particles, std::uint64_t seed,
                                                      Exec exec = Exec::parallel);

}  // namespace invcog

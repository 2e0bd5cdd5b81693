#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "invcog/state_space.hpp"

namespace invcog {

/// Map from the adversary's covariance to the gain applied to its estimate.
enum class PhiKind { identity, covariance, inverse_covariance };

PhiKind parse_phi(const std::string& name);
std::string to_string(PhiKind phi);

/// a_k = phi(Sigma_k) xhat_k + eps_k,  eps_k ~ N(0, noise_var I).
struct ActionModel {
  PhiKind phi = PhiKind::identity;
  double noise_var = 0.0;

  Matrix apply_phi(const Matrix& sigma) const;
  void validate() const;
};

/// Which covariance drives the inverse filter's process noise. The noise
/// term in the adversary's estimate recursion is psi v with cov(v) = R, so
/// `gain_r_gain` (psi R psi') is the consistent choice; `gain_gain`
/// (psi psi') reproduces the literal formula and agrees when R = I.
enum class ProcessNoiseConvention { gain_r_gain, gain_gain };

/// Parameters of the transition k -> k+1 of the system whose hidden state is
/// the adversary's estimate:
///   xhat_{k+1} = transition xhat_k + input x_{k+1} + noise(process_cov)
///   a_{k+1}    = observation xhat_{k+1} + noise(action_cov)
struct InverseKFParams {
  Matrix transition;   // (I - psi_{k+1} C) A
  Matrix input;        // psi_{k+1} C
  Matrix observation;  // phi(Sigma_{k+1})
  Matrix process_cov;  // psi_{k+1} R psi_{k+1}'
  Matrix action_cov;   // sigma_eps^2 I
};

/// `track` is the adversary's covariance recursion; `k` in [0, track.horizon()).
InverseKFParams inverse_kf_params(const LinearGaussianModel& model, const ActionModel& action,
                                  const CovarianceTrack& track, int k,
                                  ProcessNoiseConvention conv = ProcessNoiseConvention::gain_r_gain);

struct InverseKFState {
  Vector est_mean;        // our estimate of the adversary's estimate
  Matrix est_cov;         // its covariance
  Matrix adversary_cov;   // Sigma_k (replayed)
  Matrix adversary_gain;  // psi_k (empty at k = 0)
  // Innovation a_k - predicted action and its covariance from the step that
  // produced this state (empty at k = 0).
  Vector innovation;
  Matrix innov_cov;
};

/// We know the adversary's prior, so its initial estimate is known exactly.
InverseKFState initial_inverse_state(const LinearGaussianModel& model);

InverseKFState inverse_kf_step(const InverseKFState& state, const Vector& a_next,
                               const Vector& x_next, const InverseKFParams& params,
                               const Matrix& next_adversary_cov, const Matrix& next_adversary_gain);

/// Runs the inverse filter over x_{0:N} (states[0..N]) and a_{1:N}
/// (actions[k-1] = a_k). Returns states for k = 0..N.
std::vector<InverseKFState> run_inverse_kf(
    const LinearGaussianModel& model, const ActionModel& action, const std::vector<Vector>& states,
    const std::vector<Vector>& actions,
    ProcessNoiseConvention conv = ProcessNoiseConvention::gain_r_gain);

/// The adversary's side of a simulated engagement.
struct AdversaryRecord {
  std::vector<Vector> estimates;  // xhat_0 .. xhat_N
  std::vector<Vector> actions;    // a_1 .. a_N (noisy, as we measure them)
};

AdversaryRecord simulate_adversary(const LinearGaussianModel& model, const ActionModel& action,
                                   const Trajectory& traj, std::uint64_t seed);

}  // namespace invcog

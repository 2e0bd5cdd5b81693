#include "invcog/inverse_filter.hpp"

#include "invcog/errors.hpp"
#include "invcog/rng.hpp"

namespace invcog {

PhiKind parse_phi(const std::string& name) {
  if (name == "identity") return PhiKind::identity;
  if (name == "covariance") return PhiKind::covariance;
  if (name == "inverse_covariance") return PhiKind::inverse_covariance;
  throw ConfigError("unknown phi '" + name +
                    "' (expected identity, covariance, inverse_covariance)");
}

std::string to_string(PhiKind phi) {
  switch (phi) {
    case PhiKind::identity: return "identity";
    case PhiKind::covariance: return "covariance";
    case PhiKind::inverse_covariance: return "inverse_covariance";
  }
  return "?";
}

Matrix ActionModel::apply_phi(const Matrix& sigma) const {
  switch (phi) {
    case PhiKind::identity: return Matrix::Identity(sigma.rows(), sigma.cols());
    case PhiKind::covariance: return sigma;
    case PhiKind::inverse_covariance: return spd_inverse(sigma, "adversary covariance");
  }
  return sigma;
}

void ActionModel::validate() const {
  if (!(noise_var >= 0.0)) throw ConfigError("ActionModel: action noise variance must be >= 0");
}

InverseKFParams inverse_kf_params(const LinearGaussianModel& model, const ActionModel& action,
                                  const CovarianceTrack& track, int k,
                                  ProcessNoiseConvention conv) {
  if (k < 0 || k >= track.horizon())
    throw ConfigError("inverse_kf_params: step index out of range");
  const auto n = model.state_dim();
  const Matrix& psi = track.gain[k + 1];
  InverseKFParams p;
  p.transition = (Matrix::Identity(n, n) - psi * model.C) * model.A;
  p.input = psi * model.C;
  p.observation = action.apply_phi(track.filtered[k + 1]);
  p.process_cov = conv == ProcessNoiseConvention::gain_r_gain
                      ? symmetrize(psi * model.R * psi.transpose())
                      : symmetrize(psi * psi.transpose());
  p.action_cov = action.noise_var * Matrix::Identity(p.observation.rows(), p.observation.rows());
  return p;
}

InverseKFState initial_inverse_state(const LinearGaussianModel& model) {
  InverseKFState s;
  s.est_mean = model.prior_mean;
  s.est_cov = Matrix::Zero(model.state_dim(), model.state_dim());
  s.adversary_cov = model.prior_cov;
  return s;
}

InverseKFState inverse_kf_step(const InverseKFState& state, const Vector& a_next,
                               const Vector& x_next, const InverseKFParams& p,
                               const Matrix& next_adversary_cov,
                               const Matrix& next_adversary_gain) {
  const Vector pred_mean = p.transition * state.est_mean + p.input * x_next;
  const Matrix pred_cov =
      symmetrize(p.transition * state.est_cov * p.transition.transpose() + p.process_cov);
  InverseKFState out;
  out.innov_cov = symmetrize(p.observation * pred_cov * p.observation.transpose() + p.action_cov);
  const Matrix gain =
      pred_cov * p.observation.transpose() * spd_inverse(out.innov_cov, "inverse innovation covariance");
  out.innovation = a_next - p.observation * pred_mean;
  out.est_mean = pred_mean + gain * out.innovation;
  const auto n = pred_cov.rows();
  const Matrix i_kc = Matrix::Identity(n, n) - gain * p.observation;
  out.est_cov = symmetrize(i_kc * pred_cov * i_kc.transpose() +
                           gain * p.action_cov * gain.transpose());
  out.adversary_cov = next_adversary_cov;
  out.adversary_gain = next_adversary_gain;
  return out;
}

std::vector<InverseKFState> run_inverse_kf(const LinearGaussianModel& model,
                                           const ActionModel& action,
                                           const std::vector<Vector>& states,
                                           const std::vector<Vector>& actions,
                                           ProcessNoiseConvention conv) {
  if (states.size() != actions.size() + 1)
    throw ConfigError("run_inverse_kf: need |states| = |actions| + 1");
  const int horizon = static_cast<int>(actions.size());
  const auto track = covariance_track(model, horizon);
  std::vector<InverseKFState> out;
  out.reserve(horizon + 1);
  out.push_back(initial_inverse_state(model));
  for (int k = 0; k < horizon; ++k) {
    const auto params = inverse_kf_params(model, action, track, k, conv);
    out.push_back(inverse_kf_step(out.back(), actions[k], states[k + 1], params,
                                  track.filtered[k + 1], track.gain[k + 1]));
  }
  return out;
}

AdversaryRecord simulate_adversary(const LinearGaussianModel& model, const ActionModel& action,
                                   const Trajectory& traj, std::uint64_t seed) {
  action.validate();
  const auto beliefs = run_kalman(model, traj.observations);
  Rng rng = make_rng(seed ^ 0xa5a5a5a5ULL);
  const double sd = std::sqrt(action.noise_var);
  AdversaryRecord rec;
  rec.estimates.reserve(beliefs.size());
  for (const auto& b : beliefs) rec.estimates.push_back(b.mean);
  for (std::size_t k = 1; k < beliefs.size(); ++k) {
    const Vector clean = action.apply_phi(beliefs[k].cov) * beliefs[k].mean;
    rec.actions.push_back(clean + sd * standard_normal(rng, clean.size()));
  }
  return rec;
}

}  // namespace invcog

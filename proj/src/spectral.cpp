#include "invcog/spectral.hpp"

#include "invcog/errors.hpp"

namespace invcog {

SpectralPair spectral_extract(const Matrix& Q, const Matrix& R) {
  if (Q.rows() != Q.cols() || R.rows() != R.cols()) throw ConfigError("spectral_extract: non-square input");
  Eigen::SelfAdjointEigenSolver<Matrix> qs(symmetrize(Q), Eigen::EigenvaluesOnly);
  Eigen::SelfAdjointEigenSolver<Matrix> rs(symmetrize(R), Eigen::EigenvaluesOnly);
  const Vector qev = qs.eigenvalues();  // ascending
  const Vector rev = rs.eigenvalues();
  if (qev.size() && qev(0) < -1e-12 * std::max(1.0, qev.cwiseAbs().maxCoeff()))
    throw ConfigError("spectral_extract: Q is not positive semidefinite");
  if (!(rev.size() && rev(0) > 0.0) || rev(rev.size() - 1) / rev(0) > 1e15)
    throw NumericalError("spectral_extract: R is singular");
  SpectralPair out;
  out.alpha = qev.reverse();
  out.beta = rev.cwiseInverse();  // reciprocals of ascending eigenvalues are descending
  return out;
}

Matrix probe_covariance(const Vector& alpha) { return alpha.asDiagonal(); }

Matrix response_covariance(const Vector& beta) {
  Vector var(beta.size());
  for (Eigen::Index i = 0; i < beta.size(); ++i)
    var(i) = beta(i) > 0.0 ? std::min(1.0 / beta(i), kNoResourceVariance) : kNoResourceVariance;
  return var.asDiagonal();
}

Matrix are_for_budget(const LinearGaussianModel& model, const Vector& alpha, const Vector& beta) {
  if (alpha.size() != model.state_dim() || beta.size() != model.obs_dim())
    throw ConfigError("are_for_budget: alpha/beta dimensions do not match the model");
  return solve_are(model, probe_covariance(alpha), response_covariance(beta));
}

Matrix budget_reference_covariance(const LinearGaussianModel& model, const Vector& alpha) {
  if (alpha.size() != model.obs_dim())
    throw ConfigError("budget_reference_covariance: needs one probe entry per response mode");
  return are_for_budget(model, alpha, alpha.cwiseInverse());
}

BudgetLinkReport budget_link_report(const LinearGaussianModel& model, const Vector& alpha,
                                    const Vector& beta, const Matrix& sigma_bar, double tol) {
  BudgetLinkReport rep;
  rep.sigma_star = are_for_budget(model, alpha, beta);
  const Matrix prec = spd_inverse(rep.sigma_star, "ARE solution");
  const double scale = std::max(1.0, prec.cwiseAbs().maxCoeff());
  if (alpha.size() == beta.size() && alpha.dot(beta) <= 1.0 + tol) {
    const Matrix gap = spd_inverse(sigma_bar, "reference covariance") - prec;
    rep.precision_bounded = min_eigenvalue(gap) >= -tol * scale;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> base(rep.sigma_star, Eigen::EigenvaluesOnly);
  for (Eigen::Index i = 0; i < beta.size(); ++i) {
    Vector more = beta;
    more(i) += std::max(0.1 * beta(i), 1e-3);
    Eigen::SelfAdjointEigenSolver<Matrix> bumped(are_for_budget(model, alpha, more),
                                                 Eigen::EigenvaluesOnly);
    const double cov_scale = std::max(1.0, base.eigenvalues().cwiseAbs().maxCoeff());
    if (((bumped.eigenvalues() - base.eigenvalues()).array() > tol * cov_scale).any())
      rep.monotone = false;
  }
  return rep;
}

bool verify_budget_link(const LinearGaussianModel& model, const Vector& alpha, const Vector& beta,
                        const Matrix& sigma_bar, double tol) {
  return budget_link_report(model, alpha, beta, sigma_bar, tol).ok();
}

}  // namespace invcog

#pragma once

#include "invcog/state_space.hpp"

namespace invcog {

struct SpectralPair {
  Vector alpha;  // eigenvalues of Q, descending
  Vector beta;   // eigenvalues of R^{-1}, descending
};

/// Probe = spectrum of the state-noise covariance, response = spectrum of the
/// radar's measurement precision.
SpectralPair spectral_extract(const Matrix& Q, const Matrix& R);

/// Precision used for a zero resource entry (R = 1/beta would be infinite).
inline constexpr double kNoResourceVariance = 1e12;

/// Q(alpha) = diag(alpha), R(beta) = diag(1/beta).
Matrix probe_covariance(const Vector& alpha);
Matrix response_covariance(const Vector& beta);

/// ARE solution for the diagonal probe/response realization.
Matrix are_for_budget(const LinearGaussianModel& model, const Vector& alpha, const Vector& beta);

/// Reference covariance Sigma_bar for the budget alpha'beta <= 1: the ARE
/// solution with beta_i = 1/alpha_i for every i. Every budget-feasible beta
/// is elementwise below this point, so its precision bounds theirs.
Matrix budget_reference_covariance(const LinearGaussianModel& model, const Vector& alpha);

struct BudgetLinkReport {
  bool precision_bounded = true;  // Sigma*^{-1} <= Sigma_bar^{-1} (checked when alpha'beta <= 1)
  bool monotone = true;           // more resources never raise an eigenvalue of Sigma*
  Matrix sigma_star;
  bool ok() const { return precision_bounded && monotone; }
};

BudgetLinkReport budget_link_report(const LinearGaussianModel& model, const Vector& alpha,
                                    const Vector& beta, const Matrix& sigma_bar,
                                    double tol = 1e-9);

bool verify_budget_link(const LinearGaussianModel& model, const Vector& alpha, const Vector& beta,
                        const Matrix& sigma_bar, double tol = 1e-9);

}  // namespace invcog

#pragma once

#include <cstdint>
#include <vector>

#include "invcog/linalg.hpp"

namespace invcog {

/// x_{k+1} = A x_k + w_k,  y_k = C x_k + v_k,  w ~ N(0,Q), v ~ N(0,R),
/// x_0 ~ N(prior_mean, prior_cov).
struct LinearGaussianModel {
  Matrix A;
  Matrix C;
  Matrix Q;
  Matrix R;
  Vector prior_mean;
  Matrix prior_cov;

  Eigen::Index state_dim() const { return A.rows(); }
  Eigen::Index obs_dim() const { return C.rows(); }

  /// Throws ConfigError on inconsistent dimensions, asymmetric or indefinite
  /// covariances, or R not positive definite.
  void validate() const;

  static LinearGaussianModel scalar(double a, double c, double q, double r,
                                    double prior_mean = 0.0, double prior_var = 1.0);
};

struct GaussianBelief {
  Vector mean;
  Matrix cov;
};

struct Trajectory {
  std::vector<Vector> states;        // x_0 .. x_N
  std::vector<Vector> observations;  // y_1 .. y_N (observations[k-1] is y_k)
  std::uint64_t seed = 0;
};

/// Seeded simulation; identical (model, horizon, seed) gives identical output.
Trajectory simulate(const LinearGaussianModel& model, int horizon, std::uint64_t seed);

struct KalmanUpdate {
  GaussianBelief belief;
  Matrix gain;           // Sigma_{k+1|k} C' S^{-1}
  Matrix innov_cov;      // S_{k+1}
  Matrix predicted_cov;  // Sigma_{k+1|k}
  Vector predicted_mean;
};

/// One predict+update step of the covariance-form Kalman filter. The
/// covariance update uses the Joseph form and is symmetrized.
KalmanUpdate kalman_step(const LinearGaussianModel& model, const GaussianBelief& belief,
                         const Vector& y);

/// Same step in information form. Requires an invertible predicted covariance.
GaussianBelief information_step(const LinearGaussianModel& model, const GaussianBelief& belief,
                                const Vector& y);

/// Deterministic part of the Kalman recursion: covariances and gains do not
/// depend on the data. Index k runs 0..N for `filtered`, 1..N for the rest
/// (entry 0 of those vectors is left empty).
struct CovarianceTrack {
  std::vector<Matrix> filtered;   // Sigma_k
  std::vector<Matrix> predicted;  // Sigma_{k|k-1}
  std::vector<Matrix> gain;       // psi_k
  std::vector<Matrix> innov_cov;  // S_k
  int horizon() const { return static_cast<int>(filtered.size()) - 1; }
};

CovarianceTrack covariance_track(const LinearGaussianModel& model, int horizon);

/// Runs the full filter over y_{1:N}; returns beliefs pi_0..pi_N.
std::vector<GaussianBelief> run_kalman(const LinearGaussianModel& model,
                                       const std::vector<Vector>& observations);

struct AreOptions {
  double tol = 1e-10;
  int max_iter = 100000;
  double residual_tol = 1e-8;
  double structure_tol = 1e-8;
};

/// Riccati map residual  -S + A (S - S C'(C S C' + R)^{-1} C S) A' + Q.
Matrix riccati_residual(const Matrix& A, const Matrix& C, const Matrix& Q, const Matrix& R,
                        const Matrix& sigma);

/// PBH tests on the unstable modes of A (|lambda| >= 1 - tol).
bool is_detectable(const Matrix& A, const Matrix& C, double tol = 1e-8);
bool is_stabilizable(const Matrix& A, const Matrix& B, double tol = 1e-8);

/// Steady-state predicted covariance: the PSD fixed point of the Riccati map
/// with state noise `probe_Q` and observation noise `response_R`, by fixed
/// point iteration from Sigma = Q. Uses model.A and model.C only.
Matrix solve_are(const LinearGaussianModel& model, const Matrix& probe_Q, const Matrix& response_R,
                 const AreOptions& opts = {});

/// Filtered covariance Sigma - Sigma C'(C Sigma C' + R)^{-1} C Sigma that
/// corresponds to a predicted covariance Sigma.
Matrix filtered_from_predicted(const Matrix& C, const Matrix& R, const Matrix& predicted);

}  // namespace invcog

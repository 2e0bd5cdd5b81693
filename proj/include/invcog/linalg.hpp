#pragma once

#include <random>

#include <Eigen/Dense>

namespace invcog {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline Matrix symmetrize(const Matrix& m) { return 0.5 * (m + m.transpose()); }

/// Smallest eigenvalue of the symmetric part of `m`.
double min_eigenvalue(const Matrix& m);

/// Inverse of a symmetric positive definite matrix via Cholesky. Retries once
/// with 1e-12*I jitter, then throws NumericalError carrying a condition estimate.
Matrix spd_inverse(const Matrix& m, const char* what = "matrix");

/// log det of an SPD matrix (Cholesky, same jitter policy as spd_inverse).
double spd_logdet(const Matrix& m, const char* what = "matrix");

/// Ratio of extreme eigenvalue magnitudes of the symmetric part.
double condition_estimate(const Matrix& m);

/// Symmetric PSD square root factor L with L L' = m (eigen-decomposition,
/// negative eigenvalues clipped to 0). Works for singular covariances.
Matrix psd_factor(const Matrix& m);

/// Draws N(0, I_n).
template <class Engine>
Vector standard_normal(Engine& rng, Eigen::Index n) {
  std::normal_distribution<double> nd(0.0, 1.0);
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = nd(rng);
  return v;
}

}  // namespace invcog

#include "invcog/state_space.hpp"

#include <cmath>
#include <complex>
#include <sstream>

#include "invcog/errors.hpp"
#include "invcog/rng.hpp"

namespace invcog {

namespace {

constexpr double kPsdTol = 1e-9;

void require(bool ok, const std::string& msg) {
  if (!ok) throw ConfigError("LinearGaussianModel: " + msg);
}

void require_cov(const Matrix& m, Eigen::Index n, const char* name, bool strict) {
  require(m.rows() == n && m.cols() == n, std::string(name) + " has wrong shape");
  require(m.allFinite(), std::string(name) + " has non-finite entries");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  require((m - m.transpose()).cwiseAbs().maxCoeff() <= 1e-9 * scale,
          std::string(name) + " is not symmetric");
  const double lo = min_eigenvalue(m);
  if (strict) {
    require(lo > 0.0, std::string(name) + " is not positive definite");
  } else {
    require(lo >= -kPsdTol * scale, std::string(name) + " is not positive semidefinite");
  }
}

}  // namespace

void LinearGaussianModel::validate() const {
  const auto n = A.rows();
  require(n > 0 && A.cols() == n, "A must be square and non-empty");
  require(A.allFinite(), "A has non-finite entries");
  require(C.cols() == n && C.rows() > 0, "C must be Y x X");
  require(C.allFinite(), "C has non-finite entries");
  require_cov(Q, n, "Q", false);
  require_cov(R, C.rows(), "R", true);
  require(prior_mean.size() == n, "prior_mean has wrong length");
  require_cov(prior_cov, n, "prior_cov", false);
}

LinearGaussianModel LinearGaussianModel::scalar(double a, double c, double q, double r,
                                                double prior_mean, double prior_var) {
  LinearGaussianModel m;
  m.A = Matrix::Constant(1, 1, a);
  m.C = Matrix::Constant(1, 1, c);
  m.Q = Matrix::Constant(1, 1, q);
  m.R = Matrix::Constant(1, 1, r);
  m.prior_mean = Vector::Constant(1, prior_mean);
  m.prior_cov = Matrix::Constant(1, 1, prior_var);
  return m;
}

Trajectory simulate(const LinearGaussianModel& model, int horizon, std::uint64_t seed) {
  model.validate();
  if (horizon < 1) throw ConfigError("simulate: horizon must be >= 1");
  Rng rng = make_rng(seed);
  const Matrix prior_l = psd_factor(model.prior_cov);
  const Matrix q_l = psd_factor(model.Q);
  const Matrix r_l = psd_factor(model.R);
  const auto nx = model.state_dim();
  const auto ny = model.obs_dim();

  Trajectory traj;
  traj.seed = seed;
  traj.states.reserve(horizon + 1);
  traj.observations.reserve(horizon);
  traj.states.push_back(model.prior_mean + prior_l * standard_normal(rng, nx));
  for (int k = 0; k < horizon; ++k) {
    Vector next = model.A * traj.states.back() + q_l * standard_normal(rng, nx);
    traj.observations.push_back(model.C * next + r_l * standard_normal(rng, ny));
    traj.states.push_back(std::move(next));
  }
  return traj;
}

KalmanUpdate kalman_step(const LinearGaussianModel& model, const GaussianBelief& belief,
                         const Vector& y) {
  KalmanUpdate out;
  out.predicted_mean = model.A * belief.mean;
  out.predicted_cov = symmetrize(model.A * belief.cov * model.A.transpose() + model.Q);
  out.innov_cov = symmetrize(model.C * out.predicted_cov * model.C.transpose() + model.R);
  const Matrix s_inv = spd_inverse(out.innov_cov, "innovation covariance");
  out.gain = out.predicted_cov * model.C.transpose() * s_inv;

  out.belief.mean = out.predicted_mean + out.gain * (y - model.C * out.predicted_mean);
  // Joseph form
  const auto n = model.state_dim();
  const Matrix i_kc = Matrix::Identity(n, n) - out.gain * model.C;
  out.belief.cov = symmetrize(i_kc * out.predicted_cov * i_kc.transpose() +
                              out.gain * model.R * out.gain.transpose());
  return out;
}

GaussianBelief information_step(const LinearGaussianModel& model, const GaussianBelief& belief,
                                const Vector& y) {
  const Vector pred_mean = model.A * belief.mean;
  const Matrix pred_cov = symmetrize(model.A * belief.cov * model.A.transpose() + model.Q);
  const Matrix r_inv = spd_inverse(model.R, "R");
  const Matrix info =
      spd_inverse(pred_cov, "predicted covariance") + model.C.transpose() * r_inv * model.C;
  GaussianBelief out;
  out.cov = spd_inverse(info, "posterior information");
  const Matrix gain = out.cov * model.C.transpose() * r_inv;
  out.mean = pred_mean + gain * (y - model.C * pred_mean);
  return out;
}

CovarianceTrack covariance_track(const LinearGaussianModel& model, int horizon) {
  CovarianceTrack t;
  t.filtered.reserve(horizon + 1);
  t.predicted.resize(1);
  t.gain.resize(1);
  t.innov_cov.resize(1);
  t.filtered.push_back(model.prior_cov);
  GaussianBelief b{Vector::Zero(model.state_dim()), model.prior_cov};
  const Vector y0 = Vector::Zero(model.obs_dim());
  for (int k = 1; k <= horizon; ++k) {
    auto u = kalman_step(model, b, y0);
    b.cov = u.belief.cov;
    t.filtered.push_back(u.belief.cov);
    t.predicted.push_back(std::move(u.predicted_cov));
    t.gain.push_back(std::move(u.gain));
    t.innov_cov.push_back(std::move(u.innov_cov));
  }
  return t;
}

std::vector<GaussianBelief> run_kalman(const LinearGaussianModel& model,
                                       const std::vector<Vector>& observations) {
  std::vector<GaussianBelief> out;
  out.reserve(observations.size() + 1);
  out.push_back({model.prior_mean, model.prior_cov});
  for (const auto& y : observations) out.push_back(kalman_step(model, out.back(), y).belief);
  return out;
}

Matrix riccati_residual(const Matrix& A, const Matrix& C, const Matrix& Q, const Matrix& R,
                        const Matrix& sigma) {
  const Matrix s = symmetrize(C * sigma * C.transpose() + R);
  const Matrix inner = sigma - sigma * C.transpose() * s.llt().solve(C * sigma);
  return -sigma + A * inner * A.transpose() + Q;
}

namespace {

using CMatrix = Eigen::MatrixXcd;

// Rank of a complex matrix via SVD with relative threshold.
Eigen::Index complex_rank(const CMatrix& m, double tol) {
  Eigen::JacobiSVD<CMatrix> svd(m);
  const auto& sv = svd.singularValues();
  const double top = sv.size() ? sv(0) : 0.0;
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > tol * std::max(1.0, top)) ++r;
  return r;
}

}  // namespace

bool is_detectable(const Matrix& A, const Matrix& C, double tol) {
  const auto n = A.rows();
  Eigen::ComplexEigenSolver<CMatrix> es(A.cast<std::complex<double>>());
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto lambda = es.eigenvalues()(i);
    if (std::abs(lambda) < 1.0 - tol) continue;
    CMatrix pbh(n + C.rows(), n);
    pbh << A.cast<std::complex<double>>() - lambda * CMatrix::Identity(n, n),
        C.cast<std::complex<double>>();
    if (complex_rank(pbh, tol) < n) return false;
  }
  return true;
}

bool is_stabilizable(const Matrix& A, const Matrix& B, double tol) {
  return is_detectable(A.transpose(), B.transpose(), tol);
}

Matrix solve_are(const LinearGaussianModel& model, const Matrix& probe_Q, const Matrix& response_R,
                 const AreOptions& opts) {
  const Matrix& A = model.A;
  const Matrix& C = model.C;
  const auto n = A.rows();
  if (probe_Q.rows() != n || probe_Q.cols() != n || response_R.rows() != C.rows() ||
      response_R.cols() != C.rows())
    throw ConfigError("solve_are: Q/R dimensions do not match the model");
  if (!is_detectable(A, C, opts.structure_tol))
    throw NumericalError("solve_are: (A, C) is not detectable");
  if (!is_stabilizable(A, psd_factor(probe_Q), opts.structure_tol))
    throw NumericalError("solve_are: (A, Q^{1/2}) is not stabilizable");

  Matrix sigma = symmetrize(probe_Q);
  for (int it = 0; it < opts.max_iter; ++it) {
    const Matrix s = symmetrize(C * sigma * C.transpose() + response_R);
    const Matrix inner = sigma - sigma * C.transpose() * spd_inverse(s, "C S C' + R") * C * sigma;
    Matrix next = symmetrize(A * inner * A.transpose() + probe_Q);
    const double step = (next - sigma).cwiseAbs().maxCoeff();
    sigma = std::move(next);
    if (step < opts.tol) {
      const double res =
          riccati_residual(A, C, probe_Q, response_R, sigma).cwiseAbs().maxCoeff();
      if (res >= opts.residual_tol) {
        std::ostringstream os;
        os << "solve_are: iteration stalled with residual " << res;
        throw NumericalError(os.str());
      }
      return sigma;
    }
  }
  std::ostringstream os;
  os << "solve_are: no convergence after " << opts.max_iter << " iterations, residual "
     << riccati_residual(A, C, probe_Q, response_R, sigma).cwiseAbs().maxCoeff();
  throw NumericalError(os.str());
}

Matrix filtered_from_predicted(const Matrix& C, const Matrix& R, const Matrix& predicted) {
  const Matrix s = symmetrize(C * predicted * C.transpose() + R);
  return symmetrize(predicted - predicted * C.transpose() * spd_inverse(s, "C S C' + R") * C *
                                    predicted);
}

}  // namespace invcog

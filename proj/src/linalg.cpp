#include "invcog/linalg.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "invcog/errors.hpp"

namespace invcog {

double min_eigenvalue(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(m), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double condition_estimate(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(m), Eigen::EigenvaluesOnly);
  const Vector ev = es.eigenvalues().cwiseAbs();
  const double lo = ev.minCoeff();
  if (lo == 0.0) return std::numeric_limits<double>::infinity();
  return ev.maxCoeff() / lo;
}

namespace {

constexpr double kMaxCondition = 1e15;

[[noreturn]] void throw_singular(const Matrix& m, const char* what) {
  std::ostringstream os;
  os << what << " is numerically singular or indefinite (condition estimate "
     << condition_estimate(m) << ")";
  throw NumericalError(os.str());
}

// The Cholesky diagonal gives a cheap lower bound on the condition number;
// the eigenvalue check only runs when that bound looks suspicious.
Eigen::LLT<Matrix> robust_llt(const Matrix& m, const char* what) {
  Eigen::LLT<Matrix> llt(symmetrize(m));
  if (llt.info() == Eigen::Success) {
    const Vector d = llt.matrixLLT().diagonal();
    const double ratio = d.maxCoeff() / d.minCoeff();
    if (ratio * ratio < 1e12) return llt;
  }
  if (condition_estimate(m) > kMaxCondition) throw_singular(m, what);
  if (llt.info() == Eigen::Success) return llt;
  llt.compute(symmetrize(m) + 1e-12 * Matrix::Identity(m.rows(), m.cols()));
  if (llt.info() == Eigen::Success) return llt;
  throw_singular(m, what);
}

}  // namespace

Matrix spd_inverse(const Matrix& m, const char* what) {
  const auto llt = robust_llt(m, what);
  return symmetrize(llt.solve(Matrix::Identity(m.rows(), m.cols())));
}

double spd_logdet(const Matrix& m, const char* what) {
  const auto llt = robust_llt(m, what);
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

Matrix psd_factor(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(m));
  const Vector root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * root.asDiagonal();
}

}  // namespace invcog

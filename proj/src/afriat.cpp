#include "invcog/afriat.hpp"

#include <limits>

#include "invcog/errors.hpp"
#include "invcog/simplex.hpp"

namespace invcog {

double afriat_max_violation(const AfriatCertificate& cert, const ProbeResponseDataset& data) {
  const Matrix e = expenditure_matrix(data);
  const auto n = data.size();
  double worst = -std::numeric_limits<double>::infinity();
  for (Eigen::Index t = 0; t < n; ++t)
    for (Eigen::Index s = 0; s < n; ++s) {
      if (s == t) continue;
      const double v = cert.u(s) - cert.u(t) - cert.lambda(t) * (e(t, s) - e(t, t));
      worst = std::max(worst, v);
    }
  return n > 1 ? worst : 0.0;
}

std::optional<AfriatCertificate> afriat_feasibility(const ProbeResponseDataset& data, double tol,
                                                    Exec exec) {
  data.validate(true);
  const auto n = data.size();
  if (n == 1) return AfriatCertificate{Vector::Zero(1), Vector::Ones(1)};

  // Variables: u_0..u_{n-1} >= 0 (u is shift invariant), mu_t = lambda_t - 1 >= 0.
  // Row (t, s):  u_s - u_t - c_ts mu_t <= c_ts,  c_ts = alpha_t'(beta_s - beta_t).
  const Matrix e = expenditure_matrix(data);
  const Eigen::Index rows = n * (n - 1);
  Matrix A = Matrix::Zero(rows, 2 * n);
  Vector b(rows);
  Eigen::Index r = 0;
  for (Eigen::Index t = 0; t < n; ++t)
    for (Eigen::Index s = 0; s < n; ++s) {
      if (s == t) continue;
      const double c = e(t, s) - e(t, t);
      A(r, s) += 1.0;
      A(r, t) -= 1.0;
      A(r, n + t) = -c;
      b(r) = c;
      ++r;
    }
  LpOptions opts;
  opts.eps = tol;
  opts.exec = exec;
  const auto lp = find_feasible(A, b, opts);
  if (lp.status != LpStatus::optimal) return std::nullopt;

  AfriatCertificate cert;
  cert.u = lp.x.head(n);
  cert.u.array() -= cert.u.minCoeff();
  cert.lambda = lp.x.tail(n).array() + 1.0;
  const double scale = std::max(1.0, cert.lambda.maxCoeff() * e.cwiseAbs().maxCoeff());
  if (afriat_max_violation(cert, data) > 1e-9 * scale)
    throw NumericalError("afriat_feasibility: simplex returned a point violating the inequalities");
  return cert;
}

PiecewiseLinearUtility::PiecewiseLinearUtility(AfriatCertificate cert,
                                               const ProbeResponseDataset& data) {
  const auto n = data.size();
  if (cert.u.size() != n || cert.lambda.size() != n)
    throw ConfigError("reconstruct_utility: certificate does not match the dataset");
  slopes_ = cert.lambda.asDiagonal() * data.probes;
  offsets_.resize(n);
  for (Eigen::Index t = 0; t < n; ++t)
    offsets_(t) = cert.u(t) - slopes_.row(t).dot(data.responses.row(t));
}

double PiecewiseLinearUtility::operator()(const Vector& beta) const {
  return (slopes_ * beta + offsets_).minCoeff();
}

int PiecewiseLinearUtility::active_piece(const Vector& beta) const {
  Eigen::Index idx;
  (slopes_ * beta + offsets_).minCoeff(&idx);
  return static_cast<int>(idx);
}

PiecewiseLinearUtility reconstruct_utility(const AfriatCertificate& cert,
                                           const ProbeResponseDataset& data) {
  return PiecewiseLinearUtility(cert, data);
}

bool check_irl_inequalities(const std::vector<Matrix>& h, int optimal_policy, const Vector& cost,
                            double tol) {
  if (optimal_policy < 0 || optimal_policy >= static_cast<int>(h.size()))
    throw ConfigError("check_irl_inequalities: optimal policy index out of range");
  const Matrix& star = h[optimal_policy];
  for (const auto& hm : h) {
    if (hm.rows() != star.rows() || hm.cols() != cost.size())
      throw ConfigError("check_irl_inequalities: H matrices are not conformable with c");
    if (((star - hm) * cost).maxCoeff() > tol) return false;
  }
  return true;
}

}  // namespace invcog

#pragma once

#include <optional>
#include <vector>

#include "invcog/exec.hpp"
#include "invcog/garp.hpp"

namespace invcog {

/// Scalars (u_t, lambda_t) satisfying
///   u_s - u_t - lambda_t alpha_t'(beta_s - beta_t) <= 0  for all t, s,
/// normalized so lambda_t >= 1.
struct AfriatCertificate {
  Vector u;
  Vector lambda;
};

/// Largest violation of the Afriat inequalities (<= 0 means satisfied).
double afriat_max_violation(const AfriatCertificate& cert, const ProbeResponseDataset& data);

/// Phase-I simplex on the Afriat inequalities. Empty when infeasible.
std::optional<AfriatCertificate> afriat_feasibility(const ProbeResponseDataset& data,
                                                    double tol = 1e-9,
                                                    Exec exec = Exec::serial);

/// U(beta) = min_t { u_t + lambda_t alpha_t'(beta - beta_t) }: concave and
/// increasing, rationalizes the data.
class PiecewiseLinearUtility {
 public:
  PiecewiseLinearUtility(AfriatCertificate cert, const ProbeResponseDataset& data);

  double operator()(const Vector& beta) const;
  /// Index of the affine piece attaining the minimum.
  int active_piece(const Vector& beta) const;
  Eigen::Index pieces() const { return slopes_.rows(); }

 private:
  Matrix slopes_;    // row t: lambda_t alpha_t
  Vector offsets_;   // u_t - lambda_t alpha_t' beta_t
};

PiecewiseLinearUtility reconstruct_utility(const AfriatCertificate& cert,
                                           const ProbeResponseDataset& data);

/// IRL optimality conditions [H(mu*) - H(mu)] c <= tol for every policy mu.
/// Each H has one row per initial state and one column per cost entry.
bool check_irl_inequalities(const std::vector<Matrix>& h_matrices, int optimal_policy,
                            const Vector& cost, double tol = 1e-9);

}  // namespace invcog

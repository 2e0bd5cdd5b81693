#pragma once

#include <optional>
#include <vector>

#include "invcog/exec.hpp"
#include "invcog/linalg.hpp"

namespace invcog {

/// Probe/response pairs (alpha_n, beta_n); row n of each matrix is one epoch.
struct ProbeResponseDataset {
  Matrix probes;     // N x m, strictly positive
  Matrix responses;  // N x m, nonnegative

  Eigen::Index size() const { return probes.rows(); }
  Eigen::Index dim() const { return probes.cols(); }
  /// Throws ConfigError unless probes > 0, shapes agree and m >= 1. Negative
  /// responses are allowed only when `allow_negative` (noisy observations).
  void validate(bool allow_negative = false) const;
};

/// E(t, s) = alpha_t . beta_s.
Matrix expenditure_matrix(const ProbeResponseDataset& data);

struct GarpResult {
  bool passes = true;
  std::vector<int> violating_cycle;  // indices of a revealed-preference cycle
};

/// GARP via Warshall transitive closure of  t R s  iff  own(t) >= E(t,s) - tol.
/// Fails iff some t R* s with own(s) > E(s,t) + tol. The witnessing cycle is
/// the chain t -> ... -> s (each step a direct relation); closing it, s
/// strictly prefers its own bundle to beta_t.
/// `own` defaults to the diagonal of E; a custom vector gives the
/// expenditure-relaxed test used by the noisy detector.
GarpResult check_garp(const Matrix& expenditure, const Vector& own, double tol = 1e-9,
                      Exec exec = Exec::serial);
GarpResult check_garp(const ProbeResponseDataset& data, double tol = 1e-9, Exec exec = Exec::serial);

/// Boolean transitive closure of a square relation, bit-packed.
class BitRelation {
 public:
  explicit BitRelation(int n);
  int size() const { return n_; }
  void set(int i, int j) { rows_[i * words_ + j / 64] |= (std::uint64_t{1} << (j % 64)); }
  bool test(int i, int j) const { return (rows_[i * words_ + j / 64] >> (j % 64)) & 1U; }
  void close_serial();
  void close_parallel();

 private:
  int n_;
  int words_;
  std::vector<std::uint64_t> rows_;
};

}  // namespace invcog

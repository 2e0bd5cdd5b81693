#include "invcog/garp.hpp"

#include <cstdint>
#include <deque>

#include "invcog/errors.hpp"

namespace invcog {

void ProbeResponseDataset::validate(bool allow_negative) const {
  if (probes.cols() < 1 || probes.rows() < 1) throw ConfigError("dataset: need N >= 1 and m >= 1");
  if (responses.rows() != probes.rows() || responses.cols() != probes.cols())
    throw ConfigError("dataset: probes and responses must have the same shape");
  if (!probes.allFinite() || !responses.allFinite())
    throw ConfigError("dataset: non-finite entries");
  if ((probes.array() <= 0.0).any()) throw ConfigError("dataset: probes must be strictly positive");
  if (!allow_negative && (responses.array() < 0.0).any())
    throw ConfigError("dataset: responses must be nonnegative");
}

Matrix expenditure_matrix(const ProbeResponseDataset& data) {
  return data.probes * data.responses.transpose();
}

BitRelation::BitRelation(int n) : n_(n), words_((n + 63) / 64), rows_(static_cast<std::size_t>(n) * words_, 0) {}

void BitRelation::close_serial() {
  for (int k = 0; k < n_; ++k) {
    const std::uint64_t* rk = &rows_[static_cast<std::size_t>(k) * words_];
    for (int i = 0; i < n_; ++i) {
      if (!test(i, k)) continue;
      std::uint64_t* ri = &rows_[static_cast<std::size_t>(i) * words_];
      for (int w = 0; w < words_; ++w) ri[w] |= rk[w];
    }
  }
}

void BitRelation::close_parallel() {
  for (int k = 0; k < n_; ++k) {
    // Row k is unchanged by its own pivot, so rows may update concurrently.
    const std::vector<std::uint64_t> rk(rows_.begin() + static_cast<std::ptrdiff_t>(k) * words_,
                                        rows_.begin() + static_cast<std::ptrdiff_t>(k + 1) * words_);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n_; ++i) {
      if (!test(i, k)) continue;
      std::uint64_t* ri = &rows_[static_cast<std::size_t>(i) * words_];
      for (int w = 0; w < words_; ++w) ri[w] |= rk[w];
    }
  }
}

namespace {

// Shortest chain t -> s in the direct relation (BFS).
std::vector<int> chain(const Matrix& e, const Vector& own, double tol, int t, int s) {
  const int n = static_cast<int>(e.rows());
  std::vector<int> prev(n, -1);
  std::deque<int> q{t};
  prev[t] = t;
  while (!q.empty()) {
    const int i = q.front();
    q.pop_front();
    if (i == s) break;
    for (int j = 0; j < n; ++j) {
      if (prev[j] != -1 || !(own(i) >= e(i, j) - tol)) continue;
      prev[j] = i;
      q.push_back(j);
    }
  }
  std::vector<int> path;
  if (prev[s] == -1) return path;
  for (int v = s; v != t; v = prev[v]) path.push_back(v);
  path.push_back(t);
  return {path.rbegin(), path.rend()};
}

}  // namespace

GarpResult check_garp(const Matrix& e, const Vector& own, double tol, Exec exec) {
  const int n = static_cast<int>(e.rows());
  if (e.cols() != n || own.size() != n) throw ConfigError("check_garp: shape mismatch");
  BitRelation rel(n);
  for (int t = 0; t < n; ++t)
    for (int s = 0; s < n; ++s)
      if (own(t) >= e(t, s) - tol) rel.set(t, s);
  if (exec == Exec::parallel) {
    rel.close_parallel();
  } else {
    rel.close_serial();
  }

  GarpResult res;
  for (int t = 0; t < n; ++t) {
    for (int s = 0; s < n; ++s) {
      if (s == t || !rel.test(t, s)) continue;
      if (own(s) > e(s, t) + tol) {
        res.passes = false;
        res.violating_cycle = chain(e, own, tol, t, s);
        return res;
      }
    }
  }
  return res;
}

GarpResult check_garp(const ProbeResponseDataset& data, double tol, Exec exec) {
  data.validate(true);
  const Matrix e = expenditure_matrix(data);
  return check_garp(e, e.diagonal(), tol, exec);
}

}  // namespace invcog

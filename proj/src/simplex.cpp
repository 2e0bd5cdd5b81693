#include "invcog/simplex.hpp"

#include <limits>
#include <vector>

#include "invcog/errors.hpp"

namespace invcog {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Dictionary: basic_i = T(i,0) + sum_j T(i,j+1) * nonbasic_j,
//             z       = obj(0) + sum_j obj(j+1) * nonbasic_j.
class Dictionary {
 public:
  Dictionary(const Matrix& A, const Vector& b, bool with_aux, const LpOptions& opts)
      : m_(A.rows()), n_(A.cols() + (with_aux ? 1 : 0)), opts_(opts) {
    t_.resize(m_, n_ + 1);
    t_.col(0) = b;
    t_.block(0, 1, m_, A.cols()) = -A;
    if (with_aux) t_.col(n_).setOnes();
    nonbasic_.resize(n_);
    for (Eigen::Index j = 0; j < n_; ++j) nonbasic_[j] = static_cast<int>(j < A.cols() ? j : aux_id());
    basic_.resize(m_);
    for (Eigen::Index i = 0; i < m_; ++i) basic_[i] = static_cast<int>(A.cols() + i);
    obj_ = Vector::Zero(n_ + 1);
    n_orig_ = static_cast<int>(A.cols());
  }

  int aux_id() const { return static_cast<int>(1 << 30); }

  void set_objective_original(const Vector& c) {
    // Express c'x over the current nonbasic variables.
    obj_.setZero();
    for (Eigen::Index j = 0; j < n_; ++j)
      if (nonbasic_[j] < n_orig_) obj_(j + 1) += c(nonbasic_[j]);
    for (Eigen::Index i = 0; i < m_; ++i)
      if (basic_[i] < n_orig_) obj_ += c(basic_[i]) * t_.row(i).transpose();
  }

  void set_objective_minus_aux() {
    obj_.setZero();
    for (Eigen::Index j = 0; j < n_; ++j)
      if (nonbasic_[j] == aux_id()) obj_(j + 1) = -1.0;
    for (Eigen::Index i = 0; i < m_; ++i)
      if (basic_[i] == aux_id()) obj_ -= t_.row(i).transpose();
  }

  void pivot(Eigen::Index row, Eigen::Index col) {
    const double p = t_(row, col + 1);
    Eigen::RowVectorXd prow = -t_.row(row) / p;
    prow(col + 1) = 1.0 / p;
    t_.row(row) = prow;
    auto update = [&](Eigen::Index i) {
      if (i == row) return;
      const double f = t_(i, col + 1);
      if (f == 0.0) return;
      t_(i, col + 1) = 0.0;
      t_.row(i) += f * prow;
    };
    if (opts_.exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
      for (Eigen::Index i = 0; i < m_; ++i) update(i);
    } else {
      for (Eigen::Index i = 0; i < m_; ++i) update(i);
    }
    const double f = obj_(col + 1);
    obj_(col + 1) = 0.0;
    obj_ += f * prow.transpose();
    std::swap(basic_[row], nonbasic_[col]);
    ++pivots_;
  }

  // Returns false when unbounded.
  bool optimize() {
    int degenerate = 0;
    const double eps = opts_.eps;
    while (true) {
      if (pivots_ > opts_.max_pivots) throw NumericalError("simplex: pivot limit exceeded");
      const bool use_bland = degenerate >= opts_.degenerate_streak_for_bland;
      if (use_bland) bland_ = true;
      Eigen::Index enter = -1;
      for (Eigen::Index j = 0; j < n_; ++j) {
        if (obj_(j + 1) <= eps) continue;
        if (enter < 0) {
          enter = j;
        } else if (use_bland ? nonbasic_[j] < nonbasic_[enter] : obj_(j + 1) > obj_(enter + 1)) {
          enter = j;
        }
      }
      if (enter < 0) return true;
      Eigen::Index leave = -1;
      double best = std::numeric_limits<double>::infinity();
      for (Eigen::Index i = 0; i < m_; ++i) {
        const double a = t_(i, enter + 1);
        if (a >= -eps) continue;
        const double ratio = std::max(t_(i, 0), 0.0) / -a;
        if (ratio < best - eps || (ratio <= best + eps && leave >= 0 && basic_[i] < basic_[leave])) {
          if (ratio < best) best = ratio;
          leave = i;
        }
      }
      if (leave < 0) return false;
      degenerate = best <= eps ? degenerate + 1 : 0;
      pivot(leave, enter);
    }
  }

  Eigen::Index rows() const { return m_; }
  Eigen::Index cols() const { return n_; }
  const RowMatrix& table() const { return t_; }
  const Vector& objective() const { return obj_; }
  const std::vector<int>& basic() const { return basic_; }
  const std::vector<int>& nonbasic() const { return nonbasic_; }
  int pivots() const { return pivots_; }
  bool bland() const { return bland_; }

  Vector solution() const {
    Vector x = Vector::Zero(n_orig_);
    for (Eigen::Index i = 0; i < m_; ++i)
      if (basic_[i] < n_orig_) x(basic_[i]) = std::max(t_(i, 0), 0.0);
    return x;
  }

  // Drop the auxiliary column once it is nonbasic.
  void remove_aux() {
    Eigen::Index col = -1;
    for (Eigen::Index j = 0; j < n_; ++j)
      if (nonbasic_[j] == aux_id()) col = j;
    if (col < 0) return;
    RowMatrix t(m_, n_);
    t << t_.leftCols(col + 1), t_.rightCols(n_ - col - 1);
    t_ = std::move(t);
    Vector o(n_);
    o << obj_.head(col + 1), obj_.tail(n_ - col - 1);
    obj_ = std::move(o);
    nonbasic_.erase(nonbasic_.begin() + col);
    --n_;
  }

 private:
  Eigen::Index m_;
  Eigen::Index n_;
  LpOptions opts_;
  RowMatrix t_;
  Vector obj_;
  std::vector<int> basic_;
  std::vector<int> nonbasic_;
  int n_orig_ = 0;
  int pivots_ = 0;
  bool bland_ = false;
};

// Runs phase I; returns false when infeasible. Leaves `d` feasible without aux.
bool phase_one(Dictionary& d, const LpOptions& opts) {
  Eigen::Index worst = 0;
  for (Eigen::Index i = 1; i < d.rows(); ++i)
    if (d.table()(i, 0) < d.table()(worst, 0)) worst = i;
  const Eigen::Index aux_col = d.cols() - 1;
  if (d.rows() > 0 && d.table()(worst, 0) < 0.0) {
    d.pivot(worst, aux_col);
    d.set_objective_minus_aux();
    d.optimize();
    if (d.objective()(0) < -opts.eps * std::max(1.0, d.table().col(0).cwiseAbs().maxCoeff()))
      return false;
    // Degenerate: aux may still be basic at level 0.
    for (Eigen::Index i = 0; i < d.rows(); ++i) {
      if (d.basic()[i] != d.aux_id()) continue;
      Eigen::Index col = -1;
      for (Eigen::Index j = 0; j < d.cols(); ++j)
        if (std::abs(d.table()(i, j + 1)) > opts.eps && (col < 0 || std::abs(d.table()(i, j + 1)) > std::abs(d.table()(i, col + 1))))
          col = j;
      if (col >= 0) d.pivot(i, col);
    }
  }
  d.remove_aux();
  return true;
}

}  // namespace

LpResult find_feasible(const Matrix& A, const Vector& b, const LpOptions& opts) {
  if (b.size() != A.rows()) throw ConfigError("simplex: b has wrong length");
  Dictionary d(A, b, true, opts);
  LpResult res;
  const bool ok = phase_one(d, opts);
  res.pivots = d.pivots();
  res.bland_engaged = d.bland();
  if (!ok) return res;
  res.status = LpStatus::optimal;
  res.x = d.solution();
  return res;
}

LpResult solve_lp(const Matrix& A, const Vector& b, const Vector& c, const LpOptions& opts) {
  if (b.size() != A.rows() || c.size() != A.cols()) throw ConfigError("simplex: shape mismatch");
  Dictionary d(A, b, true, opts);
  LpResult res;
  if (!phase_one(d, opts)) {
    res.pivots = d.pivots();
    return res;
  }
  d.set_objective_original(c);
  const bool bounded = d.optimize();
  res.pivots = d.pivots();
  res.bland_engaged = d.bland();
  res.status = bounded ? LpStatus::optimal : LpStatus::unbounded;
  res.x = d.solution();
  res.objective = c.dot(res.x);
  return res;
}

}  // namespace invcog

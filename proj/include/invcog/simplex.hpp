#pragma once

#include "invcog/exec.hpp"
#include "invcog/linalg.hpp"

namespace invcog {

enum class LpStatus { optimal, infeasible, unbounded };

struct LpResult {
  LpStatus status = LpStatus::infeasible;
  Vector x;
  double objective = 0.0;
  int pivots = 0;
  bool bland_engaged = false;
};

struct LpOptions {
  double eps = 1e-9;
  int degenerate_streak_for_bland = 50;  // switch to Bland's rule after this many
  long max_pivots = 1000000;
  Exec exec = Exec::serial;
};

/// maximize c'x  subject to  A x <= b,  x >= 0.
/// Dense dictionary simplex with an auxiliary-variable phase I.
LpResult solve_lp(const Matrix& A, const Vector& b, const Vector& c, const LpOptions& opts = {});

/// Phase I only: any feasible point of {A x <= b, x >= 0}.
LpResult find_feasible(const Matrix& A, const Vector& b, const LpOptions& opts = {});

}  // namespace invcog

#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

#include "invcog/linalg.hpp"

namespace invcog {

/// Adversary with finite state, observation, and action alphabets.
///   P(i, j) = p(x' = j | x = i)        (X x X)
///   B(i, y) = p(y | x = i)              (X x Y)
///   G(u, a) = p(measured a | chosen u)  (U x A)
/// `policy` maps the adversary's belief to its chosen action u in [0, U).
struct FiniteAdversaryModel {
  Matrix P;
  Matrix B;
  Matrix G;
  std::function<int(const Vector&)> policy;

  /// MAP state, ties resolved to the lowest index.
  static int map_policy(const Vector& belief);

  int policy_of(const Vector& belief) const { return policy ? policy(belief) : map_policy(belief); }

  void validate() const;
};

/// Adversary's HMM filter T(pi, y). Returns an empty vector when the
/// observation has zero probability under `belief`.
Vector hmm_update(const FiniteAdversaryModel& model, const Vector& belief, int y);

struct BeliefAtom {
  Vector belief;
  double weight = 0.0;
};

/// Discrete random measure over beliefs.
struct BeliefMixture {
  std::vector<BeliefAtom> atoms;

  Vector mean() const;
  double total_weight() const;
};

struct FiniteFilterOptions {
  double prune_tol = 1e-6;  // merge atoms closer than this in L1
  std::size_t max_atoms = 10000;
};

struct FiniteFilterResult {
  std::vector<BeliefMixture> mixtures;  // alpha_0 .. alpha_N
  std::vector<Vector> mean_beliefs;     // E[pi_k]
  double log_likelihood = 0.0;          // log p(a_{1:N} | x_{0:N})
};

/// Optimal inverse filter on finite alphabets. `states` holds x_0..x_N,
/// `actions` holds a_1..a_N.
FiniteFilterResult inverse_filter_finite(const FiniteAdversaryModel& model,
                                         const BeliefMixture& prior, const std::vector<int>& states,
                                         const std::vector<int>& actions,
                                         const FiniteFilterOptions& opts = {});

}  // namespace invcog

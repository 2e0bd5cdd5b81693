#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "invcog/detection.hpp"

namespace invcog {

/// a_n = a / (n + 1 + A)^alpha_exp,  c_n = c / (n + 1)^gamma_exp.
struct SpsaGains {
  double a = 0.1;
  double c = 0.05;
  double A = 10.0;
  double alpha_exp = 0.602;
  double gamma_exp = 0.101;
  void validate() const;
};

/// Noisy objective; the seed selects the Monte-Carlo randomness so that the
/// +/- evaluations of one iteration can share it.
using NoisyObjective = std::function<double(const Vector& x, std::uint64_t seed)>;

struct SpsaResult {
  Vector x;
  std::vector<double> trace;  // objective at x_0..x_n, all with one evaluation seed
  bool flat_objective = false;
};

/// Two-measurement SPSA with Rademacher perturbations and projection onto
/// x >= lower_bound. With `concurrent`, the paired evaluations run side by side.
SpsaResult spsa_minimize(const NoisyObjective& f, const Vector& x0, const SpsaGains& gains,
                         int n_iter, std::uint64_t seed, double lower_bound = -1e300,
                         bool concurrent = false);

struct ProbeOptimizationOptions {
  int n_inner = 50;      // non-rational datasets per objective evaluation
  int n_calibration = 100;  // null draws for the threshold
  double alpha_min = 1e-3;
  Exec exec = Exec::serial;
};

/// Estimated probability that the detector accepts H0 on data from the
/// non-rational `radar` at these probes. The threshold is calibrated once
/// per evaluation against the rational counterpart of `radar`.
double type_ii_error(const Matrix& probes, const SyntheticRadar& radar, double noise_sigma,
                     double gamma, std::uint64_t seed, const ProbeOptimizationOptions& opts = {});

struct ProbeOptimizationResult {
  Matrix probes;
  std::vector<double> trace;
  bool flat_objective = false;  // every evaluation was 0 or every one was 1
};

ProbeOptimizationResult optimize_probes_spsa(const Matrix& initial_probes, const SyntheticRadar& radar,
                                             double noise_sigma, double gamma, int n_iter,
                                             const SpsaGains& gains, std::uint64_t seed,
                                             const ProbeOptimizationOptions& opts = {});

}  // namespace invcog

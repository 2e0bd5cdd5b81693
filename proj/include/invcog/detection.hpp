#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "invcog/exec.hpp"
#include "invcog/garp.hpp"

namespace invcog {

enum class UtilityKind { cobb_douglas, linear };
UtilityKind parse_utility_kind(const std::string& s);
std::string to_string(UtilityKind k);

/// Ground-truth radar: maximizes U over the budget alpha'beta <= 1, or, when
/// not rational, answers uniformly at random on the budget face.
struct SyntheticRadar {
  UtilityKind kind = UtilityKind::cobb_douglas;
  Vector weights;  // normalized; strictly positive for Cobb-Douglas
  bool rational = true;

  /// Normalizes raw weights and validates them.
  static SyntheticRadar make(UtilityKind kind, Vector raw_weights, bool rational = true);
  void validate() const;
};

/// `seed` only matters for the non-rational radar.
ProbeResponseDataset generate_radar_responses(const SyntheticRadar& radar, const Matrix& probes,
                                              std::uint64_t seed = 0);

/// z = beta + eps, eps iid N(0, sigma^2) per entry.
ProbeResponseDataset add_response_noise(const ProbeResponseDataset& data, double sigma,
                                        std::uint64_t seed);

struct PerturbationStatistic {
  double radius = 0.0;
  bool overflow = false;
};

/// Smallest r for which GARP holds once every own expenditure alpha_t'z_t is
/// lowered by 2 r |alpha_t|_1, the most an infinity-norm perturbation of
/// radius r can move any comparison. This is zero iff (alpha, z) passes GARP,
/// equals the minimum perturbation radius for two observations and bounds it
/// from below in general. Found by bisection over the finitely many
/// breakpoints where a revealed-preference relation changes.
PerturbationStatistic perturbation_statistic(const ProbeResponseDataset& observed,
                                             double r_max = std::numeric_limits<double>::infinity(),
                                             double tol = 1e-9);

/// Cobb-Douglas weights matching the observed mean expenditure shares.
Vector fit_cobb_douglas(const ProbeResponseDataset& observed);

struct NullCalibration {
  double threshold = 0.0;
  std::vector<double> null_statistics;  // sorted ascending
};

/// Distribution of the statistic under H0: datasets from `null_radar` at the
/// given probes plus noise. The threshold is the ceil((1-gamma)(n_mc+1))-th
/// order statistic, infinite when that exceeds n_mc.
NullCalibration calibrate_threshold(const Matrix& probes, const SyntheticRadar& null_radar,
                                    double noise_sigma, double gamma, int n_mc, std::uint64_t seed,
                                    Exec exec = Exec::serial);

struct DetectionResult {
  double statistic = 0.0;
  double threshold = 0.0;
  bool reject = false;  // true: not utility maximizing
  double p_value = 1.0;
  bool overflow = false;
  Vector null_weights;
};

struct DetectOptions {
  double r_max = std::numeric_limits<double>::infinity();
  Exec exec = Exec::serial;
};

/// Test H0 "the radar maximizes some utility" on noisy responses. The null is
/// simulated from a Cobb-Douglas radar fitted to the data.
DetectionResult detect_noisy(const ProbeResponseDataset& observed, double noise_sigma, double gamma,
                             int n_mc, std::uint64_t seed, const DetectOptions& opts = {});

}  // namespace invcog

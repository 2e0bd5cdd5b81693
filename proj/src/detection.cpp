#include "invcog/detection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "invcog/errors.hpp"
#include "invcog/rng.hpp"

namespace invcog {

UtilityKind parse_utility_kind(const std::string& s) {
  if (s == "cobb_douglas") return UtilityKind::cobb_douglas;
  if (s == "linear") return UtilityKind::linear;
  throw ConfigError("unknown utility kind '" + s + "'");
}

std::string to_string(UtilityKind k) {
  return k == UtilityKind::cobb_douglas ? "cobb_douglas" : "linear";
}

SyntheticRadar SyntheticRadar::make(UtilityKind kind, Vector raw_weights, bool rational) {
  SyntheticRadar r;
  r.kind = kind;
  r.rational = rational;
  const double total = raw_weights.sum();
  if (!(total > 0.0) || !std::isfinite(total)) throw ConfigError("radar weights must have a positive sum");
  r.weights = raw_weights / total;
  r.validate();
  return r;
}

void SyntheticRadar::validate() const {
  if (weights.size() < 1) throw ConfigError("radar needs at least one weight");
  for (Eigen::Index i = 0; i < weights.size(); ++i) {
    const double w = weights(i);
    if (!std::isfinite(w) || w < 0.0 || (kind == UtilityKind::cobb_douglas && w <= 0.0))
      throw ConfigError("radar weights must be positive");
  }
  if (std::abs(weights.sum() - 1.0) > 1e-9) throw ConfigError("radar weights must sum to 1");
}

ProbeResponseDataset generate_radar_responses(const SyntheticRadar& radar, const Matrix& probes,
                                              std::uint64_t seed) {
  radar.validate();
  ProbeResponseDataset out{probes, Matrix::Zero(probes.rows(), probes.cols())};
  out.validate();
  if (probes.cols() != radar.weights.size())
    throw ConfigError("radar weights and probes differ in dimension");
  const Eigen::Index m = probes.cols();
  Rng rng = make_rng(seed);
  std::exponential_distribution<double> expo(1.0);
  for (Eigen::Index n = 0; n < probes.rows(); ++n) {
    const auto a = probes.row(n);
    auto b = out.responses.row(n);
    if (!radar.rational) {
      // Dirichlet(1) expenditure shares are uniform on the face, and the
      // linear map shares -> beta preserves uniformity.
      Vector s(m);
      for (Eigen::Index i = 0; i < m; ++i) s(i) = expo(rng);
      s /= s.sum();
      for (Eigen::Index i = 0; i < m; ++i) b(i) = s(i) / a(i);
    } else if (radar.kind == UtilityKind::cobb_douglas) {
      for (Eigen::Index i = 0; i < m; ++i) b(i) = radar.weights(i) / a(i);
    } else {
      const Vector ratio = radar.weights.cwiseQuotient(a.transpose());
      const double best = ratio.maxCoeff();
      std::vector<Eigen::Index> tied;
      for (Eigen::Index i = 0; i < m; ++i)
        if (ratio(i) >= best * (1.0 - 1e-12)) tied.push_back(i);
      for (Eigen::Index i : tied) b(i) = 1.0 / (static_cast<double>(tied.size()) * a(i));
    }
  }
  return out;
}

ProbeResponseDataset add_response_noise(const ProbeResponseDataset& data, double sigma,
                                        std::uint64_t seed) {
  if (!(sigma >= 0.0)) throw ConfigError("noise sigma must be nonnegative");
  ProbeResponseDataset out = data;
  Rng rng = make_rng(seed ^ 0x5bd1e995ULL);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (Eigen::Index n = 0; n < out.responses.rows(); ++n)
    for (Eigen::Index i = 0; i < out.responses.cols(); ++i) out.responses(n, i) += sigma * gauss(rng);
  return out;
}

namespace {

bool passes_relaxed(const Matrix& e, const Vector& own, const Vector& l1, double r, double tol) {
  return check_garp(e, own - 2.0 * r * l1, tol).passes;
}

}  // namespace

PerturbationStatistic perturbation_statistic(const ProbeResponseDataset& observed, double r_max,
                                             double tol) {
  observed.validate(true);
  const Matrix e = expenditure_matrix(observed);
  const Vector own = e.diagonal();
  const Vector l1 = observed.probes.rowwise().lpNorm<1>();
  if (check_garp(e, own, tol).passes) return {};

  // Relations only disappear as r grows, so feasibility is monotone in r and
  // changes only at these breakpoints.
  std::vector<double> crit;
  const Eigen::Index n = e.rows();
  for (Eigen::Index t = 0; t < n; ++t)
    for (Eigen::Index s = 0; s < n; ++s)
      if (s != t) {
        const double c = (own(t) - e(t, s) + tol) / (2.0 * l1(t));
        if (c > 0.0) crit.push_back(c);
      }
  std::sort(crit.begin(), crit.end());
  crit.erase(std::unique(crit.begin(), crit.end()), crit.end());
  // Evaluate just past each breakpoint, halfway to the next one.
  auto probe_point = [&](std::size_t i) {
    const double next = i + 1 < crit.size() ? crit[i + 1] : 2.0 * crit[i] + 1.0;
    return 0.5 * (crit[i] + next);
  };
  std::size_t lo = 0, hi = crit.size() - 1;  // answer index in [lo, hi]; hi always passes
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    if (passes_relaxed(e, own, l1, probe_point(mid), tol)) hi = mid;
    else lo = mid + 1;
  }
  PerturbationStatistic out;
  out.radius = crit[lo];
  if (out.radius > r_max) {
    out.radius = r_max;
    out.overflow = true;
  }
  return out;
}

Vector fit_cobb_douglas(const ProbeResponseDataset& observed) {
  const Eigen::Index m = observed.dim();
  Vector share = Vector::Zero(m);
  for (Eigen::Index n = 0; n < observed.size(); ++n)
    for (Eigen::Index i = 0; i < m; ++i)
      share(i) += std::max(observed.probes(n, i) * observed.responses(n, i), 0.0);
  share = share.cwiseMax(1e-6 * std::max(share.sum(), 1e-300));
  return share / share.sum();
}

NullCalibration calibrate_threshold(const Matrix& probes, const SyntheticRadar& null_radar,
                                    double noise_sigma, double gamma, int n_mc, std::uint64_t seed,
                                    Exec exec) {
  if (!(noise_sigma > 0.0)) throw ConfigError("noise_sigma must be positive");
  if (!(gamma > 0.0 && gamma < 1.0)) throw ConfigError("gamma must lie in (0, 1)");
  if (n_mc < 1) throw ConfigError("n_mc must be positive");
  const ProbeResponseDataset clean = generate_radar_responses(null_radar, probes, seed);
  NullCalibration cal;
  cal.null_statistics.assign(static_cast<std::size_t>(n_mc), 0.0);
#pragma omp parallel for schedule(dynamic) if (exec == Exec::parallel)
  for (int r = 0; r < n_mc; ++r) {
    const std::uint64_t rs = splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(r) + 1));
    cal.null_statistics[r] = perturbation_statistic(add_response_noise(clean, noise_sigma, rs)).radius;
  }
  std::sort(cal.null_statistics.begin(), cal.null_statistics.end());
  const auto k = static_cast<long>(std::ceil((1.0 - gamma) * (n_mc + 1) - 1e-12));
  cal.threshold = k > n_mc ? std::numeric_limits<double>::infinity() : cal.null_statistics[k - 1];
  return cal;
}

DetectionResult detect_noisy(const ProbeResponseDataset& observed, double noise_sigma, double gamma,
                             int n_mc, std::uint64_t seed, const DetectOptions& opts) {
  observed.validate(true);
  if (!(noise_sigma > 0.0)) throw ConfigError("noise_sigma must be positive");
  if (!(gamma > 0.0 && gamma < 1.0)) throw ConfigError("gamma must lie in (0, 1)");
  DetectionResult res;
  const PerturbationStatistic stat = perturbation_statistic(observed, opts.r_max);
  res.statistic = stat.radius;
  res.overflow = stat.overflow;
  res.null_weights = fit_cobb_douglas(observed);
  const SyntheticRadar null_radar = SyntheticRadar::make(UtilityKind::cobb_douglas, res.null_weights);
  const NullCalibration cal =
      calibrate_threshold(observed.probes, null_radar, noise_sigma, gamma, n_mc, seed, opts.exec);
  res.threshold = cal.threshold;
  res.reject = res.statistic > res.threshold;
  const auto at_least = cal.null_statistics.end() -
                        std::lower_bound(cal.null_statistics.begin(), cal.null_statistics.end(),
                                         res.statistic);
  res.p_value = (1.0 + static_cast<double>(at_least)) / (n_mc + 1.0);
  return res;
}

}  // namespace invcog

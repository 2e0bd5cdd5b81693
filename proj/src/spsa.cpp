#include "invcog/spsa.hpp"

#include <cmath>

#include "invcog/errors.hpp"
#include "invcog/rng.hpp"

namespace invcog {

void SpsaGains::validate() const {
  if (!(a >= 0.0) || !(c > 0.0) || !(A >= 0.0) || !(alpha_exp > 0.0) || !(gamma_exp >= 0.0))
    throw ConfigError("SPSA gains need a >= 0, c > 0, A >= 0 and positive exponents");
}

SpsaResult spsa_minimize(const NoisyObjective& f, const Vector& x0, const SpsaGains& gains,
                         int n_iter, std::uint64_t seed, double lower_bound, bool concurrent) {
  gains.validate();
  if (n_iter < 0) throw ConfigError("n_iter must be nonnegative");
  SpsaResult res;
  res.x = x0.cwiseMax(lower_bound);
  const std::uint64_t eval_seed = splitmix64(seed ^ 0x7e57ULL);
  res.trace.reserve(static_cast<std::size_t>(n_iter) + 1);
  res.trace.push_back(f(res.x, eval_seed));
  Rng rng = make_rng(seed);
  std::bernoulli_distribution coin(0.5);
  Vector delta(x0.size());
  for (int n = 0; n < n_iter; ++n) {
    const double an = gains.a / std::pow(n + 1 + gains.A, gains.alpha_exp);
    const double cn = gains.c / std::pow(n + 1.0, gains.gamma_exp);
    for (Eigen::Index i = 0; i < delta.size(); ++i) delta(i) = coin(rng) ? 1.0 : -1.0;
    const std::uint64_t crn = splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(n) + 17));
    const Vector xp = res.x + cn * delta;
    const Vector xm = res.x - cn * delta;
    double jp = 0.0, jm = 0.0;
#pragma omp parallel sections if (concurrent)
    {
#pragma omp section
      jp = f(xp, crn);
#pragma omp section
      jm = f(xm, crn);
    }
    // Rademacher entries are their own reciprocals.
    const Vector g = ((jp - jm) / (2.0 * cn)) * delta;
    res.x = (res.x - an * g).cwiseMax(lower_bound);
    res.trace.push_back(f(res.x, eval_seed));
  }
  return res;
}

double type_ii_error(const Matrix& probes, const SyntheticRadar& radar, double noise_sigma,
                     double gamma, std::uint64_t seed, const ProbeOptimizationOptions& opts) {
  if (opts.n_inner < 1) throw ConfigError("n_inner must be positive");
  SyntheticRadar null_radar = radar;
  null_radar.rational = true;
  SyntheticRadar alt = radar;
  alt.rational = false;
  const NullCalibration cal = calibrate_threshold(probes, null_radar, noise_sigma, gamma,
                                                  opts.n_calibration, splitmix64(seed), opts.exec);
  int accepted = 0;
#pragma omp parallel for reduction(+ : accepted) schedule(dynamic) if (opts.exec == Exec::parallel)
  for (int j = 0; j < opts.n_inner; ++j) {
    const std::uint64_t js = splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(j) + 0x1000));
    const ProbeResponseDataset clean = generate_radar_responses(alt, probes, js);
    const ProbeResponseDataset noisy = add_response_noise(clean, noise_sigma, js);
    if (perturbation_statistic(noisy).radius <= cal.threshold) ++accepted;
  }
  return static_cast<double>(accepted) / opts.n_inner;
}

ProbeOptimizationResult optimize_probes_spsa(const Matrix& initial_probes, const SyntheticRadar& radar,
                                             double noise_sigma, double gamma, int n_iter,
                                             const SpsaGains& gains, std::uint64_t seed,
                                             const ProbeOptimizationOptions& opts) {
  if (initial_probes.size() == 0 || (initial_probes.array() <= 0.0).any())
    throw ConfigError("initial probes must be strictly positive");
  if (!(opts.alpha_min > 0.0)) throw ConfigError("alpha_min must be positive");
  radar.validate();
  const Eigen::Index rows = initial_probes.rows(), cols = initial_probes.cols();
  bool saw_interior = false, saw_zero = false, saw_one = false;
  const NoisyObjective objective = [&](const Vector& x, std::uint64_t s) {
    const Matrix p = Eigen::Map<const Matrix>(x.data(), rows, cols);
    const double j = type_ii_error(p, radar, noise_sigma, gamma, s, opts);
#pragma omp critical(invcog_spsa_flat)
    {
      if (j <= 0.0) saw_zero = true;
      else if (j >= 1.0) saw_one = true;
      else saw_interior = true;
    }
    return j;
  };
  const Vector x0 = Eigen::Map<const Vector>(initial_probes.data(), initial_probes.size());
  const SpsaResult r = spsa_minimize(objective, x0, gains, n_iter, seed, opts.alpha_min,
                                     opts.exec == Exec::parallel);
  ProbeOptimizationResult out;
  out.trace = r.trace;
  out.flat_objective = !saw_interior && !(saw_zero && saw_one);
  out.probes = out.flat_objective ? initial_probes : Matrix(Eigen::Map<const Matrix>(r.x.data(), rows, cols));
  return out;
}

}  // namespace invcog

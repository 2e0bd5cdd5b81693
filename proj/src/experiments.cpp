#include "invcog/experiments.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "invcog/afriat.hpp"
#include "invcog/errors.hpp"
#include "invcog/finite_inverse_filter.hpp"
#include "invcog/identification.hpp"
#include "invcog/particle_inverse_filter.hpp"
#include "invcog/rng.hpp"
#include "invcog/slow_learning.hpp"

#ifndef INVCOG_VERSION
#define INVCOG_VERSION "0.0.0"
#endif

namespace invcog {

std::string software_version() { return INVCOG_VERSION; }

namespace {

class Csv {
 public:
  explicit Csv(std::vector<std::string> header) : cols_(header.size()) {
    for (std::size_t i = 0; i < header.size(); ++i) out_ += (i ? "," : "") + header[i];
    out_ += '\n';
  }
  void row(const std::vector<double>& v) {
    if (v.size() != cols_) throw Error("csv: row width does not match header");
    for (std::size_t i = 0; i < v.size(); ++i) out_ += (i ? "," : "") + fmt17(v[i]);
    out_ += '\n';
  }
  const std::string& str() const { return out_; }

 private:
  std::size_t cols_;
  std::string out_;
};

std::vector<std::string> indexed(const std::string& stem, Eigen::Index n) {
  std::vector<std::string> out;
  for (Eigen::Index i = 1; i <= n; ++i) out.push_back(stem + "_" + std::to_string(i));
  return out;
}

template <class... Vs>
std::vector<std::string> concat(std::vector<std::string> head, const Vs&... rest) {
  (head.insert(head.end(), rest.begin(), rest.end()), ...);
  return head;
}

void append(std::vector<double>& row, const Vector& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) row.push_back(v(i));
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

Exec exec_of(const Params& p) { return p.flag("parallel", true) ? Exec::parallel : Exec::serial; }

int positive(const Params& p, const std::string& key, int def) {
  const int v = p.integer(key, def);
  if (v < 1) throw ConfigError("params." + key + ": must be positive");
  return v;
}

ProcessNoiseConvention convention_of(const Params& p) {
  const std::string s = p.text("process_noise", "gain_r_gain");
  if (s == "gain_r_gain") return ProcessNoiseConvention::gain_r_gain;
  if (s == "gain_gain") return ProcessNoiseConvention::gain_gain;
  throw ConfigError("params.process_noise: expected gain_r_gain or gain_gain");
}

Json crb_json(const CrbReport& r) {
  return Json{{"theta", r.theta_true},
              {"horizon", r.horizon},
              {"n_mc", r.n_mc},
              {"classic_fisher", r.classic_fisher},
              {"inverse_fisher", r.inverse_fisher},
              {"classic_bound", r.classic_bound},
              {"inverse_bound", r.inverse_bound},
              {"classic_std_err", r.classic_std_err},
              {"inverse_std_err", r.inverse_std_err},
              {"ratio", r.inverse_bound / r.classic_bound}};
}

// --- experiments -----------------------------------------------------------

std::function<ExperimentOutput()> prep_simulate(const Params& p, std::uint64_t seed) {
  const auto model = model_from_params(p);
  const int n = positive(p, "horizon", 100);
  return [=] {
    const Trajectory t = simulate(model, n, seed);
    Csv csv(concat({"k"}, indexed("x", model.state_dim()), indexed("y", model.obs_dim())));
    for (int k = 1; k <= n; ++k) {
      std::vector<double> row{double(k)};
      append(row, t.states[k]);
      append(row, t.observations[k - 1]);
      csv.row(row);
    }
    ExperimentOutput out;
    out.artifacts.push_back({"trajectory.csv", csv.str()});
    out.summary = {{"horizon", n}, {"x0", to_json(t.states[0])}};
    return out;
  };
}

std::function<ExperimentOutput()> prep_inverse_kf(const Params& p, std::uint64_t seed) {
  const auto model = model_from_params(p);
  const auto action = action_from_params(p);
  const auto conv = convention_of(p);
  const int n = positive(p, "horizon", 1000);
  return [=] {
    const Trajectory t = simulate(model, n, seed);
    const AdversaryRecord adv = simulate_adversary(model, action, t, seed);
    const auto est = run_inverse_kf(model, action, t.states, adv.actions, conv);
    const auto X = model.state_dim();
    Csv csv(concat({"k"}, indexed("x", X), indexed("xhat", X), indexed("xhathat", X),
                   std::vector<std::string>{"est_var"}));
    double sq = 0.0, max_err = 0.0, var = 0.0;
    for (int k = 0; k <= n; ++k) {
      std::vector<double> row{double(k)};
      append(row, t.states[k]);
      append(row, adv.estimates[k]);
      append(row, est[k].est_mean);
      row.push_back(est[k].est_cov.trace());
      csv.row(row);
      const Vector d = est[k].est_mean - adv.estimates[k];
      sq += d.squaredNorm();
      max_err = std::max(max_err, d.cwiseAbs().maxCoeff());
      var += est[k].est_cov.trace();
    }
    ExperimentOutput out;
    out.artifacts.push_back({"inverse_kf.csv", csv.str()});
    out.summary = {{"horizon", n},
                   {"rmse", std::sqrt(sq / (n + 1))},
                   {"max_abs_error", max_err},
                   {"mean_est_var", var / (n + 1)}};
    return out;
  };
}

FiniteAdversaryModel finite_model_from_params(const Params& p) {
  FiniteAdversaryModel m;
  m.P = p.matrix("P");
  m.B = p.matrix("B");
  m.G = p.matrix("G");
  m.validate();
  return m;
}

std::function<ExperimentOutput()> prep_inverse_finite(const Params& p, std::uint64_t seed) {
  const auto model = finite_model_from_params(p);
  const auto X = model.P.rows();
  Vector prior = p.has("prior") ? p.vector("prior") : Vector::Constant(X, 1.0 / X);
  if (prior.size() != X || (prior.array() < 0.0).any() || std::abs(prior.sum() - 1.0) > 1e-9)
    throw ConfigError("params.prior: must be a probability vector over the states");
  const int n = positive(p, "horizon", 20);
  FiniteFilterOptions opts;
  opts.prune_tol = p.number("prune_tol", opts.prune_tol);
  opts.max_atoms = static_cast<std::size_t>(positive(p, "max_atoms", 10000));
  return [=] {
    Rng rng = make_rng(seed);
    auto draw = [&](const Vector& w) {
      return std::discrete_distribution<int>(w.data(), w.data() + w.size())(rng);
    };
    std::vector<int> states{draw(prior)}, actions;
    Vector belief = prior;
    for (int k = 1; k <= n; ++k) {
      const int x = draw(Vector(model.P.row(states.back()).transpose()));
      const int y = draw(Vector(model.B.row(x).transpose()));
      belief = hmm_update(model, belief, y);
      const int u = model.policy_of(belief);
      actions.push_back(draw(Vector(model.G.row(u).transpose())));
      states.push_back(x);
    }
    BeliefMixture mix;
    mix.atoms.push_back({prior, 1.0});
    const auto res = inverse_filter_finite(model, mix, states, actions, opts);
    Csv csv(concat({"k", "x", "a", "atoms"}, indexed("mean_belief", X)));
    for (int k = 0; k <= n; ++k) {
      std::vector<double> row{double(k), double(states[k]), k ? double(actions[k - 1]) : NAN,
                              double(res.mixtures[k].atoms.size())};
      append(row, res.mean_beliefs[k]);
      csv.row(row);
    }
    ExperimentOutput out;
    out.artifacts.push_back({"inverse_finite.csv", csv.str()});
    out.summary = {{"horizon", n},
                   {"log_likelihood", res.log_likelihood},
                   {"final_atoms", res.mixtures.back().atoms.size()}};
    return out;
  };
}

std::function<ExperimentOutput()> prep_particle(const Params& p, std::uint64_t seed) {
  const auto model = model_from_params(p);
  const auto action = action_from_params(p);
  const int n = positive(p, "horizon", 20);
  const int particles = p.integer("n_particles", 5000);
  if (particles < 100) throw ConfigError("params.n_particles: need at least 100");
  const Exec exec = exec_of(p);
  return [=] {
    const Trajectory t = simulate(model, n, seed);
    const AdversaryRecord adv = simulate_adversary(model, action, t, seed);
    const auto kf = run_inverse_kf(model, action, t.states, adv.actions);
    const auto pf = particle_inverse_filter(model, action, t.states, adv.actions, particles,
                                            splitmix64(seed ^ 0x9a7ULL), exec);
    const auto X = model.state_dim();
    Csv csv(concat({"k"}, indexed("pf_mean", X), indexed("kf_mean", X), indexed("xhat", X),
                   std::vector<std::string>{"ess"}));
    double max_gap = 0.0;
    for (int k = 1; k <= n; ++k) {
      std::vector<double> row{double(k)};
      append(row, pf[k - 1].mean);
      append(row, kf[k].est_mean);
      append(row, adv.estimates[k]);
      row.push_back(pf[k - 1].ess);
      csv.row(row);
      max_gap = std::max(max_gap, (pf[k - 1].mean - kf[k].est_mean).cwiseAbs().maxCoeff());
    }
    ExperimentOutput out;
    out.artifacts.push_back({"particle.csv", csv.str()});
    out.summary = {{"horizon", n}, {"n_particles", particles}, {"max_abs_gap_to_kf", max_gap}};
    return out;
  };
}

std::function<ExperimentOutput()> prep_mle_profile(const Params& p, std::uint64_t seed) {
  const auto model = model_from_params(p);
  const auto action = action_from_params(p);
  if (model.C.size() != 1) throw ConfigError("params.C: the profile needs a scalar gain");
  const double theta = p.number("theta_true", 1.5);
  const int n = positive(p, "horizon", 1000);
  const double lo = p.number("lo", 0.05), hi = p.number("hi", 10.0);
  if (!(lo < hi)) throw ConfigError("params.lo/hi: need lo < hi");
  const int points = p.integer("points", 200);
  if (points < 3) throw ConfigError("params.points: need at least 3");
  return [=] {
    const auto d = simulate_engagement(model, action, theta, n, seed);
    auto inv = [&](double t) { return inverse_loglik(t, d.inverse, model, action); };
    auto cls = [&](double t) { return classic_loglik(t, d.trajectory.observations, model); };
    const auto pi = likelihood_profile(inv, lo, hi, points);
    const auto pc = likelihood_profile(cls, lo, hi, points);
    MleOptions mo;
    mo.grid_points = points;
    const Vector vlo = Vector::Constant(1, lo), vhi = Vector::Constant(1, hi);
    const auto mi = mle([&](const Vector& t) { return inv(t(0)); }, vlo, vhi, mo);
    const auto mc = mle([&](const Vector& t) { return cls(t(0)); }, vlo, vhi, mo);
    Csv csv({"theta", "inverse_loglik", "classic_loglik"});
    for (std::size_t i = 0; i < pi.grid.size(); ++i) csv.row({pi.grid[i], pi.loglik[i], pc.loglik[i]});
    ExperimentOutput out;
    out.artifacts.push_back({"profile.csv", csv.str()});
    out.summary = {{"theta_true", theta},
                   {"inverse_argmax", mi.theta_hat(0)},
                   {"classic_argmax", mc.theta_hat(0)},
                   {"inverse_curvature", mi.curvature},
                   {"classic_curvature", mc.curvature},
                   {"curvature_ratio", mc.curvature / mi.curvature}};
    return out;
  };
}

std::function<ExperimentOutput()> prep_crb(const Params& p, std::uint64_t seed) {
  const auto model = model_from_params(p);
  const auto action = action_from_params(p);
  if (model.C.size() != 1) throw ConfigError("params.C: the bound is for a scalar gain");
  std::vector<double> thetas;
  if (p.has("thetas")) {
    const Vector v = p.vector("thetas");
    thetas.assign(v.data(), v.data() + v.size());
  } else {
    thetas.push_back(p.number("theta", 1.5));
  }
  const int n = positive(p, "horizon", 1000);
  const int n_mc = p.integer("n_mc", 200);
  if (n_mc < 2) throw ConfigError("params.n_mc: need at least 2");
  const Exec exec = exec_of(p);
  return [=] {
    Json reports = Json::array();
    Csv csv({"theta", "classic_bound", "inverse_bound", "ratio"});
    bool ordered = true;
    for (double th : thetas) {
      const auto r = crb(model, action, th, n, n_mc, seed, exec);
      reports.push_back(crb_json(r));
      csv.row({th, r.classic_bound, r.inverse_bound, r.inverse_bound / r.classic_bound});
      ordered = ordered && r.inverse_bound > r.classic_bound;
    }
    ExperimentOutput out;
    out.artifacts.push_back({"crb.json", dump(reports)});
    out.artifacts.push_back({"crb.csv", csv.str()});
    out.summary = {{"reports", reports}, {"inverse_exceeds_classic", ordered}};
    return out;
  };
}

std::function<ExperimentOutput()> prep_cascade(const Params& p, std::uint64_t seed) {
  CascadeConfig c;
  c.obs_var = p.number("obs_var", c.obs_var);
  c.action_noise_var = p.number("action_noise_var", c.action_noise_var);
  c.prior_var = p.number("prior_var", c.prior_var);
  c.horizon = positive(p, "horizon", c.horizon);
  c.n_mc = positive(p, "n_mc", c.n_mc);
  c.seed = seed;
  c.validate();
  const int k_min = p.integer("k_min", std::min(100, c.horizon / 2));
  const int k_max = p.integer("k_max", c.horizon);
  if (!(10 <= k_min && k_min < k_max && k_max <= c.horizon))
    throw ConfigError("params.k_min/k_max: need 10 <= k_min < k_max <= horizon");
  const Exec exec = exec_of(p);
  return [=] {
    const auto r = run_cascade(c, exec);
    const auto fit = fit_rate(r.mse, k_min, k_max);
    Csv csv({"k", "Sigma_k"});
    for (int k = 1; k <= c.horizon; ++k) csv.row({double(k), r.mse[k - 1]});
    ExperimentOutput out;
    out.artifacts.push_back({"cascade.csv", csv.str()});
    out.summary = {{"fitted_exponent", fit.exponent},
                   {"exponent_stderr", fit.stderr_},
                   {"k_min", k_min},
                   {"k_max", k_max},
                   {"action_noise_var", c.action_noise_var}};
    return out;
  };
}

std::function<ExperimentOutput()> prep_game(const Params& p, std::uint64_t seed) {
  GameConfig g;
  g.obs_var = p.number("obs_var", g.obs_var);
  g.action_noise_var = p.number("action_noise_var", g.action_noise_var);
  g.prior_var = p.number("prior_var", g.prior_var);
  g.horizon = positive(p, "horizon", g.horizon);
  g.n_mc = positive(p, "n_mc", g.n_mc);
  g.seed = seed;
  g.variant = parse_game_variant(p.text("variant", "alternating"));
  g.lag_noise = p.flag("lag_noise", g.lag_noise);
  g.adversary_prior = parse_adversary_prior(p.text("adversary_prior", "ours"));
  g.validate();
  const int k_min = p.integer("k_min", std::min(500, g.horizon));
  const int k_max = p.integer("k_max", g.horizon);
  if (!(10 <= k_min && k_min < k_max && k_max <= g.horizon))
    throw ConfigError("params.k_min/k_max: need 10 <= k_min < k_max <= horizon");
  const Exec exec = exec_of(p);
  return [=] {
    const auto r = run_localization_game(g, exec);
    Csv csv({"k", "Sigma_k", "k_Sigma_k", "mse", "gain"});
    double ks = 0.0, km = 0.0;
    for (int k = 1; k <= g.horizon; ++k) {
      csv.row({double(k), r.covariance[k - 1], k * r.covariance[k - 1], r.mse[k - 1], r.gain[k - 1]});
      if (k >= k_min && k <= k_max) {
        ks += k * r.covariance[k - 1];
        km += k * r.mse[k - 1];
      }
    }
    const double cnt = k_max - k_min + 1;
    const auto fit = fit_rate(r.covariance, k_min, k_max);
    ExperimentOutput out;
    out.artifacts.push_back({"game.csv", csv.str()});
    out.summary = {{"mean_k_sigma", ks / cnt},
                   {"mean_k_mse", km / cnt},
                   {"fitted_exponent", fit.exponent},
                   {"k_min", k_min},
                   {"k_max", k_max}};
    return out;
  };
}

std::function<ExperimentOutput()> prep_garp(const Params& p, std::uint64_t seed) {
  const auto data = dataset_from_params(p, seed);
  const double tol = p.number("tol", 1e-9);
  const Exec exec = exec_of(p);
  return [=] {
    const auto g = check_garp(data, tol, exec);
    Json cycle = Json::array();
    for (int i : g.violating_cycle) cycle.push_back(i + 1);
    ExperimentOutput out;
    out.summary = {{"passes", g.passes}, {"violating_cycle", cycle}, {"n", data.size()}};
    out.artifacts.push_back({"dataset.csv", dataset_csv(data)});
    out.artifacts.push_back({"garp.json", dump(out.summary)});
    return out;
  };
}

std::function<ExperimentOutput()> prep_afriat(const Params& p, std::uint64_t seed) {
  const auto data = dataset_from_params(p, seed);
  data.validate();
  const double tol = p.number("tol", 1e-9);
  const Exec exec = exec_of(p);
  return [=] {
    const auto cert = afriat_feasibility(data, tol, exec);
    const bool garp = check_garp(data, tol, exec).passes;
    Json j = {{"feasible", cert.has_value()}, {"garp_passes", garp}, {"agrees_with_garp", garp == cert.has_value()}};
    if (cert) {
      j["u"] = to_json(cert->u);
      j["lambda"] = to_json(cert->lambda);
      j["max_violation"] = afriat_max_violation(*cert, data);
    }
    ExperimentOutput out;
    out.artifacts.push_back({"dataset.csv", dataset_csv(data)});
    out.artifacts.push_back({"afriat.json", dump(j)});
    out.summary = j;
    return out;
  };
}

std::function<ExperimentOutput()> prep_detect(const Params& p, std::uint64_t seed) {
  const auto data = dataset_from_params(p, seed);
  const double sigma = p.number("detector_sigma", p.number("noise_sigma", 0.05));
  const double gamma = p.number("gamma", 0.05);
  if (!(sigma > 0.0)) throw ConfigError("params.noise_sigma: must be positive");
  if (!(gamma > 0.0 && gamma < 1.0)) throw ConfigError("params.gamma: must lie in (0, 1)");
  const int n_mc = positive(p, "n_mc", 199);
  DetectOptions opts;
  opts.exec = exec_of(p);
  if (p.has("r_max")) opts.r_max = p.number("r_max");
  return [=] {
    const auto r = detect_noisy(data, sigma, gamma, n_mc, splitmix64(seed ^ 0xde7ULL), opts);
    Json j = {{"statistic", r.statistic}, {"threshold", r.threshold},
              {"decision", r.reject ? "reject" : "accept"}, {"reject", r.reject},
              {"p_value_estimate", r.p_value}, {"overflow", r.overflow},
              {"null_weights", to_json(r.null_weights)},
              {"garp_passes", check_garp(data).passes}};
    ExperimentOutput out;
    out.artifacts.push_back({"dataset.csv", dataset_csv(data)});
    out.artifacts.push_back({"detection.json", dump(j)});
    out.summary = j;
    return out;
  };
}

std::function<ExperimentOutput()> prep_probe_opt(const Params& p, std::uint64_t seed) {
  SyntheticRadar radar = radar_from_params(p);
  if (!p.sub("radar").has("rational")) radar.rational = false;
  const Matrix probes = probes_from_params(p, seed);
  if (probes.cols() != radar.weights.size())
    throw ConfigError("params.radar.weights: dimension differs from the probes");
  const double sigma = p.number("noise_sigma", 0.05);
  const double gamma = p.number("gamma", 0.05);
  if (!(sigma > 0.0)) throw ConfigError("params.noise_sigma: must be positive");
  if (!(gamma > 0.0 && gamma < 1.0)) throw ConfigError("params.gamma: must lie in (0, 1)");
  const int n_iter = p.integer("n_iter", 30);
  if (n_iter < 0) throw ConfigError("params.n_iter: must be nonnegative");
  const SpsaGains gains = gains_from_params(p);
  ProbeOptimizationOptions opts;
  opts.n_inner = positive(p, "n_inner", opts.n_inner);
  opts.n_calibration = positive(p, "n_calibration", opts.n_calibration);
  opts.alpha_min = p.number("alpha_min", opts.alpha_min);
  opts.exec = exec_of(p);
  return [=] {
    const auto r = optimize_probes_spsa(probes, radar, sigma, gamma, n_iter, gains, seed, opts);
    Csv trace({"iteration", "type_ii"});
    for (std::size_t i = 0; i < r.trace.size(); ++i) trace.row({double(i), r.trace[i]});
    Csv pc(concat({"n"}, indexed("alpha", r.probes.cols())));
    for (Eigen::Index n = 0; n < r.probes.rows(); ++n) {
      std::vector<double> row{double(n + 1)};
      append(row, r.probes.row(n).transpose());
      pc.row(row);
    }
    ExperimentOutput out;
    out.artifacts.push_back({"trace.csv", trace.str()});
    out.artifacts.push_back({"probes.csv", pc.str()});
    out.summary = {{"initial_type_ii", r.trace.front()},
                   {"final_type_ii", r.trace.back()},
                   {"flat_objective", r.flat_objective},
                   {"n_iter", n_iter}};
    return out;
  };
}

}  // namespace

std::function<ExperimentOutput()> prepare_experiment(const ExperimentConfig& config) {
  if (!is_experiment(config.experiment))
    throw ConfigError("config.experiment: unknown experiment '" + config.experiment + "'");
  const Params p(config.params);
  const std::uint64_t s = config.seed;
  const std::string& e = config.experiment;
  if (e == "simulate") return prep_simulate(p, s);
  if (e == "inverse-kf") return prep_inverse_kf(p, s);
  if (e == "inverse-finite") return prep_inverse_finite(p, s);
  if (e == "particle") return prep_particle(p, s);
  if (e == "mle-profile") return prep_mle_profile(p, s);
  if (e == "crb") return prep_crb(p, s);
  if (e == "cascade") return prep_cascade(p, s);
  if (e == "game") return prep_game(p, s);
  if (e == "garp") return prep_garp(p, s);
  if (e == "afriat") return prep_afriat(p, s);
  if (e == "detect") return prep_detect(p, s);
  return prep_probe_opt(p, s);
}

void ExperimentConfig::validate() const { (void)prepare_experiment(*this); }

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw Error("sha256 failed");
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
  return os.str();
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return sha256_hex(ss.str());
}

Json RunRecord::to_json() const {
  Json files = Json::array();
  for (const auto& f : outputs) files.push_back({{"file", f.name}, {"sha256", f.sha256}, {"bytes", f.bytes}});
  return Json{{"config", config},   {"version", version}, {"wall_time_s", wall_time_s},
              {"outputs", files},   {"summary", summary}};
}

RunRecord run_experiment(const ExperimentConfig& config) {
  auto job = prepare_experiment(config);
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentOutput out = job();
  out.artifacts.push_back({"summary.json", dump(out.summary)});
  namespace fs = std::filesystem;
  fs::create_directories(config.output_dir);
  RunRecord rec;
  rec.config = config.to_json();
  rec.version = software_version();
  rec.summary = out.summary;
  for (const auto& a : out.artifacts) {
    const fs::path path = config.output_dir / a.name;
    std::ofstream f(path, std::ios::binary);
    f << a.content;
    if (!f) throw Error("cannot write '" + path.string() + "'");
    f.close();
    rec.outputs.push_back({a.name, sha256_hex(a.content), a.content.size()});
  }
  rec.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::ofstream(config.output_dir / "run_record.json") << dump(rec.to_json());
  return rec;
}

bool SuiteReport::all_passed() const {
  return std::all_of(entries.begin(), entries.end(), [](const auto& e) { return e.passed; });
}

std::string SuiteReport::table() const {
  std::size_t w = 5;
  for (const auto& e : entries) w = std::max(w, e.entry.size());
  std::ostringstream os;
  os << std::left << std::setw(int(w)) << "entry" << "  result  detail\n";
  for (const auto& e : entries)
    os << std::setw(int(w)) << e.entry << "  " << (e.passed ? "PASS  " : "FAIL  ") << "  " << e.message << '\n';
  return os.str();
}

SuiteReport reproduce_all(const std::filesystem::path& suite_dir, const std::filesystem::path& out_dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(suite_dir)) throw ConfigError("suite directory '" + suite_dir.string() + "' not found");
  std::vector<fs::path> configs;
  for (const auto& e : fs::directory_iterator(suite_dir))
    if (e.is_regular_file() && e.path().extension() == ".json") configs.push_back(e.path());
  if (configs.empty()) throw ConfigError("suite directory '" + suite_dir.string() + "' holds no configs");
  std::sort(configs.begin(), configs.end());

  SuiteReport report;
  for (const auto& path : configs) {
    SuiteEntryResult r;
    r.entry = path.stem().string();
    try {
      std::ifstream in(path);
      Json j;
      try {
        j = Json::parse(in);
      } catch (const Json::exception& e) {
        throw ConfigError(std::string("invalid JSON: ") + e.what());
      }
      ExperimentConfig cfg = ExperimentConfig::from_json(j);
      cfg.output_dir = out_dir / r.entry;
      std::vector<SuiteCheck> checks;
      if (j.contains("checks")) {
        if (!j["checks"].is_array()) throw ConfigError("checks: expected an array");
        for (const auto& c : j["checks"]) {
          if (!c.is_object() || !c.contains("pointer") || !c["pointer"].is_string())
            throw ConfigError("checks: each entry needs a string 'pointer'");
          SuiteCheck sc;
          sc.pointer = c["pointer"].get<std::string>();
          sc.name = c.value("name", sc.pointer);
          if (c.contains("min")) sc.min = c["min"].get<double>();
          if (c.contains("max")) sc.max = c["max"].get<double>();
          checks.push_back(sc);
        }
      }
      const RunRecord rec = run_experiment(cfg);
      r.passed = true;
      std::ostringstream msg;
      for (const auto& c : checks) {
        const Json::json_pointer ptr(c.pointer);
        double v = NAN;
        if (rec.summary.contains(ptr)) {
          const Json& x = rec.summary.at(ptr);
          if (x.is_boolean()) v = x.get<bool>() ? 1.0 : 0.0;
          else if (x.is_number()) v = x.get<double>();
        }
        const bool ok = v >= c.min && v <= c.max;
        r.passed = r.passed && ok;
        if (msg.tellp() > 0) msg << "; ";
        msg << c.name << '=' << fmt17(v) << (ok ? " ok" : " OUT OF RANGE");
      }
      r.message = checks.empty() ? "ran (no checks)" : msg.str();
    } catch (const ConfigError& e) {
      r.message = std::string("validation: ") + e.what();
    } catch (const std::exception& e) {
      r.message = std::string("error: ") + e.what();
    }
    report.entries.push_back(r);
  }
  return report;
}

}  // namespace invcog

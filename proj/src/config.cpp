#include "invcog/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "invcog/errors.hpp"
#include "invcog/rng.hpp"

namespace invcog {

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = {
      "simulate", "inverse-kf", "inverse-finite", "particle", "mle-profile", "crb",
      "cascade",  "game",       "garp",           "afriat",   "detect",      "probe-opt"};
  return names;
}

bool is_experiment(const std::string& name) {
  for (const auto& n : experiment_names())
    if (n == name) return true;
  return false;
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

ExperimentConfig ExperimentConfig::from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("config: top level must be an object");
  ExperimentConfig c;
  if (!j.contains("experiment") || !j["experiment"].is_string())
    throw ConfigError("config.experiment: missing or not a string");
  c.experiment = j["experiment"].get<std::string>();
  if (!is_experiment(c.experiment))
    throw ConfigError("config.experiment: unknown experiment '" + c.experiment + "'");
  if (j.contains("params")) {
    if (!j["params"].is_object()) throw ConfigError("config.params: must be an object");
    c.params = j["params"];
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_integer() || j["seed"].get<long long>() < 0)
      throw ConfigError("config.seed: must be a nonnegative integer");
    c.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("output_dir")) {
    if (!j["output_dir"].is_string()) throw ConfigError("config.output_dir: must be a string");
    c.output_dir = j["output_dir"].get<std::string>();
  }
  return c;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::exception& e) {
    throw ConfigError("config '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return from_json(j);
}

Json ExperimentConfig::to_json() const {
  return Json{{"experiment", experiment},
              {"params", params},
              {"seed", seed},
              {"output_dir", output_dir.string()}};
}

// ---------------------------------------------------------------------------

const Json& Params::at(const std::string& key) const {
  if (!j_.contains(key)) throw ConfigError("params." + key + ": required");
  return j_.at(key);
}

double Params::number(const std::string& key, std::optional<double> def) const {
  if (!j_.contains(key)) {
    if (def) return *def;
    throw ConfigError("params." + key + ": required");
  }
  const Json& v = j_.at(key);
  if (!v.is_number()) throw ConfigError("params." + key + ": expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ConfigError("params." + key + ": not finite");
  return d;
}

int Params::integer(const std::string& key, std::optional<int> def) const {
  if (!j_.contains(key)) {
    if (def) return *def;
    throw ConfigError("params." + key + ": required");
  }
  const Json& v = j_.at(key);
  if (!v.is_number_integer()) throw ConfigError("params." + key + ": expected an integer");
  return v.get<int>();
}

bool Params::flag(const std::string& key, bool def) const {
  if (!j_.contains(key)) return def;
  if (!j_.at(key).is_boolean()) throw ConfigError("params." + key + ": expected true/false");
  return j_.at(key).get<bool>();
}

std::string Params::text(const std::string& key, const std::string& def) const {
  if (!j_.contains(key)) return def;
  if (!j_.at(key).is_string()) throw ConfigError("params." + key + ": expected a string");
  return j_.at(key).get<std::string>();
}

Vector Params::vector(const std::string& key) const { return vector_from_json(at(key), "params." + key); }
Matrix Params::matrix(const std::string& key) const { return matrix_from_json(at(key), "params." + key); }

Params Params::sub(const std::string& key) const {
  static const Json empty = Json::object();
  if (!j_.contains(key)) return Params(empty);
  if (!j_.at(key).is_object()) throw ConfigError("params." + key + ": expected an object");
  return Params(j_.at(key));
}

Matrix matrix_from_json(const Json& j, const std::string& field) {
  if (j.is_number()) return Matrix::Constant(1, 1, j.get<double>());
  if (!j.is_array() || j.empty()) throw ConfigError(field + ": expected a nonempty nested array");
  const bool nested = j[0].is_array();
  const std::size_t rows = nested ? j.size() : 1;
  const std::size_t cols = nested ? j[0].size() : j.size();
  if (cols == 0) throw ConfigError(field + ": empty row");
  Matrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    const Json& row = nested ? j[r] : j;
    if (!row.is_array() || row.size() != cols) throw ConfigError(field + ": ragged rows");
    for (std::size_t c = 0; c < cols; ++c) {
      if (!row[c].is_number()) throw ConfigError(field + ": non-numeric entry");
      m(r, c) = row[c].get<double>();
    }
  }
  if (!m.allFinite()) throw ConfigError(field + ": non-finite entry");
  return m;
}

Vector vector_from_json(const Json& j, const std::string& field) {
  if (j.is_number()) return Vector::Constant(1, j.get<double>());
  if (!j.is_array() || j.empty()) throw ConfigError(field + ": expected a nonempty array");
  Vector v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ConfigError(field + ": non-numeric entry");
    v(i) = j[i].get<double>();
  }
  if (!v.allFinite()) throw ConfigError(field + ": non-finite entry");
  return v;
}

Json to_json(const Matrix& m) {
  Json out = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    out.push_back(row);
  }
  return out;
}

Json to_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

LinearGaussianModel model_from_params(const Params& p) {
  LinearGaussianModel m = LinearGaussianModel::scalar(0.9, 1.5, 1.0, 1.0, 0.0, 1.0);
  if (p.has("A")) m.A = p.matrix("A");
  if (p.has("C")) m.C = p.matrix("C");
  if (p.has("Q")) m.Q = p.matrix("Q");
  if (p.has("R")) m.R = p.matrix("R");
  if (p.has("prior_mean")) m.prior_mean = p.vector("prior_mean");
  else if (m.prior_mean.size() != m.A.rows()) m.prior_mean = Vector::Zero(m.A.rows());
  if (p.has("prior_cov")) m.prior_cov = p.matrix("prior_cov");
  else if (m.prior_cov.rows() != m.A.rows()) m.prior_cov = Matrix::Identity(m.A.rows(), m.A.rows());
  m.validate();
  return m;
}

ActionModel action_from_params(const Params& p) {
  ActionModel a;
  a.phi = parse_phi(p.text("phi", "identity"));
  a.noise_var = p.number("action_noise_var", 0.5);
  a.validate();
  return a;
}

SyntheticRadar radar_from_params(const Params& p) {
  const Params r = p.sub("radar");
  const UtilityKind kind = parse_utility_kind(r.text("kind", "cobb_douglas"));
  Vector w = r.has("weights") ? r.vector("weights") : Vector::Constant(p.integer("dim", 2), 1.0);
  return SyntheticRadar::make(kind, w, r.flag("rational", true));
}

SpsaGains gains_from_params(const Params& p) {
  const Params g = p.sub("gains");
  SpsaGains s;
  s.a = g.number("a", s.a);
  s.c = g.number("c", s.c);
  s.A = g.number("A", s.A);
  s.alpha_exp = g.number("alpha_exp", s.alpha_exp);
  s.gamma_exp = g.number("gamma_exp", s.gamma_exp);
  s.validate();
  return s;
}

Matrix probes_from_params(const Params& p, std::uint64_t seed) {
  if (p.has("probes")) {
    Matrix probes = p.matrix("probes");
    if ((probes.array() <= 0.0).any()) throw ConfigError("params.probes: entries must be positive");
    return probes;
  }
  const int n = p.integer("n_points", 50);
  const int m = p.integer("dim", 2);
  const double lo = p.number("probe_lo", 0.5), hi = p.number("probe_hi", 2.0);
  if (n < 1 || m < 1) throw ConfigError("params.n_points/dim: must be positive");
  if (!(lo > 0.0 && hi >= lo)) throw ConfigError("params.probe_lo/probe_hi: need 0 < lo <= hi");
  Rng rng = make_rng(seed ^ 0x9b05688cULL);
  std::uniform_real_distribution<double> u(lo, hi);
  Matrix probes(n, m);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) probes(i, j) = u(rng);
  return probes;
}

ProbeResponseDataset dataset_from_params(const Params& p, std::uint64_t seed, bool* noisy) {
  ProbeResponseDataset data;
  bool has_noise = false;
  if (p.has("dataset_csv")) {
    data = read_dataset_csv(p.text("dataset_csv", ""));
  } else if (p.has("responses")) {
    data.probes = p.matrix("probes");
    data.responses = p.matrix("responses");
  } else {
    data = generate_radar_responses(radar_from_params(p), probes_from_params(p, seed), seed);
    const double sigma = p.number("noise_sigma", 0.0);
    if (sigma < 0.0) throw ConfigError("params.noise_sigma: must be nonnegative");
    if (sigma > 0.0) {
      data = add_response_noise(data, sigma, seed);
      has_noise = true;
    }
  }
  data.validate(true);
  if (noisy) *noisy = has_noise;
  return data;
}

ProbeResponseDataset read_dataset_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open dataset '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line)) throw DataError("dataset '" + path.string() + "' is empty");
  const auto cols = std::count(line.begin(), line.end(), ',');
  if (cols < 2 || cols % 2 != 0) throw DataError("dataset header must be n,alpha_1..,beta_1..");
  const Eigen::Index m = cols / 2;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> vals;
    while (std::getline(ss, cell, ',')) {
      try {
        vals.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw DataError("dataset: non-numeric cell '" + cell + "'");
      }
    }
    if (static_cast<Eigen::Index>(vals.size()) != 2 * m + 1) throw DataError("dataset: ragged row");
    rows.push_back(std::move(vals));
  }
  ProbeResponseDataset d{Matrix(rows.size(), m), Matrix(rows.size(), m)};
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (Eigen::Index i = 0; i < m; ++i) {
      d.probes(r, i) = rows[r][1 + i];
      d.responses(r, i) = rows[r][1 + m + i];
    }
  return d;
}

std::string dataset_csv(const ProbeResponseDataset& data) {
  std::string out = "n";
  for (Eigen::Index i = 1; i <= data.dim(); ++i) out += ",alpha_" + std::to_string(i);
  for (Eigen::Index i = 1; i <= data.dim(); ++i) out += ",beta_" + std::to_string(i);
  out += '\n';
  for (Eigen::Index n = 0; n < data.size(); ++n) {
    out += std::to_string(n + 1);
    for (Eigen::Index i = 0; i < data.dim(); ++i) out += ',' + fmt17(data.probes(n, i));
    for (Eigen::Index i = 0; i < data.dim(); ++i) out += ',' + fmt17(data.responses(n, i));
    out += '\n';
  }
  return out;
}

}  // namespace invcog

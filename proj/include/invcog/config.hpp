#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "invcog/detection.hpp"
#include "invcog/inverse_filter.hpp"
#include "invcog/spsa.hpp"

namespace invcog {

using Json = nlohmann::json;

const std::vector<std::string>& experiment_names();
bool is_experiment(const std::string& name);

struct ExperimentConfig {
  std::string experiment;
  Json params = Json::object();
  std::uint64_t seed = 0;
  std::filesystem::path output_dir = "out";

  static ExperimentConfig from_json(const Json& j);
  static ExperimentConfig load(const std::filesystem::path& path);
  Json to_json() const;
  /// Field-level checks for the chosen experiment; throws ConfigError.
  void validate() const;
};

/// Typed access to an experiment's params with field-level error messages.
class Params {
 public:
  explicit Params(const Json& j) : j_(j) {}

  bool has(const std::string& key) const { return j_.contains(key); }
  double number(const std::string& key, std::optional<double> def = std::nullopt) const;
  int integer(const std::string& key, std::optional<int> def = std::nullopt) const;
  bool flag(const std::string& key, bool def) const;
  std::string text(const std::string& key, const std::string& def) const;
  Vector vector(const std::string& key) const;
  Matrix matrix(const std::string& key) const;
  Params sub(const std::string& key) const;
  const Json& raw() const { return j_; }

 private:
  const Json& at(const std::string& key) const;
  const Json& j_;
};

Matrix matrix_from_json(const Json& j, const std::string& field);
Vector vector_from_json(const Json& j, const std::string& field);
Json to_json(const Matrix& m);
Json to_json(const Vector& v);

/// Linear-Gaussian model from params. Scalars are accepted for 1x1 entries;
/// missing entries take the scalar defaults A = 0.9, C = 1.5, Q = R = 1,
/// prior N(0, 1).
LinearGaussianModel model_from_params(const Params& p);
ActionModel action_from_params(const Params& p);
SyntheticRadar radar_from_params(const Params& p);
SpsaGains gains_from_params(const Params& p);

/// Probes from "probes" (nested array) or drawn uniformly in
/// [probe_lo, probe_hi] with "n_points" rows and "dim" columns.
Matrix probes_from_params(const Params& p, std::uint64_t seed);

/// Dataset from "probes"/"responses", a CSV file in "dataset_csv", or
/// radar-generated responses plus optional "noise_sigma".
ProbeResponseDataset dataset_from_params(const Params& p, std::uint64_t seed, bool* noisy = nullptr);

ProbeResponseDataset read_dataset_csv(const std::filesystem::path& path);
std::string dataset_csv(const ProbeResponseDataset& data);

/// 17 significant digits, enough to round-trip a double.
std::string fmt17(double v);

}  // namespace invcog

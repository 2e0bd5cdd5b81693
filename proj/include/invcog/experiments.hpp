#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "invcog/config.hpp"

namespace invcog {

std::string software_version();

struct Artifact {
  std::string name;  // file name inside output_dir
  std::string content;
};

struct ExperimentOutput {
  std::vector<Artifact> artifacts;
  Json summary = Json::object();  // also written as summary.json
};

/// Parses and checks every parameter, returning the computation to run.
/// Throws ConfigError before any work is done.
std::function<ExperimentOutput()> prepare_experiment(const ExperimentConfig& config);

struct FileDigest {
  std::string name;
  std::string sha256;
  std::uintmax_t bytes = 0;
};

struct RunRecord {
  Json config;
  std::string version;
  double wall_time_s = 0.0;
  std::vector<FileDigest> outputs;
  Json summary;
  Json to_json() const;
};

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& path);

/// Validates, runs and writes artifacts plus run_record.json into
/// config.output_dir. Nothing is written if validation fails.
RunRecord run_experiment(const ExperimentConfig& config);

/// Checks attached to a suite entry: a JSON pointer into the summary and
/// an inclusive [min, max] range.
struct SuiteCheck {
  std::string name;
  std::string pointer;
  double min = -std::numeric_limits<double>::infinity();
  double max = std::numeric_limits<double>::infinity();
};

struct SuiteEntryResult {
  std::string entry;
  bool passed = false;
  std::string message;
};

struct SuiteReport {
  std::vector<SuiteEntryResult> entries;
  bool all_passed() const;
  std::string table() const;
};

/// Runs every *.json config in suite_dir, each into out_dir/<stem>.
/// Throws ConfigError when the directory holds no configs.
SuiteReport reproduce_all(const std::filesystem::path& suite_dir,
                          const std::filesystem::path& out_dir);

}  // namespace invcog

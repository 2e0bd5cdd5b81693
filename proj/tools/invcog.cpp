// Command-line front end: one subcommand per experiment plus `reproduce`.

#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "invcog/errors.hpp"
#include "invcog/experiments.hpp"

namespace {

constexpr int kExitFailures = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

// key=value with value parsed as JSON, falling back to a plain string.
void apply_override(invcog::Json& params, const std::string& kv) {
  const auto eq = kv.find('=');
  if (eq == std::string::npos || eq == 0) throw invcog::ConfigError("--set expects key=value, got '" + kv + "'");
  const std::string key = kv.substr(0, eq), value = kv.substr(eq + 1);
  try {
    params[key] = invcog::Json::parse(value);
  } catch (const invcog::Json::exception&) {
    params[key] = value;
  }
}

std::uint64_t parse_seed(const std::string& text, const std::string& origin) {
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(text, &used);
    if (used != text.size() || text.front() == '-') throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw invcog::ConfigError(origin + ": '" + text + "' is not a nonnegative integer");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Inverse filtering, identification and revealed-preference experiments"};
  app.set_version_flag("--version", invcog::software_version());
  app.require_subcommand(1);

  std::string config_path, out_dir, seed_flag;
  std::vector<std::string> overrides;
  std::vector<CLI::App*> experiment_cmds;
  for (const auto& name : invcog::experiment_names()) {
    CLI::App* sub = app.add_subcommand(name, "run the '" + name + "' experiment");
    sub->add_option("--config", config_path, "JSON experiment config");
    sub->add_option("--seed", seed_flag, "seed (overrides INVCOG_SEED and the config)");
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--set", overrides, "parameter override key=value (value parsed as JSON)");
    experiment_cmds.push_back(sub);
  }
  std::string suite_dir;
  CLI::App* repro = app.add_subcommand("reproduce", "run every config in a suite directory");
  repro->add_option("suite_dir", suite_dir, "directory of suite configs")->required();
  repro->add_option("--out", out_dir, "output root (default: suite_out)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    if (repro->parsed()) {
      const auto report = invcog::reproduce_all(suite_dir, out_dir.empty() ? "suite_out" : out_dir);
      std::cout << report.table();
      if (!report.all_passed()) {
        std::cerr << "failing entries:";
        for (const auto& e : report.entries)
          if (!e.passed) std::cerr << ' ' << e.entry;
        std::cerr << '\n';
        return kExitFailures;
      }
      return 0;
    }

    CLI::App* chosen = nullptr;
    for (auto* sub : experiment_cmds)
      if (sub->parsed()) chosen = sub;
    invcog::ExperimentConfig cfg;
    if (!config_path.empty()) cfg = invcog::ExperimentConfig::load(config_path);
    if (!cfg.experiment.empty() && cfg.experiment != chosen->get_name())
      throw invcog::ConfigError("config.experiment '" + cfg.experiment + "' does not match subcommand '" +
                                chosen->get_name() + "'");
    cfg.experiment = chosen->get_name();
    if (const char* env = std::getenv("INVCOG_SEED"); env && *env) cfg.seed = parse_seed(env, "INVCOG_SEED");
    if (!seed_flag.empty()) cfg.seed = parse_seed(seed_flag, "--seed");
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    for (const auto& kv : overrides) apply_override(cfg.params, kv);

    const auto rec = invcog::run_experiment(cfg);
    std::cout << rec.summary.dump(2) << '\n';
    return 0;
  } catch (const invcog::ConfigError& e) {
    std::cerr << "invalid configuration: " << e.what() << '\n';
    return kExitConfig;
  } catch (const invcog::Error& e) {
    std::cerr << "computation failed: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
}

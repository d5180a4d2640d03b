// uqlab: runs one uncertainty-quantification experiment and writes its CSVs.
#include <exception>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "uqlab/app/config.hpp"
#include "uqlab/app/experiments.hpp"
#include "uqlab/error.hpp"

namespace {

enum ExitCode { kOk = 0, kFailure = 1, kConfigFailure = 2, kDataFailure = 3, kDivergence = 4 };

int run(int argc, char** argv) {
  using namespace uqlab;
  CLI::App cli{"Seeded uncertainty-quantification experiments with semicolon-CSV output."};
  cli.name("uqlab");
  cli.require_subcommand(0, 1);

  std::string use_case, config_path;
  bool print_config = false, quiet = false;
  cli.add_option("--use-case", use_case, "use case (alternative to the subcommand)");
  cli.add_option("--config", config_path, "config file; flags given alongside it win");
  cli.add_flag("--print-config", print_config, "print the effective config and exit");
  cli.add_flag("-q,--quiet", quiet, "no progress output");

  std::map<std::string, std::string> flag_values;
  for (const app::ConfigKey& key : app::config_keys()) {
    std::string names = "--" + key.qualified();
    if (key.qualified() == "experiment.seed") names = "--seed," + names;
    if (key.qualified() == "experiment.out_dir") names = "--out-dir," + names;
    if (key.qualified() == "experiment.use_case") continue;
    cli.add_option_function<std::string>(
           names, [&flag_values, q = key.qualified()](const std::string& v) { flag_values[q] = v; }, key.help)
        ->group(key.section);
  }
  for (app::UseCase u : app::all_use_cases()) {
    cli.add_subcommand(std::string(app::to_string(u)), "run the " + std::string(app::to_string(u)) + " use case")
        ->fallthrough();
  }

  try {
    cli.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = cli.exit(e);
    return code == 0 ? kOk : kConfigFailure;
  }

  try {
    app::ExperimentConfig cfg;
    if (!config_path.empty()) cfg = app::load_config(config_path, cfg);
    for (const auto* sub : cli.get_subcommands()) {
      if (!use_case.empty() && use_case != sub->get_name())
        throw ConfigError("--use-case " + use_case + " conflicts with subcommand " + sub->get_name());
      use_case = sub->get_name();
    }
    if (!use_case.empty()) cfg.use_case = app::parse_use_case(use_case);
    if (use_case.empty() && config_path.empty())
      throw ConfigError("no use case given (subcommand, --use-case or --config)");
    for (const auto& [key, value] : flag_values) app::set_config_value(cfg, key, value);
    cfg.validate();
    if (print_config) {
      std::cout << app::echo_config(cfg);
      return kOk;
    }
    const app::RunResult result = app::run_experiment(cfg, quiet ? nullptr : &std::cerr);
    for (const auto& path : app::write_artifacts(result)) std::cout << path.string() << "\n";
    return kOk;
  } catch (const ConfigError& e) {
    std::cerr << "uqlab: config error: " << e.what() << "\n";
    return kConfigFailure;
  } catch (const DataError& e) {
    std::cerr << "uqlab: data error: " << e.what() << "\n";
    return kDataFailure;
  } catch (const TrainingError& e) {
    std::cerr << "uqlab: training diverged: " << e.what() << "\n";
    return kDivergence;
  } catch (const std::exception& e) {
    std::cerr << "uqlab: " << e.what() << "\n";
    return kFailure;
  }
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cmf/config.hpp"
#include "cmf/errors.hpp"
#include "cmf/experiment.hpp"
#include "cmf/version.hpp"

int main(int argc, char** argv) {
  CLI::App app{"simulator and analysis tool for co-evolving latent-space networks"};
  app.set_version_flag("--version", std::string(cmf::kVersion));
  app.require_subcommand(1);

  std::string config_path;
  std::string preset = "desk";
  std::uint64_t seed = 0;
  int workers = 1;
  app.add_option("--config", config_path, "configuration file (overrides the preset)");
  app.add_option("--preset", preset, "built-in parameter set")
      ->check(CLI::IsMember({"desk", "paper"}));
  CLI::Option* seed_opt = app.add_option("--seed", seed, "seed override (wins over the file)");
  app.add_option("--workers", workers, "worker thread count")->check(CLI::PositiveNumber);

  CLI::App* cmd_simulate = app.add_subcommand("simulate", "particle runs per n and replicate");
  CLI::App* cmd_meanfield =
      app.add_subcommand("meanfield", "reference-measure fixed-point iteration");
  CLI::App* cmd_couple =
      app.add_subcommand("couple-stats", "coupled particle/mean-field statistics");
  CLI::App* cmd_graphon = app.add_subcommand("graphon", "hom-density comparison vs the limit");
  CLI::App* cmd_report = app.add_subcommand("report", "concatenate existing summaries");
  for (CLI::App* sub : {cmd_simulate, cmd_meanfield, cmd_couple, cmd_graphon, cmd_report})
    sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // bad flags are configuration errors
  }

  try {
    cmf::ExperimentConfig config = cmf::preset_by_name(preset);
    if (!config_path.empty()) config = cmf::load_config(config_path, config);
    if (seed_opt->count() > 0) config.model.seed = seed;
    config.validate();

    std::vector<std::string> files;
    if (app.got_subcommand(cmd_simulate)) files = cmf::run_simulate(config, workers);
    if (app.got_subcommand(cmd_meanfield)) files = cmf::run_meanfield(config, workers);
    if (app.got_subcommand(cmd_couple)) files = cmf::run_couple_stats(config, workers);
    if (app.got_subcommand(cmd_graphon)) files = cmf::run_graphon(config, workers);
    if (app.got_subcommand(cmd_report)) files = cmf::run_report(config, workers);

    for (const auto& f : files) std::cout << (config.output_dir / f).string() << "\n";
    if (app.got_subcommand(cmd_report)) {
      std::ifstream in(config.output_dir / "report.txt");
      std::cout << in.rdbuf();
    }
    return 0;
  } catch (const cmf::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const cmf::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

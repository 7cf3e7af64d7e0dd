#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "vefs/config.hpp"
#include "vefs/scenarios.hpp"

int main(int argc, char **argv) {
  CLI::App app{"viscoelastic free-surface flow simulator"};
  app.require_subcommand(1);

  auto *runcmd = app.add_subcommand("run", "execute a scenario from a config file");
  std::string config_path;
  std::string scenario, out_dir;
  std::vector<std::string> overrides;
  long seed = -1;
  runcmd->add_option("config", config_path, "config file")->required();
  runcmd->add_option("--scenario", scenario, "override the scenario");
  runcmd->add_option("--override", overrides, "section.key=value override (repeatable)");
  runcmd->add_option("--out", out_dir, "output directory");
  runcmd->add_option("--seed", seed, "random seed for corpus generation");

  CLI11_PARSE(app, argc, argv);

  try {
    vefs::RunConfig cfg = vefs::parse_config_file(config_path);
    for (const auto &ov : overrides) vefs::apply_override(cfg, ov);
    if (!scenario.empty()) cfg.scenario = scenario;
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (seed >= 0) cfg.seed = static_cast<unsigned long>(seed);
    cfg.validate();
    return vefs::run(cfg);
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "thetactl/commands.hpp"
#include "thetactl/config.hpp"
#include "thetactl/errors.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Optimal ensemble control of theta-neuron populations"};
  app.set_version_flag("--version", std::string(thetactl::version()));
  app.require_subcommand(1);

  std::string config_path;
  std::string preset;
  std::string out_dir = "run";
  std::vector<std::string> overrides;
  std::uint64_t seed = 0;

  const std::map<std::string_view, const char*> help = {
      {"solve-forward", "forward density solve; density snapshots at t = 0, T/2, T"},
      {"optimize", "iterative control improvement; control, cost history, snapshots"},
      {"simulate-particles", "sample and evolve a particle ensemble under the control"},
      {"compare", "particle vs PDE terminal cost"},
      {"increment-check", "increment formula vs two-solve cost difference"},
      {"export-meanfield", "mean-field feedback field of the zero-control dual and its cost"},
  };
  std::vector<CLI::App*> subs;
  for (auto name : thetactl::kSubcommands) {
    auto* sub = app.add_subcommand(std::string(name), help.at(name));
    sub->add_option("--config", config_path, "key=value configuration file");
    sub->add_option("--preset", preset, "parameter preset")->check(CLI::IsMember({"paper", "desk"}));
    sub->add_option("--out", out_dir, "output directory")->capture_default_str();
    sub->add_option("--seed", seed, "particle sampling seed");
    sub->add_option("--set", overrides, "override a configuration key (key=value)");
    subs.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : thetactl::kExitConfig;
  }

  CLI::App* chosen = app.get_subcommands().front();
  thetactl::ConfigSources sources;
  if (!config_path.empty()) sources.config_file = config_path;
  if (!preset.empty()) sources.preset = preset;
  sources.overrides = overrides;
  if (chosen->count("--seed") > 0) sources.seed = seed;

  thetactl::RunConfig config;
  try {
    config = thetactl::load_config(sources);
  } catch (const thetactl::ConfigError& e) {
    std::cerr << "thetactl: error=config reason=\"" << e.what() << "\"\n";
    return thetactl::kExitConfig;
  }
  return thetactl::run_subcommand(chosen->get_name(), config, out_dir, std::cerr);
}

#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lpbf/commands.hpp"

namespace {

// precedence: CLI flag > config file > built-in default
lpbf::ToolkitConfig resolve_config(const std::string& config_file) {
  std::string path = config_file;
  if (path.empty()) {
    const char* env = std::getenv("LPBFPATH_CONFIG");
    if (env && *env) path = env;
  }
  if (path.empty()) return {};
  return lpbf::ToolkitConfig::from_file(path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"DRL toolpath generation toolkit for laser powder bed fusion"};
  app.require_subcommand(1);

  std::string domain, config_file, out_dir = "out", model_file, mode = "direct";
  std::string strategy = "zigzag", toolpath_file, gcode_out;
  std::vector<std::string> strategies;
  std::uint64_t seed = 0;
  int episodes = 0;
  double hatch_um = 0.0;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_file, "config file (ini sections)");
    cmd->add_option("--out", out_dir, "output directory");
    cmd->add_option("--seed", seed, "rng seed");
    cmd->add_option("--hatch-um", hatch_um, "hatch spacing in micrometers");
  };

  CLI::App* train = app.add_subcommand("train", "train a policy on a domain");
  train->add_option("--domain", domain, "domain json file")->required();
  train->add_option("--episodes", episodes, "training episodes");
  add_common(train);

  CLI::App* generate =
      app.add_subcommand("generate", "generate a toolpath from a trained model");
  generate->add_option("--model", model_file, "model json file")->required();
  generate->add_option("--domain", domain, "domain json file")->required();
  generate->add_option("--mode", mode, "direct or voronoi-island");
  add_common(generate);

  CLI::App* baseline =
      app.add_subcommand("baseline", "generate a reference pattern");
  baseline->add_option("--domain", domain, "domain json file")->required();
  baseline->add_option("--strategy", strategy, "zigzag, chessboard or atg");
  add_common(baseline);

  CLI::App* compare =
      app.add_subcommand("compare", "thermal comparison of strategies");
  compare->add_option("--domain", domain, "domain json file")->required();
  compare->add_option("--strategy", strategies, "strategies to compare")
      ->required();
  compare->add_option("--model", model_file, "model file for the dqn strategy");
  add_common(compare);

  CLI::App* export_gcode =
      app.add_subcommand("export-gcode", "fine-tune a toolpath and emit g-code");
  export_gcode->add_option("--toolpath", toolpath_file, "toolpath json file")
      ->required();
  export_gcode->add_option("--out", gcode_out, "g-code output file")
      ->required();

  CLI::App* angle_study =
      app.add_subcommand("angle-study", "turning-angle melt depth study");
  add_common(angle_study);

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(export_gcode))
      return lpbf::cmd_export_gcode(toolpath_file, gcode_out);

    lpbf::ToolkitConfig cfg = resolve_config(config_file);
    CLI::App* active = app.get_subcommands().front();
    auto flag_count = [&](const char* name) -> std::size_t {
      const CLI::Option* opt = active->get_option_no_throw(name);
      return opt ? opt->count() : 0;
    };
    if (flag_count("--seed")) cfg.learner.seed = seed;
    if (flag_count("--hatch-um")) cfg.geometry.hatch_um = hatch_um;
    if (flag_count("--episodes")) cfg.learner.episodes = episodes;

    if (app.got_subcommand(train)) return lpbf::cmd_train(cfg, domain, out_dir);
    if (app.got_subcommand(generate))
      return lpbf::cmd_generate(cfg, model_file, domain, mode, out_dir);
    if (app.got_subcommand(baseline))
      return lpbf::cmd_baseline(cfg, domain, strategy, out_dir);
    if (app.got_subcommand(compare))
      return lpbf::cmd_compare(cfg, domain, strategies, model_file, out_dir);
    if (app.got_subcommand(angle_study))
      return lpbf::cmd_angle_study(cfg, out_dir);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}

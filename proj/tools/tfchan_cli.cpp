#include <iostream>

#include "CLI11.hpp"
#include "tfchan/config.hpp"
#include "tfchan/scenario.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Time-frequency channel scenarios"};
  app.require_subcommand(1);

  std::string config_path;
  std::string output_dir;
  bool dump = false;
  auto* run = app.add_subcommand("run", "Run the scenario described by a config file");
  run->add_option("config", config_path, "Scenario config file")->required()->check(CLI::ExistingFile);
  run->add_option("-o,--output-dir", output_dir, "Overrides [scenario] output_dir");
  run->add_flag("--dump", dump, "Write per-stage CSVs under <output_dir>/dump");

  std::string echo_path;
  auto* echo = app.add_subcommand("echo", "Print the fully resolved config as JSON");
  echo->add_option("config", echo_path, "Scenario config file")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*echo) {
      std::cout << tfchan::to_json(tfchan::load_config(echo_path)).dump(2) << '\n';
      return 0;
    }
    auto cfg = tfchan::load_config(config_path);
    if (!output_dir.empty()) cfg.output_dir = output_dir;
    const auto report = tfchan::run(cfg, {dump});
    for (const auto& w : report["warnings"]) std::cerr << "warning: " << w.get<std::string>() << '\n';
    std::cout << report["result"].dump(2) << '\n';
    std::cout << "report written to " << (cfg.output_dir / "report.json").string() << '\n';
    return 0;
  } catch (const tfchan::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "holepoint/cli/run.hpp"
#include "holepoint/error.hpp"

int main(int argc, char** argv) {
  using namespace holepoint;
  CLI::App app{"Critical points of semilinear Dirichlet problems on domains with a small hole"};
  app.set_version_flag("--version", cli::version() + " (" + cli::build_hash() + ")");
  std::string command, config_path, out_dir = ".";
  bool quiet = false;
  app.add_option("command", command,
                 "solve | critpoints | sweep | radial-sweep | green-verify | predict")
      ->required();
  app.add_option("--config", config_path, "JSON experiment config")->required();
  app.add_option("--out", out_dir, "Output directory (created if missing)");
  app.add_flag("--quiet", quiet, "No summary on standard output");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  const auto cmd = cli::parse_command(command);
  if (!cmd) {
    std::cerr << "holepoint: unknown command '" << command << "'\n";
    return 1;
  }
  cli::ExperimentConfig config;
  try {
    config = cli::load_config(config_path);
  } catch (const Error& e) {
    std::cerr << "holepoint: " << e.what() << '\n';
    return 1;
  }
  return cli::run(config, *cmd, {out_dir, quiet}, std::cout, std::cerr);
}

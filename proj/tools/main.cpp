#include "app/commands.hpp"
#include "app/config.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <iostream>
#include <thread>

int main(int argc, char** argv) {
  using namespace bipolaron;

  CLI::App cli{"Bipolaron formation and transport in a trapped-ion chain"};
  cli.set_version_flag("--version", BIPOLARON_VERSION);
  std::string command;
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  int threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));

  const auto names = app::command_names();
  cli.add_option("command", command, "One of: modes, bmatrix, jmatrix, spectrum, evolve, sweep, mobility")
      ->required()
      ->check(CLI::IsMember(names));
  cli.add_option("--config", config_path, "Run configuration (JSON, comments allowed)")->required();
  cli.add_option("--out", out_dir, "Output directory (overrides output.directory)");
  auto* seed_opt = cli.add_option("--seed", seed, "Sampler seed (overrides thermal.sampler.seed)");
  cli.add_option("--threads", threads, "Worker threads for thermal ensembles")->check(CLI::Range(1, 1024));

  try {
    cli.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = cli.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const auto start = std::chrono::steady_clock::now();
    app::RunConfig config = app::load_config(config_path);
    if (!out_dir.empty()) config.output.directory = out_dir;
    if (*seed_opt) config.thermal.seed = seed;
    const auto files = app::run_command(command, config, {threads});
    app::write_outputs(config.output.directory, files);
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    std::cerr << command << ": wrote " << files.size() << " files to " << config.output.directory.string()
              << " in " << elapsed.count() << " s\n";
    return 0;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.kind() == ErrorKind::config ? 2 : 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}

#pragma once

#include "config.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace bipolaron::app {

struct OutputFile {
  std::string name;
  std::string contents;
};

struct RunOptions {
  int threads = 1;
};

struct Pipeline {
  RunConfig config;
  EquilibriumSolution equilibrium;
  ModeTable axial;
  ModeTable transverse;  // along the drive axis
  TweezerSettings settings;
  std::vector<std::string> warnings;
};

/// Equilibrium, modes and tweezer settings for a configuration.
Pipeline build_pipeline(const RunConfig& config);

std::vector<std::string> command_names();

/// Runs a command entirely in memory. Throws Error on failure.
std::vector<OutputFile> run_command(const std::string& command, const RunConfig& config,
                                    const RunOptions& options);

/// Writes files into `directory`, creating it if needed. Each file goes through
/// a temporary name and is renamed into place only after all writes succeed.
void write_outputs(const std::filesystem::path& directory, const std::vector<OutputFile>& files);

}  // namespace bipolaron::app

// commands.hpp - run drivers behind the CLI subcommands: each loads a config,
// produces a deterministic set of CSV/plot outputs in a per-run directory,
// and reports failures through the eit error hierarchy.
#ifndef EIT_COMMANDS_HPP
#define EIT_COMMANDS_HPP

#include <filesystem>
#include <iosfwd>
#include <string>

#include "eit/config.hpp"

namespace eit {

// Output directory for a run: <output_dir>/<mode>-<hash of config bytes>,
// or exactly `out_override` when given.  Created on return.
std::filesystem::path prepare_run_dir(const RunConfig& cfg, const std::string& raw_config,
                                      const std::string& out_override);

void cmd_spectrum(const RunConfig& cfg, const std::filesystem::path& dir, int jobs,
                  std::ostream& log);
void cmd_sweep(const RunConfig& cfg, const std::filesystem::path& dir, int jobs,
               std::ostream& log);
void cmd_holeburn(const RunConfig& cfg, const std::filesystem::path& dir, int jobs,
                  std::ostream& log);
void cmd_analyze(const RunConfig& cfg, const std::filesystem::path& dir, std::ostream& log);

// Loads the config, prepares the run directory, and dispatches on mode.
// `subcommand` ("spectrum", "sweep", "holeburn", "analyze" or "" for any)
// must agree with the config's mode.  Returns the run directory.
std::filesystem::path run_from_config(const std::string& config_path,
                                      const std::string& subcommand,
                                      const std::string& out_override, int jobs,
                                      std::ostream& log);

// Process exit code for an error: 2 validation/config, 3 numeric/analysis,
// 4 I/O, 1 anything else.
int exit_code_for(const std::exception& e);

}  // namespace eit

#endif  // EIT_COMMANDS_HPP

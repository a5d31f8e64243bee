#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "bcd/run_config.hpp"

namespace bcd::cli {

/// Entry point of the `bcd` tool. `args` excludes the program name. Returns
/// the process exit status: 0 on success (and for --help), nonzero exactly
/// when an error was written to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// Subcommands on a fully resolved config. They throw bcd::Error on bad input.
void cmd_index(const RunConfig& config, std::ostream& out, std::ostream& err);
void cmd_mask(const RunConfig& config, std::ostream& out, std::ostream& err);
void cmd_change(const RunConfig& config, std::ostream& out, std::ostream& err);
void cmd_change_baseline(const RunConfig& config, std::ostream& out, std::ostream& err);
void cmd_eval(const RunConfig& config, std::ostream& out, std::ostream& err);
void cmd_bench(const RunConfig& config, std::ostream& out, std::ostream& err);
void cmd_sweep(const RunConfig& config, std::ostream& out, std::ostream& err);
void cmd_pipeline(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Sidecar written next to a command's outputs: "<first output>.meta.json"
/// in each output directory, or `metadata.json` for pipeline runs.
std::string metadata_json(const std::string& command, const RunConfig& config,
                          const std::vector<std::string>& outputs,
                          const nlohmann::json& results);

}  // namespace bcd::cli

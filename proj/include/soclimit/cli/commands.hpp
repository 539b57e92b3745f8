#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "soclimit/cli/config.hpp"

namespace soclimit::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitConfig = 1,
    kExitNumerical = 2,
    kExitCheckFailed = 3,
};

/// Command implementations.  They throw on errors; `run` maps exceptions to exit codes.
/// `cfg` is resolved in place (defaults filled).
int cmd_simulate(Config& cfg, const std::filesystem::path& out_dir);
int cmd_check(Config& cfg, const std::filesystem::path& out_dir);
int cmd_study(Config& cfg, const std::filesystem::path& out_dir);
int cmd_avalanche(Config& cfg, const std::filesystem::path& out_dir);

/// Full command line: `soclimit <command> [options]`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace soclimit::cli

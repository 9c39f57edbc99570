#pragma once

// Command-line front end: run, sweep, assign and defaults sub-commands.

#include "swarm/assignment.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace swarm {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitRuntime = 3;

int cmd_run(const std::string& config_path, std::uint64_t seed, bool seed_given, const std::string& out_dir,
            bool timing);

int cmd_sweep(const std::string& config_path, const std::string& axis, const std::vector<std::string>& values,
              int seeds, const std::string& out_dir);

int cmd_assign(const std::string& rewards_path, const std::string& caps_path, std::ostream& out);

/// Numeric CSV (comma or whitespace separated); an empty file yields a 0x0
/// matrix. Throws ConfigError on ragged or non-numeric input.
RewardMatrix read_matrix(std::istream& in);

int cli_main(int argc, char** argv);

}  // namespace swarm

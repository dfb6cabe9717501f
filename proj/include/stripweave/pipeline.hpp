#pragma once

#include <iosfwd>
#include <string>

#include "stripweave/config.hpp"

namespace stripweave {

namespace exit_code {
constexpr int ok = 0;
constexpr int failure = 1;
constexpr int threshold = 2;
constexpr int usage = 64;
constexpr int missing_input = 66;
constexpr int solver = 70;
}  // namespace exit_code

struct RunOptions {
  std::string out_dir;  // overrides JobConfig::output when non-empty
  int threads = 0;      // overrides JobConfig::threads when positive
  bool resume = false;
};

/// Each command prints to `out`, writes its artifacts under the output
/// directory and returns a process exit code.
int cmd_plan(const JobConfig& cfg, const RunOptions& opt, std::ostream& out);
int cmd_solve(const JobConfig& cfg, const RunOptions& opt, std::ostream& out);
int cmd_export(const JobConfig& cfg, const RunOptions& opt, std::ostream& out);
int cmd_validate(const JobConfig& cfg, const RunOptions& opt, std::ostream& out);

/// Dispatches by command name; maps exceptions to exit codes.
int run_command(const std::string& command, const std::string& config_path, const RunOptions& opt, std::ostream& out);

}  // namespace stripweave

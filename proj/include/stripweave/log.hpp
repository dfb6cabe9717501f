#pragma once

#include <string>

namespace stripweave {

enum class LogLevel { Error = 0, Warn = 1, Info = 2, Debug = 3 };

/// Level from STRIPWEAVE_LOG (error|warn|info|debug); default warn.
LogLevel log_level();
void set_log_level(LogLevel level);
void log(LogLevel level, const std::string& msg);

}  // namespace stripweave

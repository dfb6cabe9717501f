#include "stripweave/log.hpp"

#include <atomic>
#include <cstdlib>
#include <iostream>
#include <mutex>

namespace stripweave {

namespace {

std::mutex log_mutex;
std::atomic<int> level_override{-1};

}  // namespace

LogLevel log_level() {
  if (level_override >= 0) return static_cast<LogLevel>(level_override.load());
  const char* env = std::getenv("STRIPWEAVE_LOG");
  if (!env) return LogLevel::Warn;
  const std::string v(env);
  if (v == "error") return LogLevel::Error;
  if (v == "info") return LogLevel::Info;
  if (v == "debug") return LogLevel::Debug;
  return LogLevel::Warn;
}

void set_log_level(LogLevel level) { level_override = static_cast<int>(level); }

void log(LogLevel level, const std::string& msg) {
  if (level > log_level()) return;
  static const char* names[] = {"error", "warn", "info", "debug"};
  std::lock_guard<std::mutex> lock(log_mutex);
  std::cerr << "[" << names[static_cast<int>(level)] << "] " << msg << "\n";
}

}  // namespace stripweave

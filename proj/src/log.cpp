#include "sga/log.hpp"

#include <atomic>
#include <cstdlib>
#include <iostream>
#include <mutex>
#include <string_view>

namespace sga::log {

namespace {

Level from_env() {
  const char* v = std::getenv("SGA_LOG");
  if (v == nullptr) return Level::warn;
  const std::string_view s(v);
  if (s == "error") return Level::error;
  if (s == "info") return Level::info;
  if (s == "debug") return Level::debug;
  return Level::warn;
}

std::atomic<int>& current() {
  static std::atomic<int> lvl{static_cast<int>(from_env())};
  return lvl;
}

void emit(Level at, const char* tag, const std::string& msg) {
  if (static_cast<int>(at) > current().load()) return;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  std::cerr << "[" << tag << "] " << msg << '\n';
}

}  // namespace

Level level() { return static_cast<Level>(current().load()); }
void set_level(Level level) { current().store(static_cast<int>(level)); }

void error(const std::string& msg) { emit(Level::error, "error", msg); }
void warn(const std::string& msg) { emit(Level::warn, "warn", msg); }
void info(const std::string& msg) { emit(Level::info, "info", msg); }
void debug(const std::string& msg) { emit(Level::debug, "debug", msg); }

}  // namespace sga::log

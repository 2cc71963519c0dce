#pragma once

#include <string>

// Minimal stderr logger. Verbosity comes from SGA_LOG (error|warn|info|debug,
// default warn), read once on first use.
namespace sga::log {

enum class Level { error = 0, warn = 1, info = 2, debug = 3 };

Level level();
void set_level(Level level);

void error(const std::string& msg);
void warn(const std::string& msg);
void info(const std::string& msg);
void debug(const std::string& msg);

}  // namespace sga::log

// Copyright 2026 texrecon contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <ostream>
#include <sstream>
#include <string>

namespace texrecon::cli {

enum class LogLevel { kQuiet = 0, kError = 1, kInfo = 2, kDebug = 3 };

/// Level from TEXRECON_LOG (quiet, error, info, debug); info when unset.
/// Throws std::invalid_argument on an unknown value.
LogLevel log_level_from_env();

class Logger {
 public:
  Logger(std::ostream& sink, LogLevel level) : sink_(sink), level_(level) {}

  bool enabled(LogLevel l) const { return static_cast<int>(l) <= static_cast<int>(level_); }
  void error(const std::string& msg) const { write(LogLevel::kError, "error", msg); }
  void info(const std::string& msg) const { write(LogLevel::kInfo, "info", msg); }
  void debug(const std::string& msg) const { write(LogLevel::kDebug, "debug", msg); }

  /// Stream that forwards to the sink at info level, or discards.
  std::ostream* info_stream() { return enabled(LogLevel::kInfo) ? &sink_ : nullptr; }

 private:
  void write(LogLevel l, const char* tag, const std::string& msg) const {
    if (enabled(l)) sink_ << "[" << tag << "] " << msg << '\n';
  }

  std::ostream& sink_;
  LogLevel level_;
};

}  // namespace texrecon::cli

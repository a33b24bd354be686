#pragma once

// Minimal leveled logging. Level comes from GROUNDLINE_LOG
// (error|warn|info|debug, default warn); the sink can be replaced.

#include <cstdlib>
#include <functional>
#include <iostream>
#include <mutex>
#include <string>
#include <string_view>

namespace groundline::logging {

enum class Level { Error = 0, Warn = 1, Info = 2, Debug = 3 };

inline std::string_view level_name(Level level) {
  switch (level) {
    case Level::Error: return "error";
    case Level::Warn: return "warn";
    case Level::Info: return "info";
    case Level::Debug: return "debug";
  }
  return "?";
}

inline Level level_from_env() {
  const char* env = std::getenv("GROUNDLINE_LOG");
  if (env == nullptr) return Level::Warn;
  const std::string_view v(env);
  if (v == "error") return Level::Error;
  if (v == "info") return Level::Info;
  if (v == "debug") return Level::Debug;
  return Level::Warn;
}

using Sink = std::function<void(Level, std::string_view)>;

namespace detail {
struct State {
  std::mutex mutex;
  Level threshold = level_from_env();
  Sink sink = [](Level level, std::string_view msg) {
    std::cerr << "[groundline " << level_name(level) << "] " << msg << '\n';
  };
};
inline State& state() {
  static State s;
  return s;
}
}  // namespace detail

inline void set_level(Level level) {
  auto& s = detail::state();
  std::lock_guard lock(s.mutex);
  s.threshold = level;
}

/// Replaces the sink and returns the previous one.
inline Sink set_sink(Sink sink) {
  auto& s = detail::state();
  std::lock_guard lock(s.mutex);
  std::swap(s.sink, sink);
  return sink;
}

inline void write(Level level, std::string_view msg) {
  auto& s = detail::state();
  std::lock_guard lock(s.mutex);
  if (static_cast<int>(level) <= static_cast<int>(s.threshold) && s.sink) s.sink(level, msg);
}

inline void error(std::string_view msg) { write(Level::Error, msg); }
inline void warn(std::string_view msg) { write(Level::Warn, msg); }
inline void info(std::string_view msg) { write(Level::Info, msg); }
inline void debug(std::string_view msg) { write(Level::Debug, msg); }

}  // namespace groundline::logging

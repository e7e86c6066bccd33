#include "phishkd/log.hpp"

#include <iostream>
#include <mutex>
#include <string>
#include <utility>

namespace phishkd::log {
namespace {

std::mutex& sink_mutex() {
  static std::mutex m;
  return m;
}

std::string_view level_name(Level level) {
  switch (level) {
    case Level::debug: return "debug";
    case Level::info: return "info";
    case Level::warning: return "warning";
    case Level::error: return "error";
  }
  return "?";
}

void stderr_sink(Level level, std::string_view message) {
  std::cerr << '[' << level_name(level) << "] " << message << '\n';
}

Sink& current_sink() {
  static Sink sink = stderr_sink;
  return sink;
}

Level& min_level() {
  static Level level = Level::info;
  return level;
}

}  // namespace

Sink set_sink(Sink sink) {
  std::lock_guard lock(sink_mutex());
  if (!sink) sink = stderr_sink;
  return std::exchange(current_sink(), std::move(sink));
}

void set_min_level(Level level) {
  std::lock_guard lock(sink_mutex());
  min_level() = level;
}

void write(Level level, std::string_view message) {
  std::lock_guard lock(sink_mutex());
  if (level < min_level()) return;
  current_sink()(level, message);
}

}  // namespace phishkd::log
